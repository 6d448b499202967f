"""Complex double-precision polynomials and a simultaneous root finder."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .. import kernels


class ConvergenceError(RuntimeError):
    """Raised when an iteration stops before meeting its tolerance.

    ``best`` carries the last iterate so callers can inspect or reuse it.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class FloatPolynomial:
    """Polynomial with complex coefficients, ``coeffs[k]`` multiplying ``x**k``.

    Trailing coefficients with magnitude at most 1e-300 are dropped, so the
    stored leading coefficient is always significant.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[complex]):
        c = np.array(coeffs, dtype=np.complex128).ravel()
        k = c.size
        while k > 0 and abs(c[k - 1]) <= 1e-300:
            k -= 1
        if k == 0:
            raise ValueError("zero polynomial")
        c = c[:k].copy()
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def from_exact(cls, p) -> "FloatPolynomial":
        return cls(p.float_coeffs())

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, x):
        return np.polyval(self.coeffs[::-1], x)

    def derivative(self) -> "FloatPolynomial":
        if self.degree == 0:
            raise ValueError("derivative of a constant is the zero polynomial")
        return FloatPolynomial(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def scale(self) -> float:
        """Sum of coefficient magnitudes."""
        return float(np.abs(self.coeffs).sum())

    def residual_scale(self, x) -> np.ndarray:
        """``sum |c_k| |x|^k``, the natural size of ``p(x)`` at ``x``."""
        return np.polyval(np.abs(self.coeffs[::-1]), np.abs(x))

    def __repr__(self) -> str:
        return f"FloatPolynomial({self.coeffs.tolist()!r})"


def complex_roots(p: FloatPolynomial, tol: float = 1e-13, maxiter: int = 500) -> np.ndarray:
    """All roots with multiplicity by Aberth-Ehrlich iteration.

    Every returned root satisfies ``|p(x)| <= tol * sum |c_k| |x|^k``.
    Raises :class:`ConvergenceError` if the iteration cap is hit.
    """
    if not isinstance(p, FloatPolynomial):
        p = FloatPolynomial(p)
    if p.degree < 1:
        raise ValueError("complex_roots needs degree >= 1")
    c = p.coeffs
    if p.degree == 1:
        return np.array([-c[0] / c[1]])
    # zero roots are exact; deflate them first
    nz = 0
    while c[nz] == 0:
        nz += 1
    core = c[nz:]
    roots = np.zeros(0, dtype=np.complex128)
    if core.size > 1:
        if core.size == 2:
            roots = np.array([-core[0] / core[1]])
        else:
            z, ok, _ = kernels.aberth(core, tol, maxiter)
            if not ok:
                raise ConvergenceError(
                    f"Aberth iteration did not converge in {maxiter} steps (degree {core.size - 1})",
                    best=z,
                )
            roots = z
    if nz:
        roots = np.concatenate([np.zeros(nz, dtype=np.complex128), roots])
    return roots
