"""Floating-point hot loops, each in a numba and a pure-numpy flavour.

The ``*_loops`` functions are compiled with numba when it is enabled; the
``*_numpy`` functions are vectorized equivalents used as the fallback.
Both flavours follow the same update order so results agree to rounding.
Exact arithmetic never goes through this module.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import BACKEND, njit, select

__all__ = [
    "BACKEND",
    "IMPLEMENTATIONS",
    "aberth",
    "initial_guesses",
    "theta_newton",
    "recurrence_values",
]

_RESCALE = 2.0**500
_RESCALE_LOG2 = 500


def initial_guesses(coeffs: np.ndarray, offset: float = 0.4) -> np.ndarray:
    """Points on a circle whose radius bounds the root moduli from the coefficient ratios."""
    c = np.asarray(coeffs, dtype=np.complex128)
    n = c.size - 1
    lead = abs(c[n])
    ks = np.arange(1, n + 1)
    ratios = np.abs(c[n - ks]) / lead
    with np.errstate(divide="ignore"):
        radius = float(np.max(ratios ** (1.0 / ks)))
    if not np.isfinite(radius) or radius == 0.0:
        radius = 1.0
    angles = 2.0 * np.pi * np.arange(n) / n + offset
    return radius * np.exp(1j * angles)


# -- Aberth-Ehrlich -----------------------------------------------------------


@njit
def _aberth_loops(coeffs, z0, tol, maxiter):
    n = coeffs.size - 1
    z = z0.copy()
    absc = np.abs(coeffs)
    done = np.zeros(n, dtype=np.bool_)
    w = np.zeros(n, dtype=np.complex128)
    for it in range(maxiter):
        nconv = 0
        for i in range(n):
            if done[i]:
                w[i] = 0.0
                nconv += 1
                continue
            zi = z[i]
            p = coeffs[n]
            dp = 0.0 + 0.0j
            scale = absc[n]
            az = abs(zi)
            for k in range(n - 1, -1, -1):
                dp = dp * zi + p
                p = p * zi + coeffs[k]
                scale = scale * az + absc[k]
            if abs(p) <= tol * scale:
                done[i] = True
                w[i] = 0.0
                nconv += 1
                continue
            ratio = p / dp
            s = 0.0 + 0.0j
            for j in range(n):
                if j != i:
                    s += 1.0 / (zi - z[j])
            w[i] = ratio / (1.0 - ratio * s)
        if nconv == n:
            return z, True, it
        for i in range(n):
            z[i] -= w[i]
    return z, False, maxiter


def _aberth_numpy(coeffs, z0, tol, maxiter):
    n = coeffs.size - 1
    z = z0.copy()
    absc = np.abs(coeffs)
    done = np.zeros(n, dtype=bool)
    eye = np.eye(n, dtype=bool)
    for it in range(maxiter):
        p = np.full(n, coeffs[n], dtype=np.complex128)
        dp = np.zeros(n, dtype=np.complex128)
        scale = np.full(n, absc[n])
        az = np.abs(z)
        for k in range(n - 1, -1, -1):
            dp = dp * z + p
            p = p * z + coeffs[k]
            scale = scale * az + absc[k]
        done |= np.abs(p) <= tol * scale
        if done.all():
            return z, True, it
        diff = z[:, None] - z[None, :]
        diff[eye] = 1.0
        inv = 1.0 / diff
        inv[eye] = 0.0
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            w = ratio / (1.0 - ratio * s)
        w[done] = 0.0
        z = z - w
    return z, False, maxiter


_aberth = select(_aberth_loops, _aberth_numpy)


def aberth(coeffs, tol: float = 1e-13, maxiter: int = 500, z0=None):
    """Simultaneous root iteration; returns ``(roots, converged, iterations)``."""
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if z0 is None:
        z0 = initial_guesses(c)
    z0 = np.ascontiguousarray(z0, dtype=np.complex128)
    return _aberth(c, z0, float(tol), int(maxiter))


# -- Newton on the angle system ----------------------------------------------


@njit
def _theta_newton_loops(taus, theta, tau, angles, l, r, tol, maxiter):
    n = taus.size
    ang = angles.copy()
    f = np.zeros(n)
    c = np.zeros(n)
    target = r * theta + l * math.pi
    st = math.sin(theta)
    extra = False
    resid = 1e300
    for it in range(maxiter + 1):
        total = 0.0
        resid = 0.0
        for k in range(n):
            d = math.sin(ang[k] - theta)
            f[k] = taus[k] * math.sin(ang[k]) / d - tau
            c[k] = -taus[k] * st / (d * d)
            total += ang[k]
            if abs(f[k]) > resid:
                resid = abs(f[k])
        resid /= max(1.0, abs(tau))
        g = total - target
        if abs(g) > resid:
            resid = abs(g)
        if resid <= tol:
            if extra:
                return ang, tau, resid, it, True
            extra = True
        sinv = 0.0
        sfc = 0.0
        for k in range(n):
            sinv += 1.0 / c[k]
            sfc += f[k] / c[k]
        dtau = (-g + sfc) / sinv
        lam = 1.0
        for _ in range(60):
            ok = tau + lam * dtau > 0.0
            if ok:
                for k in range(n):
                    a = ang[k] + lam * (dtau - f[k]) / c[k]
                    if not (theta < a < math.pi):
                        ok = False
                        break
            if ok:
                break
            lam *= 0.5
        for k in range(n):
            ang[k] += lam * (dtau - f[k]) / c[k]
        tau += lam * dtau
    return ang, tau, resid, maxiter, False


def _theta_newton_numpy(taus, theta, tau, angles, l, r, tol, maxiter):
    ang = angles.copy()
    target = r * theta + l * math.pi
    st = math.sin(theta)
    extra = False
    resid = 1e300
    for it in range(maxiter + 1):
        d = np.sin(ang - theta)
        f = taus * np.sin(ang) / d - tau
        c = -taus * st / (d * d)
        g = ang.sum() - target
        resid = max(np.abs(f).max() / max(1.0, abs(tau)), abs(g))
        if resid <= tol:
            if extra:
                return ang, tau, resid, it, True
            extra = True
        dtau = (-g + (f / c).sum()) / (1.0 / c).sum()
        dang = (dtau - f) / c
        lam = 1.0
        for _ in range(60):
            trial = ang + lam * dang
            if tau + lam * dtau > 0.0 and np.all((trial > theta) & (trial < math.pi)):
                break
            lam *= 0.5
        ang = ang + lam * dang
        tau = tau + lam * dtau
    return ang, tau, resid, maxiter, False


_theta_newton = select(_theta_newton_loops, _theta_newton_numpy)


def theta_newton(taus, theta, tau, angles, l, r, tol=1e-12, maxiter=100):
    """Damped Newton for the angle tuple; returns ``(angles, tau, residual, iters, ok)``."""
    return _theta_newton(
        np.ascontiguousarray(taus, dtype=np.float64),
        float(theta),
        float(tau),
        np.ascontiguousarray(angles, dtype=np.float64),
        int(l),
        int(r),
        float(tol),
        int(maxiter),
    )


# -- scalar recurrence --------------------------------------------------------


@njit
def _recurrence_loops(a, r, zs, m):
    # j outer, z inner: the z values are independent, so the inner loop vectorizes
    n = a.size - 1
    size = max(n, r) + 1
    nz = zs.size
    buf = np.zeros((size, nz))
    exps = np.zeros(nz, dtype=np.int64)
    inv0 = 1.0 / a[0]
    for q in range(nz):
        buf[0, q] = inv0
    for j in range(1, m + 1):
        row = j % size
        kmax = n if n < j else j
        out = buf[row]
        out[:] = 0.0
        for k in range(1, kmax + 1):
            src = buf[(j - k) % size]
            ak = -a[k] * inv0
            for q in range(nz):
                out[q] += ak * src[q]
        if j >= r:
            src = buf[(j - r) % size]
            for q in range(nz):
                out[q] -= zs[q] * src[q] * inv0
        for q in range(nz):
            if abs(buf[row, q]) > _RESCALE:
                for i in range(size):
                    buf[i, q] /= _RESCALE
                exps[q] += _RESCALE_LOG2
    return buf[m % size].copy(), exps


def _recurrence_numpy(a, r, zs, m):
    n = a.size - 1
    size = max(n, r) + 1
    nz = zs.size
    buf = np.zeros((size, nz))
    inv0 = 1.0 / a[0]
    buf[0] = inv0
    exps = np.zeros(nz, dtype=np.int64)
    for j in range(1, m + 1):
        out = np.zeros(nz)
        for k in range(1, min(n, j) + 1):
            out += (-a[k] * inv0) * buf[(j - k) % size]
        if j >= r:
            out -= zs * buf[(j - r) % size] * inv0
        buf[j % size] = out
        over = np.abs(out) > _RESCALE
        if over.any():
            buf[:, over] /= _RESCALE
            exps[over] += _RESCALE_LOG2
    return buf[m % size].copy(), exps


_recurrence = select(_recurrence_loops, _recurrence_numpy)


def recurrence_values(a, r: int, zs, m: int):
    """Float values of ``H_m`` at each z, as ``(mantissa, log2 exponent)`` pairs.

    ``H_m(z) = mantissa * 2**exponent``.  Only the sign and relative size are
    meaningful; the forward recurrence is run in double precision.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    zs = np.ascontiguousarray(np.atleast_1d(zs), dtype=np.float64)
    return _recurrence(a, int(r), zs, int(m))


IMPLEMENTATIONS = {
    "aberth": (_aberth_loops, _aberth_numpy),
    "theta_newton": (_theta_newton_loops, _theta_newton_numpy),
    "recurrence": (_recurrence_loops, _recurrence_numpy),
}
