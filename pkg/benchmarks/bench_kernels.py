"""Time the numba kernels against their numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Each kernel is run once to trigger compilation, then timed with
``timeit``; the table also reports the largest difference between the two
implementations' outputs.
"""

import argparse
import math
import timeit

import numpy as np

from hyperzero import kernels
from hyperzero._accel import HAVE_NUMBA


def _cases(rng):
    # Aberth on a degree-8 polynomial with known roots
    roots = rng.uniform(0.5, 5.0, 8) * np.exp(1j * rng.uniform(0, 2 * np.pi, 8))
    coeffs = np.poly(roots)[::-1].astype(np.complex128)
    z0 = kernels.initial_guesses(coeffs)
    yield "aberth (deg 8)", "aberth", (coeffs, z0, 1e-13, 500), lambda out: np.sort_complex(out[0])

    # Newton on the angle system, five roots, started from a perturbed solution
    taus = np.array([0.5, 1.5, 2.5, 3.5, 4.5])
    theta = 0.7
    from hyperzero.genseq import ProblemInstance
    from hyperzero.theta import solve_theta

    inst = ProblemInstance(("1/2", "3/2", "5/2", "7/2", "9/2"), 1, 2)
    sol = solve_theta(inst, theta)
    ang0 = np.array(sol.angles) + 1e-3
    args = (taus, theta, sol.tau * 1.001, ang0, sol.l, inst.r, 1e-12, 100)
    yield "theta_newton (n=5)", "theta_newton", args, lambda out: np.append(out[0], out[1])

    # scalar recurrence, 2000 z values, m = 400
    a = np.array([1.0, -2.0, 1.0])
    zs = np.linspace(0.01, 3.99, 2000)
    yield "recurrence (2000 z, m=400)", "recurrence", (a, 1, zs, 400), lambda out: out[0] * np.exp2(out[1])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy kernels are available")
    rng = np.random.default_rng(7)
    print(f"{'kernel':<28}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}{'max diff':>12}")
    for label, name, fargs, view in _cases(rng):
        loops, vec = kernels.IMPLEMENTATIONS[name]
        out_l = loops(*fargs)  # compile
        out_v = vec(*fargs)
        tl = min(timeit.repeat(lambda: loops(*fargs), number=1, repeat=args.repeat))
        tv = min(timeit.repeat(lambda: vec(*fargs), number=1, repeat=args.repeat))
        a, b = view(out_l), view(out_v)
        scale = max(1.0, float(np.max(np.abs(b))))
        diff = float(np.max(np.abs(a - b))) / scale
        speed = tv / tl if tl > 0 else math.inf
        print(f"{label:<28}{tl * 1e3:>12.3f}{tv * 1e3:>12.3f}{speed:>9.1f}x{diff:>12.2e}")


if __name__ == "__main__":
    main()
