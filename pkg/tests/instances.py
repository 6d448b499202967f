"""Seeded problem instances shared by the unit and acceptance tests."""

import random
from fractions import Fraction

from hyperzero.genseq import ProblemInstance

SEED = 20240611

# rationals with small denominators in [1/2, 5]
ROOT_POOL = sorted({Fraction(p, q) for q in (1, 2, 3, 4) for p in range(1, 21) if Fraction(1, 2) <= Fraction(p, q) <= 5})
LEADING_POOL = (Fraction(1), Fraction(1, 2), Fraction(2), Fraction(3, 2))


def random_instances(count=20, seed=SEED, max_n=5, max_r=4):
    """Instances with n <= max_n, r <= max_r, roots in [1/2, 5], excluding (n, r) in {(1, 1), (2, 1)}."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, max_n)
        r = rng.randint(1, max_r)
        if (n, r) in ((1, 1), (2, 1)):
            continue
        roots = tuple(rng.choice(ROOT_POOL) for _ in range(n))
        out.append(ProblemInstance(roots, rng.choice(LEADING_POOL), r))
    return out


def binomial_instance(n, r):
    return ProblemInstance((1,) * n, 1, r)


SQUARE_R1 = ProblemInstance((1, 1), 1, 1)
LINEAR_R2 = ProblemInstance((1,), 1, 2)
