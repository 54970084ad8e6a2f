import random
from fractions import Fraction

import pytest

from mahler.exact import GaussianRational, Poly, RatFun, RatMatrix, parse_ratfun
from mahler.systems import MahlerSystem


@pytest.fixture(scope="session")
def running_system():
    """Rank-1 system with matrix (2z+1)/(z+2): Fuchsian at 0, 1 and inf."""
    return MahlerSystem(2, RatMatrix([[parse_ratfun("(2*z+1)/(z+2)")]]))


@pytest.fixture(scope="session")
def thue_morse_system():
    """phi_2(y) = y/(1-z): solved by prod (1 - z^(2^k))."""
    return MahlerSystem(2, RatMatrix([[parse_ratfun("1/(1-z)")]]))


def random_gq(rng, height=8, gaussian=True):
    re = Fraction(rng.randint(-height, height), rng.randint(1, height))
    im = Fraction(rng.randint(-height, height), rng.randint(1, height)) \
        if gaussian and rng.random() < 0.3 else Fraction(0)
    return GaussianRational(re, im)


def random_poly(rng, max_deg=3, height=8, nonzero=False):
    while True:
        p = Poly([random_gq(rng, height) for _ in range(rng.randint(1, max_deg + 1))])
        if not nonzero or not p.is_zero():
            return p


def random_ratfun(rng, max_deg=3, height=8, nonzero=False):
    while True:
        f = RatFun(random_poly(rng, max_deg, height),
                   random_poly(rng, max_deg, height, nonzero=True))
        if not nonzero or not f.is_zero():
            return f


def random_fuchsian_system(rng, n=2, height=4, p=2, avoid_resonance=True):
    """Random exact system Fuchsian at 0, 1 and inf.

    Entries (a + b z)/(1 + d z) with den(0), den(1) nonzero; retried
    until the three value matrices are invertible (and, optionally,
    until the value at 1 is numerically non-resonant for p).
    """
    import numpy as np
    while True:
        rows = []
        for _ in range(n):
            row = []
            for _ in range(n):
                a = random_gq(rng, height, gaussian=False)
                b = random_gq(rng, height, gaussian=False)
                d = random_gq(rng, max(1, height // 2), gaussian=False)
                den = Poly([GaussianRational(1), d])
                if den.degree > 0 and den.eval_exact(GaussianRational(1)).is_zero():
                    den = Poly([GaussianRational(1)])
                row.append(RatFun(Poly([a, b]), den))
            rows.append(row)
        A = RatMatrix(rows)
        if A.det().is_zero():
            continue
        try:
            S = MahlerSystem(p, A)
        except Exception:
            continue
        from mahler.systems import classify_fuchsian
        if not all(classify_fuchsian(S, pl).fuchsian for pl in ("0", "1", "inf")):
            continue
        if avoid_resonance:
            c0 = A.value_at("1").to_numpy()
            eigs = np.linalg.eigvals(c0)
            scale = max(float(np.abs(eigs).max()), 1e-30)
            bad = False
            pk = 1.0
            for k in range(1, 20):
                pk *= p
                for lam in eigs:
                    for mu in eigs:
                        if abs(lam - pk * mu) <= 1e-6 * scale * pk:
                            bad = True
            if bad:
                continue
        return S
