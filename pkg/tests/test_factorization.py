import random

import pytest

from mahler.errors import SingularInput
from mahler.exact import (GaussianRational, Poly, RatFun, RatMatrix, gq,
                          parse_ratfun)
from mahler.factorization import (ElementaryFactor, factor_regular_at_0,
                                  factor_regular_at_1, uniformizer)


def _regular_at(M: RatMatrix, place: str) -> bool:
    if not all(e.is_analytic_at(place) for row in M.a for e in row):
        return False
    return not M.value_at(place).det().is_zero()


# -- worked examples ---------------------------------------------------------

def test_factor_at_1_diag_example():
    M = RatMatrix([[parse_ratfun("z-1"), RatFun.zero()],
                   [RatFun.zero(), RatFun.one()]])
    F = factor_regular_at_1(M)
    assert F.prefactor_valuation == 0
    assert F.steps == 1
    T, D = F.elementary[0]
    assert T.i == D.i == 0
    assert [str(c) for c in T.row] == ["1", "0"]
    assert D.u == uniformizer("1")
    assert F.regular_part == RatMatrix([[parse_ratfun("z+1"), RatFun.zero()],
                                        [RatFun.zero(), RatFun.one()]])
    assert F.reassemble() == M


def test_factor_at_1_regular_input_passthrough(running_system):
    F = factor_regular_at_1(running_system.A)
    assert F.prefactor_valuation == 0 and F.steps == 0
    assert F.regular_part == running_system.A


def test_factor_at_1_pole_clearing():
    M = RatMatrix([[parse_ratfun("1/(z-1)")]])
    F = factor_regular_at_1(M)
    assert F.prefactor_valuation == 1
    assert F.steps == 0
    assert F.regular_part == RatMatrix([[parse_ratfun("1/(z+1)")]])
    assert F.reassemble() == M


def test_factor_at_0_examples():
    M = RatMatrix([[RatFun.z(), RatFun.zero()], [RatFun.zero(), RatFun.one()]])
    F = factor_regular_at_0(M)
    assert F.prefactor_valuation == 0 and F.steps == 1
    assert F.regular_part == RatMatrix.eye(2)
    assert F.reassemble() == M

    F2 = factor_regular_at_0(RatMatrix([[parse_ratfun("1/z")]]))
    assert F2.prefactor_valuation == 1 and F2.steps == 0
    assert F2.regular_part == RatMatrix.eye(1)

    M3 = RatMatrix([[parse_ratfun("z+1")]])
    F3 = factor_regular_at_0(M3)
    assert F3.steps == 0 and F3.regular_part == M3


def test_factor_singular_input():
    with pytest.raises(SingularInput):
        factor_regular_at_1(RatMatrix([[RatFun.one(), RatFun.one()],
                                       [RatFun.one(), RatFun.one()]]))


# -- randomized reassembly -----------------------------------------------------

def _random_regular(rng, n, place):
    """C + t*P with C invertible, entries occasionally divided by an
    invertible scalar, regular at the place."""
    t_poly = Poly.x() if place == "0" else Poly([gq(-1), gq(1)])
    while True:
        C = [[gq(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        P = [[gq(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        rows = [[RatFun(Poly.const(C[i][j]) + t_poly * Poly.const(P[i][j]))
                 for j in range(n)] for i in range(n)]
        M = RatMatrix(rows)
        if rng.random() < 0.3:
            M = M.scale(parse_ratfun("1/(z+3)"))
        if M.det().is_zero():
            continue
        if _regular_at(M, place):
            return M


def _random_elementary(rng, n, place):
    u = uniformizer(place)
    if rng.random() < 0.5:
        i = rng.randrange(n)
        return ElementaryFactor("D", i, n, u=u).matrix()
    i = rng.randrange(n)
    row = [gq(rng.randint(-2, 2)) for _ in range(n)]
    row[i] = gq(rng.choice([1, -1, 2]))
    return ElementaryFactor("T", i, n, row=tuple(row)).matrix()


@pytest.mark.parametrize("place", ["0", "1"])
def test_random_products_reassemble_exactly(place):
    rng = random.Random(67 if place == "1" else 71)
    for _ in range(25):
        n = rng.choice([2, 3])
        M = _random_regular(rng, n, place)
        for _ in range(rng.randint(0, 4)):
            M = _random_elementary(rng, n, place) @ M
        F = (factor_regular_at_1 if place == "1" else factor_regular_at_0)(M)
        # exact reassembly, structural equality
        assert F.reassemble() == M
        # iteration count equals the det valuation after pole clearing
        u = uniformizer(place)
        scaled = M.scale(u ** F.prefactor_valuation)
        assert F.steps == scaled.det().valuation(place)
        # regular part is genuinely regular
        assert _regular_at(F.regular_part, place)


def test_place_1_prefactors_regular_at_0_and_inf():
    rng = random.Random(73)
    for _ in range(10):
        n = 2
        M = _random_regular(rng, n, "1")
        for _ in range(rng.randint(1, 3)):
            M = _random_elementary(rng, n, "1") @ M
        F = factor_regular_at_1(M)
        C = F.prefactor()
        for place in ("0", "inf"):
            for row in C.a:
                for e in row:
                    assert e.is_analytic_at(place)
            assert not C.value_at(place).det().is_zero()


def test_termination_counter_matches_valuation():
    # build a matrix with det valuation exactly 3 at 1
    u = uniformizer("1")
    M = RatMatrix([[parse_ratfun("(z-1)^2"), RatFun.zero()],
                   [RatFun.zero(), parse_ratfun("z-1")]])
    F = factor_regular_at_1(M)
    assert F.steps == 3
    assert F.reassemble() == M
