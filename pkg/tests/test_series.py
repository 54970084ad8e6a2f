import cmath
import random

import numpy as np
import pytest

from mahler.errors import NotAnalytic, SingularLeadingTerm
from mahler.exact import GMat, RatFun, RatMatrix, gq, parse_ratfun
from mahler.series import (SeriesMatrix, compose_exp, expand_at,
                           series_inverse)

from conftest import random_ratfun


def _scalar(series, k):
    return series.coeffs[k][0, 0]


def test_expand_geometric_at_0():
    S = expand_at(RatMatrix([[parse_ratfun("1/(1-z)")]]), "0", 3)
    assert [_scalar(S, k) for k in range(4)] == [gq(1)] * 4


def test_expand_running_at_1():
    # value and derivative of (2z+1)/(z+2) at 1, independently by the
    # quotient rule
    f = parse_ratfun("(2*z+1)/(z+2)")
    S = expand_at(RatMatrix([[f]]), "1", 1)
    one = gq(1)
    assert _scalar(S, 0) == f.eval_exact(one)
    assert _scalar(S, 1) == f.derivative().eval_exact(one)


def test_expand_pole_at_inf():
    with pytest.raises(NotAnalytic):
        expand_at(RatMatrix([[RatFun.z()]]), "inf", 2)


def test_expand_multiplicative_up_to_truncation():
    rng = random.Random(11)
    for _ in range(8):
        M = RatMatrix([[random_ratfun(rng, max_deg=2, height=3) for _ in range(2)]
                       for _ in range(2)])
        N = RatMatrix([[random_ratfun(rng, max_deg=2, height=3) for _ in range(2)]
                       for _ in range(2)])
        if not (M.is_analytic_at("0") and N.is_analytic_at("0")):
            continue
        order = 6
        lhs = expand_at(M @ N, "0", order)
        rhs = expand_at(M, "0", order) @ expand_at(N, "0", order)
        assert lhs == rhs


def test_compose_exp_constant():
    S = compose_exp(RatMatrix([[RatFun.const(gq(5))]]), 4)
    assert _scalar(S, 0) == gq(5)
    assert all(_scalar(S, k).is_zero() for k in range(1, 5))


def test_compose_exp_is_exponential():
    S = compose_exp(RatMatrix([[RatFun.z()]]), 2)
    assert [str(_scalar(S, k)) for k in range(3)] == ["1", "1", "1/2"]


def test_compose_exp_chain_rule():
    # numeric differentiation oracle at u = 1e-6
    f = parse_ratfun("(2*z+1)/(z+2)")
    S = compose_exp(RatMatrix([[f]]), 1)
    h = 1e-6
    d_num = (f.eval(cmath.exp(h)) - f.eval(cmath.exp(-h))) / (2 * h)
    assert _scalar(S, 0).to_complex() == pytest.approx(f.eval(1.0))
    assert _scalar(S, 1).to_complex() == pytest.approx(d_num, rel=1e-6)


def test_compose_exp_agrees_with_eval_near_1():
    f = parse_ratfun("(2*z+1)/(z+2)")
    S = compose_exp(RatMatrix([[f]]), 14)
    for z in (1.05, 0.95, 1.0 + 0.08j, 0.92 - 0.05j):
        u = cmath.log(z)
        assert abs(u) <= 0.11 or abs(z - 1) <= 0.1
        got = S.eval(u)[0, 0]
        assert abs(got - f.eval(z)) < 1e-9


def test_series_inverse_scalar_geometric():
    S = SeriesMatrix("0", 3, [GMat([[1]]), GMat([[-1]]),
                              GMat.zeros(1, 1), GMat.zeros(1, 1)], exact=True)
    T = series_inverse(S)
    assert [str(T.coeffs[k][0, 0]) for k in range(4)] == ["1", "1", "1", "1"]


def test_series_inverse_identity():
    S = SeriesMatrix.identity("0", 5, 3)
    assert series_inverse(S) == S


def test_series_inverse_random_exact():
    rng = random.Random(5)
    for _ in range(6):
        coeffs = [GMat.eye(2)]
        for _ in range(5):
            coeffs.append(GMat([[gq(rng.randint(-3, 3)) for _ in range(2)]
                                for _ in range(2)]))
        S = SeriesMatrix("0", 5, coeffs, exact=True)
        T = series_inverse(S)
        assert (S @ T) == SeriesMatrix.identity("0", 5, 2)
        assert series_inverse(T) == S


def test_series_inverse_singular_leading():
    S = SeriesMatrix("0", 2, [GMat.zeros(1, 1), GMat([[1]]), GMat([[1]])],
                     exact=True)
    with pytest.raises(SingularLeadingTerm):
        series_inverse(S)


def test_place_mismatch_rejected():
    a = SeriesMatrix.identity("0", 2, 1)
    b = SeriesMatrix.identity("1", 2, 1)
    with pytest.raises(ValueError):
        a @ b
