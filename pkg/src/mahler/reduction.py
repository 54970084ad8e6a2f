"""Local reduction of a Fuchsian Mahler system to a constant system.

At 0 the gauge F with F(0) = I solving  A F = phi_p(F) A(0)  is computed
order by order from the two-branch coefficient recursion

    p not dividing k:  F_k = -A_0^{-1} ( sum_{j=1..k} A_j F_{k-j} )
    k = p*i:           F_k = A_0^{-1} F_i A_0 - A_0^{-1} ( sum_{j=1..k} A_j F_{k-j} )

which is exact over Q(i) when the input is exact.  The place infinity is
the same computation after the substitution z -> 1/z.  At 1 the system
is transported to a q-difference system B(u) = A(e^u) by z = exp(u) and
the gauge G with G(0) = I solving  G(pu) C_0 = B(u) G(u),  C_0 = A(1),
is obtained from the Sylvester-type equations

    p^k G_k C_0 - C_0 G_k = sum_{j=1..k} B_j G_{k-j}

which are uniquely solvable iff no two eigenvalues of A(1) differ by a
factor p^k (non-resonance).  Resonant systems are rejected with full
diagnostic data rather than sheared.

A convergence radius estimate for the place-0/infinity series comes from
the majorant bound: writing a_j for the 1-norms of the Taylor
coefficients of A and b for the 1-norm of A(0)^{-1}, the coefficient
norms are dominated by the series of

    f_0 / ( 1 - b * ( sum_{j>=1} a_j t^j + a_0 * t/(1-t) ) )

whose radius is estimated as the smallest positive root of the
denominator (bisection on a truncation, capped at the pole distance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotFuchsianAtPlace, Resonant
from .exact import GMat, GaussianRational, RatMatrix
from .series import (SeriesMatrix, compose_exp, expand_at,
                     numeric_expansion_norms)
from .systems import MahlerSystem, classify_fuchsian

TAU_RES = 1e-9
RADIUS_TERMS = 128


@dataclass(frozen=True)
class LocalReduction:
    """Constant model A_const and truncated gauge F_hat at one place."""

    place: str
    a_const: GMat | np.ndarray
    f_hat: SeriesMatrix
    radius_estimate: Optional[float] = None

    def a_const_numpy(self) -> np.ndarray:
        return self.a_const.to_numpy() if isinstance(self.a_const, GMat) else self.a_const

    def trust_radius(self) -> float:
        """Radius within which the truncated tail is trusted.

        Half the majorant radius when available, otherwise the largest
        rho with max-coefficient-norm * rho^N < 1e-16.
        """
        if self.radius_estimate is not None:
            return self.radius_estimate / 2.0
        c = self.f_hat.max_coeff_norm(start=1)
        if c == 0.0:
            return 0.9
        n = max(self.f_hat.order, 1)
        return min(0.9, (1e-16 / c) ** (1.0 / n))


@dataclass(frozen=True)
class ResidualReport:
    value: float
    exact: bool

    def __float__(self):
        return self.value


def _norms_tail(S: MahlerSystem, place: str, terms: int):
    return numeric_expansion_norms(S.A, place, terms)


def _pole_distance(S: MahlerSystem, place: str) -> float:
    """Distance from the expansion center to the nearest pole, in the
    local variable (infinity if the entries are polynomial there)."""
    best = math.inf
    for row in S.A.a:
        for e in row:
            den = e.den if place != "inf" else e.invert_variable().den
            if place == "1":
                den = den.shift(GaussianRational(1))
            if den.degree < 1:
                continue
            cs = [c.to_complex() for c in reversed(den.coeffs)]
            for r in np.roots(cs):
                if abs(r) > 1e-14:
                    best = min(best, abs(r))
    return best


def _majorant_radius(S: MahlerSystem, place: str) -> float:
    """Smallest positive root of 1 - b*(sum a_j t^j + a_0 t/(1-t))."""
    norms = _norms_tail(S, place, RADIUS_TERMS)
    a0v = S.A.value_at(place)
    a0 = norms[0]
    b = a0v.inv().norm1()

    def g(t: float) -> float:
        geo = a0 * t / (1.0 - t)
        s = 0.0
        for j in range(RADIUS_TERMS, 0, -1):
            s = s * t + norms[j]
        return b * (s * t + geo)

    hi = min(1.0, _pole_distance(S, place)) * (1.0 - 1e-12)
    if g(hi) <= 1.0:
        return hi
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 1.0:
            hi = mid
        else:
            lo = mid
    return lo


def _reduce_power_place(S: MahlerSystem, place: str, order: int,
                        numeric: bool) -> LocalReduction:
    rep = classify_fuchsian(S, place)
    if not rep.fuchsian:
        raise NotFuchsianAtPlace(place, rep.reason)
    p = S.p
    M = S.A if place == "0" else S.A.invert_variable()
    A = expand_at(M, "0", order)
    if numeric:
        A = A.to_numeric()
        a0 = A.coeffs[0]
        a0inv = np.linalg.inv(a0)
        n = S.rank
        F = [np.eye(n, dtype=complex)]
        for k in range(1, order + 1):
            acc = np.zeros((n, n), dtype=complex)
            for j in range(1, k + 1):
                acc += A.coeffs[j] @ F[k - j]
            Fk = -a0inv @ acc
            if k % p == 0:
                Fk = Fk + a0inv @ F[k // p] @ a0
            F.append(Fk)
        fhat = SeriesMatrix(place, order, F, exact=False)
        a_const = a0
    else:
        a0 = A.coeffs[0]
        a0inv = a0.inv()
        n = S.rank
        F = [GMat.eye(n)]
        for k in range(1, order + 1):
            acc = None
            for j in range(1, k + 1):
                term = A.coeffs[j] @ F[k - j]
                acc = term if acc is None else acc + term
            Fk = (-a0inv) @ acc
            if k % p == 0:
                Fk = Fk + a0inv @ F[k // p] @ a0
            F.append(Fk)
        fhat = SeriesMatrix(place, order, F, exact=True)
        a_const = a0
    radius = _majorant_radius(S, place)
    return LocalReduction(place, a_const, fhat, radius)


def reduce_at_0(S: MahlerSystem, order: int, numeric: bool = False) -> LocalReduction:
    return _reduce_power_place(S, "0", order, numeric)


def reduce_at_inf(S: MahlerSystem, order: int, numeric: bool = False) -> LocalReduction:
    return _reduce_power_place(S, "inf", order, numeric)


def _check_resonance(c0: np.ndarray, p: int, order: int, tol: float):
    eigs = np.linalg.eigvals(c0)
    scale = max(float(np.abs(eigs).max()), 1e-300)
    pk = 1.0
    for k in range(1, order + 1):
        pk *= p
        for lam in eigs:
            for mu in eigs:
                if abs(lam - pk * mu) <= tol * scale * pk:
                    raise Resonant(k, complex(lam), complex(mu))


def reduce_at_1(S: MahlerSystem, order: int, tol_res: float = TAU_RES) -> LocalReduction:
    rep = classify_fuchsian(S, "1")
    if not rep.fuchsian:
        raise NotFuchsianAtPlace("1", rep.reason)
    p = S.p
    n = S.rank
    B = compose_exp(S.A, order)
    c0 = B.coeffs[0]
    _check_resonance(c0.to_numpy(), p, order, tol_res)

    # vec is row-major: vec(X C) = (I (x) C^T) vec(X), vec(C X) = (C (x) I) vec(X)
    eye = GMat.eye(n)
    c0T = c0.transpose()
    G = [GMat.eye(n)]
    pk = GaussianRational(1)
    for k in range(1, order + 1):
        pk = pk * p
        rhs = None
        for j in range(1, k + 1):
            term = B.coeffs[j] @ G[k - j]
            rhs = term if rhs is None else rhs + term
        op = _kron_gmat(eye, c0T).scale(pk) - _kron_gmat(c0, eye)
        vec = GMat([[rhs[i, j]] for i in range(n) for j in range(n)])
        sol = op.solve(vec)
        G.append(GMat([[sol[i * n + j, 0] for j in range(n)] for i in range(n)]))
    fhat = SeriesMatrix("1", order, G, exact=True)
    return LocalReduction("1", c0, fhat, None)


def _kron_gmat(A: GMat, B: GMat) -> GMat:
    out = []
    for i in range(A.rows):
        for bi in range(B.rows):
            row = []
            for j in range(A.cols):
                c = A[i, j]
                for bj in range(B.cols):
                    row.append(c * B[bi, bj])
            out.append(row)
    return GMat(out)


def residual(S: MahlerSystem, L: LocalReduction) -> ResidualReport:
    """Coefficientwise defect of the defining gauge equation, truncated
    at the reduction order.  Exact inputs give an exact-zero flag."""
    order = L.f_hat.order
    if L.place in ("0", "inf"):
        M = S.A if L.place == "0" else S.A.invert_variable()
        A = expand_at(M, "0", order)
        if not L.f_hat.exact:
            A = A.to_numeric()
        lhs = A @ _same_place(L.f_hat, A.place)
        rhs_f = L.f_hat.substitute_power(S.p)
        rhs = _mul_const_right(rhs_f, L.a_const)
        diff = lhs - _same_place(rhs, A.place)
    elif L.place == "1":
        B = compose_exp(S.A, order)
        if not L.f_hat.exact:
            B = B.to_numeric()
        lhs = B @ L.f_hat
        rhs = _mul_const_right(L.f_hat.scale_variable(S.p), L.a_const)
        diff = lhs - rhs
    else:
        raise ValueError(f"unknown place {L.place!r}")
    if diff.exact:
        return ResidualReport(0.0 if diff.is_zero() else diff.max_coeff_norm(),
                              exact=diff.is_zero())
    return ResidualReport(diff.max_coeff_norm(), exact=False)


def _same_place(series: SeriesMatrix, place: str) -> SeriesMatrix:
    if series.place == place:
        return series
    return SeriesMatrix(place, series.order, series.coeffs, series.exact)


def _mul_const_right(series: SeriesMatrix, C) -> SeriesMatrix:
    if series.exact and isinstance(C, GMat):
        return SeriesMatrix(series.place, series.order,
                            [c @ C for c in series.coeffs], exact=True)
    Cn = C.to_numpy() if isinstance(C, GMat) else np.asarray(C, dtype=complex)
    s = series.to_numeric()
    return SeriesMatrix(series.place, series.order,
                        [c @ Cn for c in s.coeffs], exact=False)
