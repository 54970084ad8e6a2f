"""Points on the universal cover of C*, numeric evaluation of the local
gauges by truncated series plus functional-equation continuation, and
the two connection matrices.

The cover is the set of pairs (r, b) with r > 0, projecting to r e^{ib};
the single-valued logarithm is log r + i b.  The unit circle is excluded
from evaluation: the gauge at 0 lives on the open disk (Sigma_0, r < 1),
the gauge at infinity outside the closed disk (Sigma_inf, r > 1), and in
general neither extends across the circle.

Continuation formulas (a_const = A at the place):

    at 0:    F(z) = A(z)^-1 ... A(z^(p^k))^-1 * F_hat(z^(p^(k+1))) * A0^(k+1)
    at inf:  the same with the series tail read in 1/z
    at 1:    G(u) = B(u/p) ... B(u/p^k) * G_hat(u/p^k) * C0^(-k),  B(u) = A(e^u)

The depth k is chosen automatically as the smallest one whose tail
argument is inside the series' trust radius (capped); the reported error
estimate is the difference between the depth-k and depth-(k+1) results,
a Richardson-style indicator rather than a rigorous bound.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from .errors import (DepthInsufficient, InSingularLocus, PoleHit,
                     PoleOnOrbit, PoleOnRay)
from .exact import RatMatrix
from .reduction import LocalReduction, reduce_at_0, reduce_at_1, reduce_at_inf
from .systems import (DEFAULT_K_MAX, MahlerSystem, OrbitSet, orbit_membership,
                      singular_locus)

DEPTH_CAP = 64


@dataclass(frozen=True)
class CoverPoint:
    """(r, b) with r > 0, projecting to r*e^(ib)."""

    r: float
    b: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("cover point needs r > 0")

    def project(self) -> complex:
        return self.r * cmath.exp(1j * self.b)

    def log(self) -> complex:
        return complex(math.log(self.r), self.b)

    def pow_p(self, p: int) -> "CoverPoint":
        return CoverPoint(self.r ** p, p * self.b)

    def in_sigma0(self) -> bool:
        return self.r < 1.0

    def in_sigma_inf(self) -> bool:
        return self.r > 1.0


class EvalResult(NamedTuple):
    value: np.ndarray
    estimate: float
    depth: int


def _auto_depth_modulus(m0: float, p: int, trust: float, cap: int) -> int:
    """Smallest k with m0^(p^(k+1)) <= trust for m0 < 1."""
    m = m0 ** p
    for k in range(cap + 1):
        if m <= trust:
            return k
        m = m ** p
    raise DepthInsufficient(f"|z|={m0} does not reach trust radius {trust} "
                            f"within depth {cap}")


def _singularish(M: np.ndarray) -> bool:
    n = M.shape[0]
    scale = max(1.0, float(np.abs(M).max()))
    return abs(np.linalg.det(M)) < 1e-12 * scale ** n


def _product_eval(Ainv: RatMatrix, tail_series, tail_arg_of, a_pow_of,
                  z: complex, p: int, depth: int):
    """Shared product continuation: prod_j Ainv(z^(p^j)) * tail * const.

    An orbit point on the singular locus shows up either as a pole of an
    entry of A^(-1) (a zero of det A) or as a singular value of A^(-1)
    (a pole of A); both abort the continuation.
    """
    n = Ainv.rows
    P = np.eye(n, dtype=complex)
    w = z
    for j in range(depth + 1):
        try:
            factor = Ainv.eval(w)
        except PoleHit as exc:
            raise PoleOnOrbit(j, w) from exc
        if _singularish(factor):
            raise PoleOnOrbit(j, w)
        P = P @ factor
        w = w ** p
    tail = tail_series.eval(tail_arg_of(w))
    return P @ tail @ a_pow_of(depth + 1)


def eval_F0(S: MahlerSystem, L0: LocalReduction, z: complex,
            depth: Optional[int] = None, depth_cap: int = DEPTH_CAP,
            a_inv: Optional[RatMatrix] = None) -> EvalResult:
    """Gauge at 0 evaluated at 0 < |z| < 1 by product continuation."""
    z = complex(z)
    if not 0 < abs(z) < 1:
        raise ValueError("eval_F0 needs 0 < |z| < 1")
    trust = L0.trust_radius()
    if depth is None:
        depth = _auto_depth_modulus(abs(z), S.p, trust, depth_cap)
    elif abs(z) ** (S.p ** (depth + 1)) > trust:
        raise DepthInsufficient(f"depth {depth} leaves the tail outside the "
                                f"trust radius {trust}")
    Ainv = a_inv if a_inv is not None else S.A.inv()
    a0 = L0.a_const_numpy()

    def run(k):
        return _product_eval(Ainv, L0.f_hat, lambda w: w,
                             lambda e: np.linalg.matrix_power(a0, e),
                             z, S.p, k)

    v = run(depth)
    v_next = run(depth + 1)
    return EvalResult(v, float(np.linalg.norm(v - v_next)), depth)


def eval_Finf(S: MahlerSystem, Linf: LocalReduction, z: complex,
              depth: Optional[int] = None, depth_cap: int = DEPTH_CAP,
              a_inv: Optional[RatMatrix] = None) -> EvalResult:
    """Gauge at infinity evaluated at |z| > 1; tail read in 1/z."""
    z = complex(z)
    if not abs(z) > 1:
        raise ValueError("eval_Finf needs |z| > 1")
    trust = Linf.trust_radius()
    if depth is None:
        depth = _auto_depth_modulus(1.0 / abs(z), S.p, trust, depth_cap)
    elif (1.0 / abs(z)) ** (S.p ** (depth + 1)) > trust:
        raise DepthInsufficient(f"depth {depth} leaves the tail outside the "
                                f"trust radius {trust}")
    Ainv = a_inv if a_inv is not None else S.A.inv()
    ainf = Linf.a_const_numpy()

    def run(k):
        return _product_eval(Ainv, Linf.f_hat, lambda w: 1.0 / w,
                             lambda e: np.linalg.matrix_power(ainf, e),
                             z, S.p, k)

    v = run(depth)
    v_next = run(depth + 1)
    return EvalResult(v, float(np.linalg.norm(v - v_next)), depth)


def eval_F1(S: MahlerSystem, L1: LocalReduction, zt: CoverPoint,
            depth: Optional[int] = None, depth_cap: int = DEPTH_CAP) -> EvalResult:
    """Gauge at 1 evaluated on the cover through u = log r + i b."""
    u = zt.log()
    trust = L1.trust_radius()
    p = S.p
    if depth is None:
        depth = 0
        m = abs(u)
        while m > trust:
            depth += 1
            m /= p
            if depth > depth_cap:
                raise DepthInsufficient(f"|u|={abs(u)} does not reach trust "
                                        f"radius {trust} within depth {depth_cap}")
    elif abs(u) / (p ** depth) > trust:
        raise DepthInsufficient(f"depth {depth} leaves |u|/p^k outside the "
                                f"trust radius {trust}")
    c0 = L1.a_const_numpy()
    c0_inv = np.linalg.inv(c0)

    def run(k):
        n = S.rank
        P = np.eye(n, dtype=complex)
        for j in range(1, k + 1):
            v = u / (p ** j)
            try:
                factor = S.A.eval(cmath.exp(v))
            except PoleHit as exc:
                raise PoleOnRay(j, v) from exc
            if _singularish(factor):
                raise PoleOnRay(j, v)
            P = P @ factor
        tail = L1.f_hat.eval(u / (p ** k))
        return P @ tail @ np.linalg.matrix_power(c0_inv, k)

    v = run(depth)
    v_next = run(depth + 1)
    return EvalResult(v, float(np.linalg.norm(v - v_next)), depth)


# ----------------------------------------------------------------------
# connection bundles
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ConnectionBundle:
    """Local constant models at 0, 1, infinity plus the evaluation data
    for the two connection matrices, and the orbit sets containing their
    singular loci."""

    system: MahlerSystem
    L0: LocalReduction
    L1: LocalReduction
    Linf: LocalReduction
    A0: np.ndarray
    A1: np.ndarray
    Ainf: np.ndarray
    E0: OrbitSet
    Einf: OrbitSet
    a_inv: RatMatrix
    base_point: CoverPoint
    depth_cap: int = DEPTH_CAP

    @property
    def p(self) -> int:
        return self.system.p

    @property
    def rank(self) -> int:
        return self.system.rank


def build_bundle(S: MahlerSystem, order: int = 32,
                 base_point: CoverPoint = CoverPoint(0.5, 0.0),
                 depth_cap: int = DEPTH_CAP,
                 tol_res: float = 1e-9) -> ConnectionBundle:
    """Run the three local reductions and collect the singular-orbit data.

    Requires the system to be Fuchsian at 0, 1 and infinity.
    """
    L0 = reduce_at_0(S, order)
    L1 = reduce_at_1(S, order, tol_res=tol_res)
    Linf = reduce_at_inf(S, order)
    loc = singular_locus(S.A)
    inside = tuple(e for e in loc.points if 0 < abs(e) < 1 - 1e-12)
    outside = tuple(e for e in loc.points if abs(e) > 1 + 1e-12)
    return ConnectionBundle(
        system=S, L0=L0, L1=L1, Linf=Linf,
        A0=L0.a_const_numpy(), A1=L1.a_const_numpy(), Ainf=Linf.a_const_numpy(),
        E0=OrbitSet(S.p, inside, "inside"),
        Einf=OrbitSet(S.p, outside, "outside"),
        a_inv=S.A.inv(), base_point=base_point, depth_cap=depth_cap)


def with_scaled_a1(B: ConnectionBundle, factor: complex) -> ConnectionBundle:
    """Copy of the bundle with A1 replaced by factor*A1 (for sensitivity
    experiments; the cocycle residual must blow up)."""
    return replace(B, A1=factor * B.A1)


def _connection_raw(B: ConnectionBundle, zt: CoverPoint, which: str,
                    depth: Optional[int]) -> EvalResult:
    f1 = eval_F1(B.system, B.L1, zt, depth=depth, depth_cap=B.depth_cap)
    if which == "0":
        fl = eval_F0(B.system, B.L0, zt.project(), depth=depth,
                     depth_cap=B.depth_cap, a_inv=B.a_inv)
    else:
        fl = eval_Finf(B.system, B.Linf, zt.project(), depth=depth,
                       depth_cap=B.depth_cap, a_inv=B.a_inv)
    f1_inv = np.linalg.inv(f1.value)
    value = f1_inv @ fl.value
    est = float(np.linalg.norm(f1_inv) * (fl.estimate
                + f1.estimate * np.linalg.norm(f1_inv) * np.linalg.norm(fl.value)))
    return EvalResult(value, est, max(fl.depth, f1.depth))


def connection_M0(B: ConnectionBundle, zt: CoverPoint,
                  depth: Optional[int] = None,
                  k_max: int = DEFAULT_K_MAX) -> EvalResult:
    """M0(zt) = F1(zt)^(-1) * F0(pi(zt)) on Sigma_0 off the singular orbits."""
    if not zt.in_sigma0():
        raise ValueError("connection at 0 needs r < 1")
    if B.E0.base and orbit_membership(B.E0, zt, k_max):
        raise InSingularLocus(f"{zt} lies on a singular orbit")
    return _connection_raw(B, zt, "0", depth)


def connection_Minf(B: ConnectionBundle, zt: CoverPoint,
                    depth: Optional[int] = None,
                    k_max: int = DEFAULT_K_MAX) -> EvalResult:
    """Minf(zt) = F1(zt)^(-1) * Finf(pi(zt)) on Sigma_inf."""
    if not zt.in_sigma_inf():
        raise ValueError("connection at infinity needs r > 1")
    if B.Einf.base and orbit_membership(B.Einf, zt, k_max):
        raise InSingularLocus(f"{zt} lies on a singular orbit")
    return _connection_raw(B, zt, "inf", depth)


def verify_connection_equation(B: ConnectionBundle, zt: CoverPoint,
                               which: str) -> float:
    """Relative defect of M(zt^p) = A1 M(zt) A_side^(-1).

    Evaluates the gauges directly (actual pole hits still raise), so the
    image point zt^p may lie in the conservative orbit shadow as long as
    the continuation products stay off the genuine singularities.
    """
    if which == "0":
        m = _connection_raw(B, zt, "0", None).value
        mp = _connection_raw(B, zt.pow_p(B.p), "0", None).value
        a_side = B.A0
    elif which == "inf":
        m = _connection_raw(B, zt, "inf", None).value
        mp = _connection_raw(B, zt.pow_p(B.p), "inf", None).value
        a_side = B.Ainf
    else:
        raise ValueError("which must be '0' or 'inf'")
    lhs = mp
    rhs = B.A1 @ m @ np.linalg.inv(a_side)
    return float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(m), 1e-300))


def validate_bundle(B: ConnectionBundle, samples0=(), samples_inf=(),
                    tol: float = 1e-8) -> dict:
    """Check the defining relations at sample points and the containment
    of the detected singular locus in the orbit sets."""
    report = {"cocycle_0": [], "cocycle_inf": [], "locus_contained": True}
    for zt in samples0:
        report["cocycle_0"].append(verify_connection_equation(B, zt, "0"))
    for zt in samples_inf:
        report["cocycle_inf"].append(verify_connection_equation(B, zt, "inf"))
    for e in B.E0.base:
        if not orbit_membership(B.E0, e):
            report["locus_contained"] = False
    for e in B.Einf.base:
        if not orbit_membership(B.Einf, e):
            report["locus_contained"] = False
    report["ok"] = (report["locus_contained"]
                    and all(r < tol for r in report["cocycle_0"])
                    and all(r < tol for r in report["cocycle_inf"]))
    return report
