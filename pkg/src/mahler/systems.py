"""Mahler equations and systems: companion form, tensor constructions,
gauge action, Fuchsian classification, singular loci and power-orbit sets.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (DegenerateEquation, NotAnalytic, SingularGauge,
                     SingularMatrix, ZeroFunction)
from .exact import GMat, Poly, RatFun, RatMatrix, poly_gcd

TAU_ORBIT = 1e-9
DEFAULT_K_MAX = 32


class MahlerEquation:
    """a_n(z) f(z^(p^n)) + ... + a_0(z) f(z) = 0 with a_0 * a_n != 0."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs):
        if p < 2:
            raise DegenerateEquation("p must be an integer >= 2")
        coeffs = tuple(c if isinstance(c, RatFun) else RatFun.const(c)
                       for c in coeffs)
        if len(coeffs) < 2:
            raise DegenerateEquation("need order >= 1 (at least two coefficients)")
        if coeffs[0].is_zero() or coeffs[-1].is_zero():
            raise DegenerateEquation("a_0 and a_n must be nonzero")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("MahlerEquation is immutable")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


class MahlerSystem:
    """phi_p(Y) = A(z) Y with A invertible over Q(i)(z)."""

    __slots__ = ("p", "A")

    def __init__(self, p: int, A: RatMatrix):
        if p < 2:
            raise DegenerateEquation("p must be an integer >= 2")
        if A.rows != A.cols:
            raise SingularMatrix("system matrix must be square")
        if A.det().is_zero():
            raise SingularMatrix("system matrix has identically zero determinant")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "A", A)

    def __setattr__(self, name, value):
        raise AttributeError("MahlerSystem is immutable")

    @property
    def rank(self) -> int:
        return self.A.rows


def companion_system(eq: MahlerEquation) -> MahlerSystem:
    """Companion system of the equation: superdiagonal 1s, bottom row
    -a_0/a_n ... -a_{n-1}/a_n.  The unknown vector collects
    f(z), f(z^p), ..., f(z^(p^(n-1)))."""
    n = eq.order
    an = eq.coeffs[-1]
    rows = []
    for i in range(n - 1):
        rows.append([RatFun.one() if j == i + 1 else RatFun.zero()
                     for j in range(n)])
    rows.append([-(eq.coeffs[j] / an) for j in range(n)])
    return MahlerSystem(eq.p, RatMatrix(rows))


def kronecker(A: RatMatrix, B: RatMatrix) -> RatMatrix:
    """Kronecker product, block layout (a_ij * B)."""
    out = []
    for i in range(A.rows):
        for bi in range(B.rows):
            row = []
            for j in range(A.cols):
                aij = A[i, j]
                for bj in range(B.cols):
                    row.append(aij * B[bi, bj])
            out.append(row)
    return RatMatrix(out)


def dual_system(S: MahlerSystem) -> MahlerSystem:
    """The dual object: matrix (A^T)^(-1)."""
    return MahlerSystem(S.p, S.A.transpose().inv())


def gauge_transform(S: MahlerSystem, T: RatMatrix) -> MahlerSystem:
    """Change of unknown Y = T Z, giving phi_p(T)^(-1) A T."""
    if T.rows != T.cols or T.rows != S.rank:
        raise SingularGauge("gauge matrix has wrong shape")
    if T.det().is_zero():
        raise SingularGauge("gauge matrix is singular")
    Tp = T.substitute_power(S.p)
    return MahlerSystem(S.p, Tp.inv() @ S.A @ T)


@dataclass(frozen=True)
class FuchsianReport:
    fuchsian: bool
    place: str
    reason: str = ""
    value: Optional[GMat] = None

    def __bool__(self):
        return self.fuchsian


def classify_fuchsian(S: MahlerSystem, place: str) -> FuchsianReport:
    """Fuchsian at the place iff A is analytic there with invertible value."""
    bad = [(i, j) for i in range(S.rank) for j in range(S.rank)
           if not S.A[i, j].is_analytic_at(place)]
    if bad:
        return FuchsianReport(False, place, f"poles at entries {bad}")
    V = S.A.value_at(place)
    if V.det().is_zero():
        return FuchsianReport(False, place, "value matrix is singular")
    return FuchsianReport(True, place, value=V)


@dataclass(frozen=True)
class Certification:
    certified: bool
    place: str
    system: Optional[MahlerSystem] = None
    reason: str = ""

    def __bool__(self):
        return self.certified


def certify_regular_singular(S: MahlerSystem, place: str,
                             T: RatMatrix) -> Certification:
    """Verify a user-supplied meromorphic gauge: accepts iff the gauged
    system phi_p(T)^(-1) A T is Fuchsian at the place."""
    B = gauge_transform(S, T)
    rep = classify_fuchsian(B, place)
    if rep.fuchsian:
        return Certification(True, place, system=B)
    return Certification(False, place, system=B, reason=rep.reason)


# ----------------------------------------------------------------------
# singular loci and orbit sets
# ----------------------------------------------------------------------

def _polish_root(poly: Poly, r: complex) -> complex:
    dp = poly.derivative()
    for _ in range(3):
        d = dp.eval_complex(r)
        if abs(d) < 1e-300:
            break
        r = r - poly.eval_complex(r) / d
    return r


def _numeric_roots(poly: Poly):
    if poly.degree < 1:
        return []
    cs = [c.to_complex() for c in reversed(poly.coeffs)]
    roots = np.roots(cs)
    return [_polish_root(poly, complex(r)) for r in roots]


@dataclass(frozen=True)
class SingularLocus:
    """Poles of a matrix together with the zeros of its determinant.

    Stored as monic square-free polynomial factors plus numeric root
    approximations (polished to ~1e-12).
    """

    factors: tuple
    points: tuple

    def __contains__(self, z: complex):
        return any(abs(z - e) < 1e-9 * (1 + abs(e)) for e in self.points)


def singular_locus(M: RatMatrix) -> SingularLocus:
    detM = M.det()
    if detM.is_zero():
        raise SingularMatrix("matrix is singular over the function field")
    factors = []
    prod = Poly.one()
    for row in M.a:
        for e in row:
            if e.den.degree > 0:
                g = e.den.square_free_part()
                extra = g // poly_gcd(g, prod)
                if extra.degree > 0:
                    factors.append(extra)
                    prod = prod * extra
    if detM.num.degree > 0:
        g = detM.num.square_free_part()
        extra = g // poly_gcd(g, prod)
        if extra.degree > 0:
            factors.append(extra)
    pts = []
    for f in factors:
        for r in _numeric_roots(f):
            if not any(abs(r - q) < 1e-9 * (1 + abs(q)) for q in pts):
                pts.append(r)
    pts.sort(key=lambda w: (round(w.real, 9), round(w.imag, 9)))
    return SingularLocus(tuple(factors), tuple(pts))


@dataclass(frozen=True)
class OrbitSet:
    """A finite base set together with its closure under z -> z^(p^k), k in Z.

    `side` records whether the base lives strictly inside or strictly
    outside the unit disk; the closure never leaves that region.
    """

    p: int
    base: tuple
    side: str  # "inside" | "outside"

    def __post_init__(self):
        if self.side not in ("inside", "outside"):
            raise ValueError("side must be 'inside' or 'outside'")
        for e in self.base:
            if abs(e) == 0:
                raise ValueError("orbit base point at 0")
            if self.side == "inside" and not abs(e) < 1:
                raise ValueError(f"inside orbit base point with |e| >= 1: {e}")
            if self.side == "outside" and not abs(e) > 1:
                raise ValueError(f"outside orbit base point with |e| <= 1: {e}")


def _angle_diff(a: float, b: float) -> float:
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def orbit_membership(E: OrbitSet, zt, k_max: int = DEFAULT_K_MAX,
                     tol: float = TAU_ORBIT) -> bool:
    """Bounded test of membership in the orbit closure, through the
    projection to C* (argument lifts are not distinguished).

    Comparisons run in (log-modulus, argument) coordinates so that
    doubly-exponential powers never overflow; the tolerance is scaled by
    p^m to match the error growth of m successive powers.  Candidates
    are pre-filtered on log-moduli before the argument is compared.
    """
    p = E.p
    if hasattr(zt, "r") and hasattr(zt, "b"):
        r, theta = float(zt.r), float(zt.b)
    else:
        z = complex(zt)
        r, theta = abs(z), cmath.phase(z)
    if r == 0:
        raise ValueError("orbit membership at 0 is undefined")
    lz = math.log(r)
    for e in E.base:
        le = math.log(abs(e))
        ae = cmath.phase(e)
        # z^(p^m) a base point (m >= 0)?
        f = 1.0
        for m in range(k_max + 1):
            t = tol * f
            if abs(f * lz - le) <= t and _angle_diff(f * theta, ae) <= t:
                return True
            f *= p
            if abs(f * lz) > abs(le) + 50:  # moduli can no longer match
                break
        # z a power of the base point: e^(p^m) = z (m >= 1)?
        f = float(p)
        for m in range(1, k_max + 1):
            t = tol * f
            if abs(f * le - lz) <= t and _angle_diff(f * ae, theta) <= t:
                return True
            f *= p
            if abs(f * le) > abs(lz) + 50:
                break
    return False
