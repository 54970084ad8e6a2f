"""Constructive factorization of an invertible rational matrix into an
elementary rational prefactor and a factor regular at a place.

The elementary building blocks are D(i, u) (identity with the (i,i)
entry replaced by u) and T(i, l) (identity with row i replaced by l).
At the place 1 the uniformizer is u = (z-1)/(z+1), which is regular and
invertible at both 0 and infinity, so the accumulated prefactor stays
regular there; at the place 0 the uniformizer is u = z.

The peeling loop: after clearing poles with u^k, while the determinant
still vanishes at the place, a left kernel row l of the value matrix
gives one descent step

    M' = T(i, l)^(-1) D(i, u) N'      with N' = D(i, u)^(-1) T(i, l) M'

which lowers the valuation of det by exactly one.  Kernel rows are
computed exactly and normalized so the pivot entry (smallest nonzero
index) is 1, making the certificate reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .errors import SingularInput
from .exact import (GQ_ONE, GaussianRational, GMat, Poly, RatFun, RatMatrix,
                    parse_ratfun)


def uniformizer(place: str) -> RatFun:
    if place == "0":
        return RatFun.z()
    if place == "1":
        return RatFun(Poly((GaussianRational(-1), GQ_ONE)),
                      Poly((GQ_ONE, GQ_ONE)))  # (z-1)/(z+1)
    raise ValueError(f"factorization place must be '0' or '1', got {place!r}")


@dataclass(frozen=True)
class ElementaryFactor:
    """kind 'D': diag factor with u at row i; kind 'T': row-replacement."""

    kind: str  # "D" | "T"
    i: int     # 0-based row index
    dim: int
    u: RatFun | None = None       # for D
    row: tuple | None = None      # for T: tuple of GaussianRational

    def __post_init__(self):
        if self.kind == "D":
            if self.u is None or self.u.is_zero():
                raise ValueError("D factor needs a nonzero u")
        elif self.kind == "T":
            if self.row is None or all(c.is_zero() for c in self.row):
                raise ValueError("T factor needs a nonzero row")
            if self.row[self.i].is_zero():
                raise ValueError("T factor needs a nonzero pivot entry")
        else:
            raise ValueError(f"unknown factor kind {self.kind!r}")

    def matrix(self) -> RatMatrix:
        n = self.dim
        rows = []
        for r in range(n):
            if r != self.i:
                rows.append([RatFun.one() if c == r else RatFun.zero()
                             for c in range(n)])
            elif self.kind == "D":
                rows.append([self.u if c == r else RatFun.zero()
                             for c in range(n)])
            else:
                rows.append([RatFun.const(x) for x in self.row])
        return RatMatrix(rows)


def _t_inverse_row(row: Tuple[GaussianRational, ...], i: int):
    """Row of T(i, l)^(-1), itself a T-type factor with pivot i."""
    inv = row[i].inverse()
    return tuple((inv if j == i else -row[j] * inv) for j in range(len(row)))


@dataclass(frozen=True)
class Factorization:
    """M = u^(-k) * product(T_j D_j) * regular_part, exactly."""

    place: str
    prefactor_valuation: int
    elementary: tuple  # of (T, D) ElementaryFactor pairs
    regular_part: RatMatrix

    def prefactor(self) -> RatMatrix:
        n = self.regular_part.rows
        u = uniformizer(self.place)
        C = RatMatrix.eye(n).scale(u ** (-self.prefactor_valuation)
                                   if self.prefactor_valuation else RatFun.one())
        for T, D in self.elementary:
            C = C @ T.matrix() @ D.matrix()
        return C

    def reassemble(self) -> RatMatrix:
        return self.prefactor() @ self.regular_part

    @property
    def steps(self) -> int:
        return len(self.elementary)


def _min_valuation(M: RatMatrix, place: str) -> int:
    vals = [e.valuation(place) for row in M.a for e in row if not e.is_zero()]
    if not vals:
        raise SingularInput("zero matrix")
    return min(vals)


def _factor_at(M: RatMatrix, place: str) -> Factorization:
    if M.rows != M.cols:
        raise SingularInput("matrix must be square")
    det = M.det()
    if det.is_zero():
        raise SingularInput("determinant vanishes identically")
    n = M.rows
    u = uniformizer(place)

    k = max(0, -_min_valuation(M, place))
    Mp = M.scale(u ** k) if k else M

    pairs = []
    while Mp.det().valuation(place) > 0:
        V = Mp.value_at(place)
        ell = V.left_kernel_row()
        assert ell is not None, "value matrix singular but no kernel row"
        i = next(j for j, c in enumerate(ell) if not c.is_zero())
        T_peel = ElementaryFactor("T", i, n, row=tuple(ell))
        # N' = D^(-1) T M'  (divide row i of T M' by u; stays analytic)
        TM = T_peel.matrix() @ Mp
        rows = [[TM[r, c] / u if r == i else TM[r, c] for c in range(n)]
                for r in range(n)]
        Mp = RatMatrix(rows)
        T_factor = ElementaryFactor("T", i, n, row=_t_inverse_row(tuple(ell), i))
        D_factor = ElementaryFactor("D", i, n, u=u)
        pairs.append((T_factor, D_factor))
    return Factorization(place, k, tuple(pairs), Mp)


def factor_regular_at_1(M: RatMatrix) -> Factorization:
    """Peel a prefactor regular at 0 and infinity so that what remains
    is regular at 1."""
    return _factor_at(M, "1")


def factor_regular_at_0(M: RatMatrix) -> Factorization:
    return _factor_at(M, "0")
