"""Truncated matrix power series at the places 0, 1 and infinity.

A single type carries series at all three places; the local variable is
z at 0, u at 1 (after the substitution z = exp(u)) and 1/z at infinity.
Coefficients are exact (GMat over Q(i)) or numeric (complex ndarrays);
exactness is preserved whenever the inputs allow it, in particular the
exp-composition at 1 is exact because the Taylor coefficients of e^u
are rational.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import NotAnalytic, SingularLeadingTerm
from .exact import GQ_ONE, GQ_ZERO, GaussianRational, GMat, Poly, RatFun, RatMatrix


def _np(mat):
    return mat.to_numpy() if isinstance(mat, GMat) else np.asarray(mat, dtype=complex)


class SeriesMatrix:
    """Matrix power series truncated at a fixed order.

    coeffs[k] multiplies t^k where t is the local variable of `place`.
    """

    __slots__ = ("place", "order", "dim", "exact", "coeffs")

    def __init__(self, place: str, order: int, coeffs, exact: bool):
        if len(coeffs) != order + 1:
            raise ValueError("need order+1 coefficient matrices")
        if exact and not all(isinstance(c, GMat) for c in coeffs):
            raise ValueError("exact series needs GMat coefficients")
        coeffs = list(coeffs) if exact else [_np(c) for c in coeffs]
        dim = coeffs[0].rows if exact else coeffs[0].shape[0]
        object.__setattr__(self, "place", place)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "exact", exact)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("SeriesMatrix is immutable")

    @staticmethod
    def identity(place: str, order: int, dim: int, exact=True) -> "SeriesMatrix":
        if exact:
            cs = [GMat.eye(dim) if k == 0 else GMat.zeros(dim, dim)
                  for k in range(order + 1)]
        else:
            cs = [np.eye(dim, dtype=complex) if k == 0
                  else np.zeros((dim, dim), dtype=complex)
                  for k in range(order + 1)]
        return SeriesMatrix(place, order, cs, exact)

    def _check_compatible(self, other: "SeriesMatrix"):
        if self.place != other.place:
            raise ValueError(f"place mismatch: {self.place} vs {other.place}")
        if self.order != other.order:
            raise ValueError("order mismatch")

    def to_numeric(self) -> "SeriesMatrix":
        if not self.exact:
            return self
        return SeriesMatrix(self.place, self.order,
                            [c.to_numpy() for c in self.coeffs], exact=False)

    def _pair(self, other):
        if self.exact and other.exact:
            return self, other, True
        return self.to_numeric(), other.to_numeric(), False

    def __add__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        self._check_compatible(other)
        a, b, exact = self._pair(other)
        return SeriesMatrix(self.place, self.order,
                            [x + y for x, y in zip(a.coeffs, b.coeffs)], exact)

    def __sub__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        self._check_compatible(other)
        a, b, exact = self._pair(other)
        return SeriesMatrix(self.place, self.order,
                            [x - y for x, y in zip(a.coeffs, b.coeffs)], exact)

    def __matmul__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        self._check_compatible(other)
        a, b, exact = self._pair(other)
        out = []
        for k in range(self.order + 1):
            acc = None
            for j in range(k + 1):
                term = a.coeffs[j] @ b.coeffs[k - j]
                acc = term if acc is None else acc + term
            out.append(acc)
        return SeriesMatrix(self.place, self.order, out, exact)

    def truncate(self, order: int) -> "SeriesMatrix":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return SeriesMatrix(self.place, order, self.coeffs[: order + 1], self.exact)

    def substitute_power(self, p: int) -> "SeriesMatrix":
        """t -> t^p, truncated at the same order (places 0 and inf)."""
        out = []
        for k in range(self.order + 1):
            if k % p == 0:
                out.append(self.coeffs[k // p])
            else:
                out.append(GMat.zeros(self.dim, self.dim) if self.exact
                           else np.zeros((self.dim, self.dim), dtype=complex))
        return SeriesMatrix(self.place, self.order, out, self.exact)

    def scale_variable(self, p: int) -> "SeriesMatrix":
        """u -> p*u (the Mahler action on the place-1 variable)."""
        if self.exact:
            out = [c.scale(GaussianRational(Fraction(p) ** k))
                   for k, c in enumerate(self.coeffs)]
        else:
            out = [c * (float(p) ** k) for k, c in enumerate(self.coeffs)]
        return SeriesMatrix(self.place, self.order, out, self.exact)

    def eval(self, t: complex) -> np.ndarray:
        """Numeric partial sum at t (Horner)."""
        acc = _np(self.coeffs[self.order])
        for k in range(self.order - 1, -1, -1):
            acc = acc * t + _np(self.coeffs[k])
        return acc

    def coefficient(self, k: int):
        return self.coeffs[k]

    def max_coeff_norm(self, start: int = 0) -> float:
        best = 0.0
        for c in self.coeffs[start:]:
            v = c.norm1() if isinstance(c, GMat) else float(np.abs(c).sum(axis=0).max())
            best = max(best, v)
        return best

    def is_zero(self) -> bool:
        if self.exact:
            return all(c.is_zero() for c in self.coeffs)
        return all(np.allclose(c, 0.0, atol=0.0) for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        if (self.place, self.order, self.exact) != (other.place, other.order, other.exact):
            return False
        if self.exact:
            return self.coeffs == other.coeffs
        return all(np.array_equal(a, b) for a, b in zip(self.coeffs, other.coeffs))

    def __repr__(self):
        return (f"SeriesMatrix(place={self.place}, order={self.order}, "
                f"dim={self.dim}, exact={self.exact})")


# ----------------------------------------------------------------------
# scalar expansions
# ----------------------------------------------------------------------

def _scalar_coeffs_at_0(f: RatFun, order: int):
    """Exact Taylor coefficients of f at 0; f must be analytic there."""
    num, den = f.num, f.den
    d0 = den.coefficient(0)
    if d0.is_zero():
        raise NotAnalytic(None, "0")
    inv = d0.inverse()
    out = []
    for k in range(order + 1):
        acc = num.coefficient(k)
        for j in range(1, k + 1):
            dj = den.coefficient(j)
            if not dj.is_zero():
                acc = acc - dj * out[k - j]
        out.append(acc * inv)
    return out


def _shifted_to_1(f: RatFun) -> RatFun:
    """g(w) = f(1 + w)."""
    return RatFun(f.num.shift(GQ_ONE), f.den.shift(GQ_ONE))


def scalar_expansion(f: RatFun, place: str, order: int):
    """Exact local Taylor coefficients of f in the local variable."""
    if place == "0":
        g = f
    elif place == "1":
        g = _shifted_to_1(f)
    elif place == "inf":
        g = f.invert_variable()
    else:
        raise ValueError(f"unknown place {place!r}")
    return _scalar_coeffs_at_0(g, order)


def expand_at(M: RatMatrix, place: str, order: int) -> SeriesMatrix:
    """Entrywise Taylor expansion of a rational matrix at a place.

    Raises NotAnalytic identifying the offending entry when it has a
    pole there.
    """
    n, m = M.rows, M.cols
    if n != m:
        raise ValueError("expected a square matrix")
    table = [[None] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            e = M[i, j]
            if not e.is_analytic_at(place):
                raise NotAnalytic((i, j), place)
            table[i][j] = scalar_expansion(e, place, order)
    coeffs = [GMat([[table[i][j][k] for j in range(m)] for i in range(n)])
              for k in range(order + 1)]
    return SeriesMatrix(place, order, coeffs, exact=True)


def _exp_minus_one(order: int):
    """Coefficients of e^u - 1 up to u^order, exact rationals."""
    out = [GQ_ZERO]
    f = Fraction(1)
    for k in range(1, order + 1):
        f /= k
        out.append(GaussianRational(f))
    return out


def compose_exp(M: RatMatrix, order: int) -> SeriesMatrix:
    """Series of M(e^u) in u at the place 1.

    Computed by composing the (z-1)-expansion with e^u - 1; exact since
    the exponential has rational Taylor coefficients.
    """
    n = M.rows
    eps = _exp_minus_one(order)

    # powers of (e^u - 1) truncated at `order`
    pw = [[GQ_ONE] + [GQ_ZERO] * order]
    for _ in range(order):
        prev = pw[-1]
        nxt = [GQ_ZERO] * (order + 1)
        for a in range(order + 1):
            if prev[a].is_zero():
                continue
            for b in range(1, order + 1 - a):
                if not eps[b].is_zero():
                    nxt[a + b] = nxt[a + b] + prev[a] * eps[b]
        pw.append(nxt)

    table = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            e = M[i, j]
            if not e.is_analytic_at("1"):
                raise NotAnalytic((i, j), "1")
            cs = scalar_expansion(e, "1", order)
            out = [GQ_ZERO] * (order + 1)
            for k, c in enumerate(cs):
                if c.is_zero():
                    continue
                for a in range(order + 1):
                    if not pw[k][a].is_zero():
                        out[a] = out[a] + c * pw[k][a]
            table[i][j] = out
    coeffs = [GMat([[table[i][j][k] for j in range(n)] for i in range(n)])
              for k in range(order + 1)]
    return SeriesMatrix("1", order, coeffs, exact=True)


def series_inverse(S: SeriesMatrix) -> SeriesMatrix:
    """T with S @ T = I + O(t^(order+1)); needs invertible constant term."""
    n = S.dim
    if S.exact:
        try:
            inv0 = S.coeffs[0].inv()
        except ZeroDivisionError:
            raise SingularLeadingTerm("constant term is singular") from None
        out = [inv0]
        for k in range(1, S.order + 1):
            acc = None
            for j in range(1, k + 1):
                term = S.coeffs[j] @ out[k - j]
                acc = term if acc is None else acc + term
            out.append((-inv0) @ acc)
        return SeriesMatrix(S.place, S.order, out, exact=True)
    c0 = S.coeffs[0]
    if abs(np.linalg.det(c0)) < 1e-300:
        raise SingularLeadingTerm("constant term is singular")
    inv0 = np.linalg.inv(c0)
    out = [inv0]
    for k in range(1, S.order + 1):
        acc = np.zeros((n, n), dtype=complex)
        for j in range(1, k + 1):
            acc += S.coeffs[j] @ out[k - j]
        out.append(-inv0 @ acc)
    return SeriesMatrix(S.place, S.order, out, exact=False)


def numeric_expansion_norms(M: RatMatrix, place: str, order: int):
    """Operator 1-norms of the local Taylor coefficient matrices, in floats.

    Cheap double-precision variant used by the majorant radius estimate,
    where only the magnitudes matter.
    """
    n = M.rows
    tables = []
    for i in range(n):
        row = []
        for j in range(n):
            e = M[i, j]
            if place == "1":
                g = _shifted_to_1(e)
            elif place == "inf":
                g = e.invert_variable()
            else:
                g = e
            nc = [c.to_complex() for c in g.num.coeffs]
            dc = [c.to_complex() for c in g.den.coeffs]
            d0 = dc[0]
            cs = []
            for k in range(order + 1):
                acc = nc[k] if k < len(nc) else 0.0
                for t in range(1, min(k, len(dc) - 1) + 1):
                    acc -= dc[t] * cs[k - t]
                cs.append(acc / d0)
            row.append(cs)
        tables.append(row)
    norms = []
    for k in range(order + 1):
        mat = np.array([[tables[i][j][k] for j in range(n)] for i in range(n)])
        norms.append(float(np.abs(mat).sum(axis=0).max()) if n else 0.0)
    return norms
