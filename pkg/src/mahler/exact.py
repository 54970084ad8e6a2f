"""Exact arithmetic over Q(i)(z): Gaussian rationals, polynomials, rational
functions and dense matrices of them.

All values are immutable after construction and all operations are pure, so
they can be shared freely.  Canonical forms (reduced fractions, gcd-free
numerator/denominator with monic denominator) make structural equality a
valid test for mathematical equality, which the residual checks rely on.

Places are the three points 0, 1, infinity, tagged by the strings
``"0"``, ``"1"`` and ``"inf"``.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

from .errors import ParseError, PoleHit, ZeroFunction

PLACES = ("0", "1", "inf")

# pole guard: |den(z)| < TAU_POLE_BASE * (1+|z|)^deg counts as a pole hit
TAU_POLE_BASE = 1e-12


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot build an exact rational from {type(x).__name__}")


class GaussianRational:
    """An element a + b*i of Q(i), with a, b reduced fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_one(self) -> bool:
        return self.re == 1 and self.im == 0

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        r = GaussianRational(1)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    # -- conversions --------------------------------------------------
    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __complex__(self) -> complex:
        return self.to_complex()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def literal(self) -> str:
        """Render in the rational-literal grammar (re-parseable)."""
        def _f(q: Fraction) -> str:
            return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

        if self.im == 0:
            return _f(self.re)
        im_part = "i" if abs(self.im) == 1 else f"{_f(abs(self.im))}*i"
        sign = "-" if self.im < 0 else "+"
        if self.re == 0:
            return im_part if self.im > 0 else f"-{im_part}"
        return f"({_f(self.re)}{sign}{im_part})"

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        return self.literal()


GQ_ZERO = GaussianRational(0)
GQ_ONE = GaussianRational(1)
GQ_I = GaussianRational(0, 1)


def gq(re=0, im=0) -> GaussianRational:
    return GaussianRational(re, im)


# ----------------------------------------------------------------------
# polynomials
# ----------------------------------------------------------------------

class Poly:
    """Dense polynomial over Q(i), coefficients indexed by degree.

    The zero polynomial has an empty coefficient tuple; otherwise the
    leading coefficient is nonzero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [c if isinstance(c, GaussianRational) else GaussianRational(c)
              for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @staticmethod
    def zero() -> "Poly":
        return Poly(())

    @staticmethod
    def one() -> "Poly":
        return Poly((GQ_ONE,))

    @staticmethod
    def x() -> "Poly":
        return Poly((GQ_ZERO, GQ_ONE))

    @staticmethod
    def const(c) -> "Poly":
        return Poly((c,))

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def leading(self) -> GaussianRational:
        if not self.coeffs:
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coefficient(self, k: int) -> GaussianRational:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else GQ_ZERO

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coefficient(k) + other.coefficient(k) for k in range(n)])

    def __sub__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coefficient(k) - other.coefficient(k) for k in range(n)])

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return Poly([c * other for c in self.coeffs])
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly.zero()
        out = [GQ_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    def __rmul__(self, other):
        if isinstance(other, GaussianRational):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        r = Poly.one()
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [GQ_ZERO] * max(0, len(self.coeffs) - len(other.coeffs) + 1)
        rem = list(self.coeffs)
        dlead = other.leading().inverse()
        dd = other.degree
        while len(rem) - 1 >= dd and rem:
            k = len(rem) - 1 - dd
            c = rem[-1] * dlead
            q[k] = c
            for j, b in enumerate(other.coeffs):
                rem[k + j] = rem[k + j] - c * b
            while rem and rem[-1].is_zero():
                rem.pop()
        return Poly(q), Poly(rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- calculus and substitutions -------------------------------------
    def derivative(self) -> "Poly":
        return Poly([self.coeffs[k] * k for k in range(1, len(self.coeffs))])

    def eval_exact(self, a: GaussianRational) -> GaussianRational:
        acc = GQ_ZERO
        for c in reversed(self.coeffs):
            acc = acc * a + c
        return acc

    def eval_complex(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c.to_complex()
        return acc

    def shift(self, a) -> "Poly":
        """Coefficients of self(w + a), i.e. the Taylor expansion at a."""
        a = a if isinstance(a, GaussianRational) else GaussianRational(a)
        lin = Poly((a, GQ_ONE))
        acc = Poly.zero()
        for c in reversed(self.coeffs):
            acc = acc * lin + Poly.const(c)
        return acc

    def substitute_power(self, p: int) -> "Poly":
        """self(z^p): spread the coefficients p apart."""
        if self.is_zero():
            return self
        out = [GQ_ZERO] * (p * self.degree + 1)
        for k, c in enumerate(self.coeffs):
            out[p * k] = c
        return Poly(out)

    def reversed_at(self, d: int) -> "Poly":
        """z^d * self(1/z) for d >= degree."""
        out = [GQ_ZERO] * (d + 1)
        for k, c in enumerate(self.coeffs):
            out[d - k] = c
        return Poly(out)

    def valuation_at_0(self) -> int:
        if self.is_zero():
            raise ZeroFunction("valuation of the zero polynomial")
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                return k
        raise AssertionError("unreachable")

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = self.leading().inverse()
        return Poly([c * inv for c in self.coeffs])

    def square_free_part(self) -> "Poly":
        """Radical of the polynomial (monic)."""
        if self.degree <= 0:
            return self.monic()
        g = poly_gcd(self, self.derivative())
        return (self // g).monic()

    def literal(self, var="z") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coefficient(k)
            if c.is_zero():
                continue
            if k == 0:
                parts.append(c.literal())
            else:
                zs = var if k == 1 else f"{var}^{k}"
                parts.append(zs if c.is_one() else f"{c.literal()}*{zs}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def __repr__(self):
        return f"Poly<{self.literal()}>"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q(i)[z] by the Euclidean algorithm."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


# ----------------------------------------------------------------------
# rational functions
# ----------------------------------------------------------------------

class RatFun:
    """Element of Q(i)(z) in canonical form: gcd(num, den) = 1, den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = None):
        if not isinstance(num, Poly):
            num = Poly.const(num if isinstance(num, GaussianRational)
                             else GaussianRational(num))
        if den is None:
            den = Poly.one()
        elif not isinstance(den, Poly):
            den = Poly.const(den if isinstance(den, GaussianRational)
                             else GaussianRational(den))
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = Poly.zero(), Poly.one()
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
            lead = den.leading()
            if not lead.is_one():
                inv = lead.inverse()
                num, den = num * inv, den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFun is immutable")

    @staticmethod
    def zero() -> "RatFun":
        return RatFun(Poly.zero())

    @staticmethod
    def one() -> "RatFun":
        return RatFun(Poly.one())

    @staticmethod
    def z() -> "RatFun":
        return RatFun(Poly.x())

    @staticmethod
    def const(c) -> "RatFun":
        return RatFun(Poly.const(c if isinstance(c, GaussianRational)
                                 else GaussianRational(c)))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _coerce(self, other):
        if isinstance(other, RatFun):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return RatFun.const(other)
        if isinstance(other, Poly):
            return RatFun(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFun(self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero function")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        r = RatFun.one()
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def derivative(self) -> "RatFun":
        return RatFun(self.num.derivative() * self.den - self.num * self.den.derivative(),
                      self.den * self.den)

    def substitute_power(self, p: int) -> "RatFun":
        """The Mahler substitution z -> z^p."""
        if p < 2:
            raise ValueError("Mahler substitution needs p >= 2")
        return RatFun(self.num.substitute_power(p), self.den.substitute_power(p))

    def invert_variable(self) -> "RatFun":
        """self(1/z), again as a rational function of z."""
        d = max(self.num.degree, self.den.degree, 0)
        return RatFun(self.num.reversed_at(d), self.den.reversed_at(d))

    def valuation(self, place: str) -> int:
        """Order of vanishing at the place (negative for a pole)."""
        if self.is_zero():
            raise ZeroFunction("valuation of the zero function")
        if place == "0":
            return self.num.valuation_at_0() - self.den.valuation_at_0()
        if place == "1":
            return (self.num.shift(GQ_ONE).valuation_at_0()
                    - self.den.shift(GQ_ONE).valuation_at_0())
        if place == "inf":
            return self.den.degree - self.num.degree
        raise ValueError(f"unknown place {place!r}")

    def is_analytic_at(self, place: str) -> bool:
        return self.is_zero() or self.valuation(place) >= 0

    def eval_exact(self, a: GaussianRational) -> GaussianRational:
        d = self.den.eval_exact(a)
        if d.is_zero():
            raise PoleHit(f"exact pole at {a}")
        return self.num.eval_exact(a) * d.inverse()

    def eval(self, z: complex) -> complex:
        """Numeric evaluation with a scale-aware pole guard.

        For |z| > 1 the value is computed through the reversed
        representation in 1/z, which keeps large arguments stable.
        """
        z = complex(z)
        if abs(z) <= 1.0:
            dv = self.den.eval_complex(z)
            tau = TAU_POLE_BASE * (1.0 + abs(z)) ** max(self.den.degree, 0)
            if abs(dv) < tau:
                raise PoleHit(f"denominator ~ 0 at z={z}")
            return self.num.eval_complex(z) / dv
        w = 1.0 / z
        d = max(self.num.degree, self.den.degree, 0)
        rn = self.num.reversed_at(d)
        rd = self.den.reversed_at(d)
        dv = rd.eval_complex(w)
        tau = TAU_POLE_BASE * (1.0 + abs(w)) ** max(self.den.degree, 0)
        if abs(dv) < tau:
            raise PoleHit(f"denominator ~ 0 at z={z}")
        return rn.eval_complex(w) / dv

    def literal(self) -> str:
        ns = self.num.literal()
        if self.den == Poly.one():
            return ns
        return f"({ns})/({self.den.literal()})"

    def __repr__(self):
        return f"RatFun<{self.literal()}>"


def ratfun_eval(f: RatFun, z: complex) -> complex:
    return f.eval(z)


def mahler_substitute(f: RatFun, p: int) -> RatFun:
    return f.substitute_power(p)


def valuation(f: RatFun, place: str) -> int:
    return f.valuation(place)


# ----------------------------------------------------------------------
# dense exact matrices over Q(i)
# ----------------------------------------------------------------------

class GMat:
    """Small dense matrix with GaussianRational entries.

    Implements just enough linear algebra for the gauge recursions and
    the factorization pivots: product, inverse, rref, null spaces and
    the characteristic polynomial, all exact.
    """

    __slots__ = ("rows", "cols", "a")

    def __init__(self, entries):
        a = [[e if isinstance(e, GaussianRational) else GaussianRational(e)
              for e in row] for row in entries]
        rows = len(a)
        cols = len(a[0]) if rows else 0
        if any(len(r) != cols for r in a):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "a", tuple(tuple(r) for r in a))

    def __setattr__(self, name, value):
        raise AttributeError("GMat is immutable")

    @staticmethod
    def eye(n: int) -> "GMat":
        return GMat([[GQ_ONE if i == j else GQ_ZERO for j in range(n)]
                     for i in range(n)])

    @staticmethod
    def zeros(r: int, c: int) -> "GMat":
        return GMat([[GQ_ZERO] * c for _ in range(r)])

    def __getitem__(self, ij):
        i, j = ij
        return self.a[i][j]

    def __add__(self, other):
        return GMat([[self.a[i][j] + other.a[i][j] for j in range(self.cols)]
                     for i in range(self.rows)])

    def __sub__(self, other):
        return GMat([[self.a[i][j] - other.a[i][j] for j in range(self.cols)]
                     for i in range(self.rows)])

    def __neg__(self):
        return GMat([[-e for e in row] for row in self.a])

    def __matmul__(self, other: "GMat") -> "GMat":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = [[GQ_ZERO] * other.cols for _ in range(self.rows)]
        for i in range(self.rows):
            ai = self.a[i]
            for k in range(self.cols):
                c = ai[k]
                if c.is_zero():
                    continue
                brow = other.a[k]
                orow = out[i]
                for j in range(other.cols):
                    orow[j] = orow[j] + c * brow[j]
        return GMat(out)

    def scale(self, c: GaussianRational) -> "GMat":
        return GMat([[e * c for e in row] for row in self.a])

    def transpose(self) -> "GMat":
        return GMat([[self.a[i][j] for i in range(self.rows)]
                     for j in range(self.cols)])

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.a for e in row)

    def is_identity(self) -> bool:
        return (self.rows == self.cols and
                all((self.a[i][j].is_one() if i == j else self.a[i][j].is_zero())
                    for i in range(self.rows) for j in range(self.cols)))

    def __eq__(self, other):
        if not isinstance(other, GMat):
            return NotImplemented
        return self.a == other.a

    def __hash__(self):
        return hash(self.a)

    def rref(self):
        """Reduced row echelon form: returns (R, pivot column list)."""
        m = [list(row) for row in self.a]
        pivots = []
        r = 0
        for c in range(self.cols):
            pr = next((i for i in range(r, self.rows) if not m[i][c].is_zero()), None)
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            inv = m[r][c].inverse()
            m[r] = [e * inv for e in m[r]]
            for i in range(self.rows):
                if i != r and not m[i][c].is_zero():
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return GMat(m), pivots

    @property
    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self):
        """Basis of the right null space, deterministic (rref-based)."""
        R, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [GQ_ZERO] * self.cols
            v[fc] = GQ_ONE
            for r, pc in enumerate(pivots):
                v[pc] = -R.a[r][fc]
            basis.append(tuple(v))
        return basis

    def left_kernel_row(self):
        """One row l with l @ self = 0, or None.

        The row with the smallest leading index is chosen and scaled so
        its leading entry (the pivot) is 1, making the output canonical.
        """
        basis = self.transpose().nullspace()
        if not basis:
            return None
        def lead(v):
            return next(i for i, e in enumerate(v) if not e.is_zero())
        v = min(basis, key=lead)
        li = lead(v)
        inv = v[li].inverse()
        return tuple(e * inv for e in v)

    def inv(self) -> "GMat":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        m = [list(row) + [GQ_ONE if i == j else GQ_ZERO for j in range(n)]
             for i, row in enumerate(self.a)]
        for c in range(n):
            pr = next((i for i in range(c, n) if not m[i][c].is_zero()), None)
            if pr is None:
                raise ZeroDivisionError("singular exact matrix")
            m[c], m[pr] = m[pr], m[c]
            inv = m[c][c].inverse()
            m[c] = [e * inv for e in m[c]]
            for i in range(n):
                if i != c and not m[i][c].is_zero():
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return GMat([row[n:] for row in m])

    def det(self) -> GaussianRational:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        m = [list(row) for row in self.a]
        n = self.rows
        d = GQ_ONE
        for c in range(n):
            pr = next((i for i in range(c, n) if not m[i][c].is_zero()), None)
            if pr is None:
                return GQ_ZERO
            if pr != c:
                m[c], m[pr] = m[pr], m[c]
                d = -d
            d = d * m[c][c]
            inv = m[c][c].inverse()
            for i in range(c + 1, n):
                if not m[i][c].is_zero():
                    f = m[i][c] * inv
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return d

    def charpoly(self) -> Poly:
        """det(x*I - self), exact, by expansion over Poly entries."""
        n = self.rows
        x = Poly.x()
        entries = [[(x - Poly.const(self.a[i][j]) if i == j
                     else -Poly.const(self.a[i][j]))
                    for j in range(n)] for i in range(n)]
        return _poly_det(entries)

    def solve(self, rhs: "GMat") -> "GMat":
        return self.inv() @ rhs

    def norm1(self) -> float:
        """Operator 1-norm (max column sum of moduli), as a float."""
        best = 0.0
        for j in range(self.cols):
            s = sum(abs(self.a[i][j].to_complex()) for i in range(self.rows))
            best = max(best, s)
        return best

    def to_numpy(self):
        import numpy as np
        return np.array([[e.to_complex() for e in row] for row in self.a],
                        dtype=complex)

    def __repr__(self):
        return f"GMat({[[str(e) for e in row] for row in self.a]})"


def _poly_det(entries):
    n = len(entries)
    if n == 1:
        return entries[0][0]
    acc = Poly.zero()
    sign = 1
    for j in range(n):
        minor = [[entries[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = entries[0][j] * _poly_det(minor)
        acc = acc + term if sign > 0 else acc - term
        sign = -sign
    return acc


# ----------------------------------------------------------------------
# rational matrices
# ----------------------------------------------------------------------

class RatMatrix:
    """Dense matrix over Q(i)(z)."""

    __slots__ = ("rows", "cols", "a")

    def __init__(self, entries):
        a = []
        for row in entries:
            out = []
            for e in row:
                if isinstance(e, RatFun):
                    out.append(e)
                elif isinstance(e, Poly):
                    out.append(RatFun(e))
                else:
                    out.append(RatFun.const(e))
            a.append(out)
        rows = len(a)
        cols = len(a[0]) if rows else 0
        if any(len(r) != cols for r in a):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "a", tuple(tuple(r) for r in a))

    def __setattr__(self, name, value):
        raise AttributeError("RatMatrix is immutable")

    @staticmethod
    def eye(n: int) -> "RatMatrix":
        return RatMatrix([[RatFun.one() if i == j else RatFun.zero()
                           for j in range(n)] for i in range(n)])

    @staticmethod
    def from_gmat(m: GMat) -> "RatMatrix":
        return RatMatrix([[RatFun.const(e) for e in row] for row in m.a])

    def __getitem__(self, ij):
        i, j = ij
        return self.a[i][j]

    def __add__(self, other):
        return RatMatrix([[self.a[i][j] + other.a[i][j] for j in range(self.cols)]
                          for i in range(self.rows)])

    def __sub__(self, other):
        return RatMatrix([[self.a[i][j] - other.a[i][j] for j in range(self.cols)]
                          for i in range(self.rows)])

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = [[RatFun.zero()] * other.cols for _ in range(self.rows)]
        for i in range(self.rows):
            for k in range(self.cols):
                c = self.a[i][k]
                if c.is_zero():
                    continue
                for j in range(other.cols):
                    if not other.a[k][j].is_zero():
                        out[i][j] = out[i][j] + c * other.a[k][j]
        return RatMatrix(out)

    def scale(self, f: RatFun) -> "RatMatrix":
        return RatMatrix([[e * f for e in row] for row in self.a])

    def map(self, fn) -> "RatMatrix":
        return RatMatrix([[fn(e) for e in row] for row in self.a])

    def transpose(self) -> "RatMatrix":
        return RatMatrix([[self.a[i][j] for i in range(self.rows)]
                          for j in range(self.cols)])

    def substitute_power(self, p: int) -> "RatMatrix":
        return self.map(lambda e: e.substitute_power(p))

    def invert_variable(self) -> "RatMatrix":
        return self.map(lambda e: e.invert_variable())

    def det(self) -> RatFun:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return self._det(self.a)

    @staticmethod
    def _det(entries) -> RatFun:
        n = len(entries)
        if n == 1:
            return entries[0][0]
        acc = RatFun.zero()
        sign = 1
        for j in range(n):
            if entries[0][j].is_zero():
                sign = -sign
                continue
            minor = [[entries[i][k] for k in range(n) if k != j]
                     for i in range(1, n)]
            term = entries[0][j] * RatMatrix._det(minor)
            acc = acc + term if sign > 0 else acc - term
            sign = -sign
        return acc

    def inv(self) -> "RatMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        m = [list(row) + [RatFun.one() if i == j else RatFun.zero() for j in range(n)]
             for i, row in enumerate(self.a)]
        for c in range(n):
            pr = next((i for i in range(c, n) if not m[i][c].is_zero()), None)
            if pr is None:
                raise ZeroDivisionError("matrix is singular over Q(i)(z)")
            m[c], m[pr] = m[pr], m[c]
            inv = m[c][c].inverse()
            m[c] = [e * inv for e in m[c]]
            for i in range(n):
                if i != c and not m[i][c].is_zero():
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return RatMatrix([row[n:] for row in m])

    def is_analytic_at(self, place: str) -> bool:
        return all(e.is_analytic_at(place) for row in self.a for e in row)

    def value_at(self, place: str) -> GMat:
        """Exact value matrix at the place; entries must be analytic there."""
        if place == "0":
            pt = GQ_ZERO
            mat = self
        elif place == "1":
            pt = GQ_ONE
            mat = self
        elif place == "inf":
            pt = GQ_ZERO
            mat = self.invert_variable()
        else:
            raise ValueError(f"unknown place {place!r}")
        return GMat([[e.eval_exact(pt) for e in row] for row in mat.a])

    def eval(self, z: complex):
        import numpy as np
        return np.array([[e.eval(z) for e in row] for row in self.a], dtype=complex)

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.a == other.a

    def __hash__(self):
        return hash(self.a)

    def __repr__(self):
        return f"RatMatrix({[[e.literal() for e in row] for row in self.a]})"


# ----------------------------------------------------------------------
# the rational-function literal grammar
# ----------------------------------------------------------------------
#
#   expr   := term (('+'|'-') term)*
#   term   := factor (('*'|'/') factor)*
#   factor := '-' factor | power
#   power  := atom ['^' ['-'] integer]
#   atom   := integer | integer 'i' | 'i' | 'z' | '(' expr ')'
#
# Whitespace is insignificant.  "3-2i" parses as 3 - (2*i).

def _tokenize(text: str):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "i":
                toks.append(("imag", int(text[i:j]), i))
                j += 1
            else:
                toks.append(("int", int(text[i:j]), i))
            i = j
        elif ch == "i":
            toks.append(("imag", 1, i))
            i += 1
        elif ch == "z":
            toks.append(("var", None, i))
            i += 1
        elif ch in "+-*/^()":
            toks.append((ch, None, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    return toks


class _Parser:
    def __init__(self, toks, text_len):
        self.toks = toks
        self.pos = 0
        self.text_len = text_len

    def peek(self):
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def next(self):
        if self.pos >= len(self.toks):
            raise ParseError("unexpected end of input", self.text_len)
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, got {t[0]!r}", t[2])
        return t

    def parse_expr(self) -> RatFun:
        v = self.parse_term()
        while self.peek() in ("+", "-"):
            op = self.next()[0]
            w = self.parse_term()
            v = v + w if op == "+" else v - w
        return v

    def parse_term(self) -> RatFun:
        v = self.parse_factor()
        while self.peek() in ("*", "/"):
            op, _, pos = self.next()
            w = self.parse_factor()
            if op == "*":
                v = v * w
            else:
                if w.is_zero():
                    raise ParseError("division by zero", pos)
                v = v / w
        return v

    def parse_factor(self) -> RatFun:
        if self.peek() == "-":
            self.next()
            return -self.parse_factor()
        return self.parse_power()

    def parse_power(self) -> RatFun:
        v = self.parse_atom()
        if self.peek() == "^":
            self.next()
            sign = 1
            if self.peek() == "-":
                self.next()
                sign = -1
            t = self.expect("int")
            v = v ** (sign * t[1])
        return v

    def parse_atom(self) -> RatFun:
        kind, val, pos = self.next()
        if kind == "int":
            return RatFun.const(val)
        if kind == "imag":
            return RatFun.const(GaussianRational(0, val))
        if kind == "var":
            return RatFun.z()
        if kind == "(":
            v = self.parse_expr()
            self.expect(")")
            return v
        raise ParseError(f"unexpected token {kind!r}", pos)


def parse_ratfun(text: str) -> RatFun:
    """Parse a rational-function literal over Q(i)."""
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty expression", 0)
    p = _Parser(toks, len(text))
    v = p.parse_expr()
    if p.pos != len(toks):
        raise ParseError("trailing input", toks[p.pos][2])
    return v
