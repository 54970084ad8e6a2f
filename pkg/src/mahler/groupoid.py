"""Dunford decompositions, character twists, morphism solvers and the
generator family of the difference Galois groupoid.

The constant local models at 0 and infinity are plain invertible
matrices; their automorphisms all arise as twists

    A^(gamma, lambda) = gamma(A_s) * A_u^lambda

where A = A_s A_u is the multiplicative Dunford decomposition, gamma
acts on the eigenvalues of the semisimple part and A_u^lambda is the
finite binomial sum (nilpotency truncates it).  At the place 1 the
admissible characters satisfy gamma(p) = 1; the two built-ins gamma1 and
gamma2 read off the unit-circle part and the fractional p-exponent of
the unique factorization z = u * p^x.

The generator family for a connection bundle collects the local twists
at 0 and infinity, the three standard generators at 1, the connection
matrices evaluated at sample points, and the A1 shift between fibres at
a base point and its p-th power.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (IllConditioned, SampleInSingularLocus, UnmappedEigenvalue)
from .exact import GQ_ONE, GQ_ZERO, GaussianRational, GMat, Poly
from .cover import (ConnectionBundle, CoverPoint, connection_M0,
                    connection_Minf)
from .systems import orbit_membership

# lookup tolerance for eigenvalue tables: must absorb the eps^(1/k)
# splitting of numerically computed Jordan-block eigenvalues
TAU_EIG_MATCH = 1e-6


# ----------------------------------------------------------------------
# Dunford decomposition
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DunfordPair:
    """A = A_s A_u with A_s semisimple, A_u unipotent, commuting."""

    A_s: np.ndarray
    A_u: np.ndarray


@dataclass(frozen=True)
class _DunfordFull:
    A_s: np.ndarray
    A_u: np.ndarray
    Q: np.ndarray          # columns: generalized eigenvector basis
    eigenvalues: tuple     # one per column of Q (repeated by multiplicity)


def _try_exact_entries(A: np.ndarray):
    """Exact matrix if every float entry is a small dyadic rational."""
    rows = []
    for row in np.asarray(A, dtype=complex):
        out = []
        for e in row:
            re = Fraction(float(e.real))
            im = Fraction(float(e.imag))
            if re.denominator > 1 << 24 or im.denominator > 1 << 24:
                return None
            if abs(re.numerator) > 1 << 52 or abs(im.numerator) > 1 << 52:
                return None
            out.append(GaussianRational(re, im))
        rows.append(out)
    return GMat(rows)


def _snap_gaussian(x: complex, max_den: int = 10 ** 6):
    re = Fraction(float(x.real)).limit_denominator(max_den)
    im = Fraction(float(x.imag)).limit_denominator(max_den)
    return GaussianRational(re, im)


def _cluster(eigs, tol):
    """Connected-component clustering of eigenvalues within tol."""
    order = sorted(range(len(eigs)), key=lambda i: (eigs[i].real, eigs[i].imag))
    groups = []
    for i in order:
        for g in groups:
            if any(abs(eigs[i] - eigs[j]) <= tol for j in g):
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _dunford_exact(G: GMat) -> Optional[_DunfordFull]:
    """Exact path: valid when the characteristic polynomial splits over
    Q(i) (eigenvalues recognized by snapping numeric ones)."""
    n = G.rows
    cp = G.charpoly()
    eigs_num = np.linalg.eigvals(G.to_numpy())
    scale = max(1.0, float(np.abs(eigs_num).max()))
    groups = _cluster(list(eigs_num), 1e-4 * scale)
    roots = []
    for g in groups:
        mean = sum(eigs_num[i] for i in g) / len(g)
        lam = _snap_gaussian(mean)
        if not cp.eval_exact(lam).is_zero():
            return None
        roots.append((lam, len(g)))
    # verify the claimed factorization exactly
    prod = Poly.one()
    for lam, m in roots:
        prod = prod * (Poly((-lam, GQ_ONE)) ** m)
    if prod != cp.monic():
        return None
    basis_cols = []
    eig_list = []
    eye = GMat.eye(n)
    for lam, m in roots:
        Mpow = eye
        shift = G - eye.scale(lam)
        for _ in range(m):
            Mpow = Mpow @ shift
        null = Mpow.nullspace()
        if len(null) != m:
            return None
        basis_cols.extend(null)
        eig_list.extend([lam] * m)
    V = GMat([[basis_cols[j][i] for j in range(n)] for i in range(n)])
    try:
        Vinv = V.inv()
    except ZeroDivisionError:
        return None
    D = GMat([[eig_list[i] if i == j else GQ_ZERO for j in range(n)]
              for i in range(n)])
    As = V @ D @ Vinv
    Au = As.inv() @ G
    return _DunfordFull(As.to_numpy(), Au.to_numpy(), V.to_numpy(),
                        tuple(e.to_complex() for e in eig_list))


def _dunford_numeric(A: np.ndarray) -> _DunfordFull:
    n = A.shape[0]
    eigs = np.linalg.eigvals(A)
    scale = max(1.0, float(np.abs(A).max()))
    tol = scale * max(1e-8, np.finfo(float).eps ** (1.0 / max(2, n)) * 8)
    groups = _cluster(list(eigs), tol)
    cols = []
    eig_list = []
    for g in groups:
        lam = sum(eigs[i] for i in g) / len(g)
        m = len(g)
        M = np.linalg.matrix_power(A - lam * np.eye(n), m)
        _, s, vh = np.linalg.svd(M)
        basis = vh[n - m:].conj().T  # orthonormal basis of the near-kernel
        cols.append(basis)
        eig_list.extend([lam] * m)
    V = np.hstack(cols)
    if np.linalg.cond(V) > 1e12:
        raise IllConditioned("generalized eigenbasis nearly singular")
    As = V @ np.diag(eig_list) @ np.linalg.inv(V)
    Au = np.linalg.solve(As, A)
    return _DunfordFull(As, Au, V, tuple(complex(e) for e in eig_list))


def _dunford_full(A) -> _DunfordFull:
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("square matrix expected")
    if abs(np.linalg.det(A)) < 1e-300:
        raise ValueError("Dunford decomposition needs an invertible matrix")
    G = _try_exact_entries(A)
    full = _dunford_exact(G) if G is not None else None
    if full is None:
        full = _dunford_numeric(A)
    # invariant check; reject rather than return garbage
    scale = max(1.0, float(np.abs(A).max()))
    n_err = np.linalg.norm(np.linalg.matrix_power(full.A_u - np.eye(n), n))
    c_err = np.linalg.norm(full.A_s @ full.A_u - full.A_u @ full.A_s)
    p_err = np.linalg.norm(full.A_s @ full.A_u - A)
    if max(n_err, c_err, p_err) > 1e-10 * scale ** n:
        raise IllConditioned(
            f"decomposition residuals too large: product {p_err:.2e}, "
            f"commutator {c_err:.2e}, nilpotency {n_err:.2e}")
    return full


def dunford(A) -> DunfordPair:
    full = _dunford_full(A)
    return DunfordPair(full.A_s, full.A_u)


# ----------------------------------------------------------------------
# characters of C*
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Character:
    """A multiplicative map C* -> C*, given either by one of the two
    built-in formulas (which depend on p through z = u p^x) or by an
    explicit table of values on finitely many eigenvalues."""

    kind: str  # "gamma1" | "gamma2" | "map"
    assignments: tuple = ()  # ((eigenvalue, value), ...) for kind "map"
    label: str = ""

    @staticmethod
    def gamma1() -> "Character":
        return Character("gamma1", label="gamma1")

    @staticmethod
    def gamma2() -> "Character":
        return Character("gamma2", label="gamma2")

    @staticmethod
    def eigenvalue_map(pairs, label="map") -> "Character":
        return Character("map", tuple((complex(k), complex(v)) for k, v in pairs),
                         label=label)

    @staticmethod
    def identity_for(matrix, label="id") -> "Character":
        """Identity map on the spectrum of the given matrix."""
        eigs = np.linalg.eigvals(np.asarray(matrix, dtype=complex))
        seen = []
        for e in eigs:
            if not any(abs(e - s) <= TAU_EIG_MATCH * (1 + abs(s)) for s in seen):
                seen.append(complex(e))
        return Character("map", tuple((e, e) for e in seen), label=label)


def apply_character(c: Character, z: complex, p: int) -> complex:
    """Value of the character at z != 0.

    gamma1 keeps the unit-circle part of z = u p^x, gamma2 maps it to
    e^(2 pi i x); both send p to 1.
    """
    z = complex(z)
    if z == 0:
        raise ValueError("characters are defined on C* only")
    if c.kind == "gamma1":
        return z / abs(z)
    if c.kind == "gamma2":
        x = math.log(abs(z)) / math.log(p)
        return cmath.exp(2j * math.pi * x)
    if c.kind == "map":
        for key, val in c.assignments:
            if abs(z - key) <= TAU_EIG_MATCH * (1 + abs(key)):
                return val
        raise UnmappedEigenvalue(f"character table has no value at {z}")
    raise ValueError(f"unknown character kind {c.kind!r}")


def _binom(lam: complex, k: int) -> complex:
    out = 1.0 + 0j
    for j in range(k):
        out *= (lam - j) / (j + 1)
    return out


def power_twist(A, c: Character, lam: complex, p: int) -> np.ndarray:
    """gamma(A_s) * A_u^lambda, the image of A under the (gamma, lambda)
    element of the local Galois group."""
    A = np.asarray(A, dtype=complex)
    full = _dunford_full(A)
    n = A.shape[0]
    gvals = [apply_character(c, e, p) for e in full.eigenvalues]
    g_s = full.Q @ np.diag(gvals) @ np.linalg.inv(full.Q)
    N = full.A_u - np.eye(n)
    acc = np.eye(n, dtype=complex)
    Nk = np.eye(n, dtype=complex)
    for k in range(1, n):
        Nk = Nk @ N
        acc = acc + _binom(lam, k) * Nk
    return g_s @ acc


# ----------------------------------------------------------------------
# groupoid elements
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FibreTag:
    """Fibre functor tag: omega0, omegaInf, or omega1 at a cover point."""

    kind: str  # "omega0" | "omegaInf" | "omega1"
    point: Optional[CoverPoint] = None

    def __post_init__(self):
        if self.kind == "omega1" and self.point is None:
            raise ValueError("omega1 tag needs a cover point")


@dataclass(frozen=True)
class Provenance:
    kind: str  # "local-twist" | "gamma0" | "gammaInf" | "unipotent" | "char-gen" | "a1-shift"
    character: Optional[Character] = None
    lam: Optional[complex] = None
    side: Optional[str] = None
    point: Optional[CoverPoint] = None


@dataclass(frozen=True)
class GroupoidElement:
    source: FibreTag
    target: FibreTag
    matrix: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if abs(np.linalg.det(m)) < 1e-300:
            raise ValueError("groupoid elements must be invertible")


def local_generators_at_1(A1, p: int, base_point: CoverPoint) -> list:
    """The unipotent part and the two character images of the semisimple
    part: a standard generating triple of the local group at 1."""
    full = _dunford_full(A1)
    tag = FibreTag("omega1", base_point)
    out = [GroupoidElement(tag, tag, full.A_u, Provenance("unipotent"))]
    for c in (Character.gamma1(), Character.gamma2()):
        g = power_twist(np.asarray(A1, dtype=complex), c, 0.0, p)
        out.append(GroupoidElement(tag, tag, g, Provenance("char-gen", character=c)))
    return out


def density_generators(B: ConnectionBundle, samples0, samples_inf,
                       twists, k_max: int = 32) -> list:
    """Enumerate the generator family of the bundle's Galois groupoid.

    twists: iterable of (Character | "gamma1" | "gamma2" | "id", lambda).
    Sample points must avoid the singular orbit sets.
    """
    for idx, zt in enumerate(samples0):
        if not zt.in_sigma0():
            raise SampleInSingularLocus(idx, "sigma0 (r >= 1)")
        if B.E0.base and orbit_membership(B.E0, zt, k_max):
            raise SampleInSingularLocus(idx, "sigma0")
    for idx, zt in enumerate(samples_inf):
        if not zt.in_sigma_inf():
            raise SampleInSingularLocus(idx, "sigmaInf (r <= 1)")
        if B.Einf.base and orbit_membership(B.Einf, zt, k_max):
            raise SampleInSingularLocus(idx, "sigmaInf")

    def resolve(c, target):
        if isinstance(c, Character):
            return c
        if c == "gamma1":
            return Character.gamma1()
        if c == "gamma2":
            return Character.gamma2()
        if c == "id":
            return Character.identity_for(target)
        raise ValueError(f"unknown character tag {c!r}")

    out = []
    t0 = FibreTag("omega0")
    ti = FibreTag("omegaInf")
    for c, lam in twists:
        c0 = resolve(c, B.A0)
        out.append(GroupoidElement(
            t0, t0, power_twist(B.A0, c0, lam, B.p),
            Provenance("local-twist", character=c0, lam=complex(lam), side="0")))
    for c, lam in twists:
        ci = resolve(c, B.Ainf)
        out.append(GroupoidElement(
            ti, ti, power_twist(B.Ainf, ci, lam, B.p),
            Provenance("local-twist", character=ci, lam=complex(lam), side="inf")))
    out.extend(local_generators_at_1(B.A1, B.p, B.base_point))
    for zt in samples0:
        m = connection_M0(B, zt, k_max=k_max)
        out.append(GroupoidElement(t0, FibreTag("omega1", zt), m.value,
                                   Provenance("gamma0", point=zt)))
    for zt in samples_inf:
        m = connection_Minf(B, zt, k_max=k_max)
        out.append(GroupoidElement(ti, FibreTag("omega1", zt), m.value,
                                   Provenance("gammaInf", point=zt)))
    out.append(GroupoidElement(
        FibreTag("omega1", B.base_point),
        FibreTag("omega1", B.base_point.pow_p(B.p)),
        B.A1, Provenance("a1-shift", point=B.base_point)))
    return out


# ----------------------------------------------------------------------
# morphism solvers
# ----------------------------------------------------------------------

def solve_constant_hom(A0, B0, tol: float = 1e-9) -> list:
    """Basis of { S : S A0 = B0 S } on n2 x n1 matrices, by the kernel of
    the Kronecker operator (row-major vec)."""
    A0 = np.asarray(A0, dtype=complex)
    B0 = np.asarray(B0, dtype=complex)
    n1 = A0.shape[0]
    n2 = B0.shape[0]
    op = np.kron(np.eye(n2), A0.T) - np.kron(B0, np.eye(n1))
    _, s, vh = np.linalg.svd(op)
    smax = s[0] if len(s) else 0.0
    cut = tol * max(smax, 1.0)
    kern = [vh[i].conj() for i in range(len(s)) if s[i] <= cut]
    kern += [vh[i].conj() for i in range(len(s), n1 * n2)]
    return [v.reshape(n2, n1) for v in kern]


@dataclass(frozen=True)
class LaurentLogPoly:
    """Finite sum  sum_k  M_k * w^k  with w the single-valued logarithm."""

    terms: tuple  # ((k, matrix), ...) sorted by k

    @staticmethod
    def from_dict(d) -> "LaurentLogPoly":
        items = tuple(sorted((int(k), np.asarray(v, dtype=complex))
                             for k, v in d.items()))
        return LaurentLogPoly(items)

    @staticmethod
    def constant(M) -> "LaurentLogPoly":
        return LaurentLogPoly(((0, np.asarray(M, dtype=complex)),))

    def degrees(self):
        return [k for k, _ in self.terms]

    def term(self, k: int):
        for kk, m in self.terms:
            if kk == k:
                return m
        return None

    def eval(self, w: complex) -> np.ndarray:
        if not self.terms:
            raise ValueError("empty Laurent-log polynomial")
        shape = self.terms[0][1].shape
        acc = np.zeros(shape, dtype=complex)
        for k, m in self.terms:
            acc = acc + m * (w ** k)
        return acc

    def eval_at(self, zt: CoverPoint) -> np.ndarray:
        return self.eval(zt.log())


def solve_log_hom(A1, B1, p: int, tol: float = 1e-9, k_bound: int = 40) -> list:
    """Basis of solutions S~ = sum_k S_k w^k of phi_p(S~) A1 = B1 S~.

    Degreewise the equation reads S_k (p^k A1) = B1 S_k, solvable only
    for the finitely many k with p^k spec(A1) meeting spec(B1); each
    degree is handled by the constant solver.
    """
    A1 = np.asarray(A1, dtype=complex)
    B1 = np.asarray(B1, dtype=complex)
    alphas = np.linalg.eigvals(A1)
    betas = np.linalg.eigvals(B1)
    logp = math.log(p)
    ks = set()
    for a in alphas:
        for b in betas:
            if abs(a) < 1e-300:
                continue
            k = round(math.log(abs(b) / abs(a)) / logp)
            if abs(k) > k_bound:
                continue
            if abs((p ** float(k)) * a - b) <= tol * (abs(b) + 1.0):
                ks.add(int(k))
    out = []
    for k in sorted(ks):
        for S in solve_constant_hom((p ** float(k)) * A1, B1, tol=tol):
            out.append(LaurentLogPoly(((k, S),)))
    return out


# ----------------------------------------------------------------------
# naturality checks
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class MorphismTriple:
    """(S0, S1~, Sinf): candidate morphism data between two bundles."""

    s0: np.ndarray
    s1: LaurentLogPoly
    sinf: np.ndarray

    @staticmethod
    def constant(S) -> "MorphismTriple":
        S = np.asarray(S, dtype=complex)
        return MorphismTriple(S, LaurentLogPoly.constant(S), S)

    @staticmethod
    def identity(n: int) -> "MorphismTriple":
        return MorphismTriple.constant(np.eye(n, dtype=complex))


def verify_naturality(g: GroupoidElement, morph: MorphismTriple,
                      X: ConnectionBundle, Y: ConnectionBundle) -> float:
    """|| S_target * g_X - g_Y * S_source || for the commuting square of
    the morphism against the generator, with the omega1 components
    evaluated at the relevant cover points."""
    prov = g.provenance

    def s_at(tag: FibreTag):
        if tag.kind == "omega0":
            return morph.s0
        if tag.kind == "omegaInf":
            return morph.sinf
        return morph.s1.eval_at(tag.point)

    if prov.kind == "local-twist":
        gY = power_twist(Y.A0 if prov.side == "0" else Y.Ainf,
                         prov.character, prov.lam, Y.p)
    elif prov.kind == "gamma0":
        gY = connection_M0(Y, prov.point).value
    elif prov.kind == "gammaInf":
        gY = connection_Minf(Y, prov.point).value
    elif prov.kind == "unipotent":
        gY = _dunford_full(Y.A1).A_u
    elif prov.kind == "char-gen":
        gY = power_twist(Y.A1, prov.character, 0.0, Y.p)
    elif prov.kind == "a1-shift":
        gY = Y.A1
    else:
        raise ValueError(f"unknown provenance {prov.kind!r}")

    lhs = s_at(g.target) @ np.asarray(g.matrix, dtype=complex)
    rhs = gY @ s_at(g.source)
    return float(np.linalg.norm(lhs - rhs))
