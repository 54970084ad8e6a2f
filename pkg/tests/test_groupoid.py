import cmath
import math
import random

import numpy as np
import pytest

from mahler.cover import CoverPoint, build_bundle
from mahler.errors import Resonant, SampleInSingularLocus, UnmappedEigenvalue
from mahler.exact import RatFun, RatMatrix, parse_ratfun
from mahler.groupoid import (Character, LaurentLogPoly, MorphismTriple,
                             apply_character, density_generators, dunford,
                             local_generators_at_1, power_twist,
                             solve_constant_hom, solve_log_hom,
                             verify_naturality)
from mahler.systems import MahlerSystem


def random_jordan_matrix(rng, max_n=4):
    """Q J Q^(-1) with integer unimodular Q (exact in floats) and Jordan
    blocks over a pool of well-separated eigenvalues."""
    pool = [2, 3, -1, 1 + 1j, 2j, 0.5]
    blocks = []
    n = 0
    while n < rng.randint(2, max_n):
        lam = rng.choice(pool)
        size = rng.randint(1, min(3, max_n - n)) if rng.random() < 0.6 else 1
        B = np.eye(size, dtype=complex) * lam
        for i in range(size - 1):
            B[i, i + 1] = 1.0
        blocks.append(B)
        n += size
    J = np.zeros((n, n), dtype=complex)
    at = 0
    for B in blocks:
        s = B.shape[0]
        J[at:at + s, at:at + s] = B
        at += s
    Q = np.eye(n)
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2)
        E = np.eye(n)
        E[i, j] = rng.randint(-2, 2)
        Q = Q @ E
    return Q @ J @ np.linalg.inv(Q)


# -- Dunford decomposition -------------------------------------------------------

def test_dunford_diagonalizable():
    d = dunford(np.diag([2.0, 3.0]))
    assert np.allclose(d.A_s, np.diag([2.0, 3.0]))
    assert np.allclose(d.A_u, np.eye(2))


def test_dunford_jordan_block():
    d = dunford(np.array([[2, 1], [0, 2]], dtype=complex))
    assert np.allclose(d.A_s, 2 * np.eye(2))
    assert np.allclose(d.A_u, np.array([[1, 0.5], [0, 1]]))


def test_dunford_identity():
    d = dunford(np.eye(3))
    assert np.allclose(d.A_s, np.eye(3)) and np.allclose(d.A_u, np.eye(3))


def test_dunford_invariants_random():
    rng = random.Random(83)
    for _ in range(40):
        A = random_jordan_matrix(rng)
        n = A.shape[0]
        d = dunford(A)
        assert np.linalg.norm(d.A_s @ d.A_u - A) < 1e-10 * max(1, np.linalg.norm(A))
        assert np.linalg.norm(d.A_s @ d.A_u - d.A_u @ d.A_s) < 1e-10
        assert np.linalg.norm(np.linalg.matrix_power(d.A_u - np.eye(n), n)) < 1e-10


# -- characters ---------------------------------------------------------------------

def test_characters_send_p_to_one():
    for p in (2, 3, 5):
        assert apply_character(Character.gamma1(), p, p) == pytest.approx(1.0)
        assert apply_character(Character.gamma2(), p, p) == pytest.approx(1.0, abs=1e-12)


def test_characters_at_2i():
    assert apply_character(Character.gamma1(), 2j, 2) == pytest.approx(1j)
    assert apply_character(Character.gamma2(), 2j, 2) == pytest.approx(1.0, abs=1e-12)


def test_gamma2_at_sqrt2():
    assert apply_character(Character.gamma2(), math.sqrt(2), 2) == \
        pytest.approx(-1.0, abs=1e-12)


def test_characters_multiplicative():
    rng = random.Random(89)
    for c in (Character.gamma1(), Character.gamma2()):
        for _ in range(300):
            z = rng.uniform(0.2, 3) * cmath.exp(1j * rng.uniform(-3, 3))
            w = rng.uniform(0.2, 3) * cmath.exp(1j * rng.uniform(-3, 3))
            lhs = apply_character(c, z * w, 2)
            rhs = apply_character(c, z, 2) * apply_character(c, w, 2)
            assert abs(lhs - rhs) < 1e-12


def test_eigenvalue_map_lookup_and_miss():
    c = Character.eigenvalue_map([(2.0, 5.0)])
    assert apply_character(c, 2.0, 2) == 5.0
    with pytest.raises(UnmappedEigenvalue):
        apply_character(c, 3.0, 2)


# -- power twists --------------------------------------------------------------------

def test_twist_identity_is_identity():
    A = np.array([[2, 1], [0, 2]], dtype=complex)
    got = power_twist(A, Character.identity_for(A), 1.0, 2)
    assert np.allclose(got, A, atol=1e-12)


def test_twist_lambda_zero_char_collapse():
    A = np.array([[2, 1], [0, 2]], dtype=complex)
    got = power_twist(A, Character.eigenvalue_map([(2.0, 1.0)]), 0.0, 2)
    assert np.allclose(got, np.eye(2), atol=1e-12)


def test_twist_integer_lambda_is_power():
    A = np.array([[2, 1], [0, 2]], dtype=complex)
    got = power_twist(A, Character.identity_for(A), 2.0, 2)
    # A_s * A_u^2 = A^2 A_s^(-1) for commuting Dunford parts
    want = A @ A @ np.linalg.inv(2 * np.eye(2))
    assert np.allclose(got, want, atol=1e-12)
    assert np.allclose(got, np.array([[2, 2], [0, 2]]), atol=1e-12)


def test_unipotent_binomial_matches_powers():
    rng = random.Random(97)
    for _ in range(20):
        A = random_jordan_matrix(rng)
        n = A.shape[0]
        for k in (1, 2, 3):
            got = power_twist(A, Character.eigenvalue_map(
                [(e, 1.0) for e in sorted(set(np.round(np.linalg.eigvals(A), 6)),
                                          key=lambda z: (z.real, z.imag))]),
                float(k), 2)
            Au = dunford(A).A_u
            want = np.linalg.matrix_power(Au, k)
            assert np.allclose(got, want, atol=1e-9)


def test_twist_homomorphism_law():
    rng = random.Random(101)
    p = 2
    for _ in range(30):
        A = random_jordan_matrix(rng)
        eigs = np.linalg.eigvals(A)
        distinct = []
        for e in eigs:
            if not any(abs(e - d) < 1e-6 for d in distinct):
                distinct.append(complex(e))
        g1 = Character.gamma1()
        g2 = Character.gamma2()
        prod = Character.eigenvalue_map(
            [(e, apply_character(g1, e, p) * apply_character(g2, e, p))
             for e in distinct])
        lam1, lam2 = 0.7, -1.3
        lhs = power_twist(A, prod, lam1 + lam2, p)
        rhs = power_twist(A, g1, lam1, p) @ power_twist(A, g2, lam2, p)
        assert np.linalg.norm(lhs - rhs) < 1e-10 * max(1, np.linalg.norm(lhs))


def test_intertwining_of_twists():
    # shared eigenvalues arranged: S A0 = B0 S implies the same relation
    # for every twist image
    rng = random.Random(103)
    p = 2
    for _ in range(20):
        lam = rng.choice([2.0, 3.0, 1 + 1j])
        mu = rng.choice([0.5, -1.0])
        A0 = np.diag([lam, mu])
        B0 = np.diag([mu, lam, 7.0])
        basis = solve_constant_hom(A0, B0)
        assert basis, "arranged shared eigenvalues must give morphisms"
        for c, l in ((Character.gamma1(), 0.3), (Character.gamma2(), -2.0),
                     (Character.identity_for(np.diag([lam, mu, 7.0])), 1.0)):
            tA = power_twist(A0, c, l, p)
            tB = power_twist(B0, c, l, p)
            for S in basis:
                assert np.linalg.norm(S @ tA - tB @ S) < 1e-10


# -- local generators -----------------------------------------------------------------

def test_local_generators_identity_system():
    gens = local_generators_at_1(np.eye(2), 2, CoverPoint(0.5, 0.0))
    assert len(gens) == 3
    for g in gens:
        assert np.allclose(g.matrix, np.eye(2), atol=1e-12)


def test_local_generators_jordan():
    gens = local_generators_at_1(np.array([[2, 1], [0, 2]], dtype=complex),
                                 2, CoverPoint(0.5, 0.0))
    uni, g1, g2 = gens
    assert np.allclose(uni.matrix, [[1, 0.5], [0, 1]], atol=1e-12)
    assert np.allclose(g1.matrix, np.eye(2), atol=1e-12)
    assert np.allclose(g2.matrix, np.eye(2), atol=1e-12)


def test_local_generators_diag_3_2i():
    gens = local_generators_at_1(np.diag([3.0, 2j]), 2, CoverPoint(0.5, 0.0))
    uni, g1, g2 = gens
    assert np.allclose(uni.matrix, np.eye(2), atol=1e-12)
    assert np.allclose(np.diag(g1.matrix), [1.0, 1j], atol=1e-12)
    want = cmath.exp(2j * math.pi * math.log(3) / math.log(2))
    assert np.allclose(np.diag(g2.matrix), [want, 1.0], atol=1e-12)


# -- morphism solvers ------------------------------------------------------------------

def test_constant_hom_full_space():
    assert len(solve_constant_hom(np.eye(2), np.eye(2))) == 4


def test_constant_hom_swap_diag():
    basis = solve_constant_hom(np.diag([2.0, 3.0]), np.diag([3.0, 2.0]))
    assert len(basis) == 2
    for S in basis:
        assert abs(S[0, 0]) < 1e-12 and abs(S[1, 1]) < 1e-12


def test_constant_hom_empty():
    assert solve_constant_hom(np.array([[2.0]]), np.array([[3.0]])) == []


def test_constant_hom_dimension_vs_spectral_count():
    rng = random.Random(107)
    pool = [2.0, 3.0, -1.0, 1 + 1j]
    for _ in range(50):
        n1, n2 = rng.choice([(2, 2), (2, 3), (3, 2)])
        e1 = [rng.choice(pool) for _ in range(n1)]
        e2 = [rng.choice(pool) for _ in range(n2)]
        Q1 = random_jordan_matrix(rng, 2)  # just for a random conjugator
        A0 = np.diag(e1)
        B0 = np.diag(e2)
        want = sum(1 for a in e1 for b in e2 if abs(a - b) < 1e-12)
        got = solve_constant_hom(A0, B0)
        assert len(got) == want
        for S in got:
            assert np.linalg.norm(S @ A0 - B0 @ S) < 1e-10


def test_log_hom_scalar_cases():
    same = solve_log_hom([[1.0]], [[1.0]], 2)
    assert [l.degrees() for l in same] == [[0]]
    shift = solve_log_hom([[1.0]], [[2.0]], 2)
    assert [l.degrees() for l in shift] == [[1]]
    assert solve_log_hom([[2.0]], [[3.0]], 2) == []


def test_log_hom_negative_degree():
    down = solve_log_hom([[2.0]], [[1.0]], 2)
    assert [l.degrees() for l in down] == [[-1]]


def test_log_hom_graded_identities():
    rng = random.Random(109)
    p = 2
    for _ in range(20):
        A1 = np.diag([rng.choice([1.0, 2.0, 3.0]) for _ in range(2)])
        B1 = np.diag([rng.choice([1.0, 2.0, 4.0]) for _ in range(2)])
        for sol in solve_log_hom(A1, B1, p):
            for k, Sk in sol.terms:
                assert np.linalg.norm((p ** float(k)) * Sk @ A1 - B1 @ Sk) < 1e-10


# -- generator family ------------------------------------------------------------------

@pytest.fixture(scope="module")
def running_bundle(running_system):
    return build_bundle(running_system, order=32)


@pytest.fixture(scope="module")
def running_generators(running_bundle):
    twists = [("gamma1", 0.0), ("gamma2", 0.0), ("id", 1.0)]
    return density_generators(running_bundle,
                              [CoverPoint(0.5, 0.0)], [CoverPoint(2.0, 0.0)],
                              twists)


def test_generator_enumeration_counts(running_generators):
    # 3 twists at omega0 + 3 at omegaInf + 3 local at 1 + 1 Gamma0
    # + 1 GammaInf + the A1 shift
    assert len(running_generators) == 12
    kinds = [g.provenance.kind for g in running_generators]
    assert kinds.count("local-twist") == 6
    assert kinds.count("unipotent") == 1
    assert kinds.count("char-gen") == 2
    assert kinds.count("gamma0") == 1
    assert kinds.count("gammaInf") == 1
    assert kinds.count("a1-shift") == 1


def test_generators_invertible_and_tagged(running_generators):
    for g in running_generators:
        assert abs(np.linalg.det(np.atleast_2d(g.matrix))) > 1e-12
        assert g.source.kind in ("omega0", "omegaInf", "omega1")
        if g.source.kind == "omega1":
            assert g.source.point is not None


def test_generators_identity_system():
    B = build_bundle(MahlerSystem(2, RatMatrix.eye(1)), order=8)
    gens = density_generators(B, [CoverPoint(0.5, 0.0)], [CoverPoint(2.0, 0.0)],
                              [("gamma1", 0.0), ("id", 1.0)])
    for g in gens:
        assert np.allclose(g.matrix, np.eye(1), atol=1e-12)


def test_generators_reject_singular_samples(running_bundle):
    with pytest.raises(SampleInSingularLocus) as exc:
        density_generators(running_bundle, [CoverPoint(0.25, 0.0)], [], [])
    assert exc.value.index == 0


def test_generator_cocycle_relation(running_bundle, running_generators):
    from mahler.cover import verify_connection_equation
    for g in running_generators:
        if g.provenance.kind == "gamma0":
            assert verify_connection_equation(
                running_bundle, g.provenance.point, "0") < 1e-8
        if g.provenance.kind == "gammaInf":
            assert verify_connection_equation(
                running_bundle, g.provenance.point, "inf") < 1e-8


# -- naturality -------------------------------------------------------------------------

def test_naturality_identity_morphism(running_bundle, running_generators):
    ident = MorphismTriple.identity(1)
    for g in running_generators:
        assert verify_naturality(g, ident, running_bundle, running_bundle) < 1e-10


def test_naturality_diagonal_embedding(running_bundle, running_system,
                                       running_generators):
    a = running_system.A[0, 0]
    double = MahlerSystem(2, RatMatrix([[a, RatFun.zero()],
                                        [RatFun.zero(), a]]))
    Y = build_bundle(double, order=32)
    basis = solve_constant_hom(running_bundle.A0, Y.A0)
    assert len(basis) == 2
    for S in basis:
        morph = MorphismTriple.constant(S)
        for g in running_generators:
            assert verify_naturality(g, morph, running_bundle, Y) < 1e-8


def test_tensor_square_has_no_nonzero_constant_morphism(running_bundle):
    # a0 = 1/2 against a0^2 = 1/4: disjoint spectra, empty basis
    assert solve_constant_hom(running_bundle.A0, running_bundle.A0 @
                              running_bundle.A0) == []
