"""Exact and numeric toolkit for regular singular Mahler systems:
local reductions to constant systems at 0, 1 and infinity, connection
matrices on the universal cover of C*, Birkhoff-style factorizations and
the generator family of the difference Galois groupoid.
"""

from .errors import (AnalyticError, DegenerateEquation, DepthInsufficient,
                     IllConditioned, InSingularLocus, MahlerError, NotAnalytic,
                     NotFuchsianAtPlace, ParseError, PoleHit, PoleOnOrbit,
                     PoleOnRay, Resonant, SampleInSingularLocus, SingularGauge,
                     SingularInput, SingularLeadingTerm, SingularMatrix,
                     UnmappedEigenvalue, ValidationError, ZeroFunction)
from .exact import (GaussianRational, GMat, Poly, RatFun, RatMatrix, gq,
                    mahler_substitute, parse_ratfun, poly_gcd, ratfun_eval,
                    valuation)
from .series import SeriesMatrix, compose_exp, expand_at, series_inverse
from .systems import (MahlerEquation, MahlerSystem, OrbitSet, SingularLocus,
                      certify_regular_singular, classify_fuchsian,
                      companion_system, dual_system, gauge_transform,
                      kronecker, orbit_membership, singular_locus)
from .reduction import (LocalReduction, ResidualReport, reduce_at_0,
                        reduce_at_1, reduce_at_inf, residual)
from .factorization import (ElementaryFactor, Factorization,
                            factor_regular_at_0, factor_regular_at_1,
                            uniformizer)
from .cover import (ConnectionBundle, CoverPoint, EvalResult, build_bundle,
                    connection_M0, connection_Minf, eval_F0, eval_F1,
                    eval_Finf, validate_bundle, verify_connection_equation,
                    with_scaled_a1)
from .groupoid import (Character, DunfordPair, FibreTag, GroupoidElement,
                       LaurentLogPoly, MorphismTriple, Provenance,
                       apply_character, density_generators, dunford,
                       local_generators_at_1, power_twist, solve_constant_hom,
                       solve_log_hom, verify_naturality)

__version__ = "0.1.0"
