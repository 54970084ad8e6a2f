"""Exception hierarchy shared by all modules.

Validation errors (bad input data) and analytic failures (a computation
that is mathematically impossible or numerically meaningless at the
requested point) are kept in separate branches so the CLI can map them
to distinct exit codes.
"""


class MahlerError(Exception):
    """Base class for everything raised by this package."""


class ValidationError(MahlerError):
    """Structurally invalid input (wrong shape, degenerate data)."""


class ParseError(ValidationError):
    def __init__(self, message, position=None):
        super().__init__(message if position is None
                         else f"{message} (at position {position})")
        self.position = position


class DegenerateEquation(ValidationError):
    """a_0 * a_n = 0: the equation does not have full order."""


class SingularMatrix(ValidationError):
    """det = 0 identically; the matrix is not invertible over the function field."""


class SingularGauge(ValidationError):
    """Gauge matrix with identically vanishing determinant."""


class AnalyticError(MahlerError):
    """A computation failed for analytic reasons (pole, resonance, ...)."""


class PoleHit(AnalyticError):
    """Evaluation point too close to a pole of the denominator."""


class ZeroFunction(AnalyticError):
    """Valuation of the zero function requested."""


class NotAnalytic(AnalyticError):
    def __init__(self, entry, place):
        super().__init__(f"entry {entry} has a pole at place {place}")
        self.entry = entry
        self.place = place


class SingularLeadingTerm(AnalyticError):
    """Series inversion with non-invertible constant term."""


class NotFuchsianAtPlace(AnalyticError):
    def __init__(self, place, reason=""):
        super().__init__(f"system is not Fuchsian at {place}: {reason}")
        self.place = place
        self.reason = reason


class Resonant(AnalyticError):
    """Two eigenvalues of the value matrix at 1 differ by a power of p."""

    def __init__(self, k, lam, mu):
        super().__init__(f"resonant eigenvalue pair at k={k}: {lam} = p^{k} * {mu}")
        self.k = k
        self.lam = lam
        self.mu = mu


class SingularInput(AnalyticError):
    """Factorization input with identically vanishing determinant."""


class PoleOnOrbit(AnalyticError):
    """The forward orbit of the evaluation point hits a singularity."""

    def __init__(self, j, point=None):
        super().__init__(f"orbit point at iterate {j} is singular")
        self.j = j
        self.point = point


class PoleOnRay(AnalyticError):
    """The contracted logarithm ray hits a singularity."""

    def __init__(self, j, point=None):
        super().__init__(f"ray point at division depth {j} is singular")
        self.j = j
        self.point = point


class DepthInsufficient(AnalyticError):
    """The continuation depth does not bring the point inside the trust radius."""


class InSingularLocus(AnalyticError):
    """Evaluation requested on (the orbit closure of) the singular locus."""


class SampleInSingularLocus(AnalyticError):
    def __init__(self, index, side=""):
        super().__init__(f"sample point {index} ({side}) lies on a singular orbit")
        self.index = index
        self.side = side


class IllConditioned(AnalyticError):
    """Eigenspace separation too poor for a reliable decomposition."""


class UnmappedEigenvalue(AnalyticError):
    """An eigenvalue map character received an eigenvalue it has no value for."""
