"""Exception types shared across the toolkit."""


class UnitarityKitError(Exception):
    """Base class for all toolkit errors."""


class NotHermitian(UnitarityKitError):
    """Matrix fails the Hermitian symmetry precondition."""


class NoConvergence(UnitarityKitError):
    """An iterative eigen/singular solver exceeded its iteration bound."""


class ShapeMismatch(UnitarityKitError):
    """Matrix dimensions are inconsistent with the declared bipartite shape."""


class DimMismatch(UnitarityKitError):
    """Two vectors that must live in the same space do not."""


class InvalidDensityMatrix(UnitarityKitError):
    """Not Hermitian / positive semidefinite / unit trace within tolerance."""


class InvalidPureState(UnitarityKitError):
    """Vector is not normalized within tolerance."""


class ProbabilityOutOfRange(UnitarityKitError):
    """Mixing probability outside [0, 1]."""


class ParallelStates(UnitarityKitError):
    """Relative decomposition requires two distinct states (up to phase)."""


class ZeroVector(UnitarityKitError):
    """Operation undefined on the zero vector."""


class ParamOutOfRange(UnitarityKitError):
    """Scalar parameter outside its admissible range."""


class NegativeDiscriminant(UnitarityKitError):
    """Closed-form spectrum parameters are mutually inconsistent."""


class InsufficientSamples(UnitarityKitError):
    """Too few probe states to pin down the acting operator."""


class RankDeficient(UnitarityKitError):
    """An operator that must be invertible is numerically singular."""


class InconsistentParallelism(UnitarityKitError):
    """Basis-image factors fit neither the direct nor the swapped pattern."""


class NoRoot(UnitarityKitError):
    """Root bracketing failed (cannot happen for the built-in ratio function)."""


class ParseError(UnitarityKitError):
    """Input file is not a well-formed map/state file."""
