"""Exception types shared across the package."""


class FlagstabError(Exception):
    """Base class for all library errors."""


class FieldMismatchError(FlagstabError):
    """Operands live over different fields."""


class ShapeError(FlagstabError):
    """Dimensions of the operands are incompatible."""


class SingularMatrixError(FlagstabError):
    """A matrix required to be invertible is singular."""


class NotUnipotentError(FlagstabError):
    """An operation required a unipotent transformation."""


class SeriesError(FlagstabError):
    """A chain of subspaces violates the series axioms."""


class ContainmentError(FlagstabError):
    """A required subspace containment does not hold."""


class TransvectionError(FlagstabError):
    """Invalid data for a transvection."""


class HypothesisError(FlagstabError):
    """A checked hypothesis of an identity does not hold for the input."""


class IdentityError(FlagstabError):
    """An algebraic identity that must hold failed on concrete data."""


class PreorderError(FlagstabError):
    """A preordered basis violates one of its clauses."""


class SelectionError(FlagstabError):
    """An interleaved pair selection is inconsistent."""


class WitnessError(FlagstabError):
    """Witness construction failed; `reason` holds a stable tag."""

    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason


class AdaptationError(FlagstabError):
    """No series-adapted Jordan basis could be produced."""


class SectionError(FlagstabError):
    """Invalid section assignment for patching."""


class NormalizationError(FlagstabError):
    """A generator fails to normalize a required subspace."""


class RefinementObstruction(FlagstabError):
    """A factor chain did not reach zero; `jump_index` names the factor."""

    def __init__(self, jump_index, message):
        super().__init__(message)
        self.jump_index = jump_index


class McLainError(FlagstabError):
    """Invalid McLain element data."""


class ParseError(FlagstabError):
    """Problem file parse failure with a line number."""

    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line
