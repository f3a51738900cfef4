"""Exception types shared across the package."""


class DegenerateSample(ValueError):
    """Minimal sample does not determine a unique model."""


class IndexOutOfRange(IndexError):
    """Column index set is empty, duplicated, or out of bounds."""


class DimensionMismatch(ValueError):
    """Vector or matrix dimensions do not agree."""


class TooLarge(ValueError):
    """Problem exceeds the exhaustive enumeration guard."""


class StalledPruning(RuntimeError):
    """A pruning round removed no columns; iterating further would loop."""

    def __init__(self, survivors, message="pruning round removed no columns"):
        super().__init__(message)
        self.survivors = tuple(int(j) for j in survivors)


class EmptySelection(ValueError):
    """Operation requires a nonempty model selection."""


class LengthMismatch(ValueError):
    """Label or id collections do not cover the same points."""


class InvalidSpec(ValueError):
    """Generation spec violates its invariants."""


class ExhaustedRedraws(RuntimeError):
    """Too many consecutive degenerate minimal samples."""
