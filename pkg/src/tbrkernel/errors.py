"""Exception hierarchy shared by all modules."""


class TBRError(Exception):
    """Base class for all library errors."""


class UnknownTaxonError(TBRError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class TaxonSetMismatchError(TBRError, ValueError):
    pass


class CardinalityError(TBRError, ValueError):
    """Raised when an operation gets too few or too many taxa."""


class NewickSyntaxError(TBRError, ValueError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DegreeError(TBRError, ValueError):
    pass


class DuplicateLabelError(TBRError, ValueError):
    pass


class NotAPartitionError(TBRError, ValueError):
    pass


class TooLargeError(TBRError, ValueError):
    """An exhaustive oracle was asked to handle an instance above its guard."""


class BudgetExceeded(TBRError):
    """The true distance is larger than the supplied budget."""

    def __init__(self, budget):
        super().__init__(f"TBR distance exceeds budget {budget}")
        self.budget = budget


class IneligibleChainError(TBRError, ValueError):
    pass


class NotMaximumError(TBRError, ValueError):
    pass


class NetworkError(TBRError, ValueError):
    pass
