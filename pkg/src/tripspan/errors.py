class TripspanError(Exception):
    """Base class for library errors."""


class BudgetExceeded(TripspanError):
    """An exhaustive search would exceed the configured node budget."""

    def __init__(self, needed, budget, what="search"):
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what} needs ~{needed} nodes, budget is {budget}")


class PatternNotFound(TripspanError):
    """A desk-scale pattern search came up empty.

    This is an honest negative result, not a bug: the guarantees behind the
    searches are asymptotic and may not hold at the sizes searched.
    """


class Counterexample(TripspanError):
    """A verification suite found an instance violating the checked claim."""
