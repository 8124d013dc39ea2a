"""Exception types shared across the package."""


class SmmError(Exception):
    """Base class for all library errors."""


class FieldMismatchError(SmmError, ValueError):
    """Two operands belong to different prime fields."""


class DimensionError(SmmError, ValueError):
    """Matrix shapes are incompatible with the requested operation."""


class FeasibilityError(SmmError, ValueError):
    """No valid scheme exists for the requested parameters."""


class InsufficientAnswersError(SmmError, ValueError):
    """Decoding was attempted with fewer answers than the scheme needs."""

    def __init__(self, needed: int, got: int):
        super().__init__(f"need answers from at least {needed} servers, got {got}")
        self.needed = needed
        self.got = got


class AuditBudgetError(SmmError, RuntimeError):
    """The exhaustive audit would exceed its enumeration budget."""

    def __init__(self, states: int, budget: int):
        super().__init__(
            f"audit needs {states} states but the budget is {budget}; "
            "use a smaller field or smaller matrix dims"
        )
        self.states = states
        self.budget = budget


class ProtocolError(SmmError, RuntimeError):
    """A wire frame was malformed or a worker misbehaved."""


class WorkerError(SmmError, RuntimeError):
    """A worker was unreachable or failed mid-job."""


class ConfigurationError(SmmError, ValueError):
    """A job or registry is inconsistent with the scheme parameters."""
