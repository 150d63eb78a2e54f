"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class DegenerateMapError(DomainError):
    """Real-linear map with |A| <= |B| (not orientation-preserving invertible)."""


class CapacityError(RuntimeError):
    """A configured size budget would be exceeded."""


class EstimationError(RuntimeError):
    """An empirical estimate cannot be formed from the given data."""


class PlacementError(RuntimeError):
    """Ring placement failed; `detail` names the offending pair."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class ClearanceError(RuntimeError):
    """A translation move does not have the required clearance; names the move."""

    def __init__(self, message, move=None):
        super().__init__(message)
        self.move = move


class EndpointMismatchError(ValueError):
    """Declared path endpoints disagree with evaluation; carries a witness point."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class GlueMismatchError(ValueError):
    """Glued pieces disagree on a shared boundary; carries a witness point."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceededError(RuntimeError):
    """Adaptive refinement exceeded its split budget; names the stuck interval."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class SchemaError(ValueError):
    """A scene or factors file failed schema validation."""
