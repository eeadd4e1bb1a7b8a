class SimulationError(Exception):
    """Base class for everything the simulator raises on purpose."""


class ParameterError(SimulationError, ValueError):
    """An operation was called outside its preconditions."""


class ScenarioError(SimulationError):
    """A scenario or preset failed validation."""

    def __init__(self, message: str, field_path: str = ""):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}" if field_path else message)

    @classmethod
    def from_validation(cls, exc, prefix: str = "") -> "ScenarioError":
        """Builds the error from a pydantic ValidationError, keeping the first field path."""
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first.get("loc", ()))
        path = ".".join(p for p in (prefix, loc) if p)
        return cls(first.get("msg", str(exc)), path)
