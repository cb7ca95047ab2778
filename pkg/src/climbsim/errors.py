"""Error types shared across the toolkit."""


class ParameterDomainError(ValueError):
    """A physical parameter is outside its valid domain."""


class ConfigValidationError(ValueError):
    """A scenario config failed schema validation (unknown key, bad type/range)."""


class ProjectionDomainError(ValueError):
    """A world point cannot be imaged (on or behind the camera plane)."""


class PlanningError(RuntimeError):
    """A hop target is unreachable with the configured burn.

    Carries the maximum reachable displacement magnitude as a diagnostic.
    """

    def __init__(self, message: str, max_reach: float):
        super().__init__(message)
        self.max_reach = max_reach


class ConvergenceError(RuntimeError):
    """An iterative solve failed to reach tolerance; carries the residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual
