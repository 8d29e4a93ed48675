"""Exception types shared across the toolkit."""


class PinchAoIError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(PinchAoIError, ValueError):
    """Configuration failed to parse or violates one or more invariants."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class DomainError(PinchAoIError, ValueError):
    """An argument is outside the domain of a formula."""


class InfeasibleLinkError(PinchAoIError):
    """The link has zero success probability, so the AoI is unbounded."""


class BudgetExceededError(PinchAoIError):
    """A simulation hit its slot cap before collecting enough renewals."""


class ScenarioMismatchError(PinchAoIError, ValueError):
    """Simulation results from different scenarios cannot be pooled."""
