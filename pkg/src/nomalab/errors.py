"""Exception types shared across the package."""


class NomalabError(Exception):
    """Base class for all package-specific failures."""


class SpecError(NomalabError):
    """An experiment spec failed to parse or validate. Maps to exit code 2."""


class IntegrationError(NomalabError):
    """Adaptive quadrature did not converge within budget. Maps to exit code 3."""


class RetryBudgetError(NomalabError):
    """Full-network conditioning exhausted its redraw budget. Maps to exit code 3."""
