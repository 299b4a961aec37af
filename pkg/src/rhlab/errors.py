"""Exception types shared across the package."""


class RhlabError(Exception):
    """Base class for package errors."""


class ChainUnstableError(RhlabError):
    """Coulomb softening drives a local transverse frequency imaginary."""

    def __init__(self, ion_index, radicand):
        self.ion_index = ion_index
        self.radicand = radicand
        super().__init__(
            f"chain unstable: local frequency of ion {ion_index} is imaginary "
            f"(squared frequency {radicand:.6g} rad^2/s^2 <= 0)"
        )


class NonEquilibriumModelError(RhlabError):
    """A ground-state computation was requested for a model with a
    non-positive collective mode frequency."""


class DimensionBudgetError(RhlabError):
    """Requested Hilbert-space dimension exceeds the configured budget."""

    def __init__(self, dimension, budget, note=""):
        self.dimension = dimension
        self.budget = budget
        msg = f"Hilbert-space dimension {dimension} exceeds budget {budget}"
        if note:
            msg += f" ({note})"
        super().__init__(msg)


class SingularModeError(RhlabError):
    """A formula with a mode frequency in the denominator hit a zero mode."""


class ConfigError(RhlabError):
    """Invalid run configuration."""
