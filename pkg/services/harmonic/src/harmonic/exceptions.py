"""Exceptions raised by the harmonic package."""


class HarmonicError(Exception):
    """Base exception for harmonic analysis errors."""


class GridError(HarmonicError):
    """A quadrature grid is too small, incompatible, or a translation is not grid aligned."""


class PartitionError(HarmonicError):
    """A partition size does not divide the piece count of a step function."""

    def __init__(self, n: int, pieces: int) -> None:
        self.n = n
        self.pieces = pieces
        super().__init__(f"N={n} does not divide the step partition P={pieces}")


class HorizonError(HarmonicError):
    """A symbol is applied beyond its horizon."""

    def __init__(self, horizon: int, degree: int) -> None:
        self.horizon = horizon
        self.degree = degree
        super().__init__(f"Symbol horizon {horizon} is shorter than the spectrum [0, {degree}]")


class LacunarityError(HarmonicError):
    """A sequence is not strictly increasing or not lacunary."""


class MeasurabilityError(HarmonicError):
    """A function is not measurable with respect to the required dyadic level."""


class EnumerationBudgetError(HarmonicError):
    """Exact enumeration would exceed the configured cell budget."""

    def __init__(self, cells: int, budget: int) -> None:
        self.cells = cells
        self.budget = budget
        super().__init__(
            f"Exact enumeration needs {cells} product cells (budget {budget}); use the Monte Carlo estimator instead"
        )


class DegenerateInputError(HarmonicError):
    """An input has no admissible content (e.g. empty partition, zero degree where one is required)."""


class LevelError(HarmonicError):
    """A dyadic level or block index is out of range."""


class AtomError(HarmonicError):
    """A candidate atom violates the mean-zero, support or L^2 conditions."""
