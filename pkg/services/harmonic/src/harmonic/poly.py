"""Trigonometric polynomials on the circle [0, 1), step functions and their norms.

Analytic polynomials store frequencies ``0..d`` only.  The two symmetric objects
the multiplier constructions need (the Fejer kernel and its modulations) are kept
as :class:`CoefficientSequence` values with an explicit frequency offset.

All L^1 and L^1(l^2) quantities of polynomials are left-endpoint Riemann sums on
power-of-two grids and come back as :class:`NormEstimate` with an a-priori error
bound: |f| is Lipschitz with constant 2*pi*d*||f||_inf (Bernstein), so a cell of
width 1/M contributes at most pi*d*||f||_inf/M to the error of the cell mean.
Step functions that live on a partition dividing the grid are integrated exactly.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from harmonic.constants import DEFAULT_OVERSAMPLE, MIN_OVERSAMPLE, SUP_NORM_SAFETY
from harmonic.exceptions import DegenerateInputError, GridError, PartitionError

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]


def frozen_array(values: npt.ArrayLike, ndim: int) -> ComplexArray:
    arr = np.array(values, dtype=np.complex128, copy=True)
    if arr.ndim != ndim or arr.size == 0:
        raise DegenerateInputError(f"Expected a non-empty {ndim}-dimensional coefficient array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def next_power_of_two(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


# --- Domain types ---


@dataclass(frozen=True, slots=True, eq=False)
class AnalyticPoly:
    """Analytic trigonometric polynomial ``sum_{j=0}^{d} c_j e^{2 pi i j t}``.

    A polynomial of degree ``d`` belongs to H^1_n for every ``n >= d``.
    """

    coeffs: ComplexArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", frozen_array(self.coeffs, 1))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex] | npt.ArrayLike) -> "AnalyticPoly":
        return cls(np.asarray(coeffs, dtype=np.complex128))

    @classmethod
    def monomial(cls, j: int, c: complex = 1.0) -> "AnalyticPoly":
        coeffs = np.zeros(j + 1, dtype=np.complex128)
        coeffs[j] = c
        return cls(coeffs)

    @classmethod
    def constant(cls, c: complex) -> "AnalyticPoly":
        return cls(np.array([c], dtype=np.complex128))

    @property
    def degree(self) -> int:
        return int(self.coeffs.size - 1)

    def padded(self, degree: int) -> "AnalyticPoly":
        """Same polynomial stored with coefficients up to ``degree``."""
        if degree < self.degree:
            raise DegenerateInputError(f"Cannot store a degree-{self.degree} polynomial in degree {degree}")
        out = np.zeros(degree + 1, dtype=np.complex128)
        out[: self.coeffs.size] = self.coeffs
        return AnalyticPoly(out)

    def __add__(self, other: "AnalyticPoly") -> "AnalyticPoly":
        d = max(self.degree, other.degree)
        return AnalyticPoly(self.padded(d).coeffs + other.padded(d).coeffs)

    def __sub__(self, other: "AnalyticPoly") -> "AnalyticPoly":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "AnalyticPoly":
        return AnalyticPoly(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "AnalyticPoly":
        return self * -1.0


@dataclass(frozen=True, slots=True, eq=False)
class BivariatePoly:
    """Polynomial ``sum c_{n1,n2} e^{2 pi i (n1 t1 + n2 t2)}`` with spectrum in the closed positive quadrant."""

    coeffs: ComplexArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", frozen_array(self.coeffs, 2))

    @property
    def degrees(self) -> tuple[int, int]:
        rows, cols = self.coeffs.shape
        return rows - 1, cols - 1


@dataclass(frozen=True, slots=True, eq=False)
class StepFunction:
    """Function constant on each cell ``[i/P, (i+1)/P)`` of the uniform P-partition."""

    values: ComplexArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", frozen_array(self.values, 1))

    @classmethod
    def constant(cls, c: complex, pieces: int = 1) -> "StepFunction":
        return cls(np.full(pieces, c, dtype=np.complex128))

    @classmethod
    def indicator(cls, start: int, stop: int, pieces: int, value: complex = 1.0) -> "StepFunction":
        """``value`` times the indicator of ``[start/P, stop/P)``."""
        values = np.zeros(pieces, dtype=np.complex128)
        values[start:stop] = value
        return cls(values)

    @property
    def pieces(self) -> int:
        return int(self.values.size)

    def refine(self, pieces: int) -> "StepFunction":
        """The same function on a finer partition; ``self.pieces`` must divide ``pieces``."""
        if pieces % self.pieces:
            raise PartitionError(self.pieces, pieces)
        if pieces == self.pieces:
            return self
        return StepFunction(np.repeat(self.values, pieces // self.pieces))

    def __add__(self, other: "StepFunction") -> "StepFunction":
        p = math.lcm(self.pieces, other.pieces)
        return StepFunction(self.refine(p).values + other.refine(p).values)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "StepFunction":
        return StepFunction(self.values * scalar)

    __rmul__ = __mul__

    def __abs__(self) -> "StepFunction":
        return StepFunction(np.abs(self.values))


@dataclass(frozen=True, slots=True, eq=False)
class CoefficientSequence:
    """Finitely supported Fourier coefficients on frequencies ``offset .. offset + len - 1``.

    Used for the Fejer kernel and its modulations, the only objects with negative frequencies.
    """

    offset: int
    coeffs: ComplexArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", frozen_array(self.coeffs, 1))

    @property
    def last(self) -> int:
        return self.offset + int(self.coeffs.size) - 1

    def at(self, freqs: npt.ArrayLike) -> ComplexArray:
        """Coefficients at the given integer frequencies (zero outside the support)."""
        idx = np.asarray(freqs, dtype=np.int64) - self.offset
        inside = (idx >= 0) & (idx < self.coeffs.size)
        out = np.zeros(idx.shape, dtype=np.complex128)
        out[inside] = self.coeffs[idx[inside]]
        return out

    def shifted(self, shift: int) -> "CoefficientSequence":
        """Modulation by ``e^{2 pi i shift t}``."""
        return CoefficientSequence(self.offset + shift, self.coeffs)

    def evaluate(self, t: float | FloatArray) -> complex | ComplexArray:
        freqs = np.arange(self.offset, self.last + 1)
        phase = np.exp(2j * np.pi * np.multiply.outer(np.asarray(t, dtype=np.float64), freqs))
        out = phase @ self.coeffs
        return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, slots=True)
class QuadratureGrid:
    """Equispaced nodes ``i/M`` with M a power of two."""

    points: int
    max_degree: int = 0

    def __post_init__(self) -> None:
        if not is_power_of_two(self.points):
            raise GridError(f"Grid size must be a power of two, got {self.points}")
        if self.points < MIN_OVERSAMPLE * (self.max_degree + 1):
            raise GridError(
                f"Grid of {self.points} points is below {MIN_OVERSAMPLE}x(degree+1) for degree {self.max_degree}"
            )

    @classmethod
    def for_degree(
        cls,
        degree: int,
        oversample: int = DEFAULT_OVERSAMPLE,
        partitions: Sequence[int] = (),
    ) -> "QuadratureGrid":
        """Smallest power-of-two grid oversampling ``degree`` and divisible by every partition size."""
        target = max(MIN_OVERSAMPLE, oversample) * (degree + 1)
        for n in partitions:
            if not is_power_of_two(n):
                raise GridError(f"Partition size {n} cannot divide a power-of-two grid")
            target = max(target, n)
        return cls(points=next_power_of_two(target), max_degree=degree)

    @property
    def oversample(self) -> float:
        return self.points / (self.max_degree + 1)

    @property
    def nodes(self) -> FloatArray:
        return np.arange(self.points, dtype=np.float64) / self.points

    def divisible_by(self, pieces: int) -> bool:
        return self.points % pieces == 0


@dataclass(frozen=True, slots=True)
class NormEstimate:
    """A norm value with its a-priori quadrature error bound (zero when exact)."""

    value: float
    error: float = 0.0

    @property
    def upper(self) -> float:
        return self.value + self.error

    @property
    def lower(self) -> float:
        return max(0.0, self.value - self.error)

    def __float__(self) -> float:
        return self.value


Member = AnalyticPoly | StepFunction


# --- Construction helpers ---


def random_analytic(
    rng: np.random.Generator,
    degree: int,
    *,
    low: int = 0,
    density: float = 1.0,
) -> AnalyticPoly:
    """Complex Gaussian coefficients on frequencies ``low..degree`` (each kept with probability ``density``)."""
    coeffs = np.zeros(degree + 1, dtype=np.complex128)
    n = degree - low + 1
    block = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if density < 1.0:
        block *= rng.random(n) < density
    coeffs[low:] = block
    return AnalyticPoly(coeffs)


def random_bivariate(
    rng: np.random.Generator,
    degrees: tuple[int, int],
    support: npt.NDArray[np.bool_] | None = None,
) -> BivariatePoly:
    """Complex Gaussian coefficients on the ``(d1+1, d2+1)`` array, zeroed outside ``support``."""
    shape = (degrees[0] + 1, degrees[1] + 1)
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if support is not None:
        coeffs = np.where(support, coeffs, 0.0)
    return BivariatePoly(coeffs)


def modulate(f: AnalyticPoly, shift: int) -> AnalyticPoly:
    """Multiplication by ``e^{2 pi i shift t}`` for ``shift >= 0``."""
    if shift < 0:
        raise DegenerateInputError("Analytic polynomials cannot be modulated to negative frequencies")
    return AnalyticPoly(np.concatenate([np.zeros(shift, dtype=np.complex128), f.coeffs]))


# --- Operations ---


def evaluate(f: AnalyticPoly, t: float | FloatArray) -> complex | ComplexArray:
    """``sum_j c_j e^{2 pi i j t}`` at a point or an array of points."""
    z = np.exp(2j * np.pi * np.asarray(t, dtype=np.float64))
    out = np.polynomial.polynomial.polyval(z, f.coeffs)
    return complex(out) if np.ndim(out) == 0 else np.asarray(out, dtype=np.complex128)


def sample(f: Member, grid: QuadratureGrid) -> StepFunction:
    """Point values at the grid nodes, by zero-padded inverse DFT for polynomials."""
    if isinstance(f, StepFunction):
        if not grid.divisible_by(f.pieces):
            raise GridError(f"Step partition P={f.pieces} does not divide the grid M={grid.points}")
        return f.refine(grid.points)
    if f.degree + 1 > grid.points:
        raise GridError(f"Grid of {grid.points} points cannot resolve degree {f.degree}")
    padded = np.zeros(grid.points, dtype=np.complex128)
    padded[: f.coeffs.size] = f.coeffs
    return StepFunction(np.fft.ifft(padded) * grid.points)


def sup_estimate(values: npt.ArrayLike) -> float:
    """Grid maximum of |values| times the sup-norm safety factor."""
    arr = np.abs(np.asarray(values))
    return SUP_NORM_SAFETY * float(arr.max()) if arr.size else 0.0


def l2_norm(f: Member) -> float:
    """Exact L^2 norm: Parseval for polynomials, the cell average for step functions."""
    if isinstance(f, StepFunction):
        return math.sqrt(float(np.mean(np.abs(f.values) ** 2)))
    return float(np.linalg.norm(f.coeffs))


def default_grid(family: Sequence[Member], grid: QuadratureGrid | None) -> QuadratureGrid:
    if grid is not None:
        return grid
    degree = max((m.degree for m in family if isinstance(m, AnalyticPoly)), default=0)
    partitions = [m.pieces for m in family if isinstance(m, StepFunction)]
    return QuadratureGrid.for_degree(degree, partitions=partitions)


def l1_norm(f: Member, grid: QuadratureGrid | None = None) -> NormEstimate:
    """L^1 norm; exact for step functions, a Riemann sum with error bound for polynomials."""
    if isinstance(f, StepFunction):
        return NormEstimate(float(np.mean(np.abs(f.values))))
    grid = default_grid([f], grid)
    values = sample(f, grid).values
    error = math.pi * f.degree * sup_estimate(values) / grid.points
    return NormEstimate(float(np.mean(np.abs(values))), error)


def mixed_l1l2_norm(family: Sequence[Member], grid: QuadratureGrid | None = None) -> NormEstimate:
    """``int sqrt(sum_k |f_k(t)|^2) dt``; exact when every member is a step function.

    An empty family has norm zero.
    """
    if not family:
        return NormEstimate(0.0)
    steps = [m for m in family if isinstance(m, StepFunction)]
    if len(steps) == len(family):
        pieces = math.lcm(*(m.pieces for m in steps))
        squares = np.zeros(pieces, dtype=np.float64)
        for step in steps:
            squares += np.abs(step.refine(pieces).values) ** 2
        return NormEstimate(float(np.mean(np.sqrt(squares))))

    grid = default_grid(family, grid)
    squares = np.zeros(grid.points, dtype=np.float64)
    lipschitz_sq = 0.0
    for m in family:
        values = sample(m, grid).values
        squares += np.abs(values) ** 2
        if isinstance(m, AnalyticPoly):
            lipschitz_sq += (m.degree * sup_estimate(values)) ** 2
    error = math.pi * math.sqrt(lipschitz_sq) / grid.points
    return NormEstimate(float(np.mean(np.sqrt(squares))), error)


def fejer_kernel(n: int) -> CoefficientSequence:
    """``K_n(t) = sum_{|j|<n} (1 - |j|/n) e^{2 pi i j t}`` (the vanishing coefficients at +-n are dropped)."""
    if n < 1:
        raise DegenerateInputError(f"Fejer kernel order must be positive, got {n}")
    j = np.arange(-(n - 1), n)
    return CoefficientSequence(offset=-(n - 1), coeffs=(1.0 - np.abs(j) / n).astype(np.complex128))


def derivative(f: AnalyticPoly) -> AnalyticPoly:
    return AnalyticPoly(f.coeffs * (2j * np.pi * np.arange(f.coeffs.size)))


def convolve(f: AnalyticPoly, g: CoefficientSequence | AnalyticPoly) -> AnalyticPoly:
    """Convolution on the circle: coefficientwise product ``f^(j) g^(j)``."""
    if isinstance(g, AnalyticPoly):
        g = CoefficientSequence(0, g.coeffs)
    return AnalyticPoly(f.coeffs * g.at(np.arange(f.coeffs.size)))


# --- Two variables ---


def sample_2d(f: BivariatePoly, grids: tuple[QuadratureGrid, QuadratureGrid]) -> ComplexArray:
    """Values at the product nodes ``(i/M1, j/M2)``."""
    d1, d2 = f.degrees
    m1, m2 = grids[0].points, grids[1].points
    if d1 + 1 > m1 or d2 + 1 > m2:
        raise GridError(f"Grid {m1}x{m2} cannot resolve degrees ({d1}, {d2})")
    padded = np.zeros((m1, m2), dtype=np.complex128)
    padded[: d1 + 1, : d2 + 1] = f.coeffs
    return np.asarray(np.fft.ifft2(padded) * (m1 * m2), dtype=np.complex128)


def grids_for_2d(f: BivariatePoly, oversample: int = MIN_OVERSAMPLE) -> tuple[QuadratureGrid, QuadratureGrid]:
    d1, d2 = f.degrees
    return QuadratureGrid.for_degree(d1, oversample), QuadratureGrid.for_degree(d2, oversample)


def l1_norm_2d(
    f: BivariatePoly,
    grids: tuple[QuadratureGrid, QuadratureGrid] | None = None,
) -> NormEstimate:
    """L^1 norm on the torus by a product Riemann sum; the error bound adds the two directional Lipschitz terms."""
    grids = grids or grids_for_2d(f)
    values = sample_2d(f, grids)
    d1, d2 = f.degrees
    sup = sup_estimate(values)
    error = math.pi * sup * (d1 / grids[0].points + d2 / grids[1].points)
    return NormEstimate(float(np.mean(np.abs(values))), error)
