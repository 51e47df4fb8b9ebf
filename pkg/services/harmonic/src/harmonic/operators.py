"""Concrete operators on the circle: translation, shift-average, grid expectation, symbols.

Notation kept distinct in every label: ``E*_N`` is the shift-average, ``E_N`` the
conditional expectation onto the uniform N-partition.  The dyadic ``E_m`` of the
martingale module is a different operator.
"""

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from harmonic.constants import ALIGNMENT_TOL
from harmonic.exceptions import DegenerateInputError, GridError, HorizonError, PartitionError
from harmonic.poly import (
    AnalyticPoly,
    BivariatePoly,
    ComplexArray,
    Member,
    QuadratureGrid,
    StepFunction,
    default_grid,
    sample,
    sup_estimate,
)
from harmonic.symbols import IdemSet2D, Symbol

logger = logging.getLogger(__name__)


class OperatorKind(enum.StrEnum):
    TRANSLATE = "translate"
    SHIFT_AVERAGE = "shift_average"
    GRID_EXPECTATION = "grid_expectation"
    SYMBOL = "symbol"


def _check_order(N: int) -> None:
    if N < 1:
        raise DegenerateInputError(f"Operator order N must be positive, got {N}")


def translate(f: Member, x0: float) -> Member:
    """``tau_{x0} f(x) = f(x - x0)``."""
    if not 0.0 <= x0 < 1.0:
        raise GridError(f"Translation x0={x0} outside [0, 1)")
    if isinstance(f, StepFunction):
        slots = x0 * f.pieces
        shift = round(slots)
        if abs(slots - shift) > ALIGNMENT_TOL * f.pieces:
            raise GridError(f"Translation by {x0} is not aligned with the partition P={f.pieces}")
        return StepFunction(np.roll(f.values, shift))
    j = np.arange(f.coeffs.size)
    return AnalyticPoly(f.coeffs * np.exp(-2j * np.pi * j * x0))


def shift_average(f: Member, N: int) -> Member:
    """``E*_N f = (1/N) sum_j tau_{j/N} f``; on polynomials the multiplier ``1_{N | n}``."""
    _check_order(N)
    if isinstance(f, StepFunction):
        if f.pieces % N:
            raise PartitionError(N, f.pieces)
        width = f.pieces // N
        # cell i of the result averages the cells i, i + P/N, i + 2P/N, ...
        averaged = f.values.reshape(N, width).mean(axis=0)
        return StepFunction(np.tile(averaged, N))
    keep = np.arange(f.coeffs.size) % N == 0
    return AnalyticPoly(np.where(keep, f.coeffs, 0.0))


def shift_average_sampled(f: AnalyticPoly, N: int, grid: QuadratureGrid) -> StepFunction:
    """``E*_N f`` at the grid nodes, averaging the N translates pointwise (sample space, any N)."""
    _check_order(N)
    freqs = np.flatnonzero(f.coeffs)
    shifted = grid.nodes[:, None] - np.arange(N)[None, :] / N
    phase = np.exp(2j * np.pi * shifted[..., None] * freqs)
    return StepFunction((phase @ f.coeffs[freqs]).mean(axis=1))


def _cell_weights(size: int, N: int) -> ComplexArray:
    """``N * int_0^{1/N} e^{2 pi i j t} dt`` for j = 0..size-1."""
    j = np.arange(size)
    weights = np.ones(size, dtype=np.complex128)
    nz = j != 0
    weights[nz] = N * (np.exp(2j * np.pi * j[nz] / N) - 1.0) / (2j * np.pi * j[nz])
    # exact zeros where N | j
    weights[nz & (j % N == 0)] = 0.0
    return weights


def grid_expectation(f: Member, N: int) -> StepFunction:
    """``E_N f``: the exact mean of f on each cell ``[k/N, (k+1)/N)``.

    Polynomial cell means come from closed-form integrals of the characters: the mean on
    cell k is ``sum_j c_j w_j e^{2 pi i j k / N}``, evaluated for all k by folding the
    frequencies mod N and one inverse DFT of length N.
    """
    _check_order(N)
    if isinstance(f, StepFunction):
        if f.pieces % N:
            raise PartitionError(N, f.pieces)
        return StepFunction(f.values.reshape(N, -1).mean(axis=1))
    weighted = f.coeffs * _cell_weights(f.coeffs.size, N)
    folded = np.zeros(N, dtype=np.complex128)
    np.add.at(folded, np.arange(f.coeffs.size) % N, weighted)
    return StepFunction(np.fft.ifft(folded) * N)


def apply_symbol(f: AnalyticPoly, mu: Symbol) -> AnalyticPoly:
    if mu.nmax < f.degree:
        raise HorizonError(mu.nmax, f.degree)
    return AnalyticPoly(f.coeffs * mu.as_array()[: f.coeffs.size])


def apply_symbol_2d(F: BivariatePoly, A: IdemSet2D) -> BivariatePoly:
    """The idempotent multiplier ``1_A`` on the bivariate spectrum."""
    mask = A.mask(F.coeffs.shape)
    return BivariatePoly(np.where(mask, F.coeffs, 0.0))


def abs_pointwise(f: Member, grid: QuadratureGrid | None = None) -> StepFunction:
    if isinstance(f, StepFunction) and grid is None:
        return abs(f)
    grid = default_grid([f], grid)
    return abs(sample(f, grid))


@dataclass(frozen=True, slots=True)
class OperatorTag:
    """Names an operator so every reported number is qualified by what produced it.

    ``abs_first`` composes with the pointwise absolute value first, as in ``E*_N |.|``.
    """

    kind: OperatorKind
    n: int = 1
    x0: float = 0.0
    symbol: Symbol | None = None
    abs_first: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DegenerateInputError(f"Operator order N must be positive, got {self.n}")
        if not 0.0 <= self.x0 < 1.0:
            raise GridError(f"Translation x0={self.x0} outside [0, 1)")
        if self.kind is OperatorKind.SYMBOL and self.symbol is None:
            raise DegenerateInputError("A symbol operator needs its symbol")

    @property
    def label(self) -> str:
        match self.kind:
            case OperatorKind.TRANSLATE:
                base = f"tau_{self.x0:g}"
            case OperatorKind.SHIFT_AVERAGE:
                base = f"E*_{self.n}"
            case OperatorKind.GRID_EXPECTATION:
                base = f"E_{self.n}"
            case OperatorKind.SYMBOL:
                assert self.symbol is not None
                base = f"T_mu[{self.symbol.nmax}]"
        return f"{base}|.|" if self.abs_first else base

    def apply(self, f: Member, grid: QuadratureGrid | None = None) -> Member:
        if self.abs_first:
            f = abs_pointwise(f, grid)
        match self.kind:
            case OperatorKind.TRANSLATE:
                return translate(f, self.x0)
            case OperatorKind.SHIFT_AVERAGE:
                return shift_average(f, self.n)
            case OperatorKind.GRID_EXPECTATION:
                return grid_expectation(f, self.n)
            case OperatorKind.SYMBOL:
                if not isinstance(f, AnalyticPoly):
                    raise DegenerateInputError("Symbols act on analytic polynomials only")
                assert self.symbol is not None
                return apply_symbol(f, self.symbol)


def lipschitz_cell_slack(f: AnalyticPoly, grid: QuadratureGrid) -> float:
    """Bound on |cell mean of |f| - Riemann sum| for cells of width 1/M (Bernstein)."""
    return math.pi * f.degree * sup_estimate(sample(f, grid).values) / grid.points
