"""The independent-sum norm ``||(f_k)||_ind`` and exact Rademacher averages.

``||(f_k)||_ind`` integrates ``sqrt(sum_k |f_k(w_k)|^2)`` over independent uniform
coordinates ``w_k``, one per member.  Members are step functions, so the integral is a
finite sum over product cells.  The exact evaluator enumerates the distribution of
``|f_k|^2`` member by member and merges equal partial sums, so the work is bounded by
the number of distinct values rather than by the full product of partitions.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from harmonic.constants import DEFAULT_ENUMERATION_BUDGET, MC_CHUNK_SIZE, RADEMACHER_CHUNK, RADEMACHER_MAX_MEMBERS
from harmonic.exceptions import DegenerateInputError, EnumerationBudgetError
from harmonic.poly import (
    FloatArray,
    Member,
    NormEstimate,
    QuadratureGrid,
    StepFunction,
    is_power_of_two,
    l1_norm,
    l2_norm,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class IndFamily:
    """The finitely many non-zero members of a family, each on its own power-of-two partition."""

    members: tuple[StepFunction, ...]

    def __post_init__(self) -> None:
        for f in self.members:
            if not is_power_of_two(f.pieces):
                raise DegenerateInputError(f"ind-norm members need power-of-two partitions, got P={f.pieces}")

    @classmethod
    def of(cls, members: Sequence[StepFunction]) -> "IndFamily":
        return cls(tuple(members))

    def __len__(self) -> int:
        return len(self.members)

    def split(self, at: int) -> tuple["IndFamily", "IndFamily"]:
        return IndFamily(self.members[:at]), IndFamily(self.members[at:])


@dataclass(frozen=True, slots=True)
class IndNormEstimate:
    """An ind-norm value; ``stderr`` is zero and ``samples`` is None when it was enumerated exactly."""

    value: float
    stderr: float = 0.0
    samples: int | None = None

    @property
    def exact(self) -> bool:
        return self.samples is None


def _square_distribution(f: StepFunction) -> tuple[FloatArray, FloatArray]:
    squares, counts = np.unique(np.abs(f.values) ** 2, return_counts=True)
    return squares, counts / f.pieces


def enumeration_cells(fam: IndFamily) -> int:
    """Product of the numbers of distinct ``|f_k|^2`` values, the size the exact evaluator walks."""
    return math.prod(int(np.unique(np.abs(f.values) ** 2).size) for f in fam.members)


def ind_norm_exact(fam: IndFamily, budget: int = DEFAULT_ENUMERATION_BUDGET) -> float:
    cells = enumeration_cells(fam)
    if cells > budget:
        raise EnumerationBudgetError(cells, budget)
    if not fam.members:
        return 0.0

    totals = np.zeros(1, dtype=np.float64)
    weights = np.ones(1, dtype=np.float64)
    for f in fam.members:
        squares, probs = _square_distribution(f)
        combined = (totals[:, None] + squares[None, :]).ravel()
        mass = (weights[:, None] * probs[None, :]).ravel()
        totals, inverse = np.unique(combined, return_inverse=True)
        weights = np.bincount(inverse.ravel(), weights=mass, minlength=totals.size)
    return math.fsum(weights * np.sqrt(totals))


def ind_norm_mc(
    fam: IndFamily,
    samples: int,
    seed: int,
    chunk_size: int = MC_CHUNK_SIZE,
) -> IndNormEstimate:
    """Plain Monte Carlo with its standard error.

    Chunk c draws from ``default_rng([seed, c])`` and chunk sums are combined with
    ``math.fsum``, so the estimate depends only on ``(seed, samples, chunk_size)``.
    """
    if samples < 2:
        raise DegenerateInputError(f"Monte Carlo needs at least 2 samples, got {samples}")
    first: list[float] = []
    second: list[float] = []
    for c, start in enumerate(range(0, samples, chunk_size)):
        n = min(chunk_size, samples - start)
        rng = np.random.default_rng([seed, c])
        squares = np.zeros(n, dtype=np.float64)
        for f in fam.members:
            cells = rng.integers(0, f.pieces, size=n)
            squares += np.abs(f.values[cells]) ** 2
        draws = np.sqrt(squares)
        first.append(float(draws.sum()))
        second.append(float((draws**2).sum()))
    mean = math.fsum(first) / samples
    variance = max(0.0, (math.fsum(second) - samples * mean * mean) / (samples - 1))
    return IndNormEstimate(mean, math.sqrt(variance / samples), samples)


def ind_norm(
    fam: IndFamily,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    samples: int = 200_000,
    seed: int = 0,
) -> IndNormEstimate:
    """Exact when the enumeration fits the budget, Monte Carlo otherwise."""
    cells = enumeration_cells(fam)
    if cells <= budget:
        return IndNormEstimate(ind_norm_exact(fam, budget))
    logger.info("ind-norm enumeration needs %d cells (budget %d); sampling %d points", cells, budget, samples)
    return ind_norm_mc(fam, samples, seed)


def rademacher_average_exact(
    family: Sequence[StepFunction],
    max_members: int = RADEMACHER_MAX_MEMBERS,
) -> float:
    """``2^-n sum_{eps in {+-1}^n} ||sum_k eps_k f_k||_1`` by full enumeration.

    Patterns and their negatives have equal norm, so only ``eps_1 = +1`` is walked.
    """
    n = len(family)
    if n == 0:
        return 0.0
    if n > max_members:
        raise EnumerationBudgetError(2**n, 2**max_members)
    pieces = math.lcm(*(f.pieces for f in family))
    matrix = np.stack([f.refine(pieces).values for f in family])

    patterns = 2 ** (n - 1)
    bits = np.arange(1, n)
    partial: list[float] = []
    for start in range(0, patterns, RADEMACHER_CHUNK):
        index = np.arange(start, min(start + RADEMACHER_CHUNK, patterns))
        signs = np.ones((index.size, n), dtype=np.float64)
        signs[:, 1:] = 1.0 - 2.0 * ((index[:, None] >> (bits - 1)) & 1)
        partial.append(float(np.abs(signs @ matrix).mean(axis=1).sum()))
    return math.fsum(partial) / patterns


def l1l1_norm(family: Sequence[Member], grid: QuadratureGrid | None = None) -> NormEstimate:
    """``||(f_k)||_{L^1(l^1)} = sum_k ||f_k||_1``."""
    parts = [l1_norm(f, grid) for f in family]
    return NormEstimate(math.fsum(p.value for p in parts), math.fsum(p.error for p in parts))


def l2l2_norm(family: Sequence[Member]) -> float:
    """``||(f_k)||_{L^2(l^2)} = (sum_k ||f_k||_2^2)^(1/2)``, exact."""
    return math.sqrt(math.fsum(l2_norm(f) ** 2 for f in family))
