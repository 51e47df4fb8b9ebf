"""Multi-start perturbation ascent for empirical lower bounds of norm ratios.

The search maximizes ``lhs(x)/rhs(x)`` over complex coefficient vectors.  Each start
draws a random point and then perturbs a random block of coordinates by a complex
Gaussian step proportional to the RMS size of the point; a perturbation is kept only
if the ratio increases, and the step halves after ``patience`` rejections in a row.
All randomness comes from the generator passed in, so the search is deterministic
per seed.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from harmonic.poly import ComplexArray
from verifier.constants import DEGENERATE_DENOMINATOR, INITIAL_STEP, MIN_STEP, STEP_PATIENCE
from verifier.exceptions import DegenerateSearchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class RatioProblem:
    """A norm-ratio objective over complex vectors of a fixed dimension."""

    dimension: int
    evaluate: Callable[[ComplexArray], tuple[float, float]]
    sample: Callable[[np.random.Generator], ComplexArray]

    def ratio(self, x: ComplexArray) -> float | None:
        """``lhs/rhs``, or None when the denominator vanishes."""
        lhs, rhs = self.evaluate(x)
        if rhs <= DEGENERATE_DENOMINATOR:
            return None
        return lhs / rhs


@dataclass(slots=True)
class RatioSearchState:
    """Search progress; ``history`` records the best ratio after every accepted step."""

    coefficients: ComplexArray
    ratio: float
    step: float
    best: ComplexArray
    best_ratio: float
    history: list[float] = field(default_factory=list)
    evaluations: int = 0
    degenerate_starts: int = 0

    def accept(self, x: ComplexArray, ratio: float) -> None:
        self.coefficients, self.ratio = x, ratio
        if ratio > self.best_ratio:
            self.best, self.best_ratio = x, ratio
        self.history.append(self.best_ratio)


def _perturb(rng: np.random.Generator, x: ComplexArray, step: float) -> ComplexArray:
    block = max(1, x.size // 8)
    idx = rng.choice(x.size, size=block, replace=False)
    scale = math.sqrt(float(np.mean(np.abs(x) ** 2))) or 1.0
    noise = rng.standard_normal(block) + 1j * rng.standard_normal(block)
    y = x.copy()
    y[idx] += step * scale * noise / math.sqrt(2.0)
    return y


def ratio_search(
    problem: RatioProblem,
    rng: np.random.Generator,
    *,
    starts: int,
    iterations: int,
    initial_step: float = INITIAL_STEP,
    min_step: float = MIN_STEP,
    patience: int = STEP_PATIENCE,
) -> RatioSearchState:
    """Best witness over ``starts`` random starts of ``iterations`` perturbations each."""
    state: RatioSearchState | None = None
    degenerate = 0
    evaluations = 0

    for start in range(starts):
        x = problem.sample(rng)
        evaluations += 1
        ratio = problem.ratio(x)
        if ratio is None:
            degenerate += 1
            continue
        if state is None:
            state = RatioSearchState(x, ratio, initial_step, x, ratio, [ratio])
        else:
            state.step = initial_step
            state.accept(x, ratio)

        rejections = 0
        for _ in range(iterations):
            if state.step < min_step:
                break
            candidate = _perturb(rng, state.coefficients, state.step)
            evaluations += 1
            value = problem.ratio(candidate)
            if value is not None and value > state.ratio:
                state.accept(candidate, value)
                rejections = 0
                continue
            rejections += 1
            if rejections >= patience:
                state.step /= 2.0
                rejections = 0

        logger.debug("Ratio search start %d finished at %.6g (best %.6g)", start, state.ratio, state.best_ratio)

    if state is None:
        raise DegenerateSearchError(starts)
    state.evaluations = evaluations
    state.degenerate_starts = degenerate
    return state
