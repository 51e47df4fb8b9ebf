"""Dyadic martingales on [0, 1]: filtration, differences, square function and (1,2)-atoms.

A :class:`DyadicFunction` of depth L holds the 2^L values of an F_L-measurable function.
Level means are computed by pairwise averaging from the finest level up, so every
coarser mean is the same floating point number whichever level asks for it, and the
difference ``Delta_k`` is stored as the symmetric half-difference ``(a - b)/2`` of the
two children.  In particular ``|Delta_k f|`` is F_{k-1}-measurable, which makes the
running square function predictable and the stopping times below exact.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import pairwise

import numpy as np
import numpy.typing as npt

from harmonic.constants import ATOM_TOL
from harmonic.exceptions import AtomError, DegenerateInputError, LevelError, MeasurabilityError
from harmonic.poly import ComplexArray, FloatArray, StepFunction, frozen_array, is_power_of_two

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, eq=False)
class DyadicFunction:
    """An F_L-measurable function given by its ``2^L`` cell values."""

    values: ComplexArray

    def __post_init__(self) -> None:
        values = frozen_array(self.values, 1)
        if not is_power_of_two(values.size):
            raise DegenerateInputError(f"A dyadic function needs 2^L values, got {values.size}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, values: npt.ArrayLike) -> "DyadicFunction":
        return cls(np.asarray(values, dtype=np.complex128))

    @classmethod
    def from_step(cls, f: StepFunction) -> "DyadicFunction":
        return cls(f.values)

    @classmethod
    def constant(cls, c: complex, depth: int = 0) -> "DyadicFunction":
        return cls(np.full(2**depth, c, dtype=np.complex128))

    @property
    def depth(self) -> int:
        return int(self.values.size).bit_length() - 1

    @property
    def step(self) -> StepFunction:
        return StepFunction(self.values)

    @property
    def mean(self) -> complex:
        return complex(level_means(self)[0][0])

    def refine(self, depth: int) -> "DyadicFunction":
        if depth < self.depth:
            raise LevelError(f"Cannot refine depth {self.depth} to the coarser depth {depth}")
        return DyadicFunction(np.repeat(self.values, 2 ** (depth - self.depth)))

    def __add__(self, other: "DyadicFunction") -> "DyadicFunction":
        depth = max(self.depth, other.depth)
        return DyadicFunction(self.refine(depth).values + other.refine(depth).values)

    def __mul__(self, scalar: complex) -> "DyadicFunction":
        return DyadicFunction(self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, slots=True)
class DyadicInterval:
    """``[i 2^-m, (i+1) 2^-m)``."""

    level: int
    index: int

    def __post_init__(self) -> None:
        if self.level < 0 or not 0 <= self.index < 2**self.level:
            raise LevelError(f"No dyadic interval with level={self.level}, index={self.index}")

    @property
    def length(self) -> float:
        return 2.0**-self.level

    def cells(self, depth: int) -> slice:
        """The cell range of the interval on the depth-L partition."""
        if depth < self.level:
            raise LevelError(f"Interval of level {self.level} is finer than depth {depth}")
        width = 2 ** (depth - self.level)
        return slice(self.index * width, (self.index + 1) * width)


@dataclass(frozen=True, slots=True)
class Atom:
    interval: DyadicInterval
    function: DyadicFunction

    def __post_init__(self) -> None:
        problem = _atom_violation(self.function, self.interval)
        if problem is not None:
            raise AtomError(problem)


@dataclass(frozen=True, slots=True)
class AtomicDecomposition:
    """``f = residual_mean + sum_k c_k a_k`` with real ``c_k >= 0``."""

    coefficients: tuple[float, ...]
    atoms: tuple[Atom, ...]
    residual_mean: complex
    depth: int

    @property
    def coefficient_sum(self) -> float:
        return math.fsum(self.coefficients)

    def __len__(self) -> int:
        return len(self.atoms)


# --- Filtration ---


def level_means(f: DyadicFunction) -> list[ComplexArray]:
    """``means[n]`` holds the 2^n cell means of f at level n, for n = 0..L."""
    means = [f.values]
    for _ in range(f.depth):
        finer = means[-1]
        means.append((finer[0::2] + finer[1::2]) / 2.0)
    means.reverse()
    return means


def _check_level(f: DyadicFunction, n: int, *, low: int = 0) -> None:
    if not low <= n <= f.depth:
        raise LevelError(f"Level {n} outside {low}..{f.depth}")


def dyadic_expectation(f: DyadicFunction, n: int) -> DyadicFunction:
    """``E_n f``: block means over the dyadic intervals of length ``2^-n``."""
    _check_level(f, n)
    return DyadicFunction(np.repeat(level_means(f)[n], 2 ** (f.depth - n)))


def _difference_values(means: list[ComplexArray], k: int, depth: int) -> ComplexArray:
    finer = means[k]
    half = (finer[0::2] - finer[1::2]) / 2.0
    return np.repeat(np.column_stack([half, -half]).ravel(), 2 ** (depth - k))


def martingale_difference(f: DyadicFunction, k: int) -> DyadicFunction:
    """``Delta_k f = E_k f - E_{k-1} f`` for 1 <= k <= L."""
    _check_level(f, k, low=1)
    return DyadicFunction(_difference_values(level_means(f), k, f.depth))


def _differences(f: DyadicFunction) -> list[ComplexArray]:
    means = level_means(f)
    return [_difference_values(means, k, f.depth) for k in range(1, f.depth + 1)]


def _running_square(diffs: Sequence[ComplexArray], size: int) -> FloatArray:
    """Row n is ``S_n = (sum_{k<=n} |Delta_k|^2)^(1/2)`` for n = 0..L."""
    squares = np.zeros((len(diffs) + 1, size), dtype=np.float64)
    for k, diff in enumerate(diffs, start=1):
        squares[k] = squares[k - 1] + np.abs(diff) ** 2
    return np.sqrt(squares)


def square_function(f: DyadicFunction) -> DyadicFunction:
    return DyadicFunction(_running_square(_differences(f), f.values.size)[-1])


def h1_delta_norm(f: DyadicFunction) -> float:
    """``||S f||_1``; the mean of f is not part of the norm."""
    return float(np.mean(np.abs(square_function(f).values)))


# --- Rademacher embedding ---


def rademacher(level: int, depth: int) -> DyadicFunction:
    """``r_j``: +1 on the left half and -1 on the right half of every F_{j-1} cell."""
    if not 1 <= level <= depth:
        raise LevelError(f"Rademacher level {level} outside 1..{depth}")
    pattern = np.tile(np.array([1.0, -1.0]), 2 ** (level - 1))
    return DyadicFunction(np.repeat(pattern, 2 ** (depth - level)))


def _coarse_values(f: DyadicFunction, level: int) -> ComplexArray:
    """The 2^level values of an F_level-measurable f, checked cell by cell."""
    if level > f.depth:
        return f.refine(level).values
    blocks = f.values.reshape(2**level, -1)
    scale = max(1.0, float(np.abs(blocks).max()))
    if np.any(np.abs(blocks - blocks[:, :1]) > ATOM_TOL * scale):
        raise MeasurabilityError(f"Function of depth {f.depth} is not constant on the level-{level} cells")
    return blocks[:, 0].copy()


def rademacher_embed(
    family: Sequence[DyadicFunction],
    m: Sequence[int],
    depth: int | None = None,
) -> DyadicFunction:
    """``sum_k r_{m_k + 1} f_k`` for F_{m_k}-measurable ``f_k`` and strictly increasing ``m``."""
    if len(family) != len(m):
        raise DegenerateInputError(f"Family of {len(family)} members needs as many levels, got {len(m)}")
    if any(level < 0 for level in m) or any(b <= a for a, b in pairwise(m)):
        raise LevelError(f"Levels {tuple(m)} must be non-negative and strictly increasing")
    top = (m[-1] + 1) if m else 0
    depth = top if depth is None else depth
    if depth < top:
        raise LevelError(f"Depth {depth} cannot hold r_{top}")

    out = np.zeros(2**depth, dtype=np.complex128)
    for f, level in zip(family, m, strict=True):
        coarse = np.repeat(_coarse_values(f, level), 2 ** (depth - level))
        out += rademacher(level + 1, depth).values * coarse
    return DyadicFunction(out)


# --- Atoms ---


def support_interval(f: DyadicFunction) -> DyadicInterval:
    """Smallest dyadic interval containing the support (``[0, 1)`` for the zero function)."""
    nz = np.flatnonzero(f.values)
    if nz.size == 0:
        return DyadicInterval(0, 0)
    lo, hi = int(nz[0]), int(nz[-1])
    level = f.depth - (lo ^ hi).bit_length()
    return DyadicInterval(level, lo >> (f.depth - level))


def _atom_violation(a: DyadicFunction, interval: DyadicInterval | None = None) -> str | None:
    scale = max(1.0, float(np.abs(a.values).max()))
    if abs(np.mean(a.values)) > ATOM_TOL * scale:
        return f"Mean {complex(np.mean(a.values)):.3e} is not zero"
    smallest = support_interval(a)
    if interval is None:
        interval = smallest
    elif interval.level > a.depth:
        return f"Interval level {interval.level} is finer than depth {a.depth}"
    else:
        outside = np.ones(a.values.size, dtype=bool)
        outside[interval.cells(a.depth)] = False
        if np.any(a.values[outside] != 0):
            return f"Support leaves the interval {interval}"
    norm = math.sqrt(float(np.mean(np.abs(a.values) ** 2)))
    bound = interval.length**-0.5
    if norm > bound * (1.0 + ATOM_TOL):
        return f"L2 norm {norm:.6g} exceeds |I|^(-1/2) = {bound:.6g}"
    return None


def is_atom(a: DyadicFunction, interval: DyadicInterval | None = None) -> bool:
    """Mean zero, support in a dyadic interval I (the smallest one if not given), ``||a||_2 <= |I|^(-1/2)``."""
    return _atom_violation(a, interval) is None


def _dyadic_exponent_floor(x: float) -> int:
    e = math.floor(math.log2(x))
    while 2.0**e > x:
        e -= 1
    while 2.0 ** (e + 1) <= x:
        e += 1
    return e


def atomic_decompose(f: DyadicFunction) -> AtomicDecomposition:
    """Stopping-time decomposition ``f - E f = sum_k c_k a_k``.

    For each threshold 2^j let ``tau_j`` be the first level n with ``S_{n+1} > 2^j`` (L if
    none).  The increments between consecutive stopping times, cut to the maximal cells of
    ``{tau_j = n}``, are mean zero on their cell; each becomes one atom normalized to
    ``||a||_2 = |I|^(-1/2)``.  The coefficients satisfy ``sum c_k <= C_DEC ||f||_{H^1(delta)}``.
    """
    depth, size = f.depth, f.values.size
    mean = f.mean
    diffs = _differences(f)
    running = _running_square(diffs, size)
    positive = running[running > 0]
    if positive.size == 0:
        return AtomicDecomposition((), (), mean, depth)

    # 2^j_low is below every non-zero S_n, 2^j_high is at least max S_L
    j_low = _dyadic_exponent_floor(float(positive.min())) - 1
    j_high = _dyadic_exponent_floor(float(running[-1].max()))
    if 2.0**j_high < running[-1].max():
        j_high += 1

    stacked = np.stack(diffs)
    levels = np.arange(1, depth + 1)[:, None]

    def stopping_time(j: int) -> npt.NDArray[np.int64]:
        exceeded = running[1:] > 2.0**j
        return np.where(exceeded.any(axis=0), exceeded.argmax(axis=0), depth)

    coefficients: list[float] = []
    atoms: list[Atom] = []
    tau_next = stopping_time(j_low)
    for j in range(j_low, j_high):
        tau, tau_next = tau_next, stopping_time(j + 1)
        active = (levels > tau) & (levels <= tau_next)
        h = (stacked * active).sum(axis=0)
        for n in range(depth):
            cells = (tau == n).reshape(2**n, -1).all(axis=1)
            for i in np.flatnonzero(cells):
                interval = DyadicInterval(n, int(i))
                piece = np.zeros(size, dtype=np.complex128)
                window = interval.cells(depth)
                piece[window] = h[window]
                norm = math.sqrt(float(np.mean(np.abs(piece) ** 2)))
                if norm == 0.0:
                    continue
                c = norm * math.sqrt(interval.length)
                coefficients.append(c)
                atoms.append(Atom(interval, DyadicFunction(piece / c)))

    logger.debug("Decomposed depth-%d function into %d atoms over levels %d..%d", depth, len(atoms), j_low, j_high)
    return AtomicDecomposition(tuple(coefficients), tuple(atoms), mean, depth)


def recombine(decomposition: AtomicDecomposition) -> DyadicFunction:
    """``residual_mean + sum_k c_k a_k`` evaluated pointwise."""
    out = np.full(2**decomposition.depth, decomposition.residual_mean, dtype=np.complex128)
    for c, atom in zip(decomposition.coefficients, decomposition.atoms, strict=True):
        out += c * atom.function.refine(decomposition.depth).values
    return DyadicFunction(out)


# --- Generators ---


def random_martingale(
    rng: np.random.Generator,
    depth: int,
    *,
    sparsity: float = 0.0,
    spread: float = 3.0,
) -> DyadicFunction:
    """Random F_depth-measurable function built level by level.

    Every cell splits into ``(v + h, v - h)`` with complex Gaussian ``h`` scaled by
    ``2^U``, U uniform on ``[-spread, spread]``; with probability ``sparsity`` a split is
    skipped, so the square function crosses many dyadic thresholds at different levels.
    """
    values = np.array([rng.standard_normal() + 1j * rng.standard_normal()], dtype=np.complex128)
    for _ in range(depth):
        n = values.size
        half = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * 2.0 ** rng.uniform(-spread, spread, n)
        if sparsity > 0.0:
            half *= rng.random(n) >= sparsity
        values = np.column_stack([values + half, values - half]).ravel()
    return DyadicFunction(values)


def random_atom(rng: np.random.Generator, depth: int, level: int | None = None) -> Atom:
    """Random mean-zero function on a random level-m interval with ``||a||_2`` in ``[|I|^-1/2 / 2, |I|^-1/2]``."""
    if depth < 1:
        raise LevelError("An atom needs depth >= 1")
    level = int(rng.integers(0, depth)) if level is None else level
    if not 0 <= level < depth:
        raise LevelError(f"Atom level {level} outside 0..{depth - 1}")
    interval = DyadicInterval(level, int(rng.integers(0, 2**level)))
    window = interval.cells(depth)
    width = window.stop - window.start
    local = rng.standard_normal(width) + 1j * rng.standard_normal(width)
    local -= local.mean()
    values = np.zeros(2**depth, dtype=np.complex128)
    values[window] = local
    norm = math.sqrt(float(np.mean(np.abs(values) ** 2)))
    target = interval.length**-0.5 * rng.uniform(0.5, 1.0)
    return Atom(interval, DyadicFunction(values * (target / norm)))
