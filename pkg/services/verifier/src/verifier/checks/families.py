"""Family layouts, size scaling and evaluation helpers shared by the checks."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from harmonic.indnorm import IndFamily, ind_norm
from harmonic.poly import AnalyticPoly, ComplexArray, Member, StepFunction, is_power_of_two
from verifier.checks.registry import InstanceContext, PrepareHook
from verifier.constants import MC_SIGMAS
from verifier.exceptions import ConfigurationError, DegenerateSearchError
from verifier.ratio_search import RatioProblem, ratio_search
from verifier.schemas import CheckConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class PolyLayout:
    """Packs a family of analytic polynomials with spectra ``[low_k, high_k]`` into one vector."""

    highs: tuple[int, ...]
    lows: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.lows:
            object.__setattr__(self, "lows", (0,) * len(self.highs))
        if len(self.lows) != len(self.highs) or any(lo > hi for lo, hi in zip(self.lows, self.highs, strict=True)):
            raise ValueError(f"Invalid spectra {self.lows} .. {self.highs}")

    @property
    def sizes(self) -> list[int]:
        return [hi - lo + 1 for lo, hi in zip(self.lows, self.highs, strict=True)]

    @property
    def dimension(self) -> int:
        return sum(self.sizes)

    def unpack(self, x: ComplexArray) -> list[AnalyticPoly]:
        members = []
        start = 0
        for lo, hi, size in zip(self.lows, self.highs, self.sizes, strict=True):
            coeffs = np.zeros(hi + 1, dtype=np.complex128)
            coeffs[lo:] = x[start : start + size]
            members.append(AnalyticPoly(coeffs))
            start += size
        return members

    def sample(self, rng: np.random.Generator) -> ComplexArray:
        n = self.dimension
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)


@dataclass(frozen=True, slots=True)
class StepLayout:
    """Packs step functions on ``pieces[k]`` cells into one vector."""

    pieces: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return sum(self.pieces)

    def unpack(self, x: ComplexArray) -> list[StepFunction]:
        bounds = np.cumsum((0, *self.pieces))
        return [StepFunction(x[a:b]) for a, b in zip(bounds[:-1], bounds[1:], strict=True)]

    def sample(self, rng: np.random.Generator) -> ComplexArray:
        n = self.dimension
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def extend_geometric(seq: Sequence[int], length: int) -> list[int]:
    """Continue ``seq`` to ``length`` terms with its last ratio, rounding up."""
    out = [int(v) for v in seq]
    ratio = Fraction(out[-1], out[-2]) if len(out) >= 2 else Fraction(2)
    while len(out) < length:
        out.append(math.ceil(ratio * out[-1]))
    return out


def extend_arithmetic(seq: Sequence[int], length: int) -> list[int]:
    """Continue ``seq`` to ``length`` terms with its last difference."""
    out = [int(v) for v in seq]
    step = out[-1] - out[-2] if len(out) >= 2 else 1
    while len(out) < length:
        out.append(out[-1] + step)
    return out


def search_budget(cfg: CheckConfig) -> int:
    return cfg.search_iterations * cfg.scale


def draw_or_search(problem: RatioProblem, cfg: CheckConfig, ctx: InstanceContext) -> ComplexArray | None:
    """A random point for plain instances, the best search witness for searched ones (None if degenerate)."""
    if not ctx.searched:
        return problem.sample(ctx.rng)
    try:
        state = ratio_search(problem, ctx.rng, starts=cfg.search_starts, iterations=search_budget(cfg))
    except DegenerateSearchError:
        logger.debug("%s instance %d: every search start was degenerate", cfg.lemma, ctx.index)
        return None
    return state.best


def ind_value(members: Sequence[StepFunction], cfg: CheckConfig, seed: int) -> tuple[float, float]:
    """The ind-norm and the slack a comparison must allow (zero when enumerated exactly)."""
    estimate = ind_norm(IndFamily.of(members), budget=cfg.enumeration_budget, samples=cfg.mc_samples, seed=seed)
    return estimate.value, MC_SIGMAS * estimate.stderr


def as_step(f: Member) -> StepFunction:
    assert isinstance(f, StepFunction)
    return f


def draw_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))


def pairs(x: ComplexArray) -> list[list[float]]:
    """Complex values as ``[re, im]`` pairs for witnesses."""
    return [[float(v.real), float(v.imag)] for v in np.asarray(x, dtype=np.complex128).ravel()]


def requires(*names: str) -> PrepareHook:
    """Prepare hook rejecting configurations where a needed sequence parameter is unset."""

    def hook(cfg: CheckConfig) -> CheckConfig:
        missing = [name for name in names if getattr(cfg, name) is None]
        if missing:
            raise ConfigurationError(f"Check {cfg.lemma} needs {', '.join(missing)}")
        return cfg

    return hook


def chain(*hooks: PrepareHook) -> PrepareHook:
    def hook(cfg: CheckConfig) -> CheckConfig:
        for h in hooks:
            cfg = h(cfg)
        return cfg

    return hook


def powers_of_two(name: str) -> PrepareHook:
    """Prepare hook requiring every entry of a sequence parameter to be a power of two."""

    def hook(cfg: CheckConfig) -> CheckConfig:
        values = getattr(cfg, name) or []
        bad = [v for v in values if not is_power_of_two(v)]
        if bad:
            raise ConfigurationError(f"Check {cfg.lemma} needs power-of-two {name}, got {bad}")
        return cfg

    return hook


def same_length(first: str, second: str) -> PrepareHook:
    """Prepare hook requiring two sequence parameters to pair up term by term."""

    def hook(cfg: CheckConfig) -> CheckConfig:
        a, b = getattr(cfg, first) or [], getattr(cfg, second) or []
        if len(a) != len(b):
            raise ConfigurationError(f"{second} has {len(b)} entries but {first} has {len(a)}")
        return cfg

    return hook
