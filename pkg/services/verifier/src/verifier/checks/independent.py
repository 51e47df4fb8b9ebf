"""Independent-sum bounds: sublinear operators on the dyadic filtration and shift-averages of analytic families."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from harmonic.exceptions import LacunarityError
from harmonic.indnorm import l1l1_norm, l2l2_norm
from harmonic.martingale import h1_delta_norm, martingale_difference, rademacher, random_atom
from harmonic.operators import OperatorKind, OperatorTag
from harmonic.poly import (
    ComplexArray,
    QuadratureGrid,
    StepFunction,
    l2_norm,
    mixed_l1l2_norm,
    sample,
)
from harmonic.symbols import lacunary_check, split_subsequences
from verifier.checks.families import (
    PolyLayout,
    StepLayout,
    as_step,
    chain,
    draw_or_search,
    draw_seed,
    extend_arithmetic,
    extend_geometric,
    ind_value,
    pairs,
    powers_of_two,
    requires,
    same_length,
)
from verifier.checks.registry import InstanceContext, InstanceResult, registry
from verifier.constants import DEGENERATE_DENOMINATOR, CheckKind, LemmaId
from verifier.exceptions import ConfigurationError
from verifier.ratio_search import RatioProblem
from verifier.schemas import CheckConfig

logger = logging.getLogger(__name__)

CHAIN_TOL = 1e-12


def modulus_operators(N: Sequence[int]) -> list[OperatorTag]:
    """``T_k = E*_{N_k} |.|`` for every k."""
    return [OperatorTag(OperatorKind.SHIFT_AVERAGE, n=n, abs_first=True) for n in N]


def shift_modulus(f: StepFunction, N: int) -> StepFunction:
    """``T f = E*_N |f|`` for a step function on a power-of-two partition."""
    (tag,) = modulus_operators([N])
    return as_step(tag.apply(f.refine(max(f.pieces, N))))


def hypothesis_c2(levels: Sequence[int], N: Sequence[int], s: int) -> float:
    """``max_{k > s} (1 + 2^{m_{k-s}+1} / N_k)^(1/2)``: the L2 constant of ``E*_{N_k}|.|`` on the far regime."""
    values = [math.sqrt(1.0 + 2.0 ** (levels[k - s] + 1) / N[k]) for k in range(s, len(levels))]
    return max(values, default=1.0)


@dataclass(slots=True)
class AtomChain:
    """Running record of the displayed inequalities for one atom; each entry is (name, lhs, rhs)."""

    tol: float
    steps: list[tuple[str, float, float]] = field(default_factory=list)

    def assert_le(self, name: str, lhs: float, rhs: float, slack: float = 0.0) -> None:
        self.steps.append((name, lhs - slack, rhs + self.tol))

    @property
    def failed(self) -> list[str]:
        return [name for name, lhs, rhs in self.steps if lhs > rhs]


def _atom_family(rng: np.random.Generator, levels: Sequence[int]) -> tuple[list[StepFunction], float, float, int]:
    """Random atom on the finest needed filtration; returns ``f_k = r_{m_k+1} Delta_{m_k+1} a``, ``|I|``, the H1 norm and ``||a||_2``."""
    depth = levels[-1] + 1
    atom = random_atom(rng, depth)
    a = atom.function
    family = []
    for m in levels:
        product = rademacher(m + 1, depth).values * martingale_difference(a, m + 1).values
        family.append(StepFunction(product.reshape(2**m, -1)[:, 0]))
    return family, atom.interval.length, h1_delta_norm(a), atom.interval.level


def atom_chain(
    rng: np.random.Generator,
    levels: Sequence[int],
    N: Sequence[int],
    s: int,
    cfg: CheckConfig,
    seed: int,
) -> AtomChain:
    """The localization, a-priori, near-regime, far-regime and total bounds for one random atom."""
    family, length, h1, level = _atom_family(rng, levels)
    scale = max(1.0, max(float(np.abs(f.values).max()) for f in family))
    chain_ = AtomChain(tol=CHAIN_TOL * scale)
    K = len(family)
    transformed = [shift_modulus(f, n) for f, n in zip(family, N, strict=True)]
    norms2 = [l2_norm(f) for f in family]

    # Localization: below the atom's level the differences vanish
    j = next((i for i, m in enumerate(levels) if m >= level), K)
    for k in range(j):
        chain_.assert_le(f"f_{k + 1} = 0 below the atom", float(np.abs(family[k].values).max()), 0.0)

    # A-priori bound through L1(l1)
    ind_all, slack_all = ind_value(transformed, cfg, seed)
    l1_t = l1l1_norm(transformed).value
    l1_f = l1l1_norm(family).value
    mixed = mixed_l1l2_norm(family).value
    chain_.assert_le("ind <= L1(l1)", ind_all, l1_t, slack_all)
    chain_.assert_le("L1(l1) of T f <= C1 L1(l1) of f", l1_t, l1_f)
    chain_.assert_le("L1(l1) <= K^1/2 L1(l2)", l1_f, math.sqrt(K) * mixed)
    chain_.assert_le("L1(l2) <= H1(delta)", mixed, h1)

    root = math.sqrt(length)
    near = range(j, min(j + s, K))
    far = range(min(j + s, K), K)

    # Near regime j <= k < j + s
    near_t = [transformed[k] for k in near]
    ind_near, slack_near = ind_value(near_t, cfg, seed + 1)
    sq_near = math.sqrt(math.fsum(norms2[k] ** 2 for k in near))
    l1_near = l1l1_norm(near_t).value
    chain_.assert_le("near: ind <= L1(l1)", ind_near, l1_near, slack_near)
    chain_.assert_le("near: L1(l1) <= C1 sum ||f_k||_1", l1_near, l1l1_norm([family[k] for k in near]).value)
    chain_.assert_le(
        "near: sum ||f_k||_1 <= |I|^1/2 sum ||f_k||_2", l1l1_norm([family[k] for k in near]).value, root * sum(norms2[k] for k in near)
    )
    chain_.assert_le("near: sum ||f_k||_2 <= s^1/2 (sum ||f_k||_2^2)^1/2", sum(norms2[k] for k in near), math.sqrt(s) * sq_near)

    # Far regime k >= j + s, one L2 bound per k
    far_t = [transformed[k] for k in far]
    ind_far, slack_far = ind_value(far_t, cfg, seed + 2)
    sq_far = math.sqrt(math.fsum(norms2[k] ** 2 for k in far))
    l2_far = l2l2_norm(far_t)
    chain_.assert_le("far: ind <= L2(l2)", ind_far, l2_far, slack_far)
    for k in far:
        chain_.assert_le(f"far: ||T_{k + 1} f||_2 <= (|I| + 2/N)^1/2 ||f||_2", l2_norm(transformed[k]), math.sqrt(length + 2.0 / N[k]) * norms2[k])
    c2 = hypothesis_c2(levels, N, s)
    enl2 = math.sqrt(math.fsum((length + 2.0 / N[k]) * norms2[k] ** 2 for k in far))
    chain_.assert_le("far: L2(l2) <= C2 |I|^1/2 (sum ||f_k||_2^2)^1/2", l2_far, enl2)
    chain_.assert_le("far: enl2 envelope", enl2, c2 * root * sq_far)

    # Total
    total = math.sqrt(s) * root * sq_near + c2 * root * sq_far
    chain_.assert_le("ind(all) <= ind(near) + ind(far)", ind_all, ind_near + ind_far, slack_all + slack_near + slack_far)
    chain_.assert_le("two regimes <= (C1 s^1/2 + C2)|I|^1/2 ||a||_2", total, (math.sqrt(s) + c2) * root * math.sqrt(sq_near**2 + sq_far**2))
    chain_.assert_le("(sum ||Delta a||_2^2)^1/2 <= |I|^-1/2", math.sqrt(sq_near**2 + sq_far**2), 1.0 / root)
    return chain_


def dyadic_problem(levels: Sequence[int], N: Sequence[int], s: int, cfg: CheckConfig, seed: int) -> RatioProblem:
    layout = StepLayout(tuple(2**m for m in levels))
    constant = math.sqrt(s) + hypothesis_c2(levels, N, s)

    def evaluate(x: ComplexArray) -> tuple[float, float]:
        family = layout.unpack(x)
        value, _ = ind_value([shift_modulus(f, n) for f, n in zip(family, N, strict=True)], cfg, seed)
        return value, constant * mixed_l1l2_norm(family).value

    return RatioProblem(layout.dimension, evaluate, layout.sample)


@registry.register(
    lemma=LemmaId.DYADICRBDD,
    description="||(E*_{N_k}|f_k|)||_ind <= C (s^1/2 + C2) ||(f_k)||_{L1(l2)} for F_{m_k}-measurable f_k",
    kind=CheckKind.ESTIMATE,
    defaults={"instances": 1000, "searches": 50, "levels": [1, 3, 5, 7], "N": [2, 8, 32, 128], "s": 1},
    prepare=chain(requires("levels", "N"), powers_of_two("N")),
)
def run_dyadicrbdd(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    assert cfg.levels is not None and cfg.N is not None
    size = len(cfg.levels) * cfg.scale
    levels = extend_arithmetic(cfg.levels, size)
    N = extend_geometric(cfg.N, size)
    seed = draw_seed(ctx.rng)

    failed: list[str] = []
    if not ctx.searched:
        failed = atom_chain(ctx.rng, levels, N, cfg.s, cfg, seed).failed
        if failed:
            logger.warning("dyadicrbdd instance %d: atom chain failed at %s", ctx.index, failed)

    problem = dyadic_problem(levels, N, cfg.s, cfg, seed)
    x = draw_or_search(problem, cfg, ctx)
    if x is None:
        return InstanceResult.degenerate(levels=levels, N=N)
    lhs, rhs = problem.evaluate(x)
    if rhs <= DEGENERATE_DENOMINATOR:
        return InstanceResult.degenerate(levels=levels, N=N)
    ratio = lhs / rhs
    return InstanceResult(
        lhs=lhs,
        rhs=rhs,
        violation=bool(failed) or not math.isfinite(ratio) or ratio > cfg.ceiling,
        witness={
            "levels": levels,
            "N": N,
            "s": cfg.s,
            "operators": [tag.label for tag in modulus_operators(N)],
            "failed_step": failed,
            "values": pairs(x),
        },
        extras={"C2": hypothesis_c2(levels, N, cfg.s)},
    )


# --- Shift-averages of analytic families ---


def beta_effective(d: Sequence[int], N: Sequence[int], s: int) -> float:
    """``max_k d_k / N_{k+s}`` over the indices where ``N_{k+s}`` exists."""
    return max((d[k] / N[k + s] for k in range(len(d) - s)), default=0.0)


def _check_beta(cfg: CheckConfig) -> CheckConfig:
    assert cfg.d is not None and cfg.N is not None
    if cfg.s >= len(cfg.d):
        raise ConfigurationError(f"s={cfg.s} leaves no pair d_k, N_(k+s) among {len(cfg.d)} terms")
    if beta_effective(cfg.d, cfg.N, cfg.s) > cfg.beta:
        raise ConfigurationError(f"d_k <= beta N_(k+s) fails for d={cfg.d}, N={cfg.N}, s={cfg.s}, beta={cfg.beta}")
    return cfg


def _shifted_moduli(family: Sequence[StepFunction], N: Sequence[int]) -> list[StepFunction]:
    return [as_step(tag.apply(f)) for f, tag in zip(family, modulus_operators(N), strict=True)]


def oldrev_problem(d: Sequence[int], N: Sequence[int], grid: QuadratureGrid, cfg: CheckConfig, seed: int) -> RatioProblem:
    layout = PolyLayout(tuple(d))

    def evaluate(x: ComplexArray) -> tuple[float, float]:
        family = [sample(f, grid) for f in layout.unpack(x)]
        value, _ = ind_value(_shifted_moduli(family, N), cfg, seed)
        return value, mixed_l1l2_norm(family).value

    return RatioProblem(layout.dimension, evaluate, layout.sample)


def reduction_failures(x: ComplexArray, d: Sequence[int], N: Sequence[int], grid: QuadratureGrid, cfg: CheckConfig, seed: int) -> list[str]:
    """For alpha <= 1: the stride-q split and the chain ``||(f_k)|| >= q^-1/2 sum_r ||(f_{r+kq})||``, ``sum_r ind_r >= ind``."""
    system = lacunary_check(d)
    assert system.alpha is not None
    q = math.ceil(1 / system.alpha) + 1
    failures = []
    try:
        split_subsequences(system, q)
    except LacunarityError as exc:
        failures.append(str(exc))

    family = [sample(f, grid) for f in PolyLayout(tuple(d)).unpack(x)]
    moduli = _shifted_moduli(family, N)
    whole = mixed_l1l2_norm(family).value
    parts = sum(mixed_l1l2_norm(family[r::q]).value for r in range(q))
    tol = CHAIN_TOL * max(1.0, whole)
    if whole < parts / math.sqrt(q) - tol:
        failures.append(f"||(f_k)|| = {whole:.12g} < q^-1/2 sum_r ||(f_r+kq)|| = {parts / math.sqrt(q):.12g}")

    ind_all, slack = ind_value(moduli, cfg, seed)
    ind_parts = 0.0
    for r in range(q):
        value, part_slack = ind_value(moduli[r::q], cfg, seed + r + 1)
        ind_parts += value
        slack += part_slack
    if ind_parts < ind_all - slack - tol:
        failures.append(f"sum_r ind_r = {ind_parts:.12g} < ind = {ind_all:.12g}")
    return failures


@registry.register(
    lemma=LemmaId.OLDREV,
    description="||(E*_{N_k}|f_k|)||_ind <= C ||(f_k)||_{L1(l2)} for f_k in H^1_{d_k} with d_k <= beta N_{k+s}",
    kind=CheckKind.ESTIMATE,
    defaults={"instances": 1000, "searches": 50, "d": [4, 6, 9, 14], "N": [2, 4, 8, 16], "s": 0, "beta": 2.0, "mc_samples": 20_000},
    prepare=chain(requires("d", "N"), powers_of_two("N"), same_length("d", "N"), _check_beta),
)
def run_oldrev(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    assert cfg.d is not None and cfg.N is not None
    size = len(cfg.d) * cfg.scale
    d = extend_geometric(cfg.d, size)
    N = extend_geometric(cfg.N, size)
    grid = QuadratureGrid.for_degree(max(d), cfg.grid_oversample, partitions=N)
    seed = draw_seed(ctx.rng)

    problem = oldrev_problem(d, N, grid, cfg, seed)
    x = draw_or_search(problem, cfg, ctx)
    if x is None:
        return InstanceResult.degenerate(d=d, N=N)
    lhs, rhs = problem.evaluate(x)
    if rhs <= DEGENERATE_DENOMINATOR:
        return InstanceResult.degenerate(d=d, N=N)

    failures: list[str] = []
    alpha = lacunary_check(d).alpha
    if alpha is not None and alpha <= 1 and not ctx.searched:
        failures = reduction_failures(x, d, N, grid, cfg, seed)
        if failures:
            logger.warning("oldrev instance %d: %s", ctx.index, "; ".join(failures))
    ratio = lhs / rhs
    return InstanceResult(
        lhs=lhs,
        rhs=rhs,
        violation=bool(failures) or not math.isfinite(ratio) or ratio > cfg.ceiling,
        witness={
            "d": d,
            "N": N,
            "s": cfg.s,
            "operators": [tag.label for tag in modulus_operators(N)],
            "failures": failures,
            "coefficients": pairs(x),
        },
        extras={"beta_eff": beta_effective(d, N, cfg.s)},
    )
