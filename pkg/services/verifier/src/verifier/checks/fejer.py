"""The Fejer-kernel identity for derivatives and the empirical constant C_alpha."""

import logging
import math
from collections.abc import Sequence

import numpy as np

from harmonic.constants import C_ALPHA_SAFETY
from harmonic.poly import (
    ComplexArray,
    QuadratureGrid,
    convolve,
    derivative,
    fejer_kernel,
    mixed_l1l2_norm,
    random_analytic,
)
from harmonic.symbols import lacunary_check
from verifier.checks.families import PolyLayout, draw_or_search, extend_geometric, pairs, requires
from verifier.checks.registry import InstanceContext, InstanceResult, registry
from verifier.constants import DEGENERATE_DENOMINATOR, CheckKind, LemmaId, check_salt
from verifier.ratio_search import RatioProblem, ratio_search
from verifier.schemas import CheckConfig

logger = logging.getLogger(__name__)

# Budget of the quick estimate run when a check needs C_alpha and none is configured.
PREPARE_SAMPLES = 16
PREPARE_STARTS = 2
PREPARE_ITERATIONS = 20


@registry.register(
    lemma=LemmaId.FEJER_IDENTITY,
    description="f'/d = 2 pi i f * (K_d e^{2 pi i d t}) coefficientwise for f in H^1_d",
    kind=CheckKind.STRICT,
    defaults={"instances": 1000, "max_degree": 128, "family_size": 4},
)
def run_fejer_identity(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    rng = ctx.rng
    degrees = [int(d) for d in rng.integers(1, cfg.max_degree + 1, size=cfg.family_size)]
    family = [random_analytic(rng, d) for d in degrees]

    worst = 0.0
    scaled = []
    convolved = []
    for f, d in zip(family, degrees, strict=True):
        lhs = derivative(f) * (1.0 / d)
        rhs = convolve(f, fejer_kernel(d).shifted(d)) * (2j * math.pi)
        worst = max(worst, float(np.abs(lhs.coeffs - rhs.coeffs).max()) / max(1.0, float(np.abs(lhs.coeffs).max())))
        scaled.append(lhs)
        convolved.append(rhs)

    # |2 pi i g| = 2 pi |g| pointwise, so the mixed norms agree on a common grid
    grid = QuadratureGrid.for_degree(max(degrees))
    left = mixed_l1l2_norm(scaled, grid).value
    right = mixed_l1l2_norm(convolved, grid).value
    norm_error = abs(left - right) / max(1.0, left)

    return InstanceResult(
        lhs=worst,
        rhs=cfg.abs_tol,
        violation=worst > cfg.abs_tol or norm_error > cfg.abs_tol,
        witness={"degrees": degrees},
        extras={"norm_error": norm_error},
    )


def c_alpha_problem(d: Sequence[int], oversample: int) -> RatioProblem:
    """``||(f'_k/d_k)||_{L1(l2)} / ||(f_k)||_{L1(l2)}`` over ``f_k`` in H^1_{d_k}."""
    layout = PolyLayout(tuple(d))
    grid = QuadratureGrid.for_degree(max(d), oversample)

    def evaluate(x: ComplexArray) -> tuple[float, float]:
        family = layout.unpack(x)
        scaled = [derivative(f) * (1.0 / dk) for f, dk in zip(family, d, strict=True)]
        return mixed_l1l2_norm(scaled, grid).value, mixed_l1l2_norm(family, grid).value

    return RatioProblem(layout.dimension, evaluate, layout.sample)


def estimate_c_alpha_value(d: Sequence[int], seed: int, oversample: int = 8) -> float:
    """A quick empirical sup of the C_alpha ratio: random families plus one short search."""
    problem = c_alpha_problem(d, oversample)
    salt = check_salt(LemmaId.C_ALPHA)
    best = 0.0
    for i in range(PREPARE_SAMPLES):
        ratio = problem.ratio(problem.sample(np.random.default_rng([seed, salt, i])))
        best = max(best, ratio or 0.0)
    state = ratio_search(
        problem,
        np.random.default_rng([seed, salt, PREPARE_SAMPLES]),
        starts=PREPARE_STARTS,
        iterations=PREPARE_ITERATIONS,
    )
    return max(best, state.best_ratio)


def resolve_c_alpha(cfg: CheckConfig) -> CheckConfig:
    """Fill ``c_alpha_est`` with the safety factor times a quick estimate when it is not configured."""
    if cfg.c_alpha_est is not None or cfg.d is None:
        return cfg
    estimate = estimate_c_alpha_value(cfg.d, cfg.seed, cfg.grid_oversample)
    value = C_ALPHA_SAFETY * estimate
    logger.info("Estimated C_alpha=%.6g for d=%s; using C_alpha_est=%.6g", estimate, cfg.d, value)
    return cfg.model_copy(update={"c_alpha_est": value})


def c_alpha_ceiling(d: Sequence[int], ceiling: float) -> float:
    """``ceiling * (1 + alpha^-3)``, the sanity bound on the estimate."""
    alpha = lacunary_check(d).alpha
    return ceiling * (1.0 + (float(alpha) ** -3 if alpha is not None else 0.0))


@registry.register(
    lemma=LemmaId.C_ALPHA,
    description="Empirical C_alpha = sup ||(f'_k/d_k)|| / ||(f_k)|| in L1(l2)",
    kind=CheckKind.ESTIMATE,
    defaults={"instances": 200, "searches": 8, "d": [2, 4, 8, 16]},
    prepare=requires("d"),
)
def run_c_alpha(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    assert cfg.d is not None
    d = extend_geometric(cfg.d, len(cfg.d) * cfg.scale)
    problem = c_alpha_problem(d, cfg.grid_oversample)
    x = draw_or_search(problem, cfg, ctx)
    if x is None:
        return InstanceResult.degenerate(d=d)
    lhs, rhs = problem.evaluate(x)
    if rhs <= DEGENERATE_DENOMINATOR:
        return InstanceResult.degenerate(d=d)
    ratio = lhs / rhs
    return InstanceResult(
        lhs=lhs,
        rhs=rhs,
        violation=not math.isfinite(ratio) or ratio > c_alpha_ceiling(d, cfg.ceiling),
        witness={"d": d, "coefficients": pairs(x)},
        extras={"C_alpha_est": C_ALPHA_SAFETY * ratio},
    )
