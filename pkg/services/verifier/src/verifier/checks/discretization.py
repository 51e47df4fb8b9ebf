"""Discretization of mixed norms by grid expectations, and its induction on derivatives."""

import logging
import math
from collections.abc import Sequence

import numpy as np

from harmonic.operators import abs_pointwise, grid_expectation, lipschitz_cell_slack
from harmonic.poly import (
    AnalyticPoly,
    NormEstimate,
    QuadratureGrid,
    derivative,
    mixed_l1l2_norm,
    next_power_of_two,
    random_analytic,
)
from verifier.checks.families import chain, requires
from verifier.checks.fejer import resolve_c_alpha
from verifier.checks.registry import InstanceContext, InstanceResult, registry
from verifier.constants import DEGENERATE_DENOMINATOR, CheckKind, LemmaId
from verifier.schemas import CheckConfig

logger = logging.getLogger(__name__)


def discretization_sizes(d: Sequence[int], c_alpha: float, eps: float) -> list[int]:
    """``M_k = 2^ceil(log2(C d_k / eps))``, the coarsest dyadic partitions with ``d_k <= eps M_k / C``."""
    return [next_power_of_two(math.ceil(c_alpha * dk / eps)) for dk in d]


def _family(rng: np.random.Generator, d: Sequence[int], index: int) -> list[AnalyticPoly]:
    match index % 5:
        case 0:
            return [AnalyticPoly.constant(complex(rng.standard_normal(), rng.standard_normal())) for _ in d]
        case 1:
            return [AnalyticPoly.monomial(dk, complex(rng.standard_normal(), rng.standard_normal())) for dk in d]
        case _:
            return [random_analytic(rng, dk) for dk in d]


def expectation_of_modulus(family: Sequence[AnalyticPoly], sizes: Sequence[int], grid: QuadratureGrid) -> NormEstimate:
    """``||(E_{M_k}|f_k|)||_{L1(l2)}``; cell means of |f_k| by Riemann sums with the Lipschitz cell slack."""
    steps = [grid_expectation(abs_pointwise(f, grid), M) for f, M in zip(family, sizes, strict=True)]
    slack = math.sqrt(sum(lipschitz_cell_slack(f, grid) ** 2 for f in family))
    return NormEstimate(mixed_l1l2_norm(steps).value, slack)


def _expectation(family: Sequence[AnalyticPoly], sizes: Sequence[int]) -> float:
    return mixed_l1l2_norm([grid_expectation(f, M) for f, M in zip(family, sizes, strict=True)]).value


@registry.register(
    lemma=LemmaId.DISCRETIZATION,
    description="(1-eps)||(E_M|f_k|)|| <= ||(f_k)|| <= (1-eps)/(1-2eps) ||(E_M f_k)|| when d_k <= eps M_k / C_alpha",
    kind=CheckKind.STRICT,
    defaults={"instances": 1000, "d": [2, 4, 8, 16]},
    prepare=chain(requires("d"), resolve_c_alpha),
)
def run_discretization(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    assert cfg.d is not None and cfg.c_alpha_est is not None
    eps = cfg.eps[ctx.index % len(cfg.eps)]
    sizes = discretization_sizes(cfg.d, cfg.c_alpha_est, eps)
    failures = [f"d_k={dk} > eps M_k / C" for dk, M in zip(cfg.d, sizes, strict=True) if dk > eps * M / cfg.c_alpha_est]

    family = _family(ctx.rng, cfg.d, ctx.index)
    grid = QuadratureGrid.for_degree(max(cfg.d), cfg.grid_oversample, partitions=sizes)
    B = mixed_l1l2_norm(family, grid)
    if B.upper <= DEGENERATE_DENOMINATOR:
        return InstanceResult.degenerate(eps=eps)
    A = expectation_of_modulus(family, sizes, grid)
    C = _expectation(family, sizes)
    tol = cfg.abs_tol * max(1.0, B.value)

    left = (1.0 - eps) * A.lower
    if left > B.upper + tol:
        failures.append(f"(1-eps)||E_M|f||| = {left:.12g} > ||f|| = {B.upper:.12g}")
    right = (1.0 - eps) / (1.0 - 2.0 * eps) * C + tol
    if B.lower > right:
        failures.append(f"||f|| = {B.lower:.12g} > (1-eps)/(1-2eps)||E_M f|| = {right:.12g}")

    if failures:
        logger.warning("discretization instance %d: %s", ctx.index, "; ".join(failures))
    return InstanceResult(
        lhs=B.lower,
        rhs=right,
        violation=bool(failures),
        witness={"eps": eps, "M": sizes, "C_alpha_est": cfg.c_alpha_est, "failures": failures},
        extras={"left_ratio": left / B.upper},
    )


def scaled_derivatives(family: Sequence[AnalyticPoly], sizes: Sequence[int], rounds: int) -> list[list[AnalyticPoly]]:
    """``g_r = (f_k^{(r)} / M_k^r)_k`` for r = 0..rounds+1."""
    levels = [list(family)]
    for _ in range(rounds + 1):
        levels.append([derivative(g) * (1.0 / M) for g, M in zip(levels[-1], sizes, strict=True)])
    return levels


@registry.register(
    lemma=LemmaId.INDSTEP,
    description="||(E_M|g_r|)|| <= ||(g_r)|| + ||(E_M|g_{r+1}|)|| for g_r = f^(r)/M^r, and the geometric bound",
    kind=CheckKind.STRICT,
    defaults={"instances": 200, "d": [2, 4, 8, 16], "rounds": 4},
    prepare=chain(requires("d"), resolve_c_alpha),
)
def run_indstep(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    assert cfg.d is not None and cfg.c_alpha_est is not None
    eps = cfg.eps[ctx.index % len(cfg.eps)]
    sizes = discretization_sizes(cfg.d, cfg.c_alpha_est, eps)
    family = [random_analytic(ctx.rng, dk) for dk in cfg.d]
    grid = QuadratureGrid.for_degree(max(cfg.d), cfg.grid_oversample, partitions=sizes)

    levels = scaled_derivatives(family, sizes, cfg.rounds)
    L = [expectation_of_modulus(g, sizes, grid) for g in levels]
    norms = [mixed_l1l2_norm(g, grid) for g in levels]

    worst_gap = -math.inf
    worst: tuple[float, float] = (0.0, 0.0)
    failed: list[int] = []
    for r in range(1, cfg.rounds + 1):
        lhs = L[r].lower
        rhs = norms[r].upper + L[r + 1].upper + cfg.abs_tol * max(1.0, norms[0].value)
        if lhs - rhs > worst_gap:
            worst_gap, worst = lhs - rhs, (lhs, rhs)
        if lhs > rhs:
            failed.append(r)

    f_norm = norms[0].value
    if f_norm <= DEGENERATE_DENOMINATOR:
        return InstanceResult.degenerate(eps=eps)
    geometric = L[1].value / (eps / (1.0 - eps) * f_norm)
    return InstanceResult(
        lhs=worst[0],
        rhs=worst[1],
        violation=bool(failed),
        witness={"eps": eps, "M": sizes, "failed_rounds": failed},
        extras={"geometric_ratio": geometric},
    )
