"""Checks on the shift-average E*_N and the grid expectation E_N."""

import logging
import math

import numpy as np

from harmonic.constants import MIN_OVERSAMPLE
from harmonic.operators import grid_expectation, shift_average, shift_average_sampled, translate
from harmonic.poly import (
    AnalyticPoly,
    ComplexArray,
    FloatArray,
    QuadratureGrid,
    StepFunction,
    derivative,
    evaluate,
    l2_norm,
    random_analytic,
    sample,
    sup_estimate,
)
from verifier.checks.families import as_step, pairs
from verifier.checks.registry import InstanceContext, InstanceResult, registry
from verifier.constants import CheckKind, LemmaId
from verifier.schemas import CheckConfig

logger = logging.getLogger(__name__)

# Quadrature points per E_N cell for the right side of the pointwise estimate.
CELL_QUADRATURE = 64


def _random_values(rng: np.random.Generator, n: int) -> ComplexArray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


@registry.register(
    lemma=LemmaId.ENL2,
    description="||E*_N f||_2 <= (|I| + 2/N)^(1/2) ||f||_2 for f supported on an interval I",
    kind=CheckKind.STRICT,
    defaults={"instances": 10_000, "n_max": 256},
)
def run_enl2(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    rng = ctx.rng
    N = int(rng.integers(1, cfg.n_max + 1))
    P = N * int(rng.integers(1, 9))
    a = int(rng.integers(0, P))
    b = int(rng.integers(a + 1, P + 1))
    values = np.zeros(P, dtype=np.complex128)
    values[a:b] = _random_values(rng, b - a)
    f = StepFunction(values)

    lhs = l2_norm(shift_average(f, N))
    rhs = math.sqrt((b - a) / P + 2.0 / N) * l2_norm(f)

    # one cell of the N-partition: the N translates have disjoint supports
    width = P // N
    cell = int(rng.integers(0, N))
    lo = int(rng.integers(0, width))
    hi = int(rng.integers(lo + 1, width + 1))
    g_values = np.zeros(P, dtype=np.complex128)
    g_values[cell * width + lo : cell * width + hi] = _random_values(rng, hi - lo)
    g = StepFunction(g_values)
    expected = l2_norm(g) ** 2 / N
    equality_error = abs(l2_norm(shift_average(g, N)) ** 2 - expected) / expected

    violation = lhs > rhs * (1.0 + cfg.abs_tol) or equality_error > cfg.abs_tol
    return InstanceResult(
        lhs=lhs,
        rhs=rhs,
        violation=violation,
        witness={"N": N, "pieces": P, "interval": [a, b], "values": pairs(values[a:b])},
        extras={"equality_error": equality_error},
    )


def pointwise_deviation(f: AnalyticPoly, N: int, grid_points: int) -> tuple[FloatArray, FloatArray]:
    """``|(id - E_N) f|`` at the grid nodes and ``(1/N) E_N|f'|`` plus its quadrature slack."""
    grid = QuadratureGrid(grid_points, f.degree)
    values = sample(f, grid).values
    means = grid_expectation(f, N).values
    cell = (np.arange(grid_points) * N) // grid_points
    lhs = np.abs(values - means[cell])

    points = N * CELL_QUADRATURE
    fp = derivative(f)
    fp_values = np.abs(np.asarray(evaluate(fp, np.arange(points) / points)))
    cell_means = fp_values.reshape(N, CELL_QUADRATURE).mean(axis=1)
    # |f'| is Lipschitz with constant 2 pi deg(f') ||f'||_inf; left endpoints lose half a step
    slack = math.pi * fp.degree * sup_estimate(fp_values) / points
    rhs = (cell_means[cell] + slack) / N
    return lhs, rhs


@registry.register(
    lemma=LemmaId.SCHODKAPR,
    description="|(id - E_N) f| <= (1/N) E_N|f'| pointwise for analytic polynomials",
    kind=CheckKind.STRICT,
    defaults={"instances": 200, "max_degree": 32, "n_max": 256, "grid_points": 2**14},
)
def run_schodkapr(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    rng = ctx.rng
    degree = int(rng.integers(0, cfg.max_degree + 1))
    N = int(rng.integers(4, max(4, cfg.n_max) + 1))
    f = random_analytic(rng, degree)

    lhs, rhs = pointwise_deviation(f, N, cfg.grid_points)
    tol = cfg.abs_tol * max(1.0, float(np.abs(f.coeffs).sum()))
    bound = rhs + tol
    worst = int(np.argmax(lhs - bound))
    return InstanceResult(
        lhs=float(lhs[worst]),
        rhs=float(bound[worst]),
        violation=bool(lhs[worst] > bound[worst]),
        witness={"N": N, "node": worst, "coefficients": pairs(f.coeffs)},
    )


@registry.register(
    lemma=LemmaId.SHIFT_AVERAGE,
    description="E*_N is the multiplier 1_{N | n} in coefficient, sample and step representations",
    kind=CheckKind.STRICT,
    defaults={"instances": 257, "max_degree": 256, "n_max": 64},
)
def run_shift_average(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    n = ctx.index % (cfg.max_degree + 1)
    character = AnalyticPoly.monomial(n)
    grid = QuadratureGrid.for_degree(n, MIN_OVERSAMPLE)
    nodes_value = sample(character, grid).values
    worst = 0.0
    worst_N = 1
    for N in range(1, cfg.n_max + 1):
        keep = 1.0 if n % N == 0 else 0.0
        coefficient_error = abs(complex(shift_average(character, N).coeffs[n]) - keep)
        sampled = shift_average_sampled(character, N, grid).values
        sample_error = float(np.abs(sampled - keep * nodes_value).max())

        # step functions: E*_N against the mean of the N translates by j/N
        step = StepFunction(_random_values(ctx.rng, 2 * N))
        translates = np.mean([as_step(translate(step, j / N)).values for j in range(N)], axis=0)
        step_error = float(np.abs(as_step(shift_average(step, N)).values - translates).max())

        error = max(coefficient_error, sample_error, step_error)
        if error > worst:
            worst, worst_N = error, N

    return InstanceResult(
        lhs=worst,
        rhs=cfg.abs_tol,
        violation=worst > cfg.abs_tol,
        witness={"n": n, "N": worst_N},
    )
