"""The idempotent multiplier 1_A on the bidisc, with A built from diagonals ``n1 + n2 = d_k`` thinned by ``N_k | n1``."""

import logging
import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from harmonic.operators import apply_symbol_2d
from harmonic.poly import BivariatePoly, ComplexArray, grids_for_2d, l1_norm_2d
from harmonic.symbols import IdemSet2D
from verifier.checks.families import chain, draw_or_search, pairs, requires, same_length
from verifier.checks.registry import InstanceContext, InstanceResult, registry
from verifier.constants import DEGENERATE_DENOMINATOR, CheckKind, LemmaId
from verifier.ratio_search import RatioProblem
from verifier.schemas import CheckConfig

logger = logging.getLogger(__name__)

# Bivariate norms use this oversampling in each variable.
BIDISC_OVERSAMPLE = 4
BAND_WIDTH = 2


def diagonal_ratios(d: Sequence[int], N: Sequence[int]) -> tuple[float, float]:
    """``max_k d_k / N_{k+1}`` (bounded along the family) and ``d_n / N_n`` (growing)."""
    bounded = max((d[k] / N[k + 1] for k in range(len(d) - 1)), default=0.0)
    return bounded, d[-1] / N[-1]


def box_shape(A: IdemSet2D, degree: int) -> tuple[int, int]:
    """``n1 <= degree`` and ``n2`` up past the last diagonal, so every ``d_k`` meets the box."""
    return degree + 1, max(degree, A.d[-1] + BAND_WIDTH) + 1


def random_support(rng: np.random.Generator, A: IdemSet2D, degree: int) -> npt.NDArray[np.bool_]:
    """Random-density cells in the ``degree x degree`` corner plus bands around every diagonal of A."""
    shape = box_shape(A, degree)
    support = np.zeros(shape, dtype=bool)
    support[:, : degree + 1] = rng.random((shape[0], degree + 1)) < rng.uniform(0.05, 1.0)
    total = np.add.outer(np.arange(shape[0]), np.arange(shape[1]))
    for dk in A.d:
        support |= np.abs(total - dk) <= BAND_WIDTH
    return support


def bidisc_problem(A: IdemSet2D, support: npt.NDArray[np.bool_]) -> RatioProblem:
    shape = support.shape
    cells = int(support.sum())
    grids = grids_for_2d(BivariatePoly(np.zeros(shape, dtype=np.complex128)), BIDISC_OVERSAMPLE)

    def unpack(x: ComplexArray) -> BivariatePoly:
        coeffs = np.zeros(shape, dtype=np.complex128)
        coeffs[support] = x
        return BivariatePoly(coeffs)

    def evaluate(x: ComplexArray) -> tuple[float, float]:
        F = unpack(x)
        return l1_norm_2d(apply_symbol_2d(F, A), grids).value, l1_norm_2d(F, grids).value

    def draw(rng: np.random.Generator) -> ComplexArray:
        return rng.standard_normal(cells) + 1j * rng.standard_normal(cells)

    return RatioProblem(cells, evaluate, draw)


def exactness_failures(rng: np.random.Generator, A: IdemSet2D, degree: int) -> list[str]:
    """A monomial of A on each diagonal passes unchanged; a polynomial supported off A is annihilated."""
    shape = box_shape(A, degree)
    mask = A.mask(shape)
    total = np.add.outer(np.arange(shape[0]), np.arange(shape[1]))
    failures = []
    for dk in A.d:
        members = np.argwhere(mask & (total == dk))
        if not members.size:
            failures.append(f"no member of A on the diagonal {dk}")
            continue
        n1, n2 = members[int(rng.integers(0, len(members)))]
        coeffs = np.zeros(shape, dtype=np.complex128)
        coeffs[n1, n2] = 1.0
        if not np.array_equal(apply_symbol_2d(BivariatePoly(coeffs), A).coeffs, coeffs):
            failures.append(f"monomial ({n1}, {n2}) in A changed")
    off = np.where(mask, 0.0, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    if np.any(apply_symbol_2d(BivariatePoly(off), A).coeffs):
        failures.append("polynomial supported off A not annihilated")
    return failures


@registry.register(
    lemma=LemmaId.TWO_D,
    description="sup ||1_A F||_{L1(T^2)} / ||F||_{L1(T^2)} over bivariate polynomials of bounded degree",
    kind=CheckKind.ESTIMATE,
    defaults={
        "instances": 1000,
        "searches": 50,
        "search_iterations": 10,
        "d": [2, 32, 1536],
        "N": [2, 16, 512],
        "max_degree": 48,
    },
    prepare=chain(requires("d", "N"), same_length("d", "N")),
)
def run_2d(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    assert cfg.d is not None and cfg.N is not None
    A = IdemSet2D.of(cfg.d, cfg.N)
    degree = cfg.max_degree * cfg.scale
    failures = [] if ctx.searched else exactness_failures(ctx.rng, A, degree)

    problem = bidisc_problem(A, random_support(ctx.rng, A, degree))
    x = draw_or_search(problem, cfg, ctx)
    if x is None:
        return InstanceResult.degenerate(degree=degree)
    lhs, rhs = problem.evaluate(x)
    if rhs <= DEGENERATE_DENOMINATOR:
        return InstanceResult.degenerate(degree=degree)
    ratio = lhs / rhs
    if failures:
        logger.warning("2d instance %d: %s", ctx.index, "; ".join(failures))

    bounded, growing = diagonal_ratios(cfg.d, cfg.N)
    return InstanceResult(
        lhs=lhs,
        rhs=rhs,
        violation=bool(failures) or not math.isfinite(ratio) or ratio > cfg.ceiling,
        witness={"degree": degree, "failures": failures, "coefficients": pairs(x)},
        extras={"max_d_over_next_N": bounded, "d_over_N": growing},
    )
