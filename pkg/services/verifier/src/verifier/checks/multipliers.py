"""Block multipliers over a lacunary sequence: Stein constants, sign action and Khintchine bracketing."""

import functools
import logging
import math
from fractions import Fraction

import numpy as np

from harmonic.constants import RADEMACHER_MAX_MEMBERS
from harmonic.exceptions import LacunarityError
from harmonic.indnorm import rademacher_average_exact
from harmonic.operators import apply_symbol
from harmonic.poly import (
    AnalyticPoly,
    ComplexArray,
    QuadratureGrid,
    StepFunction,
    convolve,
    l1_norm,
    mixed_l1l2_norm,
    random_analytic,
    sample,
)
from harmonic.symbols import (
    LacunarySystem,
    Symbol,
    build_K_hat,
    build_mu_eps,
    lacunary_check,
    modulated_fejer,
    split_subsequences,
    stein_constant,
    stein_slope_bound,
)
from verifier.checks.families import chain, draw_or_search, extend_geometric, pairs, requires
from verifier.checks.registry import InstanceContext, InstanceResult, registry
from verifier.constants import DEGENERATE_DENOMINATOR, CheckKind, LemmaId
from verifier.exceptions import ConfigurationError
from verifier.ratio_search import RatioProblem
from verifier.schemas import CheckConfig

logger = logging.getLogger(__name__)

KHINTCHINE_LOW = 1.0 / math.sqrt(2.0)
BRACKET_TOL = 1e-9
BLOCK_TOL = 1e-10

# Random systems in the lacunary check stop before this term.
LACUNARY_CAP = 4096


@functools.lru_cache(maxsize=32)
def block_symbols(d: tuple[int, ...], signs: tuple[int, ...]) -> tuple[LacunarySystem, Symbol, Symbol]:
    system = lacunary_check(d)
    return system, build_mu_eps(system, signs), build_K_hat(system)


@functools.lru_cache(maxsize=32)
def _stein_constants(d: tuple[int, ...], signs: tuple[int, ...]) -> tuple[Fraction, Fraction, Fraction]:
    system, mu, k_hat = block_symbols(d, signs)
    return stein_slope_bound(system), stein_constant(mu), stein_constant(k_hat)


def cycled_signs(cfg: CheckConfig, length: int) -> list[int]:
    """Configured signs repeated to ``length``; alternating +1, -1 when none are set."""
    base = cfg.signs or [1, -1]
    return [base[i % len(base)] for i in range(length)]


def _block_poly(rng: np.random.Generator, lo: int, hi: int) -> AnalyticPoly:
    return random_analytic(rng, hi, low=lo)


def block_failures(rng: np.random.Generator, system: LacunarySystem, mu: Symbol, k_hat: Symbol, signs: list[int]) -> list[str]:
    """Sign action, involution and the Fejer form of K on one random block."""
    failures = []
    k = int(rng.integers(1, len(system) + 1))
    eps = signs[k - 1]
    lo, hi = system.block_support(k)
    g = _block_poly(rng, lo, hi)
    once = apply_symbol(g, mu)
    if not np.array_equal(once.coeffs, eps * g.coeffs):
        failures.append(f"S_eps g != eps_{k} g")
    if not np.array_equal(apply_symbol(once, mu).coeffs, g.coeffs):
        failures.append(f"S_eps S_eps g != g on block {k}")

    top = 3 * system.D[k - 1]
    h = _block_poly(rng, lo, top)
    error = float(np.abs(apply_symbol(h, k_hat).coeffs - convolve(h, modulated_fejer(system, k)).coeffs).max())
    if error > BLOCK_TOL * max(1.0, float(np.abs(h.coeffs).max())):
        failures.append(f"K g != g * modulated Fejer on block {k} (error {error:.3e})")
    return failures


def stein_problem(mu: Symbol, oversample: int) -> RatioProblem:
    grid = QuadratureGrid.for_degree(mu.nmax, oversample)

    def evaluate(x: ComplexArray) -> tuple[float, float]:
        f = AnalyticPoly(x)
        return l1_norm(apply_symbol(f, mu), grid).value, l1_norm(f, grid).value

    def draw(rng: np.random.Generator) -> ComplexArray:
        return random_analytic(rng, mu.nmax).coeffs.copy()

    return RatioProblem(mu.nmax + 1, evaluate, draw)


@registry.register(
    lemma=LemmaId.STEIN,
    description="Stein constants of mu_eps and K_hat, block sign action, and sup ||T_mu f||_1/||f||_1",
    kind=CheckKind.ESTIMATE,
    defaults={"instances": 200, "searches": 8, "d": [2, 4, 8]},
    prepare=requires("d"),
)
def run_stein(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    assert cfg.d is not None
    d = extend_geometric(cfg.d, len(cfg.d) * cfg.scale)
    signs = cycled_signs(cfg, len(d))
    system, mu, k_hat = block_symbols(tuple(d), tuple(signs))
    bound, c_mu, c_k = _stein_constants(tuple(d), tuple(signs))

    failures = []
    if c_mu > bound:
        failures.append(f"stein_constant(mu_eps)={c_mu} > {bound}")
    if c_k > bound:
        failures.append(f"stein_constant(K_hat)={c_k} > {bound}")
    if not ctx.searched:
        failures.extend(block_failures(ctx.rng, system, mu, k_hat, signs))

    problem = stein_problem(mu, cfg.grid_oversample)
    x = draw_or_search(problem, cfg, ctx)
    if x is None:
        return InstanceResult.degenerate(d=d)
    lhs, rhs = problem.evaluate(x)
    if rhs <= DEGENERATE_DENOMINATOR:
        return InstanceResult.degenerate(d=d)
    if lhs / rhs > cfg.ceiling * float(c_mu):
        failures.append(f"ratio {lhs / rhs:.6g} above ceiling {cfg.ceiling} x C={float(c_mu):.6g}")

    if failures:
        logger.warning("stein instance %d: %s", ctx.index, "; ".join(failures))
    return InstanceResult(
        lhs=lhs,
        rhs=rhs,
        violation=bool(failures),
        witness={"d": d, "signs": signs, "failures": failures, "coefficients": pairs(x)},
        extras={"stein_constant": float(c_mu), "slope_bound": float(bound)},
    )


def khintchine_quantities(blocks: list[StepFunction]) -> tuple[float, float, float]:
    """Exact Rademacher average, ``||(g_k)||_{L1(l2)}`` and ``||sum g_k||_1``."""
    average = rademacher_average_exact(blocks)
    square = mixed_l1l2_norm(blocks).value
    total = l1_norm(StepFunction(np.sum([b.values for b in blocks], axis=0))).value
    return average, square, total


def _khintchine_size(cfg: CheckConfig) -> CheckConfig:
    if cfg.d is not None and len(cfg.d) > RADEMACHER_MAX_MEMBERS:
        raise ConfigurationError(f"Exact Rademacher averages allow at most {RADEMACHER_MAX_MEMBERS} blocks")
    return cfg


@registry.register(
    lemma=LemmaId.KHINTCHINE,
    description="2^(-1/2) ||(g_k)||_{L1(l2)} <= E||sum eps_k g_k||_1 <= ||(g_k)||_{L1(l2)} for block families",
    kind=CheckKind.STRICT,
    defaults={"instances": 1000, "d": [2, 4, 8, 16, 32]},
    prepare=chain(requires("d"), _khintchine_size),
)
def run_khintchine(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    assert cfg.d is not None
    rng = ctx.rng
    system = lacunary_check(cfg.d)
    count = int(rng.integers(1, len(system) + 1))
    grid = QuadratureGrid.for_degree(system.horizon, cfg.grid_oversample)
    blocks = []
    for k in range(1, count + 1):
        lo, hi = system.block_support(k)
        blocks.append(sample(_block_poly(rng, lo, hi), grid))

    average, square, total = khintchine_quantities(blocks)
    if square <= DEGENERATE_DENOMINATOR:
        return InstanceResult.degenerate(count=count)
    ratio = average / square
    return InstanceResult(
        lhs=average,
        rhs=square,
        violation=ratio < KHINTCHINE_LOW - BRACKET_TOL or ratio > 1.0 + BRACKET_TOL,
        witness={"d": list(system.d[:count]), "grid": grid.points},
        extras={"sum_to_square": total / square, "square_to_sum": square / total if total > 0 else 0.0},
    )


# --- Lacunary bookkeeping on random systems ---


def random_lacunary(rng: np.random.Generator) -> tuple[list[int], Fraction]:
    """A random sequence with ``d_{k+1} >= (1 + alpha) d_k`` for a random quarter-integer alpha."""
    alpha = Fraction(int(rng.integers(1, 17)), 4)
    length = int(rng.integers(2, 9))
    d = [int(rng.integers(1, 9))]
    while len(d) < length:
        nxt = math.ceil((1 + alpha) * d[-1]) + int(rng.integers(0, 3))
        if nxt > LACUNARY_CAP:
            break
        d.append(nxt)
    return d, alpha


def max_slope(mu: Symbol) -> Fraction:
    """``max_n n |mu(n) - mu(n-1)|`` over the horizon."""
    return max(n * abs(mu.values[n] - mu.values[n - 1]) for n in range(1, mu.nmax + 1))


def subsequence_beta(d: list[int], N: list[int], s: int, q: int) -> Fraction | None:
    """Largest ``d'_i / N'_{i+s'}`` over the stride-q subsequences, with ``s' = ceil(s/q)``."""
    shift = -(-s // q)
    worst: Fraction | None = None
    for r in range(q):
        sub_d, sub_N = d[r::q], N[r::q]
        for i in range(len(sub_d) - shift):
            value = Fraction(sub_d[i], sub_N[i + shift])
            worst = value if worst is None else max(worst, value)
    return worst


@registry.register(
    lemma=LemmaId.LACUNARY,
    description="D_k <= (1+1/alpha) d_k, slope n|mu(n)-mu(n-1)| <= 3(1+1/alpha), and stride-q subsequences",
    kind=CheckKind.STRICT,
    defaults={"instances": 200},
)
def run_lacunary(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    rng = ctx.rng
    d, alpha = random_lacunary(rng)
    failures: list[str] = []
    try:
        system = lacunary_check(d)
    except LacunarityError as exc:
        return InstanceResult(violation=True, witness={"d": d, "failures": [str(exc)]})

    assert system.alpha is not None
    if system.alpha < alpha:
        failures.append(f"alpha {system.alpha} below the generating {alpha}")
    for dk, Dk in zip(system.d, system.D, strict=True):
        if Dk > (1 + 1 / system.alpha) * dk:
            failures.append(f"D_k={Dk} > (1+1/alpha) d_k")

    signs = [int(v) for v in rng.choice([-1, 1], size=len(d))]
    slope = max_slope(build_mu_eps(system, signs))
    bound = 3 * (1 + 1 / system.alpha)
    if slope > bound:
        failures.append(f"slope {slope} > {bound}")

    q = int(rng.integers(2, 5))
    try:
        split_subsequences(system, q)
    except LacunarityError as exc:
        failures.append(str(exc))

    beta = Fraction(int(rng.integers(1, 9)), 2)
    s = int(rng.integers(0, 3))
    N = [1 if j < s else math.ceil(Fraction(d[j - s]) / beta) for j in range(len(d))]
    beta_eff = subsequence_beta(d, N, s, q)
    beta_bound = max(beta, beta**q)
    if beta_eff is not None and beta_eff > beta_bound:
        failures.append(f"subsequence beta {beta_eff} > {beta_bound}")

    return InstanceResult(
        lhs=float(slope),
        rhs=float(bound),
        violation=bool(failures),
        witness={"d": d, "signs": signs, "q": q, "beta": str(beta), "s": s, "failures": failures},
        extras={"beta_ratio": float(beta_eff / beta_bound) if beta_eff is not None else 0.0},
    )
