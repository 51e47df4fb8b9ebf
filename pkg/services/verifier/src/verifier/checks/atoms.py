"""Atomic decompositions of dyadic martingales and the transfer of mixed norms to H1(delta)."""

import logging
import math

import numpy as np

from harmonic.constants import C_DEC
from harmonic.martingale import (
    DyadicFunction,
    atomic_decompose,
    h1_delta_norm,
    is_atom,
    martingale_difference,
    rademacher,
    rademacher_embed,
    random_martingale,
    recombine,
)
from harmonic.operators import shift_average
from harmonic.poly import StepFunction, mixed_l1l2_norm
from verifier.checks.families import as_step
from verifier.checks.registry import InstanceContext, InstanceResult, registry
from verifier.constants import DEGENERATE_DENOMINATOR, CheckKind, LemmaId
from verifier.schemas import CheckConfig

logger = logging.getLogger(__name__)

RECONSTRUCTION_TOL = 1e-10
TRIANGLE_TOL = 1e-12


def lattice_map(f: DyadicFunction) -> list[StepFunction]:
    """The sublinear map ``f -> (E*_{2^k}|Delta_k f|)_{k=1..L}`` into L1(l2)."""
    return [as_step(shift_average(abs(martingale_difference(f, k).step), 2**k)) for k in range(1, f.depth + 1)]


@registry.register(
    lemma=LemmaId.ATDEC,
    description="f = E f + sum c_k a_k with (1,2)-atoms and sum c_k <= C_dec ||f||_{H1(delta)}",
    kind=CheckKind.STRICT,
    defaults={"instances": 1000, "depth": 10},
    batch_statistic="C_dec",
)
def run_atdec(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    rng = ctx.rng
    depth = int(rng.integers(1, cfg.depth + 1))
    f = random_martingale(rng, depth, sparsity=float(rng.uniform(0.0, 0.8)), spread=float(rng.uniform(0.0, 5.0)))
    norm = h1_delta_norm(f)
    if norm <= DEGENERATE_DENOMINATOR:
        return InstanceResult.degenerate(depth=depth)

    dec = atomic_decompose(f)
    failures = []
    scale = max(1.0, float(np.abs(f.values).max()))
    reconstruction = float(np.abs(recombine(dec).values - f.values).max())
    if reconstruction > RECONSTRUCTION_TOL * scale:
        failures.append(f"reconstruction error {reconstruction:.3e}")
    bad = [i for i, atom in enumerate(dec.atoms) if not is_atom(atom.function, atom.interval)]
    if bad:
        failures.append(f"{len(bad)} invalid atoms, first at {bad[0]}")
    csum = dec.coefficient_sum
    if csum > C_DEC * norm * (1.0 + TRIANGLE_TOL):
        failures.append(f"sum c_k = {csum:.12g} > C_dec ||f|| = {C_DEC * norm:.12g}")

    image = mixed_l1l2_norm(lattice_map(f)).value
    bound = math.fsum(c * mixed_l1l2_norm(lattice_map(atom.function)).value for c, atom in zip(dec.coefficients, dec.atoms, strict=True))
    if image > bound * (1.0 + TRIANGLE_TOL) + TRIANGLE_TOL * scale:
        failures.append(f"||T f|| = {image:.12g} > sum c_k ||T a_k|| = {bound:.12g}")

    if failures:
        logger.warning("atdec instance %d: %s", ctx.index, "; ".join(failures))
    ratio = csum / norm
    return InstanceResult(
        lhs=csum,
        rhs=norm,
        violation=bool(failures),
        witness={"depth": depth, "atoms": len(dec), "failures": failures},
        extras={
            "C_dec": ratio,
            "triangle_ratio": image / bound if bound > 0 else 0.0,
        },
    )


@registry.register(
    lemma=LemmaId.NORM_TRANSFER,
    description="||sum r_{m_k+1} f_k||_{H1(delta)} = ||(f_k)||_{L1(l2)} and the difference structure of the embedding",
    kind=CheckKind.STRICT,
    defaults={"instances": 1000, "depth": 10},
)
def run_norm_transfer(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
    rng = ctx.rng
    count = int(rng.integers(1, cfg.depth + 1))
    levels = sorted(int(v) for v in rng.choice(cfg.depth, size=count, replace=False))
    family = [DyadicFunction(rng.standard_normal(2**m) + 1j * rng.standard_normal(2**m)) for m in levels]
    depth = levels[-1] + 1 + int(rng.integers(0, 2))
    embedded = rademacher_embed(family, levels, depth)

    h1 = h1_delta_norm(embedded)
    mixed = mixed_l1l2_norm([f.step for f in family]).value
    transfer_error = abs(h1 - mixed) / max(1.0, mixed)

    at_level = {m + 1: f for m, f in zip(levels, family, strict=True)}
    difference_error = 0.0
    for n in range(1, depth + 1):
        diff = martingale_difference(embedded, n).values
        if n in at_level:
            diff = diff - rademacher(n, depth).values * at_level[n].refine(depth).values
        difference_error = max(difference_error, float(np.abs(diff).max()))
    difference_error /= max(1.0, float(np.abs(embedded.values).max()))

    return InstanceResult(
        lhs=h1,
        rhs=mixed,
        violation=transfer_error > cfg.abs_tol or difference_error > cfg.abs_tol,
        witness={"levels": levels, "depth": depth},
        extras={"transfer_error": transfer_error, "difference_error": difference_error},
    )
