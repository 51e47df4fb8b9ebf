"""Tests for the independent-sum norm and exact Rademacher averages."""

import math

import numpy as np
import pytest

from harmonic.exceptions import DegenerateInputError, EnumerationBudgetError
from harmonic.indnorm import (
    IndFamily,
    enumeration_cells,
    ind_norm,
    ind_norm_exact,
    ind_norm_mc,
    l1l1_norm,
    l2l2_norm,
    rademacher_average_exact,
)
from harmonic.poly import StepFunction, l1_norm, mixed_l1l2_norm


def _random_family(rng: np.random.Generator, size: int, pieces: int) -> list[StepFunction]:
    return [StepFunction(rng.standard_normal(pieces) + 1j * rng.standard_normal(pieces)) for _ in range(size)]


# --- exact enumeration ---


def test_ind_norm_single_member_is_l1(rng: np.random.Generator) -> None:
    """With one member the ind-norm is the L1 norm."""
    (f,) = _random_family(rng, 1, 16)
    assert ind_norm_exact(IndFamily.of([f])) == pytest.approx(l1_norm(f).value, rel=1e-12)


def test_ind_norm_examples() -> None:
    """Constants (3, 4) give 5; two half-indicators give sqrt(2)/4 + 1/2."""
    constants = IndFamily.of([StepFunction.constant(3.0), StepFunction.constant(4.0)])
    assert ind_norm_exact(constants) == 5.0
    half = StepFunction.indicator(0, 1, 2)
    assert ind_norm_exact(IndFamily.of([half, half])) == pytest.approx(math.sqrt(2) / 4 + 1 / 2, rel=1e-15)
    assert ind_norm_exact(IndFamily.of([])) == 0.0


def test_enumeration_counts_distinct_values() -> None:
    """Repeated moduli are merged before the product is taken."""
    f = StepFunction(np.array([1.0, -1.0, 1j, 2.0], dtype=np.complex128))
    fam = IndFamily.of([f, f, StepFunction.constant(1.0, 8)])
    assert enumeration_cells(fam) == 2 * 2 * 1
    with pytest.raises(EnumerationBudgetError):
        ind_norm_exact(fam, budget=3)


def test_family_requires_power_of_two_partitions() -> None:
    with pytest.raises(DegenerateInputError):
        IndFamily.of([StepFunction.constant(1.0, 3)])


def test_ind_norm_comparisons(rng: np.random.Generator) -> None:
    """||.||_ind lies below L1(l1) and L2(l2) and is subadditive under splitting."""
    members = _random_family(rng, 4, 8)
    fam = IndFamily.of(members)
    value = ind_norm_exact(fam)
    assert value <= l1l1_norm(members).value
    assert value <= l2l2_norm(members)
    head, tail = fam.split(2)
    assert value <= ind_norm_exact(head) + ind_norm_exact(tail) + 1e-12
    assert value >= max(ind_norm_exact(head), ind_norm_exact(tail)) - 1e-12


# --- Monte Carlo ---


def test_monte_carlo_on_constants() -> None:
    """Every draw of a constant family is the same number."""
    fam = IndFamily.of([StepFunction.constant(3.0, 4), StepFunction.constant(4.0, 2)])
    estimate = ind_norm_mc(fam, samples=10_000, seed=1)
    assert estimate.value == pytest.approx(5.0, rel=1e-14)
    assert estimate.stderr == pytest.approx(0.0, abs=1e-6)
    assert not estimate.exact


def test_monte_carlo_agrees_with_enumeration(rng: np.random.Generator) -> None:
    """The sampled value is within a few standard errors of the exact one."""
    fam = IndFamily.of(_random_family(rng, 3, 8))
    exact = ind_norm_exact(fam)
    estimate = ind_norm_mc(fam, samples=200_000, seed=7)
    assert abs(estimate.value - exact) <= 5 * estimate.stderr


def test_monte_carlo_is_deterministic(rng: np.random.Generator) -> None:
    """Same seed and sample count, same estimate."""
    fam = IndFamily.of(_random_family(rng, 3, 4))
    assert ind_norm_mc(fam, 5000, seed=3) == ind_norm_mc(fam, 5000, seed=3)
    with pytest.raises(DegenerateInputError):
        ind_norm_mc(fam, 1, seed=3)


def test_ind_norm_switches_to_sampling(rng: np.random.Generator) -> None:
    """Small budgets fall back to Monte Carlo."""
    fam = IndFamily.of(_random_family(rng, 2, 4))
    assert ind_norm(fam).exact
    sampled = ind_norm(fam, budget=1, samples=1000, seed=2)
    assert sampled.samples == 1000


# --- Rademacher averages ---


def test_rademacher_average_examples() -> None:
    """Equal constants average to 1; disjoint indicators always give modulus 1."""
    one = StepFunction.constant(1.0)
    assert rademacher_average_exact([one, one]) == 1.0
    left, right = StepFunction.indicator(0, 1, 2), StepFunction.indicator(1, 2, 2)
    assert rademacher_average_exact([left, right]) == 1.0
    assert rademacher_average_exact([]) == 0.0


def test_rademacher_average_khintchine_bracket(rng: np.random.Generator) -> None:
    """2^(-1/2) ||(f_k)||_{L1(l2)} <= average <= ||(f_k)||_{L1(l2)}."""
    members = _random_family(rng, 6, 8)
    average = rademacher_average_exact(members)
    mixed = mixed_l1l2_norm(members).value
    assert mixed / math.sqrt(2) <= average <= mixed + 1e-12


def test_rademacher_average_member_limit() -> None:
    one = StepFunction.constant(1.0)
    with pytest.raises(EnumerationBudgetError):
        rademacher_average_exact([one] * 3, max_members=2)
