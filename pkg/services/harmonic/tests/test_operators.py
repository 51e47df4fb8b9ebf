"""Tests for translation, shift-average, grid expectation and symbol application."""

import math

import numpy as np
import pytest

from harmonic.exceptions import GridError, HorizonError, PartitionError
from harmonic.operators import (
    OperatorKind,
    OperatorTag,
    abs_pointwise,
    apply_symbol,
    apply_symbol_2d,
    grid_expectation,
    shift_average,
    shift_average_sampled,
    translate,
)
from harmonic.poly import (
    AnalyticPoly,
    BivariatePoly,
    QuadratureGrid,
    StepFunction,
    l1_norm,
    random_analytic,
    random_bivariate,
    sample,
)
from harmonic.symbols import IdemSet2D, Symbol, idem_contains


def _random_step(rng: np.random.Generator, pieces: int) -> StepFunction:
    return StepFunction(rng.standard_normal(pieces) + 1j * rng.standard_normal(pieces))


# --- translate ---


def test_translate_examples() -> None:
    """tau_0 is the identity, tau_1/2 flips a character, steps rotate."""
    f = AnalyticPoly.from_coeffs([1.0, 2.0])
    np.testing.assert_array_equal(translate(f, 0.0).coeffs, f.coeffs)
    np.testing.assert_allclose(translate(AnalyticPoly.monomial(1), 0.5).coeffs, [0, -1], atol=1e-15)
    moved = translate(StepFunction.indicator(0, 1, 4), 0.25)
    assert isinstance(moved, StepFunction)
    np.testing.assert_array_equal(moved.values, [0, 1, 0, 0])


def test_translate_requires_alignment() -> None:
    """Steps only move by whole cells."""
    with pytest.raises(GridError):
        translate(StepFunction.constant(1.0, 4), 0.1)


# --- shift average ---


def test_shift_average_examples() -> None:
    """Constants survive, characters are kept iff N divides the frequency."""
    assert isinstance(shift_average(StepFunction.constant(2.0, 4), 2), StepFunction)
    np.testing.assert_array_equal(shift_average(AnalyticPoly.constant(3.0), 5).coeffs, [3.0])
    np.testing.assert_array_equal(shift_average(AnalyticPoly.monomial(1), 2).coeffs, [0, 0])
    np.testing.assert_array_equal(shift_average(AnalyticPoly.monomial(2), 2).coeffs, [0, 0, 1])
    third = shift_average(StepFunction.indicator(0, 1, 3), 3)
    assert isinstance(third, StepFunction)
    np.testing.assert_allclose(third.values, [1 / 3] * 3)


def test_shift_average_requires_divisibility() -> None:
    """N must divide the partition size."""
    with pytest.raises(PartitionError):
        shift_average(StepFunction.constant(1.0, 4), 3)


@pytest.mark.parametrize("n", [0, 1, 2, 6, 12, 60, 64, 128, 255, 256])
def test_shift_average_multiplier_characterization(n: int) -> None:
    """Coefficient and sample space agree with 1_{N | n} for every N <= 64."""
    character = AnalyticPoly.monomial(n)
    grid = QuadratureGrid.for_degree(n, oversample=4)
    for N in range(1, 65):
        expected = character if n % N == 0 else AnalyticPoly.monomial(n, 0.0)
        coefficient = shift_average(character, N)
        assert isinstance(coefficient, AnalyticPoly)
        np.testing.assert_array_equal(coefficient.coeffs, expected.coeffs)
        sampled = shift_average_sampled(character, N, grid).values
        np.testing.assert_allclose(sampled, sample(expected, grid).values, atol=1e-12)


def test_shift_average_is_idempotent_and_commutes(rng: np.random.Generator) -> None:
    """E*_N E*_N = E*_N and E*_N tau_{j/N} = tau_{j/N} E*_N on steps."""
    f = _random_step(rng, 24)
    once = shift_average(f, 6)
    assert isinstance(once, StepFunction)
    twice = shift_average(once, 6)
    assert isinstance(twice, StepFunction)
    np.testing.assert_allclose(twice.values, once.values, rtol=1e-14)
    for j in range(6):
        left = shift_average(translate(f, j / 6), 6)
        right = translate(once, j / 6)
        np.testing.assert_allclose(left.values, right.values, rtol=1e-14)  # type: ignore[union-attr]


# --- grid expectation ---


def test_grid_expectation_examples() -> None:
    """E_1 of a character vanishes; measurable steps are fixed; E_2 of e^{2 pi i t}."""
    np.testing.assert_allclose(grid_expectation(AnalyticPoly.monomial(1), 1).values, [0.0], atol=1e-15)
    step = StepFunction(np.array([1.0, 3.0], dtype=np.complex128))
    np.testing.assert_array_equal(grid_expectation(step, 2).values, step.values)
    halves = grid_expectation(AnalyticPoly.monomial(1), 2).values
    np.testing.assert_allclose(halves, [2j / math.pi, -2j / math.pi], atol=1e-15)


def test_grid_expectation_matches_antiderivative(rng: np.random.Generator) -> None:
    """Folded cell means agree with the antiderivative evaluated term by term."""
    f = random_analytic(rng, 16)
    N = 6
    expected = []
    for k in range(N):
        total = f.coeffs[0]
        for j in range(1, f.coeffs.size):
            rise = np.exp(2j * np.pi * j * (k + 1) / N) - np.exp(2j * np.pi * j * k / N)
            total += f.coeffs[j] * N * rise / (2j * np.pi * j)
        expected.append(total)
    np.testing.assert_allclose(grid_expectation(f, N).values, expected, atol=1e-12)


def test_grid_expectation_idempotent_and_identity(rng: np.random.Generator) -> None:
    """E_N E_N = E_N and E_P is the identity on P-steps."""
    f = _random_step(rng, 32)
    once = grid_expectation(f, 8)
    np.testing.assert_array_equal(grid_expectation(once, 8).values, once.values)
    np.testing.assert_array_equal(grid_expectation(f, 32).values, f.values)


def test_operators_contract_l1(rng: np.random.Generator) -> None:
    """E*_N and E_N do not increase the L1 norm."""
    f = random_analytic(rng, 20)
    grid = QuadratureGrid(256)
    base = l1_norm(f, grid)
    for N in (2, 4, 8, 16):
        star = shift_average(f, N)
        assert l1_norm(star, grid).value <= base.value + base.error + l1_norm(star, grid).error
        assert l1_norm(grid_expectation(f, N)).value <= base.value + base.error


# --- symbols ---


def test_apply_symbol_examples() -> None:
    """All-ones, all-zeros and a point projection."""
    f = AnalyticPoly.from_coeffs([1.0, 1.0, 1.0, 1.0])
    np.testing.assert_array_equal(apply_symbol(f, Symbol.from_values([1] * 4)).coeffs, f.coeffs)
    np.testing.assert_array_equal(apply_symbol(f, Symbol.from_values([0] * 4)).coeffs, np.zeros(4))
    np.testing.assert_array_equal(apply_symbol(f, Symbol.from_values([0, 0, 1, 0])).coeffs, [0, 0, 1, 0])


def test_apply_symbol_horizon() -> None:
    """A symbol shorter than the spectrum is an error."""
    with pytest.raises(HorizonError):
        apply_symbol(AnalyticPoly.monomial(5), Symbol.from_values([1, 1]))


def test_apply_symbol_linear(rng: np.random.Generator) -> None:
    """T(f + g) = Tf + Tg."""
    mu = Symbol.from_values(["1/3", "-2", "5/7", "0", "1", "1/2"])
    f, g = random_analytic(rng, 5), random_analytic(rng, 5)
    np.testing.assert_allclose(
        apply_symbol(f + g, mu).coeffs, (apply_symbol(f, mu) + apply_symbol(g, mu)).coeffs, atol=1e-12
    )


def test_apply_symbol_2d_examples(rng: np.random.Generator) -> None:
    """A monomial in A survives, spectra off A vanish, mixed spectra match the predicate."""
    A = IdemSet2D.of([10], [2])
    coeffs = np.zeros((5, 7), dtype=np.complex128)
    coeffs[4, 6] = 1.0
    np.testing.assert_array_equal(apply_symbol_2d(BivariatePoly(coeffs), A).coeffs, coeffs)
    off = np.zeros((4, 4), dtype=np.complex128)
    off[3, 3] = 2.0
    assert not apply_symbol_2d(BivariatePoly(off), A).coeffs.any()
    F = random_bivariate(rng, (11, 11))
    out = apply_symbol_2d(F, A).coeffs
    for n1 in range(12):
        for n2 in range(12):
            expected = F.coeffs[n1, n2] if idem_contains(A, n1, n2) else 0.0
            assert out[n1, n2] == expected


def test_abs_pointwise_examples() -> None:
    """Moduli of constants, characters and steps."""
    np.testing.assert_array_equal(abs_pointwise(StepFunction.constant(-3.0)).values, [3.0])
    grid = QuadratureGrid(16)
    np.testing.assert_allclose(abs_pointwise(AnalyticPoly.monomial(1), grid).values, np.ones(16), rtol=1e-15)
    step = StepFunction(np.array([3.0, -4.0], dtype=np.complex128))
    np.testing.assert_array_equal(abs_pointwise(step).values, [3.0, 4.0])


def test_operator_tag_label_and_apply() -> None:
    """Tags name the operator and apply it."""
    tag = OperatorTag(OperatorKind.SHIFT_AVERAGE, n=8, abs_first=True)
    assert tag.label == "E*_8|.|"
    assert OperatorTag(OperatorKind.GRID_EXPECTATION, n=4).label == "E_4"
    out = tag.apply(StepFunction(np.array([1, -1, 1, -1, 1, -1, 1, -1], dtype=np.complex128)))
    assert isinstance(out, StepFunction)
    np.testing.assert_allclose(out.values, np.ones(8))
