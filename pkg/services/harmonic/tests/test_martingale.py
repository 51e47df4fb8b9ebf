"""Tests for the dyadic filtration, square function, Rademacher embedding and atoms."""

import math

import numpy as np
import pytest

from harmonic.constants import C_DEC
from harmonic.exceptions import AtomError, DegenerateInputError, LevelError, MeasurabilityError
from harmonic.martingale import (
    Atom,
    DyadicFunction,
    DyadicInterval,
    atomic_decompose,
    dyadic_expectation,
    h1_delta_norm,
    is_atom,
    martingale_difference,
    rademacher,
    rademacher_embed,
    random_atom,
    random_martingale,
    recombine,
    square_function,
)
from harmonic.poly import StepFunction, mixed_l1l2_norm

# --- filtration ---


def test_dyadic_expectation_example() -> None:
    """E_1 of (1, 3, 5, 7) averages the halves."""
    f = DyadicFunction.from_values([1, 3, 5, 7])
    np.testing.assert_array_equal(dyadic_expectation(f, 1).values, [2, 2, 6, 6])
    np.testing.assert_array_equal(dyadic_expectation(f, 0).values, [4, 4, 4, 4])
    np.testing.assert_array_equal(dyadic_expectation(f, 2).values, f.values)


def test_levels_are_checked() -> None:
    """Levels outside the filtration are rejected."""
    f = DyadicFunction.from_values([1, 3, 5, 7])
    with pytest.raises(LevelError):
        dyadic_expectation(f, 3)
    with pytest.raises(LevelError):
        martingale_difference(f, 0)
    with pytest.raises(LevelError):
        rademacher(0, 2)


def test_haar_square_function(haar: DyadicFunction) -> None:
    """Delta_1 h = h and S h = 1."""
    np.testing.assert_array_equal(martingale_difference(haar, 1).values, haar.values)
    np.testing.assert_array_equal(square_function(haar).values, [1.0, 1.0])
    assert h1_delta_norm(haar) == 1.0


def test_rademacher_pair_square_function() -> None:
    """r_1 + r_2 = (2, 0, 0, -2) has S = sqrt(2) everywhere."""
    f = rademacher(1, 2) + rademacher(2, 2)
    np.testing.assert_array_equal(f.values, [2, 0, 0, -2])
    np.testing.assert_allclose(square_function(f).values, [math.sqrt(2)] * 4, rtol=1e-15)
    assert h1_delta_norm(f) == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("sparsity", [0.0, 0.5])
def test_differences_telescope(sparsity: float, rng: np.random.Generator) -> None:
    """E f + sum_k Delta_k f = f, and each |Delta_k f| is constant on F_{k-1} cells."""
    f = random_martingale(rng, 7, sparsity=sparsity)
    total = np.full(f.values.size, f.mean, dtype=np.complex128)
    for k in range(1, f.depth + 1):
        diff = martingale_difference(f, k).values
        total += diff
        blocks = np.abs(diff).reshape(2 ** (k - 1), -1)
        assert np.all(blocks == blocks[:, :1])
    np.testing.assert_allclose(total, f.values, rtol=1e-12, atol=1e-10)


def test_square_function_l2_identity(rng: np.random.Generator) -> None:
    """||S f||_2 = ||f - E f||_2 by orthogonality of the differences."""
    f = random_martingale(rng, 8)
    lhs = float(np.mean(square_function(f).values.real ** 2))
    rhs = float(np.mean(np.abs(f.values - f.mean) ** 2))
    assert lhs == pytest.approx(rhs, rel=1e-12)


# --- Rademacher embedding ---


def test_rademacher_embed_of_constants() -> None:
    """Constants at levels (0, 1) give r_1 + r_2."""
    one = DyadicFunction.constant(1.0)
    embedded = rademacher_embed([one, one], [0, 1])
    np.testing.assert_array_equal(embedded.values, (rademacher(1, 2) + rademacher(2, 2)).values)


def test_rademacher_embed_transfers_mixed_norm(rng: np.random.Generator) -> None:
    """||sum r_{m_k+1} f_k||_{H^1(delta)} equals ||(f_k)||_{L^1(l^2)}."""
    levels = [0, 2, 3, 5]
    family = [
        DyadicFunction(rng.standard_normal(2**m) + 1j * rng.standard_normal(2**m)) for m in levels
    ]
    embedded = rademacher_embed(family, levels)
    assert embedded.depth == 6
    mixed = mixed_l1l2_norm([StepFunction(f.values) for f in family]).value
    assert h1_delta_norm(embedded) == pytest.approx(mixed, rel=1e-12)


def test_rademacher_embed_rejects_bad_input() -> None:
    """Coarse measurability, increasing levels and matching lengths are enforced."""
    with pytest.raises(MeasurabilityError):
        rademacher_embed([DyadicFunction.from_values([1.0, 2.0])], [0])
    one = DyadicFunction.constant(1.0)
    with pytest.raises(LevelError):
        rademacher_embed([one, one], [1, 1])
    with pytest.raises(LevelError):
        rademacher_embed([one], [2], depth=2)
    with pytest.raises(DegenerateInputError):
        rademacher_embed([one], [0, 1])


# --- atoms ---


@pytest.mark.parametrize(
    ("values", "expected"),
    [
        ([1.0, -1.0], True),
        ([1.0, 1.0], False),
        ([2.0, -2.0], False),
        ([0.0, 0.0], True),
        ([0.0, 0.0, 1.0, -1.0], True),
        ([0.0, 0.0, 2.0, -2.0], True),
        ([0.0, 0.0, 3.0, -3.0], False),
    ],
)
def test_is_atom_examples(values: list[float], expected: bool) -> None:
    """Mean zero, dyadic support and the L2 normalization against the smallest interval."""
    assert is_atom(DyadicFunction.from_values(values)) is expected


def test_is_atom_with_given_interval() -> None:
    """A function supported on the right half is not an atom for the left half."""
    a = DyadicFunction.from_values([0.0, 0.0, 1.0, -1.0])
    assert is_atom(a, DyadicInterval(1, 1))
    assert not is_atom(a, DyadicInterval(1, 0))
    with pytest.raises(AtomError):
        Atom(DyadicInterval(0, 0), DyadicFunction.constant(1.0, 1))


def test_random_atoms_have_unit_h1_norm(rng: np.random.Generator) -> None:
    """||S a||_1 <= |I|^(1/2) ||a||_2 <= 1."""
    for _ in range(20):
        atom = random_atom(rng, 6)
        assert is_atom(atom.function, atom.interval)
        assert h1_delta_norm(atom.function) <= 1.0 + 1e-12


# --- atomic decomposition ---


def test_decompose_constant_and_haar(haar: DyadicFunction) -> None:
    """Constants need no atoms; the Haar function is a single atom with coefficient 1."""
    flat = atomic_decompose(DyadicFunction.constant(2.5, 3))
    assert len(flat) == 0
    assert flat.residual_mean == 2.5
    np.testing.assert_array_equal(recombine(flat).values, [2.5] * 8)

    single = atomic_decompose(haar)
    assert single.coefficients == (1.0,)
    assert single.atoms[0].interval == DyadicInterval(0, 0)
    np.testing.assert_array_equal(single.atoms[0].function.values, haar.values)


@pytest.mark.parametrize(("sparsity", "spread"), [(0.0, 3.0), (0.4, 3.0), (0.0, 0.0), (0.7, 5.0)])
def test_decomposition_reconstructs_with_bounded_coefficients(
    sparsity: float, spread: float, rng: np.random.Generator
) -> None:
    """f = E f + sum c_k a_k and sum c_k <= C_DEC ||f||_{H^1(delta)}."""
    f = random_martingale(rng, 8, sparsity=sparsity, spread=spread)
    dec = atomic_decompose(f)
    scale = float(np.abs(f.values).max())
    np.testing.assert_allclose(recombine(dec).values, f.values, atol=1e-10 * scale)
    assert dec.residual_mean == f.mean
    assert all(c > 0 for c in dec.coefficients)
    assert dec.coefficient_sum <= C_DEC * h1_delta_norm(f)


def test_decomposition_atoms_are_localized(rng: np.random.Generator) -> None:
    """Every atom vanishes off its interval and meets the L2 normalization with equality."""
    dec = atomic_decompose(random_martingale(rng, 6, sparsity=0.3))
    assert len(dec) > 0
    for atom in dec.atoms:
        window = atom.interval.cells(dec.depth)
        outside = np.delete(atom.function.values, np.arange(window.start, window.stop))
        assert not outside.any()
        norm = math.sqrt(float(np.mean(np.abs(atom.function.values) ** 2)))
        assert norm == pytest.approx(atom.interval.length**-0.5, rel=1e-12)
