"""Tests for the Stein, Khintchine and lacunary checks."""

import math
from collections.abc import Callable
from fractions import Fraction

import numpy as np
import pytest

from harmonic.poly import StepFunction
from verifier.checks.multipliers import (
    block_failures,
    block_symbols,
    cycled_signs,
    khintchine_quantities,
    max_slope,
    subsequence_beta,
)
from verifier.checks.registry import InstanceResult
from verifier.exceptions import ConfigurationError
from verifier.schemas import CheckConfig

ConfigFactory = Callable[..., CheckConfig]
InstanceRunner = Callable[..., InstanceResult]


def test_block_action_is_exact() -> None:
    """S_eps acts by eps_k on block k, is an involution, and K matches the modulated Fejer kernel."""
    signs = [1, -1, 1]
    system, mu, k_hat = block_symbols((2, 4, 8), tuple(signs))
    for seed in range(5):
        assert block_failures(np.random.default_rng(seed), system, mu, k_hat, signs) == []


def test_stein_instances(make_config: ConfigFactory, run_instance: InstanceRunner) -> None:
    cfg = make_config("stein", d=[1, 2, 4], instances=1, searches=1, search_iterations=5)
    for result in (run_instance(cfg, 0), run_instance(cfg, 1, searched=True)):
        assert not result.violation
        assert result.extras["stein_constant"] <= result.extras["slope_bound"]
        assert result.ratio is not None and result.ratio > 0


def test_cycled_signs() -> None:
    assert cycled_signs(CheckConfig(lemma="stein", seed=0), 4) == [1, -1, 1, -1]
    assert cycled_signs(CheckConfig(lemma="stein", seed=0, d=[1, 2], signs=[-1, -1]), 3) == [-1, -1, -1]


def test_khintchine_examples() -> None:
    """One member: all three quantities agree. Two equal constants: ratio 2^(-1/2)."""
    g = StepFunction(np.array([1.0, 2.0j, -3.0, 0.5], dtype=np.complex128))
    average, square, total = khintchine_quantities([g])
    assert average == pytest.approx(square, rel=1e-14)
    assert total == pytest.approx(square, rel=1e-14)

    one = StepFunction.constant(1.0)
    average, square, total = khintchine_quantities([one, one])
    assert average == 1.0
    assert average / square == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert total == 2.0


def test_khintchine_instances(make_config: ConfigFactory, run_instance: InstanceRunner) -> None:
    cfg = make_config("khintchine", d=[2, 4, 8])
    for index in range(5):
        result = run_instance(cfg, index)
        assert not result.violation
        assert result.ratio is not None and 1 / math.sqrt(2) - 1e-9 <= result.ratio <= 1 + 1e-9


def test_khintchine_member_limit(make_config: ConfigFactory) -> None:
    """More blocks than the exact average allows is a configuration error."""
    with pytest.raises(ConfigurationError):
        make_config("khintchine", d=[2**k for k in range(21)])


def test_lacunary_instances(make_config: ConfigFactory, run_instance: InstanceRunner) -> None:
    """Random systems satisfy the D_k, slope and subsequence bounds."""
    cfg = make_config("lacunary")
    for index in range(30):
        result = run_instance(cfg, index)
        assert not result.violation, result.witness
        assert result.extras["beta_ratio"] <= 1.0


def test_max_slope_and_subsequence_beta() -> None:
    _, mu, _ = block_symbols((1, 2, 4), (1, 1, 1))
    # descending edge of the last block: 3 D_3 / d_3 = 21/4, below 3(1 + 1/alpha) = 6
    assert max_slope(mu) == Fraction(21, 4)
    # stride 2 with s = 1: pairs (d_0, N_2) and (d_1, N_3)
    assert subsequence_beta([2, 4, 8, 16], [1, 2, 4, 8], 1, 2) == Fraction(1, 2)
    assert subsequence_beta([2], [1], 3, 2) is None
