"""Tests for the independent-sum bounds on the dyadic filtration and on analytic families."""

import math
from collections.abc import Callable
from fractions import Fraction
from typing import Any

import numpy as np
import pytest
from pydantic import ValidationError

from harmonic.poly import StepFunction
from harmonic.symbols import lacunary_check
from verifier.checks import independent
from verifier.checks.independent import atom_chain, beta_effective, hypothesis_c2, shift_modulus
from verifier.checks.registry import InstanceResult
from verifier.exceptions import ConfigurationError
from verifier.schemas import CheckConfig

ConfigFactory = Callable[..., CheckConfig]
InstanceRunner = Callable[..., InstanceResult]


def test_hypothesis_c2() -> None:
    assert hypothesis_c2([1, 3], [2, 8], 1) == pytest.approx(math.sqrt(1.5))
    assert hypothesis_c2([1, 3], [2, 8], 0) == pytest.approx(math.sqrt(3.0))
    assert hypothesis_c2([1], [2], 1) == 1.0


def test_shift_modulus_of_haar() -> None:
    """E*_2 |h| = 1 for the Haar function."""
    h = StepFunction(np.array([1.0, -1.0], dtype=np.complex128))
    np.testing.assert_array_equal(shift_modulus(h, 2).values, [1.0, 1.0])
    np.testing.assert_array_equal(shift_modulus(StepFunction.constant(-2.0), 4).values, [2.0] * 4)


@pytest.mark.parametrize("s", [0, 1, 2])
def test_atom_chain_holds(s: int) -> None:
    """Every displayed step of the atom estimate holds on random atoms."""
    levels, N = [1, 3, 5, 7], [2, 8, 32, 128]
    cfg = CheckConfig(lemma="dyadicrbdd", seed=3, levels=levels, N=N, s=s)
    for seed in range(8):
        chain = atom_chain(np.random.default_rng(seed), levels, N, s, cfg, seed)
        assert chain.failed == []
        assert len(chain.steps) >= 12


def test_dyadicrbdd_instances(make_config: ConfigFactory, run_instance: InstanceRunner) -> None:
    cfg = make_config("dyadicrbdd", levels=[1, 2, 4], N=[2, 4, 16], s=1, instances=3, searches=1, search_iterations=4)
    for index in range(3):
        result = run_instance(cfg, index)
        assert not result.violation, result.witness["failed_step"]
        assert result.witness["operators"] == ["E*_2|.|", "E*_4|.|", "E*_16|.|"]
        assert result.ratio is not None and result.ratio <= math.sqrt(3) + 1e-9
    searched = run_instance(cfg, 3, searched=True)
    assert not searched.skipped and not searched.violation


def test_dyadicrbdd_requires_power_of_two_N(make_config: ConfigFactory) -> None:
    with pytest.raises(ConfigurationError):
        make_config("dyadicrbdd", N=[2, 6, 32, 128])


def test_beta_effective() -> None:
    assert beta_effective([4, 16, 64], [2, 8, 32], 0) == 2.0
    assert beta_effective([4, 16, 64], [2, 8, 32], 1) == 0.5
    assert beta_effective([4], [2], 1) == 0.0


def test_oldrev_rejects_inconsistent_parameters(make_config: ConfigFactory) -> None:
    """beta must bound d_k / N_(k+s) and s must leave a pair."""
    with pytest.raises(ConfigurationError):
        make_config("oldrev", d=[4, 16, 64], N=[2, 4, 8])
    with pytest.raises(ConfigurationError):
        make_config("oldrev", d=[4, 16, 64], N=[2, 8, 32], s=3)
    with pytest.raises(ValidationError):
        make_config("oldrev", d=[4, 16], N=[2, 8, 32])


def test_oldrev_instances(make_config: ConfigFactory, run_instance: InstanceRunner) -> None:
    """Enumerated ind-norms stay below L1(l1), hence below K^1/2 times the mixed norm."""
    cfg = make_config("oldrev", d=[2, 4, 8], N=[2, 2, 4], mc_samples=2000)
    for index in range(3):
        result = run_instance(cfg, index)
        assert not result.violation, result.witness["failures"]
        assert result.ratio is not None and 0 < result.ratio <= math.sqrt(3) + 1e-9
        assert result.extras["beta_eff"] == 2.0


def test_oldrev_reduction_for_small_alpha(make_config: ConfigFactory, run_instance: InstanceRunner) -> None:
    """alpha = 1/2 runs the stride-3 reduction; every piece of it holds."""
    cfg = make_config("oldrev", d=[4, 6, 9], N=[2, 4, 8], mc_samples=2000)
    for index in range(3):
        result = run_instance(cfg, index)
        assert result.witness["failures"] == []
        assert not result.violation


def test_oldrev_defaults_run_the_reduction(
    make_config: ConfigFactory,
    run_instance: InstanceRunner,
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    """The default system has alpha = 1/2, so every plain instance checks the stride reduction."""
    calls: list[int] = []
    original = independent.reduction_failures

    def counted(*args: Any, **kwargs: Any) -> list[str]:
        calls.append(1)
        return original(*args, **kwargs)

    monkeypatch.setattr(independent, "reduction_failures", counted)
    cfg = make_config("oldrev", mc_samples=2000)
    assert cfg.d is not None
    assert lacunary_check(cfg.d).alpha == Fraction(1, 2)
    for index in range(2):
        result = run_instance(cfg, index)
        assert result.witness["failures"] == []
        assert not result.violation
        assert result.extras["beta_eff"] == 2.0
    assert len(calls) == 2
