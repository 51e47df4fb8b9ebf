"""Tests for the bidisc idempotent multiplier."""

from collections.abc import Callable

import numpy as np
import pytest

from harmonic.operators import apply_symbol_2d
from harmonic.symbols import IdemSet2D
from verifier.checks import bidisc
from verifier.checks.bidisc import bidisc_problem, box_shape, diagonal_ratios, exactness_failures, random_support
from verifier.checks.registry import InstanceResult
from verifier.schemas import CheckConfig

ConfigFactory = Callable[..., CheckConfig]
InstanceRunner = Callable[..., InstanceResult]

D, N = [2, 32, 1536], [2, 16, 512]


def test_exactness() -> None:
    A = IdemSet2D.of(D, N)
    for seed in range(4):
        assert exactness_failures(np.random.default_rng(seed), A, 40) == []


def test_exactness_reaches_the_last_diagonal(monkeypatch: pytest.MonkeyPatch) -> None:
    """A multiplier that forgets d_3 = 1536 is caught even at degree 12."""
    truncated = IdemSet2D.of(D[:-1], N[:-1])
    monkeypatch.setattr(bidisc, "apply_symbol_2d", lambda F, A: apply_symbol_2d(F, truncated))
    failures = exactness_failures(np.random.default_rng(0), IdemSet2D.of(D, N), 12)
    assert failures == ["monomial (0, 1536) in A changed"]


def test_diagonal_ratios() -> None:
    assert diagonal_ratios(D, N) == (0.125, 3.0)
    assert diagonal_ratios([4], [2]) == (0.0, 2.0)


def test_monomial_in_A_has_ratio_one() -> None:
    """z_2^2 lies on the first diagonal with n1 = 0, so 1_A fixes it."""
    A = IdemSet2D.of(D, N)
    support = np.zeros((9, 9), dtype=bool)
    support[0, 2] = True
    problem = bidisc_problem(A, support)
    assert problem.dimension == 1
    assert problem.ratio(np.array([1.0 + 0j])) == pytest.approx(1.0, rel=1e-12)


def test_random_support_covers_diagonals() -> None:
    A = IdemSet2D.of(D, N)
    support = random_support(np.random.default_rng(0), A, 12)
    assert support.shape == (13, 1539)
    assert support[0, 2] and support[2, 0] and support[1, 1]


@pytest.mark.parametrize("degree", [12, 48, 96])
def test_support_reaches_every_diagonal(degree: int) -> None:
    """The box runs past d_3 = 1536 in n2, so each diagonal carries coefficients and a member of A."""
    A = IdemSet2D.of(D, N)
    assert box_shape(A, degree) == (degree + 1, 1539)
    support = random_support(np.random.default_rng(0), A, degree)
    n1, n2 = np.nonzero(support)
    assert set(D) <= set((n1 + n2).tolist())
    for dk in D:
        assert support[0, dk]


def test_2d_instances(make_config: ConfigFactory, run_instance: InstanceRunner) -> None:
    """Each diagonal part of 1_A F has norm at most ||F||, so three diagonals bound the ratio by 3."""
    cfg = make_config("2d", max_degree=12, instances=2, searches=1, search_iterations=3)
    for result in (run_instance(cfg, 0), run_instance(cfg, 1), run_instance(cfg, 2, searched=True)):
        assert not result.violation
        assert result.ratio is not None and result.ratio <= 3.0 + 1e-6
        assert result.extras["d_over_N"] == 3.0
