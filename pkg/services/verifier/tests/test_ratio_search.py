"""Tests for the multi-start ratio search."""

import logging
from collections.abc import Callable

import numpy as np
import pytest

from harmonic.operators import shift_average
from harmonic.poly import AnalyticPoly, ComplexArray, l1_norm
from verifier.checks.families import draw_or_search
from verifier.checks.registry import InstanceContext
from verifier.exceptions import DegenerateSearchError
from verifier.ratio_search import RatioProblem, ratio_search
from verifier.schemas import CheckConfig

ConfigFactory = Callable[..., CheckConfig]


def _sample(n: int) -> Callable[[np.random.Generator], ComplexArray]:
    def draw(rng: np.random.Generator) -> ComplexArray:
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)

    return draw


def _norm_ratio(x: ComplexArray) -> tuple[float, float]:
    norm = float(np.linalg.norm(x))
    return norm, norm


def test_identity_ratio_is_one() -> None:
    problem = RatioProblem(4, _norm_ratio, _sample(4))
    state = ratio_search(problem, np.random.default_rng(1), starts=2, iterations=10)
    assert state.best_ratio == pytest.approx(1.0, rel=1e-15)


def test_zero_operator_ratio_is_zero() -> None:
    problem = RatioProblem(4, lambda x: (0.0, float(np.linalg.norm(x))), _sample(4))
    state = ratio_search(problem, np.random.default_rng(1), starts=2, iterations=10)
    assert state.best_ratio == 0.0


def _even_part(x: ComplexArray) -> tuple[float, float]:
    """``||E*_2 f||_1 / ||f||_1`` for f = x0 e_1 + x1 e_2."""
    f = AnalyticPoly(np.array([0.0, x[0], x[1]], dtype=np.complex128))
    return l1_norm(shift_average(f, 2)).value, l1_norm(f).value


def test_search_concentrates_on_even_character() -> None:
    """E*_2 keeps e^{4 pi i t}; the search drives the ratio close to 1."""
    problem = RatioProblem(2, _even_part, _sample(2))
    state = ratio_search(problem, np.random.default_rng(5), starts=3, iterations=300, min_step=1e-6)
    assert state.best_ratio >= 0.95
    assert state.best_ratio <= 1.0 + 1e-9


def test_history_is_monotone_and_deterministic() -> None:
    problem = RatioProblem(2, _even_part, _sample(2))
    first = ratio_search(problem, np.random.default_rng(9), starts=2, iterations=40)
    second = ratio_search(problem, np.random.default_rng(9), starts=2, iterations=40)
    assert all(b >= a for a, b in zip(first.history, first.history[1:], strict=False))
    assert first.history == second.history
    np.testing.assert_array_equal(first.best, second.best)
    assert first.evaluations == second.evaluations


def test_all_degenerate_starts() -> None:
    problem = RatioProblem(3, lambda x: (1.0, 0.0), _sample(3))
    with pytest.raises(DegenerateSearchError) as info:
        ratio_search(problem, np.random.default_rng(0), starts=4, iterations=5)
    assert info.value.starts == 4


def test_degenerate_searched_instance_is_skipped(
    make_config: ConfigFactory, caplog: pytest.LogCaptureFixture
) -> None:
    problem = RatioProblem(3, lambda x: (1.0, 0.0), _sample(3))
    cfg = make_config("stein", search_starts=2, search_iterations=3)
    ctx = InstanceContext(index=4, rng=np.random.default_rng(0), searched=True)
    with caplog.at_level(logging.DEBUG, logger="verifier.checks.families"):
        assert draw_or_search(problem, cfg, ctx) is None
    assert "stein instance 4: every search start was degenerate" in caplog.messages
