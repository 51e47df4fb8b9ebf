"""Shared fixtures for verifier tests."""

import logging
from collections.abc import Callable, Iterator
from pathlib import Path
from typing import Any

import pytest

from verifier.checks import registry
from verifier.checks.registry import InstanceContext, InstanceResult
from verifier.constants import LogFormat
from verifier.harness import instance_rng
from verifier.schemas import CheckConfig
from verifier.settings import VerifierSettings, get_settings

ConfigFactory = Callable[..., CheckConfig]
InstanceRunner = Callable[..., InstanceResult]


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> Iterator[None]:
    """Reports go to a temporary directory and the settings cache starts empty."""
    monkeypatch.setenv("H1LAB_REPORT_DIR", str(tmp_path / "reports"))
    monkeypatch.setenv("H1LAB_LOG_FORMAT", "text")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(autouse=True)
def _restore_root_logger() -> Iterator[None]:
    """The CLI replaces root handlers; put back what pytest installed."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def settings(tmp_path: Path) -> VerifierSettings:
    return VerifierSettings(REPORT_DIR=str(tmp_path / "reports"), LOG_FORMAT=LogFormat.TEXT)


@pytest.fixture
def make_config() -> ConfigFactory:
    """CheckConfig with the registry defaults of the check, seed 1, and the given overrides."""

    def factory(lemma: str, **overrides: Any) -> CheckConfig:
        definition = registry.definition(lemma)
        values = {"lemma": definition.lemma, "seed": 1, **definition.defaults, **overrides}
        return registry.prepare(CheckConfig.model_validate(values))

    return factory


@pytest.fixture
def run_instance() -> InstanceRunner:
    """Invoke one instance of a check the way the harness does."""

    def runner(cfg: CheckConfig, index: int = 0, *, searched: bool = False) -> InstanceResult:
        ctx = InstanceContext(index=index, rng=instance_rng(cfg, index), searched=searched)
        return registry.invoke(cfg, ctx)

    return runner
