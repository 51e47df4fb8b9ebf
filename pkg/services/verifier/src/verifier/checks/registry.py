"""Check registry: decorator-based registration of per-instance check runners."""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from verifier.constants import DEGENERATE_DENOMINATOR, CheckKind, LemmaId
from verifier.exceptions import UnknownCheckError
from verifier.schemas import CheckConfig, CheckDefinition

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class InstanceContext:
    """Instance index, its private generator, and whether it belongs to the searched tail."""

    index: int
    rng: np.random.Generator
    searched: bool = False


@dataclass(slots=True)
class InstanceResult:
    """Outcome of one randomized instance.

    ``lhs``/``rhs`` are the two sides of the quantity the check reports; ``extras`` are
    secondary quantities aggregated by maximum over instances.
    """

    lhs: float | None = None
    rhs: float | None = None
    violation: bool = False
    skipped: bool = False
    witness: dict[str, Any] = field(default_factory=dict)
    extras: dict[str, float] = field(default_factory=dict)

    @classmethod
    def degenerate(cls, **witness: Any) -> "InstanceResult":
        return cls(skipped=True, witness=dict(witness))

    @property
    def ratio(self) -> float | None:
        if self.skipped or self.lhs is None or self.rhs is None:
            return None
        if self.rhs <= DEGENERATE_DENOMINATOR:
            return 0.0 if self.lhs <= DEGENERATE_DENOMINATOR else math.inf
        return self.lhs / self.rhs


CheckHandler = Callable[[CheckConfig, InstanceContext], InstanceResult]
PrepareHook = Callable[[CheckConfig], CheckConfig]


class CheckRegistry:
    """Central registry for all checks.

    Usage::

        registry = CheckRegistry()

        @registry.register(
            lemma=LemmaId.ENL2,
            description="L2 bound for the shift-average on localized functions",
            kind=CheckKind.STRICT,
            defaults={"instances": 10_000},
        )
        def run_enl2(cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
            ...
    """

    def __init__(self) -> None:
        self._handlers: dict[LemmaId, CheckHandler] = {}
        self._definitions: dict[LemmaId, CheckDefinition] = {}
        self._prepare: dict[LemmaId, PrepareHook] = {}

    def register(
        self,
        *,
        lemma: LemmaId,
        description: str,
        kind: CheckKind,
        defaults: dict[str, Any] | None = None,
        prepare: PrepareHook | None = None,
        batch_statistic: str | None = None,
    ) -> Callable[[CheckHandler], CheckHandler]:
        """Decorator that registers a per-instance check runner.

        ``batch_statistic`` names an extra whose maximum must agree between the two
        halves of the plain instances to within ``batch_tolerance``.
        """

        def decorator(fn: CheckHandler) -> CheckHandler:
            self._handlers[lemma] = fn
            self._definitions[lemma] = CheckDefinition(
                lemma=lemma,
                description=description,
                kind=kind,
                defaults=defaults or {},
                batch_statistic=batch_statistic,
            )
            if prepare is not None:
                self._prepare[lemma] = prepare
            return fn

        return decorator

    def get_catalog(self) -> list[CheckDefinition]:
        """Return all registered check definitions, sorted by id."""
        return sorted(self._definitions.values(), key=lambda d: d.lemma.value)

    def definition(self, lemma: str) -> CheckDefinition:
        try:
            return self._definitions[LemmaId(lemma)]
        except (ValueError, KeyError):
            raise UnknownCheckError(lemma) from None

    def prepare(self, cfg: CheckConfig) -> CheckConfig:
        """Resolve derived parameters once per run; may raise ``ConfigurationError``."""
        hook = self._prepare.get(cfg.lemma)
        return hook(cfg) if hook is not None else cfg

    def invoke(self, cfg: CheckConfig, ctx: InstanceContext) -> InstanceResult:
        handler = self._handlers.get(cfg.lemma)
        if handler is None:
            raise UnknownCheckError(cfg.lemma)
        return handler(cfg, ctx)

    def is_registered(self, lemma: str) -> bool:
        return lemma in self._handlers


# Global singleton; check modules register against this instance at import time.
registry = CheckRegistry()
