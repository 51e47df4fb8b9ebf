"""Check harness: runs the randomized instances of one check and aggregates them into a report."""

import asyncio
import logging
import math
import time
from dataclasses import dataclass
from typing import Any

import numpy as np

from verifier.checks import registry
from verifier.checks.registry import InstanceContext, InstanceResult
from verifier.constants import DEGENERATE_DENOMINATOR, CheckKind, check_salt
from verifier.schemas import BatchStabilityReport, CheckConfig, CheckReport, InstanceRow, StabilityReport
from verifier.settings import VerifierSettings

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class RunOutcome:
    """Per-instance results in index order; ``None`` marks an instance that raised."""

    results: list[InstanceResult | None]
    instances: int

    @property
    def errors(self) -> int:
        return sum(r is None for r in self.results)

    def worst(self) -> tuple[int, InstanceResult] | None:
        """First violating instance if any, otherwise the largest finite ratio."""
        for index, result in enumerate(self.results):
            if result is not None and result.violation:
                return index, result
        ranked = [
            (ratio, index)
            for index, result in enumerate(self.results)
            if result is not None and (ratio := result.ratio) is not None and math.isfinite(ratio)
        ]
        if not ranked:
            return None
        _, index = max(ranked, key=lambda pair: pair[0])
        chosen = self.results[index]
        assert chosen is not None
        return index, chosen

    def worst_ratio(self) -> float | None:
        ratios = [r.ratio for r in self.results if r is not None and r.ratio is not None and math.isfinite(r.ratio)]
        return max(ratios, default=None)

    def batch_maxima(self, statistic: str, plain: int) -> list[float | None]:
        """Maximum of one extra over the first and over the second half of the plain instances."""
        maxima: list[float | None] = [None, None]
        for index, result in enumerate(self.results[:plain]):
            if result is None or result.skipped or statistic not in result.extras:
                continue
            value = result.extras[statistic]
            if not math.isfinite(value):
                continue
            batch = 0 if index < plain // 2 else 1
            current = maxima[batch]
            maxima[batch] = value if current is None else max(current, value)
        return maxima


def instance_rng(cfg: CheckConfig, index: int) -> np.random.Generator:
    """Generator for one instance, depending only on the master seed, the check, its scale and the index."""
    return np.random.default_rng([cfg.seed, check_salt(cfg.lemma, cfg.scale), index])


def stability_of(base: float | None, doubled: float | None, factor: float) -> StabilityReport:
    if base is None or doubled is None:
        growth = None
    elif base <= DEGENERATE_DENOMINATOR:
        growth = 1.0 if doubled <= DEGENERATE_DENOMINATOR else math.inf
    else:
        growth = doubled / base
    stable = growth is None or growth < factor
    return StabilityReport(base=base, doubled=doubled, growth=growth, factor=factor, stable=stable)


def batch_stability_of(statistic: str, batches: list[float | None], tolerance: float) -> BatchStabilityReport:
    """Relative gap ``|b0 - b1| / max(b0, b1)`` between the two batch values; an empty batch is not compared."""
    first, second = batches
    if first is None or second is None:
        spread = None
    else:
        top = max(abs(first), abs(second))
        spread = abs(first - second) / top if top > DEGENERATE_DENOMINATOR else 0.0
    stable = spread is None or spread <= tolerance
    return BatchStabilityReport(statistic=statistic, batches=batches, spread=spread, tolerance=tolerance, stable=stable)


class CheckHarness:
    """Runs one check over its instance corpus with at most ``jobs`` instances in flight."""

    def __init__(self, settings: VerifierSettings, jobs: int | None = None) -> None:
        self._settings = settings
        self._jobs = jobs or settings.JOBS
        self._semaphore = asyncio.Semaphore(self._jobs)

    async def run(self, cfg: CheckConfig) -> CheckReport:
        """Prepare the configuration, run every instance, and for estimate checks the doubled size."""
        definition = registry.definition(cfg.lemma)
        cfg = registry.prepare(cfg)
        logger.info(
            "Running %s: %d instances + %d searched (jobs=%d)",
            cfg.lemma,
            cfg.instances,
            cfg.searches,
            self._jobs,
            extra={"lemma": str(cfg.lemma), "seed": cfg.seed},
        )
        start = time.perf_counter()
        outcome = await self._run_instances(cfg)

        stability = None
        if definition.kind == CheckKind.ESTIMATE:
            doubled = await self._run_instances(cfg.model_copy(update={"scale": cfg.scale * 2}))
            stability = stability_of(outcome.worst_ratio(), doubled.worst_ratio(), cfg.stability_factor)
            if not stability.stable:
                logger.warning("%s constant grew by %s when the size doubled", cfg.lemma, stability.growth)

        batches = None
        if definition.batch_statistic is not None:
            statistic = definition.batch_statistic
            batches = batch_stability_of(statistic, outcome.batch_maxima(statistic, cfg.instances), cfg.batch_tolerance)
            if not batches.stable:
                logger.warning("%s %s differs by %s between seed batches", cfg.lemma, statistic, batches.spread)

        runtime_ms = (time.perf_counter() - start) * 1000.0 if self._settings.REPORT_RUNTIME else None
        report = self._aggregate(cfg, definition.kind, outcome, stability, batches, runtime_ms)
        logger.info(
            "Finished %s: %d violations, %d skipped, %d errors, worst ratio %s",
            cfg.lemma,
            report.violations,
            report.skipped,
            report.errors,
            report.worst_ratio,
            extra={"lemma": str(cfg.lemma), "seed": cfg.seed},
        )
        return report

    async def _run_instances(self, cfg: CheckConfig) -> RunOutcome:
        total = cfg.instances + cfg.searches
        indices = list(range(total))
        tasks = [self._run_one(cfg, index, searched=index >= cfg.instances) for index in indices]
        gathered = await asyncio.gather(*tasks, return_exceptions=True)

        results: list[InstanceResult | None] = []
        for index, result in zip(indices, gathered, strict=True):
            if isinstance(result, BaseException):
                logger.error(
                    "Instance %d of %s raised: %s",
                    index,
                    cfg.lemma,
                    result,
                    extra={"lemma": str(cfg.lemma), "instance": index, "seed": cfg.seed},
                    exc_info=result,
                )
                results.append(None)
            else:
                results.append(result)
        return RunOutcome(results=results, instances=total)

    async def _run_one(self, cfg: CheckConfig, index: int, *, searched: bool) -> InstanceResult:
        async with self._semaphore:
            ctx = InstanceContext(index=index, rng=instance_rng(cfg, index), searched=searched)
            return await asyncio.to_thread(registry.invoke, cfg, ctx)

    def _aggregate(
        self,
        cfg: CheckConfig,
        kind: CheckKind,
        outcome: RunOutcome,
        stability: StabilityReport | None,
        batches: BatchStabilityReport | None,
        runtime_ms: float | None,
    ) -> CheckReport:
        rows = []
        extras: dict[str, float] = {}
        for index, result in enumerate(outcome.results):
            if result is None:
                continue
            rows.append(
                InstanceRow(
                    instance=index,
                    lhs=result.lhs,
                    rhs=result.rhs,
                    ratio=result.ratio,
                    skipped=result.skipped,
                    violation=result.violation,
                    searched=index >= cfg.instances,
                )
            )
            if result.skipped:
                continue
            for key, value in result.extras.items():
                if math.isfinite(value):
                    extras[key] = max(extras.get(key, value), value)

        witness: dict[str, Any] | None = None
        worst = outcome.worst()
        if worst is not None:
            witness = {"instance": worst[0], **worst[1].witness}

        worst_ratio = outcome.worst_ratio()
        return CheckReport(
            lemma=cfg.lemma,
            kind=kind,
            instances=outcome.instances,
            violations=sum(row.violation for row in rows),
            worst_ratio=worst_ratio,
            estimated_constant=worst_ratio if kind == CheckKind.ESTIMATE else None,
            witness=witness,
            runtime_ms=runtime_ms,
            config_echo=cfg.model_dump(mode="json"),
            skipped=sum(row.skipped for row in rows),
            errors=outcome.errors,
            extras=dict(sorted(extras.items())),
            stability=stability,
            batch_stability=batches,
            rows=rows,
        )
