"""Command-line entry point: run checks, estimate constants, build symbols and decompose martingales."""

import argparse
import asyncio
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from harmonic.exceptions import HarmonicError
from harmonic.martingale import atomic_decompose, h1_delta_norm
from harmonic.schemas import (
    DyadicFunctionDocument,
    decomposition_document,
    dyadic_from_document,
    idem_set_document,
    symbol_document,
)
from harmonic.symbols import IdemSet2D, build_K_hat, build_mu_eps, lacunary_check
from verifier.checks import registry
from verifier.constants import BuildObject, EstimateTarget, ExitCode, LemmaId, ReportFormat
from verifier.exceptions import ConfigurationError, UnknownCheckError
from verifier.harness import CheckHarness
from verifier.logging import configure_logging
from verifier.reporting import render_csv, render_document, render_json
from verifier.schemas import CheckConfig, CheckReport
from verifier.settings import VerifierSettings, get_settings

logger = logging.getLogger(__name__)

SIGN_TOKENS = {"+": 1, "-": -1, "+1": 1, "-1": -1, "1": 1}


# --- Argument parsing ---


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _sign_list(text: str) -> list[int]:
    tokens = [v.strip() for v in text.split(",") if v.strip()]
    if any(t not in SIGN_TOKENS for t in tokens):
        raise argparse.ArgumentTypeError(f"signs must be + or -, got {text!r}")
    return [SIGN_TOKENS[t] for t in tokens]


def _pair(text: str) -> tuple[int, int]:
    values = _int_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected n1,n2, got {text!r}")
    return values[0], values[1]


def parse_value(text: str) -> Any:
    """A ``--set`` value: JSON if it parses, else a comma list of JSON scalars, else the raw string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    if "," in text:
        return [parse_value(part) for part in text.split(",") if part]
    return text


def parse_overrides(items: Sequence[str]) -> dict[str, Any]:
    overrides = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"--set expects key=value, got {item!r}")
        overrides[key.strip()] = parse_value(value.strip())
    return overrides


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON file with CheckConfig keys")
    parser.add_argument("--seed", type=int, help="master seed (required)")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    parser.add_argument("--out", type=Path, help="report path (default: REPORT_DIR/<lemma>.<format>)")
    parser.add_argument("--format", type=ReportFormat, choices=list(ReportFormat), default=ReportFormat.JSON)
    parser.add_argument("--jobs", type=int, help="instances run concurrently")
    _add_system_options(parser)
    parser.add_argument("--s", type=int, help="index shift s")
    parser.add_argument("--beta", type=float)
    parser.add_argument("--eps", type=_float_list)


def _add_system_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--d", type=_int_list, help="lacunary sequence, e.g. 2,4,8")
    parser.add_argument("--N", type=_int_list, help="divisors N_k")
    parser.add_argument("--signs", type=_sign_list, help="signs, e.g. +,-,+")
    parser.add_argument("--c-alpha-est", dest="c_alpha_est", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="h1lab", description="Randomized numerical checks of H1 multiplier estimates.")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="run a check and write its report")
    check.add_argument("lemma")
    _add_run_options(check)

    estimate = commands.add_parser("estimate", help="estimate an implied constant")
    estimate.add_argument("target")
    _add_run_options(estimate)

    build = commands.add_parser("build", help="serialize a symbol or the 2D idempotent set")
    build.add_argument("object", type=BuildObject, choices=list(BuildObject))
    _add_system_options(build)
    build.add_argument("--contains", type=_pair, action="append", default=[], metavar="N1,N2")
    build.add_argument("--out", type=Path)

    decompose = commands.add_parser("decompose", help="atomic decomposition of a dyadic function")
    decompose.add_argument("input", type=Path)
    decompose.add_argument("--out", type=Path)

    commands.add_parser("list", help="list registered checks")
    return parser


# --- Commands ---


def resolve_config(lemma: str, args: argparse.Namespace) -> CheckConfig:
    """Registry defaults < config file < --set < explicit flags."""
    definition = registry.definition(lemma)
    values: dict[str, Any] = {"lemma": definition.lemma, **definition.defaults}
    if args.config is not None:
        try:
            loaded = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"Cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"Config {args.config} must hold a JSON object")
        values.update(loaded)
    values.update(parse_overrides(args.overrides))
    flags = {
        name: getattr(args, name)
        for name in ("seed", "d", "N", "signs", "c_alpha_est", "s", "beta", "eps")
        if getattr(args, name) is not None
    }
    values.update(flags)
    values["lemma"] = definition.lemma
    return CheckConfig.model_validate(values)


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def _emit_report(report: CheckReport, args: argparse.Namespace, settings: VerifierSettings) -> None:
    digits = settings.FLOAT_DIGITS
    text = render_csv(report, digits) if args.format == ReportFormat.CSV else render_json(report, digits)
    out = args.out or Path(settings.REPORT_DIR) / f"{report.lemma}.{args.format}"
    _write(text, out)
    print(
        f"{report.lemma}: {'PASS' if report.passed else 'FAIL'} "
        f"instances={report.instances} violations={report.violations} skipped={report.skipped} "
        f"errors={report.errors} worst_ratio={report.worst_ratio} estimated_constant={report.estimated_constant} "
        f"-> {out}"
    )


def cmd_run(lemma: str, args: argparse.Namespace, settings: VerifierSettings) -> int:
    cfg = resolve_config(lemma, args)
    report = asyncio.run(CheckHarness(settings, jobs=args.jobs).run(cfg))
    _emit_report(report, args, settings)
    return ExitCode.OK if report.passed else ExitCode.VIOLATION


def cmd_estimate(target: str, args: argparse.Namespace, settings: VerifierSettings) -> int:
    try:
        EstimateTarget(target)
    except ValueError:
        raise UnknownCheckError(target) from None
    return cmd_run(target, args, settings)


def cmd_build(args: argparse.Namespace, settings: VerifierSettings) -> int:
    if args.d is None:
        raise ConfigurationError(f"build {args.object} needs --d")
    match args.object:
        case BuildObject.MU_EPS:
            system = lacunary_check(args.d, args.c_alpha_est)
            signs = args.signs if args.signs is not None else [1] * len(args.d)
            document = symbol_document(system, build_mu_eps(system, signs)).model_dump(mode="json")
        case BuildObject.K_HAT:
            system = lacunary_check(args.d, args.c_alpha_est)
            document = symbol_document(system, build_K_hat(system)).model_dump(mode="json")
        case BuildObject.IDEM_SET:
            if args.N is None:
                raise ConfigurationError("build idem-set needs --N")
            document = idem_set_document(IdemSet2D.of(args.d, args.N), args.contains).model_dump(mode="json")
    _write(render_document(document, settings.FLOAT_DIGITS), args.out)
    return ExitCode.OK


def cmd_decompose(args: argparse.Namespace, settings: VerifierSettings) -> int:
    try:
        doc = DyadicFunctionDocument.model_validate_json(args.input.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"Cannot read {args.input}: {exc}") from exc
    f = dyadic_from_document(doc)
    decomposition = atomic_decompose(f)
    norm = h1_delta_norm(f)
    result = decomposition_document(decomposition, norm)
    out = args.out or Path(settings.REPORT_DIR) / "decomposition.json"
    _write(render_document(result.model_dump(mode="json"), settings.FLOAT_DIGITS), out)
    print(
        f"atoms={len(decomposition)} sum_c={result.coefficient_sum!r} "
        f"h1_delta_norm={result.h1_delta_norm!r} ratio={result.ratio!r} -> {out}"
    )
    return ExitCode.OK


def cmd_list() -> int:
    for definition in registry.get_catalog():
        print(f"{definition.lemma.value:<16} {definition.kind.value:<9} {definition.description}")
    return ExitCode.OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ExitCode.OK if exc.code == 0 else ExitCode.CONFIGURATION

    settings = get_settings()
    configure_logging(level=settings.LOG_LEVEL, fmt=settings.LOG_FORMAT)
    try:
        match args.command:
            case "check":
                return cmd_run(args.lemma, args, settings)
            case "estimate":
                return cmd_estimate(args.target, args, settings)
            case "build":
                return cmd_build(args, settings)
            case "decompose":
                return cmd_decompose(args, settings)
            case _:
                return cmd_list()
    except UnknownCheckError as exc:
        logger.error("%s (known: %s)", exc, ", ".join(LemmaId))
        return ExitCode.CONFIGURATION
    except (ConfigurationError, ValidationError, HarmonicError, ValueError) as exc:
        logger.error("Configuration error: %s", exc)
        return ExitCode.CONFIGURATION


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
