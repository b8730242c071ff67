"""Command-line interface: validate, evaluate, simulate, delta, track, plotdata.

Simulation reports are split into a deterministic ``body`` (covered by a
SHA-256 content hash) and an unhashed envelope carrying wall-clock timing
and the worker count, so re-running with the recorded seed and iteration
count reproduces the hashed body byte for byte at any parallelism level.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Sequence, TextIO

from . import valuation as valuation_mod
from .benefits import BenefitItem, item_value_at
from .config import (
    ActualsRecord,
    Diagnostic,
    PortfolioConfig,
    has_errors,
    load_actuals,
    load_config,
)
from .costs import schedule_csv_rows, tco as costs_tco
from .distributions import percentile
from .engine import (
    IterationOutcome,
    Portfolio,
    SampleSummary,
    SimulationConfig,
    analytic_evaluate,
    run_simulation,
)
from .risk import delta_table
from .valuation import DiscountSpec, ValuationOutcome, ValuationReport

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3

REPORT_SCHEMA_VERSION = 1

# Currency-valued fields are rounded to 2 decimals at serialization only.
_CURRENCY_METRICS = {"net_risk_adjusted_benefit", "npv", "risk_delta"}

_DUMP_COLUMNS = (
    "iteration",
    "gross_benefits",
    "risk_reduction",
    "risk_increase",
    "tco_total",
    "risk_delta",
    "net_risk_adjusted_benefit",
    "npv",
    "roi_ratio",
    "irr",
    "payback_years",
)


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except BrokenPipeError:  # downstream closed the pipe; not our error
        return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="airoi",
        description="Risk-adjusted ROI analysis for AI investment portfolios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a portfolio config file")
    p_validate.add_argument("config")
    p_validate.set_defaults(handler=cmd_validate)

    p_evaluate = sub.add_parser("evaluate", help="deterministic mean-based valuation")
    p_evaluate.add_argument("config")
    p_evaluate.add_argument("--out", help="write the JSON report here instead of stdout")
    p_evaluate.add_argument(
        "--costs-csv",
        metavar="PATH",
        help="also write the analytic per-year cost schedule as CSV",
    )
    p_evaluate.set_defaults(handler=cmd_evaluate)

    p_simulate = sub.add_parser("simulate", help="Monte Carlo percentile report")
    p_simulate.add_argument("config")
    _add_simulation_flags(p_simulate)
    p_simulate.add_argument("--out", help="write the JSON report here instead of stdout")
    p_simulate.add_argument(
        "--dump-iterations",
        metavar="PATH",
        help="write one CSV row per iteration for external audit",
    )
    p_simulate.add_argument(
        "--metrics-csv",
        metavar="PATH",
        help="also write the per-metric percentile summary as CSV",
    )
    p_simulate.set_defaults(handler=cmd_simulate)

    p_delta = sub.add_parser("delta", help="per-scenario risk delta table (CSV)")
    p_delta.add_argument("config")
    p_delta.add_argument("--out", help="write the CSV here instead of stdout")
    p_delta.set_defaults(handler=cmd_delta)

    p_track = sub.add_parser("track", help="compare quarterly actuals against projections")
    p_track.add_argument("config")
    p_track.add_argument("actuals")
    p_track.add_argument("--out", help="write the CSV here instead of stdout")
    p_track.set_defaults(handler=cmd_track)

    p_plot = sub.add_parser("plotdata", help="histogram and CDF data for one metric (CSV)")
    p_plot.add_argument("config")
    p_plot.add_argument("--metric", required=True)
    _add_simulation_flags(p_plot)
    p_plot.add_argument("--out", help="write the CSV here instead of stdout")
    p_plot.set_defaults(handler=cmd_plotdata)
    return parser


def _add_simulation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--iterations", type=int, help="override the configured iteration count")
    parser.add_argument("--seed", type=int, help="override the configured master seed")
    parser.add_argument("--workers", help="worker processes: a positive integer or 'auto'")


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _print_diagnostics(diagnostics: Sequence[Diagnostic]) -> None:
    for diagnostic in diagnostics:
        print(diagnostic, file=sys.stderr)


def _load_or_fail(path: str) -> PortfolioConfig | None:
    config, diagnostics = load_config(path)
    _print_diagnostics(diagnostics)
    if config is None or has_errors(diagnostics):
        return None
    return config


def _resolve_simulation(config: PortfolioConfig, args) -> SimulationConfig | None:
    sim = config.simulation
    iterations = sim.iterations if args.iterations is None else args.iterations
    seed = sim.master_seed if args.seed is None else args.seed
    workers = sim.worker_count
    if args.workers is not None:
        if args.workers == "auto":
            workers = None
        else:
            try:
                workers = int(args.workers)
            except ValueError:
                print(f"error: --workers must be an integer or 'auto', got {args.workers!r}",
                      file=sys.stderr)
                return None
    if iterations < 1:
        print(f"error: iterations must be >= 1, got {iterations}", file=sys.stderr)
        return None
    if workers is not None and workers < 1:
        print(f"error: workers must be >= 1, got {workers}", file=sys.stderr)
        return None
    return SimulationConfig(
        iterations=iterations,
        master_seed=seed,
        worker_count=workers,
        target_relative_se=sim.target_relative_se,
    )


def _write_text(text: str, out: str | None) -> int:
    if out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        Path(out).write_text(text, "utf-8")
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _round_currency(value: float) -> float:
    return round(value, 2)


def _summary_dict(name: str, summary: SampleSummary) -> dict:
    as_is = {
        "n": summary.n,
        "mean": summary.mean,
        "standard_error": summary.standard_error,
        "p10": summary.p10,
        "p50": summary.p50,
        "p90": summary.p90,
        "min": summary.min,
        "max": summary.max,
    }
    if name in _CURRENCY_METRICS:
        for key in ("mean", "standard_error", "p10", "p50", "p90", "min", "max"):
            as_is[key] = _round_currency(as_is[key])
    return as_is


def _canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _body_hash(body: dict) -> str:
    return hashlib.sha256(_canonical_json(body).encode("utf-8")).hexdigest()


def _valuations(
    outcomes: Sequence[IterationOutcome], portfolio: Portfolio
) -> list[ValuationOutcome]:
    discount = DiscountSpec(portfolio.discount_rate)
    return [valuation_mod.evaluate_outcome(outcome, discount) for outcome in outcomes]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    config, diagnostics = load_config(args.config)
    _print_diagnostics(diagnostics)
    if config is None or has_errors(diagnostics):
        return EXIT_VALIDATION
    warnings = sum(1 for d in diagnostics if d.severity == "warning")
    print(f"{args.config}: valid ({warnings} warning(s))")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    config = _load_or_fail(args.config)
    if config is None:
        return EXIT_VALIDATION
    portfolio = config.portfolio
    outcome = analytic_evaluate(portfolio)
    valuation = valuation_mod.evaluate_outcome(outcome, DiscountSpec(portfolio.discount_rate))
    if args.costs_csv:
        schedule = costs_tco(
            portfolio.capex, portfolio.opex, portfolio.cost_rules, portfolio.horizon_years
        )
        status = _write_csv(schedule_csv_rows(schedule), args.costs_csv)
        if status != EXIT_OK:
            return status
    body = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "report_kind": "analytic_evaluation",
        "config": _config_block(config),
        "valuation": {
            "net_risk_adjusted_benefit": _round_currency(valuation.net_risk_adjusted_benefit),
            "roi_ratio": valuation.roi_ratio,
            "npv": _round_currency(valuation.npv),
            "irr": valuation.irr,
            "payback_years": valuation.payback_years,
            "risk_delta": _round_currency(valuation.risk_delta),
            "gross_benefits": _round_currency(outcome.gross_benefits),
            "risk_reduction": _round_currency(outcome.risk_reduction),
            "risk_increase": _round_currency(outcome.risk_increase),
            "tco_total": _round_currency(outcome.tco_total),
        },
        "notes": _report_notes(),
    }
    report = {"body": body, "body_sha256": _body_hash(body)}
    return _write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)


def cmd_simulate(args) -> int:
    config = _load_or_fail(args.config)
    if config is None:
        return EXIT_VALIDATION
    sim = _resolve_simulation(config, args)
    if sim is None:
        return EXIT_VALIDATION
    portfolio = config.portfolio

    started = time.perf_counter()
    result = run_simulation(portfolio, sim)
    valuations = _valuations(result.outcomes, portfolio)
    report = valuation_mod.build_report(valuations)
    elapsed = time.perf_counter() - started

    if args.dump_iterations:
        status = _dump_iterations(args.dump_iterations, result.outcomes, valuations)
        if status != EXIT_OK:
            return status
    if args.metrics_csv:
        status = _write_csv(_metric_csv_rows(report), args.metrics_csv)
        if status != EXIT_OK:
            return status

    body = _simulation_body(config, sim, report, executed_iterations=len(result.outcomes))
    envelope = {
        "body": body,
        "body_sha256": _body_hash(body),
        "timing": {"elapsed_seconds": elapsed},
        "worker_count": sim.worker_count if sim.worker_count is not None else "auto",
    }
    return _write_text(json.dumps(envelope, indent=2, sort_keys=True) + "\n", args.out)


def _config_block(config: PortfolioConfig) -> dict:
    portfolio = config.portfolio
    return {
        "name": portfolio.name,
        "sha256": config.content_hash,
        "currency": portfolio.currency,
        "horizon_years": portfolio.horizon_years,
        "discount_rate": portfolio.discount_rate,
    }


def _report_notes() -> dict:
    return {
        "roi_ratio_definition": (
            "net_risk_adjusted_benefit / discounted total cost of ownership"
        ),
        "payback_basis": "cash (capex booked in its incurred year)",
    }


def _simulation_body(
    config: PortfolioConfig,
    sim: SimulationConfig,
    report: ValuationReport,
    executed_iterations: int,
) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "report_kind": "simulation",
        "config": _config_block(config),
        "simulation": {
            "master_seed": sim.master_seed,
            "iterations": executed_iterations,
            "requested_iterations": sim.iterations,
        },
        "metrics": {
            name: _summary_dict(name, summary) for name, summary in report.metrics.items()
        },
        "exclusions": report.exclusions,
        "irr_multiple_root_iterations": report.irr_multiple_root_iterations,
        "notes": _report_notes(),
    }


def _metric_csv_rows(report: ValuationReport) -> list[list]:
    rows: list[list] = [
        ["metric", "n", "mean", "standard_error", "p10", "p50", "p90", "min", "max", "excluded"]
    ]
    for name in valuation_mod.REPORT_METRICS:
        summary = report.metrics.get(name)
        if summary is None:
            continue
        serialized = _summary_dict(name, summary)
        rows.append(
            [
                name,
                serialized["n"],
                serialized["mean"],
                serialized["standard_error"],
                serialized["p10"],
                serialized["p50"],
                serialized["p90"],
                serialized["min"],
                serialized["max"],
                report.exclusions.get(name, 0),
            ]
        )
    return rows


def _dump_iterations(
    path: str,
    outcomes: Sequence[IterationOutcome],
    valuations: Sequence[ValuationOutcome],
) -> int:
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(_DUMP_COLUMNS)
            for outcome, valuation in zip(outcomes, valuations):
                writer.writerow(
                    [
                        outcome.index,
                        outcome.gross_benefits,
                        outcome.risk_reduction,
                        outcome.risk_increase,
                        outcome.tco_total,
                        outcome.risk_delta,
                        valuation.net_risk_adjusted_benefit,
                        valuation.npv,
                        "" if valuation.roi_ratio is None else valuation.roi_ratio,
                        "" if valuation.irr is None else valuation.irr,
                        "" if valuation.payback_years is None else valuation.payback_years,
                    ]
                )
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_delta(args) -> int:
    config = _load_or_fail(args.config)
    if config is None:
        return EXIT_VALIDATION
    rows = delta_table(config.portfolio.register)
    lines = [["scenario_id", "classification", "ale_current", "ale_ai", "delta"]]
    total_current = total_ai = total_delta = 0.0
    for scenario_id, classification, ale_current, ale_ai, delta in rows:
        total_current += ale_current
        total_ai += ale_ai
        total_delta += delta
        lines.append(
            [
                scenario_id,
                classification,
                f"{ale_current:.2f}",
                f"{ale_ai:.2f}",
                f"{delta:.2f}",
            ]
        )
    lines.append(
        ["TOTAL", "", f"{total_current:.2f}", f"{total_ai:.2f}", f"{total_delta:.2f}"]
    )
    return _write_csv(lines, args.out)


def _write_csv(rows: Sequence[Sequence], out: str | None) -> int:
    def emit(handle: TextIO) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerows(rows)

    if out is None:
        emit(sys.stdout)
        return EXIT_OK
    try:
        with open(out, "w", newline="") as handle:
            emit(handle)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


# -- track -------------------------------------------------------------------


def cmd_track(args) -> int:
    config = _load_or_fail(args.config)
    if config is None:
        return EXIT_VALIDATION
    records, diagnostics = load_actuals(args.actuals, config)
    _print_diagnostics(diagnostics)
    if has_errors(diagnostics):
        return EXIT_VALIDATION

    portfolio = config.portfolio
    result = run_simulation(portfolio, config.simulation)
    bands = _tracking_bands(result.outcomes)
    analytic = analytic_evaluate(portfolio)

    rows = [
        [
            "period",
            "record_type",
            "id",
            "projected",
            "actual",
            "variance",
            "band_low",
            "band_high",
            "flagged",
        ]
    ]
    for record in records:
        rows.extend(_track_record_rows(record, portfolio, analytic, bands))
    return _write_csv(rows, args.out)


def _tracking_bands(
    outcomes: Sequence[IterationOutcome],
) -> dict[tuple[str, str], tuple[float, float]]:
    """[p10, p90] band of each item's simulated annual value."""
    bands: dict[tuple[str, str], tuple[float, float]] = {}
    if not outcomes:
        return bands
    first = outcomes[0]
    for item_id in first.benefit_values:
        values = sorted(o.benefit_values[item_id] for o in outcomes)
        bands[("benefit", item_id)] = (percentile(values, 0.10), percentile(values, 0.90))
    for item_id in first.cost_values:
        values = sorted(o.cost_values[item_id] for o in outcomes)
        bands[("cost", item_id)] = (percentile(values, 0.10), percentile(values, 0.90))
    for item_id in first.scenario_losses:
        values = sorted(o.scenario_losses[item_id][1] for o in outcomes)
        bands[("loss", item_id)] = (percentile(values, 0.10), percentile(values, 0.90))
    return bands


def _track_record_rows(
    record: ActualsRecord,
    portfolio: Portfolio,
    analytic: IterationOutcome,
    bands: dict[tuple[str, str], tuple[float, float]],
) -> list[list]:
    period = f"Y{record.year}Q{record.quarter}"
    year = record.year
    rows: list[list] = []

    benefit_items = {item.id: item for item in portfolio.benefits}
    for item_id, actual in sorted(record.benefits.items()):
        item = benefit_items[item_id]
        base = analytic.benefit_values[item_id]
        annual = item_value_at(item, year, base)
        factor = _decay_factor(item, year)
        band_low, band_high = bands.get(("benefit", item_id), (annual, annual))
        rows.append(
            _variance_row(
                period,
                "benefit",
                item_id,
                annual / 4.0,
                actual,
                band_low * factor / 4.0,
                band_high * factor / 4.0,
            )
        )

    capex_items = {item.id: item for item in portfolio.capex}
    opex_spans = {
        item.id: (item.start_year, item.end_year) for item in portfolio.opex
    }
    for item_id, actual in sorted(record.costs.items()):
        if item_id in capex_items:
            active = capex_items[item_id].incurred_year == year
        else:
            start, end = opex_spans[item_id]
            active = start <= year <= end
        annual = analytic.cost_values[item_id] if active else 0.0
        band_low, band_high = (
            bands.get(("cost", item_id), (annual, annual)) if active else (0.0, 0.0)
        )
        rows.append(
            _variance_row(
                period, "cost", item_id, annual / 4.0, actual, band_low / 4.0, band_high / 4.0
            )
        )

    for item_id, loss in sorted(record.losses.items()):
        annual = analytic.scenario_losses[item_id][1]  # post-implementation state
        band_low, band_high = bands.get(("loss", item_id), (annual, annual))
        rows.append(
            _variance_row(
                period,
                "loss",
                item_id,
                annual / 4.0,
                loss.total_loss,
                band_low / 4.0,
                band_high / 4.0,
            )
        )
    return rows


def _decay_factor(item: BenefitItem, year: int) -> float:
    if year < item.start_year or year > item.end_year:
        return 0.0
    if item.erosion_rate > 0 and year > item.start_year:
        return (1.0 - item.erosion_rate) ** (year - item.start_year)
    return 1.0


def _variance_row(
    period: str,
    record_type: str,
    item_id: str,
    projected: float,
    actual: float,
    band_low: float,
    band_high: float,
) -> list:
    flagged = not (band_low <= actual <= band_high)
    return [
        period,
        record_type,
        item_id,
        f"{projected:.2f}",
        f"{actual:.2f}",
        f"{actual - projected:.2f}",
        f"{band_low:.2f}",
        f"{band_high:.2f}",
        "yes" if flagged else "no",
    ]


# -- plotdata ----------------------------------------------------------------

_PLOT_BINS = 50


def cmd_plotdata(args) -> int:
    config = _load_or_fail(args.config)
    if config is None:
        return EXIT_VALIDATION
    metric = args.metric
    if metric not in valuation_mod.REPORT_METRICS:
        print(
            f"error: unknown metric {metric!r}; valid metrics: "
            + ", ".join(valuation_mod.REPORT_METRICS),
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    sim = _resolve_simulation(config, args)
    if sim is None:
        return EXIT_VALIDATION
    result = run_simulation(config.portfolio, sim)
    valuations = _valuations(result.outcomes, config.portfolio)
    values = sorted(v for v in (getattr(o, metric) for o in valuations) if v is not None)
    if not values:
        print(f"error: metric {metric!r} is undefined for every iteration", file=sys.stderr)
        return EXIT_VALIDATION

    rows = [["kind", "x0", "x1", "value"]]
    low, high = values[0], values[-1]
    if low == high:
        rows.append(["bin", f"{low!r}", f"{high!r}", len(values)])
        rows.append(["cdf", f"{high!r}", "", 1.0])
    else:
        width = (high - low) / _PLOT_BINS
        edges = [low + i * width for i in range(_PLOT_BINS)] + [high]
        counts = [0] * _PLOT_BINS
        for value in values:
            slot = min(int((value - low) / width), _PLOT_BINS - 1)
            counts[slot] += 1
        for i in range(_PLOT_BINS):
            rows.append(["bin", f"{edges[i]!r}", f"{edges[i + 1]!r}", counts[i]])
        cumulative = 0
        for i in range(_PLOT_BINS):
            cumulative += counts[i]
            rows.append(["cdf", f"{edges[i + 1]!r}", "", cumulative / len(values)])
    return _write_csv(rows, args.out)


if __name__ == "__main__":
    sys.exit(main())
