"""Monte Carlo orchestration over a full portfolio model.

Every uncertain input owns a named substream keyed by its stable item id,
and each iteration derives its generators independently, so results are
identical for any worker count and unchanged for existing items when new
ones are added.  Outcomes are ordered by iteration index.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from . import benefits as benefits_mod
from . import costs as costs_mod
from . import risk as risk_mod
from .benefits import BenefitItem
from .costs import CapexItem, CostRules, OpexItem
from .distributions import (
    SubstreamSampler,
    is_degenerate,
    make_batch_sampler,
    make_count_sampler,
    make_sampler,
    mean,
    percentile,
    stream_words,
)
from .risk import RiskRegister

# Engine-level metrics summarized directly from iteration outcomes.
ENGINE_METRICS = (
    "gross_benefits",
    "risk_reduction",
    "risk_increase",
    "tco_total",
    "risk_delta",
)

_EARLY_STOP_BLOCK = 1000


@dataclass(frozen=True)
class SimulationConfig:
    iterations: int = 10_000
    master_seed: int = 0
    worker_count: int | None = 1  # None selects the host CPU count
    target_relative_se: float | None = None


@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    standard_error: float
    p10: float
    p50: float
    p90: float
    min: float
    max: float


@dataclass(frozen=True)
class IterationOutcome:
    """One iteration's sampled financial state.

    ``cash_flows`` spreads capital costs straight-line (NPV/ROI basis);
    ``cash_basis_flows`` books capex in the incurred year (payback/IRR
    basis).  Risk deltas enter both as a constant annual amount.
    """

    index: int
    gross_benefits: float
    risk_reduction: float
    risk_increase: float
    tco_total: float
    risk_delta: float
    cash_flows: tuple[float, ...]
    cash_basis_flows: tuple[float, ...]
    tco_per_year: tuple[float, ...]
    benefit_values: dict[str, float]
    cost_values: dict[str, float]
    scenario_losses: dict[str, tuple[float, float]]


@dataclass(frozen=True)
class Portfolio:
    """The full model: benefit items, cost items and rules, risk register."""

    name: str
    currency: str
    horizon_years: int
    discount_rate: float
    benefits: tuple[BenefitItem, ...] = ()
    capex: tuple[CapexItem, ...] = ()
    opex: tuple[OpexItem, ...] = ()
    cost_rules: CostRules = CostRules()
    register: RiskRegister = RiskRegister()


@dataclass
class SimulationResult:
    outcomes: list[IterationOutcome]
    summaries: dict[str, SampleSummary]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_portfolio(portfolio: Portfolio) -> tuple[list[str], list[str]]:
    """Structural checks; returns (errors, warnings)."""
    errors: list[str] = []
    warnings: list[str] = []
    if portfolio.horizon_years < 1:
        errors.append(f"horizon_years must be >= 1, got {portfolio.horizon_years}")
    if not math.isfinite(portfolio.discount_rate) or portfolio.discount_rate < 0:
        errors.append(f"discount_rate must be finite and >= 0, got {portfolio.discount_rate}")
    if not portfolio.currency or not isinstance(portfolio.currency, str):
        errors.append("currency must be a single nonempty code")

    seen_benefits: set[str] = set()
    for item in portfolio.benefits:
        if item.id in seen_benefits:
            errors.append(f"duplicate benefit id {item.id!r}")
        seen_benefits.add(item.id)
        errors.extend(benefits_mod.validate_item(item, portfolio.horizon_years))

    seen_costs: set[str] = set()
    for capex_item in portfolio.capex:
        if capex_item.id in seen_costs:
            errors.append(f"duplicate cost id {capex_item.id!r}")
        seen_costs.add(capex_item.id)
        errors.extend(costs_mod.validate_capex(capex_item))
        if capex_item.incurred_year >= portfolio.horizon_years:
            warnings.append(
                f"capex {capex_item.id!r} is incurred in year {capex_item.incurred_year}, "
                f"beyond the horizon, and contributes nothing"
            )
    for opex_item in portfolio.opex:
        if opex_item.id in seen_costs:
            errors.append(f"duplicate cost id {opex_item.id!r}")
        seen_costs.add(opex_item.id)
        errors.extend(costs_mod.validate_opex(opex_item))

    rule_errors, rule_warnings = costs_mod.validate_cost_rules(portfolio.cost_rules)
    errors.extend(rule_errors)
    warnings.extend(rule_warnings)

    errors.extend(risk_mod.validate_register(portfolio.register))

    if portfolio.register.scenarios and any(
        item.kind == "risk_reduction_external" for item in portfolio.benefits
    ):
        warnings.append(
            "portfolio mixes risk_reduction_external benefit items with risk "
            "scenarios; check that the same loss is not counted twice"
        )
    return errors, warnings


# ---------------------------------------------------------------------------
# Substream plan
# ---------------------------------------------------------------------------


def benefit_stream_key(item_id: str) -> str:
    return f"benefit:{item_id}"


def capex_stream_key(item_id: str) -> str:
    return f"cost:capex:{item_id}"


def opex_stream_key(item_id: str) -> str:
    return f"cost:opex:{item_id}"


def risk_stream_key(scenario_id: str, state: str) -> str:
    return f"risk:{scenario_id}:{state}"


class _CompiledModel:
    """Per-run plan: stream words and draw closures resolved once.

    The compiled iteration path reproduces, operation for operation, what
    the module-level pipeline (``benefit_schedule`` + ``tco_pair`` +
    ``ale_simulate``) computes from the same sampled values.
    """

    __slots__ = (
        "portfolio",
        "horizon",
        "benefit_plan",
        "capex_plan",
        "opex_plan",
        "risk_plan",
        "rules",
    )

    def __init__(self, portfolio: Portfolio, master_seed: int):
        self.portfolio = portfolio
        self.horizon = portfolio.horizon_years
        self.rules = portfolio.cost_rules
        # Benefit plan: (id, words, draw, attribution, window, decay factors).
        # Degenerate quantities carry words=None: they consume no randomness,
        # so positioning their stream is skipped.
        self.benefit_plan = []
        for item in portfolio.benefits:
            first = max(item.start_year, 0)
            last = min(item.end_year, self.horizon - 1)
            decays = tuple(
                (1.0 - item.erosion_rate) ** (t - item.start_year)
                if item.erosion_rate > 0 and t > item.start_year
                else 1.0
                for t in range(first, last + 1)
            )
            self.benefit_plan.append(
                (
                    item.id,
                    None
                    if is_degenerate(item.annual_value)
                    else stream_words(master_seed, benefit_stream_key(item.id)),
                    make_sampler(item.annual_value),
                    item.attribution_factor,
                    first,
                    decays,
                )
            )
        # Capex plan: (id, words, draw, incurred, amortized year span, life, dev?).
        self.capex_plan = []
        for item in portfolio.capex:
            self.capex_plan.append(
                (
                    item.id,
                    None
                    if is_degenerate(item.amount)
                    else stream_words(master_seed, capex_stream_key(item.id)),
                    make_sampler(item.amount),
                    item.incurred_year,
                    min(item.incurred_year + item.useful_life_years, self.horizon),
                    item.useful_life_years,
                    item.category == "development",
                )
            )
        # Opex plan: (id, words, draw, premium multiplier, first, last).
        self.opex_plan = []
        for item in portfolio.opex:
            multiplier = (
                1.0 + portfolio.cost_rules.talent_premium_rate
                if item.category == "personnel" and item.specialist
                else 1.0
            )
            self.opex_plan.append(
                (
                    item.id,
                    None
                    if is_degenerate(item.annual_amount)
                    else stream_words(master_seed, opex_stream_key(item.id)),
                    make_sampler(item.annual_amount),
                    multiplier,
                    max(item.start_year, 0),
                    min(item.end_year, self.horizon - 1),
                )
            )
        # Risk plan: per scenario, compiled (state, words, count draw,
        # severity batch) for each applicable state; stream consumption
        # matches ale_simulate exactly (count first, then the batch).
        self.risk_plan = []
        for scenario in portfolio.register.scenarios:
            states = []
            for state in ("current", "ai"):
                freq = scenario.frequency_for(state)
                if freq is None:
                    continue
                states.append(
                    (
                        state,
                        stream_words(master_seed, risk_stream_key(scenario.id, state)),
                        make_count_sampler(freq),
                        make_batch_sampler(scenario.sle),
                    )
                )
            self.risk_plan.append((scenario.id, tuple(states)))


def _assemble(
    portfolio: Portfolio,
    index: int,
    benefit_row: Sequence[float],
    schedule: costs_mod.CostSchedule,
    cash_schedule: costs_mod.CostSchedule,
    benefit_values: dict[str, float],
    cost_values: dict[str, float],
    scenario_losses: dict[str, tuple[float, float]],
) -> IterationOutcome:
    """Compose one outcome from prebuilt benefit and cost rows."""
    horizon = portfolio.horizon_years
    reduction_annual = 0.0
    increase_annual = 0.0
    for loss_current, loss_ai in scenario_losses.values():
        delta = loss_current - loss_ai
        if delta >= 0:
            reduction_annual += delta
        else:
            increase_annual -= delta
    risk_delta = reduction_annual - increase_annual

    per_year = schedule.per_year
    cash_per_year = cash_schedule.per_year
    cash_flows = tuple(
        benefit_row[t] + risk_delta - per_year[t] for t in range(horizon)
    )
    cash_basis_flows = tuple(
        benefit_row[t] + risk_delta - cash_per_year[t] for t in range(horizon)
    )
    return IterationOutcome(
        index=index,
        gross_benefits=math.fsum(benefit_row),
        risk_reduction=reduction_annual * horizon,
        risk_increase=increase_annual * horizon,
        tco_total=schedule.total,
        risk_delta=risk_delta,
        cash_flows=cash_flows,
        cash_basis_flows=cash_basis_flows,
        tco_per_year=per_year,
        benefit_values=benefit_values,
        cost_values=cost_values,
        scenario_losses=scenario_losses,
    )


def _evaluate_iteration(
    compiled: _CompiledModel, sampler: SubstreamSampler, index: int
) -> IterationOutcome:
    # Inlined for the hot loop; arithmetic mirrors benefit_schedule,
    # tco_pair, and ale_simulate operation for operation, which the
    # pipeline-equivalence tests pin down.
    horizon = compiled.horizon
    rules = compiled.rules
    at = sampler.at

    benefit_values: dict[str, float] = {}
    benefit_row = [0.0] * horizon
    for item_id, words, draw, attribution, first, decays in compiled.benefit_plan:
        base = draw(at(words, index) if words is not None else None)
        benefit_values[item_id] = base
        value = base * attribution
        for offset, decay in enumerate(decays):
            benefit_row[first + offset] += value * decay

    cost_values: dict[str, float] = {}
    capex_row = [0.0] * horizon
    cash_capex_row = [0.0] * horizon
    dev_capex_total = 0.0
    for item_id, words, draw, incurred, amort_stop, life, is_dev in compiled.capex_plan:
        value = draw(at(words, index) if words is not None else None)
        cost_values[item_id] = value
        if incurred < horizon:
            cash_capex_row[incurred] += value
            share = value / life
            for year in range(incurred, amort_stop):
                capex_row[year] += share
        if is_dev:
            dev_capex_total += value
    opex_row = [0.0] * horizon
    for item_id, words, draw, multiplier, first, last in compiled.opex_plan:
        value = draw(at(words, index) if words is not None else None)
        cost_values[item_id] = value
        value *= multiplier
        for year in range(first, last + 1):
            opex_row[year] += value

    maintenance_charge = rules.maintenance_rate * dev_capex_total
    reserve_rate = rules.reserve_rate
    carrying = (
        rules.reserve_carrying_rate if rules.reserve_treatment == "carrying_cost" else None
    )
    tco_per_year = [0.0] * horizon
    cash_per_year = [0.0] * horizon
    for year in range(horizon):
        maintenance = maintenance_charge if year else 0.0
        reserve = reserve_rate * (opex_row[year] + maintenance)
        if carrying is not None:
            reserve *= carrying
        opex = opex_row[year]
        tco_per_year[year] = capex_row[year] + opex + maintenance + reserve
        cash_per_year[year] = cash_capex_row[year] + opex + maintenance + reserve

    scenario_losses: dict[str, tuple[float, float]] = {}
    reduction_annual = 0.0
    increase_annual = 0.0
    for scenario_id, states in compiled.risk_plan:
        loss_current = 0.0
        loss_ai = 0.0
        for state, words, count_draw, severity_batch in states:
            gen = at(words, index)
            count = count_draw(gen)
            loss = severity_batch(gen, count) if count else 0.0
            if state == "current":
                loss_current = loss
            else:
                loss_ai = loss
        scenario_losses[scenario_id] = (loss_current, loss_ai)
        delta = loss_current - loss_ai
        if delta >= 0:
            reduction_annual += delta
        else:
            increase_annual -= delta
    risk_delta = reduction_annual - increase_annual

    return IterationOutcome(
        index=index,
        gross_benefits=math.fsum(benefit_row),
        risk_reduction=reduction_annual * horizon,
        risk_increase=increase_annual * horizon,
        tco_total=math.fsum(tco_per_year),
        risk_delta=risk_delta,
        cash_flows=tuple(
            benefit_row[t] + risk_delta - tco_per_year[t] for t in range(horizon)
        ),
        cash_basis_flows=tuple(
            benefit_row[t] + risk_delta - cash_per_year[t] for t in range(horizon)
        ),
        tco_per_year=tuple(tco_per_year),
        benefit_values=benefit_values,
        cost_values=cost_values,
        scenario_losses=scenario_losses,
    )


def analytic_evaluate(portfolio: Portfolio) -> IterationOutcome:
    """Deterministic evaluation with every sample replaced by its mean."""
    benefit_values = {item.id: mean(item.annual_value) for item in portfolio.benefits}
    benefit_row = benefits_mod.benefit_schedule(
        portfolio.benefits, portfolio.horizon_years, benefit_values
    )
    schedule, cash_schedule = costs_mod.tco_pair(
        portfolio.capex, portfolio.opex, portfolio.cost_rules, portfolio.horizon_years
    )
    cost_values = {item.id: mean(item.amount) for item in portfolio.capex}
    cost_values.update({item.id: mean(item.annual_amount) for item in portfolio.opex})
    scenario_losses = {
        scenario.id: (
            risk_mod.ale_analytic(scenario, "current"),
            risk_mod.ale_analytic(scenario, "ai"),
        )
        for scenario in portfolio.register.scenarios
    }
    return _assemble(
        portfolio,
        0,
        benefit_row,
        schedule,
        cash_schedule,
        benefit_values,
        cost_values,
        scenario_losses,
    )


# ---------------------------------------------------------------------------
# Simulation driver
# ---------------------------------------------------------------------------


def _run_chunk(
    portfolio: Portfolio, master_seed: int, start: int, stop: int
) -> list[IterationOutcome]:
    compiled = _CompiledModel(portfolio, master_seed)
    sampler = SubstreamSampler()
    return [_evaluate_iteration(compiled, sampler, i) for i in range(start, stop)]


def _run_block(
    portfolio: Portfolio, master_seed: int, start: int, stop: int, workers: int
) -> list[IterationOutcome]:
    if workers <= 1 or stop - start < 2 * workers:
        return _run_chunk(portfolio, master_seed, start, stop)
    bounds = [
        start + round(i * (stop - start) / workers) for i in range(workers + 1)
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_chunk, portfolio, master_seed, bounds[i], bounds[i + 1])
            for i in range(workers)
            if bounds[i] < bounds[i + 1]
        ]
        outcomes: list[IterationOutcome] = []
        for future in futures:
            outcomes.extend(future.result())
    return outcomes


def run_simulation(portfolio: Portfolio, cfg: SimulationConfig) -> SimulationResult:
    """Run the configured number of iterations and summarize engine metrics.

    Outcome ``i`` depends only on the master seed, the item stream keys,
    and ``i`` itself; worker count changes scheduling, never results.  With
    ``target_relative_se`` set, evaluation proceeds in fixed blocks and
    stops once the net-benefit standard error is small enough relative to
    its mean, which keeps early stopping deterministic too.
    """
    errors, _ = validate_portfolio(portfolio)
    if errors:
        raise ValueError("portfolio failed validation: " + "; ".join(errors))
    if cfg.iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {cfg.iterations}")
    workers = cfg.worker_count if cfg.worker_count is not None else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError(f"worker_count must be >= 1, got {cfg.worker_count}")

    outcomes: list[IterationOutcome] = []
    if cfg.target_relative_se is None:
        outcomes = _run_block(portfolio, cfg.master_seed, 0, cfg.iterations, workers)
    else:
        nets: list[float] = []
        start = 0
        while start < cfg.iterations:
            stop = min(start + _EARLY_STOP_BLOCK, cfg.iterations)
            block = _run_block(portfolio, cfg.master_seed, start, stop, workers)
            outcomes.extend(block)
            nets.extend(
                o.gross_benefits + o.risk_reduction - o.risk_increase - o.tco_total
                for o in block
            )
            start = stop
            if len(nets) >= 2:
                net_mean = math.fsum(nets) / len(nets)
                if net_mean != 0:
                    relative = standard_error(nets) / abs(net_mean)
                    if relative <= cfg.target_relative_se:
                        break

    summaries = {
        name: summarize([getattr(o, name) for o in outcomes]) for name in ENGINE_METRICS
    }
    return SimulationResult(outcomes=outcomes, summaries=summaries)


# ---------------------------------------------------------------------------
# Summary statistics
# ---------------------------------------------------------------------------


def standard_error(samples: Sequence[float]) -> float:
    """Sample standard deviation over sqrt(n); needs at least two samples."""
    n = len(samples)
    if n < 2:
        raise ValueError(f"standard error needs n >= 2, got {n}")
    center = math.fsum(samples) / n
    variance = math.fsum((x - center) ** 2 for x in samples) / (n - 1)
    return math.sqrt(variance) / math.sqrt(n)


def summarize(values: Sequence[float]) -> SampleSummary:
    """Percentile summary of one metric's samples."""
    if not values:
        raise ValueError("cannot summarize zero samples")
    ordered = sorted(values)
    n = len(ordered)
    return SampleSummary(
        n=n,
        mean=math.fsum(ordered) / n,
        standard_error=standard_error(ordered) if n >= 2 else 0.0,
        p10=percentile(ordered, 0.10),
        p50=percentile(ordered, 0.50),
        p90=percentile(ordered, 0.90),
        min=ordered[0],
        max=ordered[-1],
    )
