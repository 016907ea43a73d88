"""Dispatch schedules and day comparisons.

A schedule expands a solved path into one row per priced step: unit state,
applied control, generated power/heat, the utility make-up (demand minus
generation, negative when selling), and the step's cost with the
transition's operating cost spread evenly over its span. Summed step costs
reproduce the path cost up to float rounding.

compare_day replays one day the way an operator would: forecast from
history, solve nominal/box/mixed on the forecast, then price every schedule
against the realized demand. The hindsight benchmark (nominal solve on the
realized profile itself) anchors the reduction metric

    reduction % = 100 * (nominal - algo) / (nominal - benchmark)

so 0 means no better than ignoring uncertainty and 100 means as good as
knowing the day in advance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .demand import (
    DemandProfile,
    bias_profile,
    box_set,
    forecast_from_history,
    mixed_set,
    worst_corner,
)
from .graph import DispatchGraph, build_graph
from .shortest_path import PathResult
from .solvers import (
    RobustSolution,
    path_cost_at,
    solve_box,
    solve_mixed_additive,
    solve_mixed_exact,
    solve_mixed_multiplicative,
    solve_nominal,
)

INF = float("inf")

SCHEDULE_HEADER = ["t", "state", "control", "p_mgt_kw", "h_mgt_kw", "p_util_kw", "h_util_kw", "step_cost"]


@dataclass(frozen=True)
class ScheduleRow:
    t: int
    state: str
    control: str
    p_mgt_kw: float
    h_mgt_kw: float
    p_util_kw: float
    h_util_kw: float
    step_cost: float


@dataclass(frozen=True)
class Schedule:
    rows: tuple[ScheduleRow, ...]

    @property
    def total_cost(self) -> float:
        total = 0.0
        for row in self.rows:
            total += row.step_cost
        return total

    @property
    def n_steps(self) -> int:
        return len(self.rows)


def build_schedule(graph: DispatchGraph, path: PathResult, demand: DemandProfile, tariff) -> Schedule:
    """Expand a path into per-step rows priced against `demand`.

    Pass the profile the path should be accounted against: the realized or
    nominal demand for plain solves, the box corner or the bias profile for
    robust ones.
    """
    if not path.feasible:
        raise ValueError("cannot build a schedule from an infeasible result")
    n = graph.n_priced_steps
    if demand.n_steps not in (n, n + 1):
        raise ValueError(f"demand length {demand.n_steps} does not cover {n} priced steps")
    rows = []
    for e in path.edges:
        k = e.template
        d = int(graph.dur[k])
        tr = graph.model.transitions[k]
        op_share = float(graph.op_cost[k]) / d
        for j in range(e.time, e.time + d):
            p_util = float(demand.power_kw[j]) - tr.power_kw
            h_util = float(demand.heat_kw[j]) - tr.heat_kw
            cost = op_share
            cost += tariff.power_fn(j).value(p_util)
            cost += tariff.heat_fn(j).value(h_util)
            rows.append(
                ScheduleRow(
                    t=j,
                    state=tr.from_state,
                    control=tr.control,
                    p_mgt_kw=tr.power_kw,
                    h_mgt_kw=tr.heat_kw,
                    p_util_kw=p_util,
                    h_util_kw=h_util,
                    step_cost=float(cost),
                )
            )
    return Schedule(rows=tuple(rows))


def save_schedule(schedule: Schedule, path: str) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCHEDULE_HEADER)
        for r in schedule.rows:
            writer.writerow(
                [r.t, r.state, r.control, repr(r.p_mgt_kw), repr(r.h_mgt_kw),
                 repr(r.p_util_kw), repr(r.h_util_kw), repr(r.step_cost)]
            )


@dataclass(frozen=True)
class AlgoResult:
    """One algorithm's line in a comparison: solve-time objective vs reality."""

    name: str
    solution: RobustSolution
    realized_cost: float
    runtime_s: float
    reduction_pct: float | None = None

    @property
    def feasible(self) -> bool:
        return self.solution.feasible


@dataclass(frozen=True)
class CaseComparison:
    name: str
    entries: tuple[AlgoResult, ...]

    def entry(self, name: str) -> AlgoResult:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


@dataclass(frozen=True)
class ComparisonReport:
    cases: tuple[CaseComparison, ...] = field(default_factory=tuple)

    def mean_reduction(self) -> dict[str, float]:
        """Mean reduction per algorithm over cases where it is defined."""
        sums: dict[str, list[float]] = {}
        for case in self.cases:
            for e in case.entries:
                if e.reduction_pct is not None:
                    sums.setdefault(e.name, []).append(e.reduction_pct)
        return {name: sum(v) / len(v) for name, v in sums.items() if v}

    def render_table(self) -> str:
        lines = []
        fmt = "{:<12} {:>14} {:>14} {:>12} {:>10}"
        for case in self.cases:
            lines.append(f"== {case.name} ==")
            lines.append(fmt.format("algorithm", "worst_case", "realized", "reduction_%", "time_s"))
            for e in case.entries:
                wc = f"{e.solution.worst_case_cost:.2f}" if e.feasible else "inf"
                rc = f"{e.realized_cost:.2f}" if e.realized_cost != INF else "inf"
                red = "n/a" if e.reduction_pct is None else f"{e.reduction_pct:.1f}"
                lines.append(fmt.format(e.name, wc, rc, red, f"{e.runtime_s:.3f}"))
            lines.append("")
        means = self.mean_reduction()
        if len(self.cases) > 1 and means:
            lines.append("mean reduction %: " + ", ".join(f"{k}={v:.1f}" for k, v in sorted(means.items())))
        return "\n".join(lines).rstrip() + "\n"

    def to_dict(self) -> dict:
        return {
            "cases": [
                {
                    "name": case.name,
                    "algorithms": [
                        {
                            "name": e.name,
                            "feasible": e.feasible,
                            "worst_case_cost": e.solution.worst_case_cost,
                            "worst_scenario": e.solution.worst_scenario,
                            "threshold": e.solution.threshold,
                            "thresholds_evaluated": e.solution.thresholds_evaluated,
                            "realized_cost": e.realized_cost,
                            "reduction_pct": e.reduction_pct,
                            "runtime_s": e.runtime_s,
                        }
                        for e in case.entries
                    ],
                }
                for case in self.cases
            ],
            "mean_reduction_pct": self.mean_reduction(),
        }


def _with_reductions(entries: list[AlgoResult]) -> tuple[AlgoResult, ...]:
    by_name = {e.name: e for e in entries}
    nominal = by_name.get("nominal")
    benchmark = by_name.get("benchmark")
    if nominal is None or benchmark is None:
        return tuple(entries)
    margin = nominal.realized_cost - benchmark.realized_cost
    out = []
    for e in entries:
        red = None
        if margin > 0 and e.realized_cost != INF and nominal.realized_cost != INF:
            red = 100.0 * (nominal.realized_cost - e.realized_cost) / margin
        out.append(AlgoResult(e.name, e.solution, e.realized_cost, e.runtime_s, red))
    return tuple(out)


def compare_day(
    model,
    tariff,
    history: list[DemandProfile],
    realized: DemandProfile,
    *,
    alpha: float = 0.13,
    alpha1: float = 0.03,
    alpha2: float = 40.0,
    mixed: str | None = "exact",
    epsilon: float | None = None,
    grid_n: int | None = None,
    mu: float | None = None,
    initial="any",
    final="any",
    name: str = "day",
) -> CaseComparison:
    """Solve one day with every strategy and price each against `realized`.

    history feeds the forecast (mean and spread); `mixed` picks the budget
    sweep flavor ("exact", "additive", "multiplicative", or None to skip).
    """
    forecast = forecast_from_history(history)
    graph = build_graph(model, realized.n_steps + 1, initial=initial, final=final)

    def timed(fn, *args, **kw):
        t0 = time.perf_counter()
        sol = fn(*args, **kw)
        return sol, time.perf_counter() - t0

    entries: list[AlgoResult] = []

    sol, dt = timed(solve_nominal, graph, realized, tariff)
    entries.append(AlgoResult("benchmark", sol, path_cost_at(graph, sol.path, realized, tariff), dt))

    sol, dt = timed(solve_nominal, graph, forecast.mean_profile(), tariff)
    entries.append(AlgoResult("nominal", sol, path_cost_at(graph, sol.path, realized, tariff), dt))

    sol, dt = timed(solve_box, graph, box_set(forecast, alpha), tariff)
    entries.append(AlgoResult("box", sol, path_cost_at(graph, sol.path, realized, tariff), dt))

    if mixed is not None:
        mset = mixed_set(forecast, alpha1, alpha2)
        if mixed == "exact":
            sol, dt = timed(solve_mixed_exact, graph, mset, tariff)
        elif mixed == "additive":
            sol, dt = timed(solve_mixed_additive, graph, mset, tariff, epsilon=epsilon, grid_n=grid_n)
        elif mixed == "multiplicative":
            if mu is None:
                raise ValueError("multiplicative compare needs mu")
            sol, dt = timed(solve_mixed_multiplicative, graph, mset, tariff, mu)
        else:
            raise ValueError(f"unknown mixed mode {mixed!r}")
        entries.append(AlgoResult("mixed", sol, path_cost_at(graph, sol.path, realized, tariff), dt))

    return CaseComparison(name=name, entries=_with_reductions(entries))
