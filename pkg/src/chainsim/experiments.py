"""Scenario sweeps, replications, run-length analysis, and result export.

A sweep enumerates the full 3x3x3 factorial over demand intensity,
demand variability, and lead time (27 scenarios), runs each for a number
of replications, and aggregates per-node fill rates and average on-hand
stock.  Replication seeding supports common random numbers: with CRN on,
replication r of every scenario draws from identical streams, so paired
comparisons cancel sampling noise; with CRN off the scenario content is
mixed into the seed and runs decorrelate.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

from .config import LEVELS, ScenarioConfig
from .des import HandlerFailure
from .network import Network, RunStopped, build_network
from .streams import StreamHub

log = logging.getLogger(__name__)

CSV_COLUMNS = [
    "scenario_id",
    "rep",
    "node_id",
    "node_kind",
    "orders_received",
    "orders_satisfied",
    "fill_rate_orders",
    "qty_ordered",
    "qty_lost",
    "fill_rate_quantity",
    "avg_on_hand",
]

METRIC_FIELDS = ("fill_rate_orders", "fill_rate_quantity", "avg_on_hand")


class InsufficientReps(ValueError):
    """Run-length analysis needs at least two replications per length."""


class ExportError(OSError):
    """Result export could not write its output."""


@dataclass
class ReplicationOutcome:
    scenario_id: str
    rep: int
    records: list[dict]
    uniform_traces: dict | None = None


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    outcomes: list[ReplicationOutcome]
    # node_id -> metric -> (mean, std) across replications
    aggregates: dict[str, dict[str, tuple[float, float]]] = field(default_factory=dict)
    degenerate_std: bool = False

    @property
    def scenario_id(self) -> str:
        return self.config.name


def replication_seed(config: ScenarioConfig, rep: int) -> int:
    """Effective master seed for one replication.

    CRN keeps the seed a function of (master seed, replication) only, so
    the same replication index of two different scenarios consumes the
    same uniforms per stream.  Without CRN the scenario content enters
    the derivation and scenarios decorrelate.
    """
    if config.crn:
        text = f"{config.master_seed}|rep{rep}"
    else:
        text = f"{config.master_seed}|rep{rep}|{config.digest()}"
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


def run_scenario(
    config: ScenarioConfig,
    rep: int,
    trace_uniforms: int = 0,
    day_callback: Callable[[int], None] | None = None,
) -> ReplicationOutcome:
    """Build the network, run one replication, and snapshot node statistics."""
    hub = StreamHub(replication_seed(config, rep), trace_limit=trace_uniforms)
    network = build_network(config, hub)
    network.day_callback = day_callback
    try:
        network.run()
    except HandlerFailure as exc:
        if isinstance(exc.__cause__, RunStopped):
            raise exc.__cause__ from None
        raise
    traces = hub.uniform_traces() if trace_uniforms else None
    return ReplicationOutcome(
        scenario_id=config.name,
        rep=rep,
        records=network.node_results(),
        uniform_traces=traces,
    )


def full_factorial(base: ScenarioConfig) -> list[ScenarioConfig]:
    """The 27 factor-level combinations in canonical run order.

    Demand intensity varies slowest and lead time fastest, so run 1 is
    (-,-,-), run 14 is (0,0,0), and run 27 is (+,+,+).
    """
    configs = []
    for k, (intensity, variability, lead) in enumerate(
        product(LEVELS, LEVELS, LEVELS), start=1
    ):
        d = base.to_dict()
        d["name"] = f"run-{k:02d}"
        d["demand_intensity"] = intensity
        d["demand_variability"] = variability
        d["lead_time_level"] = lead
        configs.append(ScenarioConfig.from_dict(d))
    return configs


def aggregate_outcomes(config: ScenarioConfig, outcomes: list[ReplicationOutcome]) -> ScenarioResult:
    result = ScenarioResult(config=config, outcomes=outcomes)
    by_node: dict[str, list[dict]] = {}
    for outcome in outcomes:
        for record in outcome.records:
            by_node.setdefault(record["node_id"], []).append(record)
    all_zero_spread = True
    for node_id, records in by_node.items():
        metrics = {}
        for name in METRIC_FIELDS:
            values = [r[name] for r in records]
            mean = statistics.fmean(values)
            std = statistics.stdev(values) if len(values) > 1 else 0.0
            if name == "fill_rate_orders" and std > 0:
                all_zero_spread = False
            metrics[name] = (mean, std)
        result.aggregates[node_id] = metrics
    if len(outcomes) == 1:
        result.degenerate_std = True
    elif all_zero_spread:
        result.degenerate_std = True
        log.warning(
            "scenario %s: zero spread across %d replications; "
            "replications look identical (seeding misconfiguration?)",
            config.name,
            len(outcomes),
        )
    return result


def replicate(config: ScenarioConfig, trace_uniforms: int = 0) -> ScenarioResult:
    """Run all replications of one scenario and aggregate mean/std per node."""
    if config.replications < 1:
        raise ValueError("replications must be >= 1")
    outcomes = [
        run_scenario(config, rep, trace_uniforms=trace_uniforms)
        for rep in range(config.replications)
    ]
    return aggregate_outcomes(config, outcomes)


def _sweep_worker(args: tuple[dict, int]) -> ReplicationOutcome:
    config_dict, rep = args
    return run_scenario(ScenarioConfig.from_dict(config_dict), rep)


def run_sweep(
    base: ScenarioConfig,
    jobs: int = 1,
    progress: Callable[[str, int], None] | None = None,
) -> list[ScenarioResult]:
    """Run the full factorial with replications; results in run order.

    With jobs > 1, (scenario, replication) pairs run on a process pool;
    output order is deterministic regardless of completion order.
    """
    configs = full_factorial(base)
    tasks = [(cfg, rep) for cfg in configs for rep in range(base.replications)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(
                pool.map(_sweep_worker, [(cfg.to_dict(), rep) for cfg, rep in tasks])
            )
    else:
        outcomes = []
        for cfg, rep in tasks:
            outcomes.append(run_scenario(cfg, rep))
            if progress is not None:
                progress(cfg.name, rep)
    results = []
    reps = base.replications
    for i, cfg in enumerate(configs):
        chunk = outcomes[i * reps : (i + 1) * reps]
        results.append(aggregate_outcomes(cfg, chunk))
    return results


# -- run-length analysis ----------------------------------------------------


@dataclass
class MspeAnalysis:
    lengths: list[int]
    curve: list[float]
    chosen_length: int
    reps: int
    threshold: float
    metric_values: dict[int, list[float]] = field(default_factory=dict)


def store_fill_rate(records: list[dict]) -> float:
    """Mean order fill rate across store nodes; the sweep's headline metric."""
    values = [r["fill_rate_orders"] for r in records if r["node_kind"] == "store"]
    return statistics.fmean(values)


def mspe_run_length(
    config: ScenarioConfig,
    lengths: Sequence[int],
    reps: int,
    threshold: float = 1.10,
) -> MspeAnalysis:
    """Pick a run length by the pure-error mean square across replications.

    For each candidate length the store fill rate is measured over
    ``reps`` replications and its sample variance recorded; the chosen
    length is the smallest whose variance is within ``threshold`` of the
    curve's minimum.
    """
    if reps < 2:
        raise InsufficientReps(f"need >= 2 reps per candidate length, got {reps}")
    if list(lengths) != sorted(set(lengths)):
        raise ValueError("candidate lengths must be strictly increasing")
    curve = []
    metric_values: dict[int, list[float]] = {}
    for length in lengths:
        d = config.to_dict()
        d["run_length_days"] = int(length)
        trial = ScenarioConfig.from_dict(d)
        values = [
            store_fill_rate(run_scenario(trial, rep).records) for rep in range(reps)
        ]
        metric_values[int(length)] = values
        mean = statistics.fmean(values)
        mspe = sum((v - mean) ** 2 for v in values) / (reps - 1)
        curve.append(mspe)
    floor = min(curve)
    chosen = next(
        length for length, value in zip(lengths, curve) if value <= threshold * floor
    )
    return MspeAnalysis(
        lengths=[int(x) for x in lengths],
        curve=curve,
        chosen_length=int(chosen),
        reps=reps,
        threshold=threshold,
        metric_values=metric_values,
    )


# -- export -------------------------------------------------------------------


def result_rows(results: Sequence[ScenarioResult]) -> list[dict]:
    """Flatten results to one row per (scenario, replication, node)."""
    rows = []
    for result in results:
        for outcome in result.outcomes:
            for record in outcome.records:
                row = {"scenario_id": result.scenario_id, "rep": outcome.rep}
                row.update({k: record[k] for k in CSV_COLUMNS[2:]})
                rows.append(row)
    return rows


def _format_cell(column: str, value) -> str:
    if column in ("fill_rate_orders", "fill_rate_quantity"):
        return f"{value:.6f}"
    if column == "avg_on_hand":
        return f"{value:.3f}"
    return str(value)


def render_csv(results: Sequence[ScenarioResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result_rows(results):
        writer.writerow([_format_cell(c, row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def render_txt(results: Sequence[ScenarioResult]) -> str:
    rows = [[_format_cell(c, row[c]) for c in CSV_COLUMNS] for row in result_rows(results)]
    widths = [
        max(len(CSV_COLUMNS[i]), *(len(r[i]) for r in rows)) if rows else len(CSV_COLUMNS[i])
        for i in range(len(CSV_COLUMNS))
    ]
    lines = ["  ".join(c.ljust(w) for c, w in zip(CSV_COLUMNS, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def render_records(results: Sequence[ScenarioResult]) -> str:
    """Structured JSON records: per-scenario aggregates plus raw rows."""
    payload = []
    for result in results:
        payload.append(
            {
                "scenario_id": result.scenario_id,
                "config": result.config.to_dict(),
                "replications": len(result.outcomes),
                "degenerate_std": result.degenerate_std,
                "aggregates": {
                    node: {metric: {"mean": mv[0], "std": mv[1]} for metric, mv in m.items()}
                    for node, m in result.aggregates.items()
                },
                "rows": result_rows([result]),
            }
        )
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def export(results: Sequence[ScenarioResult], fmt: str, path: str) -> None:
    """Write results to ``path`` as csv, txt, or structured records (json)."""
    if not results:
        raise ValueError("no results to export")
    renderers = {"csv": render_csv, "txt": render_txt, "records": render_records}
    if fmt not in renderers:
        raise ValueError(f"unknown export format {fmt!r}")
    text = renderers[fmt](results)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc


def sweep_summary_rows(results: Sequence[ScenarioResult]) -> list[dict]:
    """One summary row per (scenario, replication): the store-level averages."""
    rows = []
    for result in results:
        cfg = result.config
        for outcome in result.outcomes:
            stores = [r for r in outcome.records if r["node_kind"] == "store"]
            rows.append(
                {
                    "scenario_id": result.scenario_id,
                    "rep": outcome.rep,
                    "demand_intensity": cfg.demand_intensity,
                    "demand_variability": cfg.demand_variability,
                    "lead_time_level": cfg.lead_time_level,
                    "store_fill_rate_orders": statistics.fmean(
                        r["fill_rate_orders"] for r in stores
                    ),
                    "store_fill_rate_quantity": statistics.fmean(
                        r["fill_rate_quantity"] for r in stores
                    ),
                    "store_avg_on_hand": statistics.fmean(r["avg_on_hand"] for r in stores),
                }
            )
    return rows


def render_summary_csv(results: Sequence[ScenarioResult]) -> str:
    rows = sweep_summary_rows(results)
    columns = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(
            [f"{v:.6f}" if isinstance(v, float) else str(v) for v in row.values()]
        )
    return buf.getvalue()
