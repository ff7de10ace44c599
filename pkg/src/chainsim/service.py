"""HTTP facade for the what-if explorer: scenario CRUD, runs, results.

Scenarios and results are stored as plain files in a content-addressed
directory: a scenario's id is the digest of its canonical config, so an
"update" naturally produces a new immutable version instead of mutating
anything a live run might reference.  Run ids are likewise derived from
(scenario id, seed, CRN, replications), which makes repeated launches
with identical inputs return the identical stored result body.

Simulations execute on a small thread pool (each simulation is
single-threaded); stopping a run is cooperative and lands on the next
simulated day boundary.  Result publication is atomic (write then rename).
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .config import ConfigError, ScenarioConfig
from .experiments import (
    ReplicationOutcome,
    ScenarioResult,
    aggregate_outcomes,
    render_csv,
    run_scenario,
)
from .network import RunStopped


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunHandle:
    run_id: str
    state: str  # queued | running | done | failed
    progress: float
    created_at: str
    scenario_id: str
    seed: int
    crn: bool
    replications: int
    reason: str = ""
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


class RunRegistry:
    """In-process run state plus on-disk results."""

    def __init__(self, data_dir: str, jobs: int) -> None:
        self.data_dir = data_dir
        self.runs_dir = os.path.join(data_dir, "runs")
        self.scenarios_dir = os.path.join(data_dir, "scenarios")
        os.makedirs(self.runs_dir, exist_ok=True)
        os.makedirs(self.scenarios_dir, exist_ok=True)
        self.pool = ThreadPoolExecutor(max_workers=jobs)
        self.lock = threading.Lock()
        self.handles: dict[str, RunHandle] = {}
        self.cancel_flags: dict[str, threading.Event] = {}

    # -- scenarios -------------------------------------------------------

    def scenario_path(self, scenario_id: str) -> str:
        return os.path.join(self.scenarios_dir, f"{scenario_id}.json")

    def save_scenario(self, config: ScenarioConfig, version: int = 1) -> dict:
        scenario_id = config.digest()
        path = self.scenario_path(scenario_id)
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                return json.load(fh)
        record = {
            "id": scenario_id,
            "version": version,
            "created_at": _now(),
            "config": config.to_dict(),
        }
        _atomic_write_json(path, record)
        return record

    def load_scenario(self, scenario_id: str) -> dict | None:
        path = self.scenario_path(scenario_id)
        if not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)

    def list_scenarios(self) -> list[dict]:
        records = []
        for name in sorted(os.listdir(self.scenarios_dir)):
            if name.endswith(".json"):
                with open(os.path.join(self.scenarios_dir, name), encoding="utf-8") as fh:
                    records.append(json.load(fh))
        return records

    # -- runs ---------------------------------------------------------------

    def run_dir(self, run_id: str) -> str:
        return os.path.join(self.runs_dir, run_id)

    def start_run(self, scenario: dict, seed: int | None, crn: bool | None) -> RunHandle:
        config_dict = dict(scenario["config"])
        if seed is not None:
            config_dict["master_seed"] = seed
        if crn is not None:
            config_dict["crn"] = crn
        config = ScenarioConfig.from_dict(config_dict)
        key = f"{scenario['id']}|{config.master_seed}|{config.crn}|{config.replications}"
        run_id = hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]
        with self.lock:
            existing = self.handles.get(run_id)
            if existing is not None and existing.state != "failed":
                return existing
            stored = self._load_done_handle(run_id)
            if stored is not None:
                self.handles[run_id] = stored
                return stored
            handle = RunHandle(
                run_id=run_id,
                state="queued",
                progress=0.0,
                created_at=_now(),
                scenario_id=scenario["id"],
                seed=config.master_seed,
                crn=config.crn,
                replications=config.replications,
                config=config.to_dict(),
            )
            self.handles[run_id] = handle
            self.cancel_flags[run_id] = threading.Event()
        self.pool.submit(self._execute, run_id, config)
        return handle

    def _load_done_handle(self, run_id: str) -> RunHandle | None:
        path = os.path.join(self.run_dir(run_id), "handle.json")
        if not os.path.exists(path):
            return None
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return RunHandle(**data)

    def _execute(self, run_id: str, config: ScenarioConfig) -> None:
        handle = self.handles[run_id]
        cancel = self.cancel_flags[run_id]
        if cancel.is_set():  # stopped while still queued
            return
        handle.state = "running"
        total_days = config.run_length_days * config.replications
        outcomes: list[ReplicationOutcome] = []
        try:
            for rep in range(config.replications):
                def on_day(day: int, rep: int = rep) -> None:
                    handle.progress = (rep * config.run_length_days + day + 1) / total_days
                    if cancel.is_set():
                        raise RunStopped("stopped")

                outcomes.append(run_scenario(config, rep, day_callback=on_day))
        except RunStopped:
            handle.state = "failed"
            handle.reason = "stopped"
            self._persist_handle(handle)
            return
        except Exception as exc:  # surfaced via the handle, not the pool
            handle.state = "failed"
            handle.reason = repr(exc)
            self._persist_handle(handle)
            return
        result = aggregate_outcomes(config, outcomes)
        self._publish(run_id, handle, result)

    def _publish(self, run_id: str, handle: RunHandle, result: ScenarioResult) -> None:
        rundir = self.run_dir(run_id)
        os.makedirs(rundir, exist_ok=True)
        body = {
            "run_id": run_id,
            "scenario_id": handle.scenario_id,
            "config": result.config.to_dict(),
            "replications": len(result.outcomes),
            "degenerate_std": result.degenerate_std,
            "aggregates": {
                node: {m: {"mean": v[0], "std": v[1]} for m, v in metrics.items()}
                for node, metrics in result.aggregates.items()
            },
            "records": [
                {"rep": o.rep, "nodes": o.records} for o in result.outcomes
            ],
        }
        _atomic_write_json(os.path.join(rundir, "results.json"), body)
        csv_text = render_csv([result])
        _atomic_write_text(os.path.join(rundir, "results.csv"), csv_text)
        handle.progress = 1.0
        handle.state = "done"
        self._persist_handle(handle)

    def _persist_handle(self, handle: RunHandle) -> None:
        rundir = self.run_dir(handle.run_id)
        os.makedirs(rundir, exist_ok=True)
        _atomic_write_json(os.path.join(rundir, "handle.json"), handle.to_dict())

    def stop_run(self, run_id: str) -> RunHandle | None:
        with self.lock:
            handle = self.handles.get(run_id)
            if handle is None:
                handle = self._load_done_handle(run_id)
                if handle is None:
                    return None
                self.handles[run_id] = handle
            if handle.state in ("queued", "running"):
                self.cancel_flags[run_id].set()
                if handle.state == "queued":
                    handle.state = "failed"
                    handle.reason = "stopped"
                    self._persist_handle(handle)
        return handle

    def get_handle(self, run_id: str) -> RunHandle | None:
        handle = self.handles.get(run_id)
        if handle is None:
            handle = self._load_done_handle(run_id)
            if handle is not None:
                self.handles[run_id] = handle
        return handle

    def results_path(self, run_id: str, suffix: str) -> str:
        return os.path.join(self.run_dir(run_id), f"results.{suffix}")


def _atomic_write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _atomic_write_json(path: str, payload: dict) -> None:
    _atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def create_app(data_dir: str = "chainsim-data", jobs: int = 2) -> FastAPI:
    app = FastAPI(title="chainsim service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    registry = RunRegistry(data_dir, jobs)
    app.state.registry = registry

    @app.exception_handler(ConfigError)
    async def config_error(request: Request, exc: ConfigError):
        return JSONResponse(status_code=422, content={"detail": str(exc), "field": exc.path})

    @app.post("/scenarios", status_code=201)
    async def create_scenario(payload: dict):
        config = ScenarioConfig.from_dict(payload)
        return registry.save_scenario(config)

    @app.get("/scenarios")
    async def list_scenarios():
        return registry.list_scenarios()

    @app.get("/scenarios/{scenario_id}")
    async def get_scenario(scenario_id: str):
        record = registry.load_scenario(scenario_id)
        if record is None:
            raise HTTPException(404, "unknown scenario")
        return record

    @app.put("/scenarios/{scenario_id}")
    async def update_scenario(scenario_id: str, payload: dict):
        record = registry.load_scenario(scenario_id)
        if record is None:
            raise HTTPException(404, "unknown scenario")
        config = ScenarioConfig.from_dict(payload)
        return registry.save_scenario(config, version=record["version"] + 1)

    @app.post("/runs", status_code=202)
    async def start_run(payload: dict):
        scenario_id = payload.get("scenario_id")
        if not scenario_id:
            raise HTTPException(422, "scenario_id required")
        scenario = registry.load_scenario(scenario_id)
        if scenario is None:
            raise HTTPException(404, "unknown scenario")
        seed = payload.get("seed")
        crn = payload.get("crn")
        return registry.start_run(scenario, seed, crn).to_dict()

    @app.get("/runs/{run_id}")
    async def get_run(run_id: str):
        handle = registry.get_handle(run_id)
        if handle is None:
            raise HTTPException(404, "unknown run")
        return handle.to_dict()

    @app.post("/runs/{run_id}/stop")
    async def stop_run(run_id: str):
        handle = registry.stop_run(run_id)
        if handle is None:
            raise HTTPException(404, "unknown run")
        return handle.to_dict()

    @app.get("/runs/{run_id}/results")
    async def get_results(run_id: str):
        handle = registry.get_handle(run_id)
        if handle is None:
            raise HTTPException(404, "unknown run")
        if handle.state != "done":
            raise HTTPException(409, f"run is {handle.state}")
        with open(registry.results_path(run_id, "json"), encoding="utf-8") as fh:
            return Response(content=fh.read(), media_type="application/json")

    @app.get("/runs/{run_id}/results.csv")
    async def get_results_csv(run_id: str):
        handle = registry.get_handle(run_id)
        if handle is None:
            raise HTTPException(404, "unknown run")
        if handle.state != "done":
            raise HTTPException(409, f"run is {handle.state}")
        with open(registry.results_path(run_id, "csv"), encoding="utf-8") as fh:
            return Response(content=fh.read(), media_type="text/csv")

    @app.get("/compare")
    async def compare(a: str, b: str):
        handles = []
        for run_id in (a, b):
            handle = registry.get_handle(run_id)
            if handle is None:
                raise HTTPException(404, f"unknown run {run_id}")
            if handle.state != "done":
                raise HTTPException(409, f"run {run_id} is {handle.state}")
            handles.append(handle)
        warnings = []
        if not (handles[0].crn and handles[1].crn):
            warnings.append("runs were not both executed with common random numbers")
        if handles[0].seed != handles[1].seed:
            warnings.append("runs used different master seeds")
        bodies = []
        for run_id in (a, b):
            with open(registry.results_path(run_id, "json"), encoding="utf-8") as fh:
                bodies.append(json.load(fh))
        nodes_a = bodies[0]["aggregates"]
        nodes_b = bodies[1]["aggregates"]
        shared = sorted(set(nodes_a) & set(nodes_b))
        if set(nodes_a) != set(nodes_b):
            warnings.append("node sets differ; comparing the intersection")
        deltas = []
        for node in shared:
            fa = nodes_a[node]["fill_rate_orders"]["mean"]
            fb = nodes_b[node]["fill_rate_orders"]["mean"]
            qa = nodes_a[node]["fill_rate_quantity"]["mean"]
            qb = nodes_b[node]["fill_rate_quantity"]["mean"]
            deltas.append(
                {
                    "node_id": node,
                    "fill_rate_orders_a": fa,
                    "fill_rate_orders_b": fb,
                    "fill_rate_orders_delta": fb - fa,
                    "fill_rate_quantity_a": qa,
                    "fill_rate_quantity_b": qb,
                    "fill_rate_quantity_delta": qb - qa,
                }
            )
        return {"a": a, "b": b, "warnings": warnings, "deltas": deltas}

    return app
