"""Scenario configuration: factor levels, validation, canonical JSON.

A scenario file fully describes one supply chain experiment: network
counts, the three experimental factors at levels -/0/+, capacities,
policy windows, run length, and replication/seeding controls.  The
serialization is canonical (sorted keys, fixed layout) so identical
configs are byte-identical and can be content-addressed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields

LEVELS = ("-", "0", "+")

# Factor tables.  Demand intensity maps a level to the customer
# inter-arrival mean in working hours; with the default "inverse" mapping
# the "+" level means *more* intense demand, i.e. the shortest
# inter-arrival time.  "direct" reads the level as the raw inter-arrival
# ordering instead.
INTENSITY_HOURS = {
    "inverse": {"-": 8.0, "0": 5.0, "+": 3.0},
    "direct": {"-": 3.0, "0": 5.0, "+": 8.0},
}
VARIABILITY_SUPPORT = {"-": (18, 22), "0": (16, 24), "+": (14, 26)}
LEAD_TIME_DAYS = {"-": 2, "0": 3, "+": 4}

HOURS_PER_DAY = 8
DAYS_PER_WEEK = 6


class ConfigError(ValueError):
    """Invalid scenario configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ScenarioConfig:
    """One runnable scenario.  All fields have materialized defaults."""

    name: str = "scenario"
    stores: int = 50
    distribution_centers: int = 3
    suppliers: int = 10
    items: int = 30
    demand_intensity: str = "0"
    demand_variability: str = "0"
    lead_time_level: str = "0"
    intensity_mapping: str = "inverse"
    store_capacity: int = 200
    dc_capacity: int = 1500
    forecast_window: int = 20
    safety_window: int = 60
    run_length_days: int = 390
    warmup_days: int = 0
    replications: int = 3
    master_seed: int = 42
    crn: bool = False
    demand_model: str = "poisson"
    # Fixed customer demand quantity; None draws from the variability factor.
    fixed_demand_quantity: int | None = None
    # Direct lead time in working days for every link; None uses the factor.
    lead_time_override: int | None = None
    # Optional per-item factor overrides, keyed by item index as a string:
    # {"2": {"demand_intensity": "+", ...}}.  Missing factors inherit the
    # scenario-level value.
    item_overrides: dict[str, dict[str, str]] = field(default_factory=dict)
    # Optional supplier lead-time overrides keyed "supplier_index:item_index",
    # in working days; links without an override use the factor lead time.
    supplier_lead_overrides: dict[str, int] = field(default_factory=dict)

    # -- derived values -------------------------------------------------

    def interarrival_hours(self, item: int) -> float:
        level = self._item_level(item, "demand_intensity")
        return INTENSITY_HOURS[self.intensity_mapping][level]

    def quantity_support(self, item: int) -> tuple[int, int, int]:
        """(min, mode, max) for the item's demand quantity; mode is the midpoint."""
        lo, hi = VARIABILITY_SUPPORT[self._item_level(item, "demand_variability")]
        return lo, (lo + hi) // 2, hi

    def lead_time_days(self, item: int) -> int:
        if self.lead_time_override is not None:
            return self.lead_time_override
        return LEAD_TIME_DAYS[self._item_level(item, "lead_time_level")]

    def supplier_lead_time(self, supplier_index: int, item: int) -> int:
        return self.supplier_lead_overrides.get(
            f"{supplier_index}:{item}", self.lead_time_days(item)
        )

    def _item_level(self, item: int, factor: str) -> str:
        override = self.item_overrides.get(str(item), {})
        return override.get(factor, getattr(self, factor))

    # -- validation ------------------------------------------------------

    def validate(self) -> None:
        counts = {
            "stores": self.stores,
            "distribution_centers": self.distribution_centers,
            "suppliers": self.suppliers,
            "items": self.items,
        }
        for path, value in counts.items():
            if not isinstance(value, int) or value < 1:
                raise ConfigError(path, f"must be an integer >= 1, got {value!r}")
        for path in ("demand_intensity", "demand_variability", "lead_time_level"):
            if getattr(self, path) not in LEVELS:
                raise ConfigError(path, f"must be one of {LEVELS}, got {getattr(self, path)!r}")
        if self.intensity_mapping not in INTENSITY_HOURS:
            raise ConfigError("intensity_mapping", "must be 'inverse' or 'direct'")
        for path in ("store_capacity", "dc_capacity"):
            if getattr(self, path) < 1:
                raise ConfigError(path, "must be >= 1")
        for path in ("forecast_window", "safety_window", "run_length_days", "replications"):
            if getattr(self, path) < 1:
                raise ConfigError(path, "must be >= 1")
        if self.warmup_days < 0:
            raise ConfigError("warmup_days", "must be >= 0")
        if self.warmup_days >= self.run_length_days:
            raise ConfigError("warmup_days", "must be shorter than run_length_days")
        if self.demand_model not in ("poisson", "deterministic", "none"):
            raise ConfigError("demand_model", "must be 'poisson', 'deterministic', or 'none'")
        if self.fixed_demand_quantity is not None and self.fixed_demand_quantity < 1:
            raise ConfigError("fixed_demand_quantity", "must be >= 1 when set")
        if self.lead_time_override is not None and self.lead_time_override < 1:
            raise ConfigError("lead_time_override", "must be >= 1 when set")
        if not isinstance(self.master_seed, int):
            raise ConfigError("master_seed", "must be an integer")
        for item, override in self.item_overrides.items():
            if not item.isdigit() or int(item) >= self.items:
                raise ConfigError(f"item_overrides.{item}", "not a valid item index")
            for factor, level in override.items():
                if factor not in ("demand_intensity", "demand_variability", "lead_time_level"):
                    raise ConfigError(f"item_overrides.{item}.{factor}", "unknown factor")
                if level not in LEVELS:
                    raise ConfigError(
                        f"item_overrides.{item}.{factor}", f"must be one of {LEVELS}"
                    )
        for link, days in self.supplier_lead_overrides.items():
            parts = link.split(":")
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise ConfigError(
                    f"supplier_lead_overrides.{link}", "key must be 'supplier:item'"
                )
            if not isinstance(days, int) or days < 1:
                raise ConfigError(f"supplier_lead_overrides.{link}", "days must be >= 1")

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        """Canonical rendering: sorted keys, two-space indent, trailing newline."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def digest(self) -> str:
        """Content address of the canonical form (name excluded)."""
        d = self.to_dict()
        d.pop("name")
        blob = json.dumps(d, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError("$", "scenario must be a JSON object")
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown field")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def load_scenario(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return ScenarioConfig.from_json(fh.read())
