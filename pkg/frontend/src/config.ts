/** Scenario defaults, factor tables, client-side validation, canonical JSON.
 *
 * The canonical serialization must be byte-identical to the server's
 * (sorted keys, two-space indent, trailing newline), because scenario ids
 * are digests of this exact form.  The server remains the validation
 * authority; the checks here only gate the submit button with per-field
 * messages.
 */

import type { Level, ScenarioConfig } from "./types.js";

export const LEVELS: Level[] = ["-", "0", "+"];

export const INTENSITY_HOURS: Record<"inverse" | "direct", Record<Level, number>> = {
  inverse: { "-": 8, "0": 5, "+": 3 },
  direct: { "-": 3, "0": 5, "+": 8 },
};

export const VARIABILITY_SUPPORT: Record<Level, [number, number]> = {
  "-": [18, 22],
  "0": [16, 24],
  "+": [14, 26],
};

export const LEAD_TIME_DAYS: Record<Level, number> = { "-": 2, "0": 3, "+": 4 };

export function defaultConfig(): ScenarioConfig {
  return {
    name: "scenario",
    stores: 50,
    distribution_centers: 3,
    suppliers: 10,
    items: 30,
    demand_intensity: "0",
    demand_variability: "0",
    lead_time_level: "0",
    intensity_mapping: "inverse",
    store_capacity: 200,
    dc_capacity: 1500,
    forecast_window: 20,
    safety_window: 60,
    run_length_days: 390,
    warmup_days: 0,
    replications: 3,
    master_seed: 42,
    crn: false,
    demand_model: "poisson",
    fixed_demand_quantity: null,
    lead_time_override: null,
    item_overrides: {},
    supplier_lead_overrides: {},
  };
}

/** Human-readable caption for a factor level picker. */
export function levelCaption(factor: "intensity" | "variability" | "lead", level: Level, mapping: "inverse" | "direct" = "inverse"): string {
  if (factor === "intensity") {
    return `${INTENSITY_HOURS[mapping][level]} h between arrivals`;
  }
  if (factor === "variability") {
    const [lo, hi] = VARIABILITY_SUPPORT[level];
    return `[${lo}, ${hi}] items`;
  }
  return `${LEAD_TIME_DAYS[level]} days`;
}

function sortKeysDeep(value: unknown): unknown {
  if (Array.isArray(value)) {
    return value.map(sortKeysDeep);
  }
  if (value !== null && typeof value === "object") {
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(value as object).sort()) {
      out[key] = sortKeysDeep((value as Record<string, unknown>)[key]);
    }
    return out;
  }
  return value;
}

/** Canonical rendering: sorted keys, two-space indent, trailing newline. */
export function canonicalJson(config: ScenarioConfig): string {
  return JSON.stringify(sortKeysDeep(config), null, 2) + "\n";
}

export function parseConfig(text: string): ScenarioConfig {
  return JSON.parse(text) as ScenarioConfig;
}

export type FieldErrors = Partial<Record<string, string>>;

const COUNT_FIELDS = ["stores", "distribution_centers", "suppliers", "items"] as const;
const POSITIVE_FIELDS = [
  "store_capacity",
  "dc_capacity",
  "forecast_window",
  "safety_window",
  "run_length_days",
  "replications",
] as const;

function isInt(x: unknown): x is number {
  return typeof x === "number" && Number.isInteger(x);
}

/** Per-field validation messages; an empty object means submittable. */
export function validateConfig(config: ScenarioConfig): FieldErrors {
  const errors: FieldErrors = {};
  if (!config.name.trim()) {
    errors.name = "name must not be empty";
  }
  for (const field of COUNT_FIELDS) {
    if (!isInt(config[field]) || config[field] < 1) {
      errors[field] = "must be an integer of at least 1";
    }
  }
  for (const field of POSITIVE_FIELDS) {
    if (!isInt(config[field]) || config[field] < 1) {
      errors[field] = "must be an integer of at least 1";
    }
  }
  for (const field of ["demand_intensity", "demand_variability", "lead_time_level"] as const) {
    if (!LEVELS.includes(config[field])) {
      errors[field] = "must be one of -, 0, +";
    }
  }
  if (!isInt(config.warmup_days) || config.warmup_days < 0) {
    errors.warmup_days = "must be an integer of at least 0";
  } else if (config.warmup_days >= config.run_length_days) {
    errors.warmup_days = "must be shorter than the run length";
  }
  if (!isInt(config.master_seed)) {
    errors.master_seed = "must be an integer";
  }
  if (config.fixed_demand_quantity !== null && (!isInt(config.fixed_demand_quantity) || config.fixed_demand_quantity < 1)) {
    errors.fixed_demand_quantity = "must be empty or an integer of at least 1";
  }
  if (config.lead_time_override !== null && (!isInt(config.lead_time_override) || config.lead_time_override < 1)) {
    errors.lead_time_override = "must be empty or an integer of at least 1";
  }
  return errors;
}

/** The 27 factorial combinations in run order (intensity slowest). */
export function fullFactorial(base: ScenarioConfig): ScenarioConfig[] {
  const configs: ScenarioConfig[] = [];
  let k = 1;
  for (const intensity of LEVELS) {
    for (const variability of LEVELS) {
      for (const lead of LEVELS) {
        configs.push({
          ...base,
          name: `run-${String(k).padStart(2, "0")}`,
          demand_intensity: intensity,
          demand_variability: variability,
          lead_time_level: lead,
        });
        k += 1;
      }
    }
  }
  return configs;
}
