/** Wire types mirroring the simulation service payloads. */

export type Level = "-" | "0" | "+";

export interface ScenarioConfig {
  name: string;
  stores: number;
  distribution_centers: number;
  suppliers: number;
  items: number;
  demand_intensity: Level;
  demand_variability: Level;
  lead_time_level: Level;
  intensity_mapping: "inverse" | "direct";
  store_capacity: number;
  dc_capacity: number;
  forecast_window: number;
  safety_window: number;
  run_length_days: number;
  warmup_days: number;
  replications: number;
  master_seed: number;
  crn: boolean;
  demand_model: "poisson" | "deterministic" | "none";
  fixed_demand_quantity: number | null;
  lead_time_override: number | null;
  item_overrides: Record<string, Partial<Record<string, Level>>>;
  supplier_lead_overrides: Record<string, number>;
}

export interface ScenarioRecord {
  id: string;
  version: number;
  created_at: string;
  config: ScenarioConfig;
}

export interface RunHandle {
  run_id: string;
  state: "queued" | "running" | "done" | "failed";
  progress: number;
  created_at: string;
  scenario_id: string;
  seed: number;
  crn: boolean;
  replications: number;
  reason: string;
  config: ScenarioConfig;
}

export interface NodeRecord {
  node_id: string;
  node_kind: "store" | "dc";
  orders_received: number;
  orders_satisfied: number;
  fill_rate_orders: number;
  qty_ordered: number;
  qty_lost: number;
  fill_rate_quantity: number;
  avg_on_hand: number;
  avg_waiting_hours: number;
}

export interface MetricAggregate {
  mean: number;
  std: number;
}

export interface ResultsBody {
  run_id: string;
  scenario_id: string;
  config: ScenarioConfig;
  replications: number;
  degenerate_std: boolean;
  aggregates: Record<string, Record<string, MetricAggregate>>;
  records: { rep: number; nodes: NodeRecord[] }[];
}

export interface CompareDelta {
  node_id: string;
  fill_rate_orders_a: number;
  fill_rate_orders_b: number;
  fill_rate_orders_delta: number;
  fill_rate_quantity_a: number;
  fill_rate_quantity_b: number;
  fill_rate_quantity_delta: number;
}

export interface CompareBody {
  a: string;
  b: string;
  warnings: string[];
  deltas: CompareDelta[];
}
