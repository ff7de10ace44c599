import { describe, expect, it } from "vitest";

import { MalformedDataError } from "../src/charts.js";
import { buildCompareRows } from "../src/compare.js";
import { buildNodeTable } from "../src/dashboard.js";
import type { CompareBody, NodeRecord, ResultsBody } from "../src/types.js";
import { defaultConfig } from "../src/config.js";

function node(id: string, kind: "store" | "dc", fill: number, extra: Partial<NodeRecord> = {}): NodeRecord {
  return {
    node_id: id,
    node_kind: kind,
    orders_received: 100,
    orders_satisfied: Math.round(fill * 100),
    fill_rate_orders: fill,
    qty_ordered: 2000,
    qty_lost: 50,
    fill_rate_quantity: 0.025,
    avg_on_hand: 150,
    avg_waiting_hours: 16,
    ...extra,
  };
}

function results(reps: NodeRecord[][]): ResultsBody {
  return {
    run_id: "r1",
    scenario_id: "s1",
    config: defaultConfig(),
    replications: reps.length,
    degenerate_std: false,
    aggregates: {},
    records: reps.map((nodes, rep) => ({ rep, nodes })),
  };
}

describe("node table", () => {
  it("averages node metrics across replications", () => {
    const body = results([
      [node("store-0", "store", 0.8), node("dc-0", "dc", 1.0)],
      [node("store-0", "store", 0.6), node("dc-0", "dc", 0.9)],
    ]);
    const rows = buildNodeTable(body);
    expect(rows.map((r) => r.node_id)).toEqual(["dc-0", "store-0"]);
    const store = rows.find((r) => r.node_id === "store-0")!;
    expect(store.fill_rate_orders).toBeCloseTo(0.7);
    expect(store.avg_waiting_hours).toBeCloseTo(16);
  });

  it("rejects fill rates outside the unit interval", () => {
    const body = results([[node("store-0", "store", 1.4)]]);
    expect(() => buildNodeTable(body)).toThrow(MalformedDataError);
  });

  it("rejects negative fill rates", () => {
    const body = results([[node("store-0", "store", -0.1)]]);
    expect(() => buildNodeTable(body)).toThrow(MalformedDataError);
  });

  it("rejects empty payloads", () => {
    expect(() => buildNodeTable(results([]))).toThrow(MalformedDataError);
  });
});

describe("compare rows", () => {
  const body: CompareBody = {
    a: "runA",
    b: "runB",
    warnings: ["runs used different master seeds"],
    deltas: [
      {
        node_id: "store-0",
        fill_rate_orders_a: 0.8,
        fill_rate_orders_b: 0.7,
        fill_rate_orders_delta: -0.1,
        fill_rate_quantity_a: 0.02,
        fill_rate_quantity_b: 0.05,
        fill_rate_quantity_delta: 0.03,
      },
    ],
  };

  it("builds paired rows with deltas", () => {
    const rows = buildCompareRows(body);
    expect(rows).toHaveLength(1);
    expect(rows[0].delta).toBeCloseTo(-0.1);
    expect(rows[0].qty_delta).toBeCloseTo(0.03);
  });

  it("rejects malformed fill rates", () => {
    const bad = structuredClone(body);
    bad.deltas[0].fill_rate_orders_a = 7;
    expect(() => buildCompareRows(bad)).toThrow(MalformedDataError);
  });
});
