/** Side-by-side fill-rate comparison of two finished runs. */

import { assertFillRate } from "./charts.js";
import type { CompareBody } from "./types.js";

export interface CompareRow {
  node_id: string;
  a: number;
  b: number;
  delta: number;
  qty_a: number;
  qty_b: number;
  qty_delta: number;
}

export function buildCompareRows(body: CompareBody): CompareRow[] {
  return body.deltas.map((d) => {
    assertFillRate(d.fill_rate_orders_a, d.node_id);
    assertFillRate(d.fill_rate_orders_b, d.node_id);
    return {
      node_id: d.node_id,
      a: d.fill_rate_orders_a,
      b: d.fill_rate_orders_b,
      delta: d.fill_rate_orders_delta,
      qty_a: d.fill_rate_quantity_a,
      qty_b: d.fill_rate_quantity_b,
      qty_delta: d.fill_rate_quantity_delta,
    };
  });
}

export function renderCompare(container: HTMLElement, body: CompareBody): void {
  container.textContent = "";
  for (const warning of body.warnings) {
    const note = document.createElement("div");
    note.className = "warning-banner";
    note.textContent = `warning: ${warning}`;
    container.appendChild(note);
  }
  const table = document.createElement("table");
  table.className = "compare-table";
  const head = table.createTHead().insertRow();
  for (const title of [
    "node",
    "fill rate A",
    "fill rate B",
    "delta",
    "qty loss A",
    "qty loss B",
    "delta",
  ]) {
    const th = document.createElement("th");
    th.textContent = title;
    head.appendChild(th);
  }
  const tbody = table.createTBody();
  for (const row of buildCompareRows(body)) {
    const tr = tbody.insertRow();
    tr.insertCell().textContent = row.node_id;
    for (const value of [row.a, row.b, row.delta, row.qty_a, row.qty_b, row.qty_delta]) {
      const cell = tr.insertCell();
      cell.textContent = value.toFixed(4);
      if (Math.abs(value) > 0 && [row.delta, row.qty_delta].includes(value)) {
        cell.className = value > 0 ? "delta-up" : "delta-down";
      }
    }
  }
  container.appendChild(table);
}
