/** Results dashboard: per-node table rows and guards against bad payloads. */

import { assertFillRate, MalformedDataError } from "./charts.js";
import type { NodeRecord, ResultsBody } from "./types.js";

export interface NodeTableRow {
  node_id: string;
  node_kind: string;
  orders_received: number;
  orders_satisfied: number;
  qty_ordered: number;
  qty_lost: number;
  fill_rate_orders: number;
  fill_rate_quantity: number;
  avg_on_hand: number;
  avg_waiting_hours: number;
}

function meanOf(records: NodeRecord[], field: keyof NodeRecord): number {
  const values = records.map((r) => r[field] as number);
  return values.reduce((a, b) => a + b, 0) / values.length;
}

/** Average every node's metrics across replications, with range checks. */
export function buildNodeTable(results: ResultsBody): NodeTableRow[] {
  if (!Array.isArray(results.records) || results.records.length === 0) {
    throw new MalformedDataError("results contain no replication records");
  }
  const byNode = new Map<string, NodeRecord[]>();
  for (const rep of results.records) {
    for (const node of rep.nodes) {
      const bucket = byNode.get(node.node_id) ?? [];
      bucket.push(node);
      byNode.set(node.node_id, bucket);
    }
  }
  const rows: NodeTableRow[] = [];
  for (const [nodeId, records] of byNode) {
    for (const record of records) {
      assertFillRate(record.fill_rate_orders, nodeId);
      assertFillRate(record.fill_rate_quantity, nodeId);
    }
    rows.push({
      node_id: nodeId,
      node_kind: records[0].node_kind,
      orders_received: meanOf(records, "orders_received"),
      orders_satisfied: meanOf(records, "orders_satisfied"),
      qty_ordered: meanOf(records, "qty_ordered"),
      qty_lost: meanOf(records, "qty_lost"),
      fill_rate_orders: meanOf(records, "fill_rate_orders"),
      fill_rate_quantity: meanOf(records, "fill_rate_quantity"),
      avg_on_hand: meanOf(records, "avg_on_hand"),
      avg_waiting_hours: meanOf(records, "avg_waiting_hours"),
    });
  }
  rows.sort((a, b) =>
    a.node_kind === b.node_kind ? a.node_id.localeCompare(b.node_id) : a.node_kind.localeCompare(b.node_kind),
  );
  return rows;
}

const TABLE_COLUMNS: { key: keyof NodeTableRow; title: string; digits?: number }[] = [
  { key: "node_id", title: "node" },
  { key: "node_kind", title: "kind" },
  { key: "orders_received", title: "orders", digits: 1 },
  { key: "orders_satisfied", title: "satisfied", digits: 1 },
  { key: "qty_ordered", title: "qty ordered", digits: 1 },
  { key: "qty_lost", title: "qty lost", digits: 1 },
  { key: "fill_rate_orders", title: "fill rate (orders)", digits: 4 },
  { key: "fill_rate_quantity", title: "fill rate (quantity)", digits: 4 },
  { key: "avg_on_hand", title: "avg on hand", digits: 1 },
  { key: "avg_waiting_hours", title: "avg wait (h)", digits: 1 },
];

export function renderNodeTable(container: HTMLElement, rows: NodeTableRow[]): void {
  container.textContent = "";
  const table = document.createElement("table");
  table.className = "node-table";
  const head = table.createTHead().insertRow();
  for (const column of TABLE_COLUMNS) {
    const th = document.createElement("th");
    th.textContent = column.title;
    head.appendChild(th);
  }
  const body = table.createTBody();
  for (const row of rows) {
    const tr = body.insertRow();
    for (const column of TABLE_COLUMNS) {
      const value = row[column.key];
      tr.insertCell().textContent =
        typeof value === "number" ? value.toFixed(column.digits ?? 0) : String(value);
    }
  }
  container.appendChild(table);
}

export function renderErrorBanner(container: HTMLElement, message: string): void {
  container.textContent = "";
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = message;
  container.appendChild(banner);
}
