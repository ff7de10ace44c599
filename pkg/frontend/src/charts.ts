/** Chart view-models: store fill rate grouped for the factor charts.
 *
 * The charts group by the two varying factors (demand intensity on the
 * x-axis, one bar per variability level) with the third factor as a
 * tab, one tab per lead-time level.
 */

import { LEVELS } from "./config.js";
import type { Level } from "./types.js";

export class MalformedDataError extends Error {}

export interface SweepEntry {
  demand_intensity: Level;
  demand_variability: Level;
  lead_time_level: Level;
  store_fill_rate: number;
}

export interface BarGroup {
  label: string; // x-axis group (intensity level)
  bars: { label: string; value: number }[]; // one bar per variability level
}

export interface LeadTab {
  lead: Level;
  title: string;
  groups: BarGroup[];
}

export function assertFillRate(value: number, context: string): void {
  if (typeof value !== "number" || !Number.isFinite(value) || value < 0 || value > 1) {
    throw new MalformedDataError(`${context}: fill rate ${value} outside [0, 1]`);
  }
}

/** One tab per lead-time level; within a tab, bars by intensity x variability. */
export function sweepChartTabs(entries: SweepEntry[]): LeadTab[] {
  const index = new Map<string, number[]>();
  for (const entry of entries) {
    assertFillRate(
      entry.store_fill_rate,
      `scenario (${entry.demand_intensity},${entry.demand_variability},${entry.lead_time_level})`,
    );
    const key = `${entry.lead_time_level}|${entry.demand_intensity}|${entry.demand_variability}`;
    const bucket = index.get(key) ?? [];
    bucket.push(entry.store_fill_rate);
    index.set(key, bucket);
  }
  const tabs: LeadTab[] = [];
  for (const lead of LEVELS) {
    const groups: BarGroup[] = [];
    for (const intensity of LEVELS) {
      const bars = [];
      for (const variability of LEVELS) {
        const bucket = index.get(`${lead}|${intensity}|${variability}`);
        if (!bucket || bucket.length === 0) {
          throw new MalformedDataError(
            `missing scenario for lead ${lead}, intensity ${intensity}, variability ${variability}`,
          );
        }
        const mean = bucket.reduce((a, b) => a + b, 0) / bucket.length;
        bars.push({ label: `variability ${variability}`, value: mean });
      }
      groups.push({ label: `intensity ${intensity}`, bars });
    }
    tabs.push({ lead, title: `lead time ${lead}`, groups });
  }
  return tabs;
}

/** Render one tab's grouped bars as plain divs (heights in percent). */
export function renderBarGroups(container: HTMLElement, groups: BarGroup[]): void {
  container.textContent = "";
  const chart = document.createElement("div");
  chart.className = "bar-chart";
  for (const group of groups) {
    const groupEl = document.createElement("div");
    groupEl.className = "bar-group";
    const barsEl = document.createElement("div");
    barsEl.className = "bars";
    for (const bar of group.bars) {
      const barEl = document.createElement("div");
      barEl.className = "bar";
      barEl.style.height = `${(bar.value * 100).toFixed(1)}%`;
      barEl.title = `${bar.label}: ${bar.value.toFixed(3)}`;
      barsEl.appendChild(barEl);
    }
    const label = document.createElement("div");
    label.className = "bar-label";
    label.textContent = group.label;
    groupEl.append(barsEl, label);
    chart.appendChild(groupEl);
  }
  container.appendChild(chart);
}
