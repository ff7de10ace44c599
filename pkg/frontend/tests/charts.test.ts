import { describe, expect, it } from "vitest";

import { MalformedDataError, sweepChartTabs } from "../src/charts.js";
import type { SweepEntry } from "../src/charts.js";
import { LEVELS } from "../src/config.js";

function fullSweep(fill: (i: string, v: string, l: string) => number): SweepEntry[] {
  const entries: SweepEntry[] = [];
  for (const lead of LEVELS) {
    for (const intensity of LEVELS) {
      for (const variability of LEVELS) {
        entries.push({
          demand_intensity: intensity,
          demand_variability: variability,
          lead_time_level: lead,
          store_fill_rate: fill(intensity, variability, lead),
        });
      }
    }
  }
  return entries;
}

describe("sweep chart grouping", () => {
  it("renders a 27-scenario sweep into 3 tabs of 3x3 bars", () => {
    const tabs = sweepChartTabs(fullSweep(() => 0.5));
    expect(tabs).toHaveLength(3);
    for (const tab of tabs) {
      expect(tab.groups).toHaveLength(3);
      for (const group of tab.groups) {
        expect(group.bars).toHaveLength(3);
      }
    }
    expect(tabs.map((t) => t.lead)).toEqual(["-", "0", "+"]);
  });

  it("keeps tabs keyed by lead time and groups by intensity", () => {
    const tabs = sweepChartTabs(
      fullSweep((i, _v, l) => (l === "-" ? (i === "+" ? 0.2 : 0.8) : 0.5)),
    );
    const lowLead = tabs[0];
    expect(lowLead.groups[0].label).toBe("intensity -");
    expect(lowLead.groups[0].bars[0].value).toBeCloseTo(0.8);
    expect(lowLead.groups[2].bars[0].value).toBeCloseTo(0.2);
    expect(tabs[1].groups[2].bars[0].value).toBeCloseTo(0.5);
  });

  it("averages replicate entries for the same cell", () => {
    const entries = [...fullSweep(() => 0.4), ...fullSweep(() => 0.6)];
    const tabs = sweepChartTabs(entries);
    expect(tabs[0].groups[0].bars[0].value).toBeCloseTo(0.5);
  });

  it("rejects fill rates outside the unit interval", () => {
    const entries = fullSweep(() => 0.5);
    entries[5].store_fill_rate = 1.2;
    expect(() => sweepChartTabs(entries)).toThrow(MalformedDataError);
  });

  it("rejects non-finite fill rates", () => {
    const entries = fullSweep(() => 0.5);
    entries[0].store_fill_rate = Number.NaN;
    expect(() => sweepChartTabs(entries)).toThrow(MalformedDataError);
  });

  it("rejects an incomplete factorial", () => {
    const entries = fullSweep(() => 0.5).slice(0, 20);
    expect(() => sweepChartTabs(entries)).toThrow(/missing scenario/);
  });
});
