/** App shell: editor, run console, dashboard, sweep comparison, compare. */

import { ApiClient, ApiError } from "./api.js";
import { renderBarGroups, sweepChartTabs, MalformedDataError } from "./charts.js";
import type { SweepEntry } from "./charts.js";
import { fullFactorial } from "./config.js";
import { renderCompare } from "./compare.js";
import { RunConsole } from "./console.js";
import { buildNodeTable, renderErrorBanner, renderNodeTable } from "./dashboard.js";
import { ScenarioEditor } from "./editor.js";
import type { ResultsBody, RunHandle, ScenarioConfig } from "./types.js";

const client = new ApiClient(
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8000",
);

function section(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing section #${id}`);
  return el;
}

function meanStoreFill(results: ResultsBody): number {
  const rates: number[] = [];
  for (const rep of results.records) {
    for (const node of rep.nodes) {
      if (node.node_kind === "store") rates.push(node.fill_rate_orders);
    }
  }
  return rates.reduce((a, b) => a + b, 0) / rates.length;
}

async function showResults(handle: RunHandle): Promise<void> {
  const host = section("dashboard");
  try {
    const results = await client.getResults(handle.run_id);
    renderNodeTable(host, buildNodeTable(results));
  } catch (err) {
    if (err instanceof MalformedDataError) {
      renderErrorBanner(host, `cannot chart results: ${err.message}`);
    } else if (err instanceof ApiError) {
      renderErrorBanner(host, `results unavailable: ${err.message}`);
    } else {
      throw err;
    }
  }
}

async function runSweep(base: ScenarioConfig, status: HTMLElement): Promise<void> {
  const chartHost = section("sweep-chart");
  const entries: SweepEntry[] = [];
  const configs = fullFactorial(base);
  for (let i = 0; i < configs.length; i++) {
    const config = configs[i];
    status.textContent = `sweep: ${config.name} (${i + 1}/${configs.length})`;
    const record = await client.createScenario(config);
    const handle = await client.startRun(record.id, base.master_seed, true);
    let current = handle;
    while (current.state !== "done" && current.state !== "failed") {
      await new Promise((resolve) => setTimeout(resolve, 1000));
      current = await client.getRun(current.run_id);
    }
    if (current.state === "failed") {
      status.textContent = `sweep failed at ${config.name}: ${current.reason}`;
      return;
    }
    const results = await client.getResults(current.run_id);
    entries.push({
      demand_intensity: config.demand_intensity,
      demand_variability: config.demand_variability,
      lead_time_level: config.lead_time_level,
      store_fill_rate: meanStoreFill(results),
    });
  }
  status.textContent = "sweep complete";
  try {
    const tabs = sweepChartTabs(entries);
    const tabBar = document.createElement("div");
    tabBar.className = "tab-bar";
    const chartArea = document.createElement("div");
    chartHost.textContent = "";
    chartHost.append(tabBar, chartArea);
    for (const tab of tabs) {
      const button = document.createElement("button");
      button.textContent = tab.title;
      button.addEventListener("click", () => renderBarGroups(chartArea, tab.groups));
      tabBar.appendChild(button);
    }
    renderBarGroups(chartArea, tabs[0].groups);
  } catch (err) {
    if (err instanceof MalformedDataError) {
      renderErrorBanner(chartHost, err.message);
    } else {
      throw err;
    }
  }
}

function main(): void {
  const runConsole = new RunConsole(client, (handle) => void showResults(handle));
  section("console").appendChild(runConsole.element);

  const editor = new ScenarioEditor(async (config) => {
    try {
      const record = await client.createScenario(config);
      section("editor-status").textContent =
        `saved scenario ${record.id} (version ${record.version})`;
      await runConsole.start(record.id, config.master_seed, config.crn);
    } catch (err) {
      if (err instanceof ApiError) {
        editor.showServerError(err.field, err.message);
      } else {
        throw err;
      }
    }
  });
  section("editor").appendChild(editor.element);

  const sweepButton = document.getElementById("sweep-button") as HTMLButtonElement;
  sweepButton.addEventListener("click", () => {
    void runSweep(editor.value(), section("sweep-status"));
  });

  const compareForm = document.getElementById("compare-form") as HTMLFormElement;
  compareForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const a = (document.getElementById("compare-a") as HTMLInputElement).value.trim();
    const b = (document.getElementById("compare-b") as HTMLInputElement).value.trim();
    const host = section("compare-result");
    try {
      renderCompare(host, await client.compare(a, b));
    } catch (err) {
      if (err instanceof ApiError || err instanceof MalformedDataError) {
        renderErrorBanner(host, err.message);
      } else {
        throw err;
      }
    }
  });
}

main();
