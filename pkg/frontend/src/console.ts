/** Run console: launch, live progress via 1 s polling, cooperative stop. */

import { ApiClient, pollRun } from "./api.js";
import type { RunHandle } from "./types.js";

export class RunConsole {
  readonly element: HTMLElement;
  private statusEl: HTMLElement;
  private progressEl: HTMLProgressElement;
  private stopButton: HTMLButtonElement;
  private csvLink: HTMLAnchorElement;
  private poller?: { stop: () => void; done: Promise<RunHandle> };
  private currentRunId?: string;

  constructor(
    private client: ApiClient,
    private onDone: (handle: RunHandle) => void,
  ) {
    this.element = document.createElement("div");
    this.element.className = "run-console";
    this.statusEl = document.createElement("div");
    this.statusEl.className = "run-status";
    this.statusEl.textContent = "no run yet";
    this.progressEl = document.createElement("progress");
    this.progressEl.max = 1;
    this.progressEl.value = 0;
    this.stopButton = document.createElement("button");
    this.stopButton.textContent = "Stop";
    this.stopButton.disabled = true;
    this.stopButton.addEventListener("click", () => void this.stop());
    this.csvLink = document.createElement("a");
    this.csvLink.textContent = "download CSV";
    this.csvLink.hidden = true;
    this.element.append(this.statusEl, this.progressEl, this.stopButton, this.csvLink);
  }

  async start(scenarioId: string, seed?: number, crn?: boolean): Promise<void> {
    this.poller?.stop();
    const handle = await this.client.startRun(scenarioId, seed, crn);
    this.currentRunId = handle.run_id;
    this.csvLink.hidden = true;
    this.stopButton.disabled = false;
    this.update(handle);
    this.poller = pollRun(this.client, handle.run_id, (h) => this.update(h));
    const finished = await this.poller.done;
    this.stopButton.disabled = true;
    if (finished.state === "done") {
      this.csvLink.href = this.client.resultsCsvUrl(finished.run_id);
      this.csvLink.hidden = false;
      this.onDone(finished);
    }
  }

  async stop(): Promise<void> {
    if (this.currentRunId) {
      await this.client.stopRun(this.currentRunId);
    }
  }

  private update(handle: RunHandle): void {
    this.progressEl.value = handle.progress;
    const pct = (handle.progress * 100).toFixed(0);
    const reason = handle.reason ? ` (${handle.reason})` : "";
    this.statusEl.textContent = `run ${handle.run_id}: ${handle.state}${reason}, ${pct}%`;
  }
}
