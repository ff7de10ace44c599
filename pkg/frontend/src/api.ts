/** Thin REST client over the simulation service. */

import type {
  CompareBody,
  ResultsBody,
  RunHandle,
  ScenarioConfig,
  ScenarioRecord,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public field?: string,
  ) {
    super(message);
  }
}

async function parseFailure(response: Response): Promise<never> {
  let detail = response.statusText;
  let field: string | undefined;
  try {
    const body = await response.json();
    if (typeof body.detail === "string") detail = body.detail;
    if (typeof body.field === "string") field = body.field;
  } catch {
    // non-JSON failure body; keep the status text
  }
  throw new ApiError(response.status, detail, field);
}

export class ApiClient {
  constructor(public baseUrl: string = "http://127.0.0.1:8000") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      await parseFailure(response);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  createScenario(config: ScenarioConfig): Promise<ScenarioRecord> {
    return this.post("/scenarios", config);
  }

  updateScenario(id: string, config: ScenarioConfig): Promise<ScenarioRecord> {
    return this.request(`/scenarios/${id}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  listScenarios(): Promise<ScenarioRecord[]> {
    return this.request("/scenarios");
  }

  getScenario(id: string): Promise<ScenarioRecord> {
    return this.request(`/scenarios/${id}`);
  }

  startRun(scenarioId: string, seed?: number, crn?: boolean): Promise<RunHandle> {
    return this.post("/runs", { scenario_id: scenarioId, seed, crn });
  }

  getRun(runId: string): Promise<RunHandle> {
    return this.request(`/runs/${runId}`);
  }

  stopRun(runId: string): Promise<RunHandle> {
    return this.post(`/runs/${runId}/stop`, {});
  }

  getResults(runId: string): Promise<ResultsBody> {
    return this.request(`/runs/${runId}/results`);
  }

  resultsCsvUrl(runId: string): string {
    return `${this.baseUrl}/runs/${runId}/results.csv`;
  }

  compare(a: string, b: string): Promise<CompareBody> {
    return this.request(`/compare?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`);
  }
}

/** Poll a run once per interval until it reaches a terminal state. */
export function pollRun(
  client: ApiClient,
  runId: string,
  onUpdate: (handle: RunHandle) => void,
  intervalMs = 1000,
): { stop: () => void; done: Promise<RunHandle> } {
  let timer: ReturnType<typeof setTimeout> | undefined;
  let cancelled = false;
  const done = new Promise<RunHandle>((resolve, reject) => {
    const tick = async () => {
      if (cancelled) return;
      try {
        const handle = await client.getRun(runId);
        onUpdate(handle);
        if (handle.state === "done" || handle.state === "failed") {
          resolve(handle);
          return;
        }
      } catch (err) {
        reject(err);
        return;
      }
      timer = setTimeout(tick, intervalMs);
    };
    void tick();
  });
  return {
    stop: () => {
      cancelled = true;
      if (timer !== undefined) clearTimeout(timer);
    },
    done,
  };
}
