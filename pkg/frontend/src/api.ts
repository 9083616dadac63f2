import type {
  BranchSet,
  CommunityDesign,
  GenerationOverrides,
  Job,
  ThreadPage,
  Universe,
  UniverseSummary,
  WhatIfRequest,
} from "./types.js";

/** Error carrying the HTTP status plus the per-field violations the
 * service returns on design validation failures. */
export class ApiError extends Error {
  readonly status: number;
  readonly violations: string[];

  constructor(status: number, message: string, violations: string[] = []) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.violations = violations;
  }
}

export interface ApiClientOptions {
  baseUrl: string;
  /** Bearer token, when the service runs with auth enabled. */
  token?: string;
  /** Injectable for tests; defaults to the global fetch. */
  fetchFn?: typeof fetch;
}

/** Typed client for the simulacra service. All generation happens
 * server-side; this client only moves JSON. */
export class ApiClient {
  private readonly baseUrl: string;
  private readonly token?: string;
  private readonly fetchFn: typeof fetch;

  constructor(options: ApiClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/+$/, "");
    this.token = options.token;
    this.fetchFn = options.fetchFn ?? fetch;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    idempotencyKey?: string,
  ): Promise<T> {
    const headers: Record<string, string> = { Accept: "application/json" };
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers.Authorization = `Bearer ${this.token}`;
    if (idempotencyKey) headers["Idempotency-Key"] = idempotencyKey;

    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });

    if (!response.ok) {
      let detail = response.statusText;
      let violations: string[] = [];
      try {
        const payload = (await response.json()) as Record<string, unknown>;
        if (Array.isArray(payload.violations)) {
          violations = payload.violations.map(String);
          detail = violations.join("; ");
        } else if (typeof payload.detail === "string") {
          detail = payload.detail;
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail, violations);
    }
    return (await response.json()) as T;
  }

  createDesign(design: CommunityDesign): Promise<{ design_id: string }> {
    return this.request("POST", "/api/designs", design);
  }

  getDesign(designId: string): Promise<CommunityDesign> {
    return this.request("GET", `/api/designs/${designId}`);
  }

  startGenerate(
    designId: string,
    overrides: GenerationOverrides = {},
    idempotencyKey?: string,
  ): Promise<{ job_id: string }> {
    return this.request(
      "POST", `/api/designs/${designId}/generate`, overrides, idempotencyKey);
  }

  startMultiverse(
    designId: string,
    overrides: GenerationOverrides = {},
    idempotencyKey?: string,
  ): Promise<{ job_id: string }> {
    return this.request(
      "POST", `/api/designs/${designId}/multiverse`, overrides, idempotencyKey);
  }

  getJob(jobId: string): Promise<Job> {
    return this.request("GET", `/api/jobs/${jobId}`);
  }

  listUniverses(parentCommunity?: string): Promise<{ universes: UniverseSummary[] }> {
    const query = parentCommunity
      ? `?parent_community=${encodeURIComponent(parentCommunity)}`
      : "";
    return this.request("GET", `/api/universes${query}`);
  }

  getUniverse(universeId: string): Promise<Universe> {
    return this.request("GET", `/api/universes/${universeId}`);
  }

  getThreads(universeId: string, page = 0): Promise<ThreadPage> {
    return this.request("GET", `/api/universes/${universeId}/threads?page=${page}`);
  }

  whatIf(universeId: string, spec: WhatIfRequest): Promise<BranchSet> {
    return this.request("POST", `/api/universes/${universeId}/whatif`, spec);
  }

  threadMultiverse(
    universeId: string,
    threadId: string,
    atUtteranceIndex: number,
    alternatives: number,
  ): Promise<BranchSet> {
    return this.request(
      "POST",
      `/api/universes/${universeId}/threads/${threadId}/multiverse`,
      { at_utterance_index: atUtteranceIndex, alternatives },
    );
  }

  listBranches(universeId: string): Promise<BranchSet> {
    return this.request("GET", `/api/universes/${universeId}/branches`);
  }
}

/** Poll a job until it reaches a terminal state. */
export async function pollJob(
  client: ApiClient,
  jobId: string,
  options: {
    intervalMs?: number;
    timeoutMs?: number;
    onProgress?: (job: Job) => void;
  } = {},
): Promise<Job> {
  const interval = options.intervalMs ?? 500;
  const deadline = Date.now() + (options.timeoutMs ?? 120_000);
  for (;;) {
    const job = await client.getJob(jobId);
    options.onProgress?.(job);
    if (job.state === "done" || job.state === "failed") return job;
    if (Date.now() > deadline) {
      throw new ApiError(0, `job ${jobId} timed out while ${job.state}`);
    }
    await new Promise((resolve) => setTimeout(resolve, interval));
  }
}
