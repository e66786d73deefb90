/** Thin typed client for the solver service.
 *
 * Every displayed number in the UI comes out of one of these calls; the
 * client never post-processes payloads beyond JSON decoding.  A 422 whose
 * body is a solution document is a *solver outcome* (the miss is something
 * the view renders), so `solve` returns it instead of throwing; every other
 * non-2xx response raises ApiError.
 */

import type {
  CostDoc,
  ErrorDoc,
  FrontierDoc,
  InstanceDoc,
  MethodName,
  NormName,
  SolutionDoc,
  StatsDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly body: ErrorDoc | null;

  constructor(status: number, body: ErrorDoc | null, message: string) {
    super(message);
    this.status = status;
    this.body = body;
  }
}

export interface SolveRequest {
  instance: string;
  observations: string;
  method: MethodName;
  p?: number;
  norm?: NormName;
  omega1?: number;
  omega2?: number;
  preferred?: string[];
  include_cost?: boolean;
  include_activity?: boolean;
}

export interface FrontierRequest {
  instance: string;
  observations: string;
  p_min: number;
  p_max: number;
  mode?: "independent" | "dependent";
  norm?: NormName;
  method?: "il" | "mil";
  omega1?: number;
  omega2?: number;
  preferred?: string[];
}

export interface InferCostRequest {
  instance: string;
  observations: string;
  z: number[];
}

interface Registered {
  id: string;
  engine_version: string;
}

async function decode(response: Response): Promise<unknown> {
  const text = await response.text();
  try {
    return JSON.parse(text);
  } catch {
    return null;
  }
}

function fail(response: Response, body: unknown): never {
  const doc =
    body && typeof body === "object" && "error" in (body as object)
      ? (body as ErrorDoc)
      : null;
  const detail = doc ? `${doc.error}: ${doc.detail}` : `HTTP ${response.status}`;
  throw new ApiError(response.status, doc, detail);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async post(path: string, payload: unknown): Promise<Response> {
    return fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  private async json<T>(response: Response): Promise<T> {
    const body = await decode(response);
    if (!response.ok) fail(response, body);
    return body as T;
  }

  async registerInstance(doc: unknown): Promise<string> {
    const res = await this.post("/instances", doc);
    return (await this.json<Registered>(res)).id;
  }

  async getInstance(id: string): Promise<InstanceDoc> {
    const res = await fetch(`${this.baseUrl}/instances/${id}`);
    return this.json<InstanceDoc>(res);
  }

  async registerObservations(instanceId: string, csv: string): Promise<string> {
    const res = await fetch(
      `${this.baseUrl}/observations?instance=${encodeURIComponent(instanceId)}`,
      { method: "POST", headers: { "content-type": "text/csv" }, body: csv },
    );
    return (await this.json<Registered>(res)).id;
  }

  async getStats(observationsId: string, percentiles?: number[]): Promise<StatsDoc> {
    const query = percentiles ? `?percentiles=${percentiles.join(",")}` : "";
    const res = await fetch(`${this.baseUrl}/observations/${observationsId}/stats${query}`);
    return this.json<StatsDoc>(res);
  }

  /** Returns the solution document whether the solver landed or missed. */
  async solve(req: SolveRequest): Promise<SolutionDoc> {
    const res = await this.post("/solve", req);
    const body = await decode(res);
    if (res.ok) return body as SolutionDoc;
    if (res.status === 422 && body && typeof body === "object" && "method" in body) {
      return body as SolutionDoc;
    }
    fail(res, body);
  }

  async frontier(req: FrontierRequest): Promise<FrontierDoc> {
    const res = await this.post("/frontier", req);
    return this.json<FrontierDoc>(res);
  }

  async inferCost(req: InferCostRequest): Promise<CostDoc> {
    const res = await this.post("/infer-cost", req);
    return this.json<CostDoc>(res);
  }
}
