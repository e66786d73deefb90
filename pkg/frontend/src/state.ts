/** Session state and the steering loop.
 *
 * A steer applies the control change synchronously, then issues exactly one
 * /solve round-trip.  Each request takes a ticket from a monotone counter;
 * a response only lands if its ticket is still the newest, so rapid control
 * changes settle on the last one requested no matter what order the
 * responses arrive in.  Frontier refreshes run on their own ticket lane for
 * the same reason.
 *
 * Nothing in here computes solver quantities: state holds response
 * documents verbatim and the view renders them.
 */

import { ApiError } from "./api.js";
import type { ApiClient, FrontierRequest, SolveRequest } from "./api.js";
import type {
  FrontierDoc,
  InstanceDoc,
  NormName,
  SolutionDoc,
  StatsDoc,
} from "./types.js";

export type SteerChange =
  | { kind: "set_p"; p: number }
  | { kind: "toggle_preferred"; row: string }
  | { kind: "set_weights"; omega1: number; omega2: number }
  | { kind: "set_norm"; norm: NormName };

export interface SessionState {
  instanceId: string;
  observationsId: string;
  instance: InstanceDoc | null;
  stats: StatsDoc | null;
  p: number;
  pMin: number;
  pMax: number;
  norm: NormName;
  omega1: number;
  omega2: number;
  preferred: string[];
  method: "il" | "mil";
  solution: SolutionDoc | null;
  frontier: FrontierDoc | null;
  banner: string | null;
  pending: boolean;
}

export type Listener = (state: SessionState) => void;

function methodFor(preferred: string[]): "il" | "mil" {
  return preferred.length > 0 ? "mil" : "il";
}

/** Pure control-surface update; no requests, no solver math. */
export function applyChange(state: SessionState, change: SteerChange): SessionState {
  switch (change.kind) {
    case "set_p": {
      const p = Math.max(1, Math.floor(change.p));
      return { ...state, p };
    }
    case "toggle_preferred": {
      const preferred = state.preferred.includes(change.row)
        ? state.preferred.filter((name) => name !== change.row)
        : [...state.preferred, change.row];
      return { ...state, preferred, method: methodFor(preferred) };
    }
    case "set_weights":
      return { ...state, omega1: change.omega1, omega2: change.omega2 };
    case "set_norm":
      return { ...state, norm: change.norm };
  }
}

export function solveRequestFor(state: SessionState): SolveRequest {
  const req: SolveRequest = {
    instance: state.instanceId,
    observations: state.observationsId,
    method: state.method,
    p: state.p,
    norm: state.norm,
    include_activity: true,
  };
  if (state.method === "mil") {
    req.omega1 = state.omega1;
    req.omega2 = state.omega2;
    req.preferred = [...state.preferred];
  } else {
    req.include_cost = true;
  }
  return req;
}

export function frontierRequestFor(state: SessionState): FrontierRequest {
  const req: FrontierRequest = {
    instance: state.instanceId,
    observations: state.observationsId,
    p_min: state.pMin,
    p_max: state.pMax,
    mode: "independent",
    norm: state.norm,
  };
  if (state.method === "mil") {
    req.method = "mil";
    req.omega1 = state.omega1;
    req.omega2 = state.omega2;
    req.preferred = [...state.preferred];
  }
  return req;
}

function describeFailure(err: unknown): string {
  if (err instanceof ApiError && err.body) {
    return `${err.body.error}: ${err.body.detail}`;
  }
  return err instanceof Error ? err.message : String(err);
}

export class Session {
  /** Most recent control-initiated request chain; tests await this. */
  lastAction: Promise<unknown> = Promise.resolve();

  private state: SessionState;
  private listeners: Listener[] = [];
  private solveTicket = 0;
  private frontierTicket = 0;

  constructor(
    readonly api: ApiClient,
    seed: Pick<SessionState, "instanceId" | "observationsId"> &
      Partial<Pick<SessionState, "p" | "pMin" | "pMax" | "norm" | "omega1" | "omega2">>,
  ) {
    this.state = {
      instance: null,
      stats: null,
      p: seed.p ?? 1,
      pMin: seed.pMin ?? 1,
      pMax: seed.pMax ?? 3,
      norm: seed.norm ?? "l1",
      omega1: seed.omega1 ?? 1,
      omega2: seed.omega2 ?? 1,
      preferred: [],
      method: "il",
      solution: null,
      frontier: null,
      banner: null,
      pending: false,
      instanceId: seed.instanceId,
      observationsId: seed.observationsId,
    };
  }

  snapshot(): SessionState {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private patch(partial: Partial<SessionState>): void {
    this.state = { ...this.state, ...partial };
    for (const fn of this.listeners) fn(this.state);
  }

  /** Fetch the static context documents (instance rows, observation stats). */
  async loadContext(): Promise<void> {
    const [instance, stats] = await Promise.all([
      this.api.getInstance(this.state.instanceId),
      this.api.getStats(this.state.observationsId),
    ]);
    this.patch({ instance, stats });
  }

  dismissBanner(): void {
    this.patch({ banner: null });
  }

  /** Apply one control change and land its single /solve round-trip. */
  async steer(change: SteerChange): Promise<void> {
    this.patch(applyChange(this.state, change));
    await this.resolve();
  }

  /** Re-issue /solve for the current controls (initial load, retry). */
  async resolve(): Promise<void> {
    const ticket = ++this.solveTicket;
    this.patch({ pending: true });
    let landing: Partial<SessionState>;
    try {
      const doc = await this.api.solve(solveRequestFor(this.state));
      landing =
        doc.status === "OK"
          ? { solution: doc, banner: null }
          : { solution: doc, banner: `solver reported ${doc.status}` };
    } catch (err) {
      landing = { banner: describeFailure(err) };
    }
    if (ticket !== this.solveTicket) return; // superseded by a newer steer
    this.patch({ ...landing, pending: false });
  }

  /** Re-sweep the frontier for the current controls. */
  async refreshFrontier(): Promise<void> {
    const ticket = ++this.frontierTicket;
    try {
      const frontier = await this.api.frontier(frontierRequestFor(this.state));
      if (ticket !== this.frontierTicket) return;
      this.patch({ frontier });
    } catch (err) {
      if (ticket !== this.frontierTicket) return;
      this.patch({ banner: describeFailure(err) });
    }
  }
}
