import type { ApiClient } from "../src/api.js";
import { Session } from "../src/state.js";
import type {
  FrontierDoc,
  InstanceDoc,
  SolutionDoc,
  StatsDoc,
  Status,
} from "../src/types.js";

export function deferred<T>() {
  let resolve!: (value: T) => void;
  let reject!: (reason?: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

export function solutionDoc(overrides: Partial<SolutionDoc> = {}): SolutionDoc {
  return {
    method: "il",
    p: 2,
    z: [10, 10],
    binding: ["G4", "G5"],
    tight: ["G4", "G5"],
    distance: 6,
    preferred_bound_count: null,
    per_observation_eps: [
      [1, 1],
      [1, 1],
      [0, 2],
    ],
    status: "OK",
    engine_version: "0",
    id: "sol-test",
    ...overrides,
  };
}

export function missDoc(p: number, status: Status = "INFEASIBLE_AT_P"): SolutionDoc {
  return solutionDoc({
    p,
    z: null,
    binding: null,
    tight: null,
    distance: null,
    per_observation_eps: null,
    status,
  });
}

export function frontierDoc(overrides: Partial<FrontierDoc> = {}): FrontierDoc {
  const strip = (doc: SolutionDoc) => {
    const { engine_version: _e, id: _i, ...rest } = doc;
    return rest;
  };
  return {
    mode: "independent",
    mil_weights: null,
    points: [
      { p: 1, status: "OK", solution: strip(solutionDoc({ p: 1, z: [10, 9], distance: 3 })) },
      { p: 2, status: "OK", solution: strip(solutionDoc()) },
      { p: 3, status: "INFEASIBLE_AT_P", solution: null },
    ],
    engine_version: "0",
    id: "frontier-test",
    ...overrides,
  };
}

export function instanceDoc(): InstanceDoc {
  return {
    name: "corner-example",
    variables: ["x1", "x2"],
    constraints: [
      { name: "G1", coeffs: [-1, 1], sense: "<=", rhs: 10, kind: "relevant", preferred: false },
      { name: "G2", coeffs: [-0.5, 1], sense: "<=", rhs: 11, kind: "relevant", preferred: false },
      { name: "G3", coeffs: [0.5, 1], sense: "<=", rhs: 16, kind: "relevant", preferred: false },
      { name: "G4", coeffs: [1, 1], sense: "<=", rhs: 20, kind: "relevant", preferred: false },
      { name: "G5", coeffs: [1, 0], sense: "<=", rhs: 10, kind: "relevant", preferred: false },
      { name: "G6", coeffs: [1, 0], sense: ">=", rhs: 0, kind: "trivial", preferred: false },
      { name: "G7", coeffs: [0, 1], sense: ">=", rhs: 0, kind: "trivial", preferred: false },
    ],
    engine_version: "0",
    id: "inst-test",
  };
}

export function statsDoc(): StatsDoc {
  return {
    variables: ["x1", "x2"],
    percentiles: [10, 25, 50, 75, 90],
    values: [
      [9.2, 8.2],
      [9.5, 8.5],
      [10, 9],
      [10.5, 9],
      [10.8, 9],
    ],
    engine_version: "0",
  };
}

/** Recording fake for the handful of ApiClient methods the session uses. */
export class FakeApi {
  solveCalls: unknown[] = [];
  frontierCalls: unknown[] = [];
  solveQueue: Array<Promise<SolutionDoc> | SolutionDoc> = [];
  frontierResult: FrontierDoc = frontierDoc();
  instanceResult: InstanceDoc = instanceDoc();
  statsResult: StatsDoc = statsDoc();

  async solve(req: unknown): Promise<SolutionDoc> {
    this.solveCalls.push(req);
    const next = this.solveQueue.shift();
    if (next === undefined) return solutionDoc();
    return next;
  }

  async frontier(req: unknown): Promise<FrontierDoc> {
    this.frontierCalls.push(req);
    return this.frontierResult;
  }

  async getInstance(): Promise<InstanceDoc> {
    return this.instanceResult;
  }

  async getStats(): Promise<StatsDoc> {
    return this.statsResult;
  }

  asClient(): ApiClient {
    return this as unknown as ApiClient;
  }
}

export function makeSession(api: FakeApi = new FakeApi()): { api: FakeApi; session: Session } {
  const session = new Session(api.asClient(), {
    instanceId: "inst-test",
    observationsId: "obs-test",
    p: 2,
    pMax: 3,
    omega1: 1,
    omega2: 5,
  });
  return { api, session };
}
