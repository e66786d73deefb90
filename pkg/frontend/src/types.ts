/** Response documents, field-for-field as the service serializes them. */

export type Status = "OK" | "INFEASIBLE_AT_P" | "TERMINATED";

export interface SolutionDoc {
  method: string;
  p: number | null;
  z: number[] | null;
  binding: string[] | null;
  tight: string[] | null;
  distance: number | null;
  preferred_bound_count: number | null;
  per_observation_eps: number[][] | null;
  status: Status;
  engine_version: string;
  id: string;
  /** present when the solve request asked for include_cost */
  cost?: CostDoc;
  /** present when the solve request asked for include_activity */
  activity?: ActivityDoc;
}

export interface FrontierPointDoc {
  p: number;
  status: Status;
  solution: Omit<SolutionDoc, "engine_version" | "id"> | null;
}

export interface FrontierDoc {
  mode: "independent" | "dependent";
  mil_weights: [number, number] | null;
  points: FrontierPointDoc[];
  engine_version: string;
  id: string;
}

export interface CostDoc {
  c: number[];
  lambda: Record<string, number>;
  avg_objective: number;
  exactness: "PROJECTION" | "FACE_FALLBACK";
  engine_version?: string;
}

export interface ActivityDoc {
  relevant_slacks: number[];
  trivial_slacks: number[];
}

export interface StatsDoc {
  variables: string[];
  percentiles: number[];
  /** one row per percentile, one column per variable */
  values: number[][];
  engine_version: string;
}

export interface ConstraintDoc {
  name: string;
  coeffs: number[];
  sense: "<=" | ">=";
  rhs: number;
  kind: "relevant" | "trivial";
  preferred: boolean;
}

export interface InstanceDoc {
  name: string;
  variables: string[];
  constraints: ConstraintDoc[];
  engine_version: string;
  id: string;
}

export interface ErrorDoc {
  error: string;
  detail: string;
  engine_version: string;
  status?: string;
}

export type NormName = "l1" | "l2sq" | "linf";
export type MethodName = "il" | "mil" | "seq" | "alg1";
