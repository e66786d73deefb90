import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { applyChange, frontierRequestFor, solveRequestFor } from "../src/state.js";
import type { SolveRequest } from "../src/api.js";
import type { SolutionDoc } from "../src/types.js";
import { FakeApi, deferred, makeSession, missDoc, solutionDoc } from "./helpers.js";

describe("applyChange", () => {
  it("floors and clamps p to at least 1", () => {
    const { session } = makeSession();
    const base = session.snapshot();
    expect(applyChange(base, { kind: "set_p", p: 2.9 }).p).toBe(2);
    expect(applyChange(base, { kind: "set_p", p: -4 }).p).toBe(1);
  });

  it("toggling a row twice restores the original selection", () => {
    const { session } = makeSession();
    const base = session.snapshot();
    const on = applyChange(base, { kind: "toggle_preferred", row: "G3" });
    expect(on.preferred).toEqual(["G3"]);
    expect(on.method).toBe("mil");
    const off = applyChange(on, { kind: "toggle_preferred", row: "G3" });
    expect(off.preferred).toEqual([]);
    expect(off.method).toBe("il");
  });

  it("keeps other toggles when one is removed", () => {
    const { session } = makeSession();
    let state = session.snapshot();
    state = applyChange(state, { kind: "toggle_preferred", row: "G3" });
    state = applyChange(state, { kind: "toggle_preferred", row: "G5" });
    state = applyChange(state, { kind: "toggle_preferred", row: "G3" });
    expect(state.preferred).toEqual(["G5"]);
  });
});

describe("request builders", () => {
  it("plain selection asks for il with cost attached", () => {
    const { session } = makeSession();
    const req = solveRequestFor(session.snapshot());
    expect(req.method).toBe("il");
    expect(req.p).toBe(2);
    expect(req.include_cost).toBe(true);
    expect(req.omega1).toBeUndefined();
  });

  it("preferred toggles switch the request to mil with weights", () => {
    const { session } = makeSession();
    const state = applyChange(session.snapshot(), { kind: "toggle_preferred", row: "G3" });
    const req = solveRequestFor(state);
    expect(req.method).toBe("mil");
    expect(req.omega1).toBe(1);
    expect(req.omega2).toBe(5);
    expect(req.preferred).toEqual(["G3"]);
    expect(req.include_cost).toBeUndefined();

    const sweepReq = frontierRequestFor(state);
    expect(sweepReq.method).toBe("mil");
    expect(sweepReq.p_min).toBe(1);
    expect(sweepReq.p_max).toBe(3);
  });
});

describe("steer", () => {
  it("lands the solution and clears the banner on OK", async () => {
    const { api, session } = makeSession();
    api.solveQueue.push(solutionDoc({ p: 1, z: [10, 9], distance: 3 }));
    await session.steer({ kind: "set_p", p: 1 });
    const state = session.snapshot();
    expect(state.solution?.z).toEqual([10, 9]);
    expect(state.banner).toBeNull();
    expect(state.pending).toBe(false);
    expect((api.solveCalls[0] as SolveRequest).p).toBe(1);
  });

  it("keeps a miss document and raises a status banner", async () => {
    const { api, session } = makeSession();
    api.solveQueue.push(missDoc(3));
    await session.steer({ kind: "set_p", p: 3 });
    const state = session.snapshot();
    expect(state.solution?.status).toBe("INFEASIBLE_AT_P");
    expect(state.solution?.z).toBeNull();
    expect(state.banner).toContain("INFEASIBLE_AT_P");
  });

  it("turns transport errors into a dismissible banner", async () => {
    const { api, session } = makeSession();
    api.solveQueue.push(
      Promise.reject(
        new ApiError(400, { error: "MALFORMED", detail: "bad", engine_version: "0" }, "MALFORMED: bad"),
      ),
    );
    await session.steer({ kind: "set_p", p: 2 });
    expect(session.snapshot().banner).toBe("MALFORMED: bad");
    session.dismissBanner();
    expect(session.snapshot().banner).toBeNull();
  });

  it("drops stale responses: rapid p changes settle on the last one", async () => {
    const { api, session } = makeSession();
    const first = deferred<SolutionDoc>();
    const second = deferred<SolutionDoc>();
    api.solveQueue.push(first.promise, second.promise);

    const steer1 = session.steer({ kind: "set_p", p: 1 });
    const steer2 = session.steer({ kind: "set_p", p: 3 });

    // second request finishes first, then the stale one limps home
    second.resolve(missDoc(3));
    await steer2;
    first.resolve(solutionDoc({ p: 1, z: [10, 9], distance: 3 }));
    await steer1;

    const state = session.snapshot();
    expect(state.p).toBe(3);
    expect(state.solution?.p).toBe(3);
    expect(state.solution?.status).toBe("INFEASIBLE_AT_P");
    expect(api.solveCalls).toHaveLength(2);
  });

  it("drops stale frontier sweeps the same way", async () => {
    const { api, session } = makeSession();
    let calls = 0;
    const slow = deferred<never>();
    const fastDoc = api.frontierResult;
    api.frontier = async () => {
      calls += 1;
      if (calls === 1) return slow.promise;
      return fastDoc;
    };
    const sweep1 = session.refreshFrontier();
    const sweep2 = session.refreshFrontier();
    await sweep2;
    slow.reject(new Error("socket hangup"));
    await sweep1;
    const state = session.snapshot();
    expect(state.frontier?.id).toBe("frontier-test");
    expect(state.banner).toBeNull(); // stale failure must not surface
  });
});

describe("loadContext", () => {
  it("stores the instance and stats documents verbatim", async () => {
    const { api, session } = makeSession();
    await session.loadContext();
    const state = session.snapshot();
    expect(state.instance).toBe(api.instanceResult);
    expect(state.stats).toBe(api.statsResult);
  });
});
