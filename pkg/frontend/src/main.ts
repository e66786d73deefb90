/** Page bootstrap: register the bundled demo fixture against the service
 * named by ?api=, then hand the session to the view. */

import { ApiClient } from "./api.js";
import { Session } from "./state.js";
import { renderApp } from "./view.js";

export const DEMO_INSTANCE = {
  name: "corner-example",
  variables: ["x1", "x2"],
  constraints: [
    { name: "G1", coeffs: [-1.0, 1.0], sense: "<=", rhs: 10.0, kind: "relevant", preferred: false },
    { name: "G2", coeffs: [-0.5, 1.0], sense: "<=", rhs: 11.0, kind: "relevant", preferred: false },
    { name: "G3", coeffs: [0.5, 1.0], sense: "<=", rhs: 16.0, kind: "relevant", preferred: false },
    { name: "G4", coeffs: [1.0, 1.0], sense: "<=", rhs: 20.0, kind: "relevant", preferred: false },
    { name: "G5", coeffs: [1.0, 0.0], sense: "<=", rhs: 10.0, kind: "relevant", preferred: false },
    { name: "G6", coeffs: [1.0, 0.0], sense: ">=", rhs: 0.0, kind: "trivial", preferred: false },
    { name: "G7", coeffs: [0.0, 1.0], sense: ">=", rhs: 0.0, kind: "trivial", preferred: false },
  ],
};

export const DEMO_OBSERVATIONS = "x1,x2\n9,9\n11,9\n10,8\n";

export async function boot(root: HTMLElement, baseUrl: string): Promise<Session> {
  const api = new ApiClient(baseUrl);
  const instanceId = await api.registerInstance(DEMO_INSTANCE);
  const observationsId = await api.registerObservations(instanceId, DEMO_OBSERVATIONS);
  const session = new Session(api, {
    instanceId,
    observationsId,
    p: 2,
    pMin: 1,
    pMax: 3,
    omega1: 1,
    omega2: 5,
  });
  renderApp(root, session);
  await session.loadContext();
  await Promise.all([session.resolve(), session.refreshFrontier()]);
  return session;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? "http://127.0.0.1:8000";
  void boot(document.getElementById("app")!, base);
}
