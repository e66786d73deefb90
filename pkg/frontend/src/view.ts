/** DOM rendering.  Every number shown here is read straight out of a
 * response document; the only arithmetic is pixel placement. */

import { frontierChart, profileChart } from "./chart.js";
import type { Session, SessionState } from "./state.js";
import type { ConstraintDoc, SolutionDoc } from "./types.js";

export function fmt(x: number | null | undefined): string {
  if (x == null) return "–";
  if (Number.isInteger(x)) return String(x);
  const rounded = Number(x.toPrecision(6));
  return String(rounded);
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  role?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (role) node.dataset.role = role;
  if (text != null) node.textContent = text;
  return node;
}

export function renderBanner(state: SessionState, onDismiss: () => void): HTMLElement {
  const slot = el("div", "banner-slot");
  if (!state.banner) return slot;
  const banner = el("div", "banner");
  banner.className = "banner";
  banner.append(el("span", "banner-text", state.banner));
  const close = el("button", "banner-dismiss", "dismiss");
  close.addEventListener("click", onDismiss);
  banner.append(close);
  slot.append(banner);
  return slot;
}

export function renderFrontierView(
  state: SessionState,
  onSelect: (p: number) => void,
): HTMLElement {
  const pane = el("section", "frontier-view");
  pane.append(el("h2", undefined, "distance frontier"));
  if (!state.frontier) {
    pane.append(el("p", "frontier-empty", "no frontier loaded yet"));
    return pane;
  }
  const caption = el(
    "p",
    "frontier-caption",
    state.frontier.mil_weights
      ? `mode ${state.frontier.mode}, weights (${state.frontier.mil_weights.join(", ")})`
      : `mode ${state.frontier.mode}`,
  );
  pane.append(caption, frontierChart(state.frontier, state.p, onSelect));
  return pane;
}

function zText(sol: SolutionDoc): string {
  return sol.z ? `(${sol.z.map(fmt).join(", ")})` : "–";
}

function nameList(names: string[] | null): string {
  return names && names.length ? names.join(", ") : "–";
}

function activityTable(state: SessionState, sol: SolutionDoc): HTMLElement {
  const table = el("table", "activity-table");
  const head = el("tr");
  for (const col of ["row", "sense", "bound", "margin", ""]) {
    head.append(el("th", undefined, col));
  }
  table.append(head);
  const binding = new Set(sol.binding ?? []);
  const slot = { relevant: 0, trivial: 0 };
  const slacks = {
    relevant: sol.activity?.relevant_slacks ?? [],
    trivial: sol.activity?.trivial_slacks ?? [],
  };
  for (const row of state.instance?.constraints ?? []) {
    const slack = slacks[row.kind][slot[row.kind]++];
    const tr = el("tr", `slack-row-${row.name}`);
    if (binding.has(row.name)) tr.className = "binding";
    tr.append(
      el("td", undefined, row.name),
      el("td", undefined, row.sense),
      el("td", undefined, fmt(row.rhs)),
      el("td", undefined, fmt(slack)),
      el("td", undefined, binding.has(row.name) ? "binding" : ""),
    );
    table.append(tr);
  }
  return table;
}

function costPane(sol: SolutionDoc): HTMLElement {
  const pane = el("div", "cost-pane");
  if (!sol.cost) return pane;
  pane.append(el("h3", undefined, "inferred cost"));
  pane.append(el("p", "cost-c", `c = (${sol.cost.c.map(fmt).join(", ")})`));
  const table = el("table", "cost-lambda");
  for (const [name, weight] of Object.entries(sol.cost.lambda)) {
    const tr = el("tr");
    tr.append(el("td", undefined, name), el("td", undefined, fmt(weight)));
    table.append(tr);
  }
  pane.append(table);
  pane.append(
    el("p", "cost-avg", `average objective ${fmt(sol.cost.avg_objective)}`),
    el("p", "cost-exactness", sol.cost.exactness),
  );
  return pane;
}

export function renderDetail(state: SessionState): HTMLElement {
  const pane = el("section", "detail");
  pane.append(el("h2", undefined, "solution"));
  const sol = state.solution;
  if (!sol) {
    pane.append(el("p", "detail-empty", "nothing solved yet"));
    return pane;
  }
  const badge = el("p");
  badge.append(
    el("span", "method-badge", sol.method),
    el("span", "status", ` ${sol.status}`),
  );
  pane.append(badge);
  pane.append(el("p", undefined, "point: "));
  pane.lastElementChild!.append(el("strong", "z", zText(sol)));
  pane.append(
    el("p", "distance", `distance ${fmt(sol.distance)}`),
    el("p", "binding", `binding: ${nameList(sol.binding)}`),
    el("p", "tight", `forced tight: ${nameList(sol.tight)}`),
  );
  if (sol.preferred_bound_count != null) {
    pane.append(
      el("p", "pref-count", `preferred bounds hit: ${sol.preferred_bound_count}`),
    );
  }
  if (sol.activity) pane.append(activityTable(state, sol));
  pane.append(costPane(sol));
  return pane;
}

export function renderProfile(state: SessionState): HTMLElement {
  const pane = el("section", "profile");
  pane.append(el("h2", undefined, "observed percentiles vs solution"));
  if (!state.stats) {
    pane.append(el("p", undefined, "no observation stats loaded"));
    return pane;
  }
  pane.append(profileChart(state.stats, state.solution?.z ?? null));
  return pane;
}

function relevantRows(state: SessionState): ConstraintDoc[] {
  return (state.instance?.constraints ?? []).filter((r) => r.kind === "relevant");
}

export function renderControls(session: Session): HTMLElement {
  const state = session.snapshot();
  const pane = el("section", "controls");
  const track = (action: Promise<unknown>) => {
    session.lastAction = action;
  };
  const steerAndSweep = (change: Parameters<Session["steer"]>[0]) =>
    track(session.steer(change).then(() => session.refreshFrontier()));

  const pLabel = el("label", undefined, "p ");
  const pInput = el("input", "p-input") as HTMLInputElement;
  pInput.type = "number";
  pInput.min = "1";
  pInput.value = String(state.p);
  pInput.addEventListener("change", () =>
    track(session.steer({ kind: "set_p", p: Number(pInput.value) })),
  );
  pLabel.append(pInput);
  pane.append(pLabel);

  const normSelect = el("select", "norm-select") as HTMLSelectElement;
  for (const norm of ["l1", "l2sq", "linf"]) {
    const opt = el("option", undefined, norm) as HTMLOptionElement;
    opt.value = norm;
    normSelect.append(opt);
  }
  normSelect.value = state.norm;
  normSelect.addEventListener("change", () =>
    steerAndSweep({ kind: "set_norm", norm: normSelect.value as "l1" | "l2sq" | "linf" }),
  );
  const normLabel = el("label", undefined, "norm ");
  normLabel.append(normSelect);
  pane.append(normLabel);

  const w1 = el("input", "w1-input") as HTMLInputElement;
  const w2 = el("input", "w2-input") as HTMLInputElement;
  for (const [input, value] of [
    [w1, state.omega1],
    [w2, state.omega2],
  ] as const) {
    input.type = "number";
    input.step = "any";
    input.value = String(value);
    input.addEventListener("change", () =>
      steerAndSweep({
        kind: "set_weights",
        omega1: Number(w1.value),
        omega2: Number(w2.value),
      }),
    );
  }
  const wLabel = el("label", undefined, "weights ");
  wLabel.append(w1, w2);
  pane.append(wLabel);

  const prefs = el("fieldset", "preferred-toggles");
  prefs.append(el("legend", undefined, "preferred bounds"));
  for (const row of relevantRows(session.snapshot())) {
    const label = el("label", undefined, ` ${row.name}`);
    const box = el("input", `pref-${row.name}`) as HTMLInputElement;
    box.type = "checkbox";
    box.checked = session.snapshot().preferred.includes(row.name);
    box.addEventListener("change", () =>
      steerAndSweep({ kind: "toggle_preferred", row: row.name }),
    );
    label.prepend(box);
    prefs.append(label);
  }
  pane.append(prefs);
  return pane;
}

export function renderApp(root: HTMLElement, session: Session): void {
  root.textContent = "";
  const title = el("h1", undefined, "inverse-learn explorer");
  const bannerSlot = el("div", "banner-host");
  const controlsSlot = el("div", "controls-host");
  const dynamic = el("div", "dynamic-host");
  root.append(title, bannerSlot, controlsSlot, dynamic);

  controlsSlot.append(renderControls(session));

  const redraw = (state: SessionState) => {
    bannerSlot.textContent = "";
    bannerSlot.append(renderBanner(state, () => session.dismissBanner()));
    dynamic.textContent = "";
    dynamic.append(
      renderFrontierView(state, (p) => {
        session.lastAction = session.steer({ kind: "set_p", p });
      }),
      renderDetail(state),
      renderProfile(state),
    );
    const prefField = controlsSlot.querySelector("[data-role=preferred-toggles]");
    if (prefField && state.instance && prefField.querySelectorAll("input").length === 0) {
      const fresh = renderControls(session);
      controlsSlot.textContent = "";
      controlsSlot.append(fresh);
    }
  };
  session.subscribe(redraw);
  redraw(session.snapshot());
}
