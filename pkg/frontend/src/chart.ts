/** Hand-rolled SVG charts; no drawing library, just elements. */

import type { FrontierDoc, StatsDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

const W = 420;
const H = 220;
const PAD = 36;

function xScale(p: number, pMin: number, pMax: number): number {
  const span = Math.max(1, pMax - pMin);
  return PAD + ((p - pMin) / span) * (W - 2 * PAD);
}

/** Distance-vs-p curve.  Points without a landed solution are greyed out at
 * the baseline and carry their status as a tooltip. */
export function frontierChart(
  doc: FrontierDoc,
  selectedP: number | null,
  onSelect: (p: number) => void,
): SVGSVGElement {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${W} ${H}`,
    width: W,
    height: H,
    role: "img",
  });
  svg.dataset.role = "frontier-chart";
  const ps = doc.points.map((pt) => pt.p);
  const pMin = Math.min(...ps);
  const pMax = Math.max(...ps);
  const distances = doc.points
    .filter((pt) => pt.solution?.distance != null)
    .map((pt) => pt.solution!.distance!);
  const dMax = distances.length ? Math.max(...distances, 1e-9) : 1;
  const y = (d: number) => H - PAD - (d / dMax) * (H - 2 * PAD);

  svg.append(
    svgEl("line", { x1: PAD, y1: H - PAD, x2: W - PAD, y2: H - PAD, stroke: "#888" }),
    svgEl("line", { x1: PAD, y1: PAD, x2: PAD, y2: H - PAD, stroke: "#888" }),
  );

  const landed = doc.points.filter((pt) => pt.solution?.distance != null);
  if (landed.length > 1) {
    const path = landed
      .map((pt) => `${xScale(pt.p, pMin, pMax)},${y(pt.solution!.distance!)}`)
      .join(" ");
    svg.append(svgEl("polyline", { points: path, fill: "none", stroke: "#4a77b4" }));
  }

  for (const pt of doc.points) {
    const ok = pt.solution?.distance != null;
    const cy = ok ? y(pt.solution!.distance!) : H - PAD;
    const circle = svgEl("circle", {
      cx: xScale(pt.p, pMin, pMax),
      cy,
      r: pt.p === selectedP ? 7 : 5,
      fill: ok ? "#4a77b4" : "#bbb",
      stroke: pt.p === selectedP ? "#1a2e4a" : "none",
      "stroke-width": 2,
    });
    circle.dataset.role = `point-${pt.p}`;
    circle.dataset.status = pt.status;
    const tip = svgEl("title");
    tip.textContent = ok
      ? `p=${pt.p}: distance ${pt.solution!.distance}`
      : `p=${pt.p}: ${pt.status}`;
    circle.append(tip);
    circle.addEventListener("click", () => onSelect(pt.p));
    svg.append(circle);

    const label = svgEl("text", {
      x: xScale(pt.p, pMin, pMax),
      y: H - PAD + 16,
      "text-anchor": "middle",
      "font-size": 11,
    });
    label.textContent = `p=${pt.p}`;
    svg.append(label);
  }
  return svg;
}

/** One horizontal band per variable: percentile box from the stats document
 * plus a marker for the current solution coordinate. */
export function profileChart(stats: StatsDoc, z: number[] | null): SVGSVGElement {
  const rowH = 26;
  const height = PAD + stats.variables.length * rowH + 8;
  const svg = svgEl("svg", {
    viewBox: `0 0 ${W} ${height}`,
    width: W,
    height,
    role: "img",
  });
  svg.dataset.role = "profile-chart";

  const flat = stats.values.flat().concat(z ?? []);
  const vMax = Math.max(...flat, 1e-9);
  const x = (v: number) => PAD + (v / vMax) * (W - 2 * PAD);

  stats.variables.forEach((name, col) => {
    const cy = PAD + col * rowH + rowH / 2;
    const column = stats.values.map((row) => row[col]);
    const lo = Math.min(...column);
    const hi = Math.max(...column);
    svg.append(
      svgEl("line", { x1: x(lo), y1: cy, x2: x(hi), y2: cy, stroke: "#999" }),
    );
    for (const v of column) {
      svg.append(
        svgEl("line", { x1: x(v), y1: cy - 5, x2: x(v), y2: cy + 5, stroke: "#999" }),
      );
    }
    if (z && z[col] != null) {
      const marker = svgEl("circle", { cx: x(z[col]), cy, r: 5, fill: "#c0392b" });
      marker.dataset.role = `marker-${name}`;
      svg.append(marker);
    }
    const label = svgEl("text", { x: 4, y: cy + 4, "font-size": 11 });
    label.textContent = name;
    svg.append(label);
  });
  return svg;
}
