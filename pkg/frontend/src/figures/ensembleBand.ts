import { resolve } from "node:path";

import { readConforming, type Table } from "../csv.js";
import type { EnsembleBandFigure } from "../recipe.js";
import { makeScale, type Scale } from "../scales.js";
import { axes, document, el, linePath, path, px, text } from "../svg.js";
import {
  ANALYTIC_COLOR,
  BAND_FILL,
  LIMIT_COLOR,
  MEMBER_COLOR,
  PALETTE,
  finiteExtent,
  groupRows,
  legend,
} from "./shared.js";

const TWO_PI = 2 * Math.PI;

/** Trained-ensemble traces against the analytic process they should approach. */
export function renderEnsembleBand(fig: EnsembleBandFigure, baseDir: string): string {
  const band = readConforming(resolve(baseDir, fig.band), "band");
  const members = fig.members
    ? readConforming(resolve(baseDir, fig.members), "members")
    : null;
  const train = fig.trainPoints
    ? readConforming(resolve(baseDir, fig.trainPoints), "train_points")
    : null;

  const angleIdx = band.columns.indexOf("angle");
  const order = band.rows
    .map((r, i) => [r[angleIdx] as number, i] as const)
    .sort((a, b) => a[0] - b[0])
    .map(([, i]) => i);
  const angles = order.map((i) => band.rows[i][angleIdx] as number);
  const grab = (name: string) => {
    const c = band.columns.indexOf(name);
    return order.map((i) => band.rows[i][c] as number | null);
  };
  const ensMean = grab("ensemble_mean");
  const gpMean = grab("gp_mean");
  const gpStd = grab("gp_std");
  const upper = gpMean.map((m, i) =>
    m !== null && gpStd[i] !== null ? m + 2 * (gpStd[i] as number) : null,
  );
  const lower = gpMean.map((m, i) =>
    m !== null && gpStd[i] !== null ? m - 2 * (gpStd[i] as number) : null,
  );
  const overlaySeries = fig.overlays.map((name) => ({ name, values: grab(name) }));

  const memberTraces: { xs: number[]; ys: (number | null)[] }[] = [];
  if (members) {
    const aIdx = members.columns.indexOf("angle");
    const vIdx = members.columns.indexOf("value");
    for (const indices of groupRows(members, ["seed", "member"]).values()) {
      const sorted = [...indices].sort(
        (a, b) => (members.rows[a][aIdx] as number) - (members.rows[b][aIdx] as number),
      );
      memberTraces.push({
        xs: sorted.map((i) => members.rows[i][aIdx] as number),
        ys: sorted.map((i) => members.rows[i][vIdx] as number | null),
      });
    }
  }
  const targets = train
    ? (train.rows.map((r) => r[train.columns.indexOf("target")]) as (number | null)[])
    : [];

  const domain = finiteExtent([
    upper,
    lower,
    ensMean,
    gpMean,
    ...overlaySeries.map((o) => o.values),
    ...memberTraces.map((t) => t.ys),
    targets,
  ]);
  const frame = { x0: 64, y0: 30, width: 540, height: 360 };
  const sx = makeScale([0, TWO_PI], [frame.x0, frame.x0 + frame.width]);
  const sy = makeScale(domain, [frame.y0 + frame.height, frame.y0], fig.axis);

  const parts: string[] = [];
  const bandOutline = bandPath(angles, upper, lower, sx, sy);
  if (bandOutline) {
    parts.push(
      el("path", { d: bandOutline, fill: BAND_FILL, "fill-opacity": 0.55, stroke: "none" }),
    );
  }
  for (const trace of memberTraces) {
    parts.push(
      path(linePath(trace.xs, trace.ys, sx, sy), {
        stroke: MEMBER_COLOR, width: 0.7, opacity: 0.5,
      }),
    );
  }
  parts.push(
    path(linePath(angles, ensMean, sx, sy), { stroke: ANALYTIC_COLOR, width: 2.5 }),
    path(linePath(angles, gpMean, sx, sy), { stroke: LIMIT_COLOR, width: 1.8 }),
  );
  overlaySeries.forEach((overlay, i) => {
    parts.push(
      path(linePath(angles, overlay.values, sx, sy), {
        stroke: PALETTE[(i + 2) % PALETTE.length],
        width: 1.5,
        dash: "2,3",
      }),
    );
  });
  if (train) {
    const aIdx = train.columns.indexOf("angle");
    const tIdx = train.columns.indexOf("target");
    for (const row of train.rows) {
      const a = row[aIdx];
      const t = row[tIdx];
      if (typeof a !== "number" || typeof t !== "number") continue;
      parts.push(cross(sx(a), sy(t)));
    }
  }
  parts.push(axes(frame, sx, sy));
  const entries = [
    ...(members ? [{ label: `members (${memberTraces.length})`, color: MEMBER_COLOR }] : []),
    { label: "ensemble mean", color: ANALYTIC_COLOR },
    { label: "analytic mean", color: LIMIT_COLOR },
    { label: "analytic mean ± 2σ", color: BAND_FILL },
    ...overlaySeries.map((o, i) => ({
      label: o.name,
      color: PALETTE[(i + 2) % PALETTE.length],
      dash: "2,3",
    })),
    ...(train ? [{ label: "training points", color: "#000000" }] : []),
  ];
  parts.push(legend(frame.x0 + frame.width + 12, frame.y0 + 10, entries));
  parts.push(
    text(frame.x0 + frame.width / 2, frame.y0 + frame.height + 32, "angle", {
      "text-anchor": "middle",
    }),
  );
  return document(
    frame.x0 + frame.width + 175,
    frame.y0 + frame.height + 45,
    parts.join("\n"),
  );
}

function bandPath(
  xs: number[],
  upper: (number | null)[],
  lower: (number | null)[],
  sx: Scale,
  sy: Scale,
): string | null {
  const keep = xs
    .map((_, i) => i)
    .filter(
      (i) =>
        upper[i] !== null &&
        lower[i] !== null &&
        Number.isFinite(upper[i]) &&
        Number.isFinite(lower[i]),
    );
  if (keep.length < 2) return null;
  const fwd = keep.map(
    (i, k) => `${k === 0 ? "M" : "L"}${px(sx(xs[i]))},${px(sy(upper[i] as number))}`,
  );
  const back = [...keep]
    .reverse()
    .map((i) => `L${px(sx(xs[i]))},${px(sy(lower[i] as number))}`);
  return [...fwd, ...back, "Z"].join(" ");
}

function cross(x: number, y: number): string {
  const r = 3.5;
  const d =
    `M${px(x - r)},${px(y - r)} L${px(x + r)},${px(y + r)} ` +
    `M${px(x - r)},${px(y + r)} L${px(x + r)},${px(y - r)}`;
  return el("path", { d, stroke: "#000000", "stroke-width": 1.4, fill: "none" });
}
