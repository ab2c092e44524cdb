import { basename, resolve } from "node:path";

import { column, numericColumn, readConforming, type Table } from "../csv.js";
import type { KernelCurvesFigure } from "../recipe.js";
import { makeScale, type AxisKind } from "../scales.js";
import { axes, document, linePath, path, text } from "../svg.js";
import {
  ANALYTIC_COLOR,
  EMPIRICAL_COLOR,
  LIMIT_COLOR,
  PALETTE,
  TRAINED_COLOR,
  finiteExtent,
  groupRows,
  legend,
  sortedUnique,
} from "./shared.js";

const TWO_PI = 2 * Math.PI;

export function renderKernelCurves(fig: KernelCurvesFigure, baseDir: string): string {
  return fig.curves !== undefined
    ? renderPanels(readConforming(resolve(baseDir, fig.curves), "curves"), fig.axis)
    : renderOverlay(fig, baseDir);
}

/** One panel per (steepness, width) pair from a convergence-run table. */
function renderPanels(table: Table, axis: AxisKind): string {
  const ms = sortedUnique(column(table, "m"));
  const widths = sortedUnique(column(table, "width"));
  const hasTrained = table.columns.includes("empirical_trained");
  const groups = groupRows(table, ["m", "width"]);

  const panelW = 200;
  const panelH = 150;
  const left = 56;
  const top = 34;
  const hgap = 22;
  const vgap = 42;
  const totalW = left + widths.length * (panelW + hgap) + 150;
  const totalH = top + ms.length * (panelH + vgap) + 10;

  const parts: string[] = [];
  ms.forEach((m, row) => {
    widths.forEach((width, col) => {
      const indices = groups.get(`${m} ${width}`) ?? [];
      const x0 = left + col * (panelW + hgap);
      const y0 = top + row * (panelH + vgap);
      parts.push(
        panel(table, indices, hasTrained, axis, { x0, y0, width: panelW, height: panelH }),
        text(x0 + panelW / 2, y0 - 8, `m=${m}, n=${width}`, {
          "text-anchor": "middle",
          "font-size": 12,
        }),
      );
    });
  });
  const legendX = left + widths.length * (panelW + hgap) + 8;
  const entries = [
    { label: "empirical (init)", color: EMPIRICAL_COLOR },
    ...(hasTrained ? [{ label: "empirical (trained)", color: TRAINED_COLOR }] : []),
    { label: "analytic, finite m", color: ANALYTIC_COLOR },
    { label: "steep limit", color: LIMIT_COLOR, dash: "6,4" },
  ];
  parts.push(legend(legendX, top + 10, entries));
  return document(totalW, totalH, parts.join("\n"));
}

function panel(
  table: Table,
  indices: number[],
  hasTrained: boolean,
  axis: AxisKind,
  frame: { x0: number; y0: number; width: number; height: number },
): string {
  const angleCol = table.columns.indexOf("angle");
  const ordered = [...indices].sort(
    (a, b) => (table.rows[a][angleCol] as number) - (table.rows[b][angleCol] as number),
  );
  const angles = ordered.map((i) => table.rows[i][angleCol] as number);
  const grab = (name: string) => {
    const c = table.columns.indexOf(name);
    return ordered.map((i) => table.rows[i][c] as number | null);
  };
  const seedCol = table.columns.indexOf("seed");
  const seeds = sortedUnique(ordered.map((i) => table.rows[i][seedCol]));

  const finite = grab("analytic_finite");
  const limit = grab("analytic_limit");
  const init = grab("empirical_init");
  const trained = hasTrained ? grab("empirical_trained") : null;

  const domain = finiteExtent([finite, limit, init, ...(trained ? [trained] : [])]);
  const sx = makeScale([0, TWO_PI], [frame.x0, frame.x0 + frame.width]);
  const sy = makeScale(domain, [frame.y0 + frame.height, frame.y0], axis);

  const parts: string[] = [];
  for (const seed of seeds) {
    const mask = ordered.map((i) => table.rows[i][seedCol] === seed);
    const pick = (series: (number | null)[]) =>
      series.map((v, k) => (mask[k] ? v : null));
    parts.push(
      path(linePath(angles, pick(init), sx, sy), {
        stroke: EMPIRICAL_COLOR, width: 1, opacity: 0.85,
      }),
    );
    if (trained) {
      parts.push(
        path(linePath(angles, pick(trained), sx, sy), {
          stroke: TRAINED_COLOR, width: 1, opacity: 0.85,
        }),
      );
    }
  }
  // analytic curves repeat per seed; draw them once from the first seed's rows
  const first = ordered.map((i) => table.rows[i][seedCol] === seeds[0]);
  const firstOnly = (series: (number | null)[]) =>
    series.map((v, k) => (first[k] ? v : null));
  parts.push(
    path(linePath(angles, firstOnly(finite), sx, sy), {
      stroke: ANALYTIC_COLOR, width: 2.5,
    }),
    path(linePath(angles, firstOnly(limit), sx, sy), {
      stroke: LIMIT_COLOR, width: 1.8, dash: "6,4",
    }),
    axes(frame, sx, sy),
  );
  return parts.join("\n");
}

/** Flat overlay of standalone kernel tables. */
function renderOverlay(fig: KernelCurvesFigure, baseDir: string): string {
  const frame = { x0: 64, y0: 30, width: 560, height: 360 };
  const series = (fig.series ?? []).map((entry) => {
    const table = readConforming(resolve(baseDir, entry.path), "kernel_table");
    const xs = numericColumn(table, entry.x);
    const ys = numericColumn(table, entry.y);
    const order = xs
      .map((v, i) => [v ?? 0, i] as const)
      .sort((a, b) => a[0] - b[0])
      .map(([, i]) => i);
    return {
      entry,
      xs: order.map((i) => xs[i] ?? 0),
      ys: order.map((i) => ys[i]),
    };
  });
  const domain = finiteExtent(series.map((s) => s.ys));
  const sx = makeScale([0, TWO_PI], [frame.x0, frame.x0 + frame.width]);
  const sy = makeScale(domain, [frame.y0 + frame.height, frame.y0], fig.axis);

  const styleFor = (style: string, color: string) =>
    style === "thin"
      ? { stroke: color, width: 1, opacity: 0.85 }
      : style === "dashed"
        ? { stroke: color, width: 1.8, dash: "6,4" }
        : { stroke: color, width: 2.5 };

  const parts = series.map((s, i) =>
    path(
      linePath(s.xs, s.ys, sx, sy),
      styleFor(s.entry.style, PALETTE[i % PALETTE.length]),
    ),
  );
  parts.push(axes(frame, sx, sy));
  parts.push(
    legend(
      frame.x0 + frame.width + 10,
      frame.y0 + 10,
      series.map((s, i) => ({
        label: s.entry.label ?? basename(s.entry.path, ".csv"),
        color: PALETTE[i % PALETTE.length],
        dash: s.entry.style === "dashed" ? "6,4" : undefined,
      })),
    ),
  );
  parts.push(
    text(frame.x0 + frame.width / 2, frame.y0 + frame.height + 32, "angle", {
      "text-anchor": "middle",
    }),
  );
  return document(frame.x0 + frame.width + 170, frame.y0 + frame.height + 45, parts.join("\n"));
}
