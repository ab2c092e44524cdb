import { basename, resolve } from "node:path";

import { readConforming } from "../csv.js";
import type { MseLinesFigure } from "../recipe.js";
import { makeLogScale, makeScale } from "../scales.js";
import { axes, document, el, linePath, path, px, text } from "../svg.js";
import { PALETTE, finiteExtent, legend, sortedUnique } from "./shared.js";

interface Line {
  label: string;
  widths: number[];
  means: number[];
  dashed: boolean;
}

/** Seed-averaged error against width, one line per (file, steepness, stage). */
export function renderMseLines(fig: MseLinesFigure, baseDir: string): string {
  const lines: Line[] = [];
  for (const input of fig.inputs) {
    const table = readConforming(resolve(baseDir, input.path), "mse");
    const name = input.label ?? basename(input.path, ".csv");
    const widthIdx = table.columns.indexOf("width");
    const mIdx = table.columns.indexOf("m");
    const stageIdx = table.columns.indexOf("stage");
    const valueIdx = table.columns.indexOf(fig.value);

    const ms = sortedUnique(table.rows.map((r) => r[mIdx]));
    const stages = [...new Set(table.rows.map((r) => String(r[stageIdx])))].sort();
    const widths = sortedUnique(table.rows.map((r) => r[widthIdx]));
    for (const m of ms) {
      for (const stage of stages) {
        const means = widths.map((w) => {
          const vals = table.rows
            .filter(
              (r) => r[mIdx] === m && String(r[stageIdx]) === stage && r[widthIdx] === w,
            )
            .map((r) => r[valueIdx])
            .filter((v): v is number => typeof v === "number");
          return vals.length
            ? vals.reduce((a, b) => a + b, 0) / vals.length
            : NaN;
        });
        lines.push({
          label: `${name} m=${m} ${stage}`,
          widths,
          means,
          dashed: stage !== stages[0],
        });
      }
    }
  }

  const frame = { x0: 70, y0: 30, width: 520, height: 340 };
  const allWidths = lines.flatMap((l) => l.widths);
  const sx = makeLogScale(
    [Math.min(...allWidths), Math.max(...allWidths)],
    [frame.x0, frame.x0 + frame.width],
  );
  const domain = finiteExtent(lines.map((l) => l.means));
  const sy = makeScale(domain, [frame.y0 + frame.height, frame.y0], fig.axis);

  const parts: string[] = [];
  lines.forEach((line, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(
      path(linePath(line.widths, line.means, sx, sy), {
        stroke: color,
        width: 1.8,
        dash: line.dashed ? "5,3" : undefined,
      }),
    );
    line.widths.forEach((w, k) => {
      const v = line.means[k];
      if (!Number.isFinite(v)) return;
      parts.push(
        el("circle", { cx: px(sx(w)), cy: px(sy(v)), r: 2.5, fill: color }),
      );
    });
  });
  parts.push(axes(frame, sx, sy));
  parts.push(
    legend(
      frame.x0 + frame.width + 12,
      frame.y0 + 10,
      lines.map((line, i) => ({
        label: line.label,
        color: PALETTE[i % PALETTE.length],
        dash: line.dashed ? "5,3" : undefined,
      })),
    ),
  );
  parts.push(
    text(frame.x0 + frame.width / 2, frame.y0 + frame.height + 32, "width", {
      "text-anchor": "middle",
    }),
    text(16, frame.y0 + frame.height / 2, fig.value, {
      "text-anchor": "middle",
      transform: `rotate(-90 16 ${px(frame.y0 + frame.height / 2)})`,
    }),
  );
  return document(
    frame.x0 + frame.width + 210,
    frame.y0 + frame.height + 45,
    parts.join("\n"),
  );
}
