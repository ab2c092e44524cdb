import type { Scale } from "./scales.js";

/** Fixed-precision coordinate formatting keeps output byte-stable. */
export function px(value: number): string {
  const rounded = Math.round(value * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  body = "",
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${v}"`)
    .join(" ");
  return body === "" && tag !== "text"
    ? `<${tag} ${parts}/>`
    : `<${tag} ${parts}>${body}</${tag}>`;
}

export interface LineStyle {
  stroke: string;
  width: number;
  dash?: string;
  opacity?: number;
}

/** Polyline path with gaps wherever the series holds null. */
export function linePath(
  xs: number[],
  ys: (number | null)[],
  sx: Scale,
  sy: Scale,
): string {
  let d = "";
  let pen = false;
  for (let i = 0; i < xs.length; i++) {
    const y = ys[i];
    if (y === null || !Number.isFinite(y)) {
      pen = false;
      continue;
    }
    d += `${pen ? "L" : "M"}${px(sx(xs[i]))},${px(sy(y))}`;
    pen = true;
  }
  return d;
}

export function path(d: string, style: LineStyle): string {
  const attrs: Record<string, string | number> = {
    d,
    fill: "none",
    stroke: style.stroke,
    "stroke-width": style.width,
  };
  if (style.dash) attrs["stroke-dasharray"] = style.dash;
  if (style.opacity !== undefined) attrs["stroke-opacity"] = style.opacity;
  return el("path", attrs);
}

export function text(
  x: number,
  y: number,
  body: string,
  extra: Record<string, string | number> = {},
): string {
  return el(
    "text",
    { x: px(x), y: px(y), "font-size": 11, "font-family": "sans-serif", ...extra },
    body,
  );
}

/** Short tick label; trims float noise like 0.30000000000000004. */
export function tickLabel(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1000 || abs < 0.01) return value.toExponential(0);
  return String(Math.round(value * 1000) / 1000);
}

export interface Frame {
  x0: number;
  y0: number;
  width: number;
  height: number;
}

/** Axis box with ticks and labels for one panel. */
export function axes(frame: Frame, sx: Scale, sy: Scale): string {
  const { x0, y0, width, height } = frame;
  const parts = [
    el("rect", {
      x: px(x0),
      y: px(y0),
      width: px(width),
      height: px(height),
      fill: "none",
      stroke: "#333333",
      "stroke-width": 1,
    }),
  ];
  for (const t of sx.ticks) {
    const x = sx(t);
    parts.push(
      el("line", {
        x1: px(x), y1: px(y0 + height), x2: px(x), y2: px(y0 + height + 4),
        stroke: "#333333", "stroke-width": 1,
      }),
      text(x, y0 + height + 15, tickLabel(t), { "text-anchor": "middle" }),
    );
  }
  for (const t of sy.ticks) {
    const y = sy(t);
    parts.push(
      el("line", {
        x1: px(x0 - 4), y1: px(y), x2: px(x0), y2: px(y),
        stroke: "#333333", "stroke-width": 1,
      }),
      text(x0 - 7, y + 3.5, tickLabel(t), { "text-anchor": "end" }),
    );
  }
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }),
    body,
    "</svg>",
    "",
  ].join("\n");
}
