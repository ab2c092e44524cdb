import { ticks as niceTicks } from "d3";

export type AxisKind = "linear" | "asinh";

export interface Scale {
  (value: number): number;
  ticks: number[];
}

/**
 * Map data values onto pixel coordinates, optionally through asinh.
 *
 * The asinh transform behaves like a linear axis near zero and like a log
 * axis in the tails, which keeps diverging kernel curves readable without
 * dropping the sign. Ticks are chosen in data space either way.
 */
export function makeScale(
  domain: [number, number],
  range: [number, number],
  kind: AxisKind = "linear",
): Scale {
  const fwd = kind === "asinh" ? Math.asinh : (v: number) => v;
  let [lo, hi] = domain;
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const [tlo, thi] = [fwd(lo), fwd(hi)];
  const [rlo, rhi] = range;
  const scale = ((value: number) =>
    rlo + ((fwd(value) - tlo) / (thi - tlo)) * (rhi - rlo)) as Scale;
  scale.ticks = kind === "asinh" ? asinhTicks(lo, hi) : niceTicks(lo, hi, 6);
  return scale;
}

/** Pseudo-log tick ladder: 0 and +/- {1,2,5} x 10^k inside the domain. */
export function asinhTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  if (lo <= 0 && hi >= 0) out.push(0);
  const biggest = Math.max(Math.abs(lo), Math.abs(hi), 1e-12);
  for (let exp = -2; exp <= Math.ceil(Math.log10(biggest)); exp++) {
    for (const mant of [1, 2, 5]) {
      const v = mant * 10 ** exp;
      if (v >= lo && v <= hi) out.push(v);
      if (-v >= lo && -v <= hi) out.push(-v);
    }
  }
  out.sort((a, b) => a - b);
  // thin out crowded ladders deterministically, keeping the endpoints
  while (out.length > 9) {
    for (let i = out.length - 2; i > 0; i -= 2) out.splice(i, 1);
  }
  return out;
}

/** Decade ticks for a log10-transformed axis (used for width sweeps). */
export function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let exp = Math.floor(Math.log10(lo)); exp <= Math.ceil(Math.log10(hi)); exp++) {
    const v = 10 ** exp;
    if (v >= lo && v <= hi) out.push(v);
  }
  return out.length >= 2 ? out : [lo, hi];
}

/** Strictly positive log10 axis, e.g. network width. */
export function makeLogScale(domain: [number, number], range: [number, number]): Scale {
  const [lo, hi] = domain;
  const [rlo, rhi] = range;
  const [tlo, thi] = [Math.log10(lo), Math.log10(hi)];
  const scale = ((value: number) =>
    rlo + ((Math.log10(value) - tlo) / (thi - tlo || 1)) * (rhi - rlo)) as Scale;
  scale.ticks = logTicks(lo, hi);
  return scale;
}
