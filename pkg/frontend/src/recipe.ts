import { readFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { z } from "zod";

import { SchemaMismatch } from "./errors.js";
import { checkColumnRef } from "./schema.js";

const axisField = z.enum(["linear", "asinh"]).default("linear");

const seriesEntry = z.object({
  path: z.string(),
  label: z.string().optional(),
  style: z.enum(["thin", "thick", "dashed"]).default("thick"),
  x: z.string().default("angle"),
  y: z.string().default("value"),
});

const kernelCurves = z.object({
  kind: z.literal("kernel-curves"),
  output: z.string(),
  axis: axisField,
  // either one paneled convergence-run table, or overlaid single curves
  curves: z.string().optional(),
  series: z.array(seriesEntry).min(1).optional(),
});

const mseLines = z.object({
  kind: z.literal("mse-lines"),
  output: z.string(),
  axis: axisField,
  inputs: z
    .array(z.object({ path: z.string(), label: z.string().optional() }))
    .min(1),
  value: z.string().default("mse"),
});

const ensembleBand = z.object({
  kind: z.literal("ensemble-band"),
  output: z.string(),
  axis: axisField,
  band: z.string(),
  members: z.string().optional(),
  trainPoints: z.string().optional(),
  overlays: z.array(z.string()).default(["nngp_mean"]),
});

const recipeSchema = z.object({
  figures: z
    .array(z.discriminatedUnion("kind", [kernelCurves, mseLines, ensembleBand]))
    .min(1),
});

export type KernelCurvesFigure = z.infer<typeof kernelCurves>;
export type MseLinesFigure = z.infer<typeof mseLines>;
export type EnsembleBandFigure = z.infer<typeof ensembleBand>;
export type Figure = z.infer<typeof recipeSchema>["figures"][number];

export interface Recipe {
  /** Directory of the recipe file; all paths resolve against it. */
  baseDir: string;
  figures: Figure[];
}

function checkReferences(figure: Figure): void {
  switch (figure.kind) {
    case "kernel-curves":
      if ((figure.curves === undefined) === (figure.series === undefined)) {
        throw new SchemaMismatch(
          "kernel-curves needs exactly one of 'curves' or 'series'",
        );
      }
      for (const s of figure.series ?? []) {
        checkColumnRef("kernel_table", s.x);
        checkColumnRef("kernel_table", s.y);
      }
      break;
    case "mse-lines":
      checkColumnRef("mse", figure.value);
      break;
    case "ensemble-band":
      for (const col of figure.overlays) checkColumnRef("band", col);
      break;
  }
}

export function parseRecipe(json: unknown, baseDir: string): Recipe {
  const result = recipeSchema.safeParse(json);
  if (!result.success) {
    const issue = result.error.issues[0];
    throw new SchemaMismatch(
      `recipe: ${issue.path.join(".") || "(root)"}: ${issue.message}`,
    );
  }
  for (const figure of result.data.figures) checkReferences(figure);
  return { baseDir, figures: result.data.figures };
}

export function loadRecipe(path: string): Recipe {
  let parsed: unknown;
  try {
    parsed = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    if (err instanceof SyntaxError) {
      throw new SchemaMismatch(`${path}: not valid JSON (${err.message})`);
    }
    throw err;
  }
  return parseRecipe(parsed, dirname(resolve(path)));
}
