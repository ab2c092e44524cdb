import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { renderEnsembleBand } from "./figures/ensembleBand.js";
import { renderKernelCurves } from "./figures/kernelCurves.js";
import { renderMseLines } from "./figures/mseLines.js";
import type { Figure, Recipe } from "./recipe.js";

export function renderFigure(fig: Figure, baseDir: string): string {
  switch (fig.kind) {
    case "kernel-curves":
      return renderKernelCurves(fig, baseDir);
    case "mse-lines":
      return renderMseLines(fig, baseDir);
    case "ensemble-band":
      return renderEnsembleBand(fig, baseDir);
  }
}

/** Render every figure in the recipe; returns the paths written. */
export function renderRecipe(recipe: Recipe): string[] {
  const written: string[] = [];
  for (const fig of recipe.figures) {
    const svg = renderFigure(fig, recipe.baseDir);
    const out = resolve(recipe.baseDir, fig.output);
    mkdirSync(dirname(out), { recursive: true });
    writeFileSync(out, svg);
    written.push(out);
  }
  return written;
}
