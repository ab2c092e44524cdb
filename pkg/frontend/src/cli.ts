#!/usr/bin/env node
import { loadRecipe } from "./recipe.js";
import { renderRecipe } from "./render.js";

function main(argv: string[]): number {
  if (argv.length !== 1 || argv[0] === "-h" || argv[0] === "--help") {
    process.stderr.write("usage: sgntk-plot <recipe.json>\n");
    return argv[0] === "-h" || argv[0] === "--help" ? 0 : 1;
  }
  try {
    const recipe = loadRecipe(argv[0]);
    for (const path of renderRecipe(recipe)) {
      process.stdout.write(`wrote ${path}\n`);
    }
    return 0;
  } catch (err) {
    const msg = err instanceof Error ? err.message : String(err);
    process.stderr.write(`error: ${msg}\n`);
    return 1;
  }
}

process.exitCode = main(process.argv.slice(2));
