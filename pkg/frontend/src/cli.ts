/**
 * Figure commands over the lab's artifact directory.
 *
 *   node dist/cli.js covariance --in DIR --out DIR   (reads covariance.csv)
 *   node dist/cli.js moments    --in DIR --out DIR   (reads moments.csv)
 *   node dist/cli.js longtime   --in DIR --out DIR   (reads reports.jsonl)
 *
 * Writes <command>.svg into --out.  Exits nonzero on any schema mismatch,
 * naming the offending file/column.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { loadCovariance, loadLongtime, loadMoments } from "./data.js";
import { covarianceFigure, longtimeFigure, momentsFigure } from "./figures.js";

const COMMANDS: Record<string, { input: string; build: (path: string) => string }> = {
  covariance: { input: "covariance.csv", build: (p) => covarianceFigure(loadCovariance(p)) },
  moments: { input: "moments.csv", build: (p) => momentsFigure(loadMoments(p)) },
  longtime: { input: "reports.jsonl", build: (p) => longtimeFigure(loadLongtime(p)) },
};

export function main(argv: string[]): number {
  const command = argv[0];
  if (!command || !(command in COMMANDS)) {
    process.stderr.write(
      `usage: cli.js <${Object.keys(COMMANDS).join("|")}> --in DIR --out DIR\n`,
    );
    return 2;
  }
  const { values } = parseArgs({
    args: argv.slice(1),
    options: { in: { type: "string" }, out: { type: "string" } },
  });
  if (!values.in || !values.out) {
    process.stderr.write("both --in and --out are required\n");
    return 2;
  }
  const spec = COMMANDS[command];
  const svg = spec.build(join(values.in, spec.input));
  mkdirSync(values.out, { recursive: true });
  const target = join(values.out, `${command}.svg`);
  writeFileSync(target, svg);
  process.stdout.write(`${target}\n`);
  return 0;
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js") ?? false;
if (invokedDirectly) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (error) {
    process.stderr.write(`${error instanceof Error ? error.message : error}\n`);
    process.exit(1);
  }
}
