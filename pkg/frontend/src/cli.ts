import fs from "node:fs";
import path from "node:path";
import { SchemaError, loadSeries, loadSummary, loadSweep } from "./csv.js";
import { DEFAULT_SPEC, renderFigure, seriesLines, sweepLines } from "./figure.js";
import { renderTables } from "./tables.js";

function usage(): never {
  console.error(
    [
      "usage:",
      "  plot-sizes --csv <sweep.csv|series.csv> --out <figure.svg>",
      "             [--group pass_prob|pairing] [--turn-min N] [--turn-max N] [--linear]",
      "  render-tables --csv <summary.csv> --out <tables.md>",
    ].join("\n"),
  );
  process.exit(2);
}

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) usage();
    args.set(argv[i].slice(2), argv[i + 1]);
  }
  return args;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (!command) usage();
  try {
    if (command === "plot-sizes") {
      const args = parseArgs(rest);
      const csv = args.get("csv");
      const out = args.get("out");
      if (!csv || !out) usage();
      const group = args.get("group") ?? "pass_prob";
      const lines = group === "pairing"
        ? seriesLines(loadSeries(csv))
        : sweepLines(loadSweep(csv));
      const svg = renderFigure(lines, {
        ...DEFAULT_SPEC,
        logScale: !args.has("linear"),
        turnMin: args.has("turn-min") ? Number(args.get("turn-min")) : undefined,
        turnMax: args.has("turn-max") ? Number(args.get("turn-max")) : undefined,
      });
      fs.mkdirSync(path.dirname(out), { recursive: true });
      fs.writeFileSync(out, svg);
      console.log(`wrote ${out}`);
      return 0;
    }
    if (command === "render-tables") {
      const args = parseArgs(rest);
      const csv = args.get("csv");
      const out = args.get("out");
      if (!csv || !out) usage();
      const text = renderTables(loadSummary(csv));
      fs.mkdirSync(path.dirname(out), { recursive: true });
      fs.writeFileSync(out, text);
      console.log(`wrote ${out}`);
      return 0;
    }
    usage();
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const isDirect = process.argv[1] !== undefined
  && path.resolve(process.argv[1]) === new URL(import.meta.url).pathname;
if (isDirect) {
  process.exit(main(process.argv.slice(2)));
}
