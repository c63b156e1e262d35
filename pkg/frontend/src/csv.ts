import fs from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {
  constructor(message: string, public readonly missing: string[] = []) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface SweepRow {
  turn: number;
  pass_prob: number;
  mean_pre_sense_size: number;
  samples: number;
}

export interface SeriesRow {
  pairing: string;
  game_id: string;
  turn: number;
  player: string;
  pre_sense_size: number | null;
}

export interface SummaryRow {
  pairing: string;
  white: string;
  black: string;
  wins: number;
  losses: number;
  draws: number;
  mean_log10_game_size: number | null;
  mean_branch: number | null;
  mean_branch_per_action: number | null;
  samples: number;
}

function parseCsv(path: string): Record<string, string>[] {
  const text = fs.readFileSync(path, "utf8");
  const result = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    throw new SchemaError(`${path}: ${result.errors[0].message}`);
  }
  return result.data;
}

function requireColumns(path: string, rows: Record<string, string>[], needed: string[]): void {
  const have = rows.length > 0 ? new Set(Object.keys(rows[0])) : new Set<string>();
  const missing = needed.filter((c) => !have.has(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing columns: ${missing.join(", ")}`,
      missing,
    );
  }
}

function num(value: string): number | null {
  if (value === "" || value === undefined) return null;
  const x = Number(value);
  return Number.isFinite(x) ? x : null;
}

export function loadSweep(path: string): SweepRow[] {
  const rows = parseCsv(path);
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  requireColumns(path, rows, ["turn", "pass_prob", "mean_pre_sense_size", "samples"]);
  return rows.map((r) => ({
    turn: Number(r.turn),
    pass_prob: Number(r.pass_prob),
    mean_pre_sense_size: Number(r.mean_pre_sense_size),
    samples: Number(r.samples),
  }));
}

export function loadSeries(path: string): SeriesRow[] {
  const rows = parseCsv(path);
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  requireColumns(path, rows, ["pairing", "game_id", "turn", "player", "pre_sense_size"]);
  return rows.map((r) => ({
    pairing: r.pairing,
    game_id: r.game_id,
    turn: Number(r.turn),
    player: r.player,
    pre_sense_size: num(r.pre_sense_size),
  }));
}

/** The summary's pairing key is "<white>_vs_<black>". */
export function splitPairing(pairing: string): { white: string; black: string } {
  const i = pairing.indexOf("_vs_");
  if (i < 0) {
    throw new SchemaError(`bad pairing key: ${pairing}`);
  }
  return { white: pairing.slice(0, i), black: pairing.slice(i + 4) };
}

export function loadSummary(path: string): SummaryRow[] {
  const rows = parseCsv(path);
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  requireColumns(path, rows, [
    "pairing", "wins", "losses", "draws", "mean_log10_game_size",
    "mean_branch", "samples",
  ]);
  return rows.map((r) => {
    const { white, black } = splitPairing(r.pairing);
    return {
      pairing: r.pairing,
      white,
      black,
      wins: Number(r.wins),
      losses: Number(r.losses),
      draws: Number(r.draws),
      mean_log10_game_size: num(r.mean_log10_game_size),
      mean_branch: num(r.mean_branch),
      mean_branch_per_action: num(r.mean_branch_per_action ?? ""),
      samples: Number(r.samples),
    };
  });
}
