import { SchemaError, SweepRow, SeriesRow } from "./csv.js";

export interface FigureSpec {
  title: string;
  turnMin?: number;
  turnMax?: number;
  logScale: boolean;
  width: number;
  height: number;
}

export const DEFAULT_SPEC: FigureSpec = {
  title: "Mean information set size before sensing, by turn",
  logScale: true,
  width: 720,
  height: 440,
};

interface Line {
  label: string;
  points: [number, number][]; // (turn, mean size)
}

const MARGIN = { top: 36, right: 150, bottom: 44, left: 64 };
const COLORS = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22",
];

function fmt(x: number): string {
  return Number(x.toFixed(2)).toString();
}

/** Group a pass sweep by probability: one line per probability. */
export function sweepLines(rows: SweepRow[]): Line[] {
  const groups = new Map<number, [number, number][]>();
  for (const r of rows) {
    if (!groups.has(r.pass_prob)) groups.set(r.pass_prob, []);
    groups.get(r.pass_prob)!.push([r.turn, r.mean_pre_sense_size]);
  }
  return [...groups.keys()].sort((a, b) => a - b).map((p) => ({
    label: `pass ${p}`,
    points: groups.get(p)!.sort((a, b) => a[0] - b[0]),
  }));
}

/** Group a per-turn series by pairing: mean pre-sense size per turn. */
export function seriesLines(rows: SeriesRow[]): Line[] {
  const sums = new Map<string, Map<number, { total: number; n: number }>>();
  for (const r of rows) {
    if (r.pre_sense_size === null) continue;
    if (!sums.has(r.pairing)) sums.set(r.pairing, new Map());
    const byTurn = sums.get(r.pairing)!;
    const cell = byTurn.get(r.turn) ?? { total: 0, n: 0 };
    cell.total += r.pre_sense_size;
    cell.n += 1;
    byTurn.set(r.turn, cell);
  }
  return [...sums.keys()].sort().map((pairing) => ({
    label: pairing,
    points: [...sums.get(pairing)!.entries()]
      .map(([turn, c]) => [turn, c.total / c.n] as [number, number])
      .sort((a, b) => a[0] - b[0]),
  }));
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
    ticks.push(10 ** e);
  }
  return ticks;
}

function linTicks(lo: number, hi: number, n = 6): number[] {
  const step = (hi - lo) / n;
  return Array.from({ length: n + 1 }, (_, i) => lo + i * step);
}

/** Deterministic SVG line chart; identical inputs give identical bytes. */
export function renderFigure(lines: Line[], spec: FigureSpec = DEFAULT_SPEC): string {
  const filtered = lines
    .map((l) => ({
      label: l.label,
      points: l.points.filter(
        ([t]) =>
          (spec.turnMin === undefined || t >= spec.turnMin) &&
          (spec.turnMax === undefined || t <= spec.turnMax),
      ),
    }))
    .filter((l) => l.points.length > 0);
  if (filtered.length === 0) {
    throw new SchemaError("nothing to plot: no points in range");
  }
  const xs = filtered.flatMap((l) => l.points.map((p) => p[0]));
  const ys = filtered.flatMap((l) => l.points.map((p) => p[1]));
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs, xLo + 1);
  const yLoRaw = Math.max(Math.min(...ys), spec.logScale ? 1 : 0);
  const yHi = Math.max(...ys, yLoRaw * 1.01 + 1);
  const yLo = spec.logScale ? Math.min(yLoRaw, 1) : 0;

  const plotW = spec.width - MARGIN.left - MARGIN.right;
  const plotH = spec.height - MARGIN.top - MARGIN.bottom;
  const sx = (t: number) => MARGIN.left + ((t - xLo) / (xHi - xLo)) * plotW;
  const sy = (v: number) => {
    if (spec.logScale) {
      const l = Math.log10(Math.max(v, yLo || 1));
      const lLo = Math.log10(Math.max(yLo, 1));
      const lHi = Math.log10(yHi);
      return MARGIN.top + plotH - ((l - lLo) / (lHi - lLo || 1)) * plotH;
    }
    return MARGIN.top + plotH - ((v - yLo) / (yHi - yLo || 1)) * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${spec.width}" height="${spec.height}" viewBox="0 0 ${spec.width} ${spec.height}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${spec.width}" height="${spec.height}" fill="white"/>`);
  parts.push(
    `<text x="${spec.width / 2}" y="20" text-anchor="middle" font-size="14">${spec.title}</text>`,
  );
  // axes
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + plotH;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0 + plotW}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="black"/>`);
  const yTicks = spec.logScale ? logTicks(Math.max(yLo, 1), yHi) : linTicks(yLo, yHi);
  for (const v of yTicks) {
    const y = sy(v);
    if (y < MARGIN.top - 1 || y > y0 + 1) continue;
    parts.push(`<line x1="${x0 - 4}" y1="${fmt(y)}" x2="${x0}" y2="${fmt(y)}" stroke="black"/>`);
    parts.push(
      `<text x="${x0 - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">${v}</text>`,
    );
    parts.push(
      `<line x1="${x0}" y1="${fmt(y)}" x2="${x0 + plotW}" y2="${fmt(y)}" stroke="#dddddd"/>`,
    );
  }
  for (const t of linTicks(xLo, xHi, Math.min(10, Math.max(1, xHi - xLo)))) {
    const x = sx(t);
    parts.push(`<line x1="${fmt(x)}" y1="${y0}" x2="${fmt(x)}" y2="${y0 + 4}" stroke="black"/>`);
    parts.push(
      `<text x="${fmt(x)}" y="${y0 + 18}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${x0 + plotW / 2}" y="${spec.height - 8}" text-anchor="middle" font-size="12">turn</text>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">mean set size</text>`,
  );
  // lines and legend
  filtered.forEach((line, i) => {
    const color = COLORS[i % COLORS.length];
    const pts = line.points.map(([t, v]) => `${fmt(sx(t))},${fmt(sy(v))}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    for (const [t, v] of line.points) {
      parts.push(
        `<circle cx="${fmt(sx(t))}" cy="${fmt(sy(v))}" r="2.2" fill="${color}"/>`,
      );
    }
    const ly = MARGIN.top + 14 + i * 18;
    const lx = spec.width - MARGIN.right + 12;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="1.8"/>`,
    );
    parts.push(`<text x="${lx + 28}" y="${ly}" font-size="11">${line.label}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
