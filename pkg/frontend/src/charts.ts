/** Pure geometry for the SVG bar charts; rendering glue lives in main.ts. */

import type { RankingRow, RankOutcome } from "./types.js";

export interface Bar {
  label: string;
  sublabel: string;
  value: number;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface ChartLayout {
  width: number;
  height: number;
  bars: Bar[];
}

const PAD = 4;

/** Horizontal layout of MI bars (in bits), rank badges in the labels. */
export function rankingBars(rows: RankingRow[], width = 360, barHeight = 26): ChartLayout {
  const max = Math.max(...rows.map((r) => r.mi_bits), 1e-9);
  const bars = rows.map((r, i) => ({
    label: `#${r.rank} ${r.configuration_id}`,
    sublabel: `${r.mi_bits.toFixed(3)} bits`,
    value: r.mi_bits,
    x: 0,
    y: i * (barHeight + PAD),
    width: (r.mi_bits / max) * width,
    height: barHeight,
  }));
  return { width, height: rows.length * (barHeight + PAD), bars };
}

/** Grouped bars of mean squared error per rank for one task's outcomes. */
export function studyErrorBars(outcomes: RankOutcome[], width = 360, barHeight = 26): ChartLayout {
  const max = Math.max(...outcomes.map((o) => o.mean_squared_error), 1e-9);
  const bars = outcomes.map((o, i) => ({
    label: `Rank ${o.rank} (${o.configuration_id})`,
    sublabel: `mse ${o.mean_squared_error.toFixed(3)} ± ${o.sd_squared_error.toFixed(3)}`,
    value: o.mean_squared_error,
    x: 0,
    y: i * (barHeight + PAD),
    width: (o.mean_squared_error / max) * width,
    height: barHeight,
  }));
  return { width, height: outcomes.length * (barHeight + PAD), bars };
}
