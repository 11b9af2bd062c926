/** Waveform geometry: turns /api/preview series into SVG polyline points.
 * Values are taken verbatim from the payload, never recomputed here. */

import type { TimelineSeries } from "./types.js";

export interface WavePath {
  displayId: string;
  points: string;
  maxKpa: number;
}

export interface TimelineGeometry {
  width: number;
  height: number;
  rowHeight: number;
  paths: WavePath[];
  /** Indices (times) where a series first rises above zero. */
  onsets: Record<string, number | null>;
}

export function timelineGeometry(
  series: TimelineSeries[],
  width = 520,
  rowHeight = 46,
): TimelineGeometry {
  const maxT = Math.max(...series.map((s) => s.times_s[s.times_s.length - 1] ?? 0), 1e-9);
  const maxK = Math.max(...series.map((s) => Math.max(...s.kpa, 0)), 1e-9);
  const paths: WavePath[] = [];
  const onsets: Record<string, number | null> = {};
  series.forEach((s, row) => {
    const y0 = row * rowHeight + rowHeight - 4;
    const pts: string[] = [];
    for (let i = 0; i < s.times_s.length; i++) {
      const t = s.times_s[i]!;
      const k = s.kpa[i]!;
      const x = (t / maxT) * width;
      const y = y0 - (k / maxK) * (rowHeight - 10);
      pts.push(`${x.toFixed(1)},${y.toFixed(1)}`);
    }
    paths.push({
      displayId: s.display_id,
      points: pts.join(" "),
      maxKpa: Math.max(...s.kpa, 0),
    });
    const first = s.kpa.findIndex((k) => k > 0);
    onsets[s.display_id] = first >= 0 ? (s.times_s[first] ?? null) : null;
  });
  return { width, height: series.length * rowHeight, rowHeight, paths, onsets };
}

/** Count of rising step onsets across a set of pouch series. */
export function stepOnsets(series: TimelineSeries[]): number[] {
  const out: number[] = [];
  for (const s of series) {
    const first = s.kpa.findIndex((k) => k > 0);
    if (first >= 0) out.push(s.times_s[first]!);
  }
  return out.sort((a, b) => a - b);
}
