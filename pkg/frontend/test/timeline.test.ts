import { describe, expect, it } from "vitest";

import { stepOnsets, timelineGeometry } from "../src/timeline.js";
import type { TimelineSeries } from "../src/types.js";

function stepSeries(id: string, onset: number, level: number, total = 3.0, dt = 0.01): TimelineSeries {
  const times: number[] = [];
  const kpa: number[] = [];
  for (let t = 0; t < total; t += dt) {
    times.push(Number(t.toFixed(4)));
    kpa.push(t >= onset ? level : 0);
  }
  return { display_id: id, times_s: times, kpa };
}

describe("timelineGeometry", () => {
  it("produces one path per series with payload-true peaks", () => {
    const series = [stepSeries("p1", 0.0, 20.68), stepSeries("p2", 0.25, 20.68)];
    const geo = timelineGeometry(series);
    expect(geo.paths.map((p) => p.displayId)).toEqual(["p1", "p2"]);
    expect(geo.paths[0]!.maxKpa).toBeCloseTo(20.68);
    expect(geo.onsets["p2"]).toBeCloseTo(0.25, 5);
  });

  it("reports null onset for a flat series", () => {
    const flat: TimelineSeries = { display_id: "idle", times_s: [0, 0.01], kpa: [0, 0] };
    const geo = timelineGeometry([flat]);
    expect(geo.onsets["idle"]).toBeNull();
  });
});

describe("stepOnsets", () => {
  it("returns sorted onset times of active pouches only", () => {
    const series = [
      stepSeries("pouch2", 0.25, 20.68),
      stepSeries("pouch1", 0.0, 20.68),
      { display_id: "pouch3", times_s: [0, 0.01], kpa: [0, 0] },
    ];
    expect(stepOnsets(series)).toEqual([0, 0.25]);
  });
});
