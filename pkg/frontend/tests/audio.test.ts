import { describe, expect, it } from "vitest";

import {
  cutoffForY,
  pitchForX,
  scheduleNotes,
  timbreForMapping,
} from "../src/audio.js";
import { WIRE_VERSION, WireEvent, WirePerformance } from "../src/wire.js";

const perf = (events: WireEvent[]): WirePerformance => ({
  version: WIRE_VERSION,
  events,
});

describe("pitch and tone mapping", () => {
  it("x sweeps two octaves continuously", () => {
    expect(pitchForX(0)).toBeCloseTo(220);
    expect(pitchForX(0.5)).toBeCloseTo(440);
    expect(pitchForX(1)).toBeCloseTo(880);
    // strictly increasing: higher x is always higher pitch
    for (let i = 1; i <= 100; i++) {
      expect(pitchForX(i / 100)).toBeGreaterThan(pitchForX((i - 1) / 100));
    }
  });

  it("y darkens the tone toward the bottom of the screen", () => {
    expect(cutoffForY(0)).toBeCloseTo(8000);
    expect(cutoffForY(1)).toBeCloseTo(200);
    expect(cutoffForY(0.2)).toBeGreaterThan(cutoffForY(0.8));
  });

  it("mapping labels select between exactly two timbres", () => {
    const labels = ["drums", "strings", "bass", "synth", null];
    const timbres = new Set(labels.map(timbreForMapping));
    expect([...timbres].sort()).toEqual(["sine", "square"]);
  });
});

describe("scheduling", () => {
  it("places every note within 50 ms of its recorded time", () => {
    const events = Array.from({ length: 40 }, (_, i) => ({
      x: (i % 10) / 10,
      y: 0.5,
      t: i * 0.119,
      moving: i % 3 !== 0,
    }));
    const startTime = 12.345; // arbitrary audio-clock origin
    const notes = scheduleNotes(perf(events), startTime, "sine");
    expect(notes).toHaveLength(events.length);
    for (let i = 0; i < events.length; i++) {
      expect(Math.abs(notes[i]!.when - (startTime + events[i]!.t))).toBeLessThan(0.05);
    }
  });

  it("keeps notes in recorded order with no drift across the 5 s window", () => {
    const events = [
      { x: 0.1, y: 0.1, t: 0, moving: false },
      { x: 0.5, y: 0.5, t: 2.5, moving: false },
      { x: 0.9, y: 0.9, t: 5.0, moving: false },
    ];
    const notes = scheduleNotes(perf(events), 100, "square");
    expect(notes.map((n) => n.when)).toEqual([100, 102.5, 105]);
  });

  it("drag samples play shorter than fresh taps", () => {
    const events = [
      { x: 0.5, y: 0.5, t: 0, moving: false },
      { x: 0.6, y: 0.5, t: 0.05, moving: true },
    ];
    const [tap, drag] = scheduleNotes(perf(events), 0, "sine");
    expect(drag!.duration).toBeLessThan(tap!.duration);
  });
});
