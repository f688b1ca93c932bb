/**
 * Playback model. Pure scheduling (event -> pitch/tone/absolute time on
 * the audio clock) lives here and is unit-tested; the WebAudio node graph
 * that realizes each note lives in the thin player below.
 *
 * Mapping: x controls pitch continuously across two octaves; y controls
 * tone (filter brightness, darker toward the bottom of the screen). The
 * server-chosen mapping label selects one of two timbres.
 */
import { WireEvent, WirePerformance } from "./wire.js";

export type Timbre = "sine" | "square";

export interface ScheduledNote {
  /** absolute time on the audio clock, seconds */
  when: number;
  frequency: number;
  /** low-pass cutoff in Hz; higher = brighter */
  cutoff: number;
  timbre: Timbre;
  /** drag samples play shorter than fresh taps */
  duration: number;
}

/** Continuous pitch: x=0 -> 220 Hz, x=1 -> 880 Hz (two octaves). */
export function pitchForX(x: number): number {
  return 220 * Math.pow(2, 2 * x);
}

/** Tone: y=0 (top) bright at 8 kHz, y=1 (bottom) dark at 200 Hz. */
export function cutoffForY(y: number): number {
  return 8000 * Math.pow(200 / 8000, y);
}

/** Two built-in timbres; the label only has to pick between them. */
export function timbreForMapping(mapping: string | null): Timbre {
  if (mapping === null) return "sine";
  return mapping.length % 2 === 0 ? "sine" : "square";
}

/**
 * Map a performance onto the audio clock: each event plays at
 * startTime + its recorded t, with no drift or re-quantization.
 */
export function scheduleNotes(
  performance: WirePerformance,
  startTime: number,
  timbre: Timbre,
): ScheduledNote[] {
  return performance.events.map((ev: WireEvent) => ({
    when: startTime + ev.t,
    frequency: pitchForX(ev.x),
    cutoff: cutoffForY(ev.y),
    timbre,
    duration: ev.moving ? 0.08 : 0.25,
  }));
}

/** Realize scheduled notes with WebAudio; browser-only, not unit-tested. */
export class Player {
  private ctx: AudioContext;

  constructor(ctx?: AudioContext) {
    this.ctx = ctx ?? new AudioContext();
  }

  get now(): number {
    return this.ctx.currentTime;
  }

  play(notes: ScheduledNote[], gainLevel = 0.2): void {
    for (const note of notes) {
      const osc = this.ctx.createOscillator();
      osc.type = note.timbre;
      osc.frequency.value = note.frequency;
      const filter = this.ctx.createBiquadFilter();
      filter.type = "lowpass";
      filter.frequency.value = note.cutoff;
      const gain = this.ctx.createGain();
      gain.gain.setValueAtTime(gainLevel, note.when);
      gain.gain.exponentialRampToValueAtTime(1e-4, note.when + note.duration);
      osc.connect(filter).connect(gain).connect(this.ctx.destination);
      osc.start(note.when);
      osc.stop(note.when + note.duration);
    }
  }
}
