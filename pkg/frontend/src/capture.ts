/**
 * Pointer-stream gesture capture. Feed it normalized pointer samples with
 * millisecond timestamps (from pointerdown/pointermove/pointerup handlers
 * or a test script); it produces a wire-ready performance, truncated at
 * the five-second limit.
 */
import { MAX_SECONDS, WIRE_VERSION, WireEvent, WirePerformance } from "./wire.js";

const clamp01 = (v: number) => Math.min(1, Math.max(0, v));

export class GestureRecorder {
  private events: WireEvent[] = [];
  private startMs: number | null = null;
  private truncated = false;

  /** Pointer pressed: starts the clock on the first sample; moving=false. */
  pointerDown(x: number, y: number, timeMs: number): void {
    this.addSample(x, y, timeMs, false);
  }

  /** Pointer dragged while down; moving=true. Ignored before any down. */
  pointerMove(x: number, y: number, timeMs: number): void {
    if (this.startMs === null) return;
    this.addSample(x, y, timeMs, true);
  }

  private addSample(x: number, y: number, timeMs: number, moving: boolean): void {
    if (this.startMs === null) this.startMs = timeMs;
    const t = (timeMs - this.startMs) / 1000;
    if (t > MAX_SECONDS) {
      this.truncated = true;
      return;
    }
    this.events.push({ x: clamp01(x), y: clamp01(y), t, moving });
  }

  get isEmpty(): boolean {
    return this.events.length === 0;
  }

  /** True once any sample fell past the five-second limit and was dropped. */
  get wasTruncated(): boolean {
    return this.truncated;
  }

  get durationSeconds(): number {
    return this.isEmpty ? 0 : this.events[this.events.length - 1]!.t;
  }

  reset(): void {
    this.events = [];
    this.startMs = null;
    this.truncated = false;
  }

  toWire(): WirePerformance {
    if (this.isEmpty) throw new Error("empty capture");
    return { version: WIRE_VERSION, events: [...this.events] };
  }
}
