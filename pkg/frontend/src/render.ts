/**
 * Pure drawing model: turn call/response layers into an ordered list of
 * stroke commands. The canvas adapter in app.ts just replays the list, so
 * ordering (response red OVER call blue) and the single coordinate
 * transform are testable without a DOM.
 */
import { WireEvent, WirePerformance } from "./wire.js";

export const CALL_COLOR = "#1f77b4";
export const RESPONSE_COLOR = "#d62728";

export interface Point {
  x: number;
  y: number;
}

export interface StrokeCommand {
  color: string;
  /** one point renders as a dot, two or more as a connected line */
  points: Point[];
}

/**
 * The one normalized-to-canvas transform. y is not flipped: gesture y=0 is
 * the top of the screen, matching both capture and the canvas origin.
 */
export function toCanvas(ev: { x: number; y: number }, width: number, height: number): Point {
  return { x: ev.x * width, y: ev.y * height };
}

/** Group events into strokes: a non-moving event starts a new stroke. */
export function strokes(events: WireEvent[]): WireEvent[][] {
  const out: WireEvent[][] = [];
  for (const ev of events) {
    const current = out[out.length - 1];
    if (!ev.moving || current === undefined) out.push([ev]);
    else current.push(ev);
  }
  return out;
}

/** Commands in paint order: the whole call layer first, then the response. */
export function drawCommands(
  call: WirePerformance | null,
  response: WirePerformance | null,
  width: number,
  height: number,
): StrokeCommand[] {
  const out: StrokeCommand[] = [];
  const layer = (perf: WirePerformance, color: string) => {
    for (const s of strokes(perf.events)) {
      out.push({ color, points: s.map((ev) => toCanvas(ev, width, height)) });
    }
  };
  if (call) layer(call, CALL_COLOR);
  if (response) layer(response, RESPONSE_COLOR);
  return out;
}
