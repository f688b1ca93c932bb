/**
 * Wire format shared with the response service. Every outgoing payload is
 * validated against these schemas before it leaves the client.
 */
import { z } from "zod";

export const WIRE_VERSION = 1;
export const MAX_SECONDS = 5.0;

export const wireEventSchema = z.object({
  x: z.number().min(0).max(1),
  y: z.number().min(0).max(1),
  t: z.number().min(0).max(MAX_SECONDS),
  moving: z.boolean(),
});

export const wirePerformanceSchema = z
  .object({
    version: z.literal(WIRE_VERSION),
    events: z.array(wireEventSchema).min(1),
  })
  .refine(
    (p) => p.events.every((ev, i) => i === 0 || ev.t >= p.events[i - 1]!.t),
    { message: "event times must be nondecreasing" },
  );

export const respondRequestSchema = z.object({
  performance: wirePerformanceSchema,
  seed: z.number().int().nonnegative().optional(),
  current_mapping: z.string().optional(),
});

export const respondReplySchema = z.object({
  response: wirePerformanceSchema,
  mapping: z.string(),
});

export type WireEvent = z.infer<typeof wireEventSchema>;
export type WirePerformance = z.infer<typeof wirePerformanceSchema>;
export type RespondRequest = z.infer<typeof respondRequestSchema>;
export type RespondReply = z.infer<typeof respondReplySchema>;

/** Build a respond-request body, throwing if it would not validate. */
export function buildRequestBody(
  performance: WirePerformance,
  seed?: number,
  currentMapping?: string,
): RespondRequest {
  const body: RespondRequest = { performance };
  if (seed !== undefined) body.seed = seed;
  if (currentMapping !== undefined) body.current_mapping = currentMapping;
  return respondRequestSchema.parse(body);
}
