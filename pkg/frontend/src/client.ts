/**
 * HTTP client for the response service. The fetch function is injected so
 * tests can capture the exact body that would go over the wire.
 */
import {
  RespondReply,
  WirePerformance,
  buildRequestBody,
  respondReplySchema,
} from "./wire.js";

export type FetchLike = (url: string, init: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    message: string,
    public readonly status: number | null,
    public readonly errorCode: string | null,
  ) {
    super(message);
  }
}

export async function requestResponse(
  baseUrl: string,
  performance: WirePerformance,
  options: { seed?: number; currentMapping?: string; fetchFn?: FetchLike } = {},
): Promise<RespondReply> {
  const body = buildRequestBody(performance, options.seed, options.currentMapping);
  const fetchFn = options.fetchFn ?? fetch;
  let resp: Response;
  try {
    resp = await fetchFn(`${baseUrl}/api/v1/respond`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  } catch (err) {
    throw new ServiceError(`service unreachable: ${String(err)}`, null, null);
  }
  const payload = await resp.json().catch(() => null);
  if (!resp.ok) {
    const code = payload?.error_code ?? null;
    throw new ServiceError(payload?.detail ?? `request failed (${resp.status})`, resp.status, code);
  }
  return respondReplySchema.parse(payload);
}
