/** Typed client for the sketch2photo HTTP/JSON API.
 *
 * Images travel as base64 PNG strings; the only endpoints used are
 * GET /api/health, GET /api/references and POST /api/synthesize. The fetch
 * implementation is injected so tests can run without a network or a DOM.
 */

export interface ResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<ResponseLike>;

export interface SynthesisResult {
  grayscale: string;
  color: string;
  mode: string;
  modelVersion: string;
  latencyMs: number;
  preprocess: string;
}

export interface ReferenceEntry {
  id: string;
  thumbnail: string;
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status?: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

function extractDetail(payload: unknown): string | null {
  if (payload && typeof payload === "object" && "detail" in payload) {
    const detail = (payload as { detail: unknown }).detail;
    if (typeof detail === "string") {
      return detail;
    }
    if (Array.isArray(detail)) {
      return detail
        .map((entry) =>
          entry && typeof entry === "object" && "msg" in entry
            ? String((entry as { msg: unknown }).msg)
            : JSON.stringify(entry),
        )
        .join("; ");
    }
  }
  return null;
}

function asString(value: unknown, field: string): string {
  if (typeof value !== "string") {
    throw new ApiError(`unexpected response: ${field} is not a string`);
  }
  return value;
}

export class StudioApi {
  private readonly base: string;

  constructor(
    baseUrl: string,
    private readonly fetchImpl: FetchLike,
  ) {
    this.base = baseUrl.replace(/\/+$/, "");
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<unknown> {
    let response: ResponseLike;
    try {
      response = await this.fetchImpl(this.base + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      throw new ApiError(`cannot reach service: ${reason}`);
    }
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      const detail = extractDetail(payload) ?? `HTTP ${response.status}`;
      throw new ApiError(`service error ${response.status}: ${detail}`, response.status);
    }
    return payload;
  }

  async health(): Promise<{ status: string; modelVersion: string }> {
    const payload = (await this.request("GET", "/api/health")) as {
      status?: unknown;
      model_version?: unknown;
    };
    return {
      status: asString(payload?.status, "status"),
      modelVersion: asString(payload?.model_version, "model_version"),
    };
  }

  async references(): Promise<ReferenceEntry[]> {
    const payload = (await this.request("GET", "/api/references")) as {
      references?: unknown;
    };
    if (!payload || !Array.isArray(payload.references)) {
      throw new ApiError("unexpected response: missing references list");
    }
    return payload.references.map((entry) => {
      const record = entry as { id?: unknown; thumbnail?: unknown };
      return {
        id: asString(record.id, "reference id"),
        thumbnail: asString(record.thumbnail, "reference thumbnail"),
      };
    });
  }

  async synthesize(
    sketchBase64: string,
    referenceId: string | null,
  ): Promise<SynthesisResult> {
    const body: Record<string, string> = {
      sketch: sketchBase64,
      mode: "sketch2photo",
    };
    if (referenceId !== null) {
      body.reference_id = referenceId;
    }
    const payload = (await this.request("POST", "/api/synthesize", body)) as {
      grayscale?: unknown;
      color?: unknown;
      mode?: unknown;
      model_version?: unknown;
      latency_ms?: unknown;
      preprocess?: unknown;
    };
    return {
      grayscale: asString(payload?.grayscale, "grayscale"),
      color: asString(payload?.color, "color"),
      mode: asString(payload?.mode, "mode"),
      modelVersion: asString(payload?.model_version, "model_version"),
      latencyMs: typeof payload?.latency_ms === "number" ? payload.latency_ms : 0,
      preprocess: asString(payload?.preprocess, "preprocess"),
    };
  }
}
