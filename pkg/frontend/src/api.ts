/**
 * Thin typed client for the inference service.
 *
 * The transport is injected so tests can run against recorded bodies,
 * and every panel gets at most one in-flight request: starting a new
 * call through the same ApiClient channel aborts the previous one.
 */

import type {
  OptimizeRequest,
  OptimizeResponse,
  PlayersResponse,
  PredictRequest,
  PredictResponse,
  SeriesRequest,
  SeriesResponse,
  ServiceError,
} from "./types.js";

export type Transport = (
  url: string,
  init: { method: string; body?: string; signal?: AbortSignal },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ServiceError,
  ) {
    super(body.message ?? `service error ${status}`);
  }
}

export class RequestCancelled extends Error {
  constructor() {
    super("request cancelled by a newer one");
  }
}

export class ApiClient {
  private controllers = new Map<string, AbortController>();

  constructor(
    private baseUrl: string,
    private transport: Transport,
  ) {}

  /** POST/GET with per-channel cancellation of the in-flight call. */
  private async call<T>(channel: string, method: string, path: string, body?: unknown): Promise<T> {
    this.controllers.get(channel)?.abort();
    const controller = typeof AbortController !== "undefined" ? new AbortController() : undefined;
    if (controller) this.controllers.set(channel, controller);
    let response;
    try {
      response = await this.transport(this.baseUrl + path, {
        method,
        body: body === undefined ? undefined : JSON.stringify(body),
        signal: controller?.signal,
      });
    } catch (err) {
      if (controller?.signal.aborted) throw new RequestCancelled();
      throw err;
    }
    if (controller?.signal.aborted) throw new RequestCancelled();
    const payload = (await response.json()) as T | ServiceError;
    if (!response.ok) throw new ApiError(response.status, payload as ServiceError);
    return payload as T;
  }

  predict(request: PredictRequest): Promise<PredictResponse> {
    return this.call("predict", "POST", "/api/v1/predict", request);
  }

  simulateSeries(request: SeriesRequest): Promise<SeriesResponse> {
    return this.call("series", "POST", "/api/v1/simulate/series", request);
  }

  optimizeFifth(request: OptimizeRequest): Promise<OptimizeResponse> {
    return this.call("optimize", "POST", "/api/v1/optimize/fifth", request);
  }

  players(): Promise<PlayersResponse> {
    return this.call("players", "GET", "/api/v1/players");
  }
}
