/**
 * Transport backed by response bodies recorded from the real inference
 * service (test/fixtures/service_bodies.json), so delegation tests
 * compare the UI against the actual wire format.
 */

import fixtures from "./fixtures/service_bodies.json";
import type { Transport } from "../src/api.js";

export interface CallRecord {
  url: string;
  method: string;
  body?: unknown;
}

function canonicalPredictKey(request: { offense: number[]; defense: number[] }): string {
  const sort = (xs: number[]) => [...xs].sort((a, b) => a - b);
  return JSON.stringify([sort(request.offense), sort(request.defense)]);
}

export function fixtureTransport(calls: CallRecord[] = []): Transport {
  const predictBodies = new Map<string, unknown>();
  for (const key of ["predict", "predict_after_click"] as const) {
    const fx = fixtures[key] as { request: { offense: number[]; defense: number[] }; response: unknown };
    predictBodies.set(canonicalPredictKey(fx.request), fx.response);
  }

  return async (url, init) => {
    const body = init.body ? JSON.parse(init.body) : undefined;
    calls.push({ url, method: init.method, body });
    const respond = (payload: unknown, status = 200) => ({
      ok: status < 400,
      status,
      json: async () => payload,
    });
    if (url.endsWith("/api/v1/predict")) {
      const hit = predictBodies.get(canonicalPredictKey(body));
      if (!hit) return respond({ code: "invalid_request", message: "no fixture" }, 422);
      return respond(hit);
    }
    if (url.endsWith("/api/v1/simulate/series")) return respond(fixtures.series.response);
    if (url.endsWith("/api/v1/optimize/fifth")) return respond(fixtures.optimize.response);
    if (url.endsWith("/api/v1/players")) return respond(fixtures.players.response);
    if (url.endsWith("/api/v1/meta")) return respond(fixtures.meta.response);
    return respond({ code: "bad_request", message: `no route ${url}` }, 404);
  };
}

export { fixtures };
