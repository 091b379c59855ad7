import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { fixture, jsonResponse } from "./helpers.js";

interface Recorded {
  url: string;
  init?: RequestInit;
}

function client(responses: Response[], log: Recorded[] = []): ApiClient {
  const queue = [...responses];
  return new ApiClient("", async (url, init) => {
    log.push({ url, init });
    const next = queue.shift();
    if (!next) throw new Error(`unexpected request ${url}`);
    return next;
  });
}

describe("request shapes", () => {
  it("uploads CSV text as the raw request body", async () => {
    const log: Recorded[] = [];
    const api = client([jsonResponse(fixture("upload.json"), 201)], log);
    const result = await api.uploadDataset("Time,A\n0,1\n");
    expect(result.datasetId).toBe("50dbb63d4b577ab8");
    expect(log[0]!.url).toBe("/api/datasets");
    expect(log[0]!.init?.method).toBe("POST");
    expect(log[0]!.init?.body).toBe("Time,A\n0,1\n");
  });

  it("builds job submissions and warmup queries", async () => {
    const log: Recorded[] = [];
    const api = client(
      [jsonResponse({ jobId: "j1", status: "queued" }, 202), jsonResponse(fixture("metrics.json"))],
      log,
    );
    await api.submitJob("d1", { windowSize: 60 });
    expect(log[0]!.url).toBe("/api/jobs");
    expect(JSON.parse(String(log[0]!.init?.body))).toEqual({
      datasetId: "d1",
      config: { windowSize: 60 },
    });
    await api.getMetrics("j1", true);
    expect(log[1]!.url).toBe("/api/jobs/j1/metrics?includeWarmup=true");
  });

  it("strips a trailing slash from the base URL", async () => {
    const log: Recorded[] = [];
    const api = new ApiClient("http://localhost:8000/", async (url) => {
      log.push({ url });
      return jsonResponse(fixture("roc.json"));
    });
    await api.getRoc("j1");
    expect(log[0]!.url).toBe("http://localhost:8000/api/jobs/j1/roc");
  });
});

describe("error mapping", () => {
  it("surfaces field-level detail from a 422", async () => {
    const recorded = fixture<{ status: number; body: unknown }>("error-unknown-key.json");
    const api = client([jsonResponse(recorded.body, recorded.status)]);
    const error = await api.submitJob("d1", { windowSizze: 10 }).catch((e) => e as ApiError);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(422);
    expect(error.errors[0]!.field).toBe("windowSizze");
    expect(error.errors[0]!.message).toContain("unknown config key");
  });

  it("surfaces the upload complaint from a 400", async () => {
    const recorded = fixture<{ status: number; body: unknown }>("error-bad-upload.json");
    const api = client([jsonResponse(recorded.body, recorded.status)]);
    const error = await api.uploadDataset("   ").catch((e) => e as ApiError);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(400);
    expect(error.errors[0]!.field).toBe("body");
  });

  it("copes with a non-JSON error body", async () => {
    const api = client([new Response("boom", { status: 500 })]);
    const error = await api.getJob("j1").catch((e) => e as ApiError);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.errors[0]!.message).toBe("HTTP 500");
  });
});
