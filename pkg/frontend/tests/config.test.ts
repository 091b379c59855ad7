import { describe, expect, it } from "vitest";

import type { ConfigEcho, JobDoc } from "../src/api.js";
import {
  DEFAULT_DRAFT,
  draftFromEcho,
  hasErrors,
  submitPayload,
  validateDraft,
  type ConfigDraft,
} from "../src/config.js";
import { fixture } from "./helpers.js";

describe("draft validation mirrors server rules", () => {
  it("accepts the default draft", () => {
    expect(validateDraft(DEFAULT_DRAFT)).toEqual([]);
  });

  const cases: Array<[string, Partial<ConfigDraft>, string]> = [
    ["windowSize zero", { windowSize: 0 }, "windowSize"],
    ["windowSize fractional", { windowSize: 10.5 }, "windowSize"],
    ["refit zero", { nIterationsRefit: 0 }, "nIterationsRefit"],
    ["negative nSd", { nStandardDeviations: -1 }, "nStandardDeviations"],
    ["NaN nSd", { nStandardDeviations: NaN }, "nStandardDeviations"],
    ["threshold above one", { eventThreshold: 3.0 }, "eventThreshold"],
    ["threshold negative", { eventThreshold: -0.1 }, "eventThreshold"],
    ["bed window zero", { bedWindowSize: 0 }, "bedWindowSize"],
    ["trial prob at one", { trialSuccessProb: 1 }, "trialSuccessProb"],
    ["trial prob at zero", { trialSuccessProb: 0 }, "trialSuccessProb"],
  ];
  for (const [name, patch, field] of cases) {
    it(`rejects ${name}`, () => {
      const issues = validateDraft({ ...DEFAULT_DRAFT, ...patch });
      expect(hasErrors(issues)).toBe(true);
      expect(issues.map((i) => i.field)).toContain(field);
    });
  }

  it("threshold bounds are inclusive like the server's", () => {
    expect(validateDraft({ ...DEFAULT_DRAFT, eventThreshold: 0 })).toEqual([]);
    expect(validateDraft({ ...DEFAULT_DRAFT, eventThreshold: 1 })).toEqual([]);
    expect(validateDraft({ ...DEFAULT_DRAFT, nStandardDeviations: 0 })).toEqual([]);
  });

  it("warns without blocking when the event window exceeds the training window", () => {
    const issues = validateDraft({ ...DEFAULT_DRAFT, bedWindowSize: 300, windowSize: 200 });
    expect(issues).toHaveLength(1);
    expect(issues[0]!.severity).toBe("warning");
    expect(issues[0]!.field).toBe("bedWindowSize");
    expect(issues[0]!.message).toContain("300");
    expect(issues[0]!.message).toContain("200");
    expect(hasErrors(issues)).toBe(false);
  });
});

describe("config round trip", () => {
  it("a recorded job echo rebuilds the draft that produced it", () => {
    // fixture job was submitted with exactly these draft fields
    const job = fixture<JobDoc>("job-done.json");
    const draft = draftFromEcho(job.config);
    expect(draft).toEqual({
      model: "Meanf",
      windowSize: 60,
      nIterationsRefit: 5,
      nStandardDeviations: 2,
      eventThreshold: 0.7,
      bedWindowSize: 10,
      trialSuccessProb: 0.5,
      robustTraining: true,
    });
  });

  it("draft -> payload -> echo -> draft is the identity", () => {
    const job = fixture<JobDoc>("job-done.json");
    const draft = draftFromEcho(job.config);
    const payload = submitPayload(draft);
    // every payload scalar appears verbatim in the server echo
    for (const [key, value] of Object.entries(payload)) {
      if (key === "model") continue;
      expect((job.config as unknown as Record<string, unknown>)[key]).toBe(value);
    }
    expect(job.config.modelSpec.kind).toBe(payload["model"]);
    // and a synthetic echo carrying the payload scalars reproduces the draft
    const echo: ConfigEcho = {
      ...job.config,
      modelSpec: { ...job.config.modelSpec, kind: draft.model },
    };
    expect(draftFromEcho(echo)).toEqual(draft);
  });

  it("the two recorded jobs differ only in eventThreshold", () => {
    const first = draftFromEcho(fixture<JobDoc>("job-done.json").config);
    const second = draftFromEcho(fixture<JobDoc>("job2-done.json").config);
    expect(second).toEqual({ ...first, eventThreshold: 0.9 });
  });
});
