import { describe, expect, it } from "vitest";

import {
  QuerySequencer,
  clearEvidence,
  connectModel,
  initialState,
  isStale,
  pinScenario,
  setEvidence,
  unpinScenario,
} from "../src/state.js";
import type { ModelInfo, PosteriorPayload } from "../src/types.js";

const model: ModelInfo = {
  config_hash: "abc123",
  target: "PRICE",
  variables: [
    { name: "PRICE", states: ["Low", "High"], group: "target" },
    { name: "CENTRE", states: ["Very Near", "Far"], group: "spatial" },
  ],
  arcs: [{ parent: "CENTRE", child: "PRICE", strength: 1.0 }],
};

const posterior: PosteriorPayload = {
  config_hash: "abc123",
  target: "PRICE",
  states: ["Low", "High"],
  probabilities: [0.25, 0.75],
  p_evidence: 1.0,
};

describe("session state", () => {
  it("connecting a model picks its target and hash", () => {
    const s = connectModel(initialState(), model);
    expect(s.modelHash).toBe("abc123");
    expect(s.target).toBe("PRICE");
    expect(s.tornado.state).toBe("High"); // last declared state of the target
  });

  it("evidence can be set, replaced, and cleared per variable", () => {
    let s = connectModel(initialState(), model);
    s = setEvidence(s, "CENTRE", "Far");
    expect(s.evidence).toEqual({ CENTRE: "Far" });
    s = setEvidence(s, "CENTRE", "Very Near");
    expect(s.evidence).toEqual({ CENTRE: "Very Near" });
    s = setEvidence(s, "CENTRE", null);
    expect(s.evidence).toEqual({});
  });

  it("clearing all evidence restores the marginal view state", () => {
    let s = connectModel(initialState(), model);
    s = setEvidence(s, "CENTRE", "Far");
    s = clearEvidence(s);
    expect(Object.keys(s.evidence)).toHaveLength(0);
  });

  it("updates are idempotent under repeated identical inputs", () => {
    let s = connectModel(initialState(), model);
    const once = setEvidence(s, "CENTRE", "Far");
    const twice = setEvidence(once, "CENTRE", "Far");
    expect(twice.evidence).toEqual(once.evidence);
  });

  it("pinned scenarios are immutable snapshots", () => {
    let s = connectModel(initialState(), model);
    s = setEvidence(s, "CENTRE", "Far");
    s = pinScenario(s, "test", posterior);
    const pinned = s.pinned[0]!;
    expect(() => {
      (pinned.evidence as Record<string, string>)["CENTRE"] = "Very Near";
    }).toThrow();
    // later session edits never leak into the pin
    s = setEvidence(s, "CENTRE", "Very Near");
    expect(pinned.evidence["CENTRE"]).toBe("Far");
  });

  it("unpinning removes exactly one scenario", () => {
    let s = connectModel(initialState(), model);
    s = pinScenario(s, "a", posterior);
    s = pinScenario(s, "b", posterior);
    s = unpinScenario(s, 0);
    expect(s.pinned.map((p) => p.label)).toEqual(["b"]);
  });

  it("stale detection compares config hashes", () => {
    const s = connectModel(initialState(), model);
    expect(isStale(s, "abc123")).toBe(false);
    expect(isStale(s, "zzz999")).toBe(true);
  });
});

describe("QuerySequencer", () => {
  it("only the newest sequence number is current", () => {
    const seq = new QuerySequencer();
    const first = seq.next();
    const second = seq.next();
    expect(seq.isCurrent(first)).toBe(false);
    expect(seq.isCurrent(second)).toBe(true);
  });
});
