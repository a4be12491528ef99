import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { formatProbability } from "../src/format.js";
import { buildTornadoBars } from "../src/tornadoView.js";
import type { TornadoPayload } from "../src/types.js";

const fixture: { tornado: TornadoPayload } = JSON.parse(
  readFileSync(new URL("./fixtures/parity.json", import.meta.url), "utf-8"),
);

describe("tornado view", () => {
  it("passes widths through unchanged from the payload", () => {
    const bars = buildTornadoBars(fixture.tornado);
    bars.forEach((bar, i) => {
      const entry = fixture.tornado.entries[i]!;
      expect(bar.width).toBe(entry.width);
      expect(bar.low).toBe(entry.low);
      expect(bar.high).toBe(entry.high);
    });
  });

  it("keeps the service's width-descending order", () => {
    const bars = buildTornadoBars(fixture.tornado);
    for (let i = 1; i < bars.length; i++) {
      expect(bars[i]!.width).toBeLessThanOrEqual(bars[i - 1]!.width);
    }
  });

  it("rejects out-of-order payloads", () => {
    const scrambled = {
      ...fixture.tornado,
      entries: [...fixture.tornado.entries].reverse(),
    };
    if (scrambled.entries.length > 1) {
      expect(() => buildTornadoBars(scrambled)).toThrow(/sorted/);
    }
  });

  it("hover text carries the handle and exact low/high digits", () => {
    const bars = buildTornadoBars(fixture.tornado);
    for (const bar of bars) {
      expect(bar.hover).toContain(bar.parameter);
      expect(bar.hover).toContain(formatProbability(bar.low));
      expect(bar.hover).toContain(formatProbability(bar.high));
    }
  });

  it("a single entry yields a single bar", () => {
    const single = { ...fixture.tornado, entries: fixture.tornado.entries.slice(0, 1) };
    expect(buildTornadoBars(single)).toHaveLength(1);
  });
});
