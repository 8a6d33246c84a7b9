import { describe, expect, it } from "vitest";

import { combinedEnergy, compensationGain } from "../src/compensation.js";

const EQUAL = { dialogueLufs: -20, backgroundLufs: -20 };

describe("compensationGain", () => {
  it("is the identity at 0 dB", () => {
    const r = compensationGain(0, EQUAL);
    expect(r.backgroundGainDb).toBe(0);
    expect(r.limitReached).toBe(false);
  });

  it("matches the closed form for equal stems at +3 dB", () => {
    const r = compensationGain(3, EQUAL);
    const expected = 10 * Math.log10(2 - Math.pow(10, 0.3));
    expect(r.limitReached).toBe(false);
    expect(r.backgroundGainDb).toBeCloseTo(expected, 9);
    expect(Math.abs(r.backgroundGainDb - -23.0)).toBeLessThan(0.5);
  });

  it("mutes and flags when equal stems get +6 dB", () => {
    const r = compensationGain(6, EQUAL);
    expect(r.backgroundGainDb).toBe(-Infinity);
    expect(r.limitReached).toBe(true);
  });

  it("identity holds regardless of stem balance", () => {
    const r = compensationGain(0, { dialogueLufs: -31, backgroundLufs: -14.5 });
    expect(r.backgroundGainDb).toBeCloseTo(0, 12);
  });

  it("preserves combined energy to 1e-9 relative wherever solvable", () => {
    let seed = 12345;
    const rand = () => {
      // deterministic LCG so failures reproduce
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    for (let i = 0; i < 2000; i++) {
      const stems = {
        dialogueLufs: -40 + 35 * rand(),
        backgroundLufs: -40 + 35 * rand(),
      };
      const gd = -6 + 18 * rand();
      const r = compensationGain(gd, stems);
      if (r.limitReached) {
        // past the limit the background is hard-muted
        expect(combinedEnergy(gd, r.backgroundGainDb, stems)).toBeGreaterThan(
          combinedEnergy(0, 0, stems) - 1e-12,
        );
        continue;
      }
      const before = combinedEnergy(0, 0, stems);
      const after = combinedEnergy(gd, r.backgroundGainDb, stems);
      expect(Math.abs(after - before) / before).toBeLessThan(1e-9);
    }
  });

  it("cutting dialogue raises the background (both directions compensate)", () => {
    const r = compensationGain(-6, EQUAL);
    expect(r.backgroundGainDb).toBeGreaterThan(0);
    expect(r.limitReached).toBe(false);
  });
});
