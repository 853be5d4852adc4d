/** Round-trip checks against fixtures captured from the live service:
 * the UI's view of a pinned-seed query must be exactly what the CLI
 * exports, hover readouts must agree with the exported CSV, and A/B
 * playback must come from stored results with no re-generation.
 */

import { afterEach, describe, expect, it } from "vitest";

import { validateGenerate } from "../src/api.js";
import { exactProb, formatProb } from "../src/colors.js";
import { buildPlan } from "../src/schedule.js";
import { SessionState } from "../src/state.js";
import type { ApiQuery, GenerateResponse } from "../src/types.js";
import attentionCsv from "./fixtures/cli_attention_1880_11.csv?raw";
import manifest from "./fixtures/cli_manifest_1880_11.json";
import frozenRaw from "./fixtures/generate_frozen.json";
import referenceRaw from "./fixtures/generate_1880_11.json";
import partnerRaw from "./fixtures/generate_2004_7.json";

const reference = validateGenerate(referenceRaw);
const partner = validateGenerate(partnerRaw);
const frozen = validateGenerate(frozenRaw);

const REFERENCE_QUERY: ApiQuery = {
  year: 1880,
  seed_pitches: ["A4"],
  seed_durations: ["1"],
  mxx: 8,
  mxl: 16,
  rng_seed: 11,
};

describe("pinned-seed query equals the CLI export", () => {
  it("renders the identical melody", () => {
    expect(reference.melody).toEqual(manifest.melody);
    expect(reference.seed_length).toBe(manifest.seed_length);
  });

  it("agrees on temperatures and attention", () => {
    expect(reference.temperatures).toEqual(manifest.temperatures);
    expect(reference.attention).toEqual(manifest.attention);
  });

  it("was produced by the very query the CLI echoed", () => {
    const q = manifest.query;
    expect(q.year).toBe(REFERENCE_QUERY.year);
    expect(q.rng_seed).toBe(REFERENCE_QUERY.rng_seed);
    expect(q.mxx).toBe(REFERENCE_QUERY.mxx);
    expect(q.mxl).toBe(REFERENCE_QUERY.mxl);
    expect(q.seed.map((e: string[]) => e[0])).toEqual(REFERENCE_QUERY.seed_pitches);
    expect(q.seed.map((e: string[]) => e[1])).toEqual(REFERENCE_QUERY.seed_durations);
    expect(reference.rng_seed).toBe(q.rng_seed);
  });

  it("replaying the stored entry re-issues that exact query", () => {
    const state = new SessionState();
    const unpinned = { ...REFERENCE_QUERY };
    delete unpinned.rng_seed;
    const entry = state.record(unpinned, reference);
    const replay = state.replayQuery(entry.id);
    expect(replay).toEqual(REFERENCE_QUERY);
  });
});

describe("hover readout matches the exported CSV", () => {
  const csvRows = attentionCsv
    .trim()
    .split("\n")
    .map((line) => line.split(","));

  it("has one CSV row per generated step", () => {
    expect(csvRows.length).toBe(reference.attention.length);
  });

  it("every cell round-trips to the exact service value", () => {
    csvRows.forEach((cells, i) => {
      expect(cells.length).toBe(reference.attention[i].length);
      cells.forEach((cell, j) => {
        const value = reference.attention[i][j];
        expect(Number(cell)).toBe(value);
        expect(Number(exactProb(value))).toBe(Number(cell));
      });
    });
  });

  it("agrees with the CSV at display precision", () => {
    csvRows.forEach((cells, i) => {
      cells.forEach((cell, j) => {
        expect(formatProb(reference.attention[i][j])).toBe(formatProb(Number(cell)));
      });
    });
  });
});

describe("A/B playback uses stored results only", () => {
  const realFetch = globalThis.fetch;

  afterEach(() => {
    globalThis.fetch = realFetch;
  });

  it("switches between the two stored responses without a request", () => {
    globalThis.fetch = (() => {
      throw new Error("A/B playback must not hit the network");
    }) as typeof fetch;

    const state = new SessionState();
    const a = state.record(REFERENCE_QUERY, reference);
    const b = state.record({ ...REFERENCE_QUERY, year: 2004, rng_seed: 7 }, partner);
    state.assignAb("a", a.id);
    state.assignAb("b", b.id);

    const first = state.toggleAb()!;
    expect(first.response.melody).toEqual(partner.melody);
    const planB = buildPlan(first.response.melody, 90);
    expect(planB.events.length).toBe(partner.melody.length);

    const second = state.toggleAb()!;
    expect(second.response.melody).toEqual(reference.melody);
    const planA = buildPlan(second.response.melody, 90);
    expect(planA.events.length).toBe(reference.melody.length);

    expect(planA.totalSeconds).toBeGreaterThan(0);
    expect(planB.totalSeconds).toBeGreaterThan(0);
  });
});

describe("frozen temperatures pick the darkest candidate", () => {
  it("reports zero for both temperatures", () => {
    expect(frozen.temperatures.pitch).toBe(0);
    expect(frozen.temperatures.duration).toBe(0);
  });

  function darkest(tokens: string[], row: number[]): string {
    let best = 0;
    row.forEach((v, i) => {
      if (v > row[best]) best = i;
    });
    return tokens[best];
  }

  function checkHead(
    response: GenerateResponse,
    grid: { tokens: string[]; rows: number[][] },
    side: 0 | 1
  ): void {
    grid.rows.forEach((row, step) => {
      const sampled = response.melody[response.seed_length + step][side];
      expect(darkest(grid.tokens, row)).toBe(sampled);
    });
  }

  it("pitch head: per-step argmax equals the sampled token", () => {
    checkHead(frozen, frozen.pitch_candidates, 0);
  });

  it("duration head: per-step argmax equals the sampled token", () => {
    checkHead(frozen, frozen.duration_candidates, 1);
  });
});
