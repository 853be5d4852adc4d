/** Session state: the query form, history, and A/B slots.
 *
 * History entries store the query with the rng seed the service
 * actually used, so replaying an entry re-requests the exact same
 * melody. A/B playback reads stored responses and never refetches.
 */

import type { ApiQuery, GenerateResponse } from "./types.js";

export interface HistoryEntry {
  id: number;
  query: ApiQuery;
  response: GenerateResponse;
}

export type AbSlot = "a" | "b";

const DEFAULT_CAPACITY = 20;

export class SessionState {
  year = 1984;
  seedPitches: string[] = ["A4"];
  seedDurations: string[] = ["1"];
  mxx = 8;
  mxl = 16;
  rngSeed: number | null = null;
  pitchOverride: number | null = null;
  durationOverride: number | null = null;
  /** drag selection on the timeline, inclusive */
  rangeSelection: { from: number; to: number } | null = null;

  readonly capacity: number;
  history: HistoryEntry[] = [];
  ab: Record<AbSlot, number | null> = { a: null, b: null };
  activeSlot: AbSlot = "a";
  private nextId = 1;

  constructor(capacity: number = DEFAULT_CAPACITY) {
    this.capacity = capacity;
  }

  /** The query the form currently describes. */
  buildQuery(): ApiQuery {
    const query: ApiQuery = {
      year: this.year,
      seed_pitches: [...this.seedPitches],
      seed_durations: [...this.seedDurations],
      mxx: this.mxx,
      mxl: this.mxl,
    };
    if (this.rngSeed !== null) query.rng_seed = this.rngSeed;
    if (this.pitchOverride !== null) query.pitch_temperature = this.pitchOverride;
    if (this.durationOverride !== null) query.duration_temperature = this.durationOverride;
    return query;
  }

  /** Store a completed generation, pinning the seed the server chose. */
  record(query: ApiQuery, response: GenerateResponse): HistoryEntry {
    const entry: HistoryEntry = {
      id: this.nextId++,
      query: { ...structuredClone(query), rng_seed: response.rng_seed },
      response: structuredClone(response),
    };
    this.history.unshift(entry);
    while (this.history.length > this.capacity) {
      const dropped = this.history.pop()!;
      for (const slot of ["a", "b"] as const) {
        if (this.ab[slot] === dropped.id) this.ab[slot] = null;
      }
    }
    return entry;
  }

  entry(id: number): HistoryEntry | undefined {
    return this.history.find((e) => e.id === id);
  }

  /** Exact stored query for re-requesting; safe to mutate the copy. */
  replayQuery(id: number): ApiQuery {
    const entry = this.entry(id);
    if (!entry) throw new Error(`no history entry ${id}`);
    return structuredClone(entry.query);
  }

  /** Populate the form from a stored query. */
  loadEntry(id: number): void {
    const entry = this.entry(id);
    if (!entry) throw new Error(`no history entry ${id}`);
    const q = entry.query;
    this.year = q.year;
    this.seedPitches = [...q.seed_pitches];
    this.seedDurations = q.seed_durations.map(String);
    this.mxx = q.mxx;
    this.mxl = q.mxl;
    this.rngSeed = q.rng_seed ?? null;
    this.pitchOverride = q.pitch_temperature ?? null;
    this.durationOverride = q.duration_temperature ?? null;
  }

  assignAb(slot: AbSlot, id: number): void {
    if (!this.entry(id)) throw new Error(`no history entry ${id}`);
    this.ab[slot] = id;
  }

  /** Flip the active slot and return its stored entry, no network. */
  toggleAb(): HistoryEntry | null {
    this.activeSlot = this.activeSlot === "a" ? "b" : "a";
    const id = this.ab[this.activeSlot];
    return id === null ? null : this.entry(id) ?? null;
  }

  currentAb(): HistoryEntry | null {
    const id = this.ab[this.activeSlot];
    return id === null ? null : this.entry(id) ?? null;
  }
}
