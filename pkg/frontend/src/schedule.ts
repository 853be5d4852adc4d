/** Pure playback planning: melody events to a seconds timeline. */

import { midiToFrequency, parseDuration, pitchToMidi } from "./notes.js";

export interface ScheduledEvent {
  token: string;
  durationToken: string;
  ql: number;
  /** null for rests */
  frequency: number | null;
  /** onset in seconds from playback start */
  start: number;
  seconds: number;
}

export interface PlaybackPlan {
  events: ScheduledEvent[];
  totalSeconds: number;
}

/** Lay the melody on a wall-clock grid at the given tempo. */
export function buildPlan(
  melody: ReadonlyArray<readonly [string, string]>,
  bpm: number
): PlaybackPlan {
  if (!(bpm > 0)) throw new Error(`bad tempo ${bpm}`);
  const secondsPerQuarter = 60 / bpm;
  const events: ScheduledEvent[] = [];
  let clock = 0;
  for (const [token, durationToken] of melody) {
    const ql = parseDuration(durationToken);
    const midi = pitchToMidi(token);
    const seconds = ql * secondsPerQuarter;
    events.push({
      token,
      durationToken,
      ql,
      frequency: midi === null ? null : midiToFrequency(midi),
      start: clock,
      seconds,
    });
    clock += seconds;
  }
  return { events, totalSeconds: clock };
}
