/** Token parsing for playback: names to MIDI numbers and frequencies.
 *
 * Mirrors the service's token spelling (letter, optional accidentals,
 * octave; "R" is a rest). Only used to drive the synthesizer; every
 * probability or temperature shown in the UI comes from the service.
 */

const LETTER_PC: Record<string, number> = {
  C: 0,
  D: 2,
  E: 4,
  F: 5,
  G: 7,
  A: 9,
  B: 11,
};

const PITCH_RE = /^([A-G])(#{1,2}|b{1,2})?(-?\d+)$/;

export const REST_TOKEN = "R";

/** MIDI number for a pitch token, or null for a rest. Throws on junk. */
export function pitchToMidi(token: string): number | null {
  if (token === REST_TOKEN) return null;
  const m = PITCH_RE.exec(token);
  if (!m) throw new Error(`cannot parse pitch token '${token}'`);
  const [, letter, accidental, octave] = m;
  let alter = 0;
  if (accidental) alter = accidental[0] === "#" ? accidental.length : -accidental.length;
  return (Number(octave) + 1) * 12 + LETTER_PC[letter] + alter;
}

/** Equal-tempered frequency, A4 = 440 Hz. */
export function midiToFrequency(midi: number): number {
  return 440 * Math.pow(2, (midi - 69) / 12);
}

/** Quarter-length text ("1", "1/2", "0.75") to a number. */
export function parseDuration(text: string | number): number {
  if (typeof text === "number") {
    if (!Number.isFinite(text) || text <= 0) throw new Error(`bad duration ${text}`);
    return text;
  }
  const slash = text.indexOf("/");
  let value: number;
  if (slash >= 0) {
    const num = Number(text.slice(0, slash));
    const den = Number(text.slice(slash + 1));
    value = num / den;
  } else {
    value = Number(text);
  }
  if (!Number.isFinite(value) || value <= 0) {
    throw new Error(`cannot parse duration '${text}'`);
  }
  return value;
}
