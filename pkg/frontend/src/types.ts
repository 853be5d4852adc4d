/** JSON shapes of the sonification service. */

export interface YearRow {
  year: number;
  pitch_temperature: number;
  duration_temperature: number;
}

/** Body of POST /api/generate. Seed is two parallel arrays. */
export interface ApiQuery {
  year: number;
  seed_pitches: string[];
  seed_durations: string[];
  mxx: number;
  mxl: number;
  rng_seed?: number | null;
  pitch_temperature?: number | null;
  duration_temperature?: number | null;
}

export interface CandidateGrid {
  tokens: string[];
  rows: number[][];
}

export interface GenerateResponse {
  year: number;
  rng_seed: number;
  sql: number;
  seed_length: number;
  temperatures: { pitch: number; duration: number };
  melody: [string, string][];
  attention: number[][];
  pitch_candidates: CandidateGrid;
  duration_candidates: CandidateGrid;
  midi_url: string;
}

export interface ModelCard {
  hidden: number;
  sql: number;
  d_pitch: number;
  d_duration: number;
  optimizer: string;
  pitch_vocab_size: number;
  duration_vocab_size: number;
  pitch_vocab_hash: string;
  duration_vocab_hash: string;
  checkpoint_sha256: string;
  snapshot_sha256: string;
  history: {
    best_epoch: number;
    stopped_epoch: number;
    epochs: number;
    best_val_loss: number | null;
  } | null;
}
