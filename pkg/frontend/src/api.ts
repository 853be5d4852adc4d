/** Typed fetch layer over the service with structural validation. */

import type {
  ApiQuery,
  CandidateGrid,
  GenerateResponse,
  ModelCard,
  YearRow,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, detail: unknown) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

function isRecord(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

function isNumberMatrix(x: unknown): x is number[][] {
  return (
    Array.isArray(x) &&
    x.every((row) => Array.isArray(row) && row.every((v) => typeof v === "number"))
  );
}

function bad(message: string): never {
  throw new ApiError(0, `malformed service response: ${message}`);
}

export function validateYears(raw: unknown): YearRow[] {
  if (!Array.isArray(raw) || raw.length === 0) bad("years must be a non-empty array");
  for (const row of raw) {
    if (!isRecord(row)) bad("year row is not an object");
    for (const key of ["year", "pitch_temperature", "duration_temperature"]) {
      if (typeof row[key] !== "number") bad(`year row missing numeric ${key}`);
    }
  }
  const rows = raw as unknown as YearRow[];
  for (let i = 1; i < rows.length; i++) {
    if (rows[i].year <= rows[i - 1].year) bad("years are not strictly ascending");
  }
  return rows;
}

function validateGrid(raw: unknown, steps: number, label: string): CandidateGrid {
  if (!isRecord(raw)) bad(`${label} is not an object`);
  const tokens = raw.tokens;
  const rows = raw.rows;
  if (!Array.isArray(tokens) || !tokens.every((t) => typeof t === "string")) {
    bad(`${label}.tokens must be strings`);
  }
  if (!isNumberMatrix(rows)) bad(`${label}.rows must be a number matrix`);
  if (rows.length !== steps) bad(`${label} has ${rows.length} rows for ${steps} steps`);
  for (const row of rows) {
    if (row.length !== tokens.length) bad(`${label} row width != token count`);
  }
  return { tokens: tokens as string[], rows };
}

/** Shape-check a generate response; dimensions must be coherent. */
export function validateGenerate(raw: unknown): GenerateResponse {
  if (!isRecord(raw)) bad("response is not an object");
  const melody = raw.melody;
  if (
    !Array.isArray(melody) ||
    !melody.every(
      (e) =>
        Array.isArray(e) &&
        e.length === 2 &&
        typeof e[0] === "string" &&
        typeof e[1] === "string"
    )
  ) {
    bad("melody must be [pitch, duration] string pairs");
  }
  const seedLength = raw.seed_length;
  const sql = raw.sql;
  const year = raw.year;
  const rngSeed = raw.rng_seed;
  const midiUrl = raw.midi_url;
  const attention = raw.attention;
  const temperatures = raw.temperatures;
  if (typeof seedLength !== "number" || typeof sql !== "number") {
    bad("missing seed_length/sql");
  }
  if (typeof year !== "number" || typeof rngSeed !== "number") {
    bad("missing year/rng_seed");
  }
  if (typeof midiUrl !== "string") bad("missing midi_url");
  const steps = melody.length - seedLength;
  if (steps < 0) bad("seed_length exceeds melody length");
  if (!isNumberMatrix(attention)) bad("attention must be a number matrix");
  if (attention.length !== steps) {
    bad(`attention has ${attention.length} rows for ${steps} generated steps`);
  }
  for (const row of attention) {
    if (row.length !== sql) bad("attention row width != sql");
  }
  if (
    !isRecord(temperatures) ||
    typeof temperatures.pitch !== "number" ||
    typeof temperatures.duration !== "number"
  ) {
    bad("missing temperatures");
  }
  const pitch = validateGrid(raw.pitch_candidates, steps, "pitch_candidates");
  const duration = validateGrid(raw.duration_candidates, steps, "duration_candidates");
  return {
    year,
    rng_seed: rngSeed,
    sql,
    seed_length: seedLength,
    temperatures: { pitch: temperatures.pitch, duration: temperatures.duration },
    melody: melody as [string, string][],
    attention,
    pitch_candidates: pitch,
    duration_candidates: duration,
    midi_url: midiUrl,
  };
}

export function validateModel(raw: unknown): ModelCard {
  if (!isRecord(raw)) bad("model card is not an object");
  for (const key of ["hidden", "sql", "pitch_vocab_size", "duration_vocab_size"]) {
    if (typeof raw[key] !== "number") bad(`model card missing numeric ${key}`);
  }
  return raw as unknown as ModelCard;
}

async function request<T>(
  url: string,
  validate: (raw: unknown) => T,
  fetchFn: FetchLike,
  init?: RequestInit
): Promise<T> {
  const resp = await fetchFn(url, init);
  const body: unknown = await resp.json();
  if (!resp.ok) {
    const detail = isRecord(body) && "detail" in body ? body.detail : body;
    throw new ApiError(resp.status, detail);
  }
  return validate(body);
}

export function getYears(fetchFn: FetchLike = fetch): Promise<YearRow[]> {
  return request("/api/years", validateYears, fetchFn);
}

export function getModel(fetchFn: FetchLike = fetch): Promise<ModelCard> {
  return request("/api/model", validateModel, fetchFn);
}

export function postGenerate(
  query: ApiQuery,
  signal?: AbortSignal,
  fetchFn: FetchLike = fetch
): Promise<GenerateResponse> {
  return request("/api/generate", validateGenerate, fetchFn, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(query),
    signal,
  });
}
