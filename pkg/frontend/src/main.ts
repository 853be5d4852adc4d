/** Page wiring: form, timeline, playback, heatmaps, history, A/B. */

import { ApiError, getModel, getYears, postGenerate } from "./api.js";
import { attentionSpec, candidateSpec, renderHeatmap } from "./heatmap.js";
import { MelodyPlayer } from "./player.js";
import { renderSeedGrid } from "./seedgrid.js";
import { HistoryEntry, SessionState } from "./state.js";
import { markSelection, renderTimeline } from "./timeline.js";
import type { ApiQuery, YearRow } from "./types.js";

function $<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const state = new SessionState();
const player = new MelodyPlayer();
let inflight: AbortController | null = null;
let current: HistoryEntry | null = null;
let years: YearRow[] = [];

const banner = $<HTMLDivElement>("banner");
const bannerText = $<HTMLSpanElement>("banner-text");
const statusEl = $<HTMLParagraphElement>("status");
const gestureNote = $<HTMLParagraphElement>("gesture-note");
const hoverReadout = $<HTMLParagraphElement>("hover-readout");

function setStatus(text: string): void {
  statusEl.textContent = text;
}

function setBanner(message: string | null): void {
  banner.hidden = message === null;
  if (message !== null) bannerText.textContent = message;
}

function intOrNull(value: string): number | null {
  const t = value.trim();
  if (t === "") return null;
  const n = Number(t);
  return Number.isInteger(n) ? n : null;
}

function floatOrNull(value: string): number | null {
  const t = value.trim();
  if (t === "") return null;
  const n = Number(t);
  return Number.isFinite(n) ? n : null;
}

function bpm(): number {
  const n = Number($<HTMLInputElement>("bpm").value);
  return Number.isFinite(n) && n > 0 ? n : 90;
}

/* form <-> state */

function syncFormFromState(): void {
  $<HTMLInputElement>("year").value = String(state.year);
  $<HTMLInputElement>("mxx").value = String(state.mxx);
  $<HTMLInputElement>("mxl").value = String(state.mxl);
  $<HTMLInputElement>("rng-seed").value =
    state.rngSeed === null ? "" : String(state.rngSeed);
  $<HTMLInputElement>("pitch-override").value =
    state.pitchOverride === null ? "" : String(state.pitchOverride);
  $<HTMLInputElement>("duration-override").value =
    state.durationOverride === null ? "" : String(state.durationOverride);
  renderSeedGrid(
    $("seedgrid"),
    { pitches: state.seedPitches, durations: state.seedDurations },
    (next) => {
      state.seedPitches = next.pitches;
      state.seedDurations = next.durations;
    }
  );
  markSelection($("timeline"), state.year);
}

function readFormIntoState(): void {
  state.year = intOrNull($<HTMLInputElement>("year").value) ?? state.year;
  state.mxx = intOrNull($<HTMLInputElement>("mxx").value) ?? state.mxx;
  state.mxl = intOrNull($<HTMLInputElement>("mxl").value) ?? state.mxl;
  state.rngSeed = intOrNull($<HTMLInputElement>("rng-seed").value);
  state.pitchOverride = floatOrNull($<HTMLInputElement>("pitch-override").value);
  state.durationOverride = floatOrNull(
    $<HTMLInputElement>("duration-override").value
  );
}

/* result rendering */

function renderMelody(entry: HistoryEntry): void {
  const host = $("melody");
  host.textContent = "";
  const table = document.createElement("table");
  table.className = "melody";
  const pitchRow = table.insertRow();
  const durRow = table.insertRow();
  const labelP = document.createElement("th");
  labelP.textContent = "pitch";
  pitchRow.appendChild(labelP);
  const labelD = document.createElement("th");
  labelD.textContent = "duration";
  durRow.appendChild(labelD);
  entry.response.melody.forEach(([p, d], i) => {
    const seed = i < entry.response.seed_length;
    const tp = pitchRow.insertCell();
    tp.textContent = p;
    const td = durRow.insertCell();
    td.textContent = d;
    if (seed) {
      tp.className = "seed";
      td.className = "seed";
    }
  });
  host.appendChild(table);
}

function renderResult(entry: HistoryEntry): void {
  current = entry;
  const r = entry.response;
  $("result").hidden = false;
  $("result-meta").textContent =
    `year ${r.year} · T_pitch=${r.temperatures.pitch.toFixed(6)} ` +
    `T_dur=${r.temperatures.duration.toFixed(6)} · rng ${r.rng_seed} · ` +
    `${r.melody.length - r.seed_length} generated of ${r.melody.length} events`;
  const link = $<HTMLAnchorElement>("midi-link");
  link.href = r.midi_url;
  link.textContent = `download MIDI (${r.year}_${r.rng_seed}.mid)`;
  renderMelody(entry);
  const onHover = (text: string) => {
    hoverReadout.textContent = text;
  };
  renderHeatmap($("attention"), attentionSpec(r.attention, r.sql), onHover);
  renderHeatmap(
    $("pitch-cands"),
    candidateSpec(r.pitch_candidates.tokens, r.pitch_candidates.rows, "pitch"),
    onHover
  );
  renderHeatmap(
    $("duration-cands"),
    candidateSpec(
      r.duration_candidates.tokens,
      r.duration_candidates.rows,
      "duration"
    ),
    onHover
  );
}

/* history + A/B */

function slotLabel(slot: "a" | "b"): string {
  const id = state.ab[slot];
  if (id === null) return "empty";
  const entry = state.entry(id);
  if (!entry) return "empty";
  return `#${entry.id} year ${entry.response.year} rng ${entry.response.rng_seed}`;
}

function renderAb(): void {
  $("slot-a").textContent = slotLabel("a");
  $("slot-b").textContent = slotLabel("b");
  $("ab-active").textContent = state.activeSlot.toUpperCase();
}

function renderHistory(): void {
  const host = $("history");
  host.textContent = "";
  for (const entry of state.history) {
    const li = document.createElement("li");
    const label = document.createElement("span");
    label.textContent =
      `#${entry.id} year ${entry.response.year} rng ${entry.response.rng_seed} ` +
      `(${entry.response.melody.length} events)`;
    li.appendChild(label);
    li.appendChild(
      actionButton("show", () => {
        player.stop();
        renderResult(entry);
        setStatus(`showing stored result #${entry.id}`);
      })
    );
    li.appendChild(
      actionButton("replay", () => {
        void submit(state.replayQuery(entry.id), `replay #${entry.id}`);
      })
    );
    li.appendChild(
      actionButton("load", () => {
        state.loadEntry(entry.id);
        syncFormFromState();
        setStatus(`form loaded from #${entry.id}`);
      })
    );
    li.appendChild(
      actionButton("A", () => {
        state.assignAb("a", entry.id);
        renderAb();
      })
    );
    li.appendChild(
      actionButton("B", () => {
        state.assignAb("b", entry.id);
        renderAb();
      })
    );
    host.appendChild(li);
  }
}

function actionButton(text: string, onClick: () => void): HTMLButtonElement {
  const btn = document.createElement("button");
  btn.type = "button";
  btn.textContent = text;
  btn.addEventListener("click", onClick);
  return btn;
}

/* requests */

async function submit(query: ApiQuery, label: string): Promise<void> {
  inflight?.abort();
  const controller = new AbortController();
  inflight = controller;
  setStatus(`generating ${label} …`);
  try {
    const response = await postGenerate(query, controller.signal);
    if (controller.signal.aborted) return;
    const entry = state.record(query, response);
    renderResult(entry);
    renderHistory();
    setStatus(`done: ${label}`);
    setBanner(null);
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") return;
    if (err instanceof ApiError) {
      setStatus(`error ${err.status || ""}: ${err.message}`.trim());
    } else {
      setBanner("service unreachable; is the server running?");
      setStatus("request failed");
    }
  } finally {
    if (inflight === controller) inflight = null;
  }
}

async function submitRange(from: number, to: number): Promise<void> {
  inflight?.abort();
  const controller = new AbortController();
  inflight = controller;
  let base = state.rngSeed;
  try {
    for (let year = from; year <= to; year += 1) {
      if (controller.signal.aborted) return;
      readFormIntoState();
      const query = state.buildQuery();
      query.year = year;
      if (base !== null) query.rng_seed = base + (year - from);
      else delete query.rng_seed;
      setStatus(`generating year ${year} of ${from}–${to} …`);
      const response = await postGenerate(query, controller.signal);
      if (base === null) base = response.rng_seed - (year - from);
      const entry = state.record(query, response);
      renderResult(entry);
      renderHistory();
    }
    setStatus(`range ${from}–${to} done`);
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") return;
    if (err instanceof ApiError) {
      setStatus(`error ${err.status || ""}: ${err.message}`.trim());
    } else {
      setBanner("service unreachable; is the server running?");
      setStatus("range request failed");
    }
  } finally {
    if (inflight === controller) inflight = null;
  }
}

/* playback */

async function playEntry(entry: HistoryEntry): Promise<void> {
  const outcome = await player.play(entry.response.melody, bpm());
  gestureNote.hidden = outcome !== "blocked";
  if (outcome === "blocked") {
    setStatus("audio is blocked until you interact; press play again");
  }
}

/* boot */

async function boot(): Promise<void> {
  try {
    const [yearRows, card] = await Promise.all([getYears(), getModel()]);
    years = yearRows;
    setBanner(null);
    $("model-card").textContent =
      `model: hidden ${card.hidden}, sql ${card.sql}, ` +
      `${card.pitch_vocab_size}×${card.duration_vocab_size} vocab · ` +
      `checkpoint ${String(card.checkpoint_sha256).slice(0, 12)}`;
    renderTimeline($("timeline"), years, {
      onPick: (year) => {
        state.year = year;
        state.rangeSelection = null;
        $<HTMLInputElement>("year").value = String(year);
        $("range-label").textContent = "no range selected";
        markSelection($("timeline"), year);
      },
      onRange: (from, to) => {
        state.rangeSelection = { from, to };
        $("range-label").textContent = `${from}–${to} (${to - from + 1} years)`;
      },
    });
    markSelection($("timeline"), state.year);
    setStatus(`ready; ${years.length} years loaded`);
  } catch {
    setBanner("service unreachable; start the server and retry");
    setStatus("offline");
  }
}

function wire(): void {
  syncFormFromState();
  $("retry").addEventListener("click", () => void boot());
  $("generate").addEventListener("click", () => {
    readFormIntoState();
    void submit(state.buildQuery(), `year ${state.year}`);
  });
  $("cancel").addEventListener("click", () => {
    inflight?.abort();
    inflight = null;
    setStatus("cancelled");
  });
  $("range-run").addEventListener("click", () => {
    if (state.rangeSelection === null) {
      setStatus("drag across the timeline to select a range first");
      return;
    }
    void submitRange(state.rangeSelection.from, state.rangeSelection.to);
  });
  $("play").addEventListener("click", () => {
    if (current) void playEntry(current);
    else setStatus("nothing to play yet");
  });
  $("stop").addEventListener("click", () => {
    player.stop();
  });
  $("ab-toggle").addEventListener("click", () => {
    const entry = state.toggleAb();
    renderAb();
    if (entry === null) {
      setStatus(`slot ${state.activeSlot.toUpperCase()} is empty`);
      return;
    }
    player.stop();
    renderResult(entry);
    setStatus(`A/B: playing stored slot ${state.activeSlot.toUpperCase()}`);
    void playEntry(entry);
  });
  renderAb();
  void boot();
}

document.addEventListener("DOMContentLoaded", wire);
