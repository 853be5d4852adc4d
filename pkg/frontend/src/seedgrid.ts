/** Two-row seed editor: pitch tokens on top, duration tokens below. */

import { parseDuration, pitchToMidi } from "./notes.js";

export interface SeedGridModel {
  pitches: string[];
  durations: string[];
}

/**
 * Render the editable seed grid into `host`. Each column is one seed
 * event; columns can be appended or removed from the right. `onChange`
 * fires after every accepted edit with the new token arrays.
 */
export function renderSeedGrid(
  host: HTMLElement,
  model: SeedGridModel,
  onChange: (next: SeedGridModel) => void
): void {
  host.textContent = "";
  const table = document.createElement("table");
  table.className = "seedgrid";
  const pitchRow = table.insertRow();
  const durRow = table.insertRow();
  labelCell(pitchRow, "pitch");
  labelCell(durRow, "duration");

  const commit = () => {
    const pitches: string[] = [];
    const durations: string[] = [];
    for (const input of table.querySelectorAll<HTMLInputElement>("input.pitch")) {
      pitches.push(input.value.trim());
    }
    for (const input of table.querySelectorAll<HTMLInputElement>("input.dur")) {
      durations.push(input.value.trim());
    }
    onChange({ pitches, durations });
  };

  const addColumn = (pitch: string, duration: string) => {
    const p = tokenInput("pitch", pitch, validatePitch);
    const d = tokenInput("dur", duration, validateDuration);
    p.addEventListener("change", commit);
    d.addEventListener("change", commit);
    pitchRow.insertCell().appendChild(p);
    durRow.insertCell().appendChild(d);
  };

  for (let i = 0; i < model.pitches.length; i += 1) {
    addColumn(model.pitches[i], model.durations[i] ?? "1");
  }

  host.appendChild(table);

  const controls = document.createElement("div");
  controls.className = "seedgrid-controls";
  const add = document.createElement("button");
  add.type = "button";
  add.textContent = "+ event";
  add.addEventListener("click", () => {
    addColumn("A4", "1");
    commit();
  });
  const drop = document.createElement("button");
  drop.type = "button";
  drop.textContent = "− event";
  drop.addEventListener("click", () => {
    if (pitchRow.cells.length <= 1) return;
    pitchRow.deleteCell(pitchRow.cells.length - 1);
    durRow.deleteCell(durRow.cells.length - 1);
    commit();
  });
  controls.append(add, drop);
  host.appendChild(controls);
}

function labelCell(row: HTMLTableRowElement, text: string): void {
  const th = document.createElement("th");
  th.textContent = text;
  row.appendChild(th);
}

function tokenInput(
  cls: string,
  value: string,
  validate: (token: string) => boolean
): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "text";
  input.className = cls;
  input.value = value;
  input.size = 4;
  input.addEventListener("input", () => {
    input.classList.toggle("invalid", !validate(input.value.trim()));
  });
  return input;
}

function validatePitch(token: string): boolean {
  if (token === "") return false;
  try {
    pitchToMidi(token);
    return true;
  } catch {
    return false;
  }
}

function validateDuration(token: string): boolean {
  if (token === "") return false;
  try {
    parseDuration(token);
    return true;
  } catch {
    return false;
  }
}
