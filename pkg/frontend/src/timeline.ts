/** Year timeline: one tick per year, colored by duration temperature. */

import { rampWhiteRed } from "./colors.js";
import type { YearRow } from "./types.js";

export interface TimelineHandlers {
  onPick: (year: number) => void;
  onRange: (from: number, to: number) => void;
}

/**
 * Render the year strip. Click selects a single year; click-drag
 * across several ticks selects an inclusive range for range mode.
 */
export function renderTimeline(
  host: HTMLElement,
  rows: YearRow[],
  handlers: TimelineHandlers
): void {
  host.textContent = "";
  const strip = document.createElement("div");
  strip.className = "timeline";
  let dragStart: number | null = null;
  let dragEnd: number | null = null;

  const ticks = new Map<number, HTMLElement>();
  for (const row of rows) {
    const tick = document.createElement("button");
    tick.type = "button";
    tick.className = "tick";
    tick.dataset.year = String(row.year);
    tick.style.backgroundColor = rampWhiteRed(row.duration_temperature, 1);
    tick.title = `${row.year}: T_pitch=${row.pitch_temperature.toFixed(
      3
    )} T_dur=${row.duration_temperature.toFixed(3)}`;
    ticks.set(row.year, tick);
    strip.appendChild(tick);
  }

  const paint = () => {
    for (const [year, tick] of ticks) {
      const inDrag =
        dragStart !== null &&
        dragEnd !== null &&
        year >= Math.min(dragStart, dragEnd) &&
        year <= Math.max(dragStart, dragEnd);
      tick.classList.toggle("drag", inDrag);
    }
  };

  strip.addEventListener("pointerdown", (ev) => {
    const year = tickYear(ev.target);
    if (year === null) return;
    dragStart = year;
    dragEnd = year;
    strip.setPointerCapture(ev.pointerId);
    paint();
  });
  strip.addEventListener("pointermove", (ev) => {
    if (dragStart === null) return;
    const el = document.elementFromPoint(ev.clientX, ev.clientY);
    const year = tickYear(el);
    if (year !== null && year !== dragEnd) {
      dragEnd = year;
      paint();
    }
  });
  strip.addEventListener("pointerup", () => {
    if (dragStart === null || dragEnd === null) return;
    const lo = Math.min(dragStart, dragEnd);
    const hi = Math.max(dragStart, dragEnd);
    dragStart = null;
    dragEnd = null;
    paint();
    if (lo === hi) handlers.onPick(lo);
    else handlers.onRange(lo, hi);
  });

  host.appendChild(strip);
}

function tickYear(target: EventTarget | Element | null): number | null {
  if (!(target instanceof HTMLElement)) return null;
  if (!target.classList.contains("tick")) return null;
  const year = Number(target.dataset.year);
  return Number.isInteger(year) ? year : null;
}

/** Mark the currently selected year on an already rendered strip. */
export function markSelection(host: HTMLElement, year: number | null): void {
  for (const tick of host.querySelectorAll<HTMLElement>(".tick")) {
    tick.classList.toggle("selected", tick.dataset.year === String(year));
  }
}
