/** Probability heat-map rendering for attention and candidate grids. */

import { exactProb, formatProb, matrixMax, rampWhiteRed } from "./colors.js";

export interface HeatmapSpec {
  /** Row labels, one per matrix row after orientation. */
  rowLabels: string[];
  /** Column labels, one per matrix column after orientation. */
  colLabels: string[];
  /** Matrix in [row][col] orientation. */
  rows: number[][];
  /** Caption under the table. */
  caption: string;
}

/** Transpose a rectangular matrix. */
export function transpose(rows: number[][]): number[][] {
  if (rows.length === 0) return [];
  const width = rows[0].length;
  const out: number[][] = [];
  for (let c = 0; c < width; c += 1) {
    out.push(rows.map((r) => r[c]));
  }
  return out;
}

/**
 * Attention comes back as one row per generated step over `sql` window
 * positions; lay it out with window position down the side and step
 * across the top so both heat maps share the step axis.
 */
export function attentionSpec(attention: number[][], sql: number): HeatmapSpec {
  return {
    rowLabels: Array.from({ length: sql }, (_, i) => `w${i}`),
    colLabels: attention.map((_, i) => `s${i + 1}`),
    rows: transpose(attention),
    caption: "attention weight by window position and generation step",
  };
}

/** Candidate grid: one row per vocabulary token, one column per step. */
export function candidateSpec(
  tokens: string[],
  rows: number[][],
  head: string
): HeatmapSpec {
  return {
    rowLabels: tokens,
    colLabels: rows.map((_, i) => `s${i + 1}`),
    rows: transpose(rows),
    caption: `${head} candidate probability by token and generation step`,
  };
}

/**
 * Render a spec into `host` as a table. Each cell carries its exact
 * probability in a data attribute; hovering reports it through
 * `onHover` so the page can show the full value, not the rounded one.
 */
export function renderHeatmap(
  host: HTMLElement,
  spec: HeatmapSpec,
  onHover: (text: string) => void
): void {
  host.textContent = "";
  const max = matrixMax(spec.rows);
  const table = document.createElement("table");
  table.className = "heatmap";

  const head = table.createTHead().insertRow();
  head.appendChild(document.createElement("th"));
  for (const label of spec.colLabels) {
    const th = document.createElement("th");
    th.textContent = label;
    head.appendChild(th);
  }

  const body = table.createTBody();
  spec.rows.forEach((row, r) => {
    const tr = body.insertRow();
    const th = document.createElement("th");
    th.textContent = spec.rowLabels[r];
    tr.appendChild(th);
    row.forEach((value, c) => {
      const td = tr.insertCell();
      td.style.backgroundColor = rampWhiteRed(value, max);
      td.title = formatProb(value);
      td.dataset.exact = exactProb(value);
      td.addEventListener("mouseenter", () => {
        onHover(
          `${spec.rowLabels[r]} × ${spec.colLabels[c]} = ${exactProb(value)}`
        );
      });
    });
  });

  const caption = table.createCaption();
  caption.textContent = spec.caption;
  host.appendChild(table);
}
