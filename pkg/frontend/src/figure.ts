/** Series computation and SVG rendering for the two-panel convergence
 * figure: relative energy error and gradient H1 norm versus iteration,
 * both on a log scale.
 */

import { TraceRow } from "./trace.js";

/** Values below this magnitude are clamped before taking logarithms. */
export const LOG_FLOOR = 1e-16;

export interface LabeledTrace {
  label: string;
  rows: TraceRow[];
}

export interface ErrorPoint {
  iter: number;
  /** Signed relative error (energy - eRef) / |eRef| at full precision. */
  value: number;
  /** Magnitude used for plotting, clamped at LOG_FLOOR. */
  magnitude: number;
  /** True when the iterate energy lies below the reference. */
  negative: boolean;
}

export interface GradPoint {
  iter: number;
  magnitude: number;
}

export function errorSeries(rows: TraceRow[], eRef: number): ErrorPoint[] {
  if (!Number.isFinite(eRef) || eRef === 0) {
    throw new Error(`reference energy must be finite and nonzero, got ${eRef}`);
  }
  return rows.map((row) => {
    const value = (row.energy - eRef) / Math.abs(eRef);
    return {
      iter: row.iter,
      value,
      magnitude: Math.max(Math.abs(value), LOG_FLOOR),
      negative: value < 0,
    };
  });
}

export function gradSeries(rows: TraceRow[]): GradPoint[] {
  return rows.map((row) => ({
    iter: row.iter,
    magnitude: Math.max(row.gradH1, LOG_FLOOR),
  }));
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const PANEL = { width: 430, height: 330, top: 46, gap: 80, left: 62, bottom: 46 };

interface Scale {
  x(iter: number): number;
  y(magnitude: number): number;
}

function makeScale(
  x0: number,
  iterMax: number,
  logMin: number,
  logMax: number,
): Scale {
  const { width, height, top } = PANEL;
  return {
    x: (iter) => x0 + (width * iter) / Math.max(iterMax, 1),
    y: (magnitude) => {
      const t = (Math.log10(magnitude) - logMin) / (logMax - logMin);
      return top + height * (1 - t);
    },
  };
}

function decadeTicks(logMin: number, logMax: number): number[] {
  const ticks: number[] = [];
  const step = Math.max(1, Math.round((logMax - logMin) / 8));
  for (let d = Math.ceil(logMin); d <= Math.floor(logMax); d += step) {
    ticks.push(d);
  }
  return ticks;
}

function panelSvg(
  x0: number,
  title: string,
  series: { label: string; points: { iter: number; magnitude: number; negative?: boolean }[] }[],
  threshold?: number,
): string {
  const { width, height, top } = PANEL;
  const iterMax = Math.max(...series.flatMap((s) => s.points.map((p) => p.iter)));
  const mags = series.flatMap((s) => s.points.map((p) => p.magnitude));
  if (threshold !== undefined) mags.push(threshold);
  let logMin = Math.floor(Math.log10(Math.min(...mags)));
  let logMax = Math.ceil(Math.log10(Math.max(...mags)));
  if (logMax <= logMin) logMax = logMin + 1;
  const scale = makeScale(x0, iterMax, logMin, logMax);

  const parts: string[] = [];
  parts.push(
    `<rect x="${x0}" y="${top}" width="${width}" height="${height}" fill="none" stroke="#333"/>`,
  );
  parts.push(
    `<text x="${x0 + width / 2}" y="${top - 14}" text-anchor="middle" font-size="15">${title}</text>`,
  );
  for (const d of decadeTicks(logMin, logMax)) {
    const y = scale.y(10 ** d);
    parts.push(
      `<line x1="${x0}" y1="${y}" x2="${x0 + width}" y2="${y}" stroke="#ddd" stroke-width="0.5"/>`,
      `<text x="${x0 - 6}" y="${y + 4}" text-anchor="end" font-size="11">1e${d}</text>`,
    );
  }
  const nXTicks = Math.min(iterMax, 8);
  for (let i = 0; i <= nXTicks; i++) {
    const iter = Math.round((iterMax * i) / Math.max(nXTicks, 1));
    const x = scale.x(iter);
    parts.push(
      `<line x1="${x}" y1="${top + height}" x2="${x}" y2="${top + height + 4}" stroke="#333"/>`,
      `<text x="${x}" y="${top + height + 18}" text-anchor="middle" font-size="11">${iter}</text>`,
    );
  }
  parts.push(
    `<text x="${x0 + width / 2}" y="${top + height + 36}" text-anchor="middle" font-size="13">iteration</text>`,
  );
  if (threshold !== undefined) {
    const y = scale.y(threshold);
    parts.push(
      `<line class="threshold" x1="${x0}" y1="${y}" x2="${x0 + width}" y2="${y}" stroke="#555" stroke-dasharray="6,4"/>`,
    );
  }
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const path = s.points
      .map((p) => `${scale.x(p.iter).toFixed(2)},${scale.y(p.magnitude).toFixed(2)}`)
      .join(" ");
    parts.push(
      `<polyline class="series" data-label="${s.label}" points="${path}" fill="none" stroke="${color}" stroke-width="1.6"/>`,
    );
    // iterates below the reference get an open-circle marker
    for (const p of s.points) {
      if (p.negative) {
        parts.push(
          `<circle class="below-reference" cx="${scale.x(p.iter).toFixed(2)}" cy="${scale
            .y(p.magnitude)
            .toFixed(2)}" r="3.2" fill="white" stroke="${color}"/>`,
        );
      }
    }
  });
  return parts.join("\n");
}

export function renderFigure(
  traces: LabeledTrace[],
  eRef: number,
  threshold: number,
): string {
  if (traces.length === 0) {
    throw new Error("at least one trace is required");
  }
  const errorPanel = traces.map((t) => ({
    label: t.label,
    points: errorSeries(t.rows, eRef),
  }));
  const gradPanel = traces.map((t) => ({
    label: t.label,
    points: gradSeries(t.rows),
  }));

  const totalWidth = 2 * PANEL.width + PANEL.left + PANEL.gap + 24;
  const totalHeight = PANEL.top + PANEL.height + PANEL.bottom + 24 * (traces.length > 1 ? 1 : 1);
  const legend = traces
    .map((t, i) => {
      const color = PALETTE[i % PALETTE.length];
      const x = PANEL.left + 110 * i;
      const y = totalHeight - 8;
      return (
        `<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" stroke="${color}" stroke-width="2"/>` +
        `<text class="legend" x="${x + 28}" y="${y}" font-size="12">${t.label}</text>`
      );
    })
    .join("\n");

  const left = panelSvg(PANEL.left, "relative energy error", errorPanel, threshold);
  const right = panelSvg(
    PANEL.left + PANEL.width + PANEL.gap,
    "gradient H1 norm",
    gradPanel,
  );
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${totalWidth}" height="${totalHeight + 16}" font-family="sans-serif">`,
    `<rect width="100%" height="100%" fill="white"/>`,
    left,
    right,
    legend,
    `</svg>`,
    ``,
  ].join("\n");
}
