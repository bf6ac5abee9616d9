/** Pure view-data preparation: heatmap pixels, row cuts, chart series, CSV. */

import type { Grid, ResolutionPoint } from "./api.js";

/**
 * Map a visibility grid to grayscale RGBA on a fixed [0, 1] scale.
 * Visibility is physically bounded, so the scale never adapts to the data;
 * values outside the range are clamped.
 */
export function heatmapRgba(grid: Grid): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(new ArrayBuffer(grid.width * grid.height * 4));
  for (let i = 0; i < grid.values.length; i++) {
    const v = Math.min(1, Math.max(0, grid.values[i]));
    const level = Math.round(v * 255);
    out[i * 4] = level;
    out[i * 4 + 1] = level;
    out[i * 4 + 2] = level;
    out[i * 4 + 3] = 255;
  }
  return out;
}

export interface RowCut {
  /** pixel-center x positions in micrometers */
  x: number[];
  values: number[];
  row: number;
}

/** Extract one row of the grid; defaults to the center cut. */
export function rowCut(grid: Grid, row?: number): RowCut {
  const r = row === undefined ? Math.floor(grid.height / 2) : row;
  if (r < 0 || r >= grid.height) throw new Error(`row ${r} outside grid`);
  const x: number[] = [];
  const values: number[] = [];
  for (let i = 0; i < grid.width; i++) {
    x.push((i - (grid.width - 1) / 2) * grid.pitchUm);
    values.push(grid.values[r * grid.width + i]);
  }
  return { x, values, row: r };
}

export interface ChartSeries {
  label: string;
  points: { x: number; y: number }[];
  /** waists whose search failed, rendered as markers */
  failures: number[];
}

export function resolutionSeries(points: ResolutionPoint[], label: string): ChartSeries {
  const series: ChartSeries = { label, points: [], failures: [] };
  for (const p of points) {
    if (p.error !== undefined || p.d_limit_um === undefined) {
      series.failures.push(p.waist_um);
    } else {
      series.points.push({ x: p.waist_um, y: p.d_limit_um });
    }
  }
  return series;
}

/**
 * CSV export of a resolution response.  The service already ships the CSV
 * rendering of the curve; exporting its bytes untouched keeps the file
 * identical to what the service computed.
 */
export function resolutionCsv(response: { csv: string }): string {
  return response.csv;
}

/** Magnification readout, e.g. "M = 1.045". */
export function formatMagnification(m: number): string {
  return `M = ${m.toFixed(3)}`;
}
