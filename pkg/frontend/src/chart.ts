/**
 * Step-chart geometry for saturation curves. Pure functions from curve
 * documents to SVG markup: the realized curve, its confidence band, and
 * an optional hypothetical overlay share one coordinate system, so equal
 * data always renders as equal paths.
 */

import type { Curve, CurvePoint } from './types.js';

export const CHART_WIDTH = 640;
export const CHART_HEIGHT = 320;
export const MARGIN = { top: 16, right: 16, bottom: 40, left: 48 };

export interface XY {
  x: number;
  y: number;
}

export interface ChartModel {
  width: number;
  height: number;
  xMax: number;
  realizedPath: string;
  bandPath: string | null;
  censorTicks: XY[];
  overlayPath: string | null;
  overlayStartSeq: number | null;
  xTicks: Array<{ px: number; label: string }>;
  yTicks: Array<{ py: number; label: string }>;
}

/**
 * Vertices of the right-continuous step function: flat from the previous
 * interview, dropping at each event. Starts at (0, 1).
 */
export function stepVertices(points: CurvePoint[], value: (p: CurvePoint) => number | null): XY[] {
  const vertices: XY[] = [];
  let previous = 1;
  let lastX = 0;
  vertices.push({ x: 0, y: previous });
  for (const point of points) {
    const y = value(point);
    if (y === null) break;
    if (y !== previous) {
      vertices.push({ x: point.seq, y: previous });
      vertices.push({ x: point.seq, y });
      previous = y;
    }
    lastX = point.seq;
  }
  if (lastX > 0) {
    vertices.push({ x: lastX, y: previous });
  }
  return vertices;
}

function scales(xMax: number, width: number, height: number) {
  const innerWidth = width - MARGIN.left - MARGIN.right;
  const innerHeight = height - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + (x / Math.max(xMax, 1)) * innerWidth;
  const sy = (y: number) => MARGIN.top + (1 - y) * innerHeight;
  return { sx, sy };
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

export function pathFrom(vertices: XY[], sx: (x: number) => number, sy: (y: number) => number): string {
  if (vertices.length === 0) return '';
  const parts = vertices.map(
    (v, i) => `${i === 0 ? 'M' : 'L'}${round2(sx(v.x))},${round2(sy(v.y))}`,
  );
  return parts.join(' ');
}

/** Confidence band polygon over the prefix where both limits exist. */
function bandVertices(points: CurvePoint[]): XY[] | null {
  const estimable = [];
  for (const point of points) {
    if (point.ci_low === null || point.ci_high === null) break;
    estimable.push(point);
  }
  if (estimable.length === 0) return null;
  const upper = stepVertices(estimable, (p) => p.ci_high);
  const lower = stepVertices(estimable, (p) => p.ci_low);
  return upper.concat(lower.reverse());
}

export function buildChart(
  realized: Curve,
  overlay: Curve | null,
  width = CHART_WIDTH,
  height = CHART_HEIGHT,
): ChartModel {
  const lastRealized = realized.points.length ? realized.points[realized.points.length - 1].seq : 0;
  const lastOverlay = overlay && overlay.points.length ? overlay.points[overlay.points.length - 1].seq : 0;
  const xMax = Math.max(lastRealized, lastOverlay, 1);
  const { sx, sy } = scales(xMax, width, height);

  const band = bandVertices(realized.points);
  const censorTicks = realized.points
    .filter((p) => p.event === 0)
    .map((p) => ({ x: round2(sx(p.seq)), y: round2(sy(p.S)) }));

  const xStep = Math.max(1, Math.ceil(xMax / 10));
  const xTicks = [];
  for (let x = 0; x <= xMax; x += xStep) {
    xTicks.push({ px: round2(sx(x)), label: String(x) });
  }
  const yTicks = [0, 0.25, 0.5, 0.75, 1].map((y) => ({
    py: round2(sy(y)),
    label: y.toFixed(2),
  }));

  return {
    width,
    height,
    xMax,
    realizedPath: pathFrom(stepVertices(realized.points, (p) => p.S), sx, sy),
    bandPath: band ? `${pathFrom(band, sx, sy)} Z` : null,
    censorTicks,
    overlayPath: overlay ? pathFrom(stepVertices(overlay.points, (p) => p.S), sx, sy) : null,
    overlayStartSeq: overlay ? lastRealized : null,
    xTicks,
    yTicks,
  };
}

export function chartSvg(model: ChartModel): string {
  const { width, height } = model;
  const bottom = height - MARGIN.bottom;
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" role="img" aria-label="saturation probability by interview">`,
  );
  parts.push(
    `<rect x="0" y="0" width="${width}" height="${height}" fill="var(--chart-bg, #ffffff)"/>`,
  );
  for (const tick of model.yTicks) {
    parts.push(
      `<line x1="${MARGIN.left}" y1="${tick.py}" x2="${width - MARGIN.right}" y2="${tick.py}" stroke="#e4e4e4"/>`,
      `<text x="${MARGIN.left - 6}" y="${tick.py + 4}" text-anchor="end" font-size="11" fill="#555">${tick.label}</text>`,
    );
  }
  for (const tick of model.xTicks) {
    parts.push(
      `<line x1="${tick.px}" y1="${bottom}" x2="${tick.px}" y2="${bottom + 4}" stroke="#888"/>`,
      `<text x="${tick.px}" y="${bottom + 16}" text-anchor="middle" font-size="11" fill="#555">${tick.label}</text>`,
    );
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${bottom}" x2="${width - MARGIN.right}" y2="${bottom}" stroke="#888"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${bottom}" stroke="#888"/>`,
    `<text x="${(MARGIN.left + width - MARGIN.right) / 2}" y="${height - 8}" text-anchor="middle" font-size="12" fill="#333">interview</text>`,
  );
  if (model.bandPath) {
    parts.push(`<path d="${model.bandPath}" fill="#1f5fa8" fill-opacity="0.12" stroke="none" data-series="band"/>`);
  }
  parts.push(
    `<path d="${model.realizedPath}" fill="none" stroke="#1f5fa8" stroke-width="2" data-series="realized"/>`,
  );
  for (const tick of model.censorTicks) {
    parts.push(
      `<line x1="${tick.x}" y1="${tick.y - 5}" x2="${tick.x}" y2="${tick.y + 5}" stroke="#1f5fa8" stroke-width="2" data-series="censor"/>`,
    );
  }
  if (model.overlayPath) {
    parts.push(
      `<path d="${model.overlayPath}" fill="none" stroke="#b03030" stroke-width="2" stroke-dasharray="6 4" data-series="overlay"/>`,
    );
  }
  parts.push('</svg>');
  return parts.join('');
}
