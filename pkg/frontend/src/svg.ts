/**
 * Minimal deterministic SVG assembly: element builders, axis scales, and
 * tick generation.  No timestamps, no randomness; identical inputs yield
 * byte-identical documents.
 */

export type Attrs = Record<string, string | number>;

export function fmt(x: number, digits = 4): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toFixed(digits);
  // normalize negative zero so output is stable
  return s === "-0." + "0".repeat(digits) ? s.slice(1) : s;
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  const body = children.join("");
  const attrText = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join("");
  return body.length > 0 ? `<${tag}${attrText}>${body}</${tag}>` : `<${tag}${attrText}/>`;
}

export function text(content: string, attrs: Attrs): string {
  const attrText = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join("");
  return `<text${attrText}>${escapeText(content)}</text>`;
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function document(width: number, height: number, children: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
    `width="${width}" height="${height}" font-family="Helvetica, Arial, sans-serif">` +
    children.join("") +
    `</svg>`
  );
}

/** Affine map from a data domain onto a pixel range. */
export interface Scale {
  (x: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((x: number) => r0 + ((x - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

/** Round tick positions covering the domain: 1/2/5 ladder. */
export function ticks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  const span = hi - lo;
  if (span <= 0) return [lo];
  const raw = span / count;
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  const candidates = [1, 2, 5, 10].map((m) => m * power);
  const step = candidates.find((c) => span / c <= count) ?? candidates[3];
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-9 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

export function tickLabel(x: number): string {
  if (x === 0) return "0";
  const abs = Math.abs(x);
  if (abs >= 1e4 || abs < 1e-3) return x.toExponential(0).replace("+", "");
  return String(Number(x.toPrecision(4)));
}

export function polyline(xs: number[], ys: number[]): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${i === 0 ? "M" : "L"}${fmt(xs[i])},${fmt(ys[i])}`);
  }
  return parts.join("");
}
