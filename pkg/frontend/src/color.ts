/**
 * Perceptually uniform sequential colormap (viridis control points,
 * linearly interpolated) plus linear/log value normalization for the
 * heatmap.
 */

const VIRIDIS: [number, number, number][] = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

export function viridis(t: number): string {
  const x = Math.min(1, Math.max(0, t)) * (VIRIDIS.length - 1);
  const i = Math.min(VIRIDIS.length - 2, Math.floor(x));
  const f = x - i;
  const [r0, g0, b0] = VIRIDIS[i];
  const [r1, g1, b1] = VIRIDIS[i + 1];
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  return `rgb(${mix(r0, r1)},${mix(g0, g1)},${mix(b0, b1)})`;
}

export interface Normalizer {
  (value: number): number;
  domain: [number, number];
  scaleKind: "linear" | "log";
}

/**
 * Map values onto [0, 1].  The log variant clamps at a positive floor so
 * zero-infidelity cells fall on the low end instead of -Infinity.
 */
export function makeNormalizer(
  values: number[],
  scaleKind: "linear" | "log",
  logFloor = 1e-6,
): Normalizer {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (scaleKind === "log") {
    const positive = values.filter((v) => v > 0);
    lo = positive.length > 0 ? Math.max(Math.min(...positive), logFloor) : logFloor;
    hi = Math.max(hi, lo * 10);
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    const norm = ((v: number) =>
      (Math.log10(Math.max(v, lo)) - llo) / (lhi - llo || 1)) as Normalizer;
    norm.domain = [lo, hi];
    norm.scaleKind = "log";
    return norm;
  }
  if (hi === lo) hi = lo + 1;
  const norm = ((v: number) => (v - lo) / (hi - lo)) as Normalizer;
  norm.domain = [lo, hi];
  norm.scaleKind = "linear";
  return norm;
}
