/**
 * Infidelity heatmap over the (v, g3) sweep grid.
 *
 * Expects the sweep CSV schema `v,g3,infidelity,t_total` covering a complete
 * rectangular grid.  Sentinel rows (infidelity = -1, recorded for failed
 * points) are rendered as hatched masked cells.  Every live cell carries
 * data-v / data-g3 / data-infidelity attributes and a <title> so the value
 * it displays is machine-readable.
 */

import { CsvError, Table, column, requireColumns } from "./csv.js";
import { makeNormalizer, viridis } from "./color.js";
import { document, el, fmt, text, tickLabel } from "./svg.js";

export interface HeatmapOptions {
  scale?: "log" | "linear";
  title?: string;
}

export interface SweepGridData {
  vValues: number[];
  g3Values: number[];
  /** infidelity[i][j] for v index i, g3 index j; NaN marks masked cells */
  infidelity: number[][];
}

export const SWEEP_COLUMNS = ["v", "g3", "infidelity", "t_total"];

/** Assemble the rectangular grid, rejecting ragged or duplicated points. */
export function assembleGrid(table: Table): SweepGridData {
  requireColumns(table, SWEEP_COLUMNS, "sweep csv");
  const v = column(table, "v");
  const g3 = column(table, "g3");
  const infid = column(table, "infidelity");

  const vValues = [...new Set(v)].sort((a, b) => a - b);
  const g3Values = [...new Set(g3)].sort((a, b) => a - b);
  if (vValues.length * g3Values.length !== table.rowCount) {
    throw new CsvError(
      `sweep csv: ragged grid: ${table.rowCount} rows != ` +
        `${vValues.length} v-values x ${g3Values.length} g3-values`,
    );
  }
  const grid = vValues.map(() => g3Values.map(() => Number.NaN));
  for (let r = 0; r < table.rowCount; r++) {
    const i = vValues.indexOf(v[r]);
    const j = g3Values.indexOf(g3[r]);
    if (!Number.isNaN(grid[i][j])) {
      throw new CsvError(`sweep csv: duplicate grid point (v=${v[r]}, g3=${g3[r]})`);
    }
    grid[i][j] = infid[r];
  }
  // sentinel -> masked
  for (const row of grid) {
    for (let j = 0; j < row.length; j++) {
      if (row[j] < 0) row[j] = Number.NaN;
    }
  }
  return { vValues, g3Values, infidelity: grid };
}

/** Cell boundaries at the midpoints between grid values (edges extrapolated). */
function edges(values: number[]): number[] {
  if (values.length === 1) {
    const half = Math.abs(values[0]) * 0.05 || 0.5;
    return [values[0] - half, values[0] + half];
  }
  const out: number[] = [values[0] - (values[1] - values[0]) / 2];
  for (let i = 0; i < values.length - 1; i++) {
    out.push((values[i] + values[i + 1]) / 2);
  }
  out.push(
    values[values.length - 1] + (values[values.length - 1] - values[values.length - 2]) / 2,
  );
  return out;
}

export function renderHeatmap(table: Table, options: HeatmapOptions = {}): string {
  const { vValues, g3Values, infidelity } = assembleGrid(table);
  const scaleKind = options.scale ?? "log";

  const width = 640;
  const height = 480;
  const margin = { left: 70, right: 110, top: 40, bottom: 55 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const vEdges = edges(vValues);
  const g3Edges = edges(g3Values);
  const vLo = vEdges[0];
  const vHi = vEdges[vEdges.length - 1];
  const gLo = g3Edges[0];
  const gHi = g3Edges[g3Edges.length - 1];
  const x = (v: number) => margin.left + ((v - vLo) / (vHi - vLo)) * plotW;
  const y = (g: number) => margin.top + plotH - ((g - gLo) / (gHi - gLo)) * plotH;

  const live = infidelity.flat().filter((z) => Number.isFinite(z));
  if (live.length === 0) {
    throw new CsvError("sweep csv: every grid point is masked; nothing to render");
  }
  const norm = makeNormalizer(live, scaleKind);

  const cells: string[] = [];
  for (let i = 0; i < vValues.length; i++) {
    for (let j = 0; j < g3Values.length; j++) {
      const z = infidelity[i][j];
      const x0 = x(vEdges[i]);
      const x1 = x(vEdges[i + 1]);
      const y0 = y(g3Edges[j + 1]);
      const y1 = y(g3Edges[j]);
      const base = {
        x: x0,
        y: y0,
        width: x1 - x0,
        height: y1 - y0,
        "data-v": String(vValues[i]),
        "data-g3": String(g3Values[j]),
      };
      if (Number.isFinite(z)) {
        cells.push(
          el("rect", { ...base, fill: viridis(norm(z)), "data-infidelity": String(z) }, [
            el("title", {}, [
              `v=${vValues[i]} g3=${g3Values[j]} infidelity=${z}`,
            ]),
          ]),
        );
      } else {
        cells.push(
          el("rect", { ...base, fill: "url(#masked)", "data-masked": "true" }, [
            el("title", {}, [`v=${vValues[i]} g3=${g3Values[j]} failed point`]),
          ]),
        );
      }
    }
  }

  const axes: string[] = [];
  for (const v of vValues) {
    axes.push(
      text(tickLabel(v), {
        x: x(v), y: margin.top + plotH + 18, "text-anchor": "middle", "font-size": 11,
      }),
    );
  }
  for (const g of g3Values) {
    axes.push(
      text(tickLabel(g), {
        x: margin.left - 8, y: y(g) + 4, "text-anchor": "end", "font-size": 11,
      }),
    );
  }
  axes.push(
    text("protocol speed v (g0)", {
      x: margin.left + plotW / 2, y: height - 12, "text-anchor": "middle", "font-size": 13,
    }),
    text("waveguide coupling g3 (g0)", {
      x: 16, y: margin.top + plotH / 2, "text-anchor": "middle", "font-size": 13,
      transform: `rotate(-90 16 ${fmt(margin.top + plotH / 2)})`,
    }),
    text(options.title ?? "infidelity (1 - F_e)", {
      x: margin.left + plotW / 2, y: 24, "text-anchor": "middle", "font-size": 14,
    }),
  );

  // colorbar
  const barX = width - margin.right + 30;
  const barW = 16;
  const steps = 64;
  const bar: string[] = [];
  for (let k = 0; k < steps; k++) {
    const t = (k + 0.5) / steps;
    const yTop = margin.top + plotH - ((k + 1) / steps) * plotH;
    bar.push(
      el("rect", {
        x: barX, y: yTop, width: barW, height: plotH / steps + 0.5, fill: viridis(t),
      }),
    );
  }
  const [dLo, dHi] = norm.domain;
  const barTicks =
    scaleKind === "log"
      ? logTicks(dLo, dHi)
      : [dLo, (dLo + dHi) / 2, dHi];
  for (const tv of barTicks) {
    const yPos = margin.top + plotH - norm(tv) * plotH;
    bar.push(
      text(tickLabel(tv), {
        x: barX + barW + 6, y: yPos + 4, "text-anchor": "start", "font-size": 10,
      }),
    );
  }
  bar.push(
    text(scaleKind === "log" ? "log scale" : "linear scale", {
      x: barX + barW / 2, y: margin.top - 8, "text-anchor": "middle", "font-size": 10,
    }),
  );

  const defs = el("defs", {}, [
    el("pattern", { id: "masked", width: 6, height: 6, patternUnits: "userSpaceOnUse" }, [
      el("rect", { x: 0, y: 0, width: 6, height: 6, fill: "#d8d8d8" }),
      el("path", { d: "M0,6 L6,0", stroke: "#888888", "stroke-width": 1 }),
    ]),
  ]);
  const frame = el("rect", {
    x: margin.left, y: margin.top, width: plotW, height: plotH,
    fill: "none", stroke: "#333333", "stroke-width": 1,
  });
  return document(width, height, [defs, ...cells, frame, ...axes, ...bar]);
}

function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let p = Math.ceil(Math.log10(lo)); Math.pow(10, p) <= hi * (1 + 1e-9); p++) {
    out.push(Math.pow(10, p));
  }
  if (out.length === 0) out.push(lo, hi);
  return out;
}
