/**
 * Stage-resolved time-series figure from the trajectory CSV, with an
 * optional couplings panel above it.
 *
 * Trajectory schema: `t,P_Al,P_Bl,P_Cl,P_W,P_Cr,P_Br,P_Ar,norm`.
 * Couplings schema: `t,G1lc,G2lc,G3l,G3r,G1rc,G2rc`.  Stage boundaries are
 * recovered from where the waveguide couplings switch.
 */

import { Table, column, requireColumns } from "./csv.js";
import { document, el, linearScale, polyline, Scale, text, tickLabel, ticks } from "./svg.js";

export const TRAJECTORY_COLUMNS = [
  "t", "P_Al", "P_Bl", "P_Cl", "P_W", "P_Cr", "P_Br", "P_Ar", "norm",
];
export const COUPLING_COLUMNS = ["t", "G1lc", "G2lc", "G3l", "G3r", "G1rc", "G2rc"];

const POPULATION_SERIES: [string, string][] = [
  ["P_Al", "#1f77b4"],
  ["P_Bl", "#aec7e8"],
  ["P_Cl", "#2ca02c"],
  ["P_W", "#d62728"],
  ["P_Cr", "#98df8a"],
  ["P_Br", "#c5b0d5"],
  ["P_Ar", "#9467bd"],
];

const COUPLING_SERIES: [string, string][] = [
  ["G1lc", "#ff7f0e"],
  ["G2lc", "#1f77b4"],
  ["G3l", "#d62728"],
  ["G3r", "#2ca02c"],
  ["G1rc", "#17becf"],
  ["G2rc", "#9467bd"],
];

/** Times where the active waveguide coupling changes; marks stage handoffs. */
export function stageBoundaries(couplings: Table): number[] {
  const t = column(couplings, "t");
  const g3l = column(couplings, "G3l");
  const g3r = column(couplings, "G3r");
  const out: number[] = [];
  for (let i = 1; i < t.length; i++) {
    const before = `${g3l[i - 1] > 0 ? 1 : 0}${g3r[i - 1] > 0 ? 1 : 0}`;
    const after = `${g3l[i] > 0 ? 1 : 0}${g3r[i] > 0 ? 1 : 0}`;
    if (before !== after) out.push((t[i - 1] + t[i]) / 2);
  }
  return out;
}

interface Panel {
  svg: string[];
  x: Scale;
}

function panel(
  table: Table,
  series: [string, string][],
  x: Scale,
  yDomain: [number, number],
  top: number,
  height: number,
  label: string,
  marginLeft: number,
): Panel {
  const t = column(table, "t");
  const y = linearScale(yDomain, [top + height, top]);
  const parts: string[] = [];
  parts.push(
    el("rect", {
      x: x.range[0], y: top, width: x.range[1] - x.range[0], height,
      fill: "none", stroke: "#333333", "stroke-width": 1,
    }),
  );
  for (const tickVal of ticks(yDomain, 4)) {
    parts.push(
      text(tickLabel(tickVal), {
        x: marginLeft - 6, y: y(tickVal) + 3.5, "text-anchor": "end", "font-size": 10,
      }),
    );
  }
  for (const [name, color] of series) {
    if (!table.data.has(name)) continue;
    const values = column(table, name);
    parts.push(
      el("path", {
        d: polyline(t.map(x), values.map(y)),
        fill: "none",
        stroke: color,
        "stroke-width": 1.4,
        "data-series": name,
      }),
    );
  }
  parts.push(
    text(label, {
      x: marginLeft - 52, y: top + 14, "text-anchor": "start", "font-size": 12,
    }),
  );
  return { svg: parts, x };
}

function legend(series: [string, string][], xPos: number, yPos: number): string[] {
  const out: string[] = [];
  series.forEach(([name, color], i) => {
    const yRow = yPos + i * 15;
    out.push(el("line", { x1: xPos, x2: xPos + 16, y1: yRow, y2: yRow, stroke: color, "stroke-width": 2 }));
    out.push(text(name, { x: xPos + 21, y: yRow + 3.5, "font-size": 10 }));
  });
  return out;
}

export function renderTimeseries(trajectory: Table, couplings?: Table): string {
  requireColumns(trajectory, TRAJECTORY_COLUMNS, "trajectory csv");
  if (couplings !== undefined) {
    requireColumns(couplings, COUPLING_COLUMNS, "couplings csv");
  }

  const width = 760;
  const height = couplings ? 560 : 330;
  const margin = { left: 60, right: 120, top: 30, bottom: 45 };
  const plotW = width - margin.left - margin.right;

  const t = column(trajectory, "t");
  const tLo = Math.min(...t);
  const tHi = Math.max(...t);
  const x = linearScale([tLo, tHi], [margin.left, margin.left + plotW]);

  const parts: string[] = [];
  let popTop = margin.top;
  const panelGap = 40;
  const panelH = couplings ? 215 : 240;

  if (couplings) {
    const gMax = Math.max(
      ...COUPLING_SERIES.filter(([n]) => couplings.data.has(n)).map(([n]) =>
        Math.max(...column(couplings, n)),
      ),
    );
    const cp = panel(
      couplings, COUPLING_SERIES, x, [Math.min(0, gMax) - 0.05, gMax * 1.05 + 1e-9],
      margin.top, panelH, "couplings (g0)", margin.left,
    );
    parts.push(...cp.svg);
    parts.push(...legend(COUPLING_SERIES, width - margin.right + 12, margin.top + 10));
    popTop = margin.top + panelH + panelGap;
  }

  // populations panel is pinned to [0, 1]
  const pp = panel(
    trajectory, POPULATION_SERIES, x, [0, 1], popTop, panelH, "populations", margin.left,
  );
  parts.push(...pp.svg);
  parts.push(...legend(POPULATION_SERIES, width - margin.right + 12, popTop + 10));

  if (couplings) {
    for (const b of stageBoundaries(couplings)) {
      parts.push(
        el("line", {
          x1: x(b), x2: x(b), y1: margin.top, y2: popTop + panelH,
          stroke: "#999999", "stroke-width": 1, "stroke-dasharray": "4,3",
          "data-stage-boundary": String(b),
        }),
      );
    }
  }

  for (const tickVal of ticks([tLo, tHi], 7)) {
    parts.push(
      text(tickLabel(tickVal), {
        x: x(tickVal), y: popTop + panelH + 16, "text-anchor": "middle", "font-size": 10,
      }),
    );
  }
  parts.push(
    text("t (1/g0)", {
      x: margin.left + plotW / 2, y: height - 12, "text-anchor": "middle", "font-size": 13,
    }),
  );
  return document(width, height, parts);
}
