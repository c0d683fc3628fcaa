import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";
import { CsvError, parseCsv } from "../src/csv.js";
import { assembleGrid, renderHeatmap } from "../src/heatmap.js";

const FIXTURES = join(__dirname, "fixtures");

function defaultSweep() {
  return parseCsv(readFileSync(join(FIXTURES, "default_sweep.csv"), "utf-8"));
}

/** Pull every data cell (rect with data-v) out of the rendered SVG. */
function cells(svg: string) {
  const out: { v: number; g3: number; infidelity: number | null; masked: boolean }[] = [];
  const rectRe = /<rect ([^>]*data-v="[^"]*"[^>]*)>/g;
  for (const match of svg.matchAll(rectRe)) {
    const attrs = match[1];
    const get = (name: string) => {
      const m = attrs.match(new RegExp(`data-${name}="([^"]*)"`));
      return m ? m[1] : null;
    };
    out.push({
      v: Number(get("v")),
      g3: Number(get("g3")),
      infidelity: get("infidelity") !== null ? Number(get("infidelity")) : null,
      masked: get("masked") === "true",
    });
  }
  return out;
}

describe("grid assembly", () => {
  it("accepts the default sweep grid", () => {
    const grid = assembleGrid(defaultSweep());
    expect(grid.vValues).toHaveLength(15);
    expect(grid.g3Values).toHaveLength(10);
  });

  it("rejects ragged grids", () => {
    const table = parseCsv("v,g3,infidelity,t_total\n1,0.5,0.1,10\n2,0.6,0.2,10\n");
    expect(() => assembleGrid(table)).toThrow(/ragged/);
  });

  it("rejects duplicate points", () => {
    const table = parseCsv(
      "v,g3,infidelity,t_total\n1,0.5,0.1,10\n1,0.5,0.2,10\n1,0.6,0.1,10\n2,0.5,0.1,10\n",
    );
    expect(() => assembleGrid(table)).toThrow(/duplicate/);
  });

  it("masks sentinel rows", () => {
    const table = parseCsv(
      "v,g3,infidelity,t_total\n1,0.5,0.1,10\n2,0.5,-1,-1\n",
    );
    const grid = assembleGrid(table);
    expect(grid.infidelity[1][0]).toBeNaN();
  });
});

describe("renderHeatmap", () => {
  it("anchored cell displays the CSV infidelity", () => {
    const table = defaultSweep();
    const svg = renderHeatmap(table);
    // the cell containing the (v = 2.62, g3 = 0.5) operating point
    const grid = assembleGrid(table);
    const vCell = grid.vValues.reduce((best, v) =>
      Math.abs(v - 2.62) < Math.abs(best - 2.62) ? v : best,
    );
    const cell = cells(svg).find((c) => c.v === vCell && c.g3 === 0.5);
    expect(cell).toBeDefined();
    const rows = grid.vValues.indexOf(vCell);
    const csvValue = grid.infidelity[rows][grid.g3Values.indexOf(0.5)];
    expect(cell!.infidelity).not.toBeNull();
    expect(Math.abs(cell!.infidelity! - csvValue)).toBeLessThan(1e-2);
    // the embedded title makes the value human-readable too
    expect(svg).toContain(`infidelity=${csvValue}`);
  });

  it("renders a complete rectangular grid with one rect per cell", () => {
    const svg = renderHeatmap(defaultSweep());
    expect(cells(svg)).toHaveLength(150);
    expect(svg.startsWith("<svg ")).toBe(true);
  });

  it("is deterministic", () => {
    const a = renderHeatmap(defaultSweep());
    const b = renderHeatmap(parseCsv(readFileSync(join(FIXTURES, "default_sweep.csv"), "utf-8")));
    expect(a).toBe(b);
  });

  it("renders masked cells without crashing", () => {
    const table = parseCsv(
      "v,g3,infidelity,t_total\n1,0.5,0.1,10\n1,0.6,0.2,10\n2,0.5,-1,-1\n2,0.6,0.3,10\n",
    );
    const svg = renderHeatmap(table);
    const masked = cells(svg).filter((c) => c.masked);
    expect(masked).toHaveLength(1);
    expect(masked[0].v).toBe(2);
    expect(svg).toContain('patternUnits');
  });

  it("uniform grids render as a single color", () => {
    const table = parseCsv(
      "v,g3,infidelity,t_total\n1,0.5,0,10\n1,0.6,0,10\n2,0.5,0,10\n2,0.6,0,10\n",
    );
    const svg = renderHeatmap(table, { scale: "linear" });
    const fills = [...svg.matchAll(/<rect [^>]*data-v[^>]*fill="(rgb[^"]*)"/g)].map(
      (m) => m[1],
    );
    expect(new Set(fills).size).toBe(1);
  });

  it("rejects all-masked grids", () => {
    const table = parseCsv("v,g3,infidelity,t_total\n1,0.5,-1,-1\n");
    expect(() => renderHeatmap(table)).toThrow(CsvError);
  });

  it("supports linear and log scales", () => {
    const log = renderHeatmap(defaultSweep(), { scale: "log" });
    const lin = renderHeatmap(defaultSweep(), { scale: "linear" });
    expect(log).toContain("log scale");
    expect(lin).toContain("linear scale");
    expect(log).not.toBe(lin);
  });
});
