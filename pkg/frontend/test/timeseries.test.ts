import { execFileSync } from "child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";
import { column, parseCsv } from "../src/csv.js";
import { renderTimeseries, stageBoundaries } from "../src/timeseries.js";

const FIXTURES = join(__dirname, "fixtures");

function load(name: string) {
  return parseCsv(readFileSync(join(FIXTURES, name), "utf-8"), name);
}

describe("renderTimeseries", () => {
  it("renders the reference run with both panels", () => {
    const trajectory = load("default_trajectory.csv");
    const couplings = load("default_couplings.csv");
    // the run this figure shows: all population starts in the source SR and
    // ends in the remote SR
    expect(column(trajectory, "P_Al")[0]).toBe(1);
    const pAr = column(trajectory, "P_Ar");
    expect(pAr[pAr.length - 1]).toBeGreaterThanOrEqual(0.9999);

    const svg = renderTimeseries(trajectory, couplings);
    expect(svg.startsWith("<svg ")).toBe(true);
    for (const name of ["P_Al", "P_Ar", "P_W", "G1lc", "G3r"]) {
      expect(svg).toContain(`data-series="${name}"`);
    }
    expect(svg).toContain("data-stage-boundary");
  });

  it("marks the two stage handoffs", () => {
    const couplings = load("default_couplings.csv");
    const boundaries = stageBoundaries(couplings);
    expect(boundaries).toHaveLength(2);
    expect(boundaries[0]).toBeCloseTo(11.45, 1);
    expect(boundaries[1]).toBeCloseTo(14.59, 1);
  });

  it("renders without a couplings file", () => {
    const svg = renderTimeseries(load("default_trajectory.csv"));
    expect(svg).toContain('data-series="P_Ar"');
    expect(svg).not.toContain("data-stage-boundary");
  });

  it("conversion-only traces cross at one half", () => {
    // damped-free Rabi exchange: P_W = cos^2(g t), P_Cr = sin^2(g t)
    const g = 0.5;
    const tc = Math.PI / (2 * g);
    const lines = ["t,P_Al,P_Bl,P_Cl,P_W,P_Cr,P_Br,P_Ar,norm"];
    const n = 200;
    for (let i = 0; i <= n; i++) {
      const t = (tc * i) / n;
      const pw = Math.cos(g * t) ** 2;
      const pc = Math.sin(g * t) ** 2;
      lines.push(`${t},0,0,0,${pw},${pc},0,0,1`);
    }
    const table = parseCsv(lines.join("\n"));
    const pw = column(table, "P_W");
    const pc = column(table, "P_Cr");
    const t = column(table, "t");
    let crossing = 0;
    for (let i = 1; i < t.length; i++) {
      if (pw[i] <= pc[i] && pw[i - 1] > pc[i - 1]) crossing = t[i];
    }
    expect(crossing).toBeCloseTo(tc / 2, 1);
    expect(Math.abs(pw[100] - 0.5)).toBeLessThan(1e-3);
    const svg = renderTimeseries(table);
    expect(svg).toContain('data-series="P_W"');
  });

  it("rejects schema mismatches naming the column", () => {
    const bad = parseCsv("t,P_Al\n0,1\n");
    expect(() => renderTimeseries(bad)).toThrow(/P_W/);
  });
});

describe("command line", () => {
  const dist = join(__dirname, "..", "dist", "cli");

  it("figkit-timeseries writes an SVG", () => {
    const out = join(mkdtempSync(join(tmpdir(), "figkit-")), "fig.svg");
    execFileSync("node", [
      join(dist, "figkit-timeseries.js"),
      join(FIXTURES, "default_trajectory.csv"),
      out,
      "--couplings",
      join(FIXTURES, "default_couplings.csv"),
    ]);
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf-8")).toContain("</svg>");
  });

  it("figkit-heatmap writes an SVG", () => {
    const out = join(mkdtempSync(join(tmpdir(), "figkit-")), "fig.svg");
    execFileSync("node", [
      join(dist, "figkit-heatmap.js"),
      join(FIXTURES, "default_sweep.csv"),
      out,
    ]);
    expect(readFileSync(out, "utf-8")).toContain("data-infidelity");
  });

  it("fails with a diagnostic on an empty csv", () => {
    const dir = mkdtempSync(join(tmpdir(), "figkit-"));
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    let code = 0;
    let stderr = "";
    try {
      execFileSync("node", [join(dist, "figkit-timeseries.js"), empty, join(dir, "o.svg")]);
    } catch (err: any) {
      code = err.status;
      stderr = String(err.stderr);
    }
    expect(code).toBe(1);
    expect(stderr).toContain("empty");
  });

  it("fails with usage on bad arguments", () => {
    let code = 0;
    try {
      execFileSync("node", [join(dist, "figkit-heatmap.js")], { stdio: "pipe" });
    } catch (err: any) {
      code = err.status;
    }
    expect(code).toBe(2);
  });
});
