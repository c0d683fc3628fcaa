import { describe, expect, it } from "vitest";
import { CsvError, column, parseCsv, requireColumns } from "../src/csv.js";

describe("parseCsv", () => {
  it("parses a numeric table", () => {
    const table = parseCsv("a,b\n1,2\n3,4\n");
    expect(table.columns).toEqual(["a", "b"]);
    expect(table.rowCount).toBe(2);
    expect(column(table, "b")).toEqual([2, 4]);
  });

  it("rejects empty files", () => {
    expect(() => parseCsv("", "x.csv")).toThrow(CsvError);
    expect(() => parseCsv("  \n \n", "x.csv")).toThrow(/empty/);
  });

  it("rejects header-only files", () => {
    expect(() => parseCsv("a,b\n", "x.csv")).toThrow(/no data rows/);
  });

  it("names the bad column on parse errors", () => {
    expect(() => parseCsv("a,b\n1,zap\n", "x.csv")).toThrow(/column 'b'.*zap/);
  });

  it("rejects ragged rows with line numbers", () => {
    expect(() => parseCsv("a,b\n1,2\n3\n", "x.csv")).toThrow(/line 3/);
  });

  it("rejects duplicate headers", () => {
    expect(() => parseCsv("a,a\n1,2\n")).toThrow(/duplicate/);
  });

  it("names missing required columns", () => {
    const table = parseCsv("a,b\n1,2\n");
    expect(() => requireColumns(table, ["a", "zz"], "t.csv")).toThrow(/zz/);
  });
});
