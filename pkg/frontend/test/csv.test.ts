import * as fs from "fs";
import * as path from "path";
import { fileURLToPath } from "url";
import { describe, expect, it } from "vitest";

import { CSV_HEADER, CsvParseError, EmptyInput, HeaderMismatch, parseSweepCsv }
  from "../src/csv.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const fixture = fs.readFileSync(path.join(here, "fixtures", "ris_count.csv"), "utf-8");

describe("parseSweepCsv", () => {
  it("parses the sweep fixture", () => {
    const rows = parseSweepCsv(fixture);
    expect(rows.length).toBe(36); // 4 K values x 3 modes x 3 seeds
    expect(rows[0].scenarioId).toBe("paper_vi");
    expect(new Set(rows.map((r) => r.phaseMode))).toEqual(
      new Set(["random", "aligned", "pso"]));
    for (const row of rows) {
      expect(row.pebM).toBeGreaterThan(0);
      expect(row.rebRad).toBeGreaterThan(0);
    }
  });

  it("rejects a renamed header column", () => {
    const bad = fixture.replace("peb_m", "peb");
    expect(() => parseSweepCsv(bad)).toThrow(HeaderMismatch);
  });

  it("rejects reordered header columns", () => {
    const lines = fixture.split("\n");
    lines[0] = "K_active," + CSV_HEADER.replace("K_active,", "");
    expect(() => parseSweepCsv(lines.join("\n"))).toThrow(HeaderMismatch);
  });

  it("rejects an empty file", () => {
    expect(() => parseSweepCsv("")).toThrow(HeaderMismatch);
  });

  it("rejects a header-only file", () => {
    expect(() => parseSweepCsv(CSV_HEADER + "\n")).toThrow(EmptyInput);
  });

  it("rejects non-numeric fields", () => {
    const bad = CSV_HEADER + "\nid,0,0,random,paper,1,oops,1.0,1.0,0.0\n";
    expect(() => parseSweepCsv(bad)).toThrow(CsvParseError);
  });

  it("rejects rows with missing fields", () => {
    const bad = CSV_HEADER + "\nid,0,0,random,paper,1,1.0\n";
    expect(() => parseSweepCsv(bad)).toThrow(CsvParseError);
  });
});
