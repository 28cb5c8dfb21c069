/**
 * Strict parser for the sweep CSV contract produced by the risbound CLI.
 *
 * The header must match the contract byte for byte; anything else is a
 * configuration error upstream and must fail loudly rather than render a
 * wrong chart.
 */

export const CSV_HEADER =
  "scenario_id,K_active,L,phase_mode,fim_mode,seed,peb_m,reb_rad,objective,wall_time_s";

export class HeaderMismatch extends Error {
  constructor(found: string) {
    super(`CSV header does not match the contract.\n expected: ${CSV_HEADER}\n found:    ${found}`);
    this.name = "HeaderMismatch";
  }
}

export class EmptyInput extends Error {
  constructor() {
    super("CSV contains a valid header but no data rows");
    this.name = "EmptyInput";
  }
}

export class CsvParseError extends Error {
  constructor(line: number, message: string) {
    super(`CSV line ${line}: ${message}`);
    this.name = "CsvParseError";
  }
}

export interface SweepRow {
  scenarioId: string;
  kActive: number;
  l: number;
  phaseMode: string;
  fimMode: string;
  seed: number;
  pebM: number;
  rebRad: number;
  objective: number;
  wallTimeS: number;
}

function toNumber(field: string, line: number, name: string): number {
  const value = Number(field);
  if (field.trim() === "" || !Number.isFinite(value)) {
    throw new CsvParseError(line, `field '${name}' is not a finite number: '${field}'`);
  }
  return value;
}

function toInt(field: string, line: number, name: string): number {
  const value = toNumber(field, line, name);
  if (!Number.isInteger(value)) {
    throw new CsvParseError(line, `field '${name}' is not an integer: '${field}'`);
  }
  return value;
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/);
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0 || lines[0] !== CSV_HEADER) {
    throw new HeaderMismatch(lines[0] ?? "<empty file>");
  }
  if (lines.length === 1) {
    throw new EmptyInput();
  }

  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== 10) {
      throw new CsvParseError(i + 1, `expected 10 fields, got ${fields.length}`);
    }
    rows.push({
      scenarioId: fields[0],
      kActive: toInt(fields[1], i + 1, "K_active"),
      l: toInt(fields[2], i + 1, "L"),
      phaseMode: fields[3],
      fimMode: fields[4],
      seed: toInt(fields[5], i + 1, "seed"),
      pebM: toNumber(fields[6], i + 1, "peb_m"),
      rebRad: toNumber(fields[7], i + 1, "reb_rad"),
      objective: toNumber(fields[8], i + 1, "objective"),
      wallTimeS: toNumber(fields[9], i + 1, "wall_time_s"),
    });
  }
  return rows;
}
