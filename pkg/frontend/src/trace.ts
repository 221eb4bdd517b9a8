/** Parsing of optimizer trace CSV files.
 *
 * The schema is fixed: a bit-exact header line followed by one row per
 * iteration, floats at full precision.
 */

import { readFileSync } from "node:fs";

export const TRACE_HEADER =
  "iter,energy,grad_h1,update_l2,alpha,beta,restart,energy_evals,wall_ms";

export interface TraceRow {
  iter: number;
  energy: number;
  gradH1: number;
  updateL2: number;
  alpha: number;
  beta: number;
  restart: boolean;
  energyEvals: number;
  wallMs: number;
}

export class TraceSchemaError extends Error {}

export function parseTrace(text: string, source = "<trace>"): TraceRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0 || lines[0] !== TRACE_HEADER) {
    throw new TraceSchemaError(`${source}: missing or malformed header line`);
  }
  const rows: TraceRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 9) {
      throw new TraceSchemaError(
        `${source}: line ${i + 1}: expected 9 columns, got ${parts.length}`,
      );
    }
    const nums = parts.map(Number);
    if (nums.some((v) => Number.isNaN(v))) {
      throw new TraceSchemaError(`${source}: line ${i + 1}: non-numeric value`);
    }
    rows.push({
      iter: nums[0],
      energy: nums[1],
      gradH1: nums[2],
      updateL2: nums[3],
      alpha: nums[4],
      beta: nums[5],
      restart: nums[6] !== 0,
      energyEvals: nums[7],
      wallMs: nums[8],
    });
  }
  if (rows.length === 0) {
    throw new TraceSchemaError(`${source}: trace holds no iterations`);
  }
  return rows;
}

export function loadTrace(path: string): TraceRow[] {
  return parseTrace(readFileSync(path, "utf8"), path);
}
