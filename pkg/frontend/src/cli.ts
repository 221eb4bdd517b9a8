/** Command line entry point: render the two-panel convergence figure.
 *
 * Usage:
 *   trace-plots --trace path:label [--trace path:label ...]
 *               --ref <float> [--threshold <float>] --out <path>
 */

import { writeFileSync } from "node:fs";

import { renderFigure, LabeledTrace } from "./figure.js";
import { loadTrace, TraceSchemaError } from "./trace.js";

interface CliArgs {
  trace: string[];
  ref?: string;
  threshold: string;
  out?: string;
}

/** Parse --flag value / --flag=value pairs; values may start with "-"
 * (negative reference energies), which rules out util.parseArgs here. */
function parseCliArgs(argv: string[]): CliArgs {
  const args: CliArgs = { trace: [], threshold: "1e-5" };
  for (let i = 0; i < argv.length; i++) {
    const token = argv[i];
    if (!token.startsWith("--")) {
      throw new Error(`unexpected argument ${token}`);
    }
    const eq = token.indexOf("=");
    const name = eq >= 0 ? token.slice(2, eq) : token.slice(2);
    let value: string;
    if (eq >= 0) {
      value = token.slice(eq + 1);
    } else {
      if (i + 1 >= argv.length) throw new Error(`--${name} requires a value`);
      value = argv[++i];
    }
    if (name === "trace") args.trace.push(value);
    else if (name === "ref") args.ref = value;
    else if (name === "threshold") args.threshold = value;
    else if (name === "out") args.out = value;
    else throw new Error(`unknown option --${name}`);
  }
  return args;
}

export function run(argv: string[]): number {
  let parsed: CliArgs;
  try {
    parsed = parseCliArgs(argv);
  } catch (err) {
    console.error(`trace-plots: ${(err as Error).message}`);
    return 2;
  }
  const { trace: traceArgs, ref, threshold, out } = parsed;
  if (!traceArgs || traceArgs.length === 0 || ref === undefined || out === undefined) {
    console.error(
      "trace-plots: --trace path:label (at least once), --ref and --out are required",
    );
    return 2;
  }
  const eRef = Number(ref);
  const thresh = Number(threshold);
  if (!Number.isFinite(eRef) || eRef === 0) {
    console.error(`trace-plots: --ref must be a finite nonzero number, got ${ref}`);
    return 2;
  }
  if (!Number.isFinite(thresh) || thresh <= 0) {
    console.error(`trace-plots: --threshold must be positive, got ${threshold}`);
    return 2;
  }

  const traces: LabeledTrace[] = [];
  for (const spec of traceArgs) {
    const split = spec.lastIndexOf(":");
    const path = split > 0 ? spec.slice(0, split) : spec;
    const label = split > 0 ? spec.slice(split + 1) : path;
    try {
      traces.push({ label, rows: loadTrace(path) });
    } catch (err) {
      if (err instanceof TraceSchemaError) {
        console.error(`trace-plots: ${err.message}`);
      } else {
        console.error(`trace-plots: cannot read ${path}: ${(err as Error).message}`);
      }
      return 1;
    }
  }

  writeFileSync(out, renderFigure(traces, eRef, thresh));
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
