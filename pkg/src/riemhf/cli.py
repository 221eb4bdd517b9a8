"""Command line entry point: run a configured job, persist trace and summary."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, parse_config, with_overrides
from .grid import create_grid, dump_orbital
from .hf import HfProblem, fock_matrix
from .molecule import AtomicGaussians, RandomGaussians, initial_guess, load_molecule, nuclear_repulsion
from .optimize import (
    LineSearchError,
    OptimizerTrace,
    ScfDivergenceError,
    TraceRow,
    conjugate_gradient,
    scf_fixed_point,
    steepest_descent,
)
from .stiefel import riemannian_gradient

__all__ = ["write_trace", "read_trace", "run_job", "main"]

TRACE_HEADER = "iter,energy,grad_h1,update_l2,alpha,beta,restart,energy_evals,wall_ms"
THREADS_ENV = "RIEMHF_NUM_THREADS"


def write_trace(trace: OptimizerTrace, path: str | Path) -> None:
    """Write the per-iteration trace as CSV, floats at 17 significant digits."""
    lines = [TRACE_HEADER]
    for r in trace.rows:
        lines.append(
            f"{r.iteration},{r.energy:.17g},{r.grad_h1:.17g},{r.update_l2:.17g},"
            f"{r.alpha:.17g},{r.beta:.17g},{int(r.restart)},{r.energy_evals},"
            f"{r.wall_ms:.17g}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace(path: str | Path) -> OptimizerTrace:
    """Parse a trace CSV written by write_trace."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"{path}: not a trace CSV (bad header)")
    trace = OptimizerTrace()
    for line in lines[1:]:
        parts = line.split(",")
        trace.append(
            TraceRow(
                iteration=int(parts[0]),
                energy=float(parts[1]),
                grad_h1=float(parts[2]),
                update_l2=float(parts[3]),
                alpha=float(parts[4]),
                beta=float(parts[5]),
                restart=bool(int(parts[6])),
                energy_evals=int(parts[7]),
                wall_ms=float(parts[8]),
            )
        )
    return trace


def _build_problem(config: RunConfig):
    grid = create_grid(config.box_length, config.points_per_axis)
    molecule = load_molecule(Path(config.molecule_path).read_text())
    softening = config.softening if config.softening is not None else grid.spacing
    problem = HfProblem.build(molecule, grid, softening)
    if config.guess == "random":
        spec = RandomGaussians(seed=config.seed, center_box=config.guess_center_box)
    else:
        spec = AtomicGaussians(width=config.atomic_width)
    phi0 = initial_guess(spec, molecule, grid, config.n_orbitals)
    return problem, phi0


def run_job(config: RunConfig) -> int:
    """Execute guess -> solver, write trace.csv and summary.json; 0 iff converged."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        problem, phi0 = _build_problem(config)
        if config.solver == "steepest":
            result = steepest_descent(problem, phi0, config.line_search, config.stop)
        elif config.solver == "cg":
            result = conjugate_gradient(
                problem, phi0, config.line_search, config.cg, config.stop
            )
        else:
            result = scf_fixed_point(problem, phi0, config.stop)
    except (LineSearchError, ScfDivergenceError) as err:
        if err.trace is not None:
            write_trace(err.trace, out_dir / "trace.csv")
        print(f"riemhf: solver failed: {err}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as err:
        print(f"riemhf: {err}", file=sys.stderr)
        return 2

    (_, a_mat) = riemannian_gradient(result.phi, problem)
    eps = fock_matrix(result.phi, problem)
    a_minus_4eps = float(
        np.linalg.norm(a_mat - 4.0 * eps) / max(np.linalg.norm(eps), 1e-300)
    )
    repulsion = nuclear_repulsion(problem.molecule)
    summary = {
        "energy_electronic": result.energy,
        "energy_nuclear": repulsion,
        "energy_total": result.energy + repulsion,
        "iterations": result.iterations,
        "restarts": result.trace.restarts,
        "energy_evaluations": result.trace.energy_evaluations,
        "converged": result.converged,
        "a_minus_4eps_rel": a_minus_4eps,
    }
    write_trace(result.trace, out_dir / "trace.csv")
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if config.dump_orbitals:
        for i, f in enumerate(result.phi):
            dump_orbital(f, out_dir / f"orbital_{i:03d}.f64", index=i)
    return 0 if result.converged else 1


def _apply_thread_env() -> None:
    threads = os.environ.get(THREADS_ENV)
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="riemhf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one optimization job from a config file")
    run.add_argument("config", help="path to a key=value config file")
    run.add_argument("--seed", type=int, default=None, help="override the guess seed")
    run.add_argument("--out", default=None, help="override the output directory")
    args = parser.parse_args(argv)

    _apply_thread_env()
    try:
        config = parse_config(Path(args.config).read_text())
    except OSError as err:
        print(f"riemhf: {err}", file=sys.stderr)
        return 2
    except ConfigError as err:
        print(f"riemhf: config error: {err}", file=sys.stderr)
        return 2
    config = with_overrides(config, seed=args.seed, out_dir=args.out)
    return run_job(config)


if __name__ == "__main__":
    sys.exit(main())
