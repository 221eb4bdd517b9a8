"""Solvers: Riemannian steepest descent, preconditioned nonlinear CG and
the preconditioned SCF fixed point, with shared Armijo backtracking,
termination logic and trace recording."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .grid import Field, KernelSpec, apply_kernel
from .hf import HfProblem, energy as hf_energy, fock_matrix, potential_action
from .orbitals import (
    OrbitalVector,
    gram_defect,
    inner_h1,
    lowdin_orthonormalize,
    rotate,
)
from . import grassmann as gr
from . import stiefel as st

__all__ = [
    "LineSearchParams",
    "CgParams",
    "StopCriteria",
    "TraceRow",
    "OptimizerTrace",
    "OptimizeResult",
    "NonDescentError",
    "LineSearchError",
    "ScfDivergenceError",
    "armijo_linesearch",
    "steepest_descent",
    "conjugate_gradient",
    "scf_fixed_point",
    "StiefelGeometry",
    "GrassmannGeometry",
]

MAX_HALVINGS = 60
SCF_EIG_FLOOR = -0.1


class NonDescentError(ValueError):
    """Line search was started along a non-descent direction."""


class LineSearchError(RuntimeError):
    """No acceptable step found; gradient is at the noise floor."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ScfDivergenceError(RuntimeError):
    """SCF energy rose for several consecutive iterations."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class LineSearchParams:
    r: float = 1e-4
    r_bar: float = 0.7
    tau: float = 0.5
    gamma: float = 1.4
    alpha_max: float = 10.0
    alpha0: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.r < self.r_bar < 1.0:
            raise ValueError("line search requires 0 < r < r_bar < 1")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        if not self.alpha_max > 0.0:
            raise ValueError("alpha_max must be positive")
        if not 0.0 < self.alpha0 <= self.alpha_max:
            raise ValueError("alpha0 must lie in (0, alpha_max]")


@dataclass(frozen=True)
class CgParams:
    beta_max: float = 5.0
    eta_powell: float = 0.3
    restart_cooldown: int = 4
    restart_on_reject: bool = False
    manifold: str = "stiefel"

    def __post_init__(self):
        if not self.beta_max > 0.0:
            raise ValueError("beta_max must be positive")
        if not self.eta_powell > 0.0:
            raise ValueError("eta_powell must be positive")
        if self.restart_cooldown < 1:
            raise ValueError("restart_cooldown must be at least 1")
        if self.manifold not in ("stiefel", "grassmann"):
            raise ValueError("manifold must be 'stiefel' or 'grassmann'")


@dataclass(frozen=True)
class StopCriteria:
    update_tol_l2: float = 1e-4
    max_iterations: int = 200

    def __post_init__(self):
        if not self.update_tol_l2 > 0.0:
            raise ValueError("update_tol_l2 must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    energy: float
    grad_h1: float
    update_l2: float
    alpha: float
    beta: float
    restart: bool
    energy_evals: int
    wall_ms: float


@dataclass
class OptimizerTrace:
    rows: list[TraceRow] = field(default_factory=list)

    def append(self, row: TraceRow) -> None:
        self.rows.append(row)

    @property
    def restarts(self) -> int:
        return sum(r.restart for r in self.rows)

    @property
    def energy_evaluations(self) -> int:
        return sum(r.energy_evals for r in self.rows)

    def energies(self) -> list[float]:
        return [r.energy for r in self.rows]


@dataclass
class OptimizeResult:
    phi: OrbitalVector
    trace: OptimizerTrace
    converged: bool
    energy: float
    iterations: int


class StiefelGeometry:
    """Stiefel-manifold operation bundle consumed by the solver loops."""

    def __init__(self, problem: HfProblem):
        self.problem = problem

    def energy(self, phi):
        return hf_energy(phi, self.problem)

    def gradient(self, phi):
        return st.riemannian_gradient(phi, self.problem)

    def precondition(self, phi, g, a):
        return st.precondition(phi, g, a)

    def transport(self, phi_new, v):
        return st.transport(phi_new, v)

    def retract(self, phi, v, alpha):
        delta = OrbitalVector.from_stack(phi.grid, alpha * v.direction.stack())
        return st.lowdin_retract(phi, delta)

    def inner(self, u, v) -> float:
        return inner_h1(u.direction, v.direction)

    def norm(self, v) -> float:
        return float(np.sqrt(max(self.inner(v, v), 0.0)))

    def negate(self, v):
        return type(v)(v.base, OrbitalVector.from_stack(v.base.grid, -v.direction.stack()))

    def combine(self, a, u, b, v):
        direction = OrbitalVector.from_stack(
            u.base.grid, a * u.direction.stack() + b * v.direction.stack()
        )
        return type(u)(u.base, direction)

    def update_norm(self, phi_old, phi_new) -> float:
        diff = phi_new.stack() - phi_old.stack()
        h3 = phi_old.grid.spacing**3
        per_orbital = np.sqrt(h3 * np.sum(diff * diff, axis=(1, 2, 3)))
        return float(per_orbital.max())

    def feasibility(self, phi) -> float:
        return gram_defect(phi)


class GrassmannGeometry(StiefelGeometry):
    """Stiefel operations with horizontal projections inserted after the
    gradient, preconditioner and transport steps; retraction unchanged on
    representatives."""

    def gradient(self, phi):
        return gr.grassmann_gradient(phi, self.problem)

    def precondition(self, phi, g, a):
        return gr.grassmann_precondition(phi, g, a)

    def transport(self, phi_new, v):
        return gr.grassmann_transport(phi_new, v)


def make_geometry(problem: HfProblem, manifold: str) -> StiefelGeometry:
    if manifold == "stiefel":
        return StiefelGeometry(problem)
    if manifold == "grassmann":
        return GrassmannGeometry(problem)
    raise ValueError(f"unknown manifold {manifold!r}")


@dataclass
class LineSearchResult:
    alpha: float
    phi_next: object
    energy: float
    next_trial: float
    evals: int
    rejections: int


def armijo_linesearch(
    phi,
    p,
    grad,
    g0: float,
    alpha_trial: float,
    params: LineSearchParams,
    geometry,
) -> LineSearchResult:
    """Backtracking Armijo search along p starting from trial step alpha_trial.

    Shrinks by tau until g(alpha) <= g(0) + r alpha <p, grad>_H1; grows the
    next trial by gamma when the stronger r_bar margin also holds.
    """
    slope = geometry.inner(p, grad)
    if not slope < 0.0:
        raise NonDescentError(f"search direction has slope {slope:.3e} >= 0")
    alpha = alpha_trial
    evals = 0
    for halving in range(MAX_HALVINGS + 1):
        phi_next = geometry.retract(phi, p, alpha)
        g_alpha = geometry.energy(phi_next)
        evals += 1
        if g_alpha <= g0 + params.r * alpha * slope:
            if g_alpha <= g0 + params.r_bar * alpha * slope:
                next_trial = min(params.gamma * alpha, params.alpha_max)
            else:
                next_trial = alpha
            return LineSearchResult(alpha, phi_next, g_alpha, next_trial, evals, halving)
        alpha *= params.tau
    raise LineSearchError(
        f"no acceptable step after {MAX_HALVINGS} halvings "
        "(gradient likely at the numerical noise floor)"
    )


def steepest_descent(
    problem: HfProblem,
    phi0: OrbitalVector,
    ls: LineSearchParams | None = None,
    stop: StopCriteria | None = None,
) -> OptimizeResult:
    """Riemannian steepest descent with Armijo backtracking."""
    ls = ls or LineSearchParams()
    stop = stop or StopCriteria()
    geom = StiefelGeometry(problem)
    trace = OptimizerTrace()
    phi = phi0
    current_energy = geom.energy(phi)
    trial = ls.alpha0
    converged = False
    iterations = 0
    for it in range(1, stop.max_iterations + 1):
        t0 = time.perf_counter()
        grad, _ = geom.gradient(phi)
        gnorm = geom.norm(grad)
        p = geom.negate(grad)
        try:
            res = armijo_linesearch(phi, p, grad, current_energy, trial, ls, geom)
        except LineSearchError as err:
            err.trace = trace
            raise
        update = geom.update_norm(phi, res.phi_next)
        phi = res.phi_next
        current_energy = res.energy
        trial = res.next_trial
        wall = (time.perf_counter() - t0) * 1e3
        trace.append(
            TraceRow(it, current_energy, gnorm, update, res.alpha, 0.0, False, res.evals, wall)
        )
        iterations = it
        if update < stop.update_tol_l2:
            converged = True
            break
    return OptimizeResult(phi, trace, converged, current_energy, iterations)


def conjugate_gradient(
    problem: HfProblem | None,
    phi0,
    ls: LineSearchParams | None = None,
    cg: CgParams | None = None,
    stop: StopCriteria | None = None,
    geometry=None,
) -> OptimizeResult:
    """Preconditioned nonlinear CG with Polak-Ribiere beta, capping at
    beta_max, a descent safeguard and cooldown-gated Powell restarts."""
    ls = ls or LineSearchParams(alpha0=1.0)
    cg = cg or CgParams()
    stop = stop or StopCriteria()
    geom = geometry if geometry is not None else make_geometry(problem, cg.manifold)
    trace = OptimizerTrace()

    phi = phi0
    current_energy = geom.energy(phi)
    grad, a_mat = geom.gradient(phi)
    pre_grad = geom.precondition(phi, grad, a_mat)
    p = geom.negate(pre_grad)
    trial = ls.alpha0
    last_restart = 0
    converged = False
    iterations = 0

    for n in range(stop.max_iterations):
        t0 = time.perf_counter()
        try:
            res = armijo_linesearch(phi, p, grad, current_energy, trial, ls, geom)
        except LineSearchError as err:
            err.trace = trace
            raise
        phi_next = res.phi_next
        grad_next, a_next = geom.gradient(phi_next)
        pre_grad_next = geom.precondition(phi_next, grad_next, a_next)
        moved_pre_grad = geom.transport(phi_next, pre_grad)
        moved_p = geom.transport(phi_next, p)

        denom = geom.inner(pre_grad, grad)
        diff = geom.combine(1.0, pre_grad_next, -1.0, moved_pre_grad)
        beta_pr = geom.inner(diff, grad_next) / denom
        beta = min(max(beta_pr, 0.0), cg.beta_max)
        p_next = geom.combine(-1.0, pre_grad_next, beta, moved_p)

        restart = False
        if geom.inner(p_next, grad_next) >= 0.0:
            restart = True
        elif n - last_restart > cg.restart_cooldown:
            powell = geom.inner(moved_pre_grad, grad_next) / denom
            if powell >= cg.eta_powell:
                restart = True
        if cg.restart_on_reject and res.rejections > 0:
            restart = True
        if restart:
            beta = 0.0
            p_next = geom.negate(pre_grad_next)
            last_restart = n

        update = geom.update_norm(phi, phi_next)
        wall = (time.perf_counter() - t0) * 1e3
        trace.append(
            TraceRow(
                n + 1,
                res.energy,
                geom.norm(grad_next),
                update,
                res.alpha,
                beta,
                restart,
                res.evals,
                wall,
            )
        )
        phi = phi_next
        current_energy = res.energy
        grad, a_mat = grad_next, a_next
        pre_grad = pre_grad_next
        p = p_next
        trial = res.next_trial
        iterations = n + 1
        if update < stop.update_tol_l2:
            converged = True
            break
    return OptimizeResult(phi, trace, converged, current_energy, iterations)


def scf_fixed_point(
    problem: HfProblem,
    phi0: OrbitalVector,
    stop: StopCriteria | None = None,
) -> OptimizeResult:
    """Preconditioned SCF: invert -Delta/2 - eps against the mean-field
    action each sweep, in the eigenbasis of the Fock matrix."""
    stop = stop or StopCriteria()
    trace = OptimizerTrace()
    phi = phi0
    current_energy = hf_energy(phi, problem)
    converged = False
    iterations = 0
    energy_rises = 0
    for it in range(1, stop.max_iterations + 1):
        t0 = time.perf_counter()
        eps = fock_matrix(phi, problem)
        lam, w = np.linalg.eigh(eps)
        lam = np.minimum(lam, SCF_EIG_FLOOR)
        vphi = potential_action(phi, problem)
        vphi_rot = rotate(w.T, vphi)
        new_fields = []
        for f, e in zip(vphi_rot, lam):
            shifted = apply_kernel(f, KernelSpec.scf_shift(float(e)))
            new_fields.append(Field(phi.grid, -shifted.values))
        phi_next = rotate(w, OrbitalVector(tuple(new_fields)))
        phi_next = lowdin_orthonormalize(phi_next)

        diff = phi_next.stack() - phi.stack()
        h3 = phi.grid.spacing**3
        update = float(np.sqrt(h3 * np.sum(diff * diff, axis=(1, 2, 3))).max())
        next_energy = hf_energy(phi_next, problem)
        if next_energy > current_energy:
            energy_rises += 1
        else:
            energy_rises = 0
        gnorm = st.riemannian_gradient(phi_next, problem)[0].norm_h1()
        wall = (time.perf_counter() - t0) * 1e3
        trace.append(TraceRow(it, next_energy, gnorm, update, 0.0, 0.0, False, 1, wall))
        phi = phi_next
        current_energy = next_energy
        iterations = it
        if energy_rises >= 5:
            raise ScfDivergenceError(
                "SCF energy rose for 5 consecutive iterations", trace=trace
            )
        if update < stop.update_tol_l2:
            converged = True
            break
    return OptimizeResult(phi, trace, converged, current_energy, iterations)
