"""Embedded-H1 geometry of the Stiefel surface St(N).

Tangent projection reduces to a small symmetric Sylvester equation; the
retraction is Lowdin orthonormalization; the transporter is the projection
itself; the preconditioner inverts the kinetic operator T = 2 - (2 + A)R
in the eigenbasis of the projection matrix A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, KernelSpec, apply_kernel
from .hf import RESOLVENT_1, HfProblem, euclidean_gradient
from .orbitals import (
    EIG_CUTOFF,
    OrbitalVector,
    SingularOverlapError,
    gram_l2,
    lincomb,
    rotate,
)

__all__ = [
    "TangentVector",
    "NotSpdError",
    "solve_sym_sylvester",
    "project_tangent",
    "riemannian_gradient",
    "lowdin_retract",
    "transport",
    "precondition",
    "tangency_defect",
]

# eigenvalues of the projection matrix A are capped below this level inside
# the preconditioner, keeping T invertible during the first iterations
MU_FLOOR = 0.1


class NotSpdError(ValueError):
    """A matrix required to be symmetric positive definite is not."""


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A direction attached to a base point of St(N)."""

    base: OrbitalVector
    direction: OrbitalVector

    def norm_h1(self) -> float:
        return self.direction.norm_h1()


def _spd_eigh(matrix: np.ndarray, name: str) -> tuple[np.ndarray, np.ndarray]:
    m = 0.5 * (matrix + matrix.T)
    lam, vec = np.linalg.eigh(m)
    if lam[0] <= EIG_CUTOFF * max(abs(lam[-1]), 1.0):
        raise NotSpdError(f"{name} is not positive definite (min eigenvalue {lam[0]:.3e})")
    return lam, vec


def solve_sym_sylvester(b: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Solve A B + B A = M for symmetric A, with B SPD and M symmetric."""
    lam, u = _spd_eigh(b, "Sylvester matrix B")
    s = u.T @ m @ u
    y = s / (lam[:, None] + lam[None, :])
    a = u @ y @ u.T
    return 0.5 * (a + a.T)


def _resolvent_vector(phi: OrbitalVector) -> OrbitalVector:
    return OrbitalVector(tuple(apply_kernel(f, RESOLVENT_1) for f in phi))


def project_tangent(
    phi: OrbitalVector, u: OrbitalVector
) -> tuple[TangentVector, np.ndarray]:
    """H1-orthogonal projection onto the tangent space at phi.

    Returns the projected vector u - A (R phi) together with the symmetric
    matrix A solving A B + B A = C + C^T, B_ij = <R phi_i, phi_j>,
    C_ij = <u_i, phi_j>.
    """
    r_phi = _resolvent_vector(phi)
    b = gram_l2(r_phi, phi)
    c = gram_l2(u, phi)
    a = solve_sym_sylvester(b, c + c.T)
    direction = OrbitalVector.from_stack(u.grid, u.stack() - np.einsum(
        "ij,j...->i...", a, r_phi.stack()
    ))
    return TangentVector(phi, direction), a


def riemannian_gradient(
    phi: OrbitalVector, problem: HfProblem
) -> tuple[TangentVector, np.ndarray]:
    """Tangent projection of the Euclidean gradient; also returns A(grad E, phi)."""
    return project_tangent(phi, euclidean_gradient(phi, problem))


def lowdin_retract(phi: OrbitalVector, delta: OrbitalVector) -> OrbitalVector:
    """Map phi + delta back onto St(N) by S^{-1/2} Lowdin orthonormalization."""
    psi = lincomb(1.0, phi, 1.0, delta)
    s = gram_l2(psi)
    s = 0.5 * (s + s.T)
    lam, vec = np.linalg.eigh(s)
    if lam[0] <= EIG_CUTOFF * max(lam[-1], 1.0):
        raise SingularOverlapError(
            f"retraction overlap is singular (min eigenvalue {lam[0]:.3e})"
        )
    s_inv_half = (vec / np.sqrt(lam)) @ vec.T
    return rotate(s_inv_half, psi)


def transport(phi_new: OrbitalVector, v: TangentVector) -> TangentVector:
    """Carry a tangent vector to the tangent space at phi_new by projection."""
    moved, _ = project_tangent(phi_new, v.direction)
    return moved


def precondition(
    phi: OrbitalVector, g: TangentVector, a: np.ndarray
) -> TangentVector:
    """Apply Proj T^{-1} with T = 2 - (2 + A)R in the eigenbasis of A.

    Eigenvalues of A are floored at -MU_FLOOR so the diagonal symbols
    (|k|^2 + 1)/(2|k|^2 - mu) stay positive even before the spectrum of A
    turns negative.
    """
    a = 0.5 * (a + a.T)
    mu, u = np.linalg.eigh(a)
    mu = np.minimum(mu, -MU_FLOOR)
    rotated = rotate(u.T, g.direction)
    applied = OrbitalVector(
        tuple(
            apply_kernel(f, KernelSpec.tinv_component(float(m)))
            for f, m in zip(rotated, mu)
        )
    )
    back = rotate(u, applied)
    projected, _ = project_tangent(phi, back)
    return projected


def tangency_defect(phi: OrbitalVector, direction: OrbitalVector) -> float:
    """max_ij |<d_i, phi_j> + <phi_i, d_j>| over the L2 pairings."""
    c = gram_l2(direction, phi)
    return float(np.max(np.abs(c + c.T)))
