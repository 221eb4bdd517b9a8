"""Quotient geometry Gr(N) = St(N)/O(N) on Stiefel representatives.

The quotient is never materialized: Grassmann gradients, preconditioning
and transport are the Stiefel operations followed by a projection onto the
horizontal space, the H1-orthogonal complement of the gauge directions
omega * phi with skew symmetric omega.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hf import HfProblem
from .orbitals import OrbitalVector, gram_h1
from .stiefel import (
    NotSpdError,
    TangentVector,
    _spd_eigh,
    precondition,
    project_tangent,
    riemannian_gradient,
    transport,
)

__all__ = [
    "HorizontalVector",
    "solve_skew_sylvester",
    "horizontal_project",
    "grassmann_gradient",
    "grassmann_precondition",
    "grassmann_transport",
    "horizontality_defect",
]


@dataclass(frozen=True, eq=False)
class HorizontalVector:
    """Tangent vector whose H1 pairing matrix with the base is symmetric."""

    base: OrbitalVector
    direction: OrbitalVector

    def norm_h1(self) -> float:
        return self.direction.norm_h1()

    def as_tangent(self) -> TangentVector:
        return TangentVector(self.base, self.direction)


def solve_skew_sylvester(phi_mat: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Solve omega Phi + Phi omega = K for skew omega, with Phi SPD and K skew."""
    lam, u = _spd_eigh(phi_mat, "horizontal Gram matrix Phi")
    s = u.T @ k @ u
    y = s / (lam[:, None] + lam[None, :])
    omega = u @ y @ u.T
    return 0.5 * (omega - omega.T)


def horizontal_project(phi: OrbitalVector, v: TangentVector) -> HorizontalVector:
    """Remove the gauge component: v - omega phi with omega from the skew Sylvester."""
    phi_mat = gram_h1(phi)
    psi = gram_h1(v.direction, phi)
    omega = solve_skew_sylvester(phi_mat, psi - psi.T)
    direction = OrbitalVector.from_stack(
        phi.grid, v.direction.stack() - np.einsum("ij,j...->i...", omega, phi.stack())
    )
    return HorizontalVector(phi, direction)


def grassmann_gradient(
    phi: OrbitalVector, problem: HfProblem
) -> tuple[HorizontalVector, np.ndarray]:
    """Horizontal lift of the quotient gradient; equals the Stiefel gradient
    up to a numerically small gauge component killed here."""
    tv, a = riemannian_gradient(phi, problem)
    return horizontal_project(phi, tv), a


def grassmann_precondition(
    phi: OrbitalVector, g: HorizontalVector, a: np.ndarray
) -> HorizontalVector:
    """Stiefel preconditioner followed by the horizontal projection."""
    pre = precondition(phi, g.as_tangent(), a)
    return horizontal_project(phi, pre)


def grassmann_transport(
    phi_new: OrbitalVector, v: HorizontalVector
) -> HorizontalVector:
    """Stiefel transport to phi_new, then projection onto its horizontal space."""
    moved = transport(phi_new, v.as_tangent())
    return horizontal_project(phi_new, moved)


def horizontality_defect(phi: OrbitalVector, direction: OrbitalVector) -> float:
    """Relative skewness of the H1 pairing matrix Psi_ij = <d_i, phi_j>_H1."""
    psi = gram_h1(direction, phi)
    scale = max(np.linalg.norm(psi), 1e-300)
    return float(np.linalg.norm(psi - psi.T) / scale)
