"""Restricted closed-shell Hartree-Fock energy, integrals and gradients.

Kinetic terms are evaluated through the H1/L2 identity
<grad f, grad g> = <f, g>_H1 - <f, g>_L2, so nothing here differentiates
a field explicitly; everything reduces to inner products and convolutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, Grid, KernelSpec, apply_kernel, inner_product, multiply
from .molecule import Molecule, nuclear_potential
from .orbitals import OrbitalVector

__all__ = [
    "HfProblem",
    "one_body",
    "two_body",
    "energy",
    "potential_action",
    "euclidean_gradient",
    "fock_matrix",
]

COULOMB = KernelSpec.coulomb()
RESOLVENT_1 = KernelSpec.resolvent(1.0)


@dataclass(frozen=True)
class HfProblem:
    """Fixed molecular data of one Hartree-Fock minimization."""

    molecule: Molecule
    grid: Grid
    softening: float
    potential: Field

    @classmethod
    def build(cls, molecule: Molecule, grid: Grid, softening: float) -> "HfProblem":
        v = nuclear_potential(molecule, grid, softening)
        return cls(molecule, grid, softening, v)


def one_body(i: Field, j: Field, v: Field) -> float:
    """(i|h|j) = <grad i, grad j>/2 + <V i, j> via the H1/L2 identity."""
    kinetic = 0.5 * (inner_product(i, j, "H1") - inner_product(i, j, "L2"))
    return kinetic + inner_product(multiply(v, i), j, "L2")


def two_body(i: Field, j: Field, k: Field, l: Field) -> float:
    """(ij|kl) = <J(i j), k l> with the truncated Coulomb convolution J."""
    return inner_product(apply_kernel(multiply(i, j), COULOMB), multiply(k, l), "L2")


def _pair_data(phi: OrbitalVector):
    """Pair densities d_ij = phi_i phi_j and their Coulomb potentials, i <= j."""
    n = phi.n_orbitals
    dens = {}
    pots = {}
    for i in range(n):
        for j in range(i, n):
            d = multiply(phi[i], phi[j])
            dens[i, j] = d
            pots[i, j] = apply_kernel(d, COULOMB)
    return dens, pots


def _sym_get(table, i, j):
    return table[(i, j) if i <= j else (j, i)]


def energy(phi: OrbitalVector, problem: HfProblem) -> float:
    """Electronic energy 2 sum_i (i|h|i) + sum_ij (2(ii|jj) - (ij|ij))."""
    n = phi.n_orbitals
    dens, pots = _pair_data(phi)
    e = 0.0
    for i in range(n):
        e += 2.0 * one_body(phi[i], phi[i], problem.potential)
    h3 = phi.grid.spacing**3
    for i in range(n):
        for j in range(n):
            coulomb = h3 * np.vdot(_sym_get(pots, i, i).values, _sym_get(dens, j, j).values)
            exchange = h3 * np.vdot(_sym_get(pots, i, j).values, _sym_get(dens, i, j).values)
            e += 2.0 * coulomb - exchange
    return float(e)


def potential_action(phi: OrbitalVector, problem: HfProblem) -> OrbitalVector:
    """Mean-field action (V(phi)phi)_i = V phi_i + sum_j (2 J(jj) phi_i - J(ij) phi_j)."""
    n = phi.n_orbitals
    _, pots = _pair_data(phi)
    hartree = np.zeros(phi.grid.shape)
    for j in range(n):
        hartree += 2.0 * pots[j, j].values
    out = []
    for i in range(n):
        values = (problem.potential.values + hartree) * phi[i].values
        for j in range(n):
            values -= _sym_get(pots, i, j).values * phi[j].values
        out.append(Field(phi.grid, values))
    return OrbitalVector(tuple(out))


def euclidean_gradient(phi: OrbitalVector, problem: HfProblem) -> OrbitalVector:
    """H1 representer of dE: components 2 phi_i + 4 R(V(phi)phi - phi/2)_i."""
    vphi = potential_action(phi, problem)
    out = []
    for f, vf in zip(phi, vphi):
        inner = Field(phi.grid, vf.values - 0.5 * f.values)
        smoothed = apply_kernel(inner, RESOLVENT_1)
        out.append(Field(phi.grid, 2.0 * f.values + 4.0 * smoothed.values))
    return OrbitalVector(tuple(out))


def fock_matrix(phi: OrbitalVector, problem: HfProblem) -> np.ndarray:
    """eps_ij = <grad phi_i, grad phi_j>/2 + <(V(phi)phi)_i, phi_j>, symmetrized."""
    n = phi.n_orbitals
    vphi = potential_action(phi, problem)
    eps = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            kinetic = 0.5 * (
                inner_product(phi[i], phi[j], "H1") - inner_product(phi[i], phi[j], "L2")
            )
            eps[i, j] = kinetic + inner_product(vphi[i], phi[j], "L2")
    return 0.5 * (eps + eps.T)
