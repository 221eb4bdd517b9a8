"""Orbital vectors (N-tuples of fields) and small dense matrix helpers.

An orbital vector is a point of the Stiefel surface St(N) once its L2 Gram
matrix equals the identity.  Rotations by small N x N matrices, Gram
matrices in both metrics and the Lowdin orthonormalization used all over
the geometry code live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import Field, Grid, GridMismatchError, inner_product

__all__ = [
    "OrbitalVector",
    "SingularOverlapError",
    "rotate",
    "lincomb",
    "gram_l2",
    "gram_h1",
    "lowdin_orthonormalize",
    "gram_defect",
]

# relative eigenvalue cutoff below which overlap matrices count as singular
EIG_CUTOFF = 1e-12


class SingularOverlapError(ValueError):
    """Overlap (Gram) matrix is numerically singular."""


@dataclass(frozen=True, eq=False)
class OrbitalVector:
    """Ordered tuple of N fields on a shared grid."""

    orbitals: tuple[Field, ...]

    def __post_init__(self):
        if len(self.orbitals) == 0:
            raise ValueError("orbital vector must hold at least one orbital")
        grid = self.orbitals[0].grid
        for f in self.orbitals[1:]:
            if f.grid != grid:
                raise GridMismatchError("orbitals live on different grids")
        object.__setattr__(self, "orbitals", tuple(self.orbitals))

    @property
    def n_orbitals(self) -> int:
        return len(self.orbitals)

    @property
    def grid(self) -> Grid:
        return self.orbitals[0].grid

    def stack(self) -> np.ndarray:
        return np.stack([f.values for f in self.orbitals])

    def __iter__(self):
        return iter(self.orbitals)

    def __getitem__(self, i: int) -> Field:
        return self.orbitals[i]

    def norm_l2(self) -> float:
        return float(np.sqrt(sum(inner_product(f, f, "L2") for f in self.orbitals)))

    def norm_h1(self) -> float:
        return float(
            np.sqrt(sum(max(inner_product(f, f, "H1"), 0.0) for f in self.orbitals))
        )

    def max_orbital_l2(self) -> float:
        return float(
            max(np.sqrt(inner_product(f, f, "L2")) for f in self.orbitals)
        )

    @classmethod
    def from_stack(cls, grid: Grid, stacked: np.ndarray) -> "OrbitalVector":
        return cls(tuple(Field(grid, v) for v in stacked))


def rotate(matrix: np.ndarray, phi: OrbitalVector) -> OrbitalVector:
    """Apply a small matrix to the orbital index: (M phi)_i = sum_j M_ij phi_j."""
    out = np.einsum("ij,j...->i...", np.asarray(matrix), phi.stack())
    return OrbitalVector.from_stack(phi.grid, out)


def lincomb(a: float, u: OrbitalVector, b: float, v: OrbitalVector) -> OrbitalVector:
    """Componentwise a*u + b*v."""
    if u.grid != v.grid or u.n_orbitals != v.n_orbitals:
        raise GridMismatchError("orbital vectors are not compatible")
    return OrbitalVector.from_stack(u.grid, a * u.stack() + b * v.stack())


def scale(a: float, u: OrbitalVector) -> OrbitalVector:
    return OrbitalVector.from_stack(u.grid, a * u.stack())


def gram_l2(u: OrbitalVector, v: OrbitalVector | None = None) -> np.ndarray:
    """Matrix of L2 inner products G_ij = <u_i, v_j>."""
    v = u if v is None else v
    h3 = u.grid.spacing**3
    return h3 * np.einsum("iabc,jabc->ij", u.stack(), v.stack())


def gram_h1(u: OrbitalVector, v: OrbitalVector | None = None) -> np.ndarray:
    """Matrix of H1 inner products G_ij = <u_i, v_j>_H1 (spectral evaluation)."""
    v = u if v is None else v
    grid = u.grid
    h3 = grid.spacing**3
    n3 = grid.points_per_axis**3
    w = grid.rfft_mode_weights * (1.0 + grid.k_squared_rfft)
    uh = np.fft.rfftn(u.stack(), axes=(1, 2, 3))
    vh = uh if v is u else np.fft.rfftn(v.stack(), axes=(1, 2, 3))
    return h3 / n3 * np.einsum("abc,iabc,jabc->ij", w, np.conj(uh), vh).real


def inner_h1(u: OrbitalVector, v: OrbitalVector) -> float:
    """Total H1 inner product sum_i <u_i, v_i>_H1."""
    return float(sum(inner_product(a, b, "H1") for a, b in zip(u, v)))


def lowdin_orthonormalize(phi: OrbitalVector) -> OrbitalVector:
    """Multiply by S^{-1/2} of the L2 overlap; the closest orthonormal tuple in L2."""
    s = gram_l2(phi)
    s = 0.5 * (s + s.T)
    lam, vec = np.linalg.eigh(s)
    if lam[0] <= EIG_CUTOFF * max(lam[-1], 1.0):
        raise SingularOverlapError(
            f"overlap matrix is numerically singular (min eigenvalue {lam[0]:.3e}); "
            "try a different guess seed"
        )
    s_inv_half = (vec / np.sqrt(lam)) @ vec.T
    return rotate(s_inv_half, phi)


def gram_defect(phi: OrbitalVector) -> float:
    """Frobenius distance of the L2 Gram matrix from the identity."""
    return float(np.linalg.norm(gram_l2(phi) - np.eye(phi.n_orbitals)))
