"""Shared fixtures: small grids, molecules and on-manifold orbital vectors."""

import numpy as np
import pytest

from riemhf.grid import Field, KernelSpec, apply_kernel, create_grid
from riemhf.hf import HfProblem
from riemhf.molecule import Atom, Molecule
from riemhf.orbitals import OrbitalVector, lowdin_orthonormalize
from riemhf.stiefel import project_tangent


@pytest.fixture
def small_grid():
    return create_grid(8.0, 16)


@pytest.fixture
def h2_molecule():
    return Molecule(
        (
            Atom("H", 1.0, (0.0, 0.0, -0.7)),
            Atom("H", 1.0, (0.0, 0.0, 0.7)),
        )
    )


@pytest.fixture
def h2_problem(h2_molecule):
    grid = create_grid(12.0, 16)
    return HfProblem.build(h2_molecule, grid, grid.spacing)


def smooth_random_fields(grid, count, seed):
    """Band-limited random fields: white noise smoothed by two resolvents."""
    rng = np.random.default_rng(seed)
    fields = []
    for _ in range(count):
        f = Field(grid, rng.standard_normal(grid.shape))
        f = apply_kernel(f, KernelSpec.resolvent(1.0))
        f = apply_kernel(f, KernelSpec.resolvent(1.0))
        fields.append(f)
    return fields


def random_orbitals(grid, n, seed):
    """Random smooth orbital vector orthonormalized onto St(N)."""
    return lowdin_orthonormalize(OrbitalVector(tuple(smooth_random_fields(grid, n, seed))))


def random_tangent(phi, seed):
    """Random smooth tangent vector at phi."""
    raw = OrbitalVector(tuple(smooth_random_fields(phi.grid, phi.n_orbitals, seed)))
    tv, _ = project_tangent(phi, raw)
    return tv


def random_orthogonal(n, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))
