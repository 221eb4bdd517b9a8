"""Energy, integral and gradient unit tests with analytic Gaussian oracles."""

import numpy as np
import pytest

from riemhf.grid import Field, create_grid, sample
from riemhf.hf import (
    HfProblem,
    energy,
    euclidean_gradient,
    fock_matrix,
    one_body,
    potential_action,
    two_body,
)
from riemhf.molecule import Atom, Molecule
from riemhf.orbitals import OrbitalVector, gram_h1, inner_h1, lincomb, rotate

from conftest import random_orbitals, random_orthogonal, smooth_random_fields


def normalized_gaussian(grid, alpha):
    """L2-normalized Gaussian (2 alpha / pi)^(3/4) exp(-alpha r^2)."""
    norm = (2.0 * alpha / np.pi) ** 0.75
    return sample(
        grid, lambda x, y, z: norm * np.exp(-alpha * (x * x + y * y + z * z))
    )


def free_problem(grid):
    """Electrons in a zero external potential (kinetic + interaction only)."""
    mol = Molecule((Atom("H", 1.0, (0.0, 0.0, 0.0)),))
    return HfProblem(mol, grid, grid.spacing, Field(grid, np.zeros(grid.shape)))


def test_one_body_kinetic_of_gaussian():
    # <grad phi, grad phi>/2 = 3 alpha / 2 for a normalized Gaussian
    grid = create_grid(16.0, 32)
    alpha = 0.5
    phi = normalized_gaussian(grid, alpha)
    zero = Field(grid, np.zeros(grid.shape))
    assert one_body(phi, phi, zero) == pytest.approx(1.5 * alpha, rel=1e-7)


def test_two_body_gaussian_self_energy():
    # self-repulsion of the density phi^2 (a Gaussian of exponent 2 alpha)
    # is sqrt(2 * (2 alpha) / pi) analytically
    grid = create_grid(16.0, 32)
    alpha = 0.5
    phi = normalized_gaussian(grid, alpha)
    expected = np.sqrt(4.0 * alpha / np.pi)
    assert two_body(phi, phi, phi, phi) == pytest.approx(expected, rel=1e-5)


def test_two_body_positivity(small_grid):
    (f,) = smooth_random_fields(small_grid, 1, seed=1)
    assert two_body(f, f, f, f) > 0.0


def test_two_body_index_symmetries(small_grid):
    a, b, c, d = smooth_random_fields(small_grid, 4, seed=2)
    ref = two_body(a, b, c, d)
    assert two_body(b, a, c, d) == pytest.approx(ref, rel=1e-12)
    assert two_body(c, d, a, b) == pytest.approx(ref, rel=1e-12)


def test_single_orbital_free_energy_analytic():
    # N = 1, V = 0: E = 2 * (3 alpha / 2) + (11|11) = 3 alpha + sqrt(4 alpha / pi)
    grid = create_grid(16.0, 32)
    alpha = 0.5
    phi = OrbitalVector((normalized_gaussian(grid, alpha),))
    expected = 3.0 * alpha + np.sqrt(4.0 * alpha / np.pi)
    assert energy(phi, free_problem(grid)) == pytest.approx(expected, rel=1e-5)


def test_energy_matches_explicit_integral_sum(h2_problem):
    # re-assemble the energy from one_body/two_body calls only
    phi = random_orbitals(h2_problem.grid, 2, seed=3)
    n = phi.n_orbitals
    expected = sum(2.0 * one_body(phi[i], phi[i], h2_problem.potential) for i in range(n))
    for i in range(n):
        for j in range(n):
            expected += 2.0 * two_body(phi[i], phi[i], phi[j], phi[j])
            expected -= two_body(phi[i], phi[j], phi[i], phi[j])
    assert energy(phi, h2_problem) == pytest.approx(expected, rel=1e-12)


def test_energy_rotation_invariance(h2_problem):
    phi = random_orbitals(h2_problem.grid, 3, seed=4)
    q = random_orthogonal(3, seed=5)
    assert energy(rotate(q, phi), h2_problem) == pytest.approx(
        energy(phi, h2_problem), rel=1e-10
    )


def test_potential_action_equivariance(h2_problem):
    # V(Q phi)(Q phi) = Q (V(phi) phi) for orthogonal Q
    phi = random_orbitals(h2_problem.grid, 2, seed=6)
    q = random_orthogonal(2, seed=7)
    left = potential_action(rotate(q, phi), h2_problem)
    right = rotate(q, potential_action(phi, h2_problem))
    scale = np.abs(right.stack()).max()
    np.testing.assert_allclose(left.stack(), right.stack(), rtol=0, atol=1e-10 * scale)


def test_euclidean_gradient_equivariance(h2_problem):
    phi = random_orbitals(h2_problem.grid, 2, seed=8)
    q = random_orthogonal(2, seed=9)
    left = euclidean_gradient(rotate(q, phi), h2_problem)
    right = rotate(q, euclidean_gradient(phi, h2_problem))
    scale = np.abs(right.stack()).max()
    np.testing.assert_allclose(left.stack(), right.stack(), rtol=0, atol=1e-10 * scale)


def test_euclidean_gradient_is_h1_representer(h2_problem):
    # <grad E, v>_H1 must match central differences of E along arbitrary
    # (not necessarily tangent) directions
    phi = random_orbitals(h2_problem.grid, 2, seed=10)
    grad = euclidean_gradient(phi, h2_problem)
    for seed in (11, 12, 13):
        v = OrbitalVector(tuple(smooth_random_fields(h2_problem.grid, 2, seed)))
        predicted = inner_h1(grad, v)
        best = np.inf
        for t in (1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5):
            plus = energy(lincomb(1.0, phi, t, v), h2_problem)
            minus = energy(lincomb(1.0, phi, -t, v), h2_problem)
            fd = (plus - minus) / (2.0 * t)
            best = min(best, abs(fd - predicted) / abs(predicted))
        assert best <= 1e-5


def test_fock_matrix_symmetric_and_consistent(h2_problem):
    phi = random_orbitals(h2_problem.grid, 3, seed=14)
    eps = fock_matrix(phi, h2_problem)
    np.testing.assert_allclose(eps, eps.T, rtol=0, atol=1e-14)
    # bookkeeping identity: E = sum_i [ (i|h|i) + eps_ii ]
    expected = sum(
        one_body(phi[i], phi[i], h2_problem.potential) + eps[i, i]
        for i in range(phi.n_orbitals)
    )
    assert energy(phi, h2_problem) == pytest.approx(expected, rel=1e-11)


def test_energy_finite_for_on_manifold_vectors(h2_problem):
    for seed in (20, 21):
        phi = random_orbitals(h2_problem.grid, 2, seed=seed)
        e = energy(phi, h2_problem)
        assert np.isfinite(e)


def test_problem_build_uses_nuclear_potential(h2_molecule):
    grid = create_grid(12.0, 16)
    problem = HfProblem.build(h2_molecule, grid, 0.3)
    assert problem.softening == 0.3
    assert problem.potential.values.min() < -1.0
