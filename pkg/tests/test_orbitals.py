"""Orbital-vector container, Gram matrices and Lowdin orthonormalization."""

import numpy as np
import pytest

from riemhf.grid import Field, inner_product
from riemhf.orbitals import (
    OrbitalVector,
    SingularOverlapError,
    gram_defect,
    gram_h1,
    gram_l2,
    inner_h1,
    lincomb,
    lowdin_orthonormalize,
    rotate,
)

from conftest import random_orthogonal, smooth_random_fields


def make_vector(grid, n, seed):
    return OrbitalVector(tuple(smooth_random_fields(grid, n, seed)))


def test_empty_vector_rejected():
    with pytest.raises(ValueError):
        OrbitalVector(())


def test_stack_round_trip(small_grid):
    phi = make_vector(small_grid, 3, seed=1)
    again = OrbitalVector.from_stack(small_grid, phi.stack())
    np.testing.assert_array_equal(again.stack(), phi.stack())
    assert again.n_orbitals == 3
    assert again.grid == small_grid


def test_gram_l2_matches_entrywise_inner_products(small_grid):
    phi = make_vector(small_grid, 3, seed=2)
    gram = gram_l2(phi)
    for i in range(3):
        for j in range(3):
            assert gram[i, j] == pytest.approx(
                inner_product(phi[i], phi[j], "L2"), rel=1e-13
            )


def test_gram_h1_matches_entrywise_inner_products(small_grid):
    u = make_vector(small_grid, 2, seed=3)
    v = make_vector(small_grid, 2, seed=4)
    gram = gram_h1(u, v)
    for i in range(2):
        for j in range(2):
            assert gram[i, j] == pytest.approx(
                inner_product(u[i], v[j], "H1"), rel=1e-12
            )


def test_inner_h1_is_gram_trace(small_grid):
    u = make_vector(small_grid, 3, seed=5)
    v = make_vector(small_grid, 3, seed=6)
    assert inner_h1(u, v) == pytest.approx(np.trace(gram_h1(u, v)), rel=1e-12)


def test_rotate_composes_linearly(small_grid):
    phi = make_vector(small_grid, 3, seed=7)
    m = np.arange(9.0).reshape(3, 3)
    rotated = rotate(m, phi)
    for i in range(3):
        expected = sum(m[i, j] * phi[j].values for j in range(3))
        np.testing.assert_allclose(rotated[i].values, expected, rtol=0, atol=1e-14)


def test_lincomb(small_grid):
    u = make_vector(small_grid, 2, seed=8)
    v = make_vector(small_grid, 2, seed=9)
    out = lincomb(2.0, u, -0.5, v)
    np.testing.assert_allclose(
        out.stack(), 2.0 * u.stack() - 0.5 * v.stack(), rtol=0, atol=1e-15
    )


def test_lowdin_orthonormalize_gram_identity(small_grid):
    phi = lowdin_orthonormalize(make_vector(small_grid, 4, seed=10))
    assert gram_defect(phi) <= 1e-12


def test_lowdin_fixes_orthonormal_input(small_grid):
    phi = lowdin_orthonormalize(make_vector(small_grid, 3, seed=11))
    again = lowdin_orthonormalize(phi)
    np.testing.assert_allclose(again.stack(), phi.stack(), rtol=0, atol=1e-12)


def test_lowdin_is_rotation_equivariant(small_grid):
    # Lowdin of Q phi equals Q times Lowdin of phi for orthogonal Q
    phi = make_vector(small_grid, 3, seed=12)
    q = random_orthogonal(3, seed=13)
    left = lowdin_orthonormalize(rotate(q, phi))
    right = rotate(q, lowdin_orthonormalize(phi))
    np.testing.assert_allclose(left.stack(), right.stack(), rtol=0, atol=1e-10)


def test_lowdin_singular_overlap(small_grid):
    (f,) = smooth_random_fields(small_grid, 1, seed=14)
    duplicated = OrbitalVector((f, Field(small_grid, f.values.copy())))
    with pytest.raises(SingularOverlapError):
        lowdin_orthonormalize(duplicated)
