"""Dense complex linear algebra: LU solves, orthonormalization,
perpendicular projection with its cost contract, and spectral condition
numbers checked against numpy's independent SVD.
"""

import numpy as np
import pytest

from witness_sampler.errors import (DimensionError, RankDeficiencyError,
                                    SingularMatrixError)
from witness_sampler.linalg import (OpCounter, condition_number, lu_solve,
                                    nullspace_basis, orthonormalize,
                                    project_perpendicular,
                                    random_unit_circle, singular_values)

RNG = np.random.default_rng(41)


def random_matrix(rows, cols):
    return RNG.standard_normal((rows, cols)) \
        + 1j * RNG.standard_normal((rows, cols))


def random_vector(n):
    return RNG.standard_normal(n) + 1j * RNG.standard_normal(n)


# ---------------------------------------------------------------------------
# lu_solve
# ---------------------------------------------------------------------------

def test_lu_identity():
    rhs = random_vector(4)
    x = lu_solve(np.eye(4, dtype=np.complex128), rhs)
    assert np.allclose(x, rhs, atol=1e-15)


def test_lu_diagonal():
    A = np.diag([2.0, 4.0]).astype(np.complex128)
    x = lu_solve(A, np.array([2.0, 8.0], np.complex128))
    assert np.allclose(x, [1.0, 2.0], atol=1e-15)


def test_lu_residual_bound():
    for _ in range(10):
        A = random_matrix(5, 5)
        rhs = random_vector(5)
        x = lu_solve(A, rhs)
        res = np.linalg.norm(A @ x - rhs)
        bound = 1e-10 * (np.linalg.norm(A) * np.linalg.norm(x)
                         + np.linalg.norm(rhs))
        assert res <= bound


def test_lu_reproduces_known_solution():
    for _ in range(10):
        A = random_matrix(6, 6)
        if condition_number(A) >= 1e6:
            continue
        x_known = random_vector(6)
        x = lu_solve(A, A @ x_known)
        assert np.linalg.norm(x - x_known) <= 1e-8 * np.linalg.norm(x_known)


def test_lu_singular_reports_pivot():
    A = np.zeros((3, 3), np.complex128)
    A[0, 0] = 1.0
    A[1, 1] = 1.0
    with pytest.raises(SingularMatrixError) as err:
        lu_solve(A, np.ones(3, np.complex128))
    assert err.value.pivot_index == 2


def test_lu_dimension_checks():
    with pytest.raises(DimensionError):
        lu_solve(random_matrix(3, 2), random_vector(3))
    with pytest.raises(DimensionError):
        lu_solve(random_matrix(3, 3), random_vector(2))


# ---------------------------------------------------------------------------
# orthonormalize
# ---------------------------------------------------------------------------

def test_orthonormalize_identity_columns():
    M = np.eye(5, dtype=np.complex128)[:, :3]
    V = orthonormalize(M)
    assert np.allclose(V, M, atol=1e-15)


def test_orthonormalize_detects_dependence():
    M = random_matrix(6, 3)
    M[:, 2] = 2.0 * M[:, 0]
    with pytest.raises(RankDeficiencyError):
        orthonormalize(M)


def test_orthonormalize_random():
    M = random_matrix(8, 3)
    V = orthonormalize(M)
    gram = V.conj().T @ V
    assert np.abs(gram - np.eye(3)).max() <= 1e-12
    # every original column reconstructs from the new basis
    for i in range(3):
        c = V.conj().T @ M[:, i]
        assert np.linalg.norm(V @ c - M[:, i]) \
            <= 1e-10 * np.linalg.norm(M[:, i])


def test_orthonormalize_idempotent():
    V = orthonormalize(random_matrix(7, 4))
    again = orthonormalize(V)
    assert np.abs(again - V).max() <= 1e-13


# ---------------------------------------------------------------------------
# project_perpendicular
# ---------------------------------------------------------------------------

def test_project_in_span_vanishes():
    W = orthonormalize(random_matrix(6, 2))
    u = W @ random_vector(2)
    r = project_perpendicular(u, W)
    assert np.linalg.norm(r) <= 1e-10 * np.linalg.norm(u)


def test_project_orthogonal_unchanged():
    W = np.eye(5, dtype=np.complex128)[:, :2]
    u = np.array([0, 0, 1.0, 2.0, 3.0], np.complex128)
    r = project_perpendicular(u, W)
    assert np.allclose(r, u, atol=1e-15)


def test_project_random_orthogonality():
    W = orthonormalize(random_matrix(9, 4))
    u = random_vector(9)
    r = project_perpendicular(u, W)
    for i in range(4):
        assert abs(np.vdot(W[:, i], r)) <= 1e-10
    assert np.linalg.norm(r) <= np.linalg.norm(u) + 1e-15
    again = project_perpendicular(r, W)
    assert np.linalg.norm(again - r) <= 1e-12 * max(np.linalg.norm(u), 1.0)


def test_project_cost_contract():
    n, k = 12, 5
    W = orthonormalize(random_matrix(n, k))
    counter = OpCounter()
    project_perpendicular(random_vector(n), W, counter)
    assert counter.inner_products == k
    assert counter.vector_updates == k
    assert counter.scalar_multiplications == 2 * k * n


def test_project_counted_matches_vectorized():
    W = orthonormalize(random_matrix(8, 3))
    u = random_vector(8)
    assert np.allclose(project_perpendicular(u, W),
                       project_perpendicular(u, W, OpCounter()), atol=1e-13)


# ---------------------------------------------------------------------------
# condition_number
# ---------------------------------------------------------------------------

def test_condition_identity():
    assert condition_number(np.eye(4, dtype=np.complex128)) \
        == pytest.approx(1.0, abs=1e-12)


def test_condition_diagonal():
    A = np.diag([4.0, 2.0]).astype(np.complex128)
    assert condition_number(A) == pytest.approx(2.0, abs=1e-10)


def test_condition_matches_numpy_svd():
    for _ in range(10):
        A = random_matrix(6, 6)
        ref = np.linalg.svd(A, compute_uv=False)
        expected = ref[0] / ref[-1]
        assert condition_number(A) == pytest.approx(expected, rel=1e-6)


def test_singular_values_match_numpy():
    A = random_matrix(7, 7)
    ref = np.linalg.svd(A, compute_uv=False)
    ours = singular_values(A)
    assert np.abs(ours - ref).max() <= 1e-8 * ref[0]


def test_condition_scalar_invariance():
    A = random_matrix(5, 5)
    base = condition_number(A)
    for c in (3.0, -2.0j, 0.5 + 0.5j):
        assert condition_number(c * A) == pytest.approx(base, rel=1e-10)


def test_condition_singular_sentinel():
    A = np.zeros((3, 3), np.complex128)
    A[0, 0] = 1.0
    assert condition_number(A) == float("inf")


# ---------------------------------------------------------------------------
# random_unit_circle and norm preservation
# ---------------------------------------------------------------------------

def test_unit_circle_moduli_and_determinism():
    a = random_unit_circle(100, seed=3)
    assert np.abs(np.abs(a) - 1.0).max() <= 1e-15
    b = random_unit_circle(100, seed=3)
    assert np.array_equal(a, b)


def test_unit_circle_mean_near_zero():
    a = random_unit_circle(10_000, seed=1)
    assert abs(a.mean()) < 0.05


def test_orthonormal_basis_preserves_norm():
    V = orthonormalize(random_matrix(9, 4))
    for _ in range(10):
        xi = random_vector(4)
        assert np.linalg.norm(V @ xi) \
            == pytest.approx(np.linalg.norm(xi), rel=1e-12)


def test_nullspace_basis_annihilates_rows():
    A = random_matrix(2, 6)
    N = nullspace_basis(A)
    assert N.shape == (6, 4)
    assert np.abs(A @ N).max() <= 1e-10
    gram = N.conj().T @ N
    assert np.abs(gram - np.eye(4)).max() <= 1e-10
