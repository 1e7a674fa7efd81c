"""Dense complex linear algebra kernels.

Everything here works on complex128 ndarrays and is sized for the small
systems this package tracks (restricted Jacobians of a few dozen rows at
most). The LU and condition-number routines are written out longhand so
their failure behavior (pivot index, +inf sentinel) is exactly specified.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (DimensionError, RankDeficiencyError,
                     SingularMatrixError)

__all__ = [
    "OpCounter",
    "lu_solve",
    "orthonormalize",
    "project_perpendicular",
    "condition_number",
    "singular_values",
    "nullspace_basis",
    "random_unit_circle",
]

CONDITION_SIZE_LIMIT = 32
SINGULAR_FLOOR = 1e-300


@dataclass
class OpCounter:
    """Tallies the vector operations of project_perpendicular.

    scalar_multiplications counts n multiplies per inner product and n per
    vector update, so a k-column projection on length-n vectors records
    exactly k + k ops and 2*k*n scalar multiplications.
    """

    inner_products: int = 0
    vector_updates: int = 0
    scalar_multiplications: int = 0


def _as_square(A):
    A = np.asarray(A, np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError("expected a square matrix, got shape %s"
                             % (A.shape,))
    return A


def lu_solve(A, rhs):
    """Solve A x = rhs by LU with partial pivoting.

    Args:
        A: square complex matrix.
        rhs: complex vector of matching length.

    Returns:
        solution vector x.

    Raises:
        SingularMatrixError: a pivot fell below 1e-14 * max|A|; the error
            carries the elimination index.
    """
    A = _as_square(A)
    rhs = np.asarray(rhs, np.complex128)
    if rhs.shape != (A.shape[0],):
        raise DimensionError("rhs has shape %s, expected (%d,)"
                             % (rhs.shape, A.shape[0]))
    x, status = _kernels.lu_solve_packed(A.copy(), rhs.copy())
    if status >= 0:
        raise SingularMatrixError(status)
    return x


def orthonormalize(M):
    """Orthonormalize the columns of M by modified Gram-Schmidt.

    One reorthogonalization pass keeps the result orthonormal to roundoff
    even for nearly dependent inputs.

    Returns:
        matrix of the same shape with orthonormal columns spanning the same
        space.

    Raises:
        RankDeficiencyError: a column's norm dropped below 1e-12 of its
            original norm after projection.
    """
    M = np.asarray(M, np.complex128)
    if M.ndim != 2:
        raise DimensionError("expected a matrix, got shape %s" % (M.shape,))
    n, k = M.shape
    if k > n:
        raise DimensionError("cannot orthonormalize %d columns in "
                             "dimension %d" % (k, n))
    V = np.empty_like(M)
    for i in range(k):
        v = M[:, i].astype(np.complex128, copy=True)
        original = np.linalg.norm(v)
        for _ in range(2):
            for j in range(i):
                v -= (V[:, j].conj() @ v) * V[:, j]
        nv = np.linalg.norm(v)
        if nv <= 1e-12 * original or original == 0.0:
            raise RankDeficiencyError(
                "column %d is dependent (residual norm %.3e of %.3e)"
                % (i, nv, original))
        V[:, i] = v / nv
    return V


def project_perpendicular(u, basis, counter=None):
    """Component of u perpendicular to the orthonormal columns of basis.

    Computes u - sum_i (w_i* u) w_i with one inner product and one vector
    update per column (classical Gram-Schmidt step; adequate because the
    basis is orthonormal). Cost is O(k n) scalar multiplications.

    Args:
        u: complex vector of length n.
        basis: complex (n, k) matrix with orthonormal columns.
        counter: optional OpCounter; when given, the loop form runs and the
            counter is updated.
    """
    u = np.asarray(u, np.complex128)
    basis = np.asarray(basis, np.complex128)
    if basis.ndim != 2 or basis.shape[0] != u.shape[0]:
        raise DimensionError("basis shape %s does not match vector length %d"
                             % (basis.shape, u.shape[0]))
    if counter is None:
        return u - basis @ (basis.conj().T @ u)
    n, k = basis.shape
    r = u.copy()
    for i in range(k):
        w = basis[:, i]
        c = np.vdot(w, u)
        r -= c * w
        counter.inner_products += 1
        counter.vector_updates += 1
        counter.scalar_multiplications += 2 * n
    return r


def _jacobi_rotate_pair(U, p, q):
    """One complex one-sided Jacobi rotation; returns the off size removed."""
    up = U[:, p]
    uq = U[:, q]
    app = np.vdot(up, up).real
    aqq = np.vdot(uq, uq).real
    apq = np.vdot(up, uq)
    beta = abs(apq)
    if beta == 0.0 or app == 0.0 or aqq == 0.0:
        return 0.0
    if beta <= 1e-15 * np.sqrt(app * aqq):
        return 0.0
    phase = apq / beta
    tau = (aqq - app) / (2.0 * beta)
    # Smaller root of t^2 - 2*tau*t - 1 = 0, the annihilation condition for
    # this rotation orientation; the opposite sign would grow the off term.
    t = -np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    new_p = c * up + np.conj(phase) * s * uq
    new_q = -s * phase * up + c * uq
    U[:, p] = new_p
    U[:, q] = new_q
    return beta


def singular_values(A):
    """Singular values by one-sided Jacobi on the columns of A."""
    A = np.asarray(A, np.complex128)
    if A.ndim != 2:
        raise DimensionError("expected a matrix, got shape %s" % (A.shape,))
    U = A.astype(np.complex128, copy=True)
    m = U.shape[1]
    for _ in range(60):
        off = 0.0
        for p in range(m - 1):
            for q in range(p + 1, m):
                off += _jacobi_rotate_pair(U, p, q)
        if off == 0.0:
            break
    sv = np.sqrt(np.sum(np.abs(U) ** 2, axis=0))
    return np.sort(sv)[::-1]


def condition_number(A):
    """Spectral condition number sigma_max / sigma_min of a square matrix.

    Returns +inf when sigma_min < 1e-300, which stands in for rank
    deficiency in the ill-conditioned regimes this package explores.

    Raises:
        DimensionError: A is not square or larger than 32 x 32.
    """
    A = _as_square(A)
    if A.shape[0] > CONDITION_SIZE_LIMIT:
        raise DimensionError("condition_number is limited to size %d, got %d"
                             % (CONDITION_SIZE_LIMIT, A.shape[0]))
    if A.shape[0] == 0:
        return 1.0
    sv = singular_values(A)
    if sv[-1] < SINGULAR_FLOOR:
        return float("inf")
    return float(sv[0] / sv[-1])


def nullspace_basis(A):
    """Orthonormal basis of the right null space {x : A x = 0}.

    Args:
        A: (p, n) complex matrix with p < n and full row rank.

    Returns:
        (n, n - p) matrix with orthonormal columns, each orthogonal to the
        conjugated rows of A.

    Raises:
        RankDeficiencyError: the rows of A are dependent.
    """
    A = np.asarray(A, np.complex128)
    if A.ndim != 2 or A.shape[0] >= A.shape[1]:
        raise DimensionError("need a flat matrix (p < n), got shape %s"
                             % (A.shape,))
    p, n = A.shape
    R = orthonormalize(A.conj().T)
    found = []
    for i in range(n):
        if len(found) == n - p:
            break
        v = np.zeros(n, np.complex128)
        v[i] = 1.0
        for _ in range(2):
            v = v - R @ (R.conj().T @ v)
            for w in found:
                v -= (w.conj() @ v) * w
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            found.append(v / nv)
    if len(found) != n - p:
        raise RankDeficiencyError("could not complete null space basis")
    return np.column_stack(found)


def random_unit_circle(count, seed):
    """count independent samples exp(i theta), theta uniform on [0, 2 pi)."""
    count = int(count)
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = np.random.default_rng(seed)
    return np.exp(2j * np.pi * rng.random(count))
