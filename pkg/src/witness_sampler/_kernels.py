"""Low-level evaluation kernels with optional numba acceleration.

All backends share one packed sparse-polynomial layout:

    coeffs : complex128[T]   term coefficients, all equations concatenated
    exps   : int64[T, n]     exponent row per term
    eq_ptr : int64[m + 1]    CSR-style equation boundaries into coeffs/exps
    maxexp : int64[n]        per-variable maximum exponent (power-table size)

Backend selection is done once at import via the environment variable
``WITNESS_SAMPLER_KERNELS``:

    numba  - require numba, fail if it cannot be imported
    numpy  - force the vectorized numpy fallback
    unset  - use numba when importable, numpy otherwise

Both implementations stay importable regardless of the selection so the
benchmark (and the tests) can compare them in one process.
"""

import os

import numpy as np

__all__ = [
    "BACKEND",
    "HAS_NUMBA",
    "eval_packed",
    "jac_packed",
    "eval_jac_packed",
    "lu_solve_packed",
    "eval_packed_numpy",
    "jac_packed_numpy",
    "eval_jac_packed_numpy",
    "lu_solve_packed_numpy",
]


# ---------------------------------------------------------------------------
# loop-form kernels (numba targets; also run as plain python if needed)
# ---------------------------------------------------------------------------

def _power_table(x, maxexp):
    n = x.shape[0]
    mmax = 0
    for j in range(n):
        if maxexp[j] > mmax:
            mmax = maxexp[j]
    pows = np.empty((n, mmax + 1), np.complex128)
    for j in range(n):
        pows[j, 0] = 1.0 + 0.0j
        for e in range(1, maxexp[j] + 1):
            pows[j, e] = pows[j, e - 1] * x[j]
    return pows


def _eval_loop(coeffs, exps, eq_ptr, maxexp, x):
    m = eq_ptr.shape[0] - 1
    n = x.shape[0]
    pows = _power_table(x, maxexp)
    out = np.zeros(m, np.complex128)
    for i in range(m):
        acc = 0.0 + 0.0j
        for t in range(eq_ptr[i], eq_ptr[i + 1]):
            v = coeffs[t]
            for j in range(n):
                e = exps[t, j]
                if e > 0:
                    v *= pows[j, e]
            acc += v
        out[i] = acc
    return out


def _jac_loop(coeffs, exps, eq_ptr, maxexp, x):
    m = eq_ptr.shape[0] - 1
    n = x.shape[0]
    pows = _power_table(x, maxexp)
    out = np.zeros((m, n), np.complex128)
    for i in range(m):
        for t in range(eq_ptr[i], eq_ptr[i + 1]):
            for j in range(n):
                e = exps[t, j]
                if e == 0:
                    continue
                v = coeffs[t] * e * pows[j, e - 1]
                for l in range(n):
                    el = exps[t, l]
                    if l != j and el > 0:
                        v *= pows[l, el]
                out[i, j] += v
    return out


def _eval_jac_loop(coeffs, exps, eq_ptr, maxexp, x):
    m = eq_ptr.shape[0] - 1
    n = x.shape[0]
    pows = _power_table(x, maxexp)
    vals = np.zeros(m, np.complex128)
    jac = np.zeros((m, n), np.complex128)
    for i in range(m):
        for t in range(eq_ptr[i], eq_ptr[i + 1]):
            v = coeffs[t]
            for j in range(n):
                e = exps[t, j]
                if e > 0:
                    v *= pows[j, e]
            vals[i] += v
            for j in range(n):
                e = exps[t, j]
                if e == 0:
                    continue
                d = coeffs[t] * e * pows[j, e - 1]
                for l in range(n):
                    el = exps[t, l]
                    if l != j and el > 0:
                        d *= pows[l, el]
                jac[i, j] += d
    return vals, jac


def _lu_solve_loop(A, b):
    """In-place LU with partial pivoting on copies supplied by the caller.

    Returns (x, status); status is -1 on success, else the elimination
    column where the pivot fell below 1e-14 * max|A|.
    """
    n = A.shape[0]
    amax = 0.0
    for r in range(n):
        for c in range(n):
            v = abs(A[r, c])
            if v > amax:
                amax = v
    tol = 1e-14 * amax
    for col in range(n):
        p = col
        best = abs(A[col, col])
        for r in range(col + 1, n):
            v = abs(A[r, col])
            if v > best:
                best = v
                p = r
        if best <= tol:
            return b, col
        if p != col:
            for c in range(col, n):
                tmp = A[col, c]
                A[col, c] = A[p, c]
                A[p, c] = tmp
            tmp = b[col]
            b[col] = b[p]
            b[p] = tmp
        inv = 1.0 / A[col, col]
        for r in range(col + 1, n):
            f = A[r, col] * inv
            if f != 0:
                for c in range(col + 1, n):
                    A[r, c] -= f * A[col, c]
                b[r] -= f * b[col]
    for col in range(n - 1, -1, -1):
        acc = b[col]
        for c in range(col + 1, n):
            acc -= A[col, c] * b[c]
        b[col] = acc / A[col, col]
    return b, -1


# ---------------------------------------------------------------------------
# vectorized numpy fallbacks
# ---------------------------------------------------------------------------

def eval_packed_numpy(coeffs, exps, eq_ptr, maxexp, x):
    m = eq_ptr.shape[0] - 1
    out = np.zeros(m, np.complex128)
    if coeffs.shape[0]:
        tv = coeffs * np.prod(np.power(x[np.newaxis, :], exps), axis=1)
        for i in range(m):
            lo, hi = eq_ptr[i], eq_ptr[i + 1]
            if hi > lo:
                out[i] = tv[lo:hi].sum()
    return out


def jac_packed_numpy(coeffs, exps, eq_ptr, maxexp, x):
    m = eq_ptr.shape[0] - 1
    n = x.shape[0]
    out = np.zeros((m, n), np.complex128)
    if not coeffs.shape[0]:
        return out
    for j in range(n):
        ej = exps[:, j]
        hit = ej > 0
        if not hit.any():
            continue
        dec = exps.copy()
        dec[hit, j] -= 1
        tv = coeffs * ej * np.prod(np.power(x[np.newaxis, :], dec), axis=1)
        tv = np.where(hit, tv, 0.0)
        for i in range(m):
            lo, hi = eq_ptr[i], eq_ptr[i + 1]
            if hi > lo:
                out[i, j] = tv[lo:hi].sum()
    return out


def eval_jac_packed_numpy(coeffs, exps, eq_ptr, maxexp, x):
    return (eval_packed_numpy(coeffs, exps, eq_ptr, maxexp, x),
            jac_packed_numpy(coeffs, exps, eq_ptr, maxexp, x))


def lu_solve_packed_numpy(A, b):
    """Vectorized twin of _lu_solve_loop; same contract."""
    n = A.shape[0]
    tol = 1e-14 * (np.abs(A).max() if n else 0.0)
    for col in range(n):
        p = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[p, col]) <= tol:
            return b, col
        if p != col:
            A[[col, p], col:] = A[[p, col], col:]
            b[[col, p]] = b[[p, col]]
        f = A[col + 1:, col] / A[col, col]
        A[col + 1:, col + 1:] -= np.outer(f, A[col, col + 1:])
        b[col + 1:] -= f * b[col]
    for col in range(n - 1, -1, -1):
        b[col] = (b[col] - A[col, col + 1:] @ b[col + 1:]) / A[col, col]
    return b, -1


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

_flag = os.environ.get("WITNESS_SAMPLER_KERNELS", "").strip().lower()
if _flag not in ("", "numba", "numpy"):
    raise ImportError(
        "WITNESS_SAMPLER_KERNELS must be 'numba' or 'numpy', got %r" % _flag)

HAS_NUMBA = False
if _flag != "numpy":
    try:
        import numba

        HAS_NUMBA = True
    except ImportError:
        if _flag == "numba":
            raise

if HAS_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    _power_table = _jit(_power_table)
    eval_packed_numba = _jit(_eval_loop)
    jac_packed_numba = _jit(_jac_loop)
    eval_jac_packed_numba = _jit(_eval_jac_loop)
    lu_solve_packed_numba = _jit(_lu_solve_loop)
else:
    eval_packed_numba = None
    jac_packed_numba = None
    eval_jac_packed_numba = None
    lu_solve_packed_numba = None

if HAS_NUMBA and _flag != "numpy":
    BACKEND = "numba"
    eval_packed = eval_packed_numba
    jac_packed = jac_packed_numba
    eval_jac_packed = eval_jac_packed_numba
    lu_solve_packed = lu_solve_packed_numba
else:
    BACKEND = "numpy"
    eval_packed = eval_packed_numpy
    jac_packed = jac_packed_numpy
    eval_jac_packed = eval_jac_packed_numpy
    lu_solve_packed = lu_solve_packed_numpy
