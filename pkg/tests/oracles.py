"""Independent numerical oracles shared by the test modules.

LAPACK-backed routines (np.linalg.svd/eig/lstsq/det, np.roots) and scipy's
assignment solver are allowed here and only here; the package itself never
calls them. Every oracle takes a different computational route than the
code it checks: finite differences against analytic Jacobians, resultant
elimination against continuation, inverse iteration against closed-form
eigenvectors.
"""

import numpy as np

from witness_sampler import polysys


def fd_jacobian(f, x, h=1e-6):
    """Central-difference Jacobian; valid for polynomials because they are
    holomorphic, so the real-step difference approximates the complex
    derivative."""
    out = np.zeros((f.m, f.n), np.complex128)
    for j in range(f.n):
        e = np.zeros(f.n, np.complex128)
        e[j] = h
        out[:, j] = (polysys.evaluate(f, x + e)
                     - polysys.evaluate(f, x - e)) / (2.0 * h)
    return out


def assignment_distance(points_a, points_b):
    """Total distance of the optimal pairing between two point sets."""
    from scipy.optimize import linear_sum_assignment
    cost = np.array([[np.linalg.norm(a - b) for b in points_b]
                     for a in points_a])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def _restricted_quadric_coefficients(f, plane):
    """Dense quadric coefficients of each restricted equation in the
    intrinsic coordinates (xi1, xi2), fitted from point evaluations in the
    monomial order [1, x, y, x^2, x*y, y^2]."""
    rng = np.random.default_rng(7)
    pts = rng.standard_normal((12, 2)) + 1j * rng.standard_normal((12, 2))
    x, y = pts[:, 0], pts[:, 1]
    monomials = np.stack([np.ones(12), x, y, x * x, x * y, y * y], axis=1)
    values = np.stack([polysys.evaluate(f, plane.point(xi)) for xi in pts])
    coeffs, *_ = np.linalg.lstsq(monomials, values, rcond=None)
    return coeffs


def _quadric_in_y(c, x):
    """Coefficients (a2, a1, a0) of one quadric as a polynomial in y = xi2
    at a fixed x = xi1."""
    return c[5], c[2] + c[4] * x, c[0] + c[1] * x + c[3] * x * x


def _newton_polish(f, plane, xi, steps=4):
    xi = np.asarray(xi, np.complex128)
    for _ in range(steps):
        val = polysys.evaluate(f, plane.point(xi))
        jac = np.zeros((f.m, 2), np.complex128)
        for j in range(2):
            e = np.zeros(2, np.complex128)
            e[j] = 1e-7
            jac[:, j] = (polysys.evaluate(f, plane.point(xi + e))
                         - polysys.evaluate(f, plane.point(xi - e))) / 2e-7
        xi = xi - np.linalg.lstsq(jac, val, rcond=None)[0]
    return xi


def witness_points_by_resultant(f, plane):
    """Plane section of a system of two quadrics by brute-force elimination.

    Fits both restricted equations as quadrics in (xi1, xi2), eliminates
    xi2 through the Sylvester resultant (a degree-4 polynomial in xi1
    recovered by sampling its determinant), takes companion-matrix roots,
    back-substitutes, and polishes with finite-difference Newton. A route
    with no path tracking in it at all.
    """
    coeffs = _restricted_quadric_coefficients(f, plane)
    c1, c2 = coeffs[:, 0], coeffs[:, 1]

    def resultant_at(x):
        a2, a1, a0 = _quadric_in_y(c1, x)
        b2, b1, b0 = _quadric_in_y(c2, x)
        s = np.array([[a2, a1, a0, 0.0],
                      [0.0, a2, a1, a0],
                      [b2, b1, b0, 0.0],
                      [0.0, b2, b1, b0]], np.complex128)
        return np.linalg.det(s)

    samples = 1.5 * np.exp(2j * np.pi * np.arange(9) / 9.0)
    values = np.array([resultant_at(x) for x in samples])
    quartic = np.polynomial.polynomial.polyfit(samples, values, 4)
    roots1 = np.roots(quartic[::-1])

    points = []
    for x in roots1:
        a2, a1, a0 = _quadric_in_y(c1, x)
        candidates = np.roots([a2, a1, a0])
        b2, b1, b0 = _quadric_in_y(c2, x)
        y = min(candidates, key=lambda t: abs(b2 * t * t + b1 * t + b0))
        xi = _newton_polish(f, plane, np.array([x, y]))
        points.append(plane.point(xi))
    return points


def aberth_line_points(f, plane):
    """Points of a hypersurface on a 1-plane via the univariate restriction
    and the simultaneous root finder; no continuation involved."""
    from witness_sampler.conditioning import aberth_roots, univariate_restrict
    p = univariate_restrict(f, plane.offset, plane.basis[:, 0])
    roots = aberth_roots(p)
    return [plane.point(np.array([lam])) for lam in roots]


def companion_root_condition(p, lam):
    """Eigenvalue condition number of a root of a monic polynomial on its
    companion matrix, by inverse iteration for both eigenvectors.

    Builds the companion form whose right eigenvectors are Vandermonde,
    then computes both eigenvectors iteratively: no closed forms.
    """
    d = p.degree
    comp = np.zeros((d, d), np.complex128)
    for i in range(d - 1):
        comp[i, i + 1] = 1.0
    comp[d - 1, :] = -p.coefficients[:d]

    def inverse_iterate(mat):
        shifted = mat - (lam * (1.0 + 1e-12) + 1e-14) * np.eye(d)
        v = np.ones(d, np.complex128) / np.sqrt(d)
        for _ in range(3):
            v = np.linalg.solve(shifted, v)
            v = v / np.linalg.norm(v)
        return v

    x = inverse_iterate(comp)
    y = inverse_iterate(comp.T)
    overlap = abs(np.sum(y * x))
    if overlap < 1e-300:
        return float("inf")
    return float(np.linalg.norm(x) * np.linalg.norm(y) / overlap)
