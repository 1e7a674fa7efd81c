"""Eigenvalue conditioning of univariate restrictions of hypersurfaces.

Restricting a hypersurface f = 0 to a line b + v*xi gives a univariate
polynomial whose roots are the witness points on that line.  Solving it via
the companion matrix turns root sensitivity into eigenvalue sensitivity, and
the eigenvalue condition numbers depend strongly on where the line sits: a
generic affine offset makes the roots ill conditioned as the degree grows,
while a line through the origin (or through a point on the hypersurface
itself) keeps them tame.  This module measures that effect.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ConvergenceError, DegeneracyError, DimensionError
from .polysys import PolySystem, expand_substitution, random_sparse_hypersurface

LEADING_TOL = 1e-14
MONIC_TOL = 1e-12
ROOT_RESIDUAL_TOL = 1e-10
ABERTH_MAX_ITER = 200
# Constant term below this (relative to the largest coefficient) is treated
# as an exact zero root and deflated, matching what balancing eigensolvers
# do when a companion column vanishes.
DEFLATION_TOL = 1e-8
SHIFT_MIN_MODULUS = 1e-6


@dataclass(frozen=True)
class UnivariatePoly:
    """Dense univariate polynomial, coefficients in ascending degree order.

    ``leading_scale`` records the divisor applied to make the polynomial
    monic, so the original restriction can be recovered as
    ``leading_scale * p``.
    """

    coefficients: np.ndarray
    leading_scale: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise DimensionError("coefficients must be a non-empty 1-d array")
        if coeffs[-1] == 0:
            raise DegeneracyError("leading coefficient is zero")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    @property
    def monic(self) -> bool:
        return abs(self.coefficients[-1] - 1.0) <= MONIC_TOL

    def evaluate(self, x):
        return npoly.polyval(x, self.coefficients)

    def derivative(self) -> "UnivariatePoly":
        if self.degree == 0:
            raise DegeneracyError("derivative of a constant is zero")
        return UnivariatePoly(npoly.polyder(self.coefficients))


@dataclass(frozen=True)
class ConditionReport:
    """Extremes of the inverse eigenvalue condition numbers of one restriction."""

    degree: int
    regime: str
    largest_inverse_cond: float
    smallest_inverse_cond: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.smallest_inverse_cond <= self.largest_inverse_cond <= 1.0 + 1e-12):
            raise ValueError(
                "inverse condition extremes out of order: smallest=%g largest=%g"
                % (self.smallest_inverse_cond, self.largest_inverse_cond)
            )


@dataclass(frozen=True)
class ConditionRatios:
    """One row of the offset-vs-origin comparison table."""

    degree: int
    offset_largest: float
    offset_smallest: float
    origin_largest: float
    origin_smallest: float
    ratio_largest: float
    ratio_smallest: float


def univariate_restrict(f: PolySystem, b: np.ndarray, v: np.ndarray) -> UnivariatePoly:
    """Restrict a single-equation system to the line b + v*xi, made monic.

    Raises DegeneracyError when the direction v annihilates the top-degree
    form, which would silently drop roots to infinity.
    """
    if f.m != 1:
        raise DimensionError("restriction to a line needs exactly one equation, got %d" % f.m)
    b = np.asarray(b, dtype=np.complex128).reshape(f.n)
    v = np.asarray(v, dtype=np.complex128).reshape(f.n, 1)
    if not np.linalg.norm(v) > 0:
        raise DimensionError("direction vector is zero")
    line = expand_substitution(f, b, v)
    d = max(f.degrees())
    coeffs = np.zeros(d + 1, dtype=np.complex128)
    for mono in line.equations[0]:
        coeffs[mono.exponents[0]] += mono.coefficient
    lead = coeffs[d]
    if abs(lead) < LEADING_TOL:
        raise DegeneracyError(
            "restriction dropped from degree %d: leading coefficient %.3e" % (d, abs(lead))
        )
    return UnivariatePoly(coeffs / lead, leading_scale=complex(lead))


def _initial_radius(coeffs: np.ndarray) -> float:
    # Fujiwara bound on root moduli; much tighter than 1 + max|a_i| when the
    # mid-range coefficients are inflated (shifted high-degree restrictions).
    d = coeffs.size - 1
    j = np.arange(1, d + 1)
    ratios = np.abs(coeffs[d - j] / coeffs[d]) ** (1.0 / j)
    bound = 2.0 * float(ratios.max())
    return max(bound, 1e-3)


def aberth_roots(p: UnivariatePoly, seed: int = 0) -> np.ndarray:
    """All roots of p by the Aberth-Ehrlich simultaneous iteration.

    Deterministic for a given (p, seed).  Raises ConvergenceError with the
    per-root residuals attached if the iteration cap is hit.
    """
    d = p.degree
    if d == 0:
        return np.zeros(0, dtype=np.complex128)
    coeffs = p.coefficients
    dcoeffs = npoly.polyder(coeffs)
    rng = np.random.default_rng([seed, d, 0x5EED])
    radius = _initial_radius(coeffs)
    angles = 2.0 * np.pi * (np.arange(d) + 0.376) / d
    angles = angles + rng.uniform(-0.05, 0.05, size=d) * 2.0 * np.pi / d
    roots = radius * np.exp(1j * angles)

    powers = np.arange(d + 1)
    abs_coeffs = np.abs(coeffs)
    converged = np.zeros(d, dtype=bool)
    for _ in range(ABERTH_MAX_ITER):
        pv = npoly.polyval(roots, coeffs)
        dv = npoly.polyval(roots, dcoeffs)
        absx = np.abs(roots)
        # Two-tier stop: the target accuracy, with a backward-stable floor for
        # polynomials whose coefficients are too large to do better in doubles.
        scale = np.sum(abs_coeffs[None, :] * absx[:, None] ** powers[None, :], axis=1)
        floor = 64.0 * np.finfo(np.float64).eps * scale
        tol = np.maximum(ROOT_RESIDUAL_TOL * (1.0 + absx**d), floor)
        converged = np.abs(pv) <= tol
        if converged.all():
            break
        ratio = np.where(converged, 0.0, pv / np.where(np.abs(dv) > 0, dv, 1.0))
        diff = roots[:, None] - roots[None, :]
        np.fill_diagonal(diff, 1.0)
        repulsion = np.sum(1.0 / diff, axis=1) - 1.0
        denom = 1.0 - ratio * repulsion
        denom = np.where(np.abs(denom) > 1e-300, denom, 1.0)
        step = ratio / denom
        roots = roots - np.where(converged, 0.0, step)
    else:
        residuals = np.abs(npoly.polyval(roots, coeffs))
        bad = residuals[~converged]
        raise ConvergenceError(
            "Aberth iteration failed for %d of %d roots after %d iterations"
            % (bad.size, d, ABERTH_MAX_ITER),
            residuals=residuals,
        )
    return roots


def root_condition(p: UnivariatePoly, lam: complex) -> float:
    """Eigenvalue condition number of a root on the companion matrix of p.

    Uses the closed-form companion eigenvectors: right x = (1, lam, ...,
    lam^(d-1)), left built from the Horner partial products.  Returns +inf
    when the root is numerically defective (left and right eigenvectors
    orthogonal to working precision).
    """
    if not p.monic:
        raise DegeneracyError("condition numbers are defined for monic polynomials here")
    d = p.degree
    if d < 1:
        raise DimensionError("need degree >= 1")
    lam = complex(lam)
    x = lam ** np.arange(d)
    # h_0 = 1, h_i = lam*h_{i-1} + a_{d-i}; left eigenvector y_j = h_{d-1-j}.
    h = np.empty(d, dtype=np.complex128)
    h[0] = 1.0
    for i in range(1, d):
        h[i] = lam * h[i - 1] + p.coefficients[d - i]
    y = h[::-1]
    overlap = abs(np.sum(y * x))
    if overlap < 1e-300:
        return float("inf")
    return float(np.linalg.norm(x) * np.linalg.norm(y) / overlap)


def _restriction_report(p: UnivariatePoly, regime: str, seed: int = 0) -> ConditionReport:
    roots = aberth_roots(p, seed=seed)
    conds = np.array([root_condition(p, lam) for lam in roots])
    inv = np.where(np.isfinite(conds), 1.0 / conds, 0.0)
    inv = np.clip(inv, 0.0, 1.0)
    return ConditionReport(
        degree=p.degree,
        regime=regime,
        largest_inverse_cond=float(inv.max()),
        smallest_inverse_cond=float(inv.min()),
    )


def local_shift_condition(f: PolySystem, v: np.ndarray, seed: int = 0):
    """Condition extremes after re-anchoring the line at a point of f = 0.

    Restricts f to the line through the origin along v, moves the offset to
    z1 = xi* v where xi* is the smallest-modulus nonzero root, and reports
    (inverse condition of the xi = 0 root, smallest inverse condition among
    the remaining roots) for the shifted restriction.

    The shifted polynomial vanishes at xi = 0 by construction, so its
    constant term is zero up to the root residual.  A balancing eigensolver
    isolates the corresponding companion eigenvalue and reports it as
    perfectly conditioned; we deflate the same way, so the first value is
    1.0 whenever the shift landed on the hypersurface.
    """
    n = f.n
    v = np.asarray(v, dtype=np.complex128).reshape(n)
    p0 = univariate_restrict(f, np.zeros(n, dtype=np.complex128), v)
    roots0 = aberth_roots(p0, seed=seed)
    moduli = np.abs(roots0)
    keep = moduli > SHIFT_MIN_MODULUS
    if not keep.any():
        raise DegeneracyError("all roots of the origin restriction are at the origin")
    xi_star = roots0[keep][np.argmin(moduli[keep])]
    z1 = xi_star * v

    g = univariate_restrict(f, z1, v)
    coeffs = g.coefficients
    scale = float(np.abs(coeffs).max())
    if abs(coeffs[0]) <= DEFLATION_TOL * scale:
        q = UnivariatePoly(np.array(coeffs[1:], copy=True))
        others = aberth_roots(q, seed=seed)
        cond_at_zero = 1.0
    else:
        # Shift did not land on the hypersurface; fall back to the raw
        # closed form at the nearest-to-zero root.
        all_roots = aberth_roots(g, seed=seed)
        zero_idx = int(np.argmin(np.abs(all_roots)))
        kappa = root_condition(g, all_roots[zero_idx])
        cond_at_zero = 0.0 if not np.isfinite(kappa) else min(1.0, 1.0 / kappa)
        others = np.delete(all_roots, zero_idx)
    inv_others = []
    for lam in others:
        kappa = root_condition(g, lam)
        inv_others.append(0.0 if not np.isfinite(kappa) else min(1.0, 1.0 / kappa))
    smallest_other = float(min(inv_others)) if inv_others else cond_at_zero
    return cond_at_zero, smallest_other


def run_condition_experiment(
    n: int = 10,
    degrees=(10, 20, 30, 40),
    t: int = 5,
    seed: int = 0,
    include_local_shift: bool = False,
):
    """Offset-vs-origin conditioning sweep over a list of degrees.

    For each degree builds a random sparse hypersurface, restricts it to a
    random line anchored at a generic offset and again at the origin, and
    collects the inverse condition extremes plus their ratios.  Returns
    (reports, ratio rows); with include_local_shift a third report per degree
    measures the restriction re-anchored at a point of the hypersurface.
    """
    reports: list[ConditionReport] = []
    ratios: list[ConditionRatios] = []
    for d in degrees:
        f = random_sparse_hypersurface(n, d, t, seed)
        rng = np.random.default_rng([seed, d, 1])
        phases_b = rng.uniform(0.0, 2.0 * np.pi, size=n)
        b = np.exp(1j * phases_b)
        v = np.empty(n, dtype=np.complex128)
        v[0] = 1.0
        phases_v = rng.uniform(0.0, 2.0 * np.pi, size=n - 1)
        v[1:] = np.exp(1j * phases_v)
        try:
            p_offset = univariate_restrict(f, b, v)
            p_origin = univariate_restrict(f, np.zeros(n, dtype=np.complex128), v)
        except DegeneracyError as exc:
            raise DegeneracyError("degree %d: %s" % (d, exc)) from exc
        rep_off = _restriction_report(p_offset, "offset", seed=seed)
        rep_org = _restriction_report(p_origin, "origin", seed=seed)
        reports.append(rep_off)
        reports.append(rep_org)
        ratios.append(
            ConditionRatios(
                degree=d,
                offset_largest=rep_off.largest_inverse_cond,
                offset_smallest=rep_off.smallest_inverse_cond,
                origin_largest=rep_org.largest_inverse_cond,
                origin_smallest=rep_org.smallest_inverse_cond,
                ratio_largest=rep_org.largest_inverse_cond
                / max(rep_off.largest_inverse_cond, 1e-300),
                ratio_smallest=rep_org.smallest_inverse_cond
                / max(rep_off.smallest_inverse_cond, 1e-300),
            )
        )
        if include_local_shift:
            cond_zero, smallest_other = local_shift_condition(f, v, seed=seed)
            reports.append(
                ConditionReport(
                    degree=d,
                    regime="local-shift",
                    largest_inverse_cond=cond_zero,
                    smallest_inverse_cond=min(smallest_other, cond_zero),
                )
            )
    return reports, ratios
