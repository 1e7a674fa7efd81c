"""Bootstrap witness sets by a total-degree straight-line homotopy.

A witness set needs one solved instance to start from: slice the solution
set with a random plane, square the system if it is overdetermined, and
solve the resulting n-by-n system by continuation from the start system
x_i^{d_i} = c_i whose solutions are known products of roots of unity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels, polysys
from .errors import DimensionError, SingularMatrixError, ValidationError
from .tracker import (MOVE_RETRIES, PathStats, _parallel_map,
                      newton_correct)
from .witness import WitnessSet, intrinsic_to_extrinsic, random_plane

DIVERGENCE_CUTOFF = 1e8
KEEP_RESIDUAL_TOL = 1e-8
DUPLICATE_TOL = 1e-6


@dataclass(frozen=True)
class StartSystem:
    """The start system x_i^{d_i} - c_i = 0 with unit-circle constants.

    Its solution set is the product of the d_i-th root sets of the c_i,
    exactly prod(d_i) points, enumerated in mixed-radix order.
    """

    degrees: tuple
    constants: np.ndarray

    def __post_init__(self) -> None:
        if len(self.degrees) != self.constants.shape[0]:
            raise DimensionError("need one constant per equation")
        if any(d < 1 for d in self.degrees):
            raise DimensionError(
                "start system needs positive degrees, got %s"
                % (self.degrees,))

    @property
    def total_count(self) -> int:
        return math.prod(self.degrees)

    def root(self, index: int) -> np.ndarray:
        """The index-th start solution (mixed-radix digit per variable)."""
        if not 0 <= index < self.total_count:
            raise IndexError("start root %d out of range" % index)
        n = len(self.degrees)
        x = np.empty(n, np.complex128)
        rem = index
        for i in range(n):
            d = self.degrees[i]
            rem, j = divmod(rem, d)
            x[i] = self.constants[i] ** (1.0 / d) * np.exp(2j * np.pi * j / d)
        return x


class _HomotopyAt:
    """H(x0 + eta, t) = (1-t) gamma (x^d - c) + t F(x), frozen at one t.

    Duck-types the restricted-system interface so newton_correct can run
    in full coordinates with eta starting at zero.
    """

    def __init__(self, F, gamma, start, t, x0):
        self.F = F
        self.gamma = gamma
        self.start = start
        self.t = t
        self.x0 = x0
        self.k = F.n
        self._d = np.asarray(start.degrees, np.float64)

    def evaluate_and_jacobian(self, eta):
        x = self.x0 + eta
        coeffs, exps, eq_ptr, maxexp = self.F.packed()
        vals, jac = _kernels.eval_jac_packed(coeffs, exps, eq_ptr, maxexp, x)
        xp = x ** (self._d - 1)
        w = (1.0 - self.t) * self.gamma
        h = self.t * vals + w * (x * xp - self.start.constants)
        J = self.t * jac
        J[np.diag_indices_from(J)] += w * self._d * xp
        return h, J

    def evaluate(self, eta):
        x = self.x0 + eta
        xp = x ** (self._d - 1)
        w = (1.0 - self.t) * self.gamma
        return self.t * polysys.evaluate(self.F, x) \
            + w * (x * xp - self.start.constants)


def _total_degree_path(F, start, gamma, index, cfg):
    """Track one start root to t = 1. Returns (status, endpoint, stats)
    with status one of 'ok', 'divergent', 'stalled'."""
    x = start.root(index)
    stats = PathStats()
    t = 0.0
    dt = cfg.h0
    res = float("inf")
    while t < 1.0:
        if stats.steps_taken + stats.steps_rejected >= cfg.max_steps:
            stats.final_residual = res
            return "stalled", x, stats
        t_next = t + min(dt, 1.0 - t)
        g = _HomotopyAt(F, gamma, start, t_next, x)
        try:
            eta, iters, res_c = newton_correct(g, cfg.eps, cfg.max_newton)
        except SingularMatrixError:
            eta, iters, res_c = None, 1, float("inf")
        stats.newton_iterations += iters
        if res_c <= cfg.eps:
            x = x + eta
            t = t_next
            res = res_c
            stats.steps_taken += 1
            if float(np.linalg.norm(x)) > DIVERGENCE_CUTOFF:
                stats.final_residual = res
                return "divergent", x, stats
            if iters <= 2:
                dt = min(dt * cfg.expansion, cfg.h0)
        else:
            stats.steps_rejected += 1
            dt *= cfg.rho
            if dt < cfg.min_step:
                stats.final_residual = res_c
                return "stalled", x, stats
    stats.final_residual = res
    stats.success = True
    return "ok", x, stats


def total_degree_solve(F, seed, cfg, report=None):
    """All finite solutions of a square system by the gamma-trick homotopy
    H(x, t) = (1-t) gamma G(x) + t F(x) from the start roots of G.

    Per-path failures are not fatal; pass a list as report to receive one
    entry per path with its status and statistics.
    """
    if F.m != F.n:
        raise DimensionError("need a square system, got %d equations in %d "
                             "variables" % (F.m, F.n))
    degrees = F.degrees()
    if any(d < 1 for d in degrees):
        raise DimensionError("system has a constant equation")
    rng = np.random.default_rng(seed)
    constants = np.exp(2j * np.pi * rng.random(F.n))
    gamma = np.exp(2j * np.pi * rng.random())
    start = StartSystem(tuple(degrees), constants)

    def one(index, c=cfg):
        return _total_degree_path(F, start, gamma, index, c)

    outcomes = _parallel_map(one, list(range(start.total_count)))
    # Coarse t-steps can hop a path onto a neighbouring one; re-run every
    # member of a cluster of coincident finite endpoints with a finer
    # initial step so distinct roots are not silently lost.
    for attempt in range(1, MOVE_RETRIES + 1):
        ok = [i for i, (st, _, _) in enumerate(outcomes) if st == "ok"]
        redo = set()
        for a in range(len(ok)):
            for b_ in range(a + 1, len(ok)):
                i, j = ok[a], ok[b_]
                if np.linalg.norm(outcomes[i][1] - outcomes[j][1]) \
                        <= DUPLICATE_TOL:
                    redo.add(i)
                    redo.add(j)
        if not redo:
            break
        finer = replace(cfg, h0=cfg.h0 * cfg.rho ** (2 * attempt))
        rerun = _parallel_map(lambda i: one(i, finer), sorted(redo))
        for i, out in zip(sorted(redo), rerun):
            outcomes[i] = out
    solutions = []
    for index, (status, x, stats) in enumerate(outcomes):
        if status == "ok":
            solutions.append(x)
        if report is not None:
            report.append({"path": index, "status": status, "stats": stats})
    return solutions


def _plane_equations(ext, n):
    """Extrinsic plane rows as degree-1 polynomial equations."""
    rows = []
    m = ext.coefficients.shape[0]
    zero = (0,) * n
    for i in range(m):
        terms = []
        for j in range(n):
            c = ext.coefficients[i, j]
            if c != 0:
                exps = tuple(1 if jj == j else 0 for jj in range(n))
                terms.append((c, exps))
        terms.append((ext.constants[i], zero))
        rows.append(terms)
    return rows


def witness_generate(f, k, seed, cfg, report=None):
    """Witness set for the solution set of f sliced by a random k-plane.

    Squares f down to k equations when overdetermined, adjoins the plane's
    n - k linear equations, solves the square system by total-degree
    continuation, then keeps endpoints whose residual on the ORIGINAL f is
    at most 1e-8 (squaring introduces spurious zeros) and drops duplicates.
    """
    n = f.n
    fsq = polysys.square_system(f, k, seed)
    plane = random_plane(n, k, seed + 101)
    ext = intrinsic_to_extrinsic(plane)
    equations = [list(eq) for eq in fsq.equations] + _plane_equations(ext, n)
    F = polysys.PolySystem(equations, n)
    candidates = total_degree_solve(F, seed, cfg, report=report)
    kept = []
    for x in candidates:
        if float(np.linalg.norm(polysys.evaluate(f, x))) > KEEP_RESIDUAL_TOL:
            continue
        if any(float(np.linalg.norm(x - y)) <= DUPLICATE_TOL for y in kept):
            continue
        kept.append(x)
    if not kept:
        raise ValidationError(
            "empty witness: no finite solutions of f survived the slice")
    return WitnessSet(fsq, plane, kept)
