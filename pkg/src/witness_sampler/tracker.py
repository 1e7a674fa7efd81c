"""Path tracking between slicing planes in three coordinate regimes.

The local-intrinsic tracker moves a generic point to a target plane by
stepping perpendicular to the plane and correcting parallel to it, with an
evaluation-based a priori stepsize control that rejects a step before any
Newton iteration is spent on it. The global-intrinsic tracker deforms
offset and basis together along a homotopy parameter with ordinary
a posteriori feedback, which is the reference the local regime is measured
against. Witness-set moves run one path per witness point.
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import polysys
from .errors import (
    AlreadyOnPlane,
    DimensionError,
    PathCrossingError,
    PathFailureError,
    SingularMatrixError,
    StepSizeError,
    ValidationError,
)
from .linalg import (condition_number, lu_solve, orthonormalize,
                     project_perpendicular)
from .polysys import RestrictedSystem
from .witness import (DISTINCT_TOL, AffinePlane, WitnessSet,
                      intrinsic_to_extrinsic, random_plane)

ON_PLANE_TOL = 1e-14
MOVE_RETRIES = 6
RETRY_BUDGET = 4
DETOUR_SEGMENTS = 8


@dataclass(frozen=True)
class TrackerConfig:
    """Knobs shared by all trackers.

    h0 is a dimensionless fraction of the initial plane distance (local
    regime) or of the homotopy parameter range (global regime), so it must
    lie in (0, 1]. delta bounds the residual-per-step ratio accepted by the
    a priori control; rho is the reduction factor applied on any rejection.
    """

    h0: float = 0.1
    eps: float = 1e-10
    delta: float = 1.0
    rho: float = 0.5
    max_newton: int = 6
    min_step: float = 1e-8
    max_steps: int = 10000
    expansion: float = 1.5

    def __post_init__(self) -> None:
        if not 0.0 < self.h0 <= 1.0:
            raise ValueError("h0 must be in (0, 1], got %g" % self.h0)
        if not self.eps > 0:
            raise ValueError("eps must be positive, got %g" % self.eps)
        if not self.delta > 0:
            raise ValueError("delta must be positive, got %g" % self.delta)
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must be in (0, 1), got %g" % self.rho)
        if self.max_newton < 1:
            raise ValueError("max_newton must be >= 1, got %d" % self.max_newton)
        if not self.min_step > 0:
            raise ValueError("min_step must be positive, got %g" % self.min_step)
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1, got %d" % self.max_steps)
        if not self.expansion >= 1.0:
            raise ValueError("expansion must be >= 1, got %g" % self.expansion)


@dataclass
class PathStats:
    """Bookkeeping for one tracked path.

    newton_iterations counts every corrector iteration spent, including
    those of rejected steps; condition_estimates samples the restricted
    Jacobian condition number at each accepted step.
    """

    newton_iterations: int = 0
    steps_taken: int = 0
    steps_rejected: int = 0
    final_residual: float = float("inf")
    condition_estimates: list = field(default_factory=list)
    success: bool = False


def newton_correct(g, eps, max_newton):
    """Newton's method on a square restricted system, starting at xi = 0.

    Returns (xi, iterations, residual). Convergence is residual <= eps;
    a residual above eps after max_newton iterations is the caller's signal
    to cut the step. A singular corrector Jacobian raises
    SingularMatrixError.
    """
    xi = np.zeros(g.k, np.complex128)
    val, jac = g.evaluate_and_jacobian(xi)
    res = float(np.linalg.norm(val))
    iterations = 0
    while res > eps and iterations < max_newton:
        step = lu_solve(jac, -val)
        xi = xi + step
        iterations += 1
        val, jac = g.evaluate_and_jacobian(xi)
        res = float(np.linalg.norm(val))
    return xi, iterations, res


def predictor_direction(z, target, counter=None):
    """Unit vector from z toward its orthogonal projection on the target
    plane, and the distance to that projection.

    Costs k inner products against the basis columns (counted when a
    counter is supplied). Raises AlreadyOnPlane below 1e-14.
    """
    u = z - target.offset
    r = project_perpendicular(u, target.basis, counter)
    dist = float(np.linalg.norm(r))
    if dist < ON_PLANE_TOL:
        raise AlreadyOnPlane(dist)
    return -r / dist, dist


def apriori_step_control(g_at, h, delta, rho, min_step):
    """Shrink a step by evaluation alone until the residual looks like the
    O(h) law allows, before any Newton iteration is spent.

    g_at maps a step length to the residual norm at the predicted point.
    Reduces h by rho while g_at(h)/h > delta; raises StepSizeError when a
    reduction lands below min_step.
    """
    if not h > 0:
        raise ValueError("step must be positive, got %g" % h)
    y = g_at(h)
    while y / h > delta:
        h = rho * h
        if h < min_step:
            raise StepSizeError(
                "step control reduced h below min_step %.1e "
                "(last residual %.3e)" % (min_step, y))
        y = g_at(h)
    return h


def track_local(f, z, target, cfg, trace=None):
    """Move one generic point of f onto the target plane (Algorithm regime:
    local intrinsic coordinates).

    Each step travels s = min(h * dist0, dist) along the unit perpendicular
    toward the target, where dist0 is the distance at path start, so h acts
    as a fraction of the whole move, the step count is proportional to 1/h,
    and the final step lands exactly on the plane. The a priori control may
    shrink a step before the corrector runs; corrector divergence rejects
    the step a posteriori.

    Returns (endpoint, PathStats). Raises PathFailureError (with partial
    stats attached) when the step size dies or max_steps is exhausted.
    Pass a list as trace to receive one record per accepted step with the
    points before prediction, after prediction, and after correction, plus
    the plane distances before and after; used to check the step geometry.
    """
    z = np.asarray(z, np.complex128)
    basis = target.basis
    stats = PathStats()

    # polish in the plane through z parallel to the target so tracking
    # starts from corrector accuracy even if the input is only 1e-8 good
    g = RestrictedSystem(f, z, basis)
    xi, iters, res = newton_correct(g, cfg.eps, cfg.max_newton)
    stats.newton_iterations += iters
    if res > cfg.eps:
        raise ValidationError(
            "start point does not polish to a generic point: residual %.3e"
            % res)
    z = z + basis @ xi

    try:
        v, dist = predictor_direction(z, target)
    except AlreadyOnPlane:
        stats.final_residual = res
        stats.success = True
        return z, stats

    dist0 = dist
    # The ratio ||f(z + s v)|| / s tends to ||f'(z) v|| as s -> 0, so the
    # a priori threshold must sit above that limit or the reduction loop
    # can never exit. Adding the local rate keeps cfg.delta as a budget
    # for the nonlinear part alone, which is what shrinking s controls.
    rate = float(np.linalg.norm(polysys.jacobian(f, z) @ v))
    h = cfg.h0
    while dist > cfg.eps:
        if stats.steps_taken + stats.steps_rejected >= cfg.max_steps:
            stats.final_residual = res
            raise PathFailureError(
                "max_steps (%d) exhausted at distance %.3e"
                % (cfg.max_steps, dist), stats=stats)
        s_raw = min(h * dist0, dist)

        def residual_at(step, _z=z, _v=v):
            return float(np.linalg.norm(polysys.evaluate(f, _z + step * _v)))

        try:
            s = apriori_step_control(residual_at, s_raw, cfg.delta + rate,
                                     cfg.rho, cfg.min_step)
        except StepSizeError as exc:
            stats.final_residual = res
            raise PathFailureError(
                "a priori control killed the step: %s" % exc,
                stats=stats) from exc
        if s < s_raw:
            h *= s / s_raw

        z_pred = z + s * v
        g = RestrictedSystem(f, z_pred, basis)
        try:
            xi, iters, res_c = newton_correct(g, cfg.eps, cfg.max_newton)
        except SingularMatrixError:
            xi, iters, res_c = None, 1, float("inf")
        stats.newton_iterations += iters
        if res_c <= cfg.eps:
            z_prev, dist_prev = z, dist
            z = z_pred + basis @ xi
            res = res_c
            stats.steps_taken += 1
            stats.condition_estimates.append(
                condition_number(g.jacobian(xi)))
            if iters <= 2:
                h = min(h * cfg.expansion, cfg.h0)
            try:
                v, dist = predictor_direction(z, target)
            except AlreadyOnPlane:
                dist = 0.0
            if trace is not None:
                trace.append({"z": z_prev, "z_pred": z_pred, "z_new": z,
                              "dist": dist_prev, "dist_new": dist,
                              "step": s})
            if dist == 0.0:
                break
            rate = float(np.linalg.norm(polysys.jacobian(f, z) @ v))
        else:
            stats.steps_rejected += 1
            h *= cfg.rho
            if h * dist0 < cfg.min_step:
                stats.final_residual = res_c
                raise PathFailureError(
                    "step size fell below min_step after %d rejections"
                    % stats.steps_rejected, stats=stats)

    # land exactly on the target plane and polish in its coordinates
    r = project_perpendicular(z - target.offset, basis)
    landed = z - r
    g = RestrictedSystem(f, landed, basis)
    xi, iters, res = newton_correct(g, cfg.eps, cfg.max_newton)
    stats.newton_iterations += iters
    if res > cfg.eps:
        stats.final_residual = res
        raise PathFailureError(
            "final polish stalled at residual %.3e" % res, stats=stats)
    if trace is not None:
        trace.append({"z": z, "z_pred": landed, "z_new": landed + basis @ xi,
                      "dist": float(np.linalg.norm(r)), "dist_new": 0.0,
                      "step": float(np.linalg.norm(r))})
    z = landed + basis @ xi
    stats.condition_estimates.append(condition_number(g.jacobian(xi)))
    stats.final_residual = res
    stats.success = True
    return z, stats


def _track_global_path(f, source, z, target, cfg):
    """One path of the moving-plane homotopy; never raises, reports through
    PathStats.success instead (callers aggregate across many paths)."""
    b, V = source.offset, source.basis
    c, W = target.offset, target.basis
    xi = V.conj().T @ (z - b)
    stats = PathStats()
    t = 0.0
    dt = cfg.h0
    res = float(np.linalg.norm(polysys.evaluate(f, z)))
    while t < 1.0:
        if stats.steps_taken + stats.steps_rejected >= cfg.max_steps:
            stats.final_residual = res
            return None, stats
        t_next = t + min(dt, 1.0 - t)
        offset_t = (1.0 - t_next) * b + t_next * c
        basis_t = (1.0 - t_next) * V + t_next * W
        # zero-order prediction: keep xi, correct in the t-frozen system
        g = RestrictedSystem(f, offset_t + basis_t @ xi, basis_t)
        try:
            eta, iters, res_c = newton_correct(g, cfg.eps, cfg.max_newton)
        except SingularMatrixError:
            # mid-path basis (1-t)V + tW lost rank, or the corrector hit a
            # singular Jacobian; either way the step is rejected
            eta, iters, res_c = None, 1, float("inf")
        stats.newton_iterations += iters
        if res_c <= cfg.eps:
            xi = xi + eta
            t = t_next
            res = res_c
            stats.steps_taken += 1
            stats.condition_estimates.append(
                condition_number(g.jacobian(eta)))
            if iters <= 2:
                dt = min(dt * cfg.expansion, cfg.h0)
        else:
            stats.steps_rejected += 1
            dt *= cfg.rho
            if dt < cfg.min_step:
                stats.final_residual = res_c
                return None, stats
    stats.final_residual = res
    stats.success = True
    return c + W @ xi, stats


def track_global(f, wset, target, cfg):
    """Move every witness point by the moving-plane homotopy
    f((1-t) b + t c + ((1-t) V + t W) xi) = 0, t from 0 to 1.

    Returns (points, stats per path) ordered by input index; a failed path
    contributes None and a stats record with success False.
    """
    outcomes = _parallel_map(
        lambda z: _track_global_path(f, wset.plane, z, target, cfg),
        list(wset.points))
    return [p for p, _ in outcomes], [s for _, s in outcomes]


def _track_one(f, source_plane, z, target, cfg, mode):
    """One path in either regime; never raises, failures come back as
    (None, stats with success False)."""
    if mode == "global":
        return _track_global_path(f, source_plane, z, target, cfg)
    try:
        return track_local(f, z, target, cfg)
    except PathFailureError as exc:
        return None, (exc.stats if exc.stats is not None else PathStats())


def _merged_indices(points):
    """Indices belonging to any cluster of coincident endpoints. All
    members are candidates for re-tracking, since either path of a merged
    pair may be the one that strayed. None entries (failed paths) are
    skipped."""
    redo = set()
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if points[i] is None or points[j] is None:
                continue
            if np.linalg.norm(points[i] - points[j]) <= DISTINCT_TOL:
                redo.add(i)
                redo.add(j)
    return sorted(redo)


def _first_merged_pair(points):
    best = None
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if points[i] is None or points[j] is None:
                continue
            d = np.linalg.norm(points[i] - points[j])
            if d <= DISTINCT_TOL and (best is None or d < best[0]):
                best = (d, i, j)
    return None if best is None else (best[1], best[2])


def _interpolated_planes(src, dst, segments):
    """Waypoint planes along the straight-line route from src to dst:
    offsets and bases interpolated linearly, bases re-orthonormalized.
    The last waypoint is dst itself. For planes drawn at random the
    interpolated basis stays full rank along the whole route."""
    out = []
    for j in range(1, segments + 1):
        if j == segments:
            out.append(dst)
            break
        t = j / segments
        basis = orthonormalize((1.0 - t) * src.basis + t * dst.basis)
        offset = (1.0 - t) * src.offset + t * dst.offset
        out.append(AffinePlane(offset, basis))
    return out


def _track_chain(f, source_plane, z, waypoints, cfg, mode):
    """One path tracked through a sequence of waypoint planes in order.
    Accumulates stats across the legs; a failed leg reports success
    False. Short legs keep each point inside the attraction basin of its
    own continuation, which a single long local move does not."""
    total = PathStats()
    plane = source_plane
    for leg_target in waypoints:
        p, s = _track_one(f, plane, z, leg_target, cfg, mode)
        total.newton_iterations += s.newton_iterations
        total.steps_taken += s.steps_taken
        total.steps_rejected += s.steps_rejected
        total.condition_estimates.extend(s.condition_estimates)
        total.final_residual = s.final_residual
        if p is None or not s.success:
            return None, total
        z, plane = p, leg_target
    total.success = True
    return z, total


def move_witness(wset, target, cfg, mode="local"):
    """Track a whole witness set to a new plane in the chosen regime.

    Returns (new witness set, stats per path). Raises PathFailureError
    listing failed path indices, or PathCrossingError when two paths
    merged (the new point set fails distinctness) and re-routing failed
    to separate them.
    """
    if mode not in ("local", "global"):
        raise ValueError("mode must be 'local' or 'global', got %r" % mode)
    if target.n != wset.plane.n or target.k != wset.plane.k:
        raise DimensionError(
            "target plane is %d-dim in C^%d, source is %d-dim in C^%d"
            % (target.k, target.n, wset.plane.k, wset.plane.n))
    f = wset.system
    outcomes = _parallel_map(
        lambda z: _track_one(f, wset.plane, z, target, cfg, mode),
        list(wset.points))
    points = [p for p, _ in outcomes]
    stats = [s for _, s in outcomes]
    # A failed path or a merged pair of endpoints means the route was bad
    # for that path: a long local move can funnel two source points into
    # the attraction basin of one endpoint, and near an intersection of
    # solution components the tracker cannot tell the sheets apart, so no
    # step size cures a hop along the same route. The majority of paths
    # land correctly and keep their seats; each offender (failed path, or
    # later member of a merged cluster) is re-tracked over fresh routes
    # subdivided into short legs, over which witness points vary
    # continuously. A re-route is a genuine continuation, so its endpoint
    # may legitimately be another path's seat (routes differ by a
    # monodromy permutation); the newcomer then takes the seat and the
    # displaced path re-tracks in turn, so no successful landing is
    # wasted and the vacant endpoint is filled by displacement. Every
    # trial stays on the bill of the path that ran it.
    settled = []
    pending = []
    for i in range(len(points)):
        ok = points[i] is not None and stats[i].success and all(
            np.linalg.norm(points[i] - points[j]) > DISTINCT_TOL
            for j in settled)
        (settled if ok else pending).append(i)
    queue = deque(pending)
    visits = [0] * len(points)
    budget = RETRY_BUDGET * len(points)
    while queue and budget > 0:
        i = queue.popleft()
        first = visits[i] == 0
        visits[i] += 1
        salt = 23 * i + 1009 * visits[i]
        for trial in range(0 if first else 1, MOVE_RETRIES):
            if budget <= 0:
                break
            budget -= 1
            route, run_cfg = _retry_route(wset.plane, target, cfg, mode,
                                          trial, salt)
            p_new, s_new = _track_chain(f, wset.plane, wset.points[i],
                                        route, run_cfg, mode)
            stats[i].newton_iterations += s_new.newton_iterations
            stats[i].steps_taken += s_new.steps_taken
            stats[i].steps_rejected += s_new.steps_rejected
            if p_new is None or not s_new.success:
                continue
            clash = next((j for j in settled
                          if np.linalg.norm(p_new - points[j])
                          <= DISTINCT_TOL), None)
            points[i] = p_new
            stats[i].final_residual = s_new.final_residual
            stats[i].condition_estimates = s_new.condition_estimates
            stats[i].success = True
            settled.append(i)
            if clash is not None:
                settled.remove(clash)
                queue.append(clash)
            break
        else:
            queue.append(i)
    bad = tuple(i for i, p in enumerate(points)
                if p is None or not stats[i].success)
    if bad:
        raise PathFailureError(
            "%d of %d paths failed: indices %s"
            % (len(bad), len(points), list(bad)), indices=bad)
    merged = _first_merged_pair(points)
    if merged is not None:
        raise PathCrossingError(
            "paths %d and %d converged to the same point" % merged)
    return WitnessSet(f, target, points), stats


def _retry_route(source, target, cfg, mode, trial, salt):
    """Route and config for one re-tracking trial. Trial 0 retries the
    direct route (finer steps in global mode, short legs in local mode);
    later trials detour through a fresh random plane, with local legs
    subdivided ever more finely."""
    if mode == "global":
        run_cfg = replace(cfg, h0=cfg.h0 * cfg.rho ** 2)
        if trial == 0:
            return [target], run_cfg
        mid = random_plane(target.n, target.k, 7919 * trial + salt + 101)
        return [mid, target], run_cfg
    segments = DETOUR_SEGMENTS * 2 ** min(max(trial - 1, 0), 2)
    if trial == 0:
        return _interpolated_planes(source, target, segments), cfg
    mid = random_plane(target.n, target.k, 7919 * trial + salt + 101)
    return (_interpolated_planes(source, mid, segments)
            + _interpolated_planes(mid, target, segments)), cfg


def endpoint_conditions(f, plane, z):
    """Condition numbers at a witness point: restricted k-by-k Jacobian
    f'(z) V, and the n-by-n extrinsic Jacobian stacked with the plane's
    linear equations. The two agree to the order of magnitude on
    well-posed witness data."""
    jac = polysys.jacobian(f, z)
    restricted = jac @ plane.basis
    ext = intrinsic_to_extrinsic(plane)
    stacked = np.vstack([jac, ext.coefficients])
    return condition_number(restricted), condition_number(stacked)


def _parallel_map(fn, items):
    """Map preserving input order; thread count from WITNESS_SAMPLER_THREADS
    (0, 1, or unset runs sequentially)."""
    try:
        threads = int(os.environ.get("WITNESS_SAMPLER_THREADS", "0") or "0")
    except ValueError:
        threads = 0
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
