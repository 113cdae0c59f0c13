"""Weighted Tchebyshev scalarization, face weight lattices and a derivative-free box solver."""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .dominance import pareto_filter
from .problem import EvaluationError, EvaluationRecord, ObjectiveSubset, Problem, SolutionArchive

log = logging.getLogger(__name__)

WEIGHT_SUM_TOL = 1e-12
STALL_LIMIT = 8
ROTATION_POOL = 8


@dataclass(frozen=True)
class SolverConfig:
    """Multi-restart pattern-search settings.

    ``x_tolerance`` is relative to each coordinate's box width and may be
    below float resolution, so searches run down to the last ulp;
    ``f_tolerance`` decides when progress has stalled. Sweep points closer
    than ``merge_tolerance`` times the box diagonal are merged.
    """

    restarts: int = 16
    max_iters: int = 400
    x_tolerance: float = 1e-17
    f_tolerance: float = 1e-9
    seed: int = 0
    scan_points: int = 65
    scan_cycles: int = 2
    polish: int = 4
    merge_tolerance: float = 1e-6

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if not (self.x_tolerance > 0 and self.f_tolerance > 0 and self.merge_tolerance > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class UtopianPoint:
    z: np.ndarray
    margin: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def m(self) -> int:
        return len(self.z)


def _check_weight(w, m: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (m,):
        raise ValueError(f"weight of length {w.size} for {m} objectives")
    if np.any(w < 0) or abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise ValueError(f"weight {w.tolist()} is not on the standard simplex")
    return w


def support(w) -> ObjectiveSubset:
    w = np.asarray(w, dtype=float)
    return ObjectiveSubset.from_indices(np.flatnonzero(w > 0).tolist(), len(w))


def tchebyshev_value(y, w, z: UtopianPoint, subset: ObjectiveSubset | None = None) -> np.ndarray:
    """``max_i w_i (y_i - z_i)`` over the support of ``w``; vectorized over rows of ``y``."""
    w = np.asarray(w, dtype=float)
    sup = support(w)
    if sup.k == 0:
        raise ValueError("weight has empty support")
    if subset is not None and not sup.issubset(subset):
        raise ValueError(f"support {sup} of the weight is not inside subset {subset}")
    idx = list(sup.indices)
    y = np.asarray(y, dtype=float)
    return np.max(w[idx] * (y[..., idx] - z.z[idx]), axis=-1)


def generate_face_weights(m: int, subset: ObjectiveSubset, density: int) -> np.ndarray:
    """Simplex-lattice weights with step ``1/density`` on the face spanned by ``subset``.

    Rows are in descending lexicographic order of the integer compositions,
    which starts at the face's first vertex.
    """
    if subset.k == 0:
        raise ValueError("cannot place weights on the empty face")
    if density < 1:
        raise ValueError("density must be positive")
    idx = subset.indices
    rows = []
    # compositions of `density` into len(idx) non-negative parts
    for bars in itertools.combinations(range(density + len(idx) - 1), len(idx) - 1):
        parts = np.diff(np.concatenate([[-1], bars, [density + len(idx) - 1]])) - 1
        w = np.zeros(m)
        w[list(idx)] = parts / density
        rows.append(w)
    W = np.array(rows)
    order = np.lexsort(-W.T[::-1])
    return W[order]


def _halton_starts(problem: Problem, count: int, seed: int) -> np.ndarray:
    u = qmc.Halton(d=problem.n, scramble=True, seed=np.random.default_rng(seed)).random(count)
    return problem.lower + u * (problem.upper - problem.lower)


def _scan_grid(lo: float, hi: float, points: int) -> np.ndarray:
    """Uniform points plus log-spaced points hugging both bounds."""
    width = hi - lo
    if width == 0:
        return np.array([lo])
    offsets = width * np.logspace(-300, -2, 50)
    return np.unique(np.concatenate([np.linspace(lo, hi, points), lo + offsets, hi - offsets]))


def _minimize_lockstep(fun, problem: Problem, starts: np.ndarray, config: SolverConfig,
                       rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Run one pattern search per start, all restarts advanced together.

    A restart stops once its step falls below ``x_tolerance`` or after
    ``STALL_LIMIT`` polls in a row that improve by at most ``f_tolerance``
    (relative to ``max(1, |f|)``). ``fun`` maps an (N, n) array to N values.
    Returns final points and values.
    """
    lo, hi = problem.lower, problem.upper
    width = hi - lo
    n = problem.n
    X = np.clip(starts.astype(float), lo, hi)
    F = fun(X)
    R = len(X)

    # per-coordinate global scans
    for _ in range(config.scan_cycles):
        for j in range(n):
            grid = _scan_grid(lo[j], hi[j], config.scan_points)
            if grid.size == 1:
                continue
            C = np.repeat(X[:, None, :], grid.size, axis=1)
            C[:, :, j] = grid[None, :]
            V = fun(C.reshape(-1, n)).reshape(R, grid.size)
            best = np.argmin(V, axis=1)
            bv = V[np.arange(R), best]
            better = bv < F
            X[better, j] = grid[best[better]]
            F[better] = bv[better]

    step = np.full(R, 0.25)
    stall = np.zeros(R, dtype=int)
    active = np.ones(R, dtype=bool)
    eye = np.eye(n)
    rotations = [np.linalg.qr(rng.standard_normal((n, n)))[0].T for _ in range(ROTATION_POOL)]
    for it in range(config.max_iters):
        ids = np.flatnonzero(active)
        if ids.size == 0:
            break
        q = rotations[it % ROTATION_POOL]
        dirs = np.vstack([eye, -eye, q, -q])
        Xa, sa = X[ids], step[ids]
        polls = Xa[:, None, :] + sa[:, None, None] * dirs[None, :, :] * width
        # relative moves toward and away from each bound resolve coordinates
        # pinned near a bound to far below the absolute step
        rel = sa[:, None, None] * eye[None, :, :]
        dlo, dhi = (Xa - lo)[:, None, :], (hi - Xa)[:, None, :]
        extra = [Xa[:, None, :] + rel * dlo, Xa[:, None, :] - 0.5 * rel * dlo,
                 Xa[:, None, :] - rel * dhi, Xa[:, None, :] + 0.5 * rel * dhi]
        polls = np.clip(np.concatenate([polls] + extra, axis=1), lo, hi)
        P = polls.shape[1]
        V = fun(polls.reshape(-1, n)).reshape(ids.size, P)
        best = np.argmin(V, axis=1)
        bv = V[np.arange(ids.size), best]
        improved = bv < F[ids]
        with np.errstate(invalid="ignore"):
            significant = bv < F[ids] - config.f_tolerance * np.maximum(1.0, np.abs(F[ids]))
        stall[ids] = np.where(significant, 0, stall[ids] + 1)
        up, down = ids[improved], ids[~improved]
        X[up] = polls[improved, best[improved]]
        F[up] = bv[improved]
        step[up] = np.minimum(step[up] * 2.0, 0.5)
        step[down] *= 0.5
        active[down[step[down] < config.x_tolerance]] = False
        active[ids[stall[ids] >= STALL_LIMIT]] = False
    return X, F


def _tie_order(X: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Indices sorted by value, ties broken by lexicographically smaller x."""
    return np.lexsort(tuple(X.T[::-1]) + (F,))


def _polish(terms, problem: Problem, x0: np.ndarray) -> np.ndarray:
    """Refine ``x0`` on ``min t s.t. terms_i(x) <= t`` with SLSQP.

    ``terms`` maps (N, n) points to (N, k) terms whose maximum is minimized;
    the max is non-smooth where terms tie, the epigraph form is not.
    Derivatives are central differences computed in one batch.
    """
    lo, hi = problem.lower, problem.upper
    n = problem.n
    h = 1e-7 * np.maximum(hi - lo, 1e-12)

    def jac_terms(x):
        P = np.repeat(x[None, :], 2 * n, axis=0)
        up = np.minimum(x + h, hi)
        dn = np.maximum(x - h, lo)
        P[np.arange(n), np.arange(n)] = up
        P[n + np.arange(n), np.arange(n)] = dn
        T = terms(P)
        span = np.where(up > dn, up - dn, 1.0)
        return ((T[:n] - T[n:]) / span[:, None]).T

    T0 = terms(x0[None])[0]
    ones = np.ones((T0.size, 1))
    cons = {
        "type": "ineq",
        "fun": lambda v: v[-1] - terms(v[None, :-1])[0],
        "jac": lambda v: np.hstack([-jac_terms(v[:-1]), ones]),
    }
    t0 = float(np.max(T0))
    v0 = np.append(x0, t0)
    bounds = list(zip(lo, hi)) + [(None, None)]
    with np.errstate(all="ignore"):
        try:
            res = minimize(lambda v: v[-1], v0, jac=lambda v: np.eye(n + 1)[-1], bounds=bounds,
                           constraints=[cons], method="SLSQP", options={"maxiter": 100, "ftol": 1e-15})
        except (ValueError, np.linalg.LinAlgError):
            return x0
    x = np.clip(res.x[:-1], lo, hi)
    return x if np.all(np.isfinite(x)) else x0


def minimize_box(fun, problem: Problem, config: SolverConfig, seed: int | None = None,
                 starts: np.ndarray | None = None, terms=None) -> tuple[np.ndarray, np.ndarray]:
    """Multi-restart minimization of a batch function over the problem box.

    ``terms``, when given, returns the pieces whose maximum is ``fun``; the
    best ``config.polish`` restarts are then refined on the epigraph form
    and a refinement is kept only if it lowers ``fun``.
    Returns all restart results ``(X, F)`` sorted best first (ties by smaller x).
    """
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    if starts is None:
        starts = _halton_starts(problem, config.restarts, seed)

    def guarded(P):
        v = np.asarray(fun(P), dtype=float)
        # NaN must never win a comparison
        return np.where(np.isnan(v), np.inf, v)

    X, F = _minimize_lockstep(guarded, problem, starts, config, rng)
    if not np.any(np.isfinite(F)):
        raise EvaluationError(f"no finite value found for {problem.name}")
    order = _tie_order(X, F)
    X, F = X[order], F[order]
    if terms is not None and config.polish > 0:
        done: list[np.ndarray] = []
        scale = np.maximum(problem.upper - problem.lower, 1e-300)
        for r in range(min(config.polish, len(X))):
            if not np.isfinite(F[r]):
                continue
            # restarts that ended at the same point need one polish only
            if any(np.max(np.abs(X[r] - d) / scale) <= config.merge_tolerance for d in done):
                continue
            done.append(X[r].copy())
            x = _polish(terms, problem, X[r])
            v = guarded(x[None])[0]
            if v < F[r]:
                X[r], F[r] = x, v
        order = _tie_order(X, F)
        X, F = X[order], F[order]
    return X, F


def _weight_seed(config: SolverConfig, w: np.ndarray) -> int:
    """Seed for one weight, independent of scheduling order."""
    key = np.round(np.asarray(w) * 2**20).astype(np.int64)
    return int(np.random.SeedSequence([config.seed & 0xFFFFFFFF, *key.tolist()]).generate_state(1)[0])


def _scalarized(problem: Problem, w: np.ndarray, z: UtopianPoint):
    idx = list(support(w).indices)
    wi, zi = w[idx], z.z[idx]
    objs = [problem.objectives[i] for i in idx]

    def terms(P):
        return np.stack([wv * (f(P) - zv) for f, wv, zv in zip(objs, wi, zi)], axis=-1)

    return terms


def scalarized_optima(problem: Problem, w, z: UtopianPoint, subset: ObjectiveSubset,
                      config: SolverConfig) -> tuple[np.ndarray, np.ndarray]:
    """Every restart result of the Tchebyshev problem, best first.

    Returns ``(X, F)`` with ``F`` the scalarized values.
    """
    w = _check_weight(w, problem.m)
    if not support(w).issubset(subset):
        raise ValueError(f"support of {w.tolist()} is not inside {subset}")
    terms = _scalarized(problem, w, z)
    return minimize_box(lambda P: np.max(terms(P), axis=-1), problem, config,
                        seed=_weight_seed(config, w), terms=terms)


def solve_scalarized(problem: Problem, w, z: UtopianPoint, subset: ObjectiveSubset,
                     config: SolverConfig) -> EvaluationRecord:
    """Best point found for ``min_x max_i w_i (f_i(x) - z_i)``."""
    X, _ = scalarized_optima(problem, w, z, subset, config)
    x = X[0]
    y = problem.evaluate_batch(x[None])[0]
    if not np.all(np.isfinite(y)):
        raise EvaluationError(f"non-finite objective at the optimum of {problem.name}")
    return EvaluationRecord(x, y)


def objective_ranges(problem: Problem, samples: int = 256, seed: int = 0) -> np.ndarray:
    """Rough per-objective ranges from quasi-random samples of the box."""
    P = _halton_starts(problem, samples, seed)
    Y = problem.evaluate_batch(P)
    Y = np.where(np.isfinite(Y), Y, np.nan)
    r = np.fmax.reduce(Y, axis=0) - np.fmin.reduce(Y, axis=0)
    return np.where(np.isfinite(r) & (r > 0), r, 1.0)


def estimate_utopian(problem: Problem, config: SolverConfig, margin_scale: float = 1e-6) -> UtopianPoint:
    """Minimize each objective alone; subtract ``margin_scale`` times its sampled range."""
    if problem.m < 1:
        raise ValueError("utopian point needs at least one objective")
    margin = margin_scale * objective_ranges(problem, seed=config.seed)
    z = np.empty(problem.m)
    for i, f in enumerate(problem.objectives):
        w = np.zeros(problem.m)
        w[i] = 1.0
        _, F = minimize_box(f, problem, config, seed=_weight_seed(config, w),
                            terms=lambda P, f=f: np.asarray(f(P))[:, None])
        if not np.isfinite(F[0]):
            raise EvaluationError(f"objective {i} of {problem.name} has no finite minimum")
        z[i] = F[0] - margin[i]
    return UtopianPoint(z, margin)


def _worker_count() -> int:
    env = os.environ.get("SIMPLICIA_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def map_ordered(fn, items):
    """``map`` over a thread pool capped by ``SIMPLICIA_THREADS``; results keep input order."""
    items = list(items)
    workers = _worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def deduplicate(archive: SolutionArchive, subset: ObjectiveSubset, x_tol: float) -> SolutionArchive:
    """Merge points closer than ``x_tol`` in decision space.

    Within a cluster the representative is one that no other member
    dominates under ``subset``, the earliest in canonical order among those.
    """
    arch = archive.sorted()
    if len(arch) < 2:
        return arch
    keep: list[int] = []
    used = np.zeros(len(arch), dtype=bool)
    idx = list(subset.indices)
    for i in range(len(arch)):
        if used[i]:
            continue
        near = np.flatnonzero(~used & (np.linalg.norm(arch.X - arch.X[i], axis=1) < x_tol))
        used[near] = True
        Ys = arch.Y[near][:, idx]
        winners = near[pareto_filter(Ys, ObjectiveSubset.full(len(idx)))]
        keep.append(int(winners.min()))
    return arch.take(sorted(keep))


def pareto_refine(problem: Problem, subset: ObjectiveSubset, x: np.ndarray, config: SolverConfig) -> np.ndarray:
    """Move ``x`` to a point that dominates it under ``subset``, if the search finds one.

    Minimizes the sum of the subset's objectives over points that are no
    worse than ``x`` in any of them. Tchebyshev optima are only weakly
    Pareto optimal in general; this removes the weak part.
    """
    idx = list(subset.indices)
    fx = problem.evaluate_batch(x[None])[0][idx]

    def fun(P):
        Y = problem.evaluate_batch(P)[:, idx]
        return np.where(np.all(Y <= fx, axis=1), (Y - fx).sum(axis=1), np.inf)

    X, F = minimize_box(fun, problem, replace(config, restarts=1, polish=0), starts=x[None])
    return X[0] if F[0] < 0 else x


@dataclass
class SweepFailure:
    weight: np.ndarray
    message: str


@dataclass
class SweepTrace:
    """Extra output of :func:`weight_sweep`.

    ``raw`` keeps every per-weight optimum before deduplication and Pareto
    filtering; ``alternatives`` lists, per weight, the restart optima whose
    scalarized value is within ``near_tol`` of the best one.
    """

    near_tol: float = 0.0
    raw: SolutionArchive | None = None
    alternatives: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)


def weight_sweep(problem: Problem, subset: ObjectiveSubset, density: int, z: UtopianPoint,
                 config: SolverConfig, failures: list | None = None,
                 trace: SweepTrace | None = None) -> SolutionArchive:
    """Solve the Tchebyshev problem for every face weight of ``subset``.

    The archive is deduplicated in decision space, reduced to its Pareto
    points under ``subset`` and sorted canonically. Per-weight solver errors
    are logged and appended to ``failures`` instead of aborting.
    """
    W = generate_face_weights(problem.m, subset, density)

    def one(w):
        try:
            X, F = scalarized_optima(problem, w, z, subset, config)
        except (EvaluationError, FloatingPointError) as exc:
            return SweepFailure(w, str(exc))
        y = problem.evaluate_batch(X[:1])[0]
        if not np.all(np.isfinite(y)):
            return SweepFailure(w, f"non-finite objective at the optimum of {problem.name}")
        near = X[F <= F[0] + (trace.near_tol if trace is not None else 0.0)]
        raw = EvaluationRecord(X[0], y)
        if subset.k < 2:
            return raw, raw, near
        x = pareto_refine(problem, subset, X[0], config)
        return EvaluationRecord(x, problem.evaluate_batch(x[None])[0]), raw, near

    results = map_ordered(one, W)
    X, Y, Ws, raw = [], [], [], []
    for w, res in zip(W, results):
        if isinstance(res, SweepFailure):
            log.warning("sweep on %s failed at weight %s: %s", subset, w.tolist(), res.message)
            if failures is not None:
                failures.append(res)
            continue
        rec, first, near = res
        raw.append(first)
        X.append(rec.x)
        Y.append(rec.y)
        Ws.append(w)
        if trace is not None and len(near) > 1:
            trace.alternatives.append((w, near))
    if not X:
        if trace is not None:
            trace.raw = SolutionArchive.empty(subset, problem.n)
        return SolutionArchive.empty(subset, problem.n)
    arch = SolutionArchive(subset, np.array(X), np.array(Y), np.array(Ws))
    if trace is not None:
        trace.raw = SolutionArchive(subset, np.array([r.x for r in raw]), np.array([r.y for r in raw]),
                                    np.array(Ws))
    arch = deduplicate(arch, subset, config.merge_tolerance * max(problem.diagonal, 1.0))
    return arch.take(pareto_filter(arch.Y, subset)).sorted()


def with_seed(config: SolverConfig, seed: int) -> SolverConfig:
    return replace(config, seed=seed)
