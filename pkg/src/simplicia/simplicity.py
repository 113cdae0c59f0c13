"""Witness search that tries to falsify the simplicity of a problem.

Numerical tests can only refute simplicity. Every FALSIFIED entry carries
a self-contained witness (decision vectors and their evaluations) that
:func:`replay_witness` re-checks from scratch. Passing every test yields
the verdict NOT_FALSIFIED, never "simple".
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .dominance import GridSpec, dominates_with_tolerance, grid_oracles, pareto_filter
from .problem import ObjectiveSubset, Problem, SolutionArchive, enumerate_subproblems
from .scalarize import (
    SolverConfig,
    SweepTrace,
    UtopianPoint,
    _halton_starts,
    _scan_grid,
    _weight_seed,
    minimize_box,
    objective_ranges,
    scalarized_optima,
    weight_sweep,
)
from .strata import Label, Stratum, _label_small, mean_nn_spacing

log = logging.getLogger(__name__)

REPORT_HEADER = ("Numerical tests can only falsify simplicity; "
                 "NOT_FALSIFIED means no witness was found, not that the problem is simple.")

TESTS = ("unused_variable", "injectivity", "weak_nonpareto", "projection_injectivity", "connectivity")


class Status(enum.Enum):
    FALSIFIED = "FALSIFIED"
    NOT_FALSIFIED = "NOT_FALSIFIED"
    INCONCLUSIVE = "INCONCLUSIVE"


class Verdict(enum.Enum):
    NON_SIMPLE = "NON_SIMPLE"
    NOT_FALSIFIED = "NOT_FALSIFIED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class TestEntry:
    test: str
    subset: ObjectiveSubset
    status: Status
    witness: dict | None = None
    note: str = ""


@dataclass
class SimplicityReport:
    problem_name: str
    entries: list[TestEntry] = field(default_factory=list)

    @property
    def verdict(self) -> Verdict:
        if any(e.status is Status.FALSIFIED for e in self.entries):
            return Verdict.NON_SIMPLE
        if self.entries and all(e.status is Status.INCONCLUSIVE for e in self.entries):
            return Verdict.INCONCLUSIVE
        return Verdict.NOT_FALSIFIED

    def falsified(self, test: str | None = None) -> list[TestEntry]:
        return [e for e in self.entries if e.status is Status.FALSIFIED and test in (None, e.test)]

    def table(self) -> str:
        """Fixed-width text rendering."""
        lines = [f"problem: {self.problem_name}", REPORT_HEADER,
                 f"{'test':<24}{'subset':<14}{'status':<16}witness"]
        for e in self.entries:
            kind = e.witness.get("kind", "") if e.witness else ""
            lines.append(f"{e.test:<24}{str(e.subset):<14}{e.status.value:<16}{kind}")
        lines.append(f"verdict: {self.verdict.value}")
        return "\n".join(lines)


@dataclass(frozen=True)
class SuiteConfig:
    """Budgets and tolerances of the witness search.

    ``x_separation`` and ``f_tol`` are relative: to the box diagonal and to
    each objective's sampled range.
    """

    solver: SolverConfig = field(default_factory=SolverConfig)
    density: int = 10
    oracle_max_n: int = 4
    oracle_budget: int = 1_000_000
    oracle_max_count: int = 41
    x_separation: float = 1e-2
    f_tol: float = 1e-6
    probe_samples: int = 64
    probe_step: float = 1e-3
    max_certifications: int = 4
    connectivity_factor: float = 3.0
    refine_rounds: int = 3


def _point(problem: Problem, x) -> dict:
    x = np.asarray(x, dtype=float)
    return {"x": x.tolist(), "y": problem.evaluate_batch(x[None])[0].tolist()}


# ---------------------------------------------------------------- standalone tests

def weak_nonpareto_witness(problem: Problem, archives: tuple[SolutionArchive, SolutionArchive],
                           tol: float = 0.0, solver: SolverConfig | None = None,
                           max_candidates: int = 8) -> dict | None:
    """First weakly Pareto point that some Pareto point dominates.

    ``archives`` is a (Pareto, weak-Pareto) pair over the same subset, e.g.
    from :func:`grid_oracle`. On a finite sample a point can look weakly
    Pareto only because its strict improvements fall between samples, so
    each candidate is certified by a continuous search for a point strictly
    better in every objective (by more than ``max(tol, 1e-9)``); at most
    ``max_candidates`` candidates are certified. The witness is
    ``{"dominated", "dominator"}``.
    """
    pareto, weak = archives
    if len(weak) < 2 or len(pareto) == 0:
        return None
    solver = solver or SolverConfig()
    idx = list(weak.subset.indices)
    P = pareto.Y[:, idx]
    tried = 0
    for x, y in zip(weak.X, weak.Y):
        dom = dominates_with_tolerance(P, y[idx], tol)
        if not dom.any():
            continue
        if tried >= max_candidates:
            break
        tried += 1
        scale = np.full(len(idx), max(tol, 1e-9))
        if _improvement(problem, solver, x, idx, scale, weak=True) >= -1.0:
            j = int(np.argmax(dom))
            return {"kind": "weak_nonpareto", "dominated": _point(problem, x),
                    "dominator": _point(problem, pareto.X[j])}
    return None


def _injective_pairs(X: np.ndarray, Yg: np.ndarray, x_separation: float, f_tol):
    """Yield (i, j): ``|Yg_i - Yg_j|_inf <= 1`` after scaling by ``f_tol``, x far apart."""
    if len(X) < 2:
        return
    S = Yg / np.broadcast_to(np.asarray(f_tol, dtype=float), Yg.shape[1:])
    tree = cKDTree(S)
    seen = set()
    for i in range(len(X)):
        nb = [j for j in tree.query_ball_point(S[i], r=1.0, p=np.inf) if j != i]
        if not nb:
            continue
        nb = np.array(nb)
        d = np.linalg.norm(X[nb] - X[i], axis=1)
        j = int(nb[np.argmax(d)])
        key = (min(i, j), max(i, j))
        if d.max() >= x_separation and key not in seen:
            seen.add(key)
            yield i, j


def injectivity_witness(archive: SolutionArchive, subset: ObjectiveSubset, x_separation: float,
                        f_tol) -> dict | None:
    """Two archive points far apart in decision space but equal under ``subset``."""
    idx = list(subset.indices)
    for i, j in _injective_pairs(archive.X, archive.Y[:, idx], x_separation, f_tol):
        return {"kind": "injectivity", "points": [{"x": archive.X[i].tolist(), "y": archive.Y[i].tolist()},
                                                  {"x": archive.X[j].tolist(), "y": archive.Y[j].tolist()}]}
    return None


def _projection_pairs(Y: np.ndarray, i: int, tol):
    if len(Y) < 2:
        return
    tol = np.broadcast_to(np.asarray(tol, dtype=float), Y.shape[1:])
    keep = [c for c in range(Y.shape[1]) if c != i]
    S = Y[:, keep] / tol[keep] if keep else np.zeros((len(Y), 1))
    tree = cKDTree(S)
    for a in range(len(Y)):
        for b in tree.query_ball_point(S[a], r=1.0, p=np.inf):
            if b > a and abs(Y[a, i] - Y[b, i]) > tol[i]:
                yield a, b


def projection_injectivity_witness(Y, drop: int, tol) -> tuple[int, int] | None:
    """Indices of two points equal within ``tol`` except in coordinate ``drop``."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    for pair in _projection_pairs(Y, drop, tol):
        return pair
    return None


def unused_variable_probe(problem: Problem, samples: np.ndarray, h_step: float) -> np.ndarray:
    """Boolean (m, n) matrix: objective i never changes when variable j moves.

    Each probe moves one coordinate by ``+-h_step`` times its box width;
    probes leaving the box are reflected inward. Differences must be
    exactly zero at every sample and for both signs.
    """
    if h_step <= 0:
        raise ValueError("h_step must be positive")
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    if len(X) < 1:
        raise ValueError("need at least one probe point")
    lo, hi = problem.lower, problem.upper
    base = problem.evaluate_batch(X)
    unused = np.ones((problem.m, problem.n), dtype=bool)
    for j in range(problem.n):
        h = h_step * (hi[j] - lo[j])
        if h == 0:
            continue
        for sign in (1.0, -1.0):
            P = X.copy()
            v = P[:, j] + sign * h
            v = np.where(v > hi[j], 2 * hi[j] - v, v)
            v = np.where(v < lo[j], 2 * lo[j] - v, v)
            P[:, j] = np.clip(v, lo[j], hi[j])
            unused[:, j] &= np.all(problem.evaluate_batch(P) == base, axis=0)
    return unused


def connectivity_check(points, epsilon: float) -> int:
    """Number of connected components of the epsilon-neighbourhood graph."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if len(P) == 0:
        raise ValueError("need at least one point")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if len(P) == 1:
        return 1
    graph = cKDTree(P).sparse_distance_matrix(cKDTree(P), epsilon, output_type="coo_matrix")
    return int(connected_components(graph, directed=False)[0])


def _components(P: np.ndarray, epsilon: float) -> np.ndarray:
    graph = cKDTree(P).sparse_distance_matrix(cKDTree(P), epsilon, output_type="coo_matrix")
    return connected_components(graph, directed=False)[1]


# ---------------------------------------------------------------- the suite

@dataclass
class _Context:
    problem: Problem
    config: SuiteConfig
    ranges: np.ndarray
    f_tol: np.ndarray
    x_sep: float
    minima: list[tuple[np.ndarray, np.ndarray]]
    z: UtopianPoint
    oracle: dict = field(default_factory=dict)
    sweeps: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict)

    @property
    def solver(self) -> SolverConfig:
        return self.config.solver


def _single_minima(problem: Problem, config: SolverConfig, margin: np.ndarray):
    out = []
    for i, f in enumerate(problem.objectives):
        w = np.zeros(problem.m)
        w[i] = 1.0
        X, F = minimize_box(f, problem, config, seed=_weight_seed(config, w),
                            terms=lambda P, f=f: np.asarray(f(P))[:, None])
        out.append((X, F))
    z = np.array([F[0] for _, F in out]) - margin
    return out, UtopianPoint(z, margin)


def _local_min(ctx: _Context, i: int, x: np.ndarray) -> np.ndarray:
    f = ctx.problem.objectives[i]
    X, _ = minimize_box(f, ctx.problem, ctx.solver, starts=np.asarray(x, dtype=float)[None],
                        terms=lambda P: np.asarray(f(P))[:, None])
    return X[0]


def _improvement(problem: Problem, solver: SolverConfig, x: np.ndarray, idx: list[int], tol: np.ndarray,
                 weak: bool) -> float:
    """Best improvement over ``x`` found in units of ``tol`` (negative means improved).

    ``weak``: ``min_z max_i`` (strict improvement in every objective).
    Otherwise a penalized sum that is negative only for dominating points.
    """
    x = np.asarray(x, dtype=float)
    fx = problem.evaluate_batch(x[None])[0][idx]
    objs = [problem.objectives[i] for i in idx]

    def terms(P):
        return np.stack([(f(P) - v) / t for f, v, t in zip(objs, fx, tol)], axis=-1)

    if weak:
        fun = lambda P: np.max(terms(P), axis=-1)  # noqa: E731
        T = terms
    else:
        def fun(P):
            D = terms(P)
            return D.sum(axis=-1) + 100.0 * np.maximum(D, 0.0).sum(axis=-1)
        T = None
    starts = np.vstack([x[None], _halton_starts(problem, solver.restarts - 1, solver.seed)])
    _, F = minimize_box(fun, problem, solver, starts=starts, terms=T)
    return float(F[0])


def _dominance_gap(ctx: _Context, x: np.ndarray, subset: ObjectiveSubset, weak: bool) -> float:
    idx = list(subset.indices)
    return _improvement(ctx.problem, ctx.solver, x, idx, ctx.f_tol[idx], weak)


def _is_member(ctx: _Context, x: np.ndarray, subset: ObjectiveSubset) -> bool:
    """Whether the search finds ``x`` Pareto optimal for ``subset`` (within tolerance)."""
    if subset.k == 1:
        i = subset.indices[0]
        y = ctx.problem.evaluate_batch(x[None])[0][i]
        return bool(y <= ctx.minima[i][1][0] + ctx.f_tol[i])
    return _dominance_gap(ctx, x, subset, weak=False) >= -1.0 * subset.k


def _certify_pair(ctx: _Context, xa, xb, subset: ObjectiveSubset) -> tuple[np.ndarray, np.ndarray] | None:
    """Polish a candidate pair with equal images; return it if it survives."""
    xa, xb = np.asarray(xa, dtype=float), np.asarray(xb, dtype=float)
    idx = list(subset.indices)
    if subset.k == 1:
        xa, xb = _local_min(ctx, idx[0], xa), _local_min(ctx, idx[0], xb)
    ya, yb = ctx.problem.evaluate_batch(np.stack([xa, xb]))[:, idx].T.T
    if np.any(np.abs(ya - yb) > ctx.f_tol[idx]) or np.linalg.norm(xa - xb) < ctx.x_sep:
        return None
    # Pareto membership depends only on the image, so one check covers both
    return (xa, xb) if _is_member(ctx, xa, subset) else None


def _pair_witness(ctx, kind, xa, xb, **extra) -> dict:
    return {"kind": kind, "points": [_point(ctx.problem, xa), _point(ctx.problem, xb)], **extra}


def _scan_alternatives(ctx: _Context, i: int, x: np.ndarray) -> list[np.ndarray]:
    """Points differing from ``x`` in one coordinate whose f_i is within tolerance of f_i(x)."""
    f = ctx.problem.objectives[i]
    fx = float(f(x[None])[0])
    out = []
    for j in range(ctx.problem.n):
        grid = _scan_grid(ctx.problem.lower[j], ctx.problem.upper[j], ctx.solver.scan_points)
        P = np.repeat(x[None], grid.size, axis=0)
        P[:, j] = grid
        near = np.flatnonzero(np.asarray(f(P)) <= fx + ctx.f_tol[i])
        if near.size:
            far = near[np.argmax(np.abs(grid[near] - x[j]))]
            if abs(grid[far] - x[j]) > 0:
                out.append(P[far])
    return out


def _candidates_k1(ctx: _Context, subset: ObjectiveSubset):
    i = subset.indices[0]
    if subset in ctx.oracle:
        arch = ctx.oracle[subset][0]
        for a, b in _injective_pairs(arch.X, arch.Y[:, [i]], ctx.x_sep, ctx.f_tol[[i]]):
            yield "oracle", arch.X[a], arch.X[b]
    X, F = ctx.minima[i]
    near = X[F <= F[0] + ctx.f_tol[i]]
    for xb in near[1:]:
        if np.linalg.norm(xb - near[0]) >= ctx.x_sep:
            yield "restarts", near[0], xb
            break
    for xb in _scan_alternatives(ctx, i, X[0]):
        if np.linalg.norm(xb - X[0]) >= ctx.x_sep:
            yield "scan", X[0], xb


def _candidates_multi(ctx: _Context, subset: ObjectiveSubset):
    idx = list(subset.indices)
    if subset in ctx.oracle:
        arch = ctx.oracle[subset][0]
        for a, b in _injective_pairs(arch.X, arch.Y[:, idx], ctx.x_sep, ctx.f_tol[idx]):
            yield "oracle", arch.X[a], arch.X[b]
    arch = ctx.sweeps[subset]
    for a, b in _injective_pairs(arch.X, arch.Y[:, idx], ctx.x_sep, ctx.f_tol[idx]):
        yield "sweep", arch.X[a], arch.X[b]
    for _w, near in ctx.traces[subset].alternatives:
        Y = ctx.problem.evaluate_batch(near)[:, idx]
        for a, b in _injective_pairs(near, Y, ctx.x_sep, ctx.f_tol[idx]):
            yield "restarts", near[a], near[b]
            break


def _test_injectivity(ctx: _Context, subset: ObjectiveSubset) -> TestEntry:
    gen = _candidates_k1(ctx, subset) if subset.k == 1 else _candidates_multi(ctx, subset)
    kind = "multi_optimum" if subset.k == 1 else "injectivity"
    tried = 0
    for source, xa, xb in gen:
        if tried >= ctx.config.max_certifications:
            break
        tried += 1
        pair = _certify_pair(ctx, xa, xb, subset)
        if pair is not None:
            return TestEntry("injectivity", subset, Status.FALSIFIED,
                             _pair_witness(ctx, kind, *pair, source=source, subset=list(subset.indices)))
    return TestEntry("injectivity", subset, Status.NOT_FALSIFIED, note=f"{tried} candidates rejected")


def _test_unused(ctx: _Context, matrix: np.ndarray, i: int) -> TestEntry:
    subset = ObjectiveSubset.from_indices([i], ctx.problem.m)
    cols = np.flatnonzero(matrix[i] & (ctx.problem.upper > ctx.problem.lower))
    if cols.size == 0:
        return TestEntry("unused_variable", subset, Status.NOT_FALSIFIED)
    x = ctx.minima[i][0][0]
    lo, hi = ctx.problem.lower, ctx.problem.upper
    for j in cols:
        xb = x.copy()
        xb[j] = lo[j] if x[j] - lo[j] > hi[j] - x[j] else hi[j]
        f = ctx.problem.objectives[i]
        if abs(float(f(xb[None])[0]) - float(f(x[None])[0])) <= ctx.f_tol[i] \
                and np.linalg.norm(xb - x) >= ctx.x_sep:
            return TestEntry("unused_variable", subset, Status.FALSIFIED,
                             _pair_witness(ctx, "unused_variable", x, xb, objective=i, variable=int(j),
                                           unused=[int(c) for c in cols], subset=[i]))
    return TestEntry("unused_variable", subset, Status.NOT_FALSIFIED,
                     note="probe flagged variables, but moving them changes the minimum")


def _test_weak(ctx: _Context, subset: ObjectiveSubset) -> TestEntry:
    idx = list(subset.indices)
    tol = ctx.f_tol[idx]
    pools = []
    if subset in ctx.oracle:
        pareto, weak = ctx.oracle[subset]
        pools.append(("oracle", weak, pareto))
    raw = ctx.traces[subset].raw
    pools.append(("sweep", raw, ctx.sweeps[subset]))
    tried = 0
    for source, cand, ref in pools:
        if len(cand) == 0 or len(ref) == 0:
            continue
        R = ref.Y[:, idx]
        for x, y in zip(cand.X, cand.Y):
            dom = np.all(R <= y[idx] + tol, axis=1) & np.any(R < y[idx] - tol, axis=1)
            if not dom.any():
                continue
            if tried >= ctx.config.max_certifications:
                break
            tried += 1
            if _dominance_gap(ctx, x, subset, weak=True) >= -1.0:
                j = int(np.argmax(dom))
                return TestEntry("weak_nonpareto", subset, Status.FALSIFIED,
                                 {"kind": "weak_nonpareto", "source": source, "subset": idx,
                                  "dominated": _point(ctx.problem, x),
                                  "dominator": _point(ctx.problem, ref.X[j])})
    return TestEntry("weak_nonpareto", subset, Status.NOT_FALSIFIED, note=f"{tried} candidates rejected")


def _interior(arch: SolutionArchive, subset: ObjectiveSubset) -> SolutionArchive:
    if subset.k == 1 or len(arch) < 2:
        return arch
    st = Stratum(subset, arch)
    labels = _label_small(st, 8, 0.75)
    return arch.take(np.flatnonzero([lab is Label.INTERIOR for lab in labels]))


def _test_projection(ctx: _Context, subset: ObjectiveSubset) -> TestEntry:
    pools = []
    if subset in ctx.oracle:
        pools.append(("oracle", ctx.oracle[subset][0]))
    pools.append(("sweep", ctx.sweeps[subset]))
    tried = 0
    for source, arch in pools:
        inner = _interior(arch, subset)
        for i in range(ctx.problem.m):
            for a, b in _projection_pairs(inner.Y, i, ctx.f_tol):
                if tried >= ctx.config.max_certifications:
                    break
                tried += 1
                xa, xb = inner.X[a], inner.X[b]
                if _is_member(ctx, xa, subset) and _is_member(ctx, xb, subset):
                    return TestEntry("projection_injectivity", subset, Status.FALSIFIED,
                                     _pair_witness(ctx, "projection_injectivity", xa, xb, dropped=i,
                                                   source=source, subset=list(subset.indices)))
                break
    return TestEntry("projection_injectivity", subset, Status.NOT_FALSIFIED, note=f"{tried} candidates rejected")


def _test_connectivity(ctx: _Context, subset: ObjectiveSubset) -> TestEntry:
    arch = ctx.sweeps[subset]
    if len(arch) < 2:
        return TestEntry("connectivity", subset, Status.NOT_FALSIFIED, note="fewer than two points")
    Y = arch.Y / ctx.ranges
    eps = ctx.config.connectivity_factor * mean_nn_spacing(Y)
    if eps <= 0:
        return TestEntry("connectivity", subset, Status.NOT_FALSIFIED, note="all points coincide")
    X, W = arch.X.copy(), arch.W.copy()
    for _ in range(ctx.config.refine_rounds + 1):
        labels = _components(Y, eps)
        if labels.max() == 0:
            return TestEntry("connectivity", subset, Status.NOT_FALSIFIED)
        # closest pair of points from different components
        best = (np.inf, 0, 0)
        for c in range(labels.max() + 1):
            inside, outside = np.flatnonzero(labels == c), np.flatnonzero(labels != c)
            d, j = cKDTree(Y[outside]).query(Y[inside])
            k = int(np.argmin(d))
            if d[k] < best[0]:
                best = (float(d[k]), int(inside[k]), int(outside[j[k]]))
        _, a, b = best
        if np.isnan(W[a]).any() or np.isnan(W[b]).any():
            break
        new = []
        for t in (0.25, 0.5, 0.75):
            w = (1 - t) * W[a] + t * W[b]
            w = w / w.sum()
            Xs, _ = scalarized_optima(ctx.problem, w, ctx.z, subset, ctx.solver)
            new.append((Xs[0], w))
        Xn = np.array([p for p, _ in new])
        X = np.vstack([X, Xn])
        W = np.vstack([W, [w for _, w in new]])
        Yall = ctx.problem.evaluate_batch(X)
        keep = pareto_filter(Yall, subset)
        X, W, Y = X[keep], W[keep], Yall[keep] / ctx.ranges
    gap, a, b = best
    return TestEntry("connectivity", subset, Status.FALSIFIED,
                     _pair_witness(ctx, "connectivity", X[a], X[b], components=int(labels.max() + 1),
                                   gap=gap, epsilon=eps, subset=list(subset.indices)))


def _oracle_count(n: int, config: SuiteConfig) -> int | None:
    if n > config.oracle_max_n:
        return None
    c = min(config.oracle_max_count, int(np.floor(config.oracle_budget ** (1.0 / n) + 1e-9)))
    c -= (c + 1) % 2
    return c if c >= 3 else None


def _guard(test: str, subset: ObjectiveSubset, fn, *args) -> TestEntry:
    try:
        return fn(*args)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        log.warning("%s on %s failed: %s", test, subset, exc)
        return TestEntry(test, subset, Status.INCONCLUSIVE, note=str(exc))


def run_simplicity_suite(problem: Problem, config: SuiteConfig | None = None) -> SimplicityReport:
    """Run every test over every nonempty subproblem and collect the entries.

    Oracle archives are used when the lattice fits the budget; weight sweeps
    are always computed. Entries are ordered by subset, then by test.
    """
    config = config or SuiteConfig()
    report = SimplicityReport(problem.name)
    if problem.m == 0:
        return report
    ranges = objective_ranges(problem, seed=config.solver.seed)
    minima, z = _single_minima(problem, config.solver, 1e-6 * ranges)
    ctx = _Context(problem, config, ranges, config.f_tol * ranges,
                   config.x_separation * problem.diagonal, minima, z)
    count = _oracle_count(problem.n, config)
    subsets = [s for s in enumerate_subproblems(problem.m) if s.k > 0]
    if count is not None:
        ctx.oracle = grid_oracles(problem, GridSpec.uniform(problem.n, count, config.oracle_budget), subsets)
    for s in subsets:
        trace = SweepTrace(near_tol=config.f_tol * float(ranges.max()))
        ctx.sweeps[s] = weight_sweep(problem, s, config.density, z, config.solver, trace=trace)
        ctx.traces[s] = trace

    matrix = unused_variable_probe(problem, _halton_starts(problem, config.probe_samples, config.solver.seed + 1),
                                   config.probe_step)
    for s in subsets:
        if s.k == 1:
            report.entries.append(_guard("unused_variable", s, _test_unused, ctx, matrix, s.indices[0]))
        report.entries.append(_guard("injectivity", s, _test_injectivity, ctx, s))
        if s.k >= 2:
            report.entries.append(_guard("weak_nonpareto", s, _test_weak, ctx, s))
        report.entries.append(_guard("projection_injectivity", s, _test_projection, ctx, s))
        if s.k >= 2:
            report.entries.append(_guard("connectivity", s, _test_connectivity, ctx, s))
    return report


# ---------------------------------------------------------------- replay

def replay_witness(problem: Problem, entry: TestEntry, f_tol, x_separation: float = 0.0) -> bool:
    """Re-evaluate a witness and check the relation it claims.

    ``f_tol`` is absolute, scalar or per objective. Only the finite relation
    is checked; optimality of the points is taken from the report.
    """
    w = entry.witness
    if w is None:
        return False
    f_tol = np.broadcast_to(np.asarray(f_tol, dtype=float), (problem.m,))
    idx = list(entry.subset.indices)
    if w["kind"] == "weak_nonpareto":
        a = problem.evaluate_batch(np.array([w["dominator"]["x"]]))[0]
        b = problem.evaluate_batch(np.array([w["dominated"]["x"]]))[0]
        return bool(dominates_with_tolerance(a[idx], b[idx], f_tol[idx]))
    X = np.array([p["x"] for p in w["points"]])
    Y = problem.evaluate_batch(X)
    if not np.allclose(Y, np.array([p["y"] for p in w["points"]]), rtol=0, atol=0):
        return False
    far = np.linalg.norm(X[0] - X[1]) >= x_separation
    if w["kind"] in ("injectivity", "multi_optimum", "unused_variable"):
        return bool(far and np.all(np.abs(Y[0, idx] - Y[1, idx]) <= f_tol[idx]))
    if w["kind"] == "projection_injectivity":
        keep = [c for c in range(problem.m) if c != w["dropped"]]
        i = w["dropped"]
        return bool(np.all(np.abs(Y[0, keep] - Y[1, keep]) <= f_tol[keep])
                    and abs(Y[0, i] - Y[1, i]) > f_tol[i])
    if w["kind"] == "connectivity":
        return bool(w["components"] > 1 and w["gap"] > w["epsilon"])
    return False
