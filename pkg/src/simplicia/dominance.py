"""Dominance relations, Pareto and weak-Pareto filters, and an exhaustive grid oracle."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .problem import ObjectiveSubset, Problem, SolutionArchive, EvaluationRecord

DEFAULT_GRID_BUDGET = 10_000_000
_CHUNK = 512


class Relation(enum.Enum):
    DOMINATES = "dominates"
    DOMINATED = "dominated"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def compare(a, b, subset: ObjectiveSubset) -> Relation:
    """Dominance relation of ``a`` to ``b`` on the objectives in ``subset``.

    The empty subset compares every pair as EQUAL.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.shape[-1] != subset.m:
        raise ValueError(f"arity mismatch: {a.shape}, {b.shape} for subset over {subset.m}")
    idx = list(subset.indices)
    a, b = a[idx], b[idx]
    le, ge = bool(np.all(a <= b)), bool(np.all(a >= b))
    if le and ge:
        return Relation.EQUAL
    if le:
        return Relation.DOMINATES
    if ge:
        return Relation.DOMINATED
    return Relation.INCOMPARABLE


def _objective_matrix(points) -> np.ndarray:
    if isinstance(points, SolutionArchive):
        return points.Y
    if len(points) and isinstance(points[0], EvaluationRecord):
        return np.array([p.y for p in points], dtype=float)
    return np.asarray(points, dtype=float)


def _nondominated_unique(U: np.ndarray) -> np.ndarray:
    """Mask of non-dominated rows of a lexicographically sorted, duplicate-free matrix.

    Any dominator of a row precedes it in lexicographic order, and every
    earlier row is either kept or dominated by a kept row, so comparing each
    chunk against the kept front plus the chunk itself is exact.
    """
    keep = np.zeros(len(U), dtype=bool)
    front = np.zeros((0, U.shape[1]))
    for start in range(0, len(U), _CHUNK):
        C = U[start:start + _CHUNK]
        alive = np.ones(len(C), dtype=bool)
        for ref in (front, C):
            if len(ref) == 0:
                continue
            le = np.all(ref[None, :, :] <= C[:, None, :], axis=2)
            lt = np.any(ref[None, :, :] < C[:, None, :], axis=2)
            alive &= ~np.any(le & lt, axis=1)
        keep[start:start + len(C)] = alive
        front = np.vstack([front, C[alive]])
    return keep


def _unique_rows(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographically sorted distinct rows and the inverse index (like ``np.unique(axis=0)``)."""
    order = np.lexsort(Y.T[::-1])
    S = Y[order]
    new = np.ones(len(S), dtype=bool)
    new[1:] = np.any(S[1:] != S[:-1], axis=1)
    group = np.cumsum(new) - 1
    inverse = np.empty(len(Y), dtype=int)
    inverse[order] = group
    return S[new], inverse


def _sample_prefilter(U: np.ndarray, strict: bool = False, size: int = 256) -> np.ndarray:
    """Mask of rows not dominated by a small nondominated sample of ``U``.

    Exact as a prefilter: if a discarded row dominated some kept row, the
    sample point that discards it would dominate that row as well.
    """
    if len(U) <= 4 * _CHUNK:
        return np.ones(len(U), dtype=bool)
    span = np.ptp(U, axis=0)
    score = ((U - U.min(axis=0)) / np.where(span > 0, span, 1.0)).sum(axis=1)
    pick = np.sort(np.argsort(score, kind="stable")[:size])
    sample = U[pick]
    sample = sample[_nondominated_unique(sample)]
    if strict:
        return ~strictly_dominated_mask(U, sample)
    keep = np.ones(len(U), dtype=bool)
    for start in range(0, len(U), _CHUNK):
        C = U[start:start + _CHUNK]
        le = np.all(sample[None, :, :] <= C[:, None, :], axis=2)
        lt = np.any(sample[None, :, :] < C[:, None, :], axis=2)
        keep[start:start + len(C)] = ~np.any(le & lt, axis=1)
    return keep


def pareto_filter(points, subset: ObjectiveSubset) -> np.ndarray:
    """Indices of points not dominated by any other point under ``subset``.

    Points tied in objective space are all retained.
    """
    Y = _objective_matrix(points)
    if subset.k == 0 or len(Y) == 0:
        return np.zeros(0, dtype=int)
    Ys = Y[:, list(subset.indices)]
    U, inverse = _unique_rows(Ys)
    alive = np.flatnonzero(_sample_prefilter(U))
    keep = np.zeros(len(U), dtype=bool)
    keep[alive[_nondominated_unique(U[alive])]] = True
    return np.flatnonzero(keep[inverse])


def strictly_dominated_mask(Y: np.ndarray, by: np.ndarray) -> np.ndarray:
    """Rows of ``Y`` that some row of ``by`` beats strictly in every column."""
    out = np.zeros(len(Y), dtype=bool)
    if len(by) == 0:
        return out
    for start in range(0, len(Y), _CHUNK):
        C = Y[start:start + _CHUNK]
        out[start:start + len(C)] = np.any(np.all(by[None, :, :] < C[:, None, :], axis=2), axis=1)
    return out


def weak_pareto_filter(points, subset: ObjectiveSubset) -> np.ndarray:
    """Indices of points that no other point improves strictly in every objective of ``subset``."""
    Y = _objective_matrix(points)
    if subset.k == 0 or len(Y) == 0:
        return np.zeros(0, dtype=int)
    Ys = Y[:, list(subset.indices)]
    # a strict dominator can always be replaced by a Pareto point below it
    U, inverse = _unique_rows(Ys)
    front = Ys[pareto_filter(Y, subset)]
    alive = np.flatnonzero(_sample_prefilter(U, strict=True))
    keep = np.zeros(len(U), dtype=bool)
    keep[alive[~strictly_dominated_mask(U[alive], front)]] = True
    return np.flatnonzero(keep[inverse])


def dominates_with_tolerance(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Whether rows of ``a`` dominate ``b`` with slack: no worse than ``b + tol`` and better than ``b - tol`` somewhere.

    Broadcasts over leading axes.
    """
    return np.all(a <= b + tol, axis=-1) & np.any(a < b - tol, axis=-1)


@dataclass(frozen=True)
class GridSpec:
    """Regular lattice over a problem box, endpoints included."""

    counts: tuple[int, ...]
    budget: int = DEFAULT_GRID_BUDGET

    def __post_init__(self):
        if any(c < 1 for c in self.counts):
            raise ValueError("grid counts must be positive")

    @classmethod
    def uniform(cls, n: int, count: int, budget: int = DEFAULT_GRID_BUDGET) -> GridSpec:
        return cls((count,) * n, budget)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts, dtype=np.int64))

    def steps(self, problem: Problem) -> np.ndarray:
        c = np.array(self.counts, dtype=float)
        return np.where(c > 1, (problem.upper - problem.lower) / np.maximum(c - 1, 1), 0.0)

    def points(self, problem: Problem) -> np.ndarray:
        if len(self.counts) != problem.n:
            raise ValueError(f"grid has {len(self.counts)} axes, problem has {problem.n} variables")
        if self.size > self.budget:
            raise ValueError(f"lattice of {self.size} points exceeds budget {self.budget}")
        axes = [np.linspace(lo, hi, c) if c > 1 else np.array([0.5 * (lo + hi)])
                for lo, hi, c in zip(problem.lower, problem.upper, self.counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.reshape(-1) for g in mesh], axis=1)


def _lattice(problem: Problem, spec: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    X = spec.points(problem)
    Y = problem.evaluate_batch(X)
    if not np.all(np.isfinite(Y)):
        raise ArithmeticError(f"non-finite objective values on the {problem.name} lattice")
    return X, Y


def _oracle_archives(problem: Problem, X: np.ndarray, Y: np.ndarray, subset: ObjectiveSubset):
    if subset.k == 0:
        return SolutionArchive.empty(subset, problem.n), SolutionArchive.empty(subset, problem.n)
    whole = SolutionArchive(subset, X, Y)
    pareto = whole.take(pareto_filter(Y, subset)).sorted()
    weak = whole.take(weak_pareto_filter(Y, subset)).sorted()
    return pareto, weak


def grid_oracle(problem: Problem, spec: GridSpec, subset: ObjectiveSubset) -> tuple[SolutionArchive, SolutionArchive]:
    """Exhaustively evaluate the lattice; return (Pareto archive, weak-Pareto archive).

    Both archives are sorted lexicographically by decision vector.
    """
    if subset.k == 0:
        return SolutionArchive.empty(subset, problem.n), SolutionArchive.empty(subset, problem.n)
    return _oracle_archives(problem, *_lattice(problem, spec), subset)


def grid_oracles(problem: Problem, spec: GridSpec, subsets) -> dict:
    """:func:`grid_oracle` for several subsets, evaluating the lattice once."""
    X, Y = _lattice(problem, spec)
    return {s: _oracle_archives(problem, X, Y, s) for s in subsets}


@dataclass
class InclusionReport:
    violators: np.ndarray
    dominators: np.ndarray
    n_checked: int

    @property
    def ok(self) -> bool:
        return len(self.violators) == 0


def inclusion_check(inner, outer, subset_outer: ObjectiveSubset, tol: float = 0.0) -> InclusionReport:
    """Check that every inner point is non-dominated among ``outer`` under ``subset_outer``.

    A point violates when some outer point dominates it with slack ``tol``
    (see :func:`dominates_with_tolerance`). ``violators`` are inner indices and
    ``dominators`` the outer index of a dominating witness for each.
    """
    A = _objective_matrix(inner)
    B = _objective_matrix(outer)
    if subset_outer.k == 0 or len(A) == 0 or len(B) == 0:
        return InclusionReport(np.zeros(0, dtype=int), np.zeros(0, dtype=int), len(A))
    idx = list(subset_outer.indices)
    As, Bs = A[:, idx], B[:, idx]
    violators, dominators = [], []
    for start in range(0, len(As), _CHUNK):
        C = As[start:start + _CHUNK]
        dom = dominates_with_tolerance(Bs[None, :, :], C[:, None, :], tol)
        hit = np.flatnonzero(dom.any(axis=1))
        violators.extend((start + hit).tolist())
        dominators.extend(np.argmax(dom[hit], axis=1).tolist())
    return InclusionReport(np.array(violators, dtype=int), np.array(dominators, dtype=int), len(A))
