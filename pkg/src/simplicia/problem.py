"""Multi-objective problems on boxes, objective subsets and solution archives."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

# An objective maps an array of shape (..., n) to an array of shape (...).
Objective = Callable[[np.ndarray], np.ndarray]


class DomainError(ValueError):
    """Raised when a decision vector lies outside the problem box."""


class EvaluationError(ArithmeticError):
    """Raised when an objective returns a non-finite value."""


@dataclass(frozen=True)
class Problem:
    """A finite, ordered set of objectives minimized over an axis-aligned box.

    Objectives must be vectorized over leading axes: given ``x`` of shape
    ``(..., n)`` they return an array of shape ``(...)``. A problem with no
    objectives is the 0-objective problem.
    """

    name: str
    bounds: np.ndarray
    objectives: tuple[Objective, ...] = field(default=())

    def __post_init__(self):
        bounds = np.array(self.bounds, dtype=float)
        if bounds.ndim != 2 or bounds.shape[1] != 2 or bounds.shape[0] == 0:
            raise ValueError("bounds must have shape (n, 2) with n >= 1")
        if np.any(bounds[:, 0] > bounds[:, 1]):
            raise ValueError("every lower bound must not exceed its upper bound")
        bounds.setflags(write=False)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "objectives", tuple(self.objectives))

    @property
    def n(self) -> int:
        return self.bounds.shape[0]

    @property
    def m(self) -> int:
        return len(self.objectives)

    @property
    def lower(self) -> np.ndarray:
        return self.bounds[:, 0]

    @property
    def upper(self) -> np.ndarray:
        return self.bounds[:, 1]

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        """Evaluate all objectives on the rows of ``X``; returns shape (N, m).

        No bounds or finiteness checks; callers are trusted to stay in the box.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.m == 0:
            return np.zeros((X.shape[0], 0))
        cols = [np.broadcast_to(np.asarray(f(X), dtype=float), X.shape[:1]) for f in self.objectives]
        return np.stack(cols, axis=-1)

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass(frozen=True)
class EvaluationRecord:
    x: np.ndarray
    y: np.ndarray


def evaluate(problem: Problem, x) -> EvaluationRecord:
    """Evaluate every objective of ``problem`` at ``x``.

    Raises:
        DomainError: if ``x`` is outside the box; names the first bad coordinate.
        EvaluationError: if any objective value is not finite.
    """
    x = np.array(x, dtype=float).reshape(-1)
    if x.shape[0] != problem.n:
        raise DomainError(f"expected {problem.n} coordinates, got {x.shape[0]}")
    for j, (v, lo, hi) in enumerate(zip(x, problem.lower, problem.upper)):
        if not lo <= v <= hi:
            raise DomainError(f"coordinate x[{j}] = {v!r} outside [{lo!r}, {hi!r}]")
    y = problem.evaluate_batch(x[None, :])[0]
    if not np.all(np.isfinite(y)):
        bad = int(np.flatnonzero(~np.isfinite(y))[0])
        raise EvaluationError(f"objective {bad} of {problem.name} is not finite at x = {x.tolist()}")
    x.setflags(write=False)
    y.setflags(write=False)
    return EvaluationRecord(x=x, y=y)


@dataclass(frozen=True, order=True)
class ObjectiveSubset:
    """Bit mask over the objectives ``0..m-1`` of a parent problem."""

    mask: int
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.mask < 0 or self.mask >> self.m:
            raise ValueError(f"mask {self.mask:#b} has bits outside 0..{self.m - 1}")

    @classmethod
    def from_indices(cls, indices: Iterable[int], m: int) -> ObjectiveSubset:
        mask = 0
        for i in indices:
            if not 0 <= i < m:
                raise ValueError(f"objective index {i} outside 0..{m - 1}")
            mask |= 1 << i
        return cls(mask, m)

    @classmethod
    def full(cls, m: int) -> ObjectiveSubset:
        return cls((1 << m) - 1, m)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.m) if self.mask >> i & 1)

    @property
    def k(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __len__(self) -> int:
        return self.k

    def issubset(self, other: ObjectiveSubset) -> bool:
        return self.mask & ~other.mask == 0

    def proper_subsets(self) -> list[ObjectiveSubset]:
        """Nonempty proper subsets, in canonical order."""
        return [s for s in enumerate_subproblems(self.m) if s.k > 0 and s.mask != self.mask and s.issubset(self)]

    def label(self) -> str:
        return "+".join(str(i) for i in self.indices) or "-"

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.indices) + "}"


def enumerate_subproblems(m: int) -> list[ObjectiveSubset]:
    """All 2**m subsets, ordered by cardinality and then by mask value."""
    if m < 0:
        raise ValueError("m must be non-negative")
    masks = sorted(range(1 << m), key=lambda s: (bin(s).count("1"), s))
    return [ObjectiveSubset(s, m) for s in masks]


def restrict(record, subset: ObjectiveSubset) -> np.ndarray:
    """Select the objective components in ``subset`` (ascending index order).

    ``record`` may be an :class:`EvaluationRecord`, a single objective vector
    or a matrix of objective vectors (rows).
    """
    y = np.asarray(record.y if isinstance(record, EvaluationRecord) else record, dtype=float)
    if y.shape[-1] != subset.m:
        raise ValueError(f"subset over {subset.m} objectives applied to vector of length {y.shape[-1]}")
    return y[..., list(subset.indices)]


@dataclass
class SolutionArchive:
    """Decision vectors, objective vectors and generating weights of one subproblem.

    ``W`` holds NaN rows for points that did not come from a scalarized solve
    (e.g. grid-oracle points).
    """

    subset: ObjectiveSubset
    X: np.ndarray
    Y: np.ndarray
    W: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim != 2:
            self.X = self.X.reshape(len(self.X), -1)
        self.Y = np.asarray(self.Y, dtype=float).reshape(len(self.X), self.subset.m)
        if self.W is None:
            self.W = np.full((len(self.X), self.subset.m), np.nan)
        else:
            self.W = np.asarray(self.W, dtype=float).reshape(len(self.X), self.subset.m)
        if not len(self.X) == len(self.Y) == len(self.W):
            raise ValueError("X, Y and W must have the same number of rows")

    def __len__(self) -> int:
        return len(self.X)

    @classmethod
    def empty(cls, subset: ObjectiveSubset, n: int) -> SolutionArchive:
        return cls(subset, np.zeros((0, n)), np.zeros((0, subset.m)), np.zeros((0, subset.m)))

    def records(self) -> list[EvaluationRecord]:
        return [EvaluationRecord(x, y) for x, y in zip(self.X, self.Y)]

    def take(self, idx: Sequence[int] | np.ndarray) -> SolutionArchive:
        idx = np.asarray(idx, dtype=int)
        if len(self.X) == 0:
            return SolutionArchive(self.subset, self.X, self.Y, self.W)
        return SolutionArchive(self.subset, self.X[idx], self.Y[idx], self.W[idx])

    def sorted(self) -> SolutionArchive:
        """Canonical order: lexicographic in the decision vector."""
        if len(self) == 0:
            return self
        order = np.lexsort(self.X.T[::-1])
        return self.take(order)
