"""Stratifications of Pareto sets and fronts, and numerical checks of their gluing."""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .dominance import inclusion_check
from .problem import ObjectiveSubset, Problem, SolutionArchive, enumerate_subproblems
from .scalarize import SolverConfig, SweepFailure, UtopianPoint, estimate_utopian, weight_sweep

log = logging.getLogger(__name__)

DEFAULT_K_NEIGHBORS = 8
DEFAULT_GAP = 0.75
DEFAULT_SCALES = 3


class Label(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"


@dataclass
class Stratum:
    subset: ObjectiveSubset
    points: SolutionArchive
    labels: list[Label] = field(default_factory=list)
    failures: list[SweepFailure] = field(default_factory=list)

    @property
    def expected_dimension(self) -> int:
        return self.subset.k - 1

    def label_mask(self, label: Label) -> np.ndarray:
        return np.array([lab is label for lab in self.labels], dtype=bool)


def hausdorff_distance(A, B) -> tuple[float, float]:
    """Directed distances ``(max_a min_b |a-b|, max_b min_a |a-b|)``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.size == 0 or B.size == 0 or len(A) == 0 or len(B) == 0:
        raise ValueError("Hausdorff distance needs two nonempty point sets")
    ab = cKDTree(B).query(A)[0]
    ba = cKDTree(A).query(B)[0]
    return float(ab.max()), float(ba.max())


def mean_nn_spacing(P) -> float:
    """Mean distance from each point to its nearest distinct neighbour."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if len(P) < 2:
        return 0.0
    D = cdist(P, P)
    D[D == 0] = np.inf
    nn = D.min(axis=1)
    nn = nn[np.isfinite(nn)]
    return float(nn.mean()) if nn.size else 0.0


def project_front(Y: np.ndarray, subset: ObjectiveSubset) -> np.ndarray:
    """Objective coordinates of ``subset`` with its largest index dropped."""
    idx = list(subset.indices)[:-1]
    return np.asarray(Y, dtype=float)[:, idx]


def _sphere_directions(d: int, count: int = 4096) -> np.ndarray:
    u = np.random.default_rng(12345).standard_normal((count, d))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _is_boundary(V: np.ndarray, gap: float) -> bool:
    """Whether unit directions ``V`` leave an angular gap wider than ``gap * pi``."""
    d = V.shape[1]
    if d == 1:
        return bool(np.all(V[:, 0] > 0) or np.all(V[:, 0] < 0))
    if d == 2:
        ang = np.sort(np.arctan2(V[:, 1], V[:, 0]))
        gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * np.pi]))
        return bool(gaps.max() > gap * np.pi)
    # all directions inside a cone of half-angle (1 - gap/2) * pi around some u
    U = np.vstack([_sphere_directions(d), V.mean(axis=0, keepdims=True)])
    U = U / np.maximum(np.linalg.norm(U, axis=1, keepdims=True), 1e-300)
    score = np.min(U @ V.T, axis=1).max()
    return bool(score >= -np.cos(0.5 * gap * np.pi))


def classify_points(P: np.ndarray, k_neighbors: int = DEFAULT_K_NEIGHBORS, gap: float = DEFAULT_GAP,
                    scales: int = DEFAULT_SCALES) -> list[Label]:
    """Label points of a sampled manifold as INTERIOR or BOUNDARY.

    A point is BOUNDARY when the directions to its nearest distinct
    neighbours leave an angular gap wider than ``gap * pi`` at every
    neighbourhood size ``k_neighbors * 2**j``, ``j < scales`` (capped at the
    number of other points). Ties at the cut-off distance are always
    included, which keeps the labels independent of point order.
    Coordinates are used as given, so ``P`` should already be a chart.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if P.shape[1] == 0:
        return [Label.INTERIOR] * len(P)
    if len(P) <= k_neighbors:
        raise ValueError(f"need more than {k_neighbors} points, got {len(P)}")
    D = cdist(P, P)
    sizes = sorted({min(k_neighbors << j, len(P) - 1) for j in range(max(scales, 1))})
    labels = []
    for i in range(len(P)):
        d = D[i].copy()
        d[i] = np.inf
        pos = np.sort(d[d > 0])
        if pos.size == 0:
            labels.append(Label.INTERIOR)
            continue
        boundary = True
        for k in sizes:
            kth = pos[min(k, pos.size) - 1]
            nb = np.flatnonzero((d > 0) & (d <= kth * (1 + 1e-9)))
            if not _is_boundary((P[nb] - P[i]) / d[nb, None], gap):
                boundary = False
                break
        labels.append(Label.BOUNDARY if boundary else Label.INTERIOR)
    return labels


def classify_boundary(stratum: Stratum, k_neighbors: int = DEFAULT_K_NEIGHBORS,
                      gap: float = DEFAULT_GAP) -> list[Label]:
    """Interior/boundary labels of a stratum, computed on its projected front.

    The front image of the subset is projected by dropping its largest
    objective index, which is a chart on the interior of a well-behaved
    front. 0-dimensional strata are all INTERIOR.
    """
    if stratum.expected_dimension <= 0:
        return [Label.INTERIOR] * len(stratum.points)
    return classify_points(project_front(stratum.points.Y, stratum.subset), k_neighbors, gap)


def _label_small(stratum: Stratum, k_neighbors: int, gap: float) -> list[Label]:
    n = len(stratum.points)
    if stratum.expected_dimension <= 0 or n == 0:
        return [Label.INTERIOR] * n
    if n == 1:
        return [Label.BOUNDARY]
    return classify_boundary(stratum, min(k_neighbors, n - 1), gap)


# ---------------------------------------------------------------- reports

@dataclass
class InclusionViolation:
    subset: ObjectiveSubset
    x: np.ndarray
    y: np.ndarray
    dominator_subset: ObjectiveSubset
    dominator_x: np.ndarray
    dominator_y: np.ndarray


@dataclass
class InteriorDistance:
    first: ObjectiveSubset
    second: ObjectiveSubset
    objective: float
    decision: float


@dataclass
class Coverage:
    subset: ObjectiveSubset
    objective: tuple[float, float]
    decision: tuple[float, float]
    spacing_objective: float
    spacing_decision: float
    budget: float = 2.0

    @property
    def ok(self) -> bool:
        return (max(self.objective) <= self.budget * self.spacing_objective
                and max(self.decision) <= self.budget * self.spacing_decision)


@dataclass
class GluingReport:
    inclusion_violations: list[InclusionViolation] = field(default_factory=list)
    interior_distances: list[InteriorDistance] = field(default_factory=list)
    interior_overlap_pairs: list[InteriorDistance] = field(default_factory=list)
    boundary_coverage: list[Coverage] = field(default_factory=list)
    inconclusive: list[str] = field(default_factory=list)

    @property
    def inclusion_ok(self) -> bool:
        return not self.inclusion_violations

    @property
    def disjoint_ok(self) -> bool:
        return not self.interior_overlap_pairs

    @property
    def coverage_ok(self) -> bool:
        return all(c.ok for c in self.boundary_coverage)

    @property
    def clean(self) -> bool:
        return self.inclusion_ok and self.disjoint_ok and self.coverage_ok


@dataclass
class Stratification:
    problem_name: str
    m: int
    strata: dict[ObjectiveSubset, Stratum]
    utopian: UtopianPoint | None = None
    diagnostics: GluingReport = field(default_factory=GluingReport)

    def ordered(self) -> list[Stratum]:
        return [self.strata[s] for s in enumerate_subproblems(self.m) if s in self.strata]


# ---------------------------------------------------------------- checks

def check_inclusion(strat: Stratification, tol: float) -> list[InclusionViolation]:
    """Points of proper-subset strata that the union archive dominates (slack ``tol``) under all objectives."""
    full = ObjectiveSubset.full(strat.m)
    if full not in strat.strata:
        raise ValueError("the full-problem stratum is missing")
    strata = [s for s in strat.ordered() if len(s.points)]
    if not strata:
        return []
    union_Y = np.vstack([s.points.Y for s in strata])
    owner = [(s, i) for s in strata for i in range(len(s.points))]
    out = []
    for s in strata:
        if s.subset == full:
            continue
        rep = inclusion_check(s.points.Y, union_Y, full, tol)
        for v, d in zip(rep.violators, rep.dominators):
            ds, di = owner[d]
            out.append(InclusionViolation(s.subset, s.points.X[v], s.points.Y[v],
                                          ds.subset, ds.points.X[di], ds.points.Y[di]))
    return out


def _interior_points(s: Stratum, r_interior: float, space: str) -> np.ndarray:
    P = s.points.Y if space == "objective" else s.points.X
    inner = s.label_mask(Label.INTERIOR)
    if r_interior > 0 and inner.any():
        bnd = s.label_mask(Label.BOUNDARY)
        if bnd.any():
            inner &= cKDTree(P[bnd]).query(P)[0] > r_interior
    return P[inner]


def interior_distances(strat: Stratification, r_interior: float = 0.0) -> list[InteriorDistance]:
    """Minimum distances between the interior-labelled points of every pair of distinct strata.

    Interior points closer than ``r_interior`` to their own stratum's
    boundary points are left out.
    """
    out = []
    strata = strat.ordered()
    for a, b in itertools.combinations(strata, 2):
        da = [_interior_points(a, r_interior, sp) for sp in ("objective", "decision")]
        db = [_interior_points(b, r_interior, sp) for sp in ("objective", "decision")]
        if len(da[0]) == 0 or len(db[0]) == 0:
            continue
        dist = [float(cKDTree(q).query(p)[0].min()) for p, q in zip(da, db)]
        out.append(InteriorDistance(a.subset, b.subset, dist[0], dist[1]))
    return out


def check_disjoint_interiors(strat: Stratification, r_interior: float = 0.0,
                             tol: float = 1e-7) -> list[InteriorDistance]:
    """Pairs of distinct strata whose interior points come within ``tol`` in objective space."""
    return [d for d in interior_distances(strat, r_interior) if d.objective < tol]


def check_boundary_coverage(strat: Stratification, budget: float = 2.0) -> list[Coverage]:
    """Directed Hausdorff distances between each stratum's boundary and its faces.

    For every stratum ``g`` of dimension >= 1: from its BOUNDARY points to the
    union of the strata ``h`` strictly inside ``g``, and back; in objective
    and in decision space, with the mean nearest-neighbour spacing of ``g``.
    """
    out = []
    for s in strat.ordered():
        if s.expected_dimension < 1 or len(s.points) == 0:
            continue
        faces = [strat.strata[h] for h in s.subset.proper_subsets() if h in strat.strata]
        faces = [f for f in faces if len(f.points)]
        bnd = s.label_mask(Label.BOUNDARY)
        if not faces or not bnd.any():
            continue
        res = {}
        for space in ("objective", "decision"):
            get = (lambda a: a.Y) if space == "objective" else (lambda a: a.X)
            B = get(s.points)[bnd]
            U = np.vstack([get(f.points) for f in faces])
            res[space] = (hausdorff_distance(B, U), mean_nn_spacing(get(s.points)))
        out.append(Coverage(s.subset, res["objective"][0], res["decision"][0],
                            res["objective"][1], res["decision"][1], budget))
    return out


def build_stratification(problem: Problem, density: int = 10, z: UtopianPoint | None = None,
                         config: SolverConfig | None = None, *, inclusion_tol: float | None = None,
                         disjoint_tol: float | None = None, coverage_budget: float = 2.0,
                         k_neighbors: int = DEFAULT_K_NEIGHBORS, gap: float = DEFAULT_GAP,
                         r_interior: float = 0.0) -> Stratification:
    """Sweep every nonempty subproblem and run the gluing checks.

    Default tolerances: inclusion ``10 * config.f_tolerance``; interior
    overlap ``10 * config.merge_tolerance`` times the largest spread of the
    computed front.
    """
    if problem.m < 1:
        raise ValueError("stratification needs at least one objective")
    config = config or SolverConfig()
    z = z if z is not None else estimate_utopian(problem, config)
    strata: dict[ObjectiveSubset, Stratum] = {}
    report = GluingReport()
    for subset in enumerate_subproblems(problem.m):
        if subset.k == 0:
            continue
        failures: list[SweepFailure] = []
        arch = weight_sweep(problem, subset, density, z, config, failures)
        st = Stratum(subset, arch, failures=failures)
        st.labels = _label_small(st, k_neighbors, gap)
        strata[subset] = st
        if len(arch) == 0:
            report.inconclusive.append(f"stratum {subset} is empty")
        elif failures:
            report.inconclusive.append(f"stratum {subset}: {len(failures)} failed weights")
    strat = Stratification(problem.name, problem.m, strata, z, report)
    allY = np.vstack([s.points.Y for s in strata.values() if len(s.points)] or [np.zeros((0, problem.m))])
    spread = float(np.ptp(allY, axis=0).max()) if len(allY) else 1.0
    spread = spread if spread > 0 else 1.0
    inclusion_tol = 10 * config.f_tolerance if inclusion_tol is None else inclusion_tol
    disjoint_tol = 10 * config.merge_tolerance * spread if disjoint_tol is None else disjoint_tol
    report.inclusion_violations = check_inclusion(strat, inclusion_tol)
    report.interior_distances = interior_distances(strat, r_interior)
    report.interior_overlap_pairs = [d for d in report.interior_distances if d.objective < disjoint_tol]
    report.boundary_coverage = check_boundary_coverage(strat, coverage_budget)
    return strat
