import numpy as np
import pytest

from simplicia.problem import EvaluationError, ObjectiveSubset, Problem
from simplicia.scalarize import (SolverConfig, SweepFailure, SweepTrace, UtopianPoint, estimate_utopian,
                                 generate_face_weights, map_ordered, minimize_box, pareto_refine, solve_scalarized,
                                 support, tchebyshev_value, weight_sweep, with_seed)
from simplicia.suites import example1, fig1_problem, from_selector

CONFIG = SolverConfig()


def _sub(m, *idx):
    return ObjectiveSubset.from_indices(idx, m)


def test_solver_config_validation():
    for bad in ({"restarts": 0}, {"max_iters": 0}, {"x_tolerance": 0.0}, {"f_tolerance": -1.0},
                {"merge_tolerance": 0.0}):
        with pytest.raises(ValueError):
            SolverConfig(**bad)
    assert with_seed(CONFIG, 9).seed == 9 and CONFIG.seed == 0


@pytest.mark.parametrize("selector", ["med:n=3,m=3,p=1,1,1", "example1", "fig1"])
def test_utopian_is_zero_minus_margin(selector):
    p = from_selector(selector)
    z = estimate_utopian(p, CONFIG)
    assert np.all(z.margin >= 0)
    np.testing.assert_allclose(z.z + z.margin, 0.0, atol=1e-6)
    assert np.all(z.z < 0)


def test_utopian_rejects_non_finite_problem():
    p = Problem("nan", [[0.0, 1.0]], [lambda x: np.full(x.shape[:-1], np.nan)])
    with pytest.raises(EvaluationError):
        estimate_utopian(p, SolverConfig(restarts=2, max_iters=5))


def test_tchebyshev_examples():
    z = UtopianPoint(np.array([0.5, -1.0, 2.0]))
    y = np.array([3.0, 4.0, 5.0])
    assert tchebyshev_value(y, [0, 1, 0], z) == 5.0
    assert tchebyshev_value(z.z, [0.2, 0.3, 0.5], z) == 0.0
    shifted = UtopianPoint(z.z - 0.1)
    assert tchebyshev_value(z.z, [0.2, 0.3, 0.5], shifted) == pytest.approx(0.05)
    med_z = UtopianPoint(np.zeros(2))
    assert tchebyshev_value(np.full(2, np.sqrt(2) / 2), [0.5, 0.5], med_z) == pytest.approx(np.sqrt(2) / 4)


def test_tchebyshev_validation():
    z = UtopianPoint(np.zeros(2))
    with pytest.raises(ValueError):
        tchebyshev_value([1.0, 1.0], [0.0, 0.0], z)
    with pytest.raises(ValueError):
        tchebyshev_value([1.0, 1.0], [0.5, 0.5], z, subset=_sub(2, 0))


def test_face_weights():
    W = generate_face_weights(3, ObjectiveSubset.full(3), 2)
    assert len(W) == 6
    expected = {(1, 0, 0), (0, 1, 0), (0, 0, 1), (0.5, 0.5, 0), (0.5, 0, 0.5), (0, 0.5, 0.5)}
    assert {tuple(w) for w in W} == expected
    assert generate_face_weights(3, _sub(3, 1), 7).tolist() == [[0.0, 1.0, 0.0]]
    pair = generate_face_weights(2, ObjectiveSubset.full(2), 4)
    assert pair.tolist() == [[1, 0], [0.75, 0.25], [0.5, 0.5], [0.25, 0.75], [0, 1]]
    for w in generate_face_weights(4, _sub(4, 0, 2, 3), 5):
        assert abs(w.sum() - 1) <= 1e-12 and support(w).issubset(_sub(4, 0, 2, 3))
    with pytest.raises(ValueError):
        generate_face_weights(2, ObjectiveSubset(0, 2), 3)
    with pytest.raises(ValueError):
        generate_face_weights(2, ObjectiveSubset.full(2), 0)


def test_solve_med_vertex():
    p = from_selector("med:n=3,m=3,p=1,1,1")
    z = estimate_utopian(p, CONFIG)
    rec = solve_scalarized(p, [1, 0, 0], z, ObjectiveSubset.full(3), CONFIG)
    np.testing.assert_allclose(rec.x, [1, 0, 0], atol=1e-4)


def test_solve_example1():
    p = example1()
    z = estimate_utopian(p, CONFIG)
    full = ObjectiveSubset.full(2)
    assert solve_scalarized(p, [0, 1], z, full, CONFIG).x[0] == pytest.approx(0.0, abs=1e-9)
    a = solve_scalarized(p, [1, 0], z, full, CONFIG)
    b = solve_scalarized(p, [1, 0], z, full, CONFIG)
    assert a.y[0] == 0.0 and 0.0 <= a.x[0] <= 1.0
    assert a.x.tobytes() == b.x.tobytes()


def test_solve_rejects_weight_outside_subset():
    p = example1()
    with pytest.raises(ValueError):
        solve_scalarized(p, [0.5, 0.5], estimate_utopian(p, CONFIG), _sub(2, 0), CONFIG)
    with pytest.raises(ValueError):
        solve_scalarized(p, [0.5, 0.6], estimate_utopian(p, CONFIG), _sub(2, 0, 1), CONFIG)


def test_minimize_box_reaches_corner_and_sorts():
    p = Problem("corner", [[0.0, 1.0], [0.0, 1.0]], [lambda x: (x[..., 0] - 1) ** 2 + x[..., 1]])
    X, F = minimize_box(p.objectives[0], p, CONFIG)
    np.testing.assert_allclose(X[0], [1.0, 0.0], atol=1e-8)
    assert np.all(np.diff(F) >= 0)


def test_sweep_med_edge():
    p = from_selector("med:n=3,m=3,p=1,1,1")
    z = estimate_utopian(p, CONFIG)
    arch = weight_sweep(p, _sub(3, 0, 1), 10, z, CONFIG)
    assert 9 <= len(arch) <= 11
    np.testing.assert_allclose(arch.X[:, 2], 0.0, atol=1e-3)
    np.testing.assert_allclose(arch.X[:, :2].sum(axis=1), 1.0, atol=1e-3)
    ends = arch.X[[0, -1]]
    assert min(np.abs(ends - [1, 0, 0]).max(axis=1)) <= 1e-3
    assert min(np.abs(ends - [0, 1, 0]).max(axis=1)) <= 1e-3
    assert np.all(np.isfinite(arch.W)) and np.all(arch.W[:, 2] == 0)
    assert np.all(arch.Y >= z.z)


def test_sweep_single_objective():
    p = fig1_problem()
    z = estimate_utopian(p, CONFIG)
    arch = weight_sweep(p, _sub(3, 2), 10, z, CONFIG)
    assert len(arch) == 1
    np.testing.assert_allclose(arch.X[0], [-1, -1], atol=1e-6)


def test_zdt1_sweep_point_is_one_of_many_f1_minimizers():
    p = from_selector("zdt1:n=3")
    z = estimate_utopian(p, CONFIG)
    trace = SweepTrace(near_tol=1e-9)
    arch = weight_sweep(p, _sub(2, 0), 10, z, CONFIG, trace=trace)
    assert len(arch) == 1 and arch.Y[0, 0] == 0.0
    # other restarts ended at different x with the same f1
    assert trace.alternatives and len(trace.alternatives[0][1]) > 1


def test_sweep_records_failures():
    def f2(x):
        out = x[..., 0].copy()
        out[x[..., 0] > 0.5] = np.nan
        return out

    p = Problem("holes", [[0.0, 1.0]], [lambda x: 1 - x[..., 0], f2])
    z = UtopianPoint(np.array([-1e-6, -1e-6]))
    failures = []
    arch = weight_sweep(p, ObjectiveSubset.full(2), 4, z, SolverConfig(restarts=4), failures)
    assert all(isinstance(f, SweepFailure) for f in failures)
    assert np.all(np.isfinite(arch.Y))


def test_pareto_refine_leaves_weak_part():
    p = from_selector("zdt1:n=3")
    x = np.array([0.0, 0.5, 0.5])
    fx = p.evaluate_batch(x[None])[0]
    y = pareto_refine(p, ObjectiveSubset.full(2), x, CONFIG)
    fy = p.evaluate_batch(y[None])[0]
    assert np.all(fy <= fx) and np.any(fy < fx)


def test_map_ordered_keeps_order(monkeypatch):
    monkeypatch.setenv("SIMPLICIA_THREADS", "4")
    assert map_ordered(lambda v: v * v, range(50)) == [v * v for v in range(50)]
    monkeypatch.setenv("SIMPLICIA_THREADS", "1")
    assert map_ordered(str, [3, 1]) == ["3", "1"]


def test_sweep_independent_of_threads(monkeypatch):
    p = fig1_problem()
    z = estimate_utopian(p, CONFIG)
    out = []
    for threads in ("1", "3"):
        monkeypatch.setenv("SIMPLICIA_THREADS", threads)
        out.append(weight_sweep(p, _sub(3, 0, 1), 6, z, CONFIG))
    assert out[0].X.tobytes() == out[1].X.tobytes()
