import json
from pathlib import Path

import numpy as np
import pytest

from simplicia.dominance import GridSpec, grid_oracle
from simplicia.problem import ObjectiveSubset
from simplicia.simplicity import injectivity_witness, unused_variable_probe
from simplicia.suites import (MedConfig, SelectorError, WfgConfig, dtlz, dtlz89_witness, example1, fig1_problem,
                              from_selector, med, wfg, wfg_parameters, zdt)

REFERENCE = json.loads((Path(__file__).parent / "data" / "benchmark_reference.json").read_text())


@pytest.mark.parametrize("case", REFERENCE["cases"], ids=[c["selector"] for c in REFERENCE["cases"]])
def test_matches_frozen_reference_values(case):
    problem = from_selector(case["selector"])
    Y = problem.evaluate_batch(np.array(case["x"]))
    np.testing.assert_allclose(Y, np.array(case["f"]), rtol=1e-10, atol=1e-12)


def test_med_basics():
    p = med(MedConfig(2, 2, (1, 1)))
    np.testing.assert_allclose(p.evaluate_batch(np.array([[1.0, 0.0]]))[0], [0.0, np.sqrt(2)])
    q = med(MedConfig(2, 2, (2, 1)))
    assert q.objectives[0](np.array([[0.0, 1.0]]))[0] == pytest.approx(2.0)
    assert p.bounds.tolist() == [[-2.0, 2.0], [-2.0, 2.0]]


@pytest.mark.parametrize("config", [
    MedConfig(2, 3),
    MedConfig(3, 2, (1.0, -1.0)),
    MedConfig(3, 2, (1.0, 0.0)),
    MedConfig(3, 3, None, ((0, 0, 0), (1, 1, 1), (2, 2, 2))),
    MedConfig(2, 2, (1, 1, 1)),
])
def test_med_rejects_bad_configs(config):
    with pytest.raises(ValueError):
        med(config)


def test_med_custom_optima():
    p = med(MedConfig(2, 3, (1, 1, 1), ((0, 0), (1, 0), (0, 1))))
    assert p.evaluate_batch(np.array([[0.0, 0.0]]))[0].tolist() == [0.0, 1.0, 1.0]


def test_med_triangle_oracle_lies_on_hull():
    p = med(MedConfig(3, 3, (1, 1, 1)))
    pareto, _ = grid_oracle(p, GridSpec.uniform(3, 21), ObjectiveSubset.full(3))
    X = pareto.X
    step = 0.2
    # the hull is the simplex x >= 0, sum x = 1
    off_plane = np.abs(X.sum(axis=1) - 1) / np.sqrt(3)
    assert np.all(off_plane <= step)
    assert np.all(X >= -step)


def test_fig1_minimizers():
    p = fig1_problem()
    for i, vertex in enumerate([(0, 1), (1, 0), (-1, -1)]):
        assert p.objectives[i](np.array([vertex], dtype=float))[0] == 0.0
    assert p.objectives[1](np.array([[1.0, 0.0]]))[0] == 0.0


def test_fig1_front_is_connected_and_two_dimensional():
    from simplicia.simplicity import connectivity_check

    pareto, _ = grid_oracle(fig1_problem(), GridSpec.uniform(2, 81), ObjectiveSubset.full(3))
    assert connectivity_check(pareto.X, 2 * 4 / 80) == 1
    centered = pareto.X - pareto.X.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    assert s[1] / s[0] > 0.1


def test_example1():
    p = example1()
    assert p.evaluate_batch(np.array([[1.0]]))[0].tolist() == [0.0, 1.0]
    spec = GridSpec.uniform(1, 101)
    f1, _ = grid_oracle(p, spec, ObjectiveSubset.from_indices([0], 2))
    assert len(f1) == 101
    both, _ = grid_oracle(p, spec, ObjectiveSubset.full(2))
    assert both.X.tolist() == [[0.0]]


@pytest.mark.parametrize("ident", [1, 2, 3, 4, 6])
def test_zdt_f1_ignores_tail(ident):
    p = zdt(ident, 4)
    rng = np.random.default_rng(ident)
    samples = p.lower + rng.random((16, 4)) * (p.upper - p.lower)
    unused = unused_variable_probe(p, samples, 1e-3)
    assert unused[0].tolist() == [False, True, True, True]
    assert not unused[1].any()


def test_zdt_transcription_and_validation():
    assert zdt(1, 3).objectives[0](np.array([[0.25, 0.5, 0.5]]))[0] == 0.25
    assert zdt(4, 3).bounds.tolist() == [[0, 1], [-5, 5], [-5, 5]]
    with pytest.raises(ValueError):
        zdt(5, 3)
    with pytest.raises(ValueError):
        zdt(1, 1)


def test_zdt1_f1_oracle_not_a_point():
    p = zdt(1, 3)
    pareto, _ = grid_oracle(p, GridSpec.uniform(3, 11), ObjectiveSubset.from_indices([0], 2))
    assert len(pareto) > 2
    assert np.all(pareto.Y[:, 0] == 0.0)
    assert injectivity_witness(pareto, ObjectiveSubset.from_indices([0], 2), 1e-2, 1e-9) is not None


def test_dtlz2_transcription():
    p = dtlz(2, 2, 2)
    np.testing.assert_allclose(p.evaluate_batch(np.array([[0.5, 0.5]]))[0], [np.cos(np.pi / 4), np.sin(np.pi / 4)])


def test_dtlz7_f1_is_first_variable():
    p = dtlz(7, 7, 3)
    x = np.random.default_rng(0).random((5, 7))
    np.testing.assert_array_equal(p.objectives[0](x), x[:, 0])
    unused = unused_variable_probe(p, x, 1e-3)
    assert unused[0].tolist() == [False] + [True] * 6


def test_dtlz2_last_objective_ignores_second_position_variable():
    p = dtlz(2, 5, 3)
    last = ObjectiveSubset.from_indices([2], 3)
    pareto, _ = grid_oracle(p, GridSpec((3, 5, 3, 3, 3)), last)
    assert injectivity_witness(pareto, last, 1e-2, 1e-12) is not None


def test_dtlz_validation():
    with pytest.raises(ValueError):
        dtlz(8, 7, 3)
    with pytest.raises(ValueError):
        dtlz(2, 2, 3)


def test_dtlz89_witness_reads_leading_block():
    p = dtlz89_witness(6, 3)
    x = np.full((1, 6), 0.5)
    y = p.evaluate_batch(x)[0, 0]
    x[0, 2:] = 0.9
    assert p.evaluate_batch(x)[0, 0] == y


def test_wfg_domains_and_validation():
    p = wfg(WfgConfig(4, 2, 4, 3))
    assert p.upper.tolist() == [2.0, 4.0, 6.0, 8.0, 10.0, 12.0]
    for bad in [WfgConfig(2, 1, 4, 2), WfgConfig(1, 3, 4, 3), WfgConfig(3, 1, 3, 2), WfgConfig(1, 1, 4, 1)]:
        with pytest.raises(ValueError):
            wfg(bad)


def test_wfg_distance_parameter_vanishes_on_optimal_slice():
    for ident in (3, 4):
        cfg = WfgConfig(ident, 1, 4, 2)
        x = 2 * np.arange(1, 6) * 0.35
        x[0] = 0.6
        assert wfg_parameters(cfg, x)[-1] <= 1e-12
    # WFG1's polynomial bias amplifies float residues; the slice is still the minimum
    cfg = WfgConfig(1, 1, 4, 2)
    x = 2 * np.arange(1, 6) * 0.35
    rng = np.random.default_rng(1)
    others = x * (1 + 0.2 * rng.standard_normal((50, 5)))
    others[:, 0] = x[0]
    others = np.clip(others, 0, 2 * np.arange(1, 6))
    assert wfg_parameters(cfg, x)[-1] < min(wfg_parameters(cfg, o)[-1] for o in others)


def test_wfg4_f2_optimum_not_a_point():
    from simplicia.scalarize import SolverConfig, estimate_utopian, weight_sweep

    p = wfg(WfgConfig(4, 1, 4, 2))
    config = SolverConfig()
    sub = ObjectiveSubset.from_indices([1], 2)
    arch = weight_sweep(p, sub, 10, estimate_utopian(p, config), config)
    assert len(arch) == 1
    # the sweep keeps one representative; a scan of the position variable finds others of equal value
    xs = np.repeat(arch.X, 41, axis=0)
    xs[:, 0] = np.linspace(0, 2, 41)
    f2 = p.objectives[1](xs)
    assert np.sum(np.abs(f2 - arch.Y[0, 1]) <= 1e-9) >= 2


@pytest.mark.parametrize("selector, name", [
    ("med:n=3,m=3,p=1,1,1", "med:n=3,m=3,p=1,1,1"),
    ("zdt1:n=3", "zdt1:n=3"),
    ("dtlz2:n=7,m=3", "dtlz2:n=7,m=3"),
    ("wfg4:k=1,l=4,m=2", "wfg4:k=1,l=4,m=2"),
    ("fig1", "fig1"),
    ("example1", "example1"),
    ("DTLZ2", "dtlz2:n=7,m=3"),
    ("med:n=4,m=3,p=2,1,0.5", "med:n=4,m=3,p=2,1,0.5"),
])
def test_selector_grammar(selector, name):
    assert from_selector(selector).name == name


@pytest.mark.parametrize("selector", ["nope", "med", "med:n=x", "med:n=2,m=3", "zdt9:n=3", "med:=3", "med:3",
                                      "wfg2:k=1,l=4,m=2"])
def test_selector_errors(selector):
    with pytest.raises(SelectorError):
        from_selector(selector)
