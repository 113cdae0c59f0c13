import numpy as np
import pytest

from simplicia.dominance import GridSpec, grid_oracle
from simplicia.problem import ObjectiveSubset, SolutionArchive
from simplicia.scalarize import SolverConfig, estimate_utopian, weight_sweep
from simplicia.simplicity import TestEntry as Entry
from simplicia.simplicity import (REPORT_HEADER, SimplicityReport, Status, SuiteConfig, Verdict,
                                  connectivity_check, injectivity_witness, projection_injectivity_witness,
                                  replay_witness, run_simplicity_suite, unused_variable_probe,
                                  weak_nonpareto_witness)
from simplicia.strata import mean_nn_spacing
from simplicia.suites import example1, from_selector

FULL2 = ObjectiveSubset.full(2)


def _sub(m, *idx):
    return ObjectiveSubset.from_indices(idx, m)


def test_weak_witness_example1():
    p = example1()
    w = weak_nonpareto_witness(p, grid_oracle(p, GridSpec.uniform(1, 11), FULL2))
    assert w is not None
    assert w["dominator"]["x"] == [0.0] and w["dominated"]["x"][0] > 0


def test_weak_witness_absent_for_med_41():
    p = from_selector("med:n=3,m=3,p=1,1,1")
    assert weak_nonpareto_witness(p, grid_oracle(p, GridSpec.uniform(3, 41), ObjectiveSubset.full(3))) is None


def test_weak_witness_single_point():
    p = example1()
    arch = SolutionArchive(FULL2, [[0.5]], [[0.0, 0.5]])
    assert weak_nonpareto_witness(p, (arch, arch)) is None


def test_injectivity_witness_dtlz2_last_objective():
    p = from_selector("dtlz2:n=5,m=3")
    last = _sub(3, 2)
    pareto, _ = grid_oracle(p, GridSpec((3, 5, 3, 3, 3)), last)
    w = injectivity_witness(pareto, last, 1e-2, 1e-12)
    a, b = (np.array(pt["x"]) for pt in w["points"])
    assert a[0] == b[0] and a[1] != b[1]


def test_injectivity_witness_absent_for_med_sweep():
    p = from_selector("med:n=3,m=3,p=2,1,0.5")
    config = SolverConfig()
    full = ObjectiveSubset.full(3)
    arch = weight_sweep(p, full, 8, estimate_utopian(p, config), config)
    assert injectivity_witness(arch, full, 1e-2, 1e-9) is None


def test_projection_witness_example1():
    p = example1()
    inner, _ = grid_oracle(p, GridSpec.uniform(1, 11), _sub(2, 0))
    assert projection_injectivity_witness(inner.Y, 1, 1e-12) is not None
    assert projection_injectivity_witness(inner.Y[:1], 1, 1e-12) is None


def test_projection_witness_absent_for_med_front():
    p = from_selector("med:n=3,m=3,p=1,1,1")
    config = SolverConfig()
    full = ObjectiveSubset.full(3)
    front = weight_sweep(p, full, 10, estimate_utopian(p, config), config)
    for i in range(3):
        assert projection_injectivity_witness(front.Y, i, 1e-9) is None


def test_unused_variable_probe():
    rng = np.random.default_rng(3)
    zdt1 = from_selector("zdt1:n=4")
    U = unused_variable_probe(zdt1, rng.random((8, 4)), 1e-3)
    assert U[0].tolist() == [False, True, True, True]
    med = from_selector("med:n=3,m=3,p=1,1,1")
    samples = med.lower + rng.random((8, 3)) * (med.upper - med.lower)
    assert not unused_variable_probe(med, samples, 1e-3).any()
    with pytest.raises(ValueError):
        unused_variable_probe(med, samples, 0.0)


def test_probe_reflects_at_bounds():
    p = from_selector("zdt1:n=3")
    U = unused_variable_probe(p, np.array([[1.0, 1.0, 0.0]]), 1e-3)
    assert U[0].tolist() == [False, True, True]


def test_connectivity():
    p = from_selector("med:n=3,m=3,p=1,1,1")
    config = SolverConfig()
    full = ObjectiveSubset.full(3)
    arch = weight_sweep(p, full, 8, estimate_utopian(p, config), config)
    assert connectivity_check(arch.Y, 3 * mean_nn_spacing(arch.Y)) == 1
    eps = 0.1
    cluster = np.random.default_rng(0).random((20, 2)) * eps
    assert connectivity_check(np.vstack([cluster, cluster + 10 * eps + 0.2]), eps) == 2
    assert connectivity_check([[1.0, 2.0]], eps) == 1
    with pytest.raises(ValueError):
        connectivity_check([[1.0]], 0.0)


def test_report_verdict_aggregation():
    s = _sub(2, 0)
    entry = lambda status: Entry("injectivity", s, status)  # noqa: E731
    assert SimplicityReport("x", [entry(Status.NOT_FALSIFIED)]).verdict is Verdict.NOT_FALSIFIED
    assert SimplicityReport("x", [entry(Status.INCONCLUSIVE)]).verdict is Verdict.INCONCLUSIVE
    mixed = [entry(Status.INCONCLUSIVE), entry(Status.NOT_FALSIFIED)]
    assert SimplicityReport("x", mixed).verdict is Verdict.NOT_FALSIFIED
    assert SimplicityReport("x", mixed + [entry(Status.FALSIFIED)]).verdict is Verdict.NON_SIMPLE
    assert "SIMPLE" not in {v.value for v in Verdict}
    assert "falsify" in REPORT_HEADER


@pytest.fixture(scope="module")
def zdt1_report():
    return run_simplicity_suite(from_selector("zdt1:n=3"), SuiteConfig())


def test_zdt1_suite(zdt1_report):
    assert zdt1_report.verdict is Verdict.NON_SIMPLE
    assert zdt1_report.falsified("unused_variable")
    assert zdt1_report.falsified("injectivity")
    table = zdt1_report.table()
    assert table.splitlines()[1] == REPORT_HEADER and "NON_SIMPLE" in table


def test_falsified_entries_replay(zdt1_report):
    p = from_selector("zdt1:n=3")
    for e in zdt1_report.falsified():
        assert e.witness is not None
        assert replay_witness(p, e, 1e-6)


def test_replay_rejects_tampered_witness(zdt1_report):
    p = from_selector("zdt1:n=3")
    e = zdt1_report.falsified("injectivity")[0]
    bad = dict(e.witness, points=[dict(pt, y=[v + 1 for v in pt["y"]]) for pt in e.witness["points"]])
    assert not replay_witness(p, Entry(e.test, e.subset, e.status, bad), 1e-6)
    assert not replay_witness(p, Entry(e.test, e.subset, e.status, None), 1e-6)


def test_med_suite_not_falsified():
    report = run_simplicity_suite(from_selector("med:n=3,m=3,p=1,2,0.5"), SuiteConfig())
    assert report.verdict is Verdict.NOT_FALSIFIED
    assert all(e.status is Status.NOT_FALSIFIED for e in report.entries)
    tests = {(e.test, e.subset) for e in report.entries}
    assert ("weak_nonpareto", ObjectiveSubset.full(3)) in tests
    assert ("connectivity", ObjectiveSubset.full(3)) in tests
    assert ("unused_variable", _sub(3, 2)) in tests


def test_example1_suite_finds_weak_witness():
    report = run_simplicity_suite(example1(), SuiteConfig())
    weak = report.falsified("weak_nonpareto")
    assert weak and weak[0].witness["dominator"]["x"] == [0.0]
    assert replay_witness(example1(), weak[0], 1e-9)
