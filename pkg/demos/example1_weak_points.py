"""A two-objective problem whose f1 stratum is a whole interval.

f1 is flat on [0, 1] while f2 = x. Every x in [0, 1] minimizes f1, so the
f1 stratum is not a point, and only x = 0 is Pareto optimal for both
objectives. The simplicity suite finds a weak-but-not-Pareto witness.

Run with ``python demos/example1_weak_points.py``.
"""

from simplicia import GridSpec, ObjectiveSubset, grid_oracle, run_simplicity_suite
from simplicia.suites import example1


def main():
    problem = example1()
    spec = GridSpec.uniform(1, 11)
    for subset in (ObjectiveSubset.from_indices([0], 2), ObjectiveSubset.full(2)):
        pareto, weak = grid_oracle(problem, spec, subset)
        print(f"{subset}: {len(pareto)} Pareto, {len(weak)} weakly Pareto grid points")
        print("  Pareto x:", [round(float(x[0]), 3) for x in pareto.X])

    report = run_simplicity_suite(problem)
    print()
    print(report.table())
    for entry in report.falsified("weak_nonpareto"):
        w = entry.witness
        print(f"\n{w['dominator']['x']} dominates {w['dominated']['x']}")


if __name__ == "__main__":
    main()
