"""Stratify a three-objective MED problem and check the gluing.

The Pareto set of MED with equal exponents is the triangle spanned by the
three single-objective minimizers. Its strata are three vertices, three
edges and the face, and the sampled strata should glue cleanly.
"""

import argparse

from simplicia import SolverConfig, build_stratification, from_selector
from simplicia.strata import interior_distances


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--selector", default="med:n=3,m=3,p=1,1,1")
    parser.add_argument("--density", type=int, default=10)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args(argv)

    strat = build_stratification(from_selector(args.selector), args.density, config=SolverConfig(seed=args.seed))
    for s in strat.ordered():
        n_bnd = sum(lab.value == "boundary" for lab in s.labels)
        print(f"{str(s.subset):<10} {len(s.points):>4} points, {n_bnd:>3} on the boundary")

    diag = strat.diagnostics
    print(f"\ninclusion violations: {len(diag.inclusion_violations)}")
    print(f"overlapping interiors: {len(diag.interior_overlap_pairs)}")
    print(f"boundary coverage ok:  {diag.coverage_ok}")
    closest = min(interior_distances(strat), key=lambda d: d.objective, default=None)
    if closest is not None:
        print(f"closest interiors: {closest.first} / {closest.second} at {closest.objective:.3g}")


if __name__ == "__main__":
    main()
