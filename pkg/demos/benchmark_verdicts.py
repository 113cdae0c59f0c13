"""Run the simplicity suite over a few standard benchmarks.

MED is expected to survive every test. ZDT, DTLZ and WFG instances have
single-objective minimizers that ignore some variables, so the suite
should produce replayable witnesses against them.
"""

import sys
import time

from simplicia import from_selector, run_simplicity_suite
from simplicia.simplicity import replay_witness

SELECTORS = ["med:n=3,m=3,p=1,2,0.5", "zdt1:n=3", "dtlz2:n=7,m=3", "wfg4:k=1,l=4,m=2"]


def main(selectors):
    for sel in selectors or SELECTORS:
        problem = from_selector(sel)
        start = time.perf_counter()
        report = run_simplicity_suite(problem)
        seconds = time.perf_counter() - start
        falsified = report.falsified()
        replayed = sum(replay_witness(problem, e, 1e-6) for e in falsified)
        tests = sorted({e.test for e in falsified})
        print(f"{sel:<26} {report.verdict.value:<14} {seconds:6.1f}s  "
              f"witnesses {replayed}/{len(falsified)} replayed  {', '.join(tests)}")


if __name__ == "__main__":
    main(sys.argv[1:])
