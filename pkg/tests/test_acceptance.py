"""Acceptance criteria, one test each, with wall-clock limits.

Every test records a one-line verdict; the lines are printed in the pytest
terminal summary (see conftest.py) and by running this file directly.
"""

import sys
import time

import pytest

from toric_sections import verify

RESULTS: dict[int, str] = {}

# (number, description, check factory, runtime limit in seconds)
CRITERIA = [
    (1, "(2,3,7) return map is XY, trace 3", verify.check_figure_eight, 1),
    (2, "formula sweep over entries <= 12", verify.check_formula_sweep, 10),
    (3, "Euclidean limits are powers of X", verify.check_euclidean_limits, 1),
    (4, "conjugacy verdicts match solver witnesses", verify.check_conjugacy_oracle, 60),
    (5, "trace family X^(t-2)Y for 3 <= t <= 50", verify.check_trace_family, 1),
    (6, "group relation and angle residuals", verify.check_group_residuals, 5),
    (7, "billiard, h and b curves", verify.check_curves, 30),
    (8, "random traces follow the hit cycles", verify.check_tracer, 60),
    (9, "transport matrices and route products", verify.check_transport_matrices, 1),
    (10, "CW models have genus 1", verify.check_cw_models, 1),
]


def evaluate(number, description, fn, limit):
    t0 = time.perf_counter()
    check = fn()
    seconds = time.perf_counter() - t0
    ok = check.passed and seconds < limit
    tol = f", tol {check.tolerance:g}" if check.tolerance is not None else ""
    line = (f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {description} "
            f"({seconds:.2f} s of {limit} s{tol})")
    if check.detail and not check.passed:
        line += f" -- {check.detail}"
    RESULTS[number] = line
    return check, seconds, line


@pytest.mark.parametrize("number,description,fn,limit", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(number, description, fn, limit):
    check, seconds, line = evaluate(number, description, fn, limit)
    print(line)
    assert check.passed, check.measured
    assert seconds < limit


if __name__ == "__main__":
    failed = 0
    for crit in CRITERIA:
        _, _, line = evaluate(*crit)
        print(line, flush=True)
        failed += "FAIL" in line
    sys.exit(1 if failed else 0)
