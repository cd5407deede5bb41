"""The eighteen primary acceptance criteria at their stated tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line, collected again in the
terminal summary. Criteria known to fail at the required settings are
strict xfails: they still run in full, and an unexpected pass is an error.
"""

import pytest

from lqg_lab.acceptance import CRITERIA, run_criterion

from .conftest import ACCEPTANCE_LINES

SEED = 7

KNOWN_FAILURES = {
    8: "q = 2 lies beyond the finite-moment range q < 4/gamma^2 = 3/2, so the second "
       "moment of ball masses is dominated by rare cells and its log-log slope is not xi(2)",
}


def _param(cid):
    marks = [pytest.mark.acceptance]
    if cid in KNOWN_FAILURES:
        marks.append(pytest.mark.xfail(reason=KNOWN_FAILURES[cid], strict=True))
    return pytest.param(cid, marks=marks, id=f"criterion-{cid:02d}")


@pytest.mark.parametrize("cid", [_param(c) for c in sorted(CRITERIA)])
def test_criterion(cid):
    r = run_criterion(cid, SEED)
    line = r.line()
    if cid in KNOWN_FAILURES:
        line += "  (expected failure)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert r.passed, f"{line}\n{r.details}"
