"""Every acceptance criterion at its stated tolerance.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""

import pytest

from quenchlab.acceptance import CRITERIA, evaluate

RESULTS = []


@pytest.mark.acceptance
@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name):
    res = evaluate(name)
    RESULTS.append(res)
    print(res.line())
    assert res.passed, res.line()
