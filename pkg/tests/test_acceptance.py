"""The nine acceptance criteria at their stated time limits.

Each test prints one ``criterion N [PASS|FAIL] ...`` line, visible even under
pytest's output capture.  Run this file directly for the bare summary.
"""

import pytest

from gforge.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    res = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail
    assert res.within_time, f"took {res.elapsed:.1f}s, limit {res.limit:g}s"


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        print(CRITERIA[n]().line(), flush=True)
