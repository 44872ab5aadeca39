"""The fourteen acceptance criteria at full size.

Each test records a one-line verdict that the session summary prints as
``[PASS] criterion k: title`` or ``[FAIL] criterion k: title``.
"""
import pytest

from chordlab.acceptance import (CRITERIA, c05_thresholds_sharpness,
                                 c05_thresholds_sufficiency, verify_all)

VERDICTS: dict[int, str] = {}


def _describe(rep, limit=4):
    parts = [str(f) for f in rep.failures[:limit]]
    more = len(rep.failures) - limit
    return "; ".join(parts) + (f"; ... {more} more" if more > 0 else "")


@pytest.mark.slow
@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{c.number:02d}" for c in CRITERIA])
def test_criterion(crit):
    rep = crit.check("full")
    status = "PASS" if rep.ok else "FAIL"
    line = f"[{status}] criterion {crit.number:2d}: {crit.title}"
    VERDICTS[crit.number] = line
    print(line)
    assert rep.ok, _describe(rep)


def test_thresholds_sufficient():
    rep = c05_thresholds_sufficiency("full")
    assert rep.ok, _describe(rep)


def test_thresholds_sharp():
    rep = c05_thresholds_sharpness("full")
    assert rep.ok, _describe(rep)


def test_verify_all_quick_profile():
    rep = verify_all("quick")
    assert rep.ok, _describe(rep)
    assert set(rep.verdicts) == {str(c.number) for c in CRITERIA}
