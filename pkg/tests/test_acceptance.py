"""Acceptance criteria 1-11, each at its stated tolerance.

Every criterion prints one ``PASS``/``FAIL`` line (visible even under pytest's
output capture) before asserting.  Run directly with ``python
tests/test_acceptance.py`` for the summary alone.
"""

import sys

import pytest

from shrinklab.acceptance import CRITERIA

TITLES = {
    1: "shrinker identity on the sphere cap",
    2: "sphere cap curvature values",
    3: "operator identities and the log-density residual",
    4: "1D rigidity scan",
    5: "weighted stability inequality on 20 bumps",
    6: "cutoff energy decay",
    7: "volume and height growth, with teeth",
    8: "rescaled flow with barriers",
    9: "self-similar exactness and flow residual",
    10: "Newton cross-validation",
    11: "flatness certificate",
}


def _line(k, checks):
    ok = all(c.passed for c in checks)
    failed = [c.name for c in checks if not c.passed]
    tail = f" (failed: {', '.join(failed)})" if failed else ""
    return ok, f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {TITLES[k]}{tail}"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    checks = CRITERIA[k]()
    ok, line = _line(k, checks)
    with capsys.disabled():
        print("\n" + line)
    assert checks, "criterion produced no checks"
    assert ok, "\n".join(f"{c.name}: margin {c.margin:.3g} {c.detail}" for c in checks if not c.passed)


if __name__ == "__main__":
    results = [_line(k, CRITERIA[k]()) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
