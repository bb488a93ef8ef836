import csv
import math

import numpy as np
import pytest

from shrinklab.shooting import (
    Classification,
    ShootingProblem,
    integrate,
    scan,
    symmetry_check,
    write_scan_csv,
    write_trajectory_csv,
)


@pytest.mark.parametrize("b", [0.5, 0.0, -2.0, 50.0])
def test_lines_are_exact(b):
    tr = integrate(ShootingProblem(0.0, b, 8.0))
    assert tr.classification is Classification.LINE
    assert tr.line_deviation < 1e-8


def test_line_covers_horizon():
    tr = integrate(ShootingProblem(0.0, 0.5, 8.0))
    xs = tr.samples()[:, 0]
    assert xs[0] == pytest.approx(-8.0) and xs[-1] == pytest.approx(8.0)
    assert np.all(np.diff(xs) > 0)


def test_blowup_stable_under_tightening():
    p = ShootingProblem(1.0, 0.0, 20.0)
    a, b = integrate(p), integrate(p.tightened())
    assert a.classification is Classification.GRADIENT_BLOWUP
    assert abs(a.blowup_x) < 20
    assert abs(a.blowup_x - b.blowup_x) / abs(b.blowup_x) < 0.01


def test_short_horizon_is_inconclusive():
    tr = integrate(ShootingProblem(0.1, 0.0, 1.0))
    assert tr.classification is Classification.HORIZON_REACHED


def test_samples_satisfy_ode():
    # u'' = (1 + u'^2)(x u' - u)/2 checked by differencing the dense output
    tr = integrate(ShootingProblem(0.3, 0.2, 1.5, rtol=1e-11, atol=1e-11))
    x, u, du = tr.forward.T
    ddu = np.gradient(du, x)
    rhs = (1 + du**2) * (x * du - u) / 2
    inner = slice(2, -2)
    assert np.max(np.abs(ddu[inner] - rhs[inner])) < 5e-2


def test_scan_table():
    rows = scan([0.0], [-2, -1, 0, 1, 2], 8.0)
    assert [r.classification for r in rows] == ["LINE"] * 5
    rows = scan([-1, -0.1, 0.1, 1], [0.0], 20.0)
    assert all(r.classification == "GRADIENT_BLOWUP" for r in rows)
    assert scan([], [], 8.0) == []


def test_scan_never_lines_off_axis():
    rows = scan([-0.5, 0.2, 1.0], [-1.0, 0.0, 1.5], 20.0)
    assert all(r.classification != "LINE" for r in rows)


def test_scan_records_errors():
    rows = scan([0.0], [0.0], -1.0)
    assert rows[0].classification == "ERROR"


def test_symmetry():
    assert symmetry_check(integrate(ShootingProblem(0, 1)), integrate(ShootingProblem(0, -1)))
    assert symmetry_check(integrate(ShootingProblem(1, 0, 20)), integrate(ShootingProblem(-1, 0, 20)))
    same = integrate(ShootingProblem(1, 0, 20))
    assert not symmetry_check(same, same)


def test_symmetry_mismatched_grids():
    with pytest.raises(ValueError):
        symmetry_check(integrate(ShootingProblem(0, 1, 8)), integrate(ShootingProblem(0, -1, 4)))


@pytest.mark.parametrize("kw", [{"x_max": 0}, {"rtol": 0}, {"slope_cap": 1}])
def test_problem_validation(kw):
    with pytest.raises(ValueError):
        ShootingProblem(0, 0, **kw)


def test_csv_layouts(tmp_path):
    tr = integrate(ShootingProblem(0.0, 1.0, 2.0))
    write_trajectory_csv(tr, tmp_path / "t.csv")
    with open(tmp_path / "t.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "u", "du"]
    assert all(math.isclose(float(r[1]), float(r[0]), abs_tol=1e-12) for r in rows[1:])
    write_scan_csv(scan([0.0, 1.0], [0.0], 20.0), tmp_path / "s.csv")
    with open(tmp_path / "s.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["a", "b", "class", "blowup_x", "deviation"]
    assert rows[1][2] == "LINE" and rows[1][3] == ""
    assert rows[2][2] == "GRADIENT_BLOWUP" and rows[2][4] == ""
