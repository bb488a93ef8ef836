"""Shooting for one-dimensional graphical self-shrinkers.

For ``n = 1`` the shrinker equation reads ``u'' = (1 + u'^2)(x u' - u)/2``.
Only straight lines through the origin extend to entire graphs; every other
initial condition loses graphicality (``|u'| -> inf``) at finite ``x``.

The curve is integrated by arc length with tangent angle ``theta``
(``u_x = tan(theta)``), which stays regular when the slope blows up, so the
slope cap is located by event detection rather than by driving the step size
to zero.  The quantity ``z = x sin(theta) - u cos(theta)`` is carried as an
extra state::

    x' = cos(theta)    u' = sin(theta)
    theta' = z / 2     z' = (x cos(theta) + u sin(theta)) z / 2

Lines through the origin have ``z = 0``, and since the derivative of ``z`` is proportional
to ``z`` every Runge-Kutta stage keeps it exactly zero.  Integrating
``theta' = (x sin - u cos)/2`` directly instead amplifies round-off along a
line by roughly ``exp(s^2/4)``, which swamps the solution for ``s`` near 18.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "Classification",
    "IntegrationError",
    "ShootingProblem",
    "Trajectory",
    "ScanRow",
    "integrate",
    "scan",
    "symmetry_check",
    "write_trajectory_csv",
    "write_scan_csv",
]

LINE_TOL = 1e-7


class Classification(str, enum.Enum):
    LINE = "LINE"
    GRADIENT_BLOWUP = "GRADIENT_BLOWUP"
    HORIZON_REACHED = "HORIZON_REACHED"


class IntegrationError(RuntimeError):
    def __init__(self, message: str, last_state: tuple[float, float, float]):
        super().__init__(message)
        self.last_state = last_state


@dataclass(frozen=True)
class ShootingProblem:
    a: float
    b: float
    x_max: float = 8.0
    rtol: float = 1e-9
    atol: float = 1e-9
    slope_cap: float = 1e8

    def __post_init__(self):
        if not self.x_max > 0:
            raise ValueError("x_max must be positive")
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be positive")
        if not self.slope_cap > 1:
            raise ValueError("slope_cap must exceed 1")

    def tightened(self, factor: float = 10.0) -> "ShootingProblem":
        return ShootingProblem(self.a, self.b, self.x_max, self.rtol / factor, self.atol / factor, self.slope_cap)


@dataclass(frozen=True)
class Trajectory:
    """Samples ``(x, u, u')`` for the ``+x`` and ``-x`` branches, both starting at 0."""

    problem: ShootingProblem
    forward: np.ndarray = field(repr=False)
    backward: np.ndarray = field(repr=False)
    classification: Classification
    blowup_x: float | None = None
    line_deviation: float | None = None

    def samples(self) -> np.ndarray:
        """All samples ordered by increasing ``x`` (the origin once)."""
        return np.concatenate([self.backward[::-1], self.forward[1:]], axis=0)


def _rhs(s, y):
    x, u, th, z = y
    c, sn = math.cos(th), math.sin(th)
    return [c, sn, 0.5 * z, 0.5 * (x * c + u * sn) * z]


def _branch(problem: ShootingProblem, sign: float):
    """Integrate one direction; returns (samples, blowup_x or None)."""

    def horizon(s, y):
        return problem.x_max - abs(y[0])

    horizon.terminal = True
    horizon.direction = -1

    def slope(s, y):
        return problem.slope_cap * math.cos(y[2]) - abs(math.sin(y[2]))

    slope.terminal = True
    slope.direction = -1

    theta0 = math.atan(problem.b)
    # generous arc-length budget; |x| grows at rate cos(theta) until an event fires
    s_end = sign * 1e3 * (problem.x_max + 1.0)
    sol = solve_ivp(
        _rhs,
        (0.0, s_end),
        [0.0, problem.a, theta0, -problem.a * math.cos(theta0)],
        method="RK45",
        rtol=problem.rtol,
        atol=problem.atol,
        events=(horizon, slope),
    )
    if sol.status == -1:
        y = sol.y[:, -1]
        raise IntegrationError(sol.message, (float(y[0]), float(y[1]), float(math.tan(y[2]))))
    x, u, th, _ = sol.y
    samples = np.column_stack([x, u, np.tan(th)])
    blowup = None
    if sol.t_events[1].size:
        ye = sol.y_events[1][0]
        blowup = float(ye[0])
        samples = np.vstack([samples, [ye[0], ye[1], math.tan(ye[2])]])
    elif sol.t_events[0].size:
        ye = sol.y_events[0][0]
        samples = np.vstack([samples, [ye[0], ye[1], math.tan(ye[2])]])
    # event points coincide with the last step endpoint up to round-off
    keep = np.concatenate([[True], sign * np.diff(samples[:, 0]) > 0])
    return samples[keep], blowup


def integrate(problem: ShootingProblem) -> Trajectory:
    fwd, blow_f = _branch(problem, 1.0)
    bwd, blow_b = _branch(problem, -1.0)
    blowup_x = None
    if blow_f is not None or blow_b is not None:
        # nearest loss of graphicality to the origin
        cands = [x for x in (blow_f, blow_b) if x is not None]
        blowup_x = min(cands, key=abs)
        return Trajectory(problem, fwd, bwd, Classification.GRADIENT_BLOWUP, blowup_x=blowup_x)
    allx = np.concatenate([fwd, bwd])
    dev = float(np.max(np.abs(allx[:, 1] - problem.b * allx[:, 0])))
    cls = Classification.LINE if dev < LINE_TOL else Classification.HORIZON_REACHED
    return Trajectory(problem, fwd, bwd, cls, line_deviation=dev)


@dataclass(frozen=True)
class ScanRow:
    a: float
    b: float
    classification: str
    blowup_x: float | None
    deviation: float | None


def scan(a_values: Iterable[float], b_values: Iterable[float], x_max: float, **kwargs) -> list[ScanRow]:
    """Classify every ``(a, b)`` pair; per-cell failures are recorded as ``ERROR``."""
    rows = []
    b_values = list(b_values)
    for a in a_values:
        for b in b_values:
            try:
                tr = integrate(ShootingProblem(float(a), float(b), x_max, **kwargs))
            except (IntegrationError, ValueError):
                rows.append(ScanRow(float(a), float(b), "ERROR", None, None))
                continue
            rows.append(ScanRow(float(a), float(b), tr.classification.value, tr.blowup_x, tr.line_deviation))
    return rows


def symmetry_check(first: Trajectory, second: Trajectory, tol: float = 1e-9) -> bool:
    """True iff ``second`` is the reflection ``u -> -u`` of ``first``."""
    for p, q in ((first.forward, second.forward), (first.backward, second.backward)):
        if p.shape != q.shape:
            raise ValueError("trajectories have mismatched sample grids")
        if np.max(np.abs(p[:, 0] - q[:, 0])) > tol:
            raise ValueError("trajectories have mismatched sample grids")
        if np.max(np.abs(p[:, 1:] + q[:, 1:])) > tol:
            return False
    return True


def write_trajectory_csv(tr: Trajectory, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "u", "du"])
        for row in tr.samples():
            w.writerow([format(c, ".17g") for c in row])


def _fmt(v):
    return "" if v is None else format(v, ".17g")


def write_scan_csv(rows: list[ScanRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "class", "blowup_x", "deviation"])
        for r in rows:
            w.writerow([_fmt(r.a), _fmt(r.b), r.classification, _fmt(r.blowup_x), _fmt(r.deviation)])
