"""Rescaled graphical mean curvature flow with shrinking-ball barriers.

For a shrinker ``u`` and a scale ``R > 1`` the family
``w(x, t) = s u(x/s)`` with ``s = sqrt(R^2 + 1 - t)``, ``t in [0, R^2]``,
moves by mean curvature::

    w_t = sqrt(1 + |Dw|^2) div(Dw / sqrt(1 + |Dw|^2))
        = (delta_ij - w_i w_j / (1 + |Dw|^2)) w_ij

Spheres of squared radius ``rho^2 R^2 - 2 n t`` centred above and below the
graph are exact solutions too; the comparison principle keeps them disjoint
from the evolving graph, which bounds ``|u|`` linearly in ``R``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import _kernels
from .geometry import compute_geometry
from .grid import GridSpec, Profile, ScalarField, interior_mask, make_grid

__all__ = [
    "InstabilityError",
    "CFLError",
    "FlowConfig",
    "FlowState",
    "BarrierBall",
    "FlowLog",
    "SupBoundReport",
    "self_similar_profile",
    "eq4_residual",
    "step",
    "barrier_radius",
    "make_barriers",
    "clearance",
    "sup_bound_check",
    "run",
    "write_flowlog_csv",
]

# sup|w| may grow at most this much in one explicit step
GROWTH_LIMIT = 10.0


class InstabilityError(RuntimeError):
    def __init__(self, message: str, log: "FlowLog | None" = None):
        super().__init__(message)
        self.log = log


class CFLError(InstabilityError, ValueError):
    """Time step beyond the explicit stability limit ``h^2 / (2n)``."""


@dataclass(frozen=True)
class FlowConfig:
    spec: GridSpec
    R: float
    rho: float
    dt: float
    t_end: float
    check_cfl: bool = True

    def __post_init__(self):
        n = self.spec.dim
        if not self.R > 1:
            raise ValueError(f"R must exceed 1, got {self.R}")
        if not self.rho**2 > 2 * n + 1:
            raise ValueError(f"rho^2 must exceed 2n+1 = {2 * n + 1}, got rho = {self.rho}")
        if not self.spec.half_width > self.rho * self.R:
            raise ValueError("box half-width must exceed rho * R")
        if not 0 < self.t_end <= self.R**2:
            raise ValueError("t_end must lie in (0, R^2]")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_end > self.extinction_time:
            raise ValueError("t_end beyond barrier extinction time")
        if self.check_cfl and self.dt > self.dt_limit:
            raise CFLError(f"dt = {self.dt:.3e} exceeds the explicit limit h^2/(2n) = {self.dt_limit:.3e}")

    @classmethod
    def create(
        cls,
        dim: int,
        R: float,
        spacing: float,
        rho: float | None = None,
        box_factor: float = 2.5,
        dt: float | None = None,
        t_end: float | None = None,
        check_cfl: bool = True,
    ) -> "FlowConfig":
        """Box of half-width ``box_factor * rho * R`` rounded up to whole cells."""
        rho = 2.0 * math.sqrt(dim) if rho is None else float(rho)
        half = box_factor * rho * R
        cells = 2 * math.ceil(half / spacing - 1e-9)
        spec = make_grid(dim, cells * spacing / 2.0, cells + 1)
        h = spec.spacing
        return cls(
            spec=spec,
            R=float(R),
            rho=rho,
            dt=h * h / (4.0 * dim) if dt is None else float(dt),
            t_end=float(R) ** 2 if t_end is None else float(t_end),
            check_cfl=check_cfl,
        )

    @property
    def dt_limit(self) -> float:
        return self.spec.spacing**2 / (2.0 * self.spec.dim)

    @property
    def extinction_time(self) -> float:
        return self.rho**2 * self.R**2 / (2.0 * self.spec.dim)


@dataclass(frozen=True)
class FlowState:
    w: ScalarField
    t: float = 0.0
    step_index: int = 0


@dataclass(frozen=True)
class BarrierBall:
    sign: int  # +1 above the graph, -1 below
    center_height: float
    initial_radius: float


def _profile_values(u: Profile | ScalarField, pts: np.ndarray) -> np.ndarray:
    if isinstance(u, ScalarField):
        spec = u.spec
        if np.any(np.abs(pts) > spec.half_width + 1e-12):
            raise ValueError("evaluation point outside the field's box")
        interp = RegularGridInterpolator([spec.axis] * spec.dim, u.values, method="linear")
        flat = np.clip(pts.reshape(-1, spec.dim), -spec.half_width, spec.half_width)
        return interp(flat).reshape(pts.shape[:-1])
    return u(pts)


def self_similar_profile(u: Profile | ScalarField, R: float, t: float, spec: GridSpec) -> ScalarField:
    """``w(x, t) = s u(x / s)`` with ``s = sqrt(R^2 + 1 - t)``."""
    if not 0.0 <= t <= R * R:
        raise ValueError(f"t = {t} outside [0, R^2]")
    s = math.sqrt(R * R + 1.0 - t)
    return ScalarField(spec, s * _profile_values(u, spec.points() / s))


def eq4_residual(u: Profile | ScalarField, R: float, t: float, spec: GridSpec) -> ScalarField:
    """``w_t - sqrt(1+|Dw|^2) div(Dw/sqrt(1+|Dw|^2))`` for the self-similar family.

    The time derivative is a centered difference of the exact profile with
    step ``h^2``, so the residual measures the spatial discretization only.
    """
    delta = spec.spacing**2
    if t - delta < 0 or t + delta > R * R:
        raise ValueError("t too close to the ends of [0, R^2] for a centered difference")
    w_plus = self_similar_profile(u, R, t + delta, spec).values
    w_minus = self_similar_profile(u, R, t - delta, spec).values
    w_t = (w_plus - w_minus) / (2.0 * delta)
    geom = compute_geometry(self_similar_profile(u, R, t, spec))
    # v * div(Dw / v) = -v H
    return ScalarField(spec, w_t + geom.v * geom.H)


def step(state: FlowState, config: FlowConfig, dt: float | None = None) -> FlowState:
    """One forward-Euler step; boundary nodes keep their values."""
    dt = config.dt if dt is None else dt
    w = state.w.values
    new = w + dt * _kernels.mcf_rhs(w, config.spec.spacing)
    before = float(np.max(np.abs(w)))
    after = float(np.max(np.abs(new))) if np.all(np.isfinite(new)) else math.inf
    if after > GROWTH_LIMIT * max(before, 1e-300):
        raise InstabilityError(f"sup|w| grew from {before:.3e} to {after:.3e} at step {state.step_index + 1}")
    return FlowState(ScalarField(state.w.spec, new), state.t + dt, state.step_index + 1)


def barrier_radius(rho: float, R: float, t: float, n: int) -> float:
    """Radius ``sqrt(rho^2 R^2 - 2 n t)`` of the shrinking barrier sphere."""
    sq = rho * rho * R * R - 2.0 * n * t
    if t < 0 or sq < -1e-12 * rho * rho * R * R:
        raise ValueError(f"t = {t} outside the barrier lifetime [0, {rho * rho * R * R / (2 * n)}]")
    return math.sqrt(max(sq, 0.0))


def make_barriers(w0: ScalarField, config: FlowConfig) -> tuple[BarrierBall, BarrierBall]:
    r0 = config.rho * config.R
    inside = w0.spec.radius_sq() < r0 * r0
    vals = w0.values[inside]
    upper = BarrierBall(+1, float(vals.max()) + r0 + 1.0, r0)
    lower = BarrierBall(-1, float(vals.min()) - r0 - 1.0, r0)
    return upper, lower


def clearance(state: FlowState, barrier: BarrierBall, config: FlowConfig) -> float:
    """Min over nodes of the distance to the barrier centre minus its radius."""
    r = barrier_radius(config.rho, config.R, state.t, config.spec.dim)
    d2 = state.w.spec.radius_sq() + (state.w.values - barrier.center_height) ** 2
    return float(np.sqrt(d2.min()) - r)


@dataclass
class FlowLog:
    rows: list[tuple] = field(default_factory=list)
    final: FlowState | None = None
    barriers: tuple[BarrierBall, BarrierBall] | None = None

    COLUMNS = ("step", "t", "sup_w", "max_grad", "max_A2", "clear_plus", "clear_minus")

    @property
    def min_clearance(self) -> float:
        return min(min(r[5], r[6]) for r in self.rows)

    @property
    def clearance_ok(self) -> bool:
        return self.min_clearance > 0

    def column(self, name: str) -> np.ndarray:
        return np.array([r[self.COLUMNS.index(name)] for r in self.rows])


def _diagnostics(state: FlowState, barriers, config: FlowConfig) -> tuple:
    geom = compute_geometry(state.w)
    mask = interior_mask(config.spec, 1)
    grad = np.sqrt(np.sum(geom.grad**2, axis=-1))
    return (
        state.step_index,
        state.t,
        float(np.max(np.abs(state.w.values))),
        float(grad[mask].max()),
        float(geom.a_norm_sq[mask].max()),
        clearance(state, barriers[0], config),
        clearance(state, barriers[1], config),
    )


def run(config: FlowConfig, w0: ScalarField | Profile, log_every: int = 1) -> FlowLog:
    """Step from ``t = 0`` to ``t_end``, logging diagnostics and barrier clearances."""
    if isinstance(w0, Profile):
        from .grid import discretize

        w0 = discretize(w0, config.spec)
    if w0.spec != config.spec:
        raise ValueError("initial field must live on the configured grid")
    barriers = make_barriers(w0, config)
    log = FlowLog(barriers=barriers)
    state = FlowState(w0, 0.0, 0)
    log.rows.append(_diagnostics(state, barriers, config))
    nsteps = math.ceil(config.t_end / config.dt - 1e-9)
    # constants solve the flow, so sup|w| can only grow through scheme instability
    cap = 2.0 * float(np.max(np.abs(w0.values))) + 1.0
    for k in range(nsteps):
        dt = min(config.dt, config.t_end - state.t) if k == nsteps - 1 else config.dt
        try:
            state = step(state, config, dt)
            peak = float(np.max(np.abs(state.w.values)))
            if peak > cap:
                raise InstabilityError(f"sup|w| = {peak:.3e} broke the comparison bound {cap:.3e} at step {state.step_index}")
        except InstabilityError as exc:
            log.final = state
            raise InstabilityError(str(exc), log) from None
        if (k + 1) % log_every == 0 or k == nsteps - 1:
            log.rows.append(_diagnostics(state, barriers, config))
    log.final = state
    return log


def write_flowlog_csv(log: FlowLog, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FlowLog.COLUMNS)
        for r in log.rows:
            w.writerow([r[0]] + [format(c, ".17g") for c in r[1:]])


@dataclass(frozen=True)
class SupBoundReport:
    R: float
    lhs: float
    rhs: float
    c1: float
    margin: float
    passed: bool

    def to_dict(self) -> dict:
        return {"R": self.R, "lhs": self.lhs, "rhs": self.rhs, "c1": self.c1, "margin": self.margin, "pass": self.passed}


_PROFILE_NODES = {1: 4001, 2: 401, 3: 81}


def _ball_sup(u: Profile | ScalarField, radius: float, dim: int) -> float:
    """Grid sup of ``|u|`` over nodes in the open ball of ``radius``."""
    if isinstance(u, ScalarField):
        if u.spec.half_width < radius:
            raise ValueError(f"grid box (half-width {u.spec.half_width}) does not contain the ball of radius {radius}")
        inside = u.spec.radius_sq() < radius * radius
        return float(np.max(np.abs(u.values[inside])))
    # analytic profiles are sampled on their own domain of definition
    r = min(radius, u.domain_radius)
    spec = make_grid(dim, r, _PROFILE_NODES[dim])
    pts = spec.points()
    inside = spec.radius_sq() < r * r
    return float(np.max(np.abs(u(pts[inside]))))


def sup_bound_check(u: Profile | ScalarField, R: float, dim: int | None = None) -> SupBoundReport:
    """``sup_{|x|<R} |u| <= C1 R`` with ``C1 = 2 (sup_{|x|<2 sqrt(n)} |u| + sqrt(2n+1))``."""
    if not R > 1:
        raise ValueError(f"R must exceed 1, got {R}")
    n = u.spec.dim if isinstance(u, ScalarField) else dim
    if n is None:
        raise ValueError("dim is required for analytic profiles")
    lhs = _ball_sup(u, R, n)
    c1 = 2.0 * (_ball_sup(u, 2.0 * math.sqrt(n), n) + math.sqrt(2 * n + 1))
    rhs = c1 * R
    return SupBoundReport(float(R), lhs, rhs, c1, rhs - lhs, lhs <= rhs)
