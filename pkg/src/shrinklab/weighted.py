"""Gaussian-weighted integrals over a sampled graph.

Surface integrals are pulled back to the base grid,
``int_Sigma F = int F(x, u(x)) v(x) dx``, and restricted to sublevel sets
``{|x|^2 + u^2 < r^2}`` (the graph inside an ambient ball).  Node weights are
tensor-trapezoid weights; nodes whose dual cell straddles the sphere get the
covered part of that cell, measured by sub-sampling the multilinear
interpolant of ``|x|^2 + u^2 - r^2`` along every axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.ndimage import maximum_filter, minimum_filter

from .flow import SupBoundReport, sup_bound_check
from .geometry import GraphGeometry, gaussian_weight, tangential_gradient
from .grid import Profile, ScalarField

__all__ = [
    "SmoothBump",
    "LinearCutoff",
    "CutoffFamily",
    "WeightedReport",
    "VolumeReport",
    "CutoffEnergy",
    "FlatnessReport",
    "omega_n",
    "sublevel_weights",
    "gaussian_integral",
    "stability_sides",
    "random_bumps",
    "cutoff_energy",
    "graph_volume",
    "lemma2_check",
    "lemma3_check",
    "flatness_certificate",
]


def omega_n(n: int) -> float:
    """Half the volume of the unit ``n``-sphere in ``R^{n+1}``: pi for n=1, 2 pi for n=2."""
    return math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


_SUBSAMPLES = {1: 64, 2: 16, 3: 8}


def _axis_tables(s: int, h: float):
    """Sub-point interpolation weights onto offsets (-1, 0, +1) and per-edge-type lengths."""
    delta = -0.5 + (np.arange(s) + 0.5) / s  # in units of h
    interp = np.zeros((s, 3))
    neg = delta < 0
    interp[neg, 0] = -delta[neg]
    interp[neg, 1] = 1.0 + delta[neg]
    interp[~neg, 1] = 1.0 - delta[~neg]
    interp[~neg, 2] = delta[~neg]
    # rows: interior node, first node (no left half), last node (no right half)
    length = np.tile(np.full(s, h / s), (3, 1))
    length[1, neg] = 0.0
    length[2, ~neg] = 0.0
    return interp, length


def sublevel_weights(level: np.ndarray, h: float) -> np.ndarray:
    """Quadrature weights for ``{level < 0}`` on a uniform grid of spacing ``h``.

    Each node owns its (box-truncated) dual cell.  Cells whose 3^n
    neighbourhood is one-signed are fully in or out; the remaining cut cells
    are sub-sampled on the multilinear interpolant of ``level``.
    """
    n = level.ndim
    m = level.shape[0]
    edge = np.full(m, h)
    edge[[0, -1]] = 0.5 * h
    full = np.ones(level.shape)
    for ax in range(n):
        full = full * edge.reshape([-1 if k == ax else 1 for k in range(n)])
    inside = level < 0
    lo = minimum_filter(level, size=3, mode="nearest")
    hi = maximum_filter(level, size=3, mode="nearest")
    cut = (lo < 0) & (hi >= 0)
    w = np.where(inside, full, 0.0)
    idx = np.nonzero(cut)
    if idx[0].size == 0:
        return w
    s = _SUBSAMPLES[n]
    interp, length = _axis_tables(s, h)
    # linear extrapolation pads the missing neighbours of box-face nodes
    padded = level
    for ax in range(n):
        f = np.moveaxis(padded, ax, 0)
        f = np.concatenate([2 * f[:1] - f[1:2], f, 2 * f[-1:] - f[-2:-1]], axis=0)
        padded = np.moveaxis(f, 0, ax)
    offsets = np.stack(np.meshgrid(*([np.arange(3)] * n), indexing="ij"), axis=-1).reshape(-1, n)
    gather = tuple(idx[ax][:, None] + offsets[None, :, ax] for ax in range(n))
    nb = padded[gather].reshape((-1,) + (3,) * n)
    letters = "abc"[:n]
    sub = "ijk"[:n]
    expr = "z" + letters + "," + ",".join(f"{sub[ax]}{letters[ax]}" for ax in range(n)) + "->z" + sub
    vals = np.einsum(expr, nb, *([interp] * n), optimize=True)
    cover = vals < 0
    wt = None
    for ax in range(n):
        kind = np.where(idx[ax] == 0, 1, np.where(idx[ax] == m - 1, 2, 0))
        la = length[kind]  # (K, s)
        shape = [la.shape[0]] + [s if k == ax else 1 for k in range(n)]
        la = la.reshape(shape)
        wt = la if wt is None else wt * la
    w[idx] = np.sum((cover * wt).reshape(cover.shape[0], -1), axis=1)
    return w


def _surface_weights(geom: GraphGeometry, radius: float | None) -> np.ndarray:
    """``v dx`` weights over the graph inside the ambient ball of ``radius`` (``None``: whole box)."""
    r2 = np.sum(geom.position.values**2, axis=-1)
    level = -np.ones_like(r2) if radius is None else r2 - radius * radius
    return sublevel_weights(level, geom.spec.spacing) * geom.v


def gaussian_integral(
    geom: GraphGeometry, phi: ScalarField | np.ndarray, clip_radius: float | None = None, weighted: bool = True
) -> float:
    """``int_{Sigma cap B_r} phi e^{-|X|^2/4}``; ``clip_radius=None`` integrates over the whole box."""
    vals = phi.values if isinstance(phi, ScalarField) else np.broadcast_to(np.asarray(phi, float), geom.spec.shape)
    dens = vals * gaussian_weight(geom) if weighted else vals
    return float(np.sum(dens * _surface_weights(geom, clip_radius)))


# ---------------------------------------------------------------------------
# cutoffs


@dataclass(frozen=True)
class SmoothBump:
    """``1`` within ``inner`` of ``center``, smoothstep down to ``0`` at ``outer``.

    A center with ``n`` coordinates measures distance in the base (the bump
    is a vertical cylinder); ``n + 1`` coordinates give an ambient ball.
    """

    center: tuple[float, ...]
    inner: float
    outer: float

    def __post_init__(self):
        if not 0 <= self.inner < self.outer:
            raise ValueError("need 0 <= inner < outer")

    def evaluate(self, X: np.ndarray):
        """Values and ambient gradients at points ``X`` (shape ``(..., n+1)``)."""
        c = np.asarray(self.center, dtype=float)
        k = c.size
        d = X[..., :k] - c
        r = np.sqrt(np.sum(d * d, axis=-1))
        t = np.clip((self.outer - r) / (self.outer - self.inner), 0.0, 1.0)
        val = t * t * (3.0 - 2.0 * t)
        dval_dr = -6.0 * t * (1.0 - t) / (self.outer - self.inner)
        grad = np.zeros(X.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            unit = np.where(r[..., None] > 0, d / r[..., None], 0.0)
        grad[..., :k] = dval_dr[..., None] * unit
        return val, grad


@dataclass(frozen=True)
class LinearCutoff:
    """``clamp(R + 1 - |X|, 0, 1)``: one on ``B_R``, zero outside ``B_{R+1}``."""

    R: float

    def evaluate(self, X: np.ndarray):
        r = np.sqrt(np.sum(X * X, axis=-1))
        val = np.clip(self.R + 1.0 - r, 0.0, 1.0)
        on_ramp = (r > self.R) & (r < self.R + 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            grad = np.where(on_ramp[..., None], -X / r[..., None], 0.0)
        return val, grad


@dataclass(frozen=True)
class CutoffFamily:
    radii: tuple[float, ...]

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.size and (np.any(r <= 0) or np.any(np.diff(r) <= 0)):
            raise ValueError("cutoff radii must be positive and increasing")

    def __iter__(self):
        return (LinearCutoff(float(r)) for r in self.radii)

    def __len__(self):
        return len(self.radii)


def _pulled_back(geom: GraphGeometry, eta):
    """Values of ``eta(x, u(x))`` and ``|grad_Sigma eta|^2`` by the chain rule."""
    val, G = eta.evaluate(geom.position.values)
    coord_grad = G[..., :-1] + G[..., -1:] * geom.grad
    return val, tangential_gradient(geom, coord_grad).norm_sq


def _radial_norm_sq(geom: GraphGeometry) -> np.ndarray:
    """``|grad_Sigma |X||^2`` (the ramp of a linear cutoff has gradient ``-X/|X|``)."""
    X = geom.position.values
    r = np.sqrt(np.sum(X * X, axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        G = np.where(r[..., None] > 0, X / r[..., None], 0.0)
    coord_grad = G[..., :-1] + G[..., -1:] * geom.grad
    return tangential_gradient(geom, coord_grad).norm_sq


def _annulus_integral(geom: GraphGeometry, integrand: np.ndarray, R: float) -> float:
    return gaussian_integral(geom, integrand, R + 1.0) - gaussian_integral(geom, integrand, R)


@dataclass(frozen=True)
class WeightedReport:
    lhs: float
    rhs: float
    h: float
    radius: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.margin >= -1e-9

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "margin": self.margin, "h": self.h, "pass": self.passed}


def stability_sides(geom: GraphGeometry, eta) -> WeightedReport:
    """Both sides of ``int eta^2 |A|^2 e^{-|X|^2/4} <= int |grad_Sigma eta|^2 e^{-|X|^2/4}``."""
    val, grad_sq = _pulled_back(geom, eta)
    spec = geom.spec
    boundary = ~_interior(spec.shape)
    if np.any(val[boundary] != 0.0):
        raise ValueError("cutoff support reaches the grid boundary")
    lhs = gaussian_integral(geom, val**2 * geom.a_norm_sq)
    if isinstance(eta, LinearCutoff):
        # ramp gradient jumps on the two spheres; integrate the annulus exactly
        rhs = _annulus_integral(geom, _radial_norm_sq(geom), eta.R)
    else:
        rhs = gaussian_integral(geom, grad_sq)
    return WeightedReport(lhs, rhs, spec.spacing, spec.half_width)


def _interior(shape) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    mask[(slice(1, -1),) * len(shape)] = True
    return mask


def random_bumps(count: int, dim: int, half_width: float, seed: int = 0, base: bool = True) -> list[SmoothBump]:
    """Deterministic family of cylindrical bumps that fit inside ``[-L, L]^n``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        c = rng.uniform(-0.25 * half_width, 0.25 * half_width, size=dim)
        room = half_width - np.max(np.abs(c))
        outer = rng.uniform(0.55, 0.9) * room
        inner = rng.uniform(0.1, 0.6) * outer
        center = tuple(c) if base else tuple(c) + (0.0,)
        out.append(SmoothBump(center, float(inner), float(outer)))
    return out


@dataclass(frozen=True)
class CutoffEnergy:
    radii: tuple[float, ...]
    values: tuple[float, ...]
    crude: tuple[float, ...]


def _check_footprint(geom: GraphGeometry, radius: float) -> None:
    r2 = np.sum(geom.position.values**2, axis=-1)
    boundary = ~_interior(geom.spec.shape)
    if np.any(r2[boundary] < radius * radius):
        raise ValueError(f"ball of radius {radius} reaches the grid boundary")


def cutoff_energy(geom: GraphGeometry, family: CutoffFamily) -> CutoffEnergy:
    """``int |grad_Sigma eta_j|^2 e^{-|X|^2/4}`` per cutoff, with the bound using ``2`` on the annulus."""
    if len(family) == 0:
        return CutoffEnergy((), (), ())
    _check_footprint(geom, max(family.radii) + 1.0)
    radial = _radial_norm_sq(geom)
    values, crude = [], []
    for eta in family:
        values.append(_annulus_integral(geom, radial, eta.R))
        crude.append(_annulus_integral(geom, np.full(geom.spec.shape, 2.0), eta.R))
    return CutoffEnergy(tuple(float(r) for r in family.radii), tuple(values), tuple(crude))


def graph_volume(geom: GraphGeometry, R: float) -> float:
    """Area of ``Sigma cap B_R``."""
    if R <= 0:
        return 0.0
    _check_footprint(geom, R)
    return gaussian_integral(geom, 1.0, R, weighted=False)


def _base_sup(u: ScalarField, R: float) -> float:
    inside = u.spec.radius_sq() < R * R
    return float(np.max(np.abs(u.values[inside]))) if np.any(inside) else 0.0


@dataclass(frozen=True)
class VolumeReport:
    R: float
    volume: float
    bound: float
    m_r: float
    omega_n: float
    statement_bound: float

    @property
    def passed(self) -> bool:
        return self.volume <= self.bound

    def to_dict(self) -> dict:
        return {
            "volume": self.volume,
            "bound": self.bound,
            "m_r": self.m_r,
            "omega_n": self.omega_n,
            "pass": self.passed,
            "R": self.R,
            "statement_bound": self.statement_bound,
        }


def lemma2_check(geom: GraphGeometry, R: float) -> VolumeReport:
    """Area against ``2 omega_n R^n (1 + R^2 + M_R^2)``.

    ``statement_bound`` carries the variant ``2 omega_n R^n (1 + R^n + M_R^2)``
    for comparison.
    """
    n = geom.spec.dim
    vol = graph_volume(geom, R)
    m_r = _base_sup(geom.u, R)
    w = omega_n(n)
    bound = 2.0 * w * R**n * (1.0 + R * R + m_r * m_r)
    stmt = 2.0 * w * R**n * (1.0 + R**n + m_r * m_r)
    return VolumeReport(float(R), vol, bound, m_r, w, stmt)


def lemma3_check(u: ScalarField | Profile, R_list: Sequence[float], dim: int | None = None) -> list[SupBoundReport]:
    """Linear height growth ``M_R <= C1 R`` at every ``R`` in ``R_list``."""
    return [sup_bound_check(u, float(R), dim) for R in R_list]


@dataclass(frozen=True)
class FlatnessReport:
    a_mass: float
    slope: np.ndarray = field(repr=False)
    fit_residual: float
    clip_radius: float | None
    flat: bool

    def to_dict(self) -> dict:
        return {
            "a_mass": self.a_mass,
            "slope": [float(s) for s in self.slope],
            "fit_residual": self.fit_residual,
            "clip_radius": self.clip_radius,
            "verdict": "FLAT" if self.flat else "NOT FLAT",
        }


def flatness_certificate(
    geom: GraphGeometry,
    family: CutoffFamily | None = None,
    mass_tol: float = 1e-6,
    fit_tol: float = 1e-6,
) -> FlatnessReport:
    """Weighted ``|A|^2`` mass plus a least-squares fit ``u ~ a . x`` through the origin."""
    clip = None if family is None or len(family) == 0 else max(family.radii) + 1.0
    mass = gaussian_integral(geom, geom.a_norm_sq, clip)
    x = geom.spec.points().reshape(-1, geom.spec.dim)
    y = geom.u.values.reshape(-1)
    slope, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = float(np.max(np.abs(x @ slope - y)))
    return FlatnessReport(mass, slope, resid, clip, mass < mass_tol and resid < fit_tol)
