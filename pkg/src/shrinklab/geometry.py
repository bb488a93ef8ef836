"""Differential geometry of a graph ``x -> (x, u(x))`` sampled on a grid.

Conventions: the normal is the upward unit normal ``(-Du, 1)/v`` and the mean
curvature is ``H = div(n) = -div(Du/v)``, so the round sphere of radius ``r``
(upper cap) has ``H = n/r``.  A graph is a self-shrinker when
``H = <x, n>/2``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .grid import ScalarField, VectorField, _grad_values, gradient_fd, hessian_fd, interior_mask

__all__ = [
    "GraphGeometry",
    "TangentialGradient",
    "IdentityReport",
    "compute_geometry",
    "shrinker_residual",
    "tangential_gradient",
    "laplace_beltrami",
    "l_apply",
    "eq2_residual",
    "lf_residual",
    "lh_residual",
    "gaussian_weight",
    "weighted_l2",
    "identity_report",
]

# pointwise agreement demanded between the two algebraic forms of S
FORM_AGREEMENT_TOL = 1e-10


@dataclass(frozen=True)
class GraphGeometry:
    u: ScalarField
    grad: np.ndarray = field(repr=False)  # Du, shape grid + (n,)
    hess: np.ndarray = field(repr=False)  # D^2u, shape grid + (n, n)
    v: np.ndarray = field(repr=False)
    normal: VectorField = field(repr=False)
    H: np.ndarray = field(repr=False)
    a_norm_sq: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    position: VectorField = field(repr=False)

    @property
    def spec(self):
        return self.u.spec

    @property
    def metric_inverse(self) -> np.ndarray:
        """``g^{ij} = delta_ij - u_i u_j / v^2``."""
        n = self.spec.dim
        p = self.grad
        return np.eye(n) - p[..., :, None] * p[..., None, :] / (self.v**2)[..., None, None]

    def support_function(self) -> np.ndarray:
        """``<x, n> = (u - x . Du) / v``."""
        return np.einsum("...k,...k->...", self.position.values, self.normal.values)


def compute_geometry(u: ScalarField) -> GraphGeometry:
    spec = u.spec
    n = spec.dim
    p = gradient_fd(u).values
    q = hessian_fd(u)
    v, H, A2 = _kernels.graph_pointwise(p.reshape(-1, n), q.reshape(-1, n, n))
    v = v.reshape(spec.shape)
    H = H.reshape(spec.shape)
    A2 = A2.reshape(spec.shape)
    normal = np.concatenate([-p, np.ones(spec.shape + (1,))], axis=-1) / v[..., None]
    position = np.concatenate([spec.points(), u.values[..., None]], axis=-1)
    return GraphGeometry(
        u=u,
        grad=p,
        hess=q,
        v=v,
        normal=VectorField(spec, normal),
        H=H,
        a_norm_sq=A2,
        f=1.0 / v,
        position=VectorField(spec, position),
    )


def shrinker_residual(u: ScalarField, geom: GraphGeometry | None = None) -> ScalarField:
    """``S = div(Du/v) - (x.Du - u)/(2v)``, equal to ``-H + <x, n>/2``.

    Both algebraic forms are evaluated and required to agree node by node.
    """
    if geom is None:
        geom = compute_geometry(u)
    p, q, v = geom.grad, geom.hess, geom.v
    x = u.spec.points()
    trace = np.trace(q, axis1=-2, axis2=-1)
    pqp = np.einsum("...i,...ij,...j->...", p, q, p)
    div_form = (trace - pqp / v**2) / v
    rhs = (np.einsum("...i,...i->...", x, p) - u.values) / (2.0 * v)
    s_div = div_form - rhs
    s_normal = -geom.H + 0.5 * geom.support_function()
    scale = np.maximum(1.0, np.abs(div_form) + np.abs(rhs))
    if np.any(np.abs(s_div - s_normal) > FORM_AGREEMENT_TOL * scale):
        worst = float(np.max(np.abs(s_div - s_normal) / scale))
        raise ArithmeticError(f"shrinker residual forms disagree (scaled gap {worst:.3e})")
    return ScalarField(u.spec, s_normal)


@dataclass(frozen=True)
class TangentialGradient:
    """Tangential gradient of a pulled-back function.

    ``coeffs`` are the contravariant components ``g^{ij} phi_j``; ``ambient``
    is ``coeffs_i (e_i + u_i e_{n+1})``.
    """

    coeffs: np.ndarray
    ambient: VectorField
    norm_sq: np.ndarray

    def dot_position(self, geom: GraphGeometry) -> np.ndarray:
        return np.einsum("...k,...k->...", self.ambient.values, geom.position.values)


def tangential_gradient(geom: GraphGeometry, phi_grad: np.ndarray) -> TangentialGradient:
    """Build tangential data from the coordinate gradient ``phi_j`` (shape grid + (n,))."""
    ginv = geom.metric_inverse
    coeffs = np.einsum("...ij,...j->...i", ginv, phi_grad)
    vertical = np.einsum("...i,...i->...", coeffs, geom.grad)
    ambient = np.concatenate([coeffs, vertical[..., None]], axis=-1)
    norm_sq = np.einsum("...i,...i->...", coeffs, phi_grad)
    return TangentialGradient(coeffs, VectorField(geom.spec, ambient), norm_sq)


def _as_values(phi) -> np.ndarray:
    return phi.values if isinstance(phi, ScalarField) else np.asarray(phi, dtype=float)


def laplace_beltrami(geom: GraphGeometry, phi: ScalarField | np.ndarray) -> ScalarField:
    """``(1/v) d_i (v g^{ij} d_j phi)``, differentiating the flux field."""
    h = geom.spec.spacing
    phi_v = _as_values(phi)
    tg = tangential_gradient(geom, _grad_values(phi_v, h))
    flux = geom.v[..., None] * tg.coeffs
    div = np.zeros(geom.spec.shape)
    for i in range(geom.spec.dim):
        div += np.gradient(flux[..., i], h, axis=i, edge_order=2)
    return ScalarField(geom.spec, div / geom.v)


def l_apply(geom: GraphGeometry, phi: ScalarField | np.ndarray) -> ScalarField:
    """Stability operator ``L phi = Lap phi - <x, grad phi>/2 + (|A|^2 + 1/2) phi``."""
    phi_v = _as_values(phi)
    tg = tangential_gradient(geom, _grad_values(phi_v, geom.spec.spacing))
    lap = laplace_beltrami(geom, phi_v).values
    out = lap - 0.5 * tg.dot_position(geom) + (geom.a_norm_sq + 0.5) * phi_v
    return ScalarField(geom.spec, out)


def lf_residual(geom: GraphGeometry) -> ScalarField:
    """``L f - f/2`` for the vertical normal component ``f = 1/v``."""
    return ScalarField(geom.spec, l_apply(geom, geom.f).values - 0.5 * geom.f)


def lh_residual(geom: GraphGeometry) -> ScalarField:
    return ScalarField(geom.spec, l_apply(geom, geom.H).values - geom.H)


def eq2_residual(geom: GraphGeometry) -> ScalarField:
    """``Lap g - <x, grad g>/2 + |grad g|^2 + |A|^2`` with ``g = log f``."""
    g = np.log(geom.f)
    tg = tangential_gradient(geom, _grad_values(g, geom.spec.spacing))
    lap = laplace_beltrami(geom, g).values
    out = lap - 0.5 * tg.dot_position(geom) + tg.norm_sq + geom.a_norm_sq
    return ScalarField(geom.spec, out)


def gaussian_weight(geom: GraphGeometry) -> np.ndarray:
    """``exp(-|X|^2/4)`` at the ambient point ``X = (x, u(x))``."""
    return np.exp(-np.sum(geom.position.values**2, axis=-1) / 4.0)


def weighted_l2(geom: GraphGeometry, values: np.ndarray, mask: np.ndarray) -> float:
    """Node-sum approximation of ``(int_Sigma r^2 e^{-|X|^2/4})^{1/2}`` over ``mask``."""
    dens = values**2 * gaussian_weight(geom) * geom.v * geom.spec.spacing**geom.spec.dim
    return float(np.sqrt(np.sum(dens[mask])))


@dataclass(frozen=True)
class IdentityReport:
    shrinker_sup: float
    shrinker_l2: float
    lf_sup: float
    lf_l2: float
    lh_sup: float
    lh_l2: float
    eq2_sup: float
    eq2_l2: float
    margin: int
    h: float

    def to_dict(self) -> dict:
        return asdict(self)

    def norms(self) -> dict[str, float]:
        d = self.to_dict()
        d.pop("margin")
        d.pop("h")
        return d


def identity_report(u: ScalarField, margin: int) -> IdentityReport:
    mask = interior_mask(u.spec, margin)
    geom = compute_geometry(u)
    out = {}
    for key, r in (
        ("shrinker", shrinker_residual(u, geom)),
        ("lf", lf_residual(geom)),
        ("lh", lh_residual(geom)),
        ("eq2", eq2_residual(geom)),
    ):
        vals = r.values
        out[f"{key}_sup"] = float(np.max(np.abs(vals[mask])))
        out[f"{key}_l2"] = weighted_l2(geom, vals, mask)
    return IdentityReport(margin=margin, h=u.spec.spacing, **out)
