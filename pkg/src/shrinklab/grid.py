"""Uniform Cartesian grids, sampled fields and centered finite differences.

Fields are node-centered and stored as arrays of shape ``(m,) * n`` in C
(row-major) order, axis 0 being ``x1``.  Every other module consumes these.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "GridSpec",
    "ScalarField",
    "VectorField",
    "Profile",
    "Plane",
    "SphereCap",
    "Paraboloid",
    "Sinusoid",
    "Tabulated",
    "make_grid",
    "check_domain",
    "discretize",
    "gradient_fd",
    "hessian_fd",
    "interior_mask",
    "scaled_margin",
    "write_field_csv",
    "read_field_csv",
]


@dataclass(frozen=True)
class GridSpec:
    """Box ``[-L, L]^n`` sampled by ``m`` nodes per axis (``m`` odd)."""

    dim: int
    half_width: float
    nodes_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        m = self.nodes_per_axis
        if int(m) != m or m < 5 or m % 2 == 0:
            raise ValueError(f"nodes_per_axis must be an odd integer >= 5, got {m}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.nodes_per_axis - 1)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.nodes_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.nodes_per_axis**self.dim

    @property
    def axis(self) -> np.ndarray:
        """1D node coordinates ``x_k = -L + k h``."""
        k = np.arange(self.nodes_per_axis, dtype=float)
        return -self.half_width + k * self.spacing

    def coords(self) -> list[np.ndarray]:
        """Per-axis coordinate arrays broadcast to the full grid shape."""
        return np.meshgrid(*([self.axis] * self.dim), indexing="ij")

    def points(self) -> np.ndarray:
        """Node coordinates as an array of shape ``shape + (dim,)``."""
        return np.stack(self.coords(), axis=-1)

    def radius_sq(self) -> np.ndarray:
        return np.sum(self.points() ** 2, axis=-1)

    def refined(self) -> "GridSpec":
        """Same box with the spacing halved."""
        return GridSpec(self.dim, self.half_width, 2 * self.nodes_per_axis - 1)


def make_grid(dim: int, half_width: float, nodes_per_axis: int) -> GridSpec:
    return GridSpec(int(dim), float(half_width), int(nodes_per_axis))


def _frozen(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScalarField:
    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.size != self.spec.size:
            raise ValueError(f"expected {self.spec.size} values, got {vals.size}")
        vals = vals.reshape(self.spec.shape)
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", vals)

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self.spec, values)


@dataclass(frozen=True)
class VectorField:
    """Per-node tuple of fixed arity; ``values`` has shape ``grid.shape + (k,)``."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape[:-1] != self.spec.shape:
            raise ValueError(f"vector field shape {vals.shape} does not match grid {self.spec.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("vector field entries must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def arity(self) -> int:
        return self.values.shape[-1]


# ---------------------------------------------------------------------------
# analytic profiles


class Profile:
    """An analytic height function ``u : R^n -> R``.

    ``domain_radius`` is the radius of the largest centered ball on which the
    profile is defined (``inf`` for entire graphs).
    """

    domain_radius: float = math.inf
    name: str = "profile"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class Plane(Profile):
    """``u = a . x``; a scalar ``a`` means ``a * x1``."""

    a: Sequence[float] | float = 0.0
    name = "plane"

    def coefficients(self, n: int) -> np.ndarray:
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        if a.size == 1:
            out = np.zeros(n)
            out[0] = a[0]
            return out
        if a.size != n:
            raise ValueError(f"plane needs {n} coefficients, got {a.size}")
        return a

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.coefficients(x.shape[-1])

    def params(self):
        return {"a": np.atleast_1d(self.a).tolist()}


@dataclass(frozen=True)
class SphereCap(Profile):
    """Upper hemisphere of the shrinking sphere, ``u = sqrt(2n - |x|^2)``."""

    dim: int = 2
    name = "sphere_cap"

    @property
    def radius(self) -> float:
        return math.sqrt(2.0 * self.dim)

    @property
    def domain_radius(self) -> float:  # type: ignore[override]
        return self.radius

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum(x * x, axis=-1)
        if np.any(r2 >= 2.0 * self.dim):
            raise ValueError("sphere_cap evaluated outside |x| < sqrt(2n)")
        return np.sqrt(2.0 * self.dim - r2)

    def params(self):
        return {"dim": self.dim}


@dataclass(frozen=True)
class Paraboloid(Profile):
    """``u = c |x|^2``."""

    c: float = 1.0
    name = "paraboloid"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.c * np.sum(x * x, axis=-1)

    def params(self):
        return {"c": self.c}


@dataclass(frozen=True)
class Sinusoid(Profile):
    """``u = a . x + b sin(k x1)``; ``a`` follows the :class:`Plane` convention."""

    a: Sequence[float] | float = 0.0
    b: float = 1.0
    k: float = 1.0
    name = "sinusoid"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return Plane(self.a)(x) + self.b * np.sin(self.k * x[..., 0])

    def params(self):
        return {"a": np.atleast_1d(self.a).tolist(), "b": self.b, "k": self.k}


@dataclass(frozen=True)
class Tabulated(Profile):
    """Node values supplied directly; only valid on the grid they came from."""

    values: np.ndarray | None = None
    name = "tabulated"

    def __call__(self, x):
        raise TypeError("tabulated profiles can only be discretized on their own grid")


PROFILES: dict[str, Callable[..., Profile]] = {
    "plane": Plane,
    "sphere_cap": SphereCap,
    "paraboloid": Paraboloid,
    "sinusoid": Sinusoid,
}


def check_domain(profile: Profile, spec: GridSpec) -> None:
    """Raise ``ValueError`` unless ``profile`` is defined on the whole box."""
    if isinstance(profile, SphereCap):
        if profile.dim != spec.dim:
            raise ValueError("sphere_cap dimension must match the grid")
        # the box corners must stay inside the disk |x| < sqrt(2n)
        if spec.half_width * math.sqrt(spec.dim) >= profile.radius:
            raise ValueError(f"sphere_cap needs half_width < sqrt(2) (box corner inside |x| < {profile.radius:.4g})")


def discretize(profile: Profile, spec: GridSpec) -> ScalarField:
    """Sample ``profile`` exactly at every node of ``spec``."""
    if isinstance(profile, Tabulated):
        return ScalarField(spec, np.asarray(profile.values, dtype=float))
    check_domain(profile, spec)
    return ScalarField(spec, profile(spec.points()))


# ---------------------------------------------------------------------------
# finite differences


def _grad_values(values: np.ndarray, h: float) -> np.ndarray:
    if values.ndim == 1:
        return np.gradient(values, h, edge_order=2)[..., None]
    return np.stack(np.gradient(values, h, edge_order=2), axis=-1)


def _second_diff(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    f = np.moveaxis(values, axis, 0)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h**2
    # second-order one-sided stencils
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h**2
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h**2
    return np.moveaxis(out, 0, axis)


def _hess_values(values: np.ndarray, h: float) -> np.ndarray:
    n = values.ndim
    out = np.empty(values.shape + (n, n))
    for i in range(n):
        out[..., i, i] = _second_diff(values, h, i)
        di = np.gradient(values, h, axis=i, edge_order=2)
        for j in range(i + 1, n):
            # composing centered first differences gives the centered cross stencil
            dij = np.gradient(di, h, axis=j, edge_order=2)
            out[..., i, j] = dij
            out[..., j, i] = dij
    return out


def gradient_fd(f: ScalarField) -> VectorField:
    return VectorField(f.spec, _grad_values(f.values, f.spec.spacing))


def hessian_fd(f: ScalarField) -> np.ndarray:
    """Symmetric Hessian, shape ``grid.shape + (n, n)``."""
    return _hess_values(f.values, f.spec.spacing)


def interior_mask(spec: GridSpec, margin_nodes: int) -> np.ndarray:
    """Boolean mask of nodes at least ``margin_nodes`` layers from every face."""
    m = spec.nodes_per_axis
    if not 0 <= margin_nodes < (m - 1) / 2:
        raise ValueError(f"margin {margin_nodes} invalid for {m} nodes per axis")
    line = np.zeros(m, dtype=bool)
    line[margin_nodes : m - margin_nodes] = True
    mask = line
    for _ in range(spec.dim - 1):
        mask = np.logical_and.outer(mask, line)
    return mask


def scaled_margin(spec: GridSpec, base_margin: int, base_nodes: int) -> int:
    """Margin covering the same physical width as ``base_margin`` on a ``base_nodes`` grid."""
    return int(round(base_margin * (spec.nodes_per_axis - 1) / (base_nodes - 1)))


# ---------------------------------------------------------------------------
# CSV dump


def write_field_csv(f: ScalarField, path: str | Path) -> None:
    """Header ``x1,...,xn,value``; one node per row in row-major order."""
    n = f.spec.dim
    pts = f.spec.points().reshape(-1, n)
    vals = f.values.reshape(-1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i + 1}" for i in range(n)] + ["value"])
        for p, v in zip(pts, vals):
            w.writerow([format(c, ".17g") for c in p] + [format(v, ".17g")])


def read_field_csv(path: str | Path) -> ScalarField:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    n = data.shape[1] - 1
    m = round(data.shape[0] ** (1.0 / n))
    spec = make_grid(n, -data[0, 0], m)
    return ScalarField(spec, data[:, -1])
