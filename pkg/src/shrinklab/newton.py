"""Damped Newton solver for the shrinker equation with Dirichlet data on a box."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import IdentityReport, compute_geometry, identity_report, shrinker_residual
from .grid import GridSpec, Profile, ScalarField, discretize, interior_mask

__all__ = [
    "NotConvergedError",
    "LinearSolverError",
    "DirichletProblem",
    "SolveReport",
    "residual",
    "jacobian",
    "harmonic_extension",
    "solve",
    "cross_validate",
]

MIN_DAMPING = 2.0**-20


class NotConvergedError(RuntimeError):
    def __init__(self, message: str, best: ScalarField, report: "SolveReport"):
        super().__init__(message)
        self.best = best
        self.report = report


class LinearSolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class DirichletProblem:
    """Only the boundary-node values of ``boundary`` matter."""

    boundary: ScalarField
    initial_guess: ScalarField | None = None

    @property
    def spec(self) -> GridSpec:
        return self.boundary.spec

    @classmethod
    def from_profile(cls, profile: Profile, spec: GridSpec, initial_guess: ScalarField | None = None):
        return cls(discretize(profile, spec), initial_guess)

    def negated(self) -> "DirichletProblem":
        guess = None if self.initial_guess is None else self.initial_guess.with_values(-self.initial_guess.values)
        return DirichletProblem(self.boundary.with_values(-self.boundary.values), guess)


@dataclass
class SolveReport:
    iterations: int = 0
    residual: float = np.inf
    history: list[float] = field(default_factory=list)
    damping: list[float] = field(default_factory=list)
    converged: bool = False

    def to_dict(self) -> dict:
        return {"iterations": self.iterations, "residual": self.residual, "converged": self.converged}

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def residual(u: ScalarField, problem: DirichletProblem) -> ScalarField:
    """Discrete ``S`` at interior nodes, ``u - data`` on the boundary."""
    if u.spec != problem.spec:
        raise ValueError("field and problem grids differ")
    r = shrinker_residual(u).values.copy()
    bnd = ~interior_mask(u.spec, 1)
    r[bnd] = u.values[bnd] - problem.boundary.values[bnd]
    return ScalarField(u.spec, r)


def _diff_ops(m: int, h: float):
    """Centered first and second differences (boundary rows are never used)."""
    e = np.ones(m)
    d1 = sp.diags([-e[:-1], e[:-1]], [-1, 1], format="lil") / (2.0 * h)
    d2 = sp.diags([e[:-1], -2.0 * e, e[:-1]], [-1, 0, 1], format="lil") / (h * h)
    return d1.tocsr(), d2.tocsr()


def _axis_op(op, axis: int, n: int, m: int):
    mats = [sp.identity(m, format="csr")] * n
    mats[axis] = op
    out = mats[0]
    for mat in mats[1:]:
        out = sp.kron(out, mat, format="csr")
    return out


def jacobian(u: ScalarField) -> sp.csr_matrix:
    """Exact derivative of the discrete residual with respect to node values."""
    spec = u.spec
    n, m, h = spec.dim, spec.nodes_per_axis, spec.spacing
    geom = compute_geometry(u)
    N = spec.size
    p = geom.grad.reshape(N, n)
    q = geom.hess.reshape(N, n, n)
    x = spec.points().reshape(N, n)
    uu = u.values.reshape(N)
    v2 = 1.0 + np.sum(p * p, axis=1)
    v = np.sqrt(v2)
    qp = np.einsum("kij,kj->ki", q, p)
    pqp = np.einsum("ki,ki->k", p, qp)
    trace = np.trace(q, axis1=1, axis2=2)
    lin = trace - pqp / v2
    xp_u = np.einsum("ki,ki->k", x, p) - uu

    d1, d2 = _diff_ops(m, h)
    first = [_axis_op(d1, k, n, m) for k in range(n)]
    J = sp.diags(1.0 / (2.0 * v))
    for k in range(n):
        dn = -2.0 * qp[:, k] / v2 + 2.0 * p[:, k] * pqp / v2**2
        coef = dn / v - lin * p[:, k] / (v * v2) - x[:, k] / (2.0 * v) + xp_u * p[:, k] / (2.0 * v * v2)
        J = J + sp.diags(coef) @ first[k]
    for i in range(n):
        gii = (1.0 - p[:, i] ** 2 / v2) / v
        J = J + sp.diags(gii) @ _axis_op(d2, i, n, m)
        for j in range(i + 1, n):
            gij = -2.0 * p[:, i] * p[:, j] / (v2 * v)
            J = J + sp.diags(gij) @ (first[i] @ first[j])
    interior = interior_mask(spec, 1).reshape(N).astype(float)
    J = sp.diags(interior) @ J + sp.diags(1.0 - interior)
    return J.tocsr()


def harmonic_extension(problem: DirichletProblem) -> ScalarField:
    """Discrete Laplace solution matching the boundary data."""
    spec = problem.spec
    n, m, N = spec.dim, spec.nodes_per_axis, spec.size
    _, d2 = _diff_ops(m, spec.spacing)
    lap = sum(_axis_op(d2, k, n, m) for k in range(n))
    interior = interior_mask(spec, 1).reshape(N).astype(float)
    A = (sp.diags(interior) @ lap + sp.diags(1.0 - interior)).tocsc()
    rhs = (1.0 - interior) * problem.boundary.values.reshape(N)
    return ScalarField(spec, spla.spsolve(A, rhs))


def _sup(r: ScalarField) -> float:
    return float(np.max(np.abs(r.values)))


def solve(
    problem: DirichletProblem, tol: float = 1e-10, max_iter: int = 50
) -> tuple[ScalarField, SolveReport]:
    """Newton iteration with step halving on the sup-norm of the residual.

    Raises :class:`NotConvergedError` (carrying the best iterate) when the
    tolerance is not reached within ``max_iter`` steps or backtracking stalls.
    """
    u = problem.initial_guess if problem.initial_guess is not None else harmonic_extension(problem)
    if u.spec != problem.spec:
        raise ValueError("initial guess lives on a different grid")
    report = SolveReport()
    r = residual(u, problem)
    norm = _sup(r)
    report.history.append(norm)
    while norm >= tol:
        if report.iterations >= max_iter:
            report.residual = norm
            raise NotConvergedError(f"no convergence in {max_iter} iterations (residual {norm:.3e})", u, report)
        J = jacobian(u)
        delta = spla.spsolve(J.tocsc(), -r.values.reshape(-1))
        if not np.all(np.isfinite(delta)):
            raise LinearSolverError("linearized system is singular")
        delta = delta.reshape(u.spec.shape)
        lam = 1.0
        while True:
            try:
                trial = u.with_values(u.values + lam * delta)
                r_trial = residual(trial, problem)
                n_trial = _sup(r_trial)
            except (ValueError, ArithmeticError):
                n_trial = np.inf
            if n_trial < norm:
                break
            lam *= 0.5
            if lam < MIN_DAMPING:
                report.residual = norm
                raise NotConvergedError(f"line search stalled (residual {norm:.3e})", u, report)
        u, r, norm = trial, r_trial, n_trial
        report.iterations += 1
        report.damping.append(lam)
        report.history.append(norm)
    report.residual = norm
    report.converged = True
    return u, report


def cross_validate(u: ScalarField, margin: int) -> IdentityReport:
    """Shrinker, ``Lf = f/2``, ``LH = H`` and log-density identities on a solution."""
    return identity_report(u, margin)
