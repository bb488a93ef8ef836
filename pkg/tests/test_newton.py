import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinklab.grid import Plane, ScalarField, SphereCap, discretize, interior_mask, make_grid
from shrinklab.newton import (
    DirichletProblem,
    NotConvergedError,
    cross_validate,
    harmonic_extension,
    jacobian,
    residual,
    solve,
)


def test_residual_examples():
    spec = make_grid(2, 1.0, 21)
    plane = Plane([0.5, -1.0])
    u = discretize(plane, spec)
    assert np.max(np.abs(residual(u, DirichletProblem.from_profile(plane, spec)).values)) < 1e-12
    ones = DirichletProblem(ScalarField(spec, np.ones(spec.shape)))
    r = residual(ScalarField(spec, np.zeros(spec.shape)), ones).values
    assert np.all(r[~interior_mask(spec, 1)] == -1.0)
    assert np.all(r[interior_mask(spec, 1)] == 0.0)


def test_jacobian_matches_directional_differences(rng):
    spec = make_grid(2, 1.0, 15)
    base = discretize(SphereCap(2), spec).values + 0.05 * rng.normal(size=spec.shape)
    u = ScalarField(spec, base)
    prob = DirichletProblem.from_profile(SphereCap(2), spec)
    phi = rng.normal(size=spec.shape)
    J = jacobian(u)
    lin = (J @ phi.reshape(-1)).reshape(spec.shape)
    errs = []
    for eps in (1e-3, 5e-4):
        plus = residual(u.with_values(base + eps * phi), prob).values
        minus = residual(u.with_values(base - eps * phi), prob).values
        errs.append(np.max(np.abs((plus - minus) / (2 * eps) - lin)))
    # central differences converge at O(eps^2)
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_linear_data():
    spec = make_grid(2, 1.0, 41)
    u, rep = solve(DirichletProblem.from_profile(Plane([0.5, -1.0]), spec))
    assert rep.converged and rep.residual < 1e-10
    assert np.max(np.abs(u.values - discretize(Plane([0.5, -1.0]), spec).values)) < 1e-6


def test_zero_data():
    spec = make_grid(2, 1.0, 21)
    u, rep = solve(DirichletProblem(ScalarField(spec, np.zeros(spec.shape))))
    assert np.max(np.abs(u.values)) == 0.0 and rep.iterations == 0


def test_sphere_cap():
    spec = make_grid(2, 1.0, 81)
    u, rep = solve(DirichletProblem.from_profile(SphereCap(2), spec))
    assert rep.converged
    assert np.max(np.abs(u.values - discretize(SphereCap(2), spec).values)) < 5e-3


def test_multistart_agreement():
    spec = make_grid(2, 1.0, 41)
    prob = DirichletProblem.from_profile(SphereCap(2), spec)
    a, _ = solve(prob)
    guesses = [discretize(SphereCap(2), spec), ScalarField(spec, np.full(spec.shape, 1.5))]
    for g in guesses:
        b, rep = solve(DirichletProblem(prob.boundary, g))
        assert rep.residual < 1e-10
        assert np.max(np.abs(a.values - b.values)) < 1e-8


@settings(max_examples=8, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-0.3, 0.3))
def test_sign_equivariance(a1, a2, bend):
    spec = make_grid(2, 1.0, 17)
    x = spec.points()
    data = ScalarField(spec, a1 * x[..., 0] + a2 * x[..., 1] + bend * (x[..., 0] ** 2 - x[..., 1] ** 2))
    prob = DirichletProblem(data)
    u, _ = solve(prob)
    v, _ = solve(prob.negated())
    np.testing.assert_allclose(v.values, -u.values, atol=1e-9)


def test_not_converged():
    spec = make_grid(2, 1.0, 21)
    with pytest.raises(NotConvergedError) as info:
        solve(DirichletProblem.from_profile(SphereCap(2), spec), max_iter=1)
    assert info.value.report.iterations == 1
    assert info.value.best.spec == spec


def test_harmonic_extension_matches_linear():
    spec = make_grid(2, 1.0, 21)
    h = harmonic_extension(DirichletProblem.from_profile(Plane([1.0, 2.0]), spec))
    np.testing.assert_allclose(h.values, discretize(Plane([1.0, 2.0]), spec).values, atol=1e-12)


def test_cross_validate():
    spec = make_grid(2, 1.0, 41)
    u, _ = solve(DirichletProblem.from_profile(Plane([0.3, 0.3]), spec))
    assert max(cross_validate(u, 4).norms().values()) < 1e-8
    prob = DirichletProblem.from_profile(SphereCap(2), spec)
    crude = harmonic_extension(prob)
    assert cross_validate(crude, 4).shrinker_sup > 0.1


def test_cross_validate_second_order():
    reps = []
    for m, margin in ((81, 8), (161, 16)):
        u, _ = solve(DirichletProblem.from_profile(SphereCap(2), make_grid(2, 1.0, m)))
        reps.append(cross_validate(u, margin))
    for key in ("lf_l2", "lh_l2", "eq2_l2"):
        assert 3 <= getattr(reps[0], key) / getattr(reps[1], key) <= 5


def test_report_json(tmp_path):
    spec = make_grid(2, 1.0, 21)
    _, rep = solve(DirichletProblem.from_profile(SphereCap(2), spec))
    rep.write_json(tmp_path / "r.json")
    d = json.loads((tmp_path / "r.json").read_text())
    assert set(d) == {"iterations", "residual", "converged"}
    assert d["converged"] is True
    # quadratic tail
    h = rep.history
    assert h[-1] < 1e-3 * h[-2] or h[-1] < 1e-13
