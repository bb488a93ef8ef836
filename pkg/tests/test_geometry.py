import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinklab.geometry import (
    compute_geometry,
    eq2_residual,
    gaussian_weight,
    identity_report,
    l_apply,
    laplace_beltrami,
    lf_residual,
    lh_residual,
    shrinker_residual,
    tangential_gradient,
)
from shrinklab.grid import Paraboloid, Plane, ScalarField, SphereCap, discretize, interior_mask, make_grid


@pytest.fixture(scope="module")
def tilted():
    spec = make_grid(2, 2.0, 41)
    return discretize(Plane([0.6, -0.8]), spec)


def test_plane_geometry(tilted):
    g = compute_geometry(tilted)
    np.testing.assert_allclose(g.v, np.sqrt(2.0), rtol=1e-13)
    np.testing.assert_allclose(g.f, 1 / np.sqrt(2.0), rtol=1e-13)
    assert np.max(np.abs(g.H)) < 1e-12
    assert np.max(g.a_norm_sq) < 1e-20


def test_plane_identities_vanish(tilted):
    g = compute_geometry(tilted)
    mask = interior_mask(tilted.spec, 2)
    for r in (shrinker_residual(tilted, g), eq2_residual(g), lf_residual(g)):
        assert np.max(np.abs(r.values[mask])) < 1e-10
    rep = identity_report(tilted, 2)
    assert max(rep.norms().values()) < 1e-10


def test_sphere_cap_curvatures(cap161):
    g = compute_geometry(cap161)
    mask = interior_mask(cap161.spec, 10)
    assert np.max(np.abs(g.H[mask] - 1.0)) < 1e-3
    assert np.max(np.abs(g.a_norm_sq[mask] - 0.5)) < 1e-3


def test_paraboloid_at_origin():
    spec = make_grid(2, 1.0, 21)
    u = discretize(Paraboloid(1.0), spec)
    x1sq = ScalarField(spec, spec.points()[..., 0] ** 2)
    g = compute_geometry(x1sq)
    assert g.H[10, 10] == pytest.approx(-2.0, abs=1e-12)
    assert g.a_norm_sq[10, 10] == pytest.approx(4.0, abs=1e-12)
    assert shrinker_residual(x1sq, g).values[10, 10] == pytest.approx(2.0, abs=1e-12)
    assert identity_report(u, 2).shrinker_sup > 0.5


def test_x1_squared_log_density_residual():
    # vanishes at the origin where the tangent plane is horizontal, but not nearby
    vals = []
    for m in (41, 81):
        spec = make_grid(2, 1.0, m)
        g = compute_geometry(ScalarField(spec, spec.points()[..., 0] ** 2))
        r = eq2_residual(g).values
        i0 = (m - 1) // 2
        vals.append((abs(r[i0, i0]), abs(r[i0 + (m - 1) // 4, i0]), np.max(np.abs(r[interior_mask(spec, 2)]))))
    assert vals[1][0] < vals[0][0]
    assert vals[1][1] > 1.0
    assert vals[1][2] > 1.0


def test_normal_unit_and_f_range(cap161):
    g = compute_geometry(cap161)
    assert np.max(np.abs(np.linalg.norm(g.normal.values, axis=-1) - 1)) < 1e-12
    assert np.all((g.f > 0) & (g.f <= 1))


def test_h_squared_bounded_by_n_a2(cap161):
    for u in (cap161, discretize(Paraboloid(0.7), make_grid(2, 1.5, 31))):
        g = compute_geometry(u)
        assert np.all(g.H**2 <= u.spec.dim * g.a_norm_sq + 1e-9)


def test_residual_forms_agree_on_rough_field(rng):
    spec = make_grid(2, 1.0, 21)
    u = ScalarField(spec, rng.normal(size=spec.shape))
    shrinker_residual(u)  # raises if the two forms drift apart


def test_laplace_beltrami_flat():
    spec = make_grid(2, 1.0, 21)
    g = compute_geometry(ScalarField(spec, np.zeros(spec.shape)))
    phi = ScalarField(spec, spec.points()[..., 0] ** 2)
    lap = laplace_beltrami(g, phi).values
    np.testing.assert_allclose(lap[interior_mask(spec, 2)], 2.0, atol=1e-10)


def test_constant_has_no_derivatives(cap161):
    g = compute_geometry(cap161)
    c = np.full(cap161.spec.shape, 3.0)
    assert np.max(np.abs(laplace_beltrami(g, c).values)) < 1e-10
    tg = tangential_gradient(g, np.zeros(cap161.spec.shape + (2,)))
    assert np.all(tg.norm_sq == 0)


def test_laplace_beltrami_of_height_on_sphere(cap161):
    # Delta_Sigma of the height is -H times the vertical normal component: -u/2 on this sphere
    g = compute_geometry(cap161)
    mask = interior_mask(cap161.spec, 10)
    lap = laplace_beltrami(g, cap161).values
    oracle = -cap161.values / 2.0
    assert np.max(np.abs(lap[mask] / oracle[mask] - 1)) < 0.02


def test_l_on_constant_flat():
    spec = make_grid(2, 1.0, 21)
    g = compute_geometry(discretize(Plane(0.0), spec))
    np.testing.assert_allclose(l_apply(g, np.full(spec.shape, 3.0)).values, 1.5, atol=1e-12)


def test_cap_identities_converge(cap161):
    spec = cap161.spec
    fine = discretize(SphereCap(2), spec.refined())
    for res in (lf_residual, lh_residual, eq2_residual):
        a = np.max(np.abs(res(compute_geometry(cap161)).values[interior_mask(spec, 10)]))
        b = np.max(np.abs(res(compute_geometry(fine)).values[interior_mask(fine.spec, 20)]))
        assert a / b > 3


@settings(max_examples=25, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2**31 - 1))
def test_l_apply_is_linear(a, b, seed):
    spec = make_grid(2, 1.0, 17)
    g = compute_geometry(discretize(SphereCap(2), spec))
    r = np.random.default_rng(seed)
    phi, psi = r.normal(size=spec.shape), r.normal(size=spec.shape)
    lhs = l_apply(g, a * phi + b * psi).values
    rhs = a * l_apply(g, phi).values + b * l_apply(g, psi).values
    scale = np.max(np.abs(a * l_apply(g, phi).values)) + np.max(np.abs(b * l_apply(g, psi).values)) + 1e-300
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


def test_gaussian_weight_at_origin(cap161):
    g = compute_geometry(cap161)
    # origin of the base sits at height 2 on the cap
    assert gaussian_weight(g)[80, 80] == pytest.approx(np.exp(-1.0))


def test_identity_report_dict(cap161):
    d = identity_report(cap161, 10).to_dict()
    for key in ("shrinker_sup", "shrinker_l2", "lf_l2", "lh_l2", "eq2_l2", "margin", "h"):
        assert key in d
