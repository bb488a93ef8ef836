import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinklab.grid import (
    GridSpec,
    Paraboloid,
    Plane,
    ScalarField,
    Sinusoid,
    SphereCap,
    discretize,
    gradient_fd,
    hessian_fd,
    interior_mask,
    make_grid,
    read_field_csv,
    scaled_margin,
    write_field_csv,
)


def test_make_grid_1d_nodes():
    spec = make_grid(1, 1.0, 5)
    assert spec.spacing == 0.5
    np.testing.assert_allclose(spec.axis, [-1.0, -0.5, 0.0, 0.5, 1.0])


def test_make_grid_2d_count():
    spec = make_grid(2, 2.0, 9)
    assert spec.spacing == 0.5
    assert spec.size == 81
    assert spec.points().shape == (9, 9, 2)


@pytest.mark.parametrize("args", [(1, 1.0, 4), (1, 1.0, 3), (1, 0.0, 5), (1, -1.0, 5), (0, 1.0, 5), (4, 1.0, 5)])
def test_make_grid_rejects(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_origin_is_a_node():
    spec = make_grid(3, 1.0, 7)
    assert spec.axis[3] == 0.0


def test_refined_halves_spacing():
    spec = make_grid(2, 1.0, 11)
    assert spec.refined().spacing == pytest.approx(spec.spacing / 2)
    assert spec.refined().nodes_per_axis == 21


def test_scalar_field_validation():
    spec = make_grid(1, 1.0, 5)
    with pytest.raises(ValueError):
        ScalarField(spec, np.zeros(4))
    with pytest.raises(ValueError):
        ScalarField(spec, np.array([0, 1, np.nan, 0, 0.0]))
    f = ScalarField(spec, np.zeros(5))
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_discretize_plane_1d():
    spec = make_grid(1, 1.0, 9)
    np.testing.assert_allclose(discretize(Plane(3.0), spec).values, 3.0 * spec.axis)


def test_discretize_sphere_cap_origin():
    spec = make_grid(2, 1.0, 11)
    u = discretize(SphereCap(2), spec)
    assert u.values[5, 5] == 2.0


def test_discretize_sphere_cap_outside_domain():
    with pytest.raises(ValueError):
        discretize(SphereCap(2), make_grid(2, 2.5, 11))
    # corner of a 1.5 box sits outside the disk of radius 2
    with pytest.raises(ValueError):
        discretize(SphereCap(2), make_grid(2, 1.5, 11))


def test_discretize_idempotent():
    spec = make_grid(2, 1.0, 21)
    prof = Sinusoid([0.2, 0.1], 0.3, 2.0)
    np.testing.assert_array_equal(discretize(prof, spec).values, discretize(prof, spec).values)


def test_gradient_of_constant_and_linear():
    spec = make_grid(2, 1.0, 9)
    c = ScalarField(spec, np.full(spec.shape, 4.2))
    g0 = gradient_fd(c).values
    assert np.all(g0[1:-1, 1:-1] == 0)
    assert np.max(np.abs(g0)) < 1e-13
    lin = discretize(Plane([0.3, -1.7]), spec)
    g = gradient_fd(lin).values
    np.testing.assert_allclose(g[..., 0], 0.3, atol=1e-13)
    np.testing.assert_allclose(g[..., 1], -1.7, atol=1e-13)


def test_gradient_of_square():
    spec = make_grid(1, 2.0, 9)
    f = ScalarField(spec, spec.axis**2)
    np.testing.assert_allclose(gradient_fd(f).values[1:-1, 0], 2 * spec.axis[1:-1], atol=1e-13)


def test_hessian_cross_term():
    spec = make_grid(2, 1.0, 9)
    x = spec.points()
    H = hessian_fd(ScalarField(spec, x[..., 0] * x[..., 1]))
    inner = (slice(1, -1), slice(1, -1))
    np.testing.assert_allclose(H[inner][..., 0, 1], 1.0, atol=1e-12)
    np.testing.assert_allclose(H[inner][..., 1, 0], 1.0, atol=1e-12)
    np.testing.assert_allclose(H[inner][..., 0, 0], 0.0, atol=1e-12)
    np.testing.assert_allclose(H[inner][..., 1, 1], 0.0, atol=1e-12)


def test_hessian_of_linear_and_constant_vanish():
    spec = make_grid(2, 1.0, 9)
    for f in (discretize(Plane([1.0, 2.0]), spec), ScalarField(spec, np.ones(spec.shape))):
        assert np.max(np.abs(hessian_fd(f))) < 1e-11


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-3, 3), min_size=10, max_size=10),
    st.integers(1, 3),
)
def test_quadratics_differentiated_exactly(coef, dim):
    spec = make_grid(dim, 1.0, 7)
    x = spec.points()
    c0, lin, quad = coef[0], np.array(coef[1:4])[:dim], np.array(coef[4:10])
    Q = np.zeros((dim, dim))
    iu = np.triu_indices(dim)
    Q[iu] = quad[: len(iu[0])]
    Q = Q + Q.T
    vals = c0 + x @ lin + 0.5 * np.einsum("...i,ij,...j->...", x, Q, x)
    f = ScalarField(spec, vals)
    grad = gradient_fd(f).values
    hess = hessian_fd(f)
    exact_grad = lin + x @ Q
    scale = 1 + np.abs(coef).max()
    # polynomial exactness includes the second-order one-sided edges
    np.testing.assert_allclose(grad, exact_grad, atol=1e-12 * scale * 10)
    np.testing.assert_allclose(hess, np.broadcast_to(Q, hess.shape), atol=1e-10 * scale)


def _fd_errors(m):
    spec = make_grid(2, 1.0, m)
    x = spec.points()
    f = ScalarField(spec, np.sin(x[..., 0]) * np.cos(0.5 * x[..., 1]))
    mask = interior_mask(spec, scaled_margin(spec, 2, 21))
    g_exact = np.stack([np.cos(x[..., 0]) * np.cos(0.5 * x[..., 1]), -0.5 * np.sin(x[..., 0]) * np.sin(0.5 * x[..., 1])], -1)
    h11 = -np.sin(x[..., 0]) * np.cos(0.5 * x[..., 1])
    h12 = -0.5 * np.cos(x[..., 0]) * np.sin(0.5 * x[..., 1])
    g_err = np.max(np.abs(gradient_fd(f).values - g_exact)[mask])
    H = hessian_fd(f)
    h_err = max(np.max(np.abs(H[..., 0, 0] - h11)[mask]), np.max(np.abs(H[..., 0, 1] - h12)[mask]))
    return g_err, h_err


def test_second_order_convergence():
    g1, h1 = _fd_errors(21)
    g2, h2 = _fd_errors(41)
    assert 3.4 <= g1 / g2 <= 4.6
    assert 3.4 <= h1 / h2 <= 4.6


def test_interior_mask_counts():
    spec = make_grid(2, 1.0, 9)
    assert interior_mask(spec, 0).sum() == 81
    assert interior_mask(spec, 1).sum() == 49
    with pytest.raises(ValueError):
        interior_mask(spec, 4)


def test_scaled_margin():
    assert scaled_margin(make_grid(2, 1.0, 321), 10, 161) == 20


def test_profiles():
    x = np.array([[1.0, 2.0]])
    assert Plane(2.0)(x)[0] == 2.0
    assert Plane([1.0, 1.0])(x)[0] == 3.0
    assert Paraboloid(0.5)(x)[0] == 2.5
    assert SphereCap(2)(np.zeros((1, 2)))[0] == 2.0
    assert Sinusoid(0.0, 1.0, 1.0)(x)[0] == pytest.approx(math.sin(1.0))
    with pytest.raises(ValueError):
        Plane([1.0, 2.0, 3.0])(x)


def test_field_csv_roundtrip(tmp_path):
    spec = make_grid(2, 1.0, 5)
    f = discretize(Paraboloid(1.0), spec)
    path = tmp_path / "field.csv"
    write_field_csv(f, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x1,x2,value"
    assert len(lines) == 26
    # row-major: second coordinate varies fastest
    assert lines[1].split(",")[:2] == ["-1", "-1"]
    assert lines[2].split(",")[:2] == ["-1", "-0.5"]
    back = read_field_csv(path)
    assert back.spec == spec
    np.testing.assert_array_equal(back.values, f.values)


def test_gridspec_is_frozen():
    spec = make_grid(1, 1.0, 5)
    with pytest.raises(Exception):
        spec.dim = 2
    assert isinstance(spec, GridSpec)
