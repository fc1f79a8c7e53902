import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from gdsplit import GOLDEN_STABLE, GOLDEN_UNSTABLE, build_circle_map_g, build_rotation, build_toral
from gdsplit.errors import DimensionError, InfeasibleProfileError, ParameterError
from gdsplit.systems import (
    ProductSystem,
    closed_form_log_derivative,
    orbit,
    orbit_array,
    reduce_mod1,
    sin_power_mean,
    solve_bump_exponent,
)

LOG_U = math.log(GOLDEN_UNSTABLE)


@pytest.fixture(scope="module")
def g():
    return build_circle_map_g()


def test_golden_constants():
    assert GOLDEN_STABLE * GOLDEN_UNSTABLE == pytest.approx(1.0, abs=1e-12)
    assert math.log(GOLDEN_STABLE) + math.log(GOLDEN_UNSTABLE) == pytest.approx(0.0, abs=1e-12)


def test_sin_power_mean_matches_wallis():
    assert sin_power_mean(3) == pytest.approx(5 / 16, abs=1e-14)
    assert sin_power_mean(4) == pytest.approx(35 / 128, abs=1e-14)
    numeric = quad(lambda t: math.sin(math.pi * t) ** 7.3, 0, 1, epsabs=1e-14)[0]
    assert sin_power_mean(3.65) == pytest.approx(numeric, abs=1e-12)


def test_bump_exponent_bracketed(g):
    target = (1 - GOLDEN_STABLE) / (GOLDEN_UNSTABLE - GOLDEN_STABLE)
    assert target == pytest.approx((5 - math.sqrt(5)) / 10, abs=1e-15)
    assert 3 < g.p < 4
    assert abs(sin_power_mean(g.p) - target) <= 1e-12


def test_derivative_integrates_to_one(g):
    total = quad(g.derivative, 0, 1, epsabs=1e-13, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-11)


def test_endpoint_and_midpoint_values(g):
    assert g.g(np.array([0.0, 0.5, 1.0])).tolist() == [0.0, 0.5, 1.0]
    assert g.derivative(0.0) == pytest.approx(GOLDEN_STABLE, abs=1e-15)
    assert g.derivative(0.5) == pytest.approx(GOLDEN_UNSTABLE, abs=1e-15)
    assert g.derivative(1.0) == pytest.approx(GOLDEN_STABLE, abs=1e-15)


def test_g_matches_quadrature(g):
    xs = np.linspace(0, 1, 37)[1:-1] + 0.003
    ref = np.array([quad(g.derivative, 0, x, epsabs=1e-14)[0] for x in xs])
    assert np.max(np.abs(g.g(xs) - ref)) < 1e-12


def test_sign_conditions_and_monotonicity(g):
    m = g.table_resolution
    x = np.arange(1, m) / m
    y = g.g(x)
    left, right = x < 0.5, x > 0.5
    assert np.min(x[left] - y[left]) > 0
    assert np.min(y[right] - x[right]) > 0
    assert np.all(np.diff(g.table) > 0)
    nodes = np.arange(m + 1) / m
    assert np.array_equal(g.g(nodes), g.table)


def test_mirror_symmetry(g):
    x = np.linspace(0.01, 0.49, 101)
    assert np.max(np.abs(g.g(1 - x) - (1 - g.g(x)))) < 1e-15


def test_derivative_bounds(g):
    x = np.linspace(0, 1, 10001)
    d = g.derivative(x)
    assert d.min() >= GOLDEN_STABLE - 1e-15 and d.max() <= GOLDEN_UNSTABLE + 1e-15


def test_smoothness_label(g):
    assert g.smoothness == "C^8"


@pytest.mark.parametrize("alpha,beta", [(1.0, 1.0), (0.5, 0.9), (1.2, 3.0)])
def test_infeasible_profiles(alpha, beta):
    with pytest.raises(InfeasibleProfileError):
        build_circle_map_g(alpha, beta)


def test_solve_bump_exponent_rejects_targets():
    with pytest.raises(InfeasibleProfileError):
        solve_bump_exponent(1.5)


def test_circle_eval_examples(g):
    sys1 = ProductSystem([g])
    assert sys1.eval([0.5]).tolist() == [0.5]
    rot = ProductSystem([build_rotation([0.25])])
    assert rot.eval([0.9])[0] == pytest.approx(0.15, abs=1e-15)


def test_reduce_mod1_maps_one_to_zero():
    out = reduce_mod1(np.array([1.0, -0.25, 2.5, 1 - 1e-17]))
    assert out.tolist() == [0.0, 0.75, 0.5, 0.0]
    assert np.all((out >= 0) & (out < 1))


def test_cat_map_eigen_data():
    h = build_toral([[2, 1], [1, 1]])
    assert h.stable_eigenvalues[0] == pytest.approx(GOLDEN_STABLE, abs=1e-15)
    assert h.unstable_eigenvalues[0] == pytest.approx(GOLDEN_UNSTABLE, abs=1e-15)
    a = np.asarray(h.matrix, dtype=float)
    for v, lam in ((h.stable_frame[:, 0], GOLDEN_STABLE), (h.unstable_frame[:, 0], GOLDEN_UNSTABLE)):
        assert np.max(np.abs(a @ v - lam * v)) < 1e-12
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-15)
    assert math.log(h.stable_eigenvalues[0]) + math.log(h.unstable_eigenvalues[0]) == pytest.approx(0, abs=1e-12)
    assert h.eval([0.0, 0.0]).tolist() == [0.0, 0.0]


@pytest.mark.parametrize("matrix", [[[2, 0], [0, 1]], [[1, 2], [3, 4], [5, 6]], [[1.5, 0], [0, 1]]])
def test_invalid_toral_matrices(matrix):
    with pytest.raises(ParameterError):
        build_toral(matrix)


def test_example_jacobians(ex31):
    j0 = ex31.jacobian([0.0, 0.3, 0.6])
    assert j0[0, 0] == pytest.approx(GOLDEN_STABLE, abs=1e-15)
    assert np.array_equal(j0[1:, 1:], [[2, 1], [1, 1]])
    assert np.count_nonzero(j0[0, 1:]) == 0 and np.count_nonzero(j0[1:, 0]) == 0
    assert ex31.jacobian([0.5, 0.1, 0.2])[0, 0] == pytest.approx(GOLDEN_UNSTABLE, abs=1e-15)


@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=3, max_size=3))
def test_jacobian_inverse_is_inverse(ex31, x):
    prod = ex31.jacobian_inverse(x) @ ex31.jacobian(x)
    assert np.max(np.abs(prod - np.eye(3))) < 1e-12


def test_rotation_jacobian_identity():
    rot = ProductSystem([build_rotation([0.1, 0.7])])
    assert np.array_equal(rot.jacobian([0.3, 0.4]), np.eye(2))


def test_periodic_cycle_jacobian_product():
    rot = ProductSystem([build_rotation([0.25, 0.5])])
    x = np.array([0.1, 0.2])
    prod = np.eye(2)
    for p in orbit(rot, x, 4):
        prod = rot.jacobian_inverse(rot.eval(p)) @ prod @ rot.jacobian(p)
    assert np.max(np.abs(prod - np.eye(2))) < 1e-9
    assert np.allclose(orbit_array(rot, x, 4)[-1], x, atol=1e-15)


def test_orbit_examples(g):
    rot = ProductSystem([build_rotation([0.25])])
    assert [float(p[0]) for p in orbit(rot, [0.0], 4)] == [0.0, 0.25, 0.5, 0.75, 0.0]
    pts = orbit_array(ProductSystem([g]), [0.25], 60)[:, 0]
    assert np.all(np.diff(pts) < 0) and pts[-1] < 1e-10
    cat = ProductSystem([build_toral([[2, 1], [1, 1]])])
    assert np.count_nonzero(orbit_array(cat, [0.0, 0.0], 5)) == 0


def test_orbit_is_streamed():
    rot = ProductSystem([build_rotation([0.1])])
    it = orbit(rot, [0.0], 10**12)
    assert next(it)[0] == 0.0 and next(it)[0] == pytest.approx(0.1)


def test_closed_form_log_derivative(ex31):
    assert closed_form_log_derivative(ex31, "g", [0.0, 0.1, 0.2], 7) == pytest.approx(7 * math.log(GOLDEN_STABLE))
    assert closed_form_log_derivative(ex31, 0, [0.5, 0.1, 0.2], 7) == pytest.approx(7 * LOG_U)
    rot = ProductSystem([("r", build_rotation([0.3]))])
    assert closed_form_log_derivative(rot, "r", [0.2], 11) == 0.0
    with pytest.raises(DimensionError):
        closed_form_log_derivative(ex31, "h", [0.0, 0.1, 0.2], 3)


def test_product_structure(ex31):
    assert ex31.d == 3 and list(ex31.names) == ["g", "h"]
    assert ex31.varying_axes.tolist() == [True, False, False]
    assert ex31.sup_norm_bound() == pytest.approx(GOLDEN_UNSTABLE, abs=1e-15)
    x = np.array([[0.3, 0.2, 0.9]])
    full, varying = ex31.map_batch(x), ex31.map_varying_batch(x)
    assert full[0, 0] == varying[0, 0]
