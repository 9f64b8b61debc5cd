import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from pmelab import (
    BarenblattParams,
    Field,
    Grid,
    GridError,
    InvalidArgument,
    barenblatt_critical_exponent,
    barenblatt_eval,
    barenblatt_field,
    barenblatt_mass,
    barenblatt_residual,
    barenblatt_support_radius,
    barenblatt_threshold,
    ebmeyer_exponent,
    pme_discrete_residual,
    power_profile,
    power_profile_function,
)


def test_params_validation():
    with pytest.raises(InvalidArgument):
        BarenblattParams(1.0)
    with pytest.raises(InvalidArgument):
        BarenblattParams(2.0, d=3)
    with pytest.raises(InvalidArgument):
        BarenblattParams(2.0, a=0.0)


@pytest.mark.parametrize('m', [1.5, 2.0, 3.0])
def test_mass_matches_quadrature(m):
    params = BarenblattParams(m, a=0.7)
    radius = barenblatt_support_radius(params, 0.0)
    value, _ = quad(lambda x: barenblatt_eval(params, 0.0, x), -radius, radius, limit=200)
    assert barenblatt_mass(params) == pytest.approx(value, rel=1e-6)


@pytest.mark.parametrize('t', [0.0, 0.5, 3.0])
def test_mass_is_time_independent(t):
    params = BarenblattParams(2.0)
    radius = barenblatt_support_radius(params, t)
    value, _ = quad(lambda x: barenblatt_eval(params, t, x), -radius, radius, limit=200)
    assert value == pytest.approx(barenblatt_mass(params), rel=1e-6)


def test_support_radius_growth_rate():
    params = BarenblattParams(2.0, d=1)
    times = np.array([1.0, 10.0, 100.0])
    radii = [barenblatt_support_radius(params, t) for t in times]
    slope = np.polyfit(np.log(times + params.gamma_shift), np.log(radii), 1)[0]
    assert slope == pytest.approx(params.k / params.d, rel=0.02)


def test_vanishes_outside_support():
    params = BarenblattParams(3.0)
    radius = barenblatt_support_radius(params, 1.0)
    assert barenblatt_eval(params, 1.0, 1.01 * radius) == 0.0
    assert barenblatt_eval(params, 1.0, 0.5 * radius) > 0.0


def test_support_radius_is_linear_in_amplitude():
    base = barenblatt_support_radius(BarenblattParams(2.0), 0.0)
    assert barenblatt_support_radius(BarenblattParams(2.0, a=3.0), 0.0) == pytest.approx(3.0 * base)


def test_discrete_residual_shrinks_with_refinement():
    params = BarenblattParams(2.0, a=0.1)
    coarse = barenblatt_residual(params, Grid(1, 256), 0.0)
    fine = barenblatt_residual(params, Grid(1, 512), 0.0)
    assert fine < coarse


def test_field_dimension_mismatch():
    with pytest.raises(GridError):
        barenblatt_field(BarenblattParams(2.0, d=2), Grid(1, 64), 0.0)


def test_field_on_planar_grid_is_radial():
    params = BarenblattParams(2.0, d=2, a=0.1)
    field = barenblatt_field(params, Grid(2, 64), 0.0)
    np.testing.assert_allclose(field.values, field.values.T)
    assert field.mass() == pytest.approx(barenblatt_mass(params), rel=0.05)


@given(st.floats(1.05, 6.0), st.floats(1.0, 10.0))
def test_critical_exponent_formula(m, p):
    assert barenblatt_critical_exponent(m, p) == pytest.approx(1.0 / (m - 1.0) + 1.0 / p)


@given(st.floats(1.05, 6.0))
def test_threshold_consistency(m):
    assert barenblatt_threshold(m) == pytest.approx(barenblatt_critical_exponent(m, m + 1.0), rel=1e-12)
    assert ebmeyer_exponent(m) == pytest.approx(2.0 / (m + 1.0))


def test_critical_exponent_at_infinity():
    assert barenblatt_critical_exponent(2.0, math.inf) == 1.0


def test_power_profile_support():
    grid = Grid(1, 256)
    field = power_profile(0.5, grid)
    x = grid.axis()
    assert np.all(field.values[x <= 0.25] == 0.0)
    assert np.all(field.values[x >= 0.96] == 0.0)
    assert np.all(field.values[(x > 0.3) & (x < 0.9)] > 0.0)
    profile = power_profile_function(0.5)
    assert profile(np.array([0.26]))[0] == pytest.approx(0.1)


def test_power_profile_rejects_bad_inputs():
    with pytest.raises(InvalidArgument):
        power_profile_function(0.0)
    with pytest.raises(InvalidArgument):
        power_profile_function(1.0, 1.0, 0.75)
    with pytest.raises(GridError):
        power_profile(1.0, Grid(2, 16))


def test_pme_discrete_residual_of_constant_growth():
    grid = Grid(1, 64)
    before = Field.constant(grid, 1.0)
    after = Field.constant(grid, 1.5)
    assert pme_discrete_residual(before, after, 0.25, 2.0) == pytest.approx(2.0)
    assert pme_discrete_residual(before, before, 0.25, 2.0) == 0.0
    empty = np.zeros(grid.shape, dtype=bool)
    assert pme_discrete_residual(before, after, 0.25, 2.0, mask=empty) == 0.0
    with pytest.raises(GridError):
        pme_discrete_residual(before, Field.constant(Grid(1, 32), 1.0), 0.25, 2.0)
