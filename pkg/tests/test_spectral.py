import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import gamma as gamma_function

from pmelab import (
    BesovProfile,
    Boundary,
    Field,
    Grid,
    GridError,
    InvalidArgument,
    Trajectory,
    barenblatt_field,
    BarenblattParams,
    besov_equivalent_norm,
    besov_profile,
    besov_profile_in_time,
    critical_exponent_estimate,
    default_fit_window,
    nikolskii_seminorm,
    power_profile,
    rescale_field,
    slobodeckij_constant,
    slobodeckij_seminorm,
)


@pytest.mark.parametrize('beta, p', [(0.5, 2.0), (1.0, 2.0), (1.0, 1.5)])
def test_power_profile_calibration(beta, p):
    profile = besov_profile(power_profile(beta, Grid(1, 4096)), p, mean_free=True)
    fit = critical_exponent_estimate(profile)
    assert not fit.capped
    assert fit.s_hat == pytest.approx(beta + 1.0 / p, abs=0.15)


def test_barenblatt_profile_exponent():
    grid = Grid(1, 4096)
    params = BarenblattParams(2.0, a=0.05)
    profile = besov_profile(barenblatt_field(params, grid, 0.0), 2.0, mean_free=True)
    assert critical_exponent_estimate(profile).s_hat == pytest.approx(1.5, abs=0.15)


@given(st.floats(1e-3, 1e3))
def test_estimate_is_scale_invariant(factor):
    profile = besov_profile(power_profile(0.5, Grid(1, 1024)), 2.0)
    base = critical_exponent_estimate(profile)
    scaled = critical_exponent_estimate(profile.scaled(factor))
    assert scaled.s_hat == pytest.approx(base.s_hat, abs=1e-9)


def test_smooth_field_is_capped(wave):
    fit = critical_exponent_estimate(besov_profile(wave))
    assert fit.capped
    assert fit.s_hat == fit.cap == besov_profile(wave).jmax / 2.0


def test_degenerate_window():
    profile = besov_profile(power_profile(0.5, Grid(1, 1024)))
    with pytest.raises(InvalidArgument):
        critical_exponent_estimate(profile, (2, 3))
    with pytest.raises(InvalidArgument):
        critical_exponent_estimate(profile, (5, 50))


def test_default_window():
    assert default_fit_window(9) == (3, 6)
    assert default_fit_window(13) == (5, 8)


@pytest.mark.parametrize('jmax, window', [(3, (0, 3)), (7, (3, 6)), (8, (3, 6)), (10, (4, 7))])
def test_default_window_keeps_four_blocks(jmax, window):
    assert default_fit_window(jmax) == window


def test_profile_rejects_dirichlet_and_small_p():
    dirichlet = Field.zeros(Grid(1, 64, 1.0, Boundary.dirichlet))
    with pytest.raises(GridError):
        besov_profile(dirichlet)
    with pytest.raises(InvalidArgument):
        besov_profile(Field.zeros(Grid(1, 64)), 0.5)


def test_profile_entries(tmp_path, wave):
    profile = besov_profile(wave, math.inf)
    assert list(profile.blocks) == list(range(profile.jmax + 1))
    assert profile.norm(0) == pytest.approx(1.0, abs=1e-9)
    profile.write_csv(tmp_path / 'profile.csv')
    assert (tmp_path / 'profile.csv').read_text(encoding='utf-8').startswith('j,blocknorm\n')
    with pytest.raises(InvalidArgument):
        BesovProfile(2.0, [(1, 1.0), (0, 1.0)])


def test_profile_in_time(wave):
    trajectory = Trajectory([0.0, 1.0, 2.0], [wave, wave, wave])
    in_time = besov_profile_in_time(trajectory, 2.0)
    single = besov_profile(wave, 2.0)
    np.testing.assert_allclose(in_time.norms, math.sqrt(2.0) * single.norms, rtol=1e-12, atol=1e-15)


def test_slobodeckij_constant():
    s = 0.25
    a = 2.0 * s
    expected = 4.0 * gamma_function(1.0 - a) * math.cos(math.pi * a / 2.0) / a
    assert slobodeckij_constant(s) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(InvalidArgument):
        slobodeckij_constant(1.0)


def test_slobodeckij_homogeneity(wave):
    base = slobodeckij_seminorm(wave, 0.4, 2.0)
    assert base > 0.0
    assert slobodeckij_seminorm(2.0 * wave, 0.4, 2.0) == pytest.approx(4.0 * base, rel=1e-12)
    assert slobodeckij_seminorm(Field.constant(wave.grid, 1.0), 0.4) == 0.0


def test_slobodeckij_is_equivalent_to_besov():
    grid = Grid(1, 256)
    field = Field.from_function(grid, lambda x: np.sin(2.0 * np.pi * 8 * x))
    direct = slobodeckij_seminorm(field, 0.3, 2.0)
    spectral = besov_equivalent_norm(besov_profile(field, 2.0, mean_free=True), 0.3)
    assert 0.25 < direct / spectral < 4.0


def test_slobodeckij_planar():
    grid = Grid(2, 16)
    field = Field.from_function(grid, lambda x, y: np.sin(2.0 * np.pi * x) * np.cos(2.0 * np.pi * y))
    assert slobodeckij_seminorm(field, 0.5, 2.0) > 0.0


def test_nikolskii_seminorm(wave):
    value, shift = nikolskii_seminorm(wave, 0.5, 2.0)
    assert value > 0.0
    assert 0.0 < shift <= 0.5
    assert nikolskii_seminorm(Field.constant(wave.grid, 2.0), 0.5) == (0.0, 0.0)
    with pytest.raises(InvalidArgument):
        nikolskii_seminorm(wave, 1.0)
    with pytest.raises(GridError):
        nikolskii_seminorm(Field.zeros(Grid(2, 16)), 0.5)


@pytest.mark.parametrize('eta', [0.5, 2.0, 3.0])
def test_rescaling_identity(eta):
    m, s, p = 2.0, 0.5, 2.0
    grid = Grid(1, 512)
    u = barenblatt_field(BarenblattParams(m, a=0.05), grid, 0.0)
    scaled = rescale_field(u, eta, m)
    assert scaled.grid.length == pytest.approx(1.0 / eta)
    ratio = nikolskii_seminorm(scaled, s, p)[0] / nikolskii_seminorm(u, s, p)[0]
    assert math.log(ratio) / math.log(eta) == pytest.approx(-2.0 * p / m + s * p - 1.0, rel=1e-9)


def test_rescale_validation(wave):
    with pytest.raises(InvalidArgument):
        rescale_field(wave, 0.0, 2.0)
