import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pmelab import (
    Field,
    Grid,
    GridError,
    InvalidArgument,
    PMEProblem,
    PsiKind,
    SpaceTimeGrid,
    SymbolDescriptor,
    VGrid,
    apply_symbol,
    bump,
    dv_symbol_bound,
    fit_dv_bound,
    fit_nondegeneracy,
    microlocal_decompose,
    nondegeneracy_measure,
    omega_slice,
    solve_pme,
    space_time_kinetic,
    symbol_dv,
    symbol_eval,
    symbol_multiplier,
    truncation_multiplier,
)

JS = [4.0, 8.0, 16.0, 32.0]
DELTAS = [0.1, 0.5, 1.0, 2.0]


def test_descriptor_validation():
    with pytest.raises(InvalidArgument):
        SymbolDescriptor.porous_medium(1.0)
    with pytest.raises(InvalidArgument):
        SymbolDescriptor.anisotropic([1.0, 1.0])
    with pytest.raises(InvalidArgument):
        SymbolDescriptor.anisotropic([2.0, 3.0], [1.0])
    with pytest.raises(InvalidArgument):
        SymbolDescriptor(3, diffusion=[])


def test_symbol_values():
    pme = SymbolDescriptor.porous_medium(2.0)
    assert symbol_eval(pme, 3.0, 2.0, 0.5) == pytest.approx(4.0 + 3.0j)
    assert abs(symbol_eval(pme, 3.0, 2.0, 0.5)) == pytest.approx(5.0)
    assert symbol_dv(pme, 3.0, 2.0, -0.5) == pytest.approx(-8.0 + 0.0j)

    aniso = SymbolDescriptor.anisotropic([2.0, 3.0], [1.0, 2.0])
    assert aniso.has_drift and not aniso.isotropic
    assert symbol_eval(aniso, 0.0, [1.0, 1.0], 1.0) == pytest.approx(5.0 + 3.0j)
    with pytest.raises(InvalidArgument):
        symbol_eval(aniso, 0.0, 1.0, 1.0)


@given(st.floats(-50.0, 50.0), st.floats(-20.0, 20.0), st.floats(-2.0, 2.0))
def test_real_part_dominates_diffusion(tau, xi, v):
    value = symbol_eval(SymbolDescriptor.porous_medium(3.0), tau, xi, v)
    assert value.real >= 0.0
    assert abs(value) >= 3.0 * v * v * xi * xi * (1.0 - 1e-12)


def test_heat_and_transport():
    heat = SymbolDescriptor.heat()
    assert symbol_eval(heat, 0.0, 3.0, 0.7) == pytest.approx(9.0)
    assert symbol_dv(heat, 1.0, 3.0, 0.7) == 0.0
    transport = SymbolDescriptor.transport()
    assert omega_slice(transport, 0.0, 5.0, 0.1, (-1.0, 1.0)) == pytest.approx(2.0)
    assert omega_slice(transport, 1.0, 5.0, 0.1, (-1.0, 1.0)) == 0.0


@pytest.mark.parametrize('m', [1.5, 2.0, 3.0])
def test_pme_omega(m):
    desc = SymbolDescriptor.porous_medium(m)
    J, delta = 8.0, 1.0
    expected = 2.0 * (4.0 * delta / (m * J * J)) ** (1.0 / (m - 1.0))
    assert nondegeneracy_measure(desc, J, delta, (-1.0, 1.0)) == pytest.approx(expected, rel=1e-9)


def test_omega_slice_interval_check():
    with pytest.raises(InvalidArgument):
        omega_slice(SymbolDescriptor.porous_medium(2.0), 0.0, 1.0, 1.0, (1.0, -1.0))


@pytest.mark.parametrize('m', [2.0, 3.0])
def test_fit_nondegeneracy(m):
    fit = fit_nondegeneracy(SymbolDescriptor.porous_medium(m), JS, DELTAS, (-1.0, 1.0))
    assert fit.alpha == pytest.approx(1.0 / (m - 1.0), rel=1e-6)
    assert fit.beta == pytest.approx(2.0, rel=1e-6)
    assert fit.used == len(JS) * len(DELTAS)
    assert len(fit.table) == len(JS) * len(DELTAS)


def test_fit_needs_unsaturated_cells():
    with pytest.raises(InvalidArgument):
        fit_nondegeneracy(SymbolDescriptor.transport(), JS, DELTAS, (-1.0, 1.0))


def test_dv_bound_is_linear_in_delta():
    desc = SymbolDescriptor.porous_medium(2.0)
    assert dv_symbol_bound(desc, 8.0, 0.5, 1.0, (-1.0, 1.0)) == pytest.approx(0.5, rel=1e-6)
    fit = fit_dv_bound(desc, JS, DELTAS, 1.0, (-1.0, 1.0))
    assert fit.lam == pytest.approx(0.0, abs=1e-6)
    assert fit.mu == pytest.approx(1.0, rel=1e-6)
    assert fit.constant == pytest.approx(1.0, rel=1e-5)


def test_dv_bound_vanishes_for_heat():
    fit = fit_dv_bound(SymbolDescriptor.heat(), JS, DELTAS, 1.0, (-1.0, 1.0))
    assert (fit.lam, fit.mu, fit.used) == (0.0, 0.0, 0)


WIDE_DELTAS = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0]
ANISO_SLICES = {'n_xi': 5, 'n_tau': 6, 'n_dir': 6}


@pytest.mark.parametrize('m', [1.5, 2.0, 3.0])
def test_dv_bound_fit_matches_pme_exponents(m):
    gamma = 0.9
    desc = SymbolDescriptor.porous_medium(m)
    fit = fit_dv_bound(desc, JS, WIDE_DELTAS, gamma, (-1.0, 1.0))
    lam = 2.0 - 2.0 * (m - 2.0 + gamma) / (m - 1.0)
    mu = (m - 2.0 + gamma) / (m - 1.0)
    assert abs(fit.lam - lam) / lam < 0.1
    assert abs(fit.mu - mu) / mu < 0.1
    assert 6 <= fit.used < len(fit.table)

    envelope = fit_dv_bound(desc, JS, WIDE_DELTAS, gamma, (-1.0, 1.0), envelope=True)
    assert abs(envelope.lam - lam) / lam < 0.1


def test_dv_bound_fit_rejects_punctured_cells():
    # at m = 1.5 the Ω radius (δ/(6J²))² sinks below the puncture for most of this grid
    with pytest.raises(InvalidArgument):
        fit_dv_bound(SymbolDescriptor.porous_medium(1.5), JS, [0.01, 0.1, 1.0], 0.9, (-1.0, 1.0))


def test_dv_bound_fit_tolerates_even_sampling():
    desc = SymbolDescriptor.porous_medium(1.5)
    fit = fit_dv_bound(desc, JS, WIDE_DELTAS, 0.9, (-1.0, 1.0), samples=1024)
    assert abs(fit.lam - 0.4) / 0.4 < 0.1


def test_anisotropic_envelope_matches_formula():
    gamma = 0.9
    desc = SymbolDescriptor.anisotropic([2.0, 3.0], [2.0, 3.0])
    formula = 2.0 - 2.0 * (2.0 - 2.0 + gamma) / (3.0 - 1.0)
    assert formula == pytest.approx(1.1)
    fit = fit_dv_bound(desc, [32.0, 64.0, 128.0, 256.0], [0.05, 0.2, 0.8], gamma, (-1.0, 1.0), envelope=True,
                       **ANISO_SLICES)
    assert fit.used == 12
    assert abs(fit.lam - formula) / formula < 0.1


def test_anisotropic_sharp_bound_sits_below_envelope():
    gamma = 0.9
    desc = SymbolDescriptor.anisotropic([2.0, 3.0], [2.0, 3.0])
    sharp = dv_symbol_bound(desc, 8.0, 0.2, gamma, (-1.0, 1.0), **ANISO_SLICES)
    envelope = dv_symbol_bound(desc, 8.0, 0.2, gamma, (-1.0, 1.0), envelope=True, **ANISO_SLICES)
    assert 0.0 < sharp <= envelope

    # the sup sits on the m = 2 axis at |ξ| = 2J, so the sharp exponents are 2(1-γ) and γ
    fit = fit_dv_bound(desc, [4.0, 8.0, 16.0], [0.05, 0.2, 0.8], gamma, (-1.0, 1.0), **ANISO_SLICES)
    assert abs(fit.lam - 2.0 * (1.0 - gamma)) / (2.0 * (1.0 - gamma)) < 0.1
    assert abs(fit.mu - gamma) / gamma < 0.1
    assert fit.lam < 1.1


def test_space_time_grid():
    st_grid = SpaceTimeGrid(Grid(1, 16), 8, 2.0)
    assert st_grid.shape == (8, 16)
    window = st_grid.window()
    assert window[0] == 0.0
    assert window[4] == pytest.approx(1.0)
    with pytest.raises(GridError):
        SpaceTimeGrid(Grid(1, 16, 1.0, 'dirichlet'), 8, 1.0)
    with pytest.raises(InvalidArgument):
        SpaceTimeGrid(Grid(1, 16), 2, 1.0)


def test_odd_frequencies_drop_nyquist():
    st_grid = SpaceTimeGrid(Grid(1, 16), 8, 2.0)
    tau, xi = st_grid.frequencies()
    odd_tau, odd_xi = st_grid.frequencies(odd=True)
    assert tau[4, 0] == pytest.approx(-4.0 * math.pi)
    assert odd_tau[4, 0] == 0.0
    assert xi[0, 8, 0] == pytest.approx(-16.0 * math.pi)
    assert odd_xi[0, 8, 0] == 0.0
    np.testing.assert_array_equal(np.delete(odd_tau.ravel(), 4), np.delete(tau.ravel(), 4))


def test_multiplier_skips_zero_symbol():
    st_grid = SpaceTimeGrid(Grid(1, 16), 8, 1.0)
    weights, skipped = symbol_multiplier(st_grid, SymbolDescriptor.transport(), PsiKind.ball_divided, 1.0, 0, 0.3)
    assert skipped == 32
    assert np.all(weights[0] == 0.0)
    assert np.all(weights[4] == 0.0)
    weights, skipped = symbol_multiplier(st_grid, SymbolDescriptor.transport(), PsiKind.ball, 1.0, 0, 0.3)
    assert skipped == 0
    assert np.all(weights[0] == 1.0)


@pytest.fixture(scope='module')
def kinetic_data():
    grid = Grid(1, 32)
    u0 = Field.from_function(grid, lambda x: bump(np.abs(x - 0.5) / 0.3))
    trajectory = solve_pme(PMEProblem(2.0, grid, u0, t_end=0.005))
    vgrid = VGrid.covering(trajectory, 12)
    st_grid, data = space_time_kinetic(trajectory, vgrid, 16)
    return st_grid, vgrid, data


def test_microlocal_reconstruction(kinetic_data):
    st_grid, vgrid, data = kinetic_data
    desc = SymbolDescriptor.porous_medium(2.0)
    sources = apply_symbol(data, desc, st_grid, vgrid)
    result = microlocal_decompose(data, desc, 1.0, 6, st_grid, vgrid, sources=sources)
    assert result.reconstruction_error < 1e-8
    assert len(result.shells) == 6
    np.testing.assert_allclose(result.source_piece, sum(result.shells), atol=1e-8)
    profiles = result.piece_profiles()
    assert set(profiles) == {'f0', 'tail', 'source'} | {f'shell{k}' for k in range(1, 7)}


def test_truncation_matches_decomposition(kinetic_data):
    st_grid, vgrid, data = kinetic_data
    desc = SymbolDescriptor.porous_medium(2.0)
    result = microlocal_decompose(data, desc, 0.5, 2, st_grid, vgrid)
    np.testing.assert_allclose(truncation_multiplier(data, desc, 'ball', 0.5, 0, st_grid, vgrid), result.f0,
                               atol=1e-12)
    np.testing.assert_allclose(truncation_multiplier(data, desc, PsiKind.annulus, 0.5, 2, st_grid, vgrid),
                               result.shells[1], atol=1e-12)
    with pytest.raises(InvalidArgument):
        truncation_multiplier(data[..., :-1], desc, 'ball', 0.5, 0, st_grid, vgrid)


def test_microlocal_validation(kinetic_data):
    st_grid, vgrid, data = kinetic_data
    desc = SymbolDescriptor.porous_medium(2.0)
    with pytest.raises(InvalidArgument):
        microlocal_decompose(data, desc, 1.0, 0, st_grid, vgrid)
    with pytest.raises(InvalidArgument):
        microlocal_decompose(data, desc, -1.0, 2, st_grid, vgrid)


def test_small_kmax_leaves_a_tail(kinetic_data, caplog):
    st_grid, vgrid, data = kinetic_data
    noise = np.random.default_rng(3).normal(size=data.shape)
    result = microlocal_decompose(noise, SymbolDescriptor.porous_medium(2.0), 1e-6, 1, st_grid, vgrid)
    assert result.tail_dominates
    assert math.isfinite(result.tail_fraction)
    assert '余项' in caplog.text
