import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from pmelab import (
    AndersonProblem,
    Boundary,
    CoverageError,
    DissipationMeasure,
    Field,
    Grid,
    InvalidArgument,
    PMEProblem,
    Trajectory,
    VGrid,
    anderson_energy_audit,
    bump,
    chi,
    chi_stack,
    default_basket,
    dissipation_from_run,
    entropy_audit,
    kinetic_defect,
    kinetic_mass,
    kinetic_residual,
    nikolskii_energy_audit,
    sample_white_noise,
    singular_moment,
    solve_anderson,
    solve_pme,
    velocity_average,
)


@pytest.fixture(scope='module')
def pme_run():
    grid = Grid(1, 128)
    u0 = Field.from_function(grid, lambda x: bump(np.abs(x - 0.5) / 0.25))
    return solve_pme(PMEProblem(2.0, grid, u0, t_end=0.01))


def test_vgrid_validation():
    with pytest.raises(InvalidArgument):
        VGrid(0.0, 1.0, 8)
    with pytest.raises(InvalidArgument):
        VGrid(-1.0, 1.0, 1)


def test_vgrid_covering(pme_run):
    vgrid = VGrid.covering(pme_run, 32)
    assert vgrid.v_max == pytest.approx(1.05 * max(s.max_abs() for s in pme_run.snapshots))
    assert vgrid.v_min == -vgrid.v_max
    assert VGrid.symmetric(1.0, 8).spacing == pytest.approx(0.25)


def test_chi_values_and_sign(wave):
    f = chi(wave, VGrid.symmetric(1.2, 48))
    assert set(np.unique(f.values)) <= {-1, 0, 1}
    assert f.sign_consistent()


@given(arrays(np.float64, 16, elements=st.floats(-1.0, 1.0)))
def test_chi_sandwich(values):
    field = Field(Grid(1, 16), values)
    vgrid = VGrid.symmetric(1.1, 40)
    error = np.abs(kinetic_mass(field, vgrid).values - np.abs(values))
    assert np.all(error <= vgrid.spacing + 1e-12)


def test_chi_requires_coverage(wave):
    with pytest.raises(CoverageError):
        chi(wave, VGrid.symmetric(0.5, 16))


@given(arrays(np.float64, 16, elements=st.floats(-1.0, 1.0)))
def test_defect_is_a_pair_of_deltas(values):
    field = Field(Grid(1, 16), values)
    vgrid = VGrid.symmetric(1.1, 22)
    defect = kinetic_defect(field, vgrid)
    assert np.all(defect.sum(axis=-1) == 0)
    assert np.all(np.abs(defect).sum(axis=-1) <= 2)
    upper = vgrid.boundary_index(values)
    moved = upper != vgrid.zero_cell
    rows = np.flatnonzero(moved)
    assert np.all(defect[rows, upper[rows]] == -1)
    assert np.all(defect[rows, vgrid.zero_cell] == 1)


def test_chi_stack_shape(pme_run):
    vgrid = VGrid.covering(pme_run, 16)
    assert chi_stack(pme_run, vgrid).shape == (len(pme_run), 128, 16)


def test_constant_solution_has_no_dissipation():
    grid = Grid(1, 32)
    u = Field.constant(grid, 0.3)
    trajectory = Trajectory([0.0, 1.0], [u, u])
    q = dissipation_from_run(trajectory, 2.0, VGrid.symmetric(1.0, 8))
    assert len(q) == 0
    assert q.total() == 0.0


def test_dissipation_matches_energy_decay(pme_run):
    # for the quadratic entropy the parabolic measure is exactly the decay of ∫u²/2
    vgrid = VGrid.covering(pme_run, 64)
    q = dissipation_from_run(pme_run, 2.0, vgrid)
    decay = 0.5 * (pme_run.initial.power_integral(2.0) - pme_run.final.power_integral(2.0))
    assert q.total('parabolic') == pytest.approx(decay, rel=0.05)
    assert q.total('viscous') == 0.0
    assert q.parabolic_factor == pytest.approx(8.0 / 9.0)


def test_singular_moment(pme_run):
    q = dissipation_from_run(pme_run, 2.0, VGrid.covering(pme_run, 64))
    assert singular_moment(q, 0.0) == pytest.approx(q.total())
    assert singular_moment(q, 0.5) > q.total()
    with pytest.raises(InvalidArgument):
        singular_moment(q, 1.0)


def test_measure_rejects_negative_weights():
    with pytest.raises(InvalidArgument):
        DissipationMeasure(Grid(1, 8), VGrid.symmetric(1.0, 4), [0], parabolic=[-1.0])
    with pytest.raises(InvalidArgument):
        DissipationMeasure(Grid(1, 8), VGrid.symmetric(1.0, 4), [7])


def test_entropy_audit_rows(pme_run, tmp_path):
    q = dissipation_from_run(pme_run, 2.0, VGrid.covering(pme_run, 64))
    report = entropy_audit(pme_run, q, [0.5, 0.9])
    assert report.find('energy', 0.5) is not None
    assert report.find('energy', 0.9) is not None
    assert report.find('energy', 0.1) is None
    assert all(math.isfinite(row.implied_constant) for row in report)
    assert report.max_implied('psi-delta') <= 3.0
    report.write_csv(tmp_path / 'audit.csv')
    assert (tmp_path / 'audit.csv').read_text(encoding='utf-8').splitlines()[0] == \
        'quantity,gamma,lhs,rhs,implied_constant'


def test_entropy_audit_with_force(line):
    u0 = Field.from_function(line, lambda x: bump(np.abs(x - 0.5) / 0.25))
    force = Field.from_function(line, lambda x: bump(np.abs(x - 0.3) / 0.2))
    trajectory = solve_pme(PMEProblem(2.0, line, u0, force=force, t_end=0.002), snapshot_stride=20)
    q = dissipation_from_run(trajectory, 2.0, VGrid.covering(trajectory, 32))
    row = entropy_audit(trajectory, q, 0.5, u0, force).find('energy')
    assert row.rhs > u0.power_integral(1.5)


def test_anderson_audit():
    grid = Grid(1, 256, 1.0, Boundary.dirichlet)
    u0 = Field.from_function(grid, lambda x: bump(np.abs(x - 0.5) / 0.3))
    problem = AndersonProblem(1.5, grid, u0, sample_white_noise(grid, 0), noise_level=0.02, t_end=0.005)
    trajectory = solve_anderson(problem, snapshot_stride=5)
    q = dissipation_from_run(trajectory, 1.5, VGrid.covering(trajectory, 128))
    report = anderson_energy_audit(trajectory, q, 1.5, problem.potential)
    assert math.isfinite(report.find('anderson-energy').implied_constant)
    assert report.metadata['tau'] == pytest.approx(5.0 / 4.5)
    assert report.metadata['moment_identity_ratio'] == pytest.approx(1.0, abs=0.25)
    with pytest.raises(InvalidArgument):
        anderson_energy_audit(trajectory, q, 1.5, problem.potential, alpha=0.0)


def test_nikolskii_audit(pme_run):
    report = nikolskii_energy_audit(pme_run, 2.0, 1.0)
    assert [row.quantity for row in report] == ['nikolskii', 'gradient-energy']
    assert report.metadata['nikolskii_p'] == 3.0
    with pytest.raises(InvalidArgument):
        nikolskii_energy_audit(pme_run, 1.5, 1.0)


def test_default_basket():
    basket = default_basket(1)
    assert len(basket) == 12
    assert len({b.label for b in basket}) == 12
    assert len(default_basket(2)) == 12


def test_kinetic_residual_is_small(pme_run):
    q = dissipation_from_run(pme_run, 2.0, VGrid.covering(pme_run, 64))
    residual = kinetic_residual(pme_run, q, 2.0)
    assert len(residual.residuals) == 12
    assert residual.relative < 0.15


def test_velocity_average_recovers_u(wave):
    vgrid = VGrid.symmetric(1.2, 96)
    average = velocity_average(chi(wave, vgrid), lambda v: np.ones_like(v))
    assert np.max(np.abs(average.values - wave.values)) <= vgrid.spacing + 1e-12
    with pytest.raises(InvalidArgument):
        velocity_average(chi(wave, vgrid), np.ones(3))
