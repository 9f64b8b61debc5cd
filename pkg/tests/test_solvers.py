import math

import numpy as np
import pytest

from pmelab import (
    AndersonProblem,
    AnisoProblem,
    BarenblattParams,
    BlowUpError,
    Boundary,
    Field,
    Grid,
    GridError,
    InvalidArgument,
    PMEProblem,
    Trajectory,
    barenblatt_field,
    bump,
    l1_contraction_check,
    mollify_noise,
    sample_white_noise,
    solve_aniso,
    solve_anderson,
    solve_pme,
    spike_train_force,
    viscosity_ladder,
)


def _bump(grid, center=0.5, radius=0.25, amplitude=1.0):
    return Field.from_function(grid, lambda x: amplitude * bump(np.abs(x - center) / radius))


def test_problem_validation(line):
    u0 = Field.zeros(line)
    with pytest.raises(InvalidArgument):
        PMEProblem(1.0, line, u0)
    with pytest.raises(InvalidArgument):
        PMEProblem(2.0, line, u0, t_end=0.0)
    with pytest.raises(InvalidArgument):
        PMEProblem(2.0, line, u0, cfl_safety=1.5)
    with pytest.raises(GridError):
        PMEProblem(2.0, Grid(1, 64, 1.0, Boundary.dirichlet), Field.zeros(Grid(1, 64, 1.0, Boundary.dirichlet)))
    with pytest.raises(GridError):
        PMEProblem(2.0, line, Field.zeros(Grid(1, 64)))


def test_zero_data_stays_zero(line):
    trajectory = solve_pme(PMEProblem(2.0, line, Field.zeros(line), t_end=0.01))
    assert len(trajectory) == 2
    assert trajectory.final.max_abs() == 0.0


def test_mass_is_conserved(line):
    u0 = _bump(line)
    trajectory = solve_pme(PMEProblem(2.0, line, u0, t_end=0.002), snapshot_stride=10)
    for mass in trajectory.masses():
        assert mass == pytest.approx(u0.mass(), rel=1e-12)
    assert trajectory.times[-1] == 0.002


def test_mass_balance_with_constant_force(line):
    u0 = _bump(line)
    force = _bump(line, 0.3, 0.2, 0.5)
    trajectory = solve_pme(PMEProblem(2.0, line, u0, force=force, t_end=0.002))
    assert trajectory.final.mass() == pytest.approx(u0.mass() + 0.002 * force.mass(), rel=1e-10)


def test_solution_stays_nonnegative(line):
    trajectory = solve_pme(PMEProblem(3.0, line, _bump(line), t_end=0.002), snapshot_stride=5)
    assert min(float(s.values.min()) for s in trajectory.snapshots) >= 0.0


def test_barenblatt_convergence():
    params = BarenblattParams(2.0, a=0.05)
    grid = Grid(1, 256)
    u0 = barenblatt_field(params, grid, 0.0)
    final = solve_pme(PMEProblem(2.0, grid, u0, t_end=0.5), snapshot_stride=10 ** 9).final
    exact = barenblatt_field(params, grid, 0.5)
    error = float(np.sum(np.abs(final.values - exact.values)) * grid.spacing)
    assert error < 0.05 * exact.mass()


def test_blowup_cap(line):
    problem = PMEProblem(2.0, line, _bump(line), force=Field.constant(line, 1e3), t_end=1.0, blowup_cap=5.0)
    with pytest.raises(BlowUpError) as info:
        solve_pme(problem)
    assert info.value.cap == 5.0
    assert info.value.value > 5.0


def test_spike_train_is_resolved_from_zero_data():
    grid = Grid(1, 128)
    force = spike_train_force(grid, count=4, amplitude=10.0, duration=1e-3, t_end=0.01, seed=3)
    trajectory = solve_pme(PMEProblem(2.0, grid, Field.zeros(grid), force=force, t_end=0.01))
    assert trajectory.final.mass() > 0.0
    assert max(trajectory.dt_history) <= force.duration / 4.0 + 1e-15


def test_spike_train_is_seeded():
    grid = Grid(1, 128)
    a = spike_train_force(grid, seed=1)
    b = spike_train_force(grid, seed=1)
    np.testing.assert_array_equal(a.centers, b.centers)
    np.testing.assert_array_equal(a.onsets, b.onsets)
    assert a(-1.0).max_abs() == 0.0


def test_trajectory_resample(line):
    trajectory = solve_pme(PMEProblem(2.0, line, _bump(line), t_end=0.002), snapshot_stride=7)
    resampled = trajectory.resample(5)
    assert len(resampled) == 5
    assert resampled.times[0] == 0.0
    assert resampled.times[-1] == pytest.approx(0.002)
    np.testing.assert_allclose(np.diff(resampled.times), 0.0005)
    assert resampled.final == trajectory.final


def test_trajectory_rejects_unordered_times(line):
    with pytest.raises(InvalidArgument):
        Trajectory([0.0, 0.0], [Field.zeros(line)] * 2)


def test_trajectory_accepts_array_times(line):
    trajectory = Trajectory(np.linspace(0.0, 1.0, 3), [Field.zeros(line)] * 3)
    assert trajectory.times == [0.0, 0.5, 1.0]
    assert len(trajectory.resample(2)) == 2
    with pytest.raises(InvalidArgument):
        Trajectory(np.array([]), [])


def test_trajectory_save_and_load(tmp_path, line):
    trajectory = solve_pme(PMEProblem(2.0, line, _bump(line), t_end=0.001), snapshot_stride=20)
    trajectory.save(tmp_path / 'run')
    loaded = Trajectory.load(tmp_path / 'run')
    assert loaded.times == trajectory.times
    assert loaded.final == trajectory.final
    assert (tmp_path / 'run' / 'index.csv').read_text(encoding='utf-8').startswith('index,time,dt,mass,max_abs,file')


def test_l1_contraction(line):
    problem = PMEProblem(2.0, line, _bump(line), t_end=5e-4)
    report = l1_contraction_check(problem, _bump(line), _bump(line, 0.55, 0.25, 0.8))
    assert report.relative_slack < 1e-2
    assert report.order_preserved is None
    assert report.steps > 0


def test_l1_contraction_preserves_order(line):
    u0 = _bump(line)
    problem = PMEProblem(2.0, line, u0, t_end=5e-4)
    report = l1_contraction_check(problem, u0, 0.5 * u0)
    assert report.order_preserved is True
    assert report.passed()


def test_l1_contraction_with_different_forces(line):
    u0 = _bump(line)
    force = _bump(line, 0.3, 0.2, 1.0)
    problem = PMEProblem(2.0, line, u0, force=force, t_end=5e-4)
    report = l1_contraction_check(problem, u0, u0, force_b=None)
    assert report.initial_distance == 0.0
    assert report.force_distance == pytest.approx(5e-4 * force.mass(), rel=1e-10)
    assert report.sup_distance <= report.force_distance * (1.0 + 1e-9)


def test_viscosity_ladder(line):
    problem = PMEProblem(2.0, line, _bump(line), t_end=0.001)
    ladder = viscosity_ladder(problem, [1e-2, 1e-3, 0.0])
    assert ladder.viscosities == [1e-2, 1e-3, 0.0]
    assert ladder.distances[-1] == 0.0
    assert ladder.is_monotone()


def test_aniso_solver_conserves_mass():
    grid = Grid(2, 32)
    u0 = Field.from_function(grid, lambda x, y: bump(np.hypot(x - 0.5, y - 0.5) / 0.3))
    problem = AnisoProblem([2.0, 3.0], grid, u0, flux_exponents=[1.0, 2.0], t_end=1e-3)
    final = solve_aniso(problem, snapshot_stride=10 ** 9).final
    assert final.mass() == pytest.approx(u0.mass(), rel=1e-10)


def test_aniso_validation():
    grid = Grid(2, 32)
    with pytest.raises(InvalidArgument):
        AnisoProblem([1.0, 1.0], grid, Field.zeros(grid))
    with pytest.raises(InvalidArgument):
        AnisoProblem([2.0], grid, Field.zeros(grid))


def test_white_noise_statistics():
    grid = Grid(1, 4096)
    noise = sample_white_noise(grid, 7)
    assert np.var(noise.values) * grid.spacing == pytest.approx(1.0, rel=0.1)
    assert noise == sample_white_noise(grid, 7)


def test_mollified_noise_is_smoother():
    grid = Grid(1, 512, 1.0, Boundary.dirichlet)
    noise = sample_white_noise(grid, 0)
    smooth = mollify_noise(noise, 0.01)
    assert smooth.values[0] == 0.0
    assert smooth.max_abs() < noise.max_abs()
    assert mollify_noise(noise, 0.0) is noise


def test_anderson_run_keeps_boundary():
    grid = Grid(1, 128, 1.0, Boundary.dirichlet)
    u0 = Field.from_function(grid, lambda x: bump(np.abs(x - 0.5) / 0.3))
    problem = AndersonProblem(1.5, grid, u0, sample_white_noise(grid, 1), noise_level=0.02, t_end=1e-3)
    trajectory = solve_anderson(problem, snapshot_stride=10 ** 9)
    assert all(s.values[0] == 0.0 for s in trajectory.snapshots)
    assert math.isfinite(trajectory.metadata['potential_sup'])


def test_anderson_validation():
    grid = Grid(1, 64, 1.0, Boundary.dirichlet)
    noise = sample_white_noise(grid, 0)
    with pytest.raises(InvalidArgument):
        AndersonProblem(2.5, grid, Field.zeros(grid), noise)
    with pytest.raises(GridError):
        AndersonProblem(1.5, Grid(1, 64), Field.zeros(Grid(1, 64)), sample_white_noise(Grid(1, 64), 0))
