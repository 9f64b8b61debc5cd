import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from pmelab import (
    Boundary,
    DyadicPartition,
    Field,
    Grid,
    GridError,
    InvalidArgument,
    SnapshotError,
    bump,
    dft_forward,
    dft_inverse,
    lp_blocks,
    lp_project,
    make_partition,
    odd_extension,
    power_inequality_constant,
    read_snapshot,
    signed_power,
    smooth_step,
    write_snapshot,
)


def test_grid_rejects_bad_shapes():
    with pytest.raises(GridError):
        Grid(3, 64)
    with pytest.raises(GridError):
        Grid(1, 100)
    with pytest.raises(GridError):
        Grid(1, 4)
    with pytest.raises(GridError):
        Grid(1, 64, -1.0)
    with pytest.raises(GridError):
        Grid(2, 64, 1.0, Boundary.dirichlet)


def test_grid_accepts_boundary_names():
    grid = Grid(1, 64, 2.0, 'dirichlet')
    assert grid.boundary is Boundary.dirichlet
    assert grid.spacing == pytest.approx(2.0 / 64)
    assert Grid.from_dict(grid.to_dict()) == grid


def test_max_block_covers_all_wavenumbers():
    for dim in (1, 2):
        grid = Grid(dim, 64)
        assert 2 ** grid.max_block >= grid.radial_wavenumber().max()


def test_field_is_read_only(line):
    field = Field.zeros(line)
    with pytest.raises(ValueError):
        field.values[0] = 1.0


def test_field_rejects_nan_and_boundary_values(line):
    with pytest.raises(GridError):
        Field(line, np.full(line.shape, np.nan))
    dirichlet = Grid(1, 64, 1.0, Boundary.dirichlet)
    with pytest.raises(GridError):
        Field(dirichlet, np.ones(64))
    assert Field.constant(dirichlet, 1.0).values[0] == 0.0


def test_mass_of_constant(line):
    assert Field.constant(line, 3.0).mass() == pytest.approx(3.0)


@pytest.mark.parametrize('dim', [1, 2])
def test_partition_of_unity(dim):
    grid = Grid(dim, 64)
    partition = DyadicPartition.for_grid(grid)
    total = sum(partition.grid_weights(grid))
    np.testing.assert_allclose(total, 1.0, atol=1e-12)


def test_partition_block_supports():
    partition = DyadicPartition(6)
    r = np.linspace(0, 64, 2001)
    for j in range(1, 7):
        w = partition.weight(j, r)
        assert np.all(w[r < 2.0 ** (j - 1)] == 0.0)
        assert np.all(w[r > 2.0 ** (j + 1)] == 0.0)
    assert np.all(partition.weight(0, r)[r >= 2.0] == 0.0)


def test_make_partition():
    assert make_partition(5) == DyadicPartition(5)
    with pytest.raises(InvalidArgument):
        make_partition(1)


def test_pure_mode_lands_in_its_block():
    grid = Grid(1, 256)
    field = Field.from_function(grid, lambda x: np.cos(2.0 * np.pi * 16 * x))
    blocks = lp_blocks(field)
    energies = [float(np.sum(b ** 2)) for b in blocks]
    assert int(np.argmax(energies)) == 4
    np.testing.assert_allclose(sum(blocks), field.values, atol=1e-10)


def test_smooth_step_and_bump():
    assert smooth_step(-1.0) == 0.0
    assert smooth_step(2.0) == 1.0
    assert smooth_step(0.5) == pytest.approx(0.5)
    assert bump(0.25) == 1.0
    assert bump(1.5) == 0.0


@given(arrays(np.float64, 64, elements=st.floats(-1e3, 1e3)))
def test_parseval(values):
    field = Field(Grid(1, 64), values)
    assert dft_forward(field).energy() == pytest.approx(float(np.sum(values ** 2)), rel=1e-12, abs=1e-9)


@given(arrays(np.float64, 32, elements=st.floats(-10, 10)))
def test_dft_inverse(values):
    field = Field(Grid(1, 32), values)
    np.testing.assert_allclose(dft_inverse(dft_forward(field)).values, values, atol=1e-10)


def test_spectral_operations_require_periodic():
    field = Field.zeros(Grid(1, 64, 1.0, Boundary.dirichlet))
    with pytest.raises(GridError):
        dft_forward(field)
    with pytest.raises(GridError):
        odd_extension(Field.zeros(Grid(1, 64)))


def test_lp_project_bounds(wave):
    with pytest.raises(InvalidArgument):
        lp_project(wave, 99)


def test_odd_extension_layout():
    grid = Grid(1, 8, 1.0, Boundary.dirichlet)
    values = np.arange(8.0)
    values[0] = 0.0
    extended = odd_extension(Field(grid, values))
    assert extended.grid == Grid(1, 16, 2.0)
    np.testing.assert_array_equal(extended.values[:8], values)
    np.testing.assert_array_equal(extended.values[9:], -values[:0:-1])
    assert extended.mass() == pytest.approx(0.0)


@given(st.floats(-5, 5), st.floats(0.5, 4))
def test_signed_power_is_odd(x, m):
    assert signed_power(-x, m) == pytest.approx(-signed_power(x, m))


@pytest.mark.parametrize('m', [2.0, 3.0, 4.0])
def test_power_inequality_constant(m):
    assert power_inequality_constant(m, radius=4.0, points=201) == pytest.approx(2.0 ** (m - 2.0), rel=1e-9)


def test_power_inequality_rejects_small_m():
    with pytest.raises(InvalidArgument):
        power_inequality_constant(1.5)


def test_snapshot_file(tmp_path, wave):
    path = tmp_path / 'u.bin'
    write_snapshot(wave, path)
    assert path.stat().st_size == 19 + 8 * 256
    assert read_snapshot(path) == wave


def test_snapshot_rejects_garbage():
    with pytest.raises(SnapshotError):
        read_snapshot(io.BytesIO(b'XXXX'))
    buffer = io.BytesIO()
    write_snapshot(Field.zeros(Grid(1, 8)), buffer)
    data = buffer.getvalue()
    with pytest.raises(SnapshotError):
        read_snapshot(io.BytesIO(b'QQQQ' + data[4:]))
    with pytest.raises(SnapshotError):
        read_snapshot(io.BytesIO(data[:-8]))
