#  The MIT License (MIT)
#  Copyright (c) 2022-present foxwhite25
#
#  Permission is hereby granted, free of charge, to any person obtaining a
#  copy of this software and associated documentation files (the "Software"),
#  to deal in the Software without restriction, including without limitation
#  the rights to use, copy, modify, merge, publish, distribute, sublicense,
#  and/or sell copies of the Software, and to permit persons to whom the
#  Software is furnished to do so, subject to the following conditions:
#
#  The above copyright notice and this permission notice shall be included in
#  all copies or substantial portions of the Software.
#
#  THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS
#  OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
#  FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
#  AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
#  LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING
#  FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
#  DEALINGS IN THE SOFTWARE.

from __future__ import annotations

import logging
import math
import os
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.fft

from .enum import Boundary
from .error import BlowUpError, ComputeAbort, GridError, InvalidArgument, SnapshotError
from .grid import (
    DyadicPartition,
    Field,
    Grid,
    bump,
    laplacian,
    odd_extension,
    read_snapshot,
    restrict_odd,
    signed_power,
    write_snapshot,
)
from .utils import make_rng, read_csv, write_csv

__all__ = (
    'PMEProblem',
    'AnisoProblem',
    'AndersonProblem',
    'Trajectory',
    'SpikeTrain',
    'ContractionReport',
    'ViscosityLadder',
    'solve_pme',
    'solve_aniso',
    'solve_anderson',
    'sample_white_noise',
    'mollify_noise',
    'spike_train_force',
    'l1_contraction_check',
    'viscosity_ladder',
    'force_values',
)

_log = logging.getLogger(__name__)

ForceLike = Union[None, Field, Callable[[float], Field]]

DEFAULT_CFL_SAFETY = 0.4


def force_values(force: ForceLike, t: float, grid: Grid) -> Optional[np.ndarray]:
    """在时间 ``t`` 求外力的值数组；``None`` 表示没有外力。"""
    if force is None:
        return None
    field = force if isinstance(force, Field) else force(t)
    if field.grid != grid:
        raise GridError('外力与解不在同一个网格上')
    return field.values


def _default_cap(u0: Field) -> float:
    return 1e6 * (1.0 + u0.max_abs())


def _check_common(grid: Grid, u0: Field, viscosity: float, t_end: float, cfl_safety: float) -> None:
    if u0.grid != grid:
        raise GridError('初值与问题不在同一个网格上')
    if not viscosity >= 0:
        raise InvalidArgument(f'粘性 ε 必须非负，而不是 {viscosity!r}')
    if not (t_end > 0 and math.isfinite(t_end)):
        raise InvalidArgument(f't_end 必须为正，而不是 {t_end!r}')
    if not 0 < cfl_safety < 1:
        raise InvalidArgument(f'CFL 安全系数必须在 (0, 1) 内，而不是 {cfl_safety!r}')


class _ExplicitScheme:
    # u_{n+1} = u_n + dt·(Σ_j D_j² u^{[m_j]} + εΔu - Σ_j D_j⁻ A_j(u) + S + V·u)
    __slots__ = ('grid', 'diffusion', 'flux', 'viscosity', 'force', 'potential', 'safety', 'max_dt')

    def __init__(self, grid: Grid, diffusion: Tuple[float, ...], flux: Optional[Tuple[float, ...]],
                 viscosity: float, force: ForceLike, potential: Optional[np.ndarray], safety: float):
        self.grid = grid
        self.diffusion = diffusion
        self.flux = flux
        self.viscosity = viscosity
        self.force = force
        self.potential = potential
        self.safety = safety
        # time-resolved forces must not be stepped over
        self.max_dt = float(getattr(force, 'duration', math.inf)) / 4.0

    def stable_dt(self, u: np.ndarray) -> float:
        h = self.grid.spacing
        top = float(np.max(np.abs(u))) if u.size else 0.0
        rate = 2.0 * sum(m * top ** (m - 1.0) + self.viscosity for m in self.diffusion) / h ** 2
        if self.flux is not None:
            rate += sum(n * top ** (n - 1.0) for n in self.flux) / h
        dt = self.safety / rate if rate > 0 else math.inf
        if rate == 0 and self.force is not None:
            dt = self.safety * h * h
        dt = min(dt, self.max_dt)
        if self.potential is not None:
            vmax = float(np.max(np.abs(self.potential)))
            if vmax > 0:
                dt = min(dt, 0.5 / vmax)
        return dt

    def increment(self, u: np.ndarray, t: float) -> np.ndarray:
        grid = self.grid
        h2 = grid.spacing ** 2
        if grid.boundary is Boundary.periodic:
            out = np.zeros_like(u)
            for axis, m in enumerate(self.diffusion):
                w = signed_power(u, m)
                out += (np.roll(w, -1, axis=axis) - 2.0 * w + np.roll(w, 1, axis=axis)) / h2
        else:
            out = laplacian(signed_power(u, self.diffusion[0]), grid)
        if self.viscosity > 0:
            out += self.viscosity * laplacian(u, grid)
        if self.flux is not None:
            h = grid.spacing
            for axis, n in enumerate(self.flux):
                # A(u) = u^{[n]} is nondecreasing, so the Engquist-Osher split is pure upwind
                numerical_flux = signed_power(u, n)
                out -= (numerical_flux - np.roll(numerical_flux, 1, axis=axis)) / h
        source = force_values(self.force, t, grid)
        if source is not None:
            out += source
        if self.potential is not None:
            out += self.potential * u
        if grid.boundary is Boundary.dirichlet:
            out[0] = 0.0
        return out


class PMEProblem:
    """带外力的多孔介质方程 ``∂_t u = Δu^{[m]} + εΔu + S``。

    Attributes
    -----------
    m: :class:`float`
        非线性指数，``m > 1``。
    grid: :class:`Grid`
        一维或二维周期网格。
    u0: :class:`Field`
        初值。
    force: Union[``None``, :class:`Field`, Callable[[:class:`float`], :class:`Field`]]
        外力 ``S(t, ·)``；可以是常数场或者随时间变化的供应函数。
    viscosity: :class:`float`
        消失粘性 ``ε ≥ 0``。
    t_end: :class:`float`
        终止时间。
    cfl_safety: :class:`float`
        CFL 安全系数，默认 0.4。
    blowup_cap: :class:`float`
        ``max|u|`` 的上限，默认 ``1e6·(1 + max|u0|)``。
    """

    __slots__ = ('m', 'grid', 'u0', 'force', 'viscosity', 't_end', 'cfl_safety', 'blowup_cap')

    def __init__(self, m: float, grid: Grid, u0: Field, *, force: ForceLike = None, viscosity: float = 0.0,
                 t_end: float = 1.0, cfl_safety: float = DEFAULT_CFL_SAFETY, blowup_cap: Optional[float] = None):
        if not m > 1:
            raise InvalidArgument(f'多孔介质方程要求 m > 1，而不是 {m!r}')
        if grid.boundary is not Boundary.periodic:
            raise GridError('PMEProblem 需要周期网格')
        _check_common(grid, u0, viscosity, t_end, cfl_safety)
        self.m: float = float(m)
        self.grid: Grid = grid
        self.u0: Field = u0
        self.force: ForceLike = force
        self.viscosity: float = float(viscosity)
        self.t_end: float = float(t_end)
        self.cfl_safety: float = float(cfl_safety)
        self.blowup_cap: float = float(blowup_cap) if blowup_cap is not None else _default_cap(u0)

    def __repr__(self) -> str:
        return f'<PMEProblem m={self.m!r} grid={self.grid!r} viscosity={self.viscosity!r} t_end={self.t_end!r}>'

    def replace(self, **changes: Any) -> PMEProblem:
        """返回修改了部分字段的新问题。"""
        options = {name: getattr(self, name) for name in self.__slots__}
        options.update(changes)
        m, grid, u0 = options.pop('m'), options.pop('grid'), options.pop('u0')
        return PMEProblem(m, grid, u0, **options)

    def scheme(self) -> _ExplicitScheme:
        return _ExplicitScheme(self.grid, (self.m,) * self.grid.dim, None, self.viscosity, self.force, None,
                               self.cfl_safety)


class AnisoProblem:
    """各向异性问题 ``∂_t u + Σ ∂_j u^{[n_j]} - Σ ∂_jj u^{[m_j]} - εΔu = S``。

    ``flux_exponents`` 为 ``None`` 时没有对流项。

    Attributes
    -----------
    diffusion_exponents: Tuple[:class:`float`, ...]
        每个轴的扩散指数 ``m_j ≥ 1``，且 ``min m_j > 1``。
    flux_exponents: Optional[Tuple[:class:`float`, ...]]
        每个轴的通量指数 ``n_j ≥ 1``。
    """

    __slots__ = ('diffusion_exponents', 'flux_exponents', 'grid', 'u0', 'force', 'viscosity', 't_end',
                 'cfl_safety', 'blowup_cap')

    def __init__(self, diffusion_exponents: Sequence[float], grid: Grid, u0: Field, *,
                 flux_exponents: Optional[Sequence[float]] = None, force: ForceLike = None,
                 viscosity: float = 0.0, t_end: float = 1.0, cfl_safety: float = DEFAULT_CFL_SAFETY,
                 blowup_cap: Optional[float] = None):
        if grid.boundary is not Boundary.periodic:
            raise GridError('AnisoProblem 需要周期网格')
        diffusion = tuple(float(m) for m in diffusion_exponents)
        if len(diffusion) != grid.dim:
            raise InvalidArgument(f'需要 {grid.dim} 个扩散指数，而得到 {len(diffusion)} 个')
        if any(m < 1 for m in diffusion) or not min(diffusion) > 1:
            raise InvalidArgument(f'扩散指数必须 ≥ 1 且最小值 > 1：{diffusion!r}')
        flux = None
        if flux_exponents is not None:
            flux = tuple(float(n) for n in flux_exponents)
            if len(flux) != grid.dim or any(n < 1 for n in flux):
                raise InvalidArgument(f'通量指数必须有 {grid.dim} 个且都 ≥ 1：{flux!r}')
        _check_common(grid, u0, viscosity, t_end, cfl_safety)
        self.diffusion_exponents: Tuple[float, ...] = diffusion
        self.flux_exponents: Optional[Tuple[float, ...]] = flux
        self.grid: Grid = grid
        self.u0: Field = u0
        self.force: ForceLike = force
        self.viscosity: float = float(viscosity)
        self.t_end: float = float(t_end)
        self.cfl_safety: float = float(cfl_safety)
        self.blowup_cap: float = float(blowup_cap) if blowup_cap is not None else _default_cap(u0)

    def __repr__(self) -> str:
        return (f'<AnisoProblem m={self.diffusion_exponents!r} n={self.flux_exponents!r} '
                f'grid={self.grid!r} t_end={self.t_end!r}>')

    def scheme(self) -> _ExplicitScheme:
        return _ExplicitScheme(self.grid, self.diffusion_exponents, self.flux_exponents, self.viscosity,
                               self.force, None, self.cfl_safety)


class AndersonProblem:
    """退化抛物 Anderson 模型 ``∂_t u = ∂_xx u^{[m]} + ε∂_xx u + u·S^ε``，在区间上带零狄利克雷边界。

    ``S^ε`` 是对白噪声样本做 :func:`mollify_noise` 得到的光滑势。

    Attributes
    -----------
    m: :class:`float`
        ``m ∈ (1, 2)``。
    noise: :class:`Field`
        白噪声样本（见 :func:`sample_white_noise`）。
    noise_level: :class:`float`
        磨光尺度 ``ε_noise``；0 表示不磨光。
    potential: :class:`Field`
        磨光后的势 ``S^ε``。
    """

    __slots__ = ('m', 'grid', 'u0', 'noise', 'noise_level', 'viscosity', 't_end', 'cfl_safety', 'blowup_cap',
                 'potential')

    def __init__(self, m: float, grid: Grid, u0: Field, noise: Field, *, noise_level: float = 0.0,
                 viscosity: float = 0.0, t_end: float = 1.0, cfl_safety: float = DEFAULT_CFL_SAFETY,
                 blowup_cap: Optional[float] = None):
        if not 1 < m < 2:
            raise InvalidArgument(f'Anderson 模型要求 m ∈ (1, 2)，而不是 {m!r}')
        if grid.dim != 1 or grid.boundary is not Boundary.dirichlet:
            raise GridError('AndersonProblem 需要一维狄利克雷网格')
        if noise.grid != grid:
            raise GridError('噪声与解不在同一个网格上')
        if not noise_level >= 0:
            raise InvalidArgument(f'磨光尺度必须非负，而不是 {noise_level!r}')
        _check_common(grid, u0, viscosity, t_end, cfl_safety)
        self.m: float = float(m)
        self.grid: Grid = grid
        self.u0: Field = u0
        self.noise: Field = noise
        self.noise_level: float = float(noise_level)
        self.viscosity: float = float(viscosity)
        self.t_end: float = float(t_end)
        self.cfl_safety: float = float(cfl_safety)
        self.blowup_cap: float = float(blowup_cap) if blowup_cap is not None else _default_cap(u0)
        self.potential: Field = mollify_noise(noise, noise_level)

    def __repr__(self) -> str:
        return f'<AndersonProblem m={self.m!r} noise_level={self.noise_level!r} t_end={self.t_end!r}>'

    def scheme(self) -> _ExplicitScheme:
        return _ExplicitScheme(self.grid, (self.m,), None, self.viscosity, None, self.potential.values,
                               self.cfl_safety)


class Trajectory:
    """一次求解得到的时间序列快照。

    Attributes
    -----------
    times: List[:class:`float`]
        严格递增的时间。
    snapshots: List[:class:`Field`]
        每个时间的场，共用一个网格。
    dt_history: List[:class:`float`]
        到达每个快照前最后一步的步长（初始快照为 0）。
    viscosity: :class:`float`
        求解时使用的粘性。
    metadata: Dict[:class:`str`, Any]
        格式说明（方案名、指数、步数等）。
    """

    __slots__ = ('times', 'snapshots', 'dt_history', 'viscosity', 'metadata')

    def __init__(self, times: Sequence[float], snapshots: Sequence[Field], *,
                 dt_history: Optional[Sequence[float]] = None, viscosity: float = 0.0,
                 metadata: Optional[Dict[str, Any]] = None):
        if len(times) != len(snapshots) or len(times) == 0:
            raise InvalidArgument('时间与快照数量必须相同且不为空')
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidArgument('轨迹的时间必须严格递增')
        grid = snapshots[0].grid
        if any(s.grid != grid for s in snapshots):
            raise GridError('轨迹中的快照必须共用一个网格')
        self.times: List[float] = [float(t) for t in times]
        self.snapshots: List[Field] = list(snapshots)
        self.dt_history: List[float] = [float(d) for d in dt_history] if dt_history is not None else \
            [0.0] + [b - a for a, b in zip(self.times, self.times[1:])]
        self.viscosity: float = float(viscosity)
        self.metadata: Dict[str, Any] = dict(metadata or {})

    def __repr__(self) -> str:
        return f'<Trajectory snapshots={len(self)} t=[{self.times[0]!r}, {self.times[-1]!r}] grid={self.grid!r}>'

    def __len__(self) -> int:
        return len(self.snapshots)

    @property
    def grid(self) -> Grid:
        return self.snapshots[0].grid

    @property
    def initial(self) -> Field:
        return self.snapshots[0]

    @property
    def final(self) -> Field:
        return self.snapshots[-1]

    def stack(self) -> np.ndarray:
        """形状为 ``(快照数, *grid.shape)`` 的值数组。"""
        return np.stack([s.values for s in self.snapshots])

    def time_weights(self) -> np.ndarray:
        """左矩形求积的权重 ``t_{k+1} - t_k``，最后一个快照权重为 0。"""
        times = np.asarray(self.times)
        return np.append(np.diff(times), 0.0)

    def masses(self) -> List[float]:
        return [s.mass() for s in self.snapshots]

    def resample(self, n_t: int) -> Trajectory:
        """线性插值到 ``n_t`` 个等距时间上（用于时空傅里叶分析）。"""
        if n_t < 2:
            raise InvalidArgument('至少需要两个时间点')
        times = np.asarray(self.times)
        target = np.linspace(times[0], times[-1], n_t)
        data = self.stack()
        idx = np.clip(np.searchsorted(times, target, side='right') - 1, 0, len(times) - 2)
        span = times[idx + 1] - times[idx]
        weight = ((target - times[idx]) / span).reshape((-1,) + (1,) * self.grid.dim)
        values = (1.0 - weight) * data[idx] + weight * data[idx + 1]
        snapshots = [Field(self.grid, v) for v in values]
        return Trajectory(target, snapshots, viscosity=self.viscosity,
                          metadata={**self.metadata, 'resampled': int(n_t)})

    def save(self, directory: Union[str, os.PathLike]) -> Path:
        """写出快照文件和 ``index.csv`` (index, time, dt, mass, max_abs, file)。"""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        rows = []
        for index, (t, dt, snapshot) in enumerate(zip(self.times, self.dt_history, self.snapshots)):
            name = f'snapshot_{index:05d}.bin'
            write_snapshot(snapshot, directory / name)
            rows.append((index, t, dt, snapshot.mass(), snapshot.max_abs(), name))
        write_csv(directory / 'index.csv', ('index', 'time', 'dt', 'mass', 'max_abs', 'file'), rows)
        _log.debug('轨迹已保存到 %s (%d 个快照)', directory, len(rows))
        return directory

    @classmethod
    def load(cls, directory: Union[str, os.PathLike], *, viscosity: float = 0.0) -> Trajectory:
        directory = Path(directory)
        try:
            rows = read_csv(directory / 'index.csv')
        except FileNotFoundError:
            raise SnapshotError(f'{directory} 中没有 index.csv') from None
        times = [float(row['time']) for row in rows]
        dts = [float(row['dt']) for row in rows]
        snapshots = [read_snapshot(directory / row['file']) for row in rows]
        return cls(times, snapshots, dt_history=dts, viscosity=viscosity)


def _integrate(scheme: _ExplicitScheme, u0: Field, t_end: float, stride: int, cap: float,
               metadata: Dict[str, Any]) -> Trajectory:
    if stride < 1:
        raise InvalidArgument(f'快照间隔必须 ≥ 1，而不是 {stride!r}')
    grid = u0.grid
    u = np.array(u0.values)
    t = 0.0
    step = 0
    times, snapshots, dts = [0.0], [u0], [0.0]
    started = time.perf_counter()
    _log.info('开始求解 %s：grid=%r t_end=%g', metadata.get('scheme'), grid, t_end)

    while t < t_end:
        dt = scheme.stable_dt(u)
        last = dt >= t_end - t
        if last:
            dt = t_end - t
        if not dt > 0:
            raise ComputeAbort(f'时间步长退化为 {dt!r}（t={t:.6g}）')
        u = u + dt * scheme.increment(u, t)
        step += 1
        t = t_end if last else t + dt
        top = float(np.max(np.abs(u)))
        if not math.isfinite(top) or top > cap:
            raise BlowUpError(t, step, top, cap)
        if last or step % stride == 0:
            times.append(t)
            snapshots.append(Field(grid, u))
            dts.append(dt)
            _log.debug('t=%.6g dt=%.3e mass=%.12g max|u|=%.6g', t, dt, snapshots[-1].mass(), top)

    elapsed = time.perf_counter() - started
    _log.info('求解完成：%d 步，%d 个快照，用时 %.2fs', step, len(times), elapsed)
    metadata = {**metadata, 'steps': step}
    return Trajectory(times, snapshots, dt_history=dts, viscosity=scheme.viscosity, metadata=metadata)


def solve_pme(problem: PMEProblem, snapshot_stride: int = 1) -> Trajectory:
    """用显式守恒单调格式求解 :class:`PMEProblem`。

    每一步按当前的 ``max|u|`` 重新计算
    ``dt ≤ cfl_safety·h²/(2d(m·max|u|^{m-1} + ε))``，最后一步截到恰好 ``t_end``。
    周期网格上离散质量平衡 ``Σu h^d`` 的增量等于 ``dt·ΣS h^d``。

    Raises
    -------
    BlowUpError
        ``max|u|`` 超过 ``problem.blowup_cap``。
    """
    metadata = {'scheme': 'pme', 'm': problem.m, 'viscosity': problem.viscosity}
    return _integrate(problem.scheme(), problem.u0, problem.t_end, snapshot_stride, problem.blowup_cap, metadata)


def solve_aniso(problem: AnisoProblem, snapshot_stride: int = 1) -> Trajectory:
    """求解 :class:`AnisoProblem`：每个轴单独扩散 ``u^{[m_j]}``，通量 ``u^{[n_j]}`` 用迎风格式。

    步长满足 ``dt·(2Σ(m_j M^{m_j-1} + ε)/h² + Σ n_j M^{n_j-1}/h) ≤ cfl_safety``。
    """
    metadata = {'scheme': 'aniso', 'm': list(problem.diffusion_exponents),
                'n': list(problem.flux_exponents) if problem.flux_exponents else None,
                'viscosity': problem.viscosity}
    return _integrate(problem.scheme(), problem.u0, problem.t_end, snapshot_stride, problem.blowup_cap, metadata)


def solve_anderson(problem: AndersonProblem, snapshot_stride: int = 1) -> Trajectory:
    """求解 :class:`AndersonProblem`。

    除了扩散的 CFL 条件，还要求 ``dt·max|S^ε| ≤ 1/2``。边界节点每一步都保持为 0。
    轨迹元数据里记录势的 ``L^∞`` 范数，供 :mod:`pmelab.kinetic` 的审计使用。
    """
    metadata = {
        'scheme': 'anderson',
        'm': problem.m,
        'viscosity': problem.viscosity,
        'noise_level': problem.noise_level,
        'potential_sup': problem.potential.max_abs(),
    }
    return _integrate(problem.scheme(), problem.u0, problem.t_end, snapshot_stride, problem.blowup_cap, metadata)


def sample_white_noise(grid: Grid, seed: Optional[int]) -> Field:
    """空间白噪声样本：每个节点独立的中心高斯，方差 ``1/h``。

    这样与检验函数 ``φ`` 的配对 ``Σ ξ_i φ(x_i) h`` 的方差就是 ``‖φ‖₂²``。
    狄利克雷网格的边界节点置为 0。同一种子给出同一个场。
    """
    if grid.dim != 1:
        raise GridError('白噪声只在一维网格上采样')
    values = make_rng(seed).standard_normal(grid.shape) / math.sqrt(grid.spacing)
    if grid.boundary is Boundary.dirichlet:
        values[0] = 0.0
    return Field(grid, values)


def mollify_noise(noise: Field, level: float, *, workers: Optional[int] = None) -> Field:
    """对噪声做低通截断：保留第 0 块以及 ``2π·2^j / L ≤ 1/level`` 的块 ``j``。

    ``level = 0`` 原样返回。狄利克雷场先奇延拓到两倍长度的周期网格，滤波后再限制回来。
    """
    if level < 0:
        raise InvalidArgument(f'磨光尺度必须非负，而不是 {level!r}')
    if level == 0:
        return noise

    dirichlet = noise.grid.boundary is Boundary.dirichlet
    working = odd_extension(noise) if dirichlet else noise
    grid = working.grid
    partition = DyadicPartition.for_grid(grid)
    weights = partition.grid_weights(grid)
    keep = [0] + [j for j in range(1, partition.jmax + 1) if 2.0 * math.pi * 2 ** j / grid.length <= 1.0 / level]
    mask = sum(weights[j] for j in keep)
    values = scipy.fft.ifftn(scipy.fft.fftn(working.values, workers=workers) * mask, workers=workers).real
    _log.debug('噪声磨光 level=%g 保留块 %s', level, keep)
    if dirichlet:
        return restrict_odd(values, noise.grid)
    return Field(grid, values)


class SpikeTrain:
    """由窄时空脉冲组成的粗糙 ``L¹`` 外力。

    每个脉冲在空间上是宽 ``width`` 的光滑鼓包，在时间上是长 ``duration`` 的指示函数。

    Attributes
    -----------
    grid: :class:`Grid`
        外力所在的网格。
    centers: :class:`numpy.ndarray`
        脉冲的空间中心，形状 ``(count, dim)``。
    onsets: :class:`numpy.ndarray`
        脉冲开始时间。
    duration: :class:`float`
        每个脉冲的持续时间。
    amplitude: :class:`float`
        脉冲高度。
    """

    __slots__ = ('grid', 'centers', 'onsets', 'duration', 'amplitude', 'width', '_profiles')

    def __init__(self, grid: Grid, centers: np.ndarray, onsets: np.ndarray, duration: float, amplitude: float,
                 width: float):
        self.grid = grid
        self.centers = np.asarray(centers, dtype=np.float64).reshape(-1, grid.dim)
        self.onsets = np.asarray(onsets, dtype=np.float64)
        self.duration = float(duration)
        self.amplitude = float(amplitude)
        self.width = float(width)
        coords = grid.coordinates()
        profiles = []
        for center in self.centers:
            r2 = np.zeros(grid.shape)
            for c, c0 in zip(coords, center):
                offset = np.mod(c - c0 + grid.length / 2.0, grid.length) - grid.length / 2.0
                r2 = r2 + offset * offset
            profile = self.amplitude * bump(np.sqrt(r2) / self.width)
            if grid.boundary is Boundary.dirichlet:
                profile[0] = 0.0
            profiles.append(profile)
        self._profiles = profiles

    def __repr__(self) -> str:
        return f'<SpikeTrain count={len(self.onsets)} amplitude={self.amplitude!r} width={self.width!r}>'

    def __call__(self, t: float) -> Field:
        values = np.zeros(self.grid.shape)
        for onset, profile in zip(self.onsets, self._profiles):
            if onset <= t < onset + self.duration:
                values = values + profile
        return Field(self.grid, values)


def spike_train_force(grid: Grid, *, count: int = 8, width: Optional[float] = None, amplitude: float = 1.0,
                      duration: float = 0.01, t_end: float = 1.0, seed: Optional[int] = 0) -> SpikeTrain:
    """随机放置 ``count`` 个脉冲；中心与起始时间由种子决定。``width`` 缺省为 ``4h``。"""
    if count < 1:
        raise InvalidArgument('脉冲数量必须 ≥ 1')
    if width is None:
        width = 4.0 * grid.spacing
    rng = make_rng(seed)
    low = 0.1 * grid.length
    centers = rng.uniform(low, grid.length - low, size=(count, grid.dim))
    onsets = np.sort(rng.uniform(0.0, max(t_end - duration, 0.0), size=count))
    return SpikeTrain(grid, centers, onsets, duration, amplitude, width)


class ContractionReport(NamedTuple):
    """:func:`l1_contraction_check` 的结果。"""

    initial_distance: float
    force_distance: float
    sup_distance: float
    slack: float
    relative_slack: float
    order_preserved: Optional[bool]
    steps: int
    distances: List[float]

    def passed(self, tolerance: float = 1e-2) -> bool:
        return self.relative_slack <= tolerance and self.order_preserved is not False


def _l1(values: np.ndarray, grid: Grid) -> float:
    return float(np.sum(np.abs(values)) * grid.cell_volume)


def l1_contraction_check(problem: Union[PMEProblem, AnisoProblem], u0_a: Field, u0_b: Field, *,
                         force_b: ForceLike = Ellipsis) -> ContractionReport:
    """以共同步长同步推进两次求解，检查 ``L¹`` 压缩性。

    ``sup_t ‖u_a - u_b‖₁ ≤ ‖u0_a - u0_b‖₁ + ∫‖S_a - S_b‖₁ dt + slack``。
    两次求解使用同一个外力，除非给出 ``force_b``。初值有序时还会检查每一步的序是否保持。
    """
    grid = problem.grid
    if u0_a.grid != grid or u0_b.grid != grid:
        raise GridError('初值与问题不在同一个网格上')
    scheme_a = problem.scheme()
    scheme_b = problem.scheme()
    if force_b is not Ellipsis:
        scheme_b.force = force_b
    a, b = np.array(u0_a.values), np.array(u0_b.values)
    cap = problem.blowup_cap

    ordered = None
    if np.all(a >= b):
        ordered = True
        sign = 1.0
    elif np.all(b >= a):
        ordered = True
        sign = -1.0

    initial = _l1(a - b, grid)
    distances = [initial]
    force_distance = 0.0
    t = 0.0
    step = 0
    t_end = problem.t_end
    while t < t_end:
        dt = min(scheme_a.stable_dt(a), scheme_b.stable_dt(b))
        last = dt >= t_end - t
        if last:
            dt = t_end - t
        fa = force_values(scheme_a.force, t, grid)
        fb = force_values(scheme_b.force, t, grid)
        if fa is not None or fb is not None:
            fa = np.zeros(grid.shape) if fa is None else fa
            fb = np.zeros(grid.shape) if fb is None else fb
            force_distance += dt * _l1(fa - fb, grid)
        a = a + dt * scheme_a.increment(a, t)
        b = b + dt * scheme_b.increment(b, t)
        step += 1
        t = t_end if last else t + dt
        top = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
        if not math.isfinite(top) or top > cap:
            raise BlowUpError(t, step, top, cap)
        distances.append(_l1(a - b, grid))
        if ordered and not np.all(sign * (a - b) >= 0.0):
            ordered = False

    sup = max(distances)
    slack = max(0.0, sup - initial - force_distance)
    scale = initial + force_distance
    relative = slack / scale if scale > 0 else (0.0 if slack == 0 else math.inf)
    _log.info('L¹ 压缩检查：初始 %.6g，最大 %.6g，余量 %.3e', initial, sup, slack)
    return ContractionReport(initial, force_distance, sup, slack, relative, ordered, step, distances)


class ViscosityLadder(NamedTuple):
    viscosities: List[float]
    finals: List[Field]
    distances: List[float]

    def is_monotone(self) -> bool:
        """到最小粘性解的距离是否随 ``ε`` 减小而不增。"""
        return all(b <= a for a, b in zip(self.distances, self.distances[1:]))


def viscosity_ladder(problem: PMEProblem, viscosities: Sequence[float]) -> ViscosityLadder:
    """对一列递减的粘性求解，并报告各终值到最后一个（最小粘性）终值的 ``L¹`` 距离。"""
    ladder = sorted((float(e) for e in viscosities), reverse=True)
    finals = [solve_pme(problem.replace(viscosity=eps), snapshot_stride=10 ** 9).final for eps in ladder]
    reference = finals[-1]
    distances = [_l1(f.values - reference.values, problem.grid) for f in finals]
    return ViscosityLadder(ladder, finals, distances)
