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
from typing import Any, Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.fft
from scipy.integrate import cumulative_trapezoid

from .enum import Boundary
from .error import CoverageError, GridError, InvalidArgument
from .grid import (
    DyadicPartition,
    Field,
    Grid,
    edge_means,
    forward_differences,
    odd_extension,
    signed_power,
)
from .solvers import ForceLike, Trajectory, force_values
from .utils import write_csv

__all__ = (
    'VGrid',
    'KineticField',
    'DissipationMeasure',
    'AuditRow',
    'AuditReport',
    'KineticResidual',
    'BasketFunction',
    'chi',
    'chi_stack',
    'velocity_average',
    'kinetic_mass',
    'kinetic_defect',
    'dissipation_from_run',
    'singular_moment',
    'entropy_audit',
    'anderson_energy_audit',
    'nikolskii_energy_audit',
    'gradient_power_integral',
    'negative_sobolev_power',
    'noise_besov_surrogate',
    'default_basket',
    'kinetic_residual',
)

_log = logging.getLogger(__name__)


class VGrid:
    """速度变量 ``v`` 的均匀单元网格。

    单元 ``c`` 覆盖 ``[v_min + c·dv, v_min + (c+1)·dv)``。

    Attributes
    -----------
    v_min: :class:`float`
        下端点，必须为负。
    v_max: :class:`float`
        上端点，必须为正。
    n_v: :class:`int`
        单元数。
    """

    __slots__ = ('v_min', 'v_max', 'n_v', 'edges', 'centers')

    def __init__(self, v_min: float, v_max: float, n_v: int):
        if not v_min < 0 < v_max:
            raise InvalidArgument(f'速度网格必须满足 v_min < 0 < v_max，而得到 [{v_min!r}, {v_max!r}]')
        if int(n_v) != n_v or n_v < 2:
            raise InvalidArgument(f'速度单元数必须是 ≥ 2 的整数，而不是 {n_v!r}')
        self.v_min: float = float(v_min)
        self.v_max: float = float(v_max)
        self.n_v: int = int(n_v)
        self.edges: np.ndarray = np.linspace(self.v_min, self.v_max, self.n_v + 1)
        self.centers: np.ndarray = 0.5 * (self.edges[1:] + self.edges[:-1])
        self.edges.setflags(write=False)
        self.centers.setflags(write=False)

    def __repr__(self) -> str:
        return f'<VGrid v=[{self.v_min!r}, {self.v_max!r}] n_v={self.n_v}>'

    def __eq__(self, other: Any) -> bool:
        return (isinstance(other, VGrid) and self.v_min == other.v_min and self.v_max == other.v_max
                and self.n_v == other.n_v)

    def __hash__(self) -> int:
        return hash((self.v_min, self.v_max, self.n_v))

    @property
    def spacing(self) -> float:
        """:class:`float`: 单元宽度 ``dv``。"""
        return (self.v_max - self.v_min) / self.n_v

    @classmethod
    def symmetric(cls, half_width: float, n_v: int) -> VGrid:
        """``[-half_width, half_width]`` 上的网格；``n_v`` 为偶数时 0 落在单元边界上。"""
        return cls(-half_width, half_width, n_v)

    @classmethod
    def covering(cls, values: Union[Field, Trajectory, float], n_v: int, *, margin: float = 1.05) -> VGrid:
        """构造覆盖场或轨迹数值范围的对称网格。"""
        if isinstance(values, Trajectory):
            top = max(s.max_abs() for s in values.snapshots)
        elif isinstance(values, Field):
            top = values.max_abs()
        else:
            top = abs(float(values))
        return cls.symmetric(max(top, 1e-12) * margin, n_v)

    @property
    def zero_cell(self) -> int:
        """:class:`int`: 包含 ``v = 0`` 的单元。"""
        return int(np.searchsorted(self.edges, 0.0, side='right') - 1)

    def check_covers(self, values: np.ndarray) -> None:
        low = float(np.min(values)) if values.size else 0.0
        high = float(np.max(values)) if values.size else 0.0
        if low < self.v_min:
            raise CoverageError(-low, -self.v_min)
        if high > self.v_max:
            raise CoverageError(high, self.v_max)
        top = max(-low, high)
        if top > 0.98 * min(-self.v_min, self.v_max):
            _log.warning('速度网格接近饱和：max|u|=%.6g，网格范围 [%.6g, %.6g]', top, self.v_min, self.v_max)

    def boundary_index(self, values: np.ndarray) -> np.ndarray:
        """``v_min + idx·dv`` 是不超过 ``values`` 的最大单元边界（``v_max`` 处取 ``n_v``）。"""
        return np.searchsorted(self.edges, values, side='right') - 1

    def cell_index(self, values: np.ndarray) -> np.ndarray:
        """包含 ``values`` 的单元，``v_max`` 归入最后一个单元。"""
        return np.clip(self.boundary_index(values), 0, self.n_v - 1)

    def cell_average(self, antiderivative: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """由原函数 ``F`` 得到每个单元上 ``F'`` 的精确平均 ``(F(b) - F(a)) / dv``。"""
        values = antiderivative(self.edges)
        return np.diff(values) / self.spacing


class KineticField:
    """动理学函数 ``χ(u(x), v) = 1_{v<u} - 1_{v<0}`` 的单元值。

    数组形状为 ``(*grid.shape, n_v)``，取值在 ``{-1, 0, 1}`` 中。
    按单元指标构造：``χ_c = 1_{c < idx(u)} - 1_{c < idx(0)}``，所以
    ``Σ_c χ_c dv`` 与 ``u`` 的差不超过 ``dv``。
    """

    __slots__ = ('grid', 'vgrid', 'values')

    def __init__(self, grid: Grid, vgrid: VGrid, values: np.ndarray):
        if values.shape != grid.shape + (vgrid.n_v,):
            raise GridError(f'动理学函数的形状 {values.shape} 与网格不符')
        values = np.array(values, dtype=np.int8)
        values.setflags(write=False)
        self.grid: Grid = grid
        self.vgrid: VGrid = vgrid
        self.values: np.ndarray = values

    def __repr__(self) -> str:
        return f'<KineticField grid={self.grid!r} vgrid={self.vgrid!r}>'

    def sign_consistent(self) -> bool:
        """检查 ``sign(v)·χ ≥ 0``。"""
        return bool(np.all(np.sign(self.vgrid.centers) * self.values >= 0))


def _chi_values(u: np.ndarray, vgrid: VGrid) -> np.ndarray:
    vgrid.check_covers(u)
    cells = np.arange(vgrid.n_v)
    upper = vgrid.boundary_index(u)[..., None]
    zero = vgrid.boundary_index(np.zeros(1))[0]
    return (cells < upper).astype(np.int8) - (cells < zero).astype(np.int8)


def chi(u: Field, vgrid: VGrid) -> KineticField:
    """构造 :class:`KineticField`。

    Raises
    -------
    CoverageError
        ``vgrid`` 没有覆盖 ``u`` 的取值范围。
    """
    return KineticField(u.grid, vgrid, _chi_values(u.values, vgrid))


def chi_stack(trajectory: Trajectory, vgrid: VGrid) -> np.ndarray:
    """整条轨迹的 ``χ``，形状为 ``(快照数, *grid.shape, n_v)``。"""
    data = trajectory.stack()
    return _chi_values(data, vgrid)


def _weight_array(phi: Union[Callable[[np.ndarray], np.ndarray], np.ndarray], vgrid: VGrid) -> np.ndarray:
    if callable(phi):
        return np.broadcast_to(np.asarray(phi(vgrid.centers), dtype=np.float64), (vgrid.n_v,))
    weights = np.asarray(phi, dtype=np.float64)
    if weights.shape != (vgrid.n_v,):
        raise InvalidArgument(f'速度权重的长度必须是 {vgrid.n_v}')
    return weights


def velocity_average(f: KineticField, phi: Union[Callable[[np.ndarray], np.ndarray], np.ndarray]) -> Field:
    """中点求积 ``∫ f(x, v) φ(v) dv``。``φ ≡ 1`` 时回到 ``u``（误差不超过 ``dv``）。"""
    weights = _weight_array(phi, f.vgrid)
    values = np.tensordot(f.values.astype(np.float64), weights, axes=([-1], [0])) * f.vgrid.spacing
    if f.grid.boundary is Boundary.dirichlet:
        values[0] = 0.0
    return Field(f.grid, values)


def kinetic_mass(u: Field, vgrid: VGrid) -> Field:
    """每个节点上的 ``Σ_v |χ| dv``，即 ``|u|`` 的速度网格近似。"""
    f = chi(u, vgrid)
    values = np.abs(f.values).sum(axis=-1) * vgrid.spacing
    return Field(u.grid, values)


def kinetic_defect(u: Field, vgrid: VGrid) -> np.ndarray:
    """``χ`` 在 ``v`` 方向上的后向差分 ``χ_c - χ_{c-1}``（``χ_{-1} = 0``）。

    结果在包含 ``u(x)`` 的单元上为 -1，在包含 0 的单元上为 +1（来自 ``-1_{v<0}``），
    两者重合时相消。
    """
    values = chi(u, vgrid).values.astype(np.int8)
    return np.diff(values, axis=-1, prepend=np.zeros(values.shape[:-1] + (1,), dtype=np.int8))


class DissipationMeasure:
    """离散熵耗散测度 ``q = m_visc + n``，按沉积点稀疏存储。

    每个沉积点对应一个时间区间和一条网格边，权重已经乘上了 ``dt·h^d``，
    位置在边中点平均值 ``ū`` 所在的速度单元。

    Attributes
    -----------
    grid: :class:`Grid`
        空间网格。
    vgrid: :class:`VGrid`
        速度网格。
    cells: :class:`numpy.ndarray`
        每个沉积点的速度单元。
    values: :class:`numpy.ndarray`
        每个沉积点的 ``v`` 值（边平均）。
    parabolic: :class:`numpy.ndarray`
        抛物部分 ``n`` 的权重，``(4m/(m+1)²)·|D u^{[(m+1)/2]}|²·dt·h^d``。
    viscous: :class:`numpy.ndarray`
        粘性部分 ``m_visc`` 的权重 ``ε|Du|²·dt·h^d``。
    parabolic_factor: :class:`float`
        抛物部分使用的归一化常数 ``4m/(m+1)²``。
    """

    __slots__ = ('grid', 'vgrid', 'cells', 'values', 'parabolic', 'viscous', 'time_index', 'node', 'axis',
                 'times', 'parabolic_factor')

    def __init__(self, grid: Grid, vgrid: VGrid, cells: Sequence[int], *,
                 parabolic: Optional[Sequence[float]] = None, viscous: Optional[Sequence[float]] = None,
                 values: Optional[Sequence[float]] = None, time_index: Optional[Sequence[int]] = None,
                 node: Optional[Sequence[int]] = None, axis: Optional[Sequence[int]] = None,
                 times: Optional[Sequence[float]] = None, parabolic_factor: float = 1.0):
        cells = np.asarray(cells, dtype=np.int64)
        size = cells.shape[0]

        def column(data: Optional[Sequence[Any]], dtype: Any, fill: Any) -> np.ndarray:
            if data is None:
                return np.full(size, fill, dtype=dtype)
            array = np.asarray(data, dtype=dtype)
            if array.shape != (size,):
                raise InvalidArgument('耗散测度的各列长度必须相同')
            return array

        if size and (cells.min() < 0 or cells.max() >= vgrid.n_v):
            raise InvalidArgument('速度单元指标超出范围')
        self.grid: Grid = grid
        self.vgrid: VGrid = vgrid
        self.cells: np.ndarray = cells
        self.values: np.ndarray = vgrid.centers[cells] if values is None else column(values, np.float64, 0.0)
        self.parabolic: np.ndarray = column(parabolic, np.float64, 0.0)
        self.viscous: np.ndarray = column(viscous, np.float64, 0.0)
        if np.any(self.parabolic < 0) or np.any(self.viscous < 0):
            raise InvalidArgument('耗散测度的权重必须非负')
        self.time_index: np.ndarray = column(time_index, np.int64, 0)
        self.node: np.ndarray = column(node, np.int64, 0)
        self.axis: np.ndarray = column(axis, np.int64, 0)
        self.times: np.ndarray = np.asarray(times if times is not None else [0.0], dtype=np.float64)
        self.parabolic_factor: float = float(parabolic_factor)

    def __repr__(self) -> str:
        return f'<DissipationMeasure deposits={len(self)} total={self.total():.6g}>'

    def __len__(self) -> int:
        return int(self.cells.shape[0])

    def weights(self, part: str = 'total') -> np.ndarray:
        """``part`` 为 ``'total'``、``'parabolic'`` 或 ``'viscous'``。"""
        if part == 'total':
            return self.parabolic + self.viscous
        if part == 'parabolic':
            return self.parabolic
        if part == 'viscous':
            return self.viscous
        raise InvalidArgument(f'未知的耗散部分 {part!r}')

    def total(self, part: str = 'total') -> float:
        """总变差质量 ``∫∫∫ q``。"""
        return float(np.sum(self.weights(part)))

    def cell_totals(self, part: str = 'total') -> np.ndarray:
        """沿 ``(t, x)`` 求和后每个速度单元上的质量。"""
        return np.bincount(self.cells, weights=self.weights(part), minlength=self.vgrid.n_v)

    def integrate(self, weight: np.ndarray, part: str = 'total') -> float:
        """``Σ q·w(cell)``，``weight`` 是每个速度单元上的权重。"""
        return float(np.dot(self.cell_totals(part), weight))


def dissipation_from_run(trajectory: Trajectory, m: float, vgrid: VGrid, viscosity: Optional[float] = None) -> \
        DissipationMeasure:
    """从轨迹的差分模板重建耗散测度。

    对每个快照区间 ``[t_k, t_{k+1})``（左矩形规则）和每条网格边，在 ``ū`` 所在的速度单元上沉积
    ``ε|Du|²`` 和 ``(4m/(m+1)²)|D u^{[(m+1)/2]}|²``，权重乘以 ``(t_{k+1} - t_k)·h^d``。
    常数解给出零测度。

    Parameters
    -----------
    trajectory: :class:`Trajectory`
        求解器的输出。
    m: :class:`float`
        扩散指数。
    vgrid: :class:`VGrid`
        速度网格，必须覆盖轨迹的取值范围。
    viscosity: Optional[:class:`float`]
        粘性，缺省使用轨迹记录的值。

    Raises
    -------
    CoverageError
        速度网格覆盖不足。
    """
    if viscosity is None:
        viscosity = trajectory.viscosity
    grid = trajectory.grid
    factor = 4.0 * m / (m + 1.0) ** 2
    cell_volume = grid.cell_volume
    weights = trajectory.time_weights()
    pieces: Dict[str, List[np.ndarray]] = {k: [] for k in ('cells', 'values', 'par', 'visc', 'time', 'node', 'axis')}

    for k, (snapshot, dt) in enumerate(zip(trajectory.snapshots, weights)):
        if dt <= 0:
            continue
        u = snapshot.values
        vgrid.check_covers(u)
        diffs = forward_differences(u, grid)
        power_diffs = forward_differences(signed_power(u, (m + 1.0) / 2.0), grid)
        means = edge_means(u, grid)
        for axis, (du, dp, mean) in enumerate(zip(diffs, power_diffs, means)):
            par = factor * dp.ravel() ** 2 * dt * cell_volume
            visc = viscosity * du.ravel() ** 2 * dt * cell_volume
            keep = np.flatnonzero((par + visc) > 0.0)
            if keep.size == 0:
                continue
            values = mean.ravel()[keep]
            pieces['cells'].append(vgrid.cell_index(values))
            pieces['values'].append(values)
            pieces['par'].append(par[keep])
            pieces['visc'].append(visc[keep])
            pieces['time'].append(np.full(keep.size, k, dtype=np.int64))
            pieces['node'].append(keep)
            pieces['axis'].append(np.full(keep.size, axis, dtype=np.int64))

    def joined(key: str, dtype: Any) -> np.ndarray:
        return np.concatenate(pieces[key]) if pieces[key] else np.zeros(0, dtype=dtype)

    measure = DissipationMeasure(
        grid,
        vgrid,
        joined('cells', np.int64),
        parabolic=joined('par', np.float64),
        viscous=joined('visc', np.float64),
        values=joined('values', np.float64),
        time_index=joined('time', np.int64),
        node=joined('node', np.int64),
        axis=joined('axis', np.int64),
        times=trajectory.times,
        parabolic_factor=factor,
    )
    _log.debug('耗散测度：%d 个沉积点，抛物部分 %.6g，粘性部分 %.6g', len(measure), measure.total('parabolic'),
               measure.total('viscous'))
    return measure


def _power_cell_weights(vgrid: VGrid, gamma: float) -> np.ndarray:
    centers = np.abs(vgrid.centers)
    with np.errstate(divide='ignore'):
        weights = np.where(centers > 0, centers, 1.0) ** (-gamma)
    zero = vgrid.zero_cell
    a, b = vgrid.edges[zero], vgrid.edges[zero + 1]
    exponent = 1.0 - gamma
    weights[zero] = (math.copysign(abs(b) ** exponent, b) - math.copysign(abs(a) ** exponent, a)) / (exponent * (b - a))
    return weights


def singular_moment(q: DissipationMeasure, gamma: float, part: str = 'total') -> float:
    """``Σ q·|v|^{-γ}``。

    普通单元使用单元中心的 ``|v_c|^{-γ}``，包含 0 的单元使用 ``|v|^{-γ}`` 在该单元上的精确平均
    （``γ < 1`` 时可积）。``γ = 0`` 时得到 ``q`` 的总质量。

    Raises
    -------
    InvalidArgument
        ``γ ≥ 1``。
    """
    if not gamma < 1:
        raise InvalidArgument(f'奇异矩要求 γ < 1，而不是 {gamma!r}')
    return q.integrate(_power_cell_weights(q.vgrid, gamma), part)


class AuditRow(NamedTuple):
    quantity: str
    gamma: float
    lhs: float
    rhs: float
    implied_constant: float


def _row(quantity: str, gamma: float, lhs: float, rhs: float) -> AuditRow:
    if rhs > 0:
        implied = lhs / rhs
    elif lhs == 0:
        implied = 0.0
    else:
        implied = math.inf
    return AuditRow(quantity, float(gamma), float(lhs), float(rhs), float(implied))


class AuditReport:
    """能量与熵审计的结果。

    .. container:: operations

        .. describe:: len(x)

            返回行数。

        .. describe:: iter(x)

            依次返回 :class:`AuditRow`。

    Attributes
    -----------
    rows: List[:class:`AuditRow`]
        每一行是一个不等式两边的数值与隐含常数 ``lhs / rhs``。
    metadata: Dict[:class:`str`, Any]
        附带的诊断量（例如噪声的 Besov 替代范数）。
    """

    COLUMNS = ('quantity', 'gamma', 'lhs', 'rhs', 'implied_constant')

    __slots__ = ('rows', 'metadata')

    def __init__(self, rows: Sequence[AuditRow] = (), metadata: Optional[Dict[str, Any]] = None):
        self.rows: List[AuditRow] = list(rows)
        self.metadata: Dict[str, Any] = dict(metadata or {})

    def __repr__(self) -> str:
        return f'<AuditReport rows={len(self.rows)}>'

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[AuditRow]:
        return iter(self.rows)

    def extend(self, other: AuditReport) -> AuditReport:
        self.rows.extend(other.rows)
        self.metadata.update(other.metadata)
        return self

    def find(self, quantity: str, gamma: Optional[float] = None) -> Optional[AuditRow]:
        for row in self.rows:
            if row.quantity == quantity and (gamma is None or row.gamma == gamma):
                return row
        return None

    def max_implied(self, prefix: str = '') -> float:
        values = [r.implied_constant for r in self.rows if r.quantity.startswith(prefix)]
        return max(values) if values else 0.0

    def write_csv(self, path: Union[str, os.PathLike]) -> None:
        """写出列为 ``quantity, gamma, lhs, rhs, implied_constant`` 的 CSV。"""
        write_csv(path, self.COLUMNS, self.rows)


def _force_power(force: ForceLike, trajectory: Trajectory, p: float) -> float:
    if force is None:
        return 0.0
    grid = trajectory.grid
    total = 0.0
    for t, w in zip(trajectory.times, trajectory.time_weights()):
        if w > 0:
            values = force_values(force, t, grid)
            total += w * float(np.sum(np.abs(values) ** p)) * grid.cell_volume
    return total


def _sup_power(trajectory: Trajectory, p: float) -> float:
    return max(s.power_integral(p) for s in trajectory.snapshots)


def _clipped_quadratic(radius: float) -> Tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray]]:
    def eta(v: np.ndarray) -> np.ndarray:
        a = np.abs(v)
        return np.where(a <= radius, 0.5 * v * v, radius * a - 0.5 * radius * radius)

    def eta_prime(v: np.ndarray) -> np.ndarray:
        return np.clip(v, -radius, radius)

    return eta, eta_prime


def _psi_delta_prime(delta: float) -> Callable[[np.ndarray], np.ndarray]:
    # ψ_δ(v) = sqrt(v² + δ²) - δ, so ψ_δ' = v / sqrt(v² + δ²) and |ψ_δ| ≤ |v|
    def prime(v: np.ndarray) -> np.ndarray:
        return v / np.sqrt(v * v + delta * delta)

    return prime


def entropy_audit(trajectory: Trajectory, q: DissipationMeasure, gamma: Union[float, Sequence[float]],
                  u0: Optional[Field] = None, force: ForceLike = None, *,
                  radii: Optional[Sequence[float]] = None, deltas: Sequence[float] = (0.1, 0.01)) -> AuditReport:
    """计算能量不等式和凸熵不等式的两边。

    每个 ``γ`` 给出一行 ``energy``：

    ``sup_t ‖u‖_{2-γ}^{2-γ} + (1-γ)·Σ|v|^{-γ}q  ≤  C(‖u0‖_{2-γ}^{2-γ} + ‖S‖_{2-γ}^{2-γ})``。

    截断二次熵 ``η_R``（``η_R'' = 1_{|v|≤R}``）给出 ``clipped-quadratic(R=...)`` 行，右边为
    ``∫η_R(u0) + R‖S‖₁``，常数应不超过 1。``ψ_δ(v) = sqrt(v²+δ²) - δ`` 给出 ``psi-delta(δ=...)`` 行，
    右边为 ``‖u0‖₁ + ‖S‖₁``，常数应对 ``δ`` 一致有界（不超过 3）。

    ``u0`` 缺省为轨迹的第一个快照。报告总是会生成，即使两边都是 0。
    """
    if u0 is None:
        u0 = trajectory.initial
    gammas = [float(gamma)] if isinstance(gamma, (int, float)) else [float(g) for g in gamma]
    report = AuditReport(metadata={'entropy_audit': True})
    vgrid = q.vgrid

    for g in gammas:
        p = 2.0 - g
        lhs = _sup_power(trajectory, p) + (1.0 - g) * singular_moment(q, g)
        rhs = u0.power_integral(p) + _force_power(force, trajectory, p)
        report.rows.append(_row('energy', g, lhs, rhs))

    force_l1 = _force_power(force, trajectory, 1.0)
    if radii is None:
        top = max(s.max_abs() for s in trajectory.snapshots)
        radii = [r for r in (0.25 * top, 0.5 * top, top) if r > 0] or [1.0]
    primary = gammas[0] if gammas else 0.0
    for radius in radii:
        eta, eta_prime = _clipped_quadratic(radius)
        dissipated = q.integrate(vgrid.cell_average(eta_prime))
        lhs = max(float(np.sum(eta(s.values))) * s.grid.cell_volume for s in trajectory.snapshots) + dissipated
        rhs = float(np.sum(eta(u0.values))) * u0.grid.cell_volume + radius * force_l1
        report.rows.append(_row(f'clipped-quadratic(R={radius:.6g})', primary, lhs, rhs))

    u0_l1 = u0.power_integral(1.0)
    for delta in deltas:
        lhs = q.integrate(vgrid.cell_average(_psi_delta_prime(delta)))
        report.rows.append(_row(f'psi-delta(delta={delta:.6g})', primary, lhs, u0_l1 + force_l1))

    _log.info('熵审计完成：%d 行，最大隐含常数 %.4g', len(report), report.max_implied())
    return report


def gradient_power_integral(trajectory: Trajectory, exponent: float) -> float:
    """``∫∫ |∇_h u^{[exponent]}|² dx dt``，时间用左矩形规则。"""
    grid = trajectory.grid
    total = 0.0
    for snapshot, w in zip(trajectory.snapshots, trajectory.time_weights()):
        if w <= 0:
            continue
        diffs = forward_differences(signed_power(snapshot.values, exponent), grid)
        total += w * sum(float(np.sum(d * d)) for d in diffs) * grid.cell_volume
    return total


def _spectral_filter(field: Field, multiplier: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    if field.grid.dim != 1:
        raise GridError('负指数 Sobolev 替代范数只在一维上实现')
    dirichlet = field.grid.boundary is Boundary.dirichlet
    working = odd_extension(field) if dirichlet else field
    (xi,) = working.grid.angular_frequencies()
    values = scipy.fft.ifft(scipy.fft.fft(working.values) * multiplier(xi)).real
    return values[: field.grid.n] if dirichlet else values


def negative_sobolev_power(field: Field, p: float) -> float:
    """``‖S‖_{W^{-1,p}}^p`` 的傅里叶替代：``‖F^{-1}[(1+|ξ|²)^{-1/2} Ŝ]‖_p^p``。

    狄利克雷场先做奇延拓，结果限制回原区间。
    """
    filtered = _spectral_filter(field, lambda xi: 1.0 / np.sqrt(1.0 + xi * xi))
    return float(np.sum(np.abs(filtered) ** p) * field.grid.cell_volume)


def noise_besov_surrogate(field: Field, s: float = -0.5) -> float:
    """``max_j 2^{js}‖Δ_j S‖_∞``，即 ``B^s_{∞,∞}`` 范数的分块替代。"""
    working = odd_extension(field) if field.grid.boundary is Boundary.dirichlet else field
    partition = DyadicPartition.for_grid(working.grid)
    spectrum = scipy.fft.fftn(working.values)
    best = 0.0
    for j, w in enumerate(partition.grid_weights(working.grid)):
        block = scipy.fft.ifftn(spectrum * w).real
        best = max(best, 2.0 ** (j * s) * float(np.max(np.abs(block))))
    return best


def anderson_energy_audit(trajectory: Trajectory, q: DissipationMeasure, m: float, potential: Field, *,
                          alpha: Optional[float] = None) -> AuditReport:
    """Anderson 模型的能量审计。

    ``anderson-energy`` 行：左边 ``sup_t ‖u‖_{α+1}^{α+1} + ∫∫(∂_x u^{[(m+α)/2]})²``，
    右边 ``‖u0‖_{α+1}^{α+1} + T·‖S^ε‖_{W^{-1,τ'}}^{τ'}``，其中 ``τ = (2α+2)/(2α+3-m)``。

    ``anderson-moment`` 行：左边为 ``Σ|v|^{α-1} n``，即 ``γ = 1 - α`` 的奇异矩，右边同上。
    元数据中的 ``moment_identity_ratio`` 是奇异矩与 ``(4m/(m+α)²)∫∫(∂_x u^{[(m+α)/2]})²`` 之比，应接近 1。
    """
    if alpha is None:
        alpha = m
    if not alpha > max(m - 2.0, 0.0):
        raise InvalidArgument(f'需要 α > max(m - 2, 0)，而不是 {alpha!r}')
    tau = (2.0 * alpha + 2.0) / (2.0 * alpha + 3.0 - m)
    tau_dual = tau / (tau - 1.0)
    t_span = trajectory.times[-1] - trajectory.times[0]
    u0 = trajectory.initial

    gradient = gradient_power_integral(trajectory, (m + alpha) / 2.0)
    noise_term = t_span * negative_sobolev_power(potential, tau_dual)
    rhs = u0.power_integral(alpha + 1.0) + noise_term
    moment = singular_moment(q, 1.0 - alpha, part='parabolic')
    expected = 4.0 * m / (m + alpha) ** 2 * gradient
    besov = noise_besov_surrogate(potential)
    _log.info('Anderson 审计：‖S^ε‖ 的 B^{-1/2}_{∞,∞} 替代范数 %.6g，τ=%.4g', besov, tau)

    return AuditReport(
        [
            _row('anderson-energy', 1.0 - alpha, _sup_power(trajectory, alpha + 1.0) + gradient, rhs),
            _row('anderson-moment', 1.0 - alpha, moment, rhs),
        ],
        metadata={
            'tau': tau,
            'noise_besov_surrogate': besov,
            'moment_identity_ratio': moment / expected if expected > 0 else 1.0,
        },
    )


def nikolskii_energy_audit(trajectory: Trajectory, m: float, gamma: float, force: ForceLike = None) -> AuditReport:
    """``m ≥ 2`` 时 Nikolskii 正则性的审计。

    ``nikolskii`` 行：``∫₀ᵀ |u|_{N^{2/(m+γ), m+γ}}^{m+γ} dt ≤ C(‖u0‖_{1+γ}^{1+γ} + ‖S‖_{1+γ}^{1+γ})``。
    ``gradient-energy`` 行：``sup_t‖u‖_{1+γ}^{1+γ} + c∫∫(∇u^{[(γ+m)/2]})²``，``c = 4γm(1+γ)/(γ+m)²``，右边同上。
    """
    from .spectral import nikolskii_seminorm

    if not m >= 2:
        raise InvalidArgument(f'Nikolskii 审计要求 m ≥ 2，而不是 {m!r}')
    if not gamma > 0:
        raise InvalidArgument(f'需要 γ > 0，而不是 {gamma!r}')
    p = m + gamma
    s = 2.0 / p
    lhs = 0.0
    for snapshot, w in zip(trajectory.snapshots, trajectory.time_weights()):
        if w > 0:
            value, _ = nikolskii_seminorm(snapshot, s, p)
            lhs += w * value
    rhs = trajectory.initial.power_integral(1.0 + gamma) + _force_power(force, trajectory, 1.0 + gamma)
    c = 4.0 * gamma * m * (1.0 + gamma) / (gamma + m) ** 2
    energy = _sup_power(trajectory, 1.0 + gamma) + c * gradient_power_integral(trajectory, (gamma + m) / 2.0)
    return AuditReport(
        [_row('nikolskii', gamma, lhs, rhs), _row('gradient-energy', gamma, energy, rhs)],
        metadata={'nikolskii_s': s, 'nikolskii_p': p},
    )


class BasketFunction(NamedTuple):
    """张量积检验函数 ``w(t)·e_k(x)·b(v)``，``e_k`` 是 cos 或 sin 模式。"""

    label: str
    mode: Tuple[int, ...]
    kind: str
    profile: Callable[[np.ndarray], np.ndarray]
    profile_prime: Callable[[np.ndarray], np.ndarray]


def _gaussian(v: np.ndarray) -> np.ndarray:
    return np.exp(-v * v)


def _gaussian_prime(v: np.ndarray) -> np.ndarray:
    return -2.0 * v * np.exp(-v * v)


def _odd_gaussian(v: np.ndarray) -> np.ndarray:
    return v * np.exp(-v * v)


def _odd_gaussian_prime(v: np.ndarray) -> np.ndarray:
    return (1.0 - 2.0 * v * v) * np.exp(-v * v)


def _shifted_gaussian(v: np.ndarray) -> np.ndarray:
    return np.exp(-2.0 * (v - 0.5) ** 2)


def _shifted_gaussian_prime(v: np.ndarray) -> np.ndarray:
    return -4.0 * (v - 0.5) * np.exp(-2.0 * (v - 0.5) ** 2)


_PROFILES = (
    ('gauss', _gaussian, _gaussian_prime),
    ('odd', _odd_gaussian, _odd_gaussian_prime),
    ('shifted', _shifted_gaussian, _shifted_gaussian_prime),
)


def default_basket(dim: int) -> List[BasketFunction]:
    """固定的 12 个检验函数：两个空间模式 × {cos, sin} × 三个速度剖面。

    一维模式为 ``k = 1, 2``，二维为 ``(1, 0), (1, 1)``。时间因子总是 ``sin²(πt/T)``。
    """
    modes = [(1,), (2,)] if dim == 1 else [(1, 0), (1, 1)]
    basket = []
    for mode in modes:
        for kind in ('cos', 'sin'):
            for name, profile, prime in _PROFILES:
                label = f'{kind}{mode}-{name}'
                basket.append(BasketFunction(label, mode, kind, profile, prime))
    return basket


class KineticResidual(NamedTuple):
    labels: List[str]
    residuals: List[float]
    scales: List[float]

    @property
    def max_abs(self) -> float:
        return max(abs(r) for r in self.residuals) if self.residuals else 0.0

    @property
    def relative(self) -> float:
        """最大残差除以最大的单项规模。"""
        scale = max(self.scales) if self.scales else 0.0
        return self.max_abs / scale if scale > 0 else 0.0


def _antiderivative(func: Callable[[np.ndarray], np.ndarray], vgrid: VGrid, points: int = 4001) \
        -> Callable[[np.ndarray], np.ndarray]:
    v = np.linspace(vgrid.v_min, vgrid.v_max, points)
    table = cumulative_trapezoid(func(v), v, initial=0.0)
    table -= np.interp(0.0, v, table)
    return lambda x: np.interp(x, v, table)


def kinetic_residual(trajectory: Trajectory, q: DissipationMeasure, m: float, force: ForceLike = None, *,
                     viscosity: Optional[float] = None,
                     basket: Optional[Sequence[BasketFunction]] = None) -> KineticResidual:
    """动理学方程 ``∂_t f - (m|v|^{m-1} + ε)Δf = ∂_v q + S δ_{v=u}`` 的分布残差。

    对检验函数 ``φ`` 计算

    ``R(φ) = -∫f ∂_tφ - ∫f (m|v|^{m-1}+ε) Δφ + ∫q ∂_vφ - ∫S φ(t, x, u)``。

    ``f`` 的速度积分用恒等式 ``∫ f g dv = ∫_0^u g dv`` 和预先制好的原函数表计算；
    ``Δ`` 用离散拉普拉斯算子在傅里叶模式上的特征值。只支持周期网格。
    """
    grid = trajectory.grid
    if grid.boundary is not Boundary.periodic:
        raise GridError('动理学残差只在周期网格上计算')
    if viscosity is None:
        viscosity = trajectory.viscosity
    if basket is None:
        basket = default_basket(grid.dim)
    vgrid = q.vgrid
    times = np.asarray(trajectory.times)
    t0, span = times[0], times[-1] - times[0]
    weights = trajectory.time_weights()
    h = grid.spacing
    coords = grid.coordinates()
    cell = grid.cell_volume

    def temporal(t: np.ndarray) -> np.ndarray:
        return np.sin(math.pi * (t - t0) / span) ** 2

    def temporal_prime(t: np.ndarray) -> np.ndarray:
        return (math.pi / span) * np.sin(2.0 * math.pi * (t - t0) / span)

    labels, residuals, scales = [], [], []
    for test in basket:
        phase = sum(2.0 * math.pi * k * c / grid.length for k, c in zip(test.mode, coords))
        spatial = np.cos(phase) if test.kind == 'cos' else np.sin(phase)
        eigen = -sum(4.0 / h ** 2 * math.sin(math.pi * k * h / grid.length) ** 2 for k in test.mode)
        profile_integral = _antiderivative(test.profile, vgrid)
        flux_integral = _antiderivative(
            lambda v, b=test.profile: (m * np.abs(v) ** (m - 1.0) + viscosity) * b(v), vgrid)

        time_term = diffusion_term = source_term = 0.0
        for k, (t, w) in enumerate(zip(times, weights)):
            if w <= 0:
                continue
            u = trajectory.snapshots[k].values
            time_term += w * temporal_prime(t) * float(np.sum(spatial * profile_integral(u))) * cell
            diffusion_term += w * temporal(t) * eigen * float(np.sum(spatial * flux_integral(u))) * cell
            source = force_values(force, float(t), grid)
            if source is not None:
                source_term += w * temporal(t) * float(np.sum(spatial * test.profile(u) * source)) * cell

        dissipation_term = 0.0
        if len(q):
            offsets = [np.zeros(len(q)) for _ in range(grid.dim)]
            node = np.unravel_index(q.node, grid.shape)
            positions = [coords[a][node] for a in range(grid.dim)]
            for a in range(grid.dim):
                offsets[a] = np.where(q.axis == a, 0.5 * h, 0.0)
            edge_phase = sum(2.0 * math.pi * k * (p + o) / grid.length
                             for k, p, o in zip(test.mode, positions, offsets))
            edge_spatial = np.cos(edge_phase) if test.kind == 'cos' else np.sin(edge_phase)
            deposit_times = times[q.time_index]
            dissipation_term = float(np.sum(q.weights() * temporal(deposit_times) * edge_spatial
                                            * test.profile_prime(q.values)))

        residual = -time_term - diffusion_term + dissipation_term - source_term
        labels.append(test.label)
        residuals.append(residual)
        scales.append(max(abs(time_term), abs(diffusion_term), abs(dissipation_term), abs(source_term)))

    result = KineticResidual(labels, residuals, scales)
    _log.debug('动理学残差：最大 %.3e，相对 %.3e', result.max_abs, result.relative)
    return result
