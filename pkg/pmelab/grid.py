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

import io
import logging
import math
import os
import struct
from typing import Any, Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.fft

from .enum import Boundary, try_enum
from .error import GridError, InvalidArgument, SnapshotError

__all__ = (
    'Grid',
    'Field',
    'Spectrum',
    'DyadicPartition',
    'smooth_step',
    'bump',
    'dft_forward',
    'dft_inverse',
    'make_partition',
    'lp_project',
    'lp_blocks',
    'odd_extension',
    'signed_power',
    'power_inequality_constant',
    'write_snapshot',
    'read_snapshot',
    'laplacian',
    'forward_differences',
    'edge_means',
    'restrict_odd',
    'smooth_step_derivative',
)

_log = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray, Sequence[float]]

_SNAPSHOT_MAGIC = b'PMEF'
_SNAPSHOT_VERSION = 1
_SNAPSHOT_HEADER = struct.Struct('<4sBBIdB')


def _is_power_of_two(value: int) -> bool:
    return value > 0 and (value & (value - 1)) == 0


class Grid:
    """代表一个一维或二维的均匀网格。

    周期网格的节点为 ``x_i = i·h`` (``i = 0..n-1``)，区间为 ``[0, L)``。
    狄利克雷网格（仅一维）使用同样的节点，节点 0 是左边界，
    右边界 ``x = L`` 不存储，两端的值都视为 0。

    .. container:: operations

        .. describe:: x == y

            检查两个网格是否相同。

        .. describe:: hash(x)

            返回网格的哈希值。

    Attributes
    -----------
    dim: :class:`int`
        空间维数，1 或 2。
    n: :class:`int`
        每个轴上的点数，必须是不小于 8 的 2 的幂。
    length: :class:`float`
        每个轴上的盒子长度。
    boundary: :class:`Boundary`
        边界类型。
    """

    __slots__ = ('dim', 'n', 'length', 'boundary', '_wavenumbers', '_radial')

    def __init__(self, dim: int, n: int, length: float = 1.0, boundary: Any = Boundary.periodic):
        if dim not in (1, 2):
            raise GridError(f'网格维数必须是 1 或 2，而不是 {dim!r}')
        if not isinstance(n, (int, np.integer)) or n < 8 or not _is_power_of_two(int(n)):
            raise GridError(f'每轴点数必须是不小于 8 的 2 的幂，而不是 {n!r}')
        if not (length > 0 and math.isfinite(length)):
            raise GridError(f'盒子长度必须为正，而不是 {length!r}')
        if isinstance(boundary, str):
            try:
                boundary = Boundary[boundary]
            except KeyError:
                raise GridError(f'未知的边界类型 {boundary!r}') from None
        elif not isinstance(boundary, Boundary):
            boundary = try_enum(Boundary, boundary)
        if not isinstance(boundary, Boundary):
            raise GridError(f'未知的边界类型 {boundary!r}')
        if boundary is Boundary.dirichlet and dim != 1:
            raise GridError('狄利克雷边界只支持一维网格')

        self.dim: int = int(dim)
        self.n: int = int(n)
        self.length: float = float(length)
        self.boundary: Boundary = boundary
        self._wavenumbers: Optional[Tuple[np.ndarray, ...]] = None
        self._radial: Optional[np.ndarray] = None

    def __repr__(self) -> str:
        return f'<Grid dim={self.dim} n={self.n} length={self.length!r} boundary={self.boundary}>'

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, Grid)
            and self.dim == other.dim
            and self.n == other.n
            and self.length == other.length
            and self.boundary is other.boundary
        )

    def __ne__(self, other: Any) -> bool:
        return not self.__eq__(other)

    def __hash__(self) -> int:
        return hash((self.dim, self.n, self.length, self.boundary.value))

    @property
    def spacing(self) -> float:
        """:class:`float`: 网格步长 ``h = length / n``。"""
        return self.length / self.n

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n ** self.dim

    @property
    def cell_volume(self) -> float:
        """:class:`float`: ``h^d``，求和型积分的权重。"""
        return self.spacing ** self.dim

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.periodic

    def axis(self) -> np.ndarray:
        """返回单个轴上的节点坐标。"""
        return np.arange(self.n) * self.spacing

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """返回每个轴的节点坐标数组（``indexing='ij'`` 的网格）。"""
        axis = self.axis()
        if self.dim == 1:
            return (axis,)
        return tuple(np.meshgrid(axis, axis, indexing='ij'))

    def wavenumbers(self) -> Tuple[np.ndarray, ...]:
        """返回每个轴上的整数波数 ``k``（每个盒子长度内的周期数），与 :func:`dft_forward` 的排列一致。"""
        if self._wavenumbers is None:
            k = np.fft.fftfreq(self.n, d=1.0 / self.n)
            if self.dim == 1:
                self._wavenumbers = (k,)
            else:
                self._wavenumbers = tuple(np.meshgrid(k, k, indexing='ij'))
        return self._wavenumbers

    def radial_wavenumber(self) -> np.ndarray:
        """返回 ``|k|``，二进分块就在这个变量上进行。"""
        if self._radial is None:
            self._radial = np.sqrt(sum(k * k for k in self.wavenumbers()))
        return self._radial

    def angular_frequencies(self) -> Tuple[np.ndarray, ...]:
        """返回物理角频率 ``ξ = 2πk / L``。"""
        scale = 2.0 * math.pi / self.length
        return tuple(scale * k for k in self.wavenumbers())

    @property
    def max_block(self) -> int:
        """:class:`int`: 使 ``2^jmax`` 覆盖所有可表示波数的最小块指标。"""
        kmax = (self.n / 2) * math.sqrt(self.dim)
        return max(2, int(math.ceil(math.log2(kmax) - 1e-12)))

    def refined(self, factor: int = 2) -> Grid:
        """返回点数乘以 ``factor`` 的同尺寸网格。"""
        return Grid(self.dim, self.n * factor, self.length, self.boundary)

    def to_dict(self) -> dict:
        return {'dim': self.dim, 'n': self.n, 'length': self.length, 'boundary': self.boundary.name}

    @classmethod
    def from_dict(cls, data: dict) -> Grid:
        return cls(data['dim'], data['n'], data.get('length', 1.0), data.get('boundary', 'periodic'))


class Field:
    """网格上的实值场，存放 ``u``、``u0`` 和 ``S(t, ·)`` 的快照。

    值数组在构造时被复制并设为只读。

    .. container:: operations

        .. describe:: x + y, x - y

            逐点相加或相减两个同网格的场。

        .. describe:: c * x

            乘以标量。

    Attributes
    -----------
    grid: :class:`Grid`
        场所在的网格。
    values: :class:`numpy.ndarray`
        每个节点的值，形状为 ``grid.shape``。
    """

    __slots__ = ('grid', 'values')

    def __init__(self, grid: Grid, values: ArrayLike):
        array = np.array(values, dtype=np.float64)
        if array.shape != grid.shape:
            raise GridError(f'值的形状 {array.shape} 与网格形状 {grid.shape} 不符')
        if not np.all(np.isfinite(array)):
            raise GridError('场的值必须是有限的（不能包含 NaN 或 Inf）')
        if grid.boundary is Boundary.dirichlet and array[0] != 0.0:
            raise GridError('狄利克雷场在边界节点上必须为 0')
        array.setflags(write=False)
        self.grid: Grid = grid
        self.values: np.ndarray = array

    @classmethod
    def zeros(cls, grid: Grid) -> Field:
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> Field:
        values = np.full(grid.shape, float(value))
        if grid.boundary is Boundary.dirichlet:
            values[0] = 0.0
        return cls(grid, values)

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[..., np.ndarray]) -> Field:
        """在节点坐标上求值 ``func(*coordinates)``。狄利克雷网格的边界节点被置为 0。"""
        values = np.array(np.broadcast_to(func(*grid.coordinates()), grid.shape), dtype=np.float64)
        if grid.boundary is Boundary.dirichlet:
            values[0] = 0.0
        return cls(grid, values)

    def with_values(self, values: ArrayLike) -> Field:
        return Field(self.grid, values)

    def __repr__(self) -> str:
        return f'<Field grid={self.grid!r} max_abs={self.max_abs():.6g}>'

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, Field) and self.grid == other.grid and np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore

    def _check_same(self, other: Field) -> None:
        if self.grid != other.grid:
            raise GridError('两个场不在同一个网格上')

    def __add__(self, other: Field) -> Field:
        self._check_same(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: Field) -> Field:
        self._check_same(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> Field:
        return Field(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> Field:
        return Field(self.grid, -self.values)

    def norm(self, p: float = 2.0) -> float:
        """离散 ``L^p`` 范数 ``(Σ|u|^p h^d)^{1/p}``；``p = inf`` 时为最大模。"""
        return _lp_norm(self.values, p, self.grid.cell_volume)

    def power_integral(self, p: float) -> float:
        """``Σ|u|^p h^d``，即 ``‖u‖_p^p``。"""
        return float(np.sum(np.abs(self.values) ** p) * self.grid.cell_volume)

    def mass(self) -> float:
        """离散质量 ``Σu h^d``。"""
        return float(np.sum(self.values) * self.grid.cell_volume)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def _lp_norm(values: np.ndarray, p: float, weight: float) -> float:
    if p == math.inf:
        return float(np.max(np.abs(values))) if values.size else 0.0
    if p <= 0:
        raise InvalidArgument(f'积分指数 p 必须为正，而不是 {p!r}')
    return float((np.sum(np.abs(values) ** p) * weight) ** (1.0 / p))


class Spectrum:
    """周期场的离散傅里叶系数（未归一化的 ``fftn`` 约定）。

    Parseval 恒等式为 ``Σ|u|² = Σ|û|² / N``，其中 ``N = n^d``。

    Attributes
    -----------
    grid: :class:`Grid`
        原始场的网格。
    coefficients: :class:`numpy.ndarray`
        复系数，排列同 :func:`numpy.fft.fftfreq`。
    """

    __slots__ = ('grid', 'coefficients')

    def __init__(self, grid: Grid, coefficients: np.ndarray):
        self.grid: Grid = grid
        self.coefficients: np.ndarray = coefficients

    def __repr__(self) -> str:
        return f'<Spectrum grid={self.grid!r}>'

    def energy(self) -> float:
        """``Σ|û|² / N``，与 ``Σ|u|²`` 相等。"""
        return float(np.sum(np.abs(self.coefficients) ** 2) / self.grid.size)

    def filtered(self, weights: np.ndarray) -> Spectrum:
        return Spectrum(self.grid, self.coefficients * weights)


def _require_periodic(grid: Grid) -> None:
    if grid.boundary is not Boundary.periodic:
        raise GridError('谱运算只适用于周期网格；狄利克雷场请先用 odd_extension 延拓')


def dft_forward(field: Field, *, workers: Optional[int] = None) -> Spectrum:
    """计算周期场的离散傅里叶变换。

    Parameters
    -----------
    field: :class:`Field`
        周期网格上的场。
    workers: Optional[:class:`int`]
        传给 :func:`scipy.fft.fftn` 的线程数。结果与线程数无关。

    Raises
    -------
    GridError
        网格不是周期的。
    """
    _require_periodic(field.grid)
    return Spectrum(field.grid, scipy.fft.fftn(field.values, workers=workers))


def dft_inverse(spectrum: Spectrum, *, workers: Optional[int] = None) -> Field:
    """:func:`dft_forward` 的逆变换，丢弃舍入产生的虚部。"""
    _require_periodic(spectrum.grid)
    values = scipy.fft.ifftn(spectrum.coefficients, workers=workers).real
    return Field(spectrum.grid, values)


def smooth_step(t: ArrayLike) -> np.ndarray:
    """C∞ 阶跃函数：``t ≤ 0`` 时为 0，``t ≥ 1`` 时为 1，
    中间为 ``g(t) / (g(t) + g(1-t))``，其中 ``g(t) = exp(-1/t)``。"""
    t = np.asarray(t, dtype=np.float64)
    inside = (t > 0.0) & (t < 1.0)
    tc = np.where(inside, t, 0.5)
    g = np.exp(-1.0 / tc)
    h = np.exp(-1.0 / (1.0 - tc))
    return np.where(t >= 1.0, 1.0, np.where(inside, g / (g + h), 0.0))


def smooth_step_derivative(t: ArrayLike) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    inside = (t > 0.0) & (t < 1.0)
    tc = np.where(inside, t, 0.5)
    g = np.exp(-1.0 / tc)
    h = np.exp(-1.0 / (1.0 - tc))
    dg = g / tc ** 2
    dh = h / (1.0 - tc) ** 2
    return np.where(inside, (dg * h + g * dh) / (g + h) ** 2, 0.0)


def bump(r: ArrayLike) -> np.ndarray:
    """径向截断：``r ≤ 1/2`` 时为 1，``r ≥ 1`` 时为 0。"""
    return 1.0 - smooth_step(2.0 * np.abs(np.asarray(r, dtype=np.float64)) - 1.0)


class DyadicPartition:
    r"""光滑的二进单位分解 ``φ₀ + Σ_{j≥1} φ₁(2^{-j}·) = 1``。

    轮廓取为

    * ``φ₀(r) = bump(r/2)``，支撑在 ``|r| < 2`` 的球内，在 ``|r| ≤ 1`` 上为 1；
    * ``φ₁(r) = bump(r/2) - bump(r)``，支撑在 ``1/2 ≤ |r| ≤ 2`` 的环上。

    求和是伸缩的：``φ₀(r) + Σ_{j=1}^{J} φ₁(2^{-j}r) = bump(2^{-J-1}r)``，
    所以 ``φ₀ = 1 - Σ_{j≥1} φ₁(2^{-j}·)``，并且对 ``|r| ≤ 2^J`` 和恰好为 1。

    频率变量是整数波数 ``|k|``，这样 ``|k| = 2^j`` 的纯模恰好落在第 ``j`` 块。

    Attributes
    -----------
    jmax: :class:`int`
        最大块指标。
    """

    __slots__ = ('jmax', '_weight_cache')

    def __init__(self, jmax: int):
        if int(jmax) != jmax or jmax < 2:
            raise InvalidArgument(f'jmax 必须是不小于 2 的整数，而不是 {jmax!r}')
        self.jmax: int = int(jmax)
        self._weight_cache: dict = {}

    def __repr__(self) -> str:
        return f'<DyadicPartition jmax={self.jmax}>'

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, DyadicPartition) and self.jmax == other.jmax

    def __hash__(self) -> int:
        return hash(self.jmax)

    @classmethod
    def for_grid(cls, grid: Grid) -> DyadicPartition:
        return cls(grid.max_block)

    @staticmethod
    def phi0(r: ArrayLike) -> np.ndarray:
        return bump(np.asarray(r, dtype=np.float64) / 2.0)

    @staticmethod
    def phi1(r: ArrayLike) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        return bump(r / 2.0) - bump(r)

    def weight(self, j: int, r: ArrayLike) -> np.ndarray:
        """第 ``j`` 块在径向频率 ``r`` 处的权重。"""
        if not 0 <= j <= self.jmax:
            raise InvalidArgument(f'块指标 {j} 超出范围 [0, {self.jmax}]')
        if j == 0:
            return self.phi0(r)
        return self.phi1(np.asarray(r, dtype=np.float64) / 2.0 ** j)

    def total(self, r: ArrayLike) -> np.ndarray:
        return sum(self.weight(j, r) for j in range(self.jmax + 1))

    def grid_weights(self, grid: Grid) -> List[np.ndarray]:
        """返回网格频率上每一块的权重数组（按网格缓存）。"""
        try:
            return self._weight_cache[grid]
        except KeyError:
            radial = grid.radial_wavenumber()
            weights = [self.weight(j, radial) for j in range(self.jmax + 1)]
            for w in weights:
                w.setflags(write=False)
            self._weight_cache[grid] = weights
            return weights


def make_partition(jmax: int) -> DyadicPartition:
    """构造 ``jmax`` 块的二进单位分解。"""
    return DyadicPartition(jmax)


def lp_blocks(field: Field, partition: Optional[DyadicPartition] = None, *,
              workers: Optional[int] = None) -> List[np.ndarray]:
    """一次傅里叶变换得到所有 Littlewood-Paley 块 ``Δ_j u`` 的值数组。"""
    if partition is None:
        partition = DyadicPartition.for_grid(field.grid)
    spectrum = dft_forward(field, workers=workers)
    return [
        scipy.fft.ifftn(spectrum.coefficients * w, workers=workers).real
        for w in partition.grid_weights(field.grid)
    ]


def lp_project(field: Field, j: int, partition: Optional[DyadicPartition] = None, *,
               workers: Optional[int] = None) -> Field:
    """返回第 ``j`` 个 Littlewood-Paley 块 ``Δ_j u``。

    Raises
    -------
    GridError
        网格不是周期的。
    InvalidArgument
        ``j`` 超出 ``[0, jmax]``。
    """
    if partition is None:
        partition = DyadicPartition.for_grid(field.grid)
    if not 0 <= j <= partition.jmax:
        raise InvalidArgument(f'块指标 {j} 超出范围 [0, {partition.jmax}]')
    spectrum = dft_forward(field, workers=workers)
    weights = partition.grid_weights(field.grid)[j]
    return dft_inverse(spectrum.filtered(weights), workers=workers)


def odd_extension(field: Field) -> Field:
    """将一维狄利克雷场奇延拓到两倍长度的周期网格上。

    延拓值为 ``[u_0, ..., u_{n-1}, 0, -u_{n-1}, ..., -u_1]``。
    这是对狄利克雷问题做谱分析时使用的近似。
    """
    grid = field.grid
    if grid.boundary is not Boundary.dirichlet:
        raise GridError('只有狄利克雷场需要奇延拓')
    u = field.values
    values = np.concatenate([u, [0.0], -u[:0:-1]])
    return Field(Grid(1, 2 * grid.n, 2 * grid.length, Boundary.periodic), values)


def restrict_odd(extended: np.ndarray, grid: Grid) -> Field:
    """:func:`odd_extension` 的逆：取回前 ``n`` 个节点。"""
    values = np.array(extended[: grid.n], dtype=np.float64)
    values[0] = 0.0
    return Field(grid, values)


def signed_power(x: ArrayLike, m: float) -> Any:
    """带符号的幂 ``x^{[m]} = |x|^{m-1} x``。

    对标量输入返回 :class:`float`，对数组输入返回数组。
    """
    if m <= 0:
        raise InvalidArgument(f'幂次必须为正，而不是 {m!r}')
    arr = np.asarray(x, dtype=np.float64)
    result = np.sign(arr) * np.abs(arr) ** m
    if result.ndim == 0:
        return float(result)
    return result


def power_inequality_constant(m: float, *, radius: float = 10.0, points: int = 801) -> float:
    """在 ``[-radius, radius]²`` 的格点上暴力扫描
    ``|r - s|^m / |r^{[m/2]} - s^{[m/2]}|²`` 的上确界。

    格点关于 0 对称（``points`` 为奇数），所以包含 ``s = -r`` 的点，
    上确界 ``2^{m-2}`` 就在那里取到。

    Raises
    -------
    InvalidArgument
        ``m < 2``，此时比值在对角线附近无界。
    """
    if m < 2:
        raise InvalidArgument(f'm 必须不小于 2，而不是 {m!r}')
    if points % 2 == 0:
        points += 1
    axis = np.linspace(-radius, radius, points)
    r, s = np.meshgrid(axis, axis, indexing='ij')
    denominator = (signed_power(r, m / 2.0) - signed_power(s, m / 2.0)) ** 2
    mask = denominator > 0.0
    ratio = np.abs(r - s)[mask] ** m / denominator[mask]
    return float(np.max(ratio))


def write_snapshot(field: Field, fp: Union[str, bytes, os.PathLike, io.BufferedIOBase]) -> None:
    """将场写成二进制快照。

    格式（小端序）：头部 ``<4sBBIdB``，依次为魔数 ``PMEF``、格式版本、维数、
    每轴点数、盒子长度、边界标签；之后是按行优先排列的 ``float64`` 值。
    """
    grid = field.grid
    header = _SNAPSHOT_HEADER.pack(_SNAPSHOT_MAGIC, _SNAPSHOT_VERSION, grid.dim, grid.n, grid.length,
                                   grid.boundary.value)
    payload = np.ascontiguousarray(field.values, dtype='<f8').tobytes(order='C')
    if isinstance(fp, io.IOBase):
        fp.write(header)
        fp.write(payload)
    else:
        from .utils import atomic_write

        atomic_write(fp, header + payload)


def read_snapshot(fp: Union[str, bytes, os.PathLike, io.BufferedIOBase]) -> Field:
    """读取 :func:`write_snapshot` 写出的快照。

    Raises
    -------
    SnapshotError
        魔数、版本或长度不符。
    """
    if isinstance(fp, io.IOBase):
        data = fp.read()
    else:
        with open(fp, 'rb') as f:
            data = f.read()

    if len(data) < _SNAPSHOT_HEADER.size:
        raise SnapshotError('快照文件太短，缺少文件头')
    magic, version, dim, n, length, tag = _SNAPSHOT_HEADER.unpack_from(data)
    if magic != _SNAPSHOT_MAGIC:
        raise SnapshotError(f'魔数错误：{magic!r}')
    if version != _SNAPSHOT_VERSION:
        raise SnapshotError(f'不支持的快照版本 {version}')
    try:
        grid = Grid(dim, n, length, Boundary(tag))
    except (GridError, ValueError) as exc:
        raise SnapshotError(f'快照文件头无效：{exc}') from exc
    expected = grid.size * 8
    body = data[_SNAPSHOT_HEADER.size:]
    if len(body) != expected:
        raise SnapshotError(f'快照数据长度 {len(body)} 与文件头要求的 {expected} 不符')
    values = np.frombuffer(body, dtype='<f8').reshape(grid.shape)
    return Field(grid, values)



def laplacian(values: np.ndarray, grid: Grid) -> np.ndarray:
    """二阶中心差分拉普拉斯算子。

    周期网格按轴用 :func:`numpy.roll`；狄利克雷网格以 0 作为两端的幽灵值，
    边界节点上的结果为 0。
    """
    h2 = grid.spacing ** 2
    if grid.boundary is Boundary.periodic:
        out = np.zeros_like(values)
        for axis in range(grid.dim):
            out += np.roll(values, -1, axis=axis) - 2.0 * values + np.roll(values, 1, axis=axis)
        return out / h2

    padded = np.concatenate([values, [0.0]])
    out = np.zeros_like(values)
    out[1:] = (padded[2:] - 2.0 * padded[1:-1] + padded[:-2]) / h2
    return out


def forward_differences(values: np.ndarray, grid: Grid) -> List[np.ndarray]:
    """每个轴上的前向差商 ``(u_{i+1} - u_i) / h``。

    周期网格返回与 ``values`` 同形状的数组；狄利克雷网格返回 ``n`` 条边上的差商，
    最后一条边连接节点 ``n-1`` 和右边界的 0。
    """
    h = grid.spacing
    if grid.boundary is Boundary.periodic:
        return [(np.roll(values, -1, axis=axis) - values) / h for axis in range(grid.dim)]
    padded = np.concatenate([values, [0.0]])
    return [(padded[1:] - padded[:-1]) / h]


def edge_means(values: np.ndarray, grid: Grid) -> List[np.ndarray]:
    """与 :func:`forward_differences` 对应的边中点平均值。"""
    if grid.boundary is Boundary.periodic:
        return [0.5 * (np.roll(values, -1, axis=axis) + values) for axis in range(grid.dim)]
    padded = np.concatenate([values, [0.0]])
    return [0.5 * (padded[1:] + padded[:-1])]
