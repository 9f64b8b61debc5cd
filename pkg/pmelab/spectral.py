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
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.fft
from scipy.special import gamma as gamma_function
from scipy.stats import linregress

from .enum import Boundary
from .error import GridError, InvalidArgument
from .grid import DyadicPartition, Field, Grid
from .solvers import Trajectory
from .utils import write_csv

__all__ = (
    'BesovProfile',
    'ExponentFit',
    'besov_profile',
    'besov_profile_in_time',
    'besov_equivalent_norm',
    'slobodeckij_constant',
    'slobodeckij_seminorm',
    'nikolskii_seminorm',
    'critical_exponent_estimate',
    'default_fit_window',
    'rescale_field',
)

_log = logging.getLogger(__name__)

NOISE_FLOOR = 1e-12
MIN_FIT_BLOCKS = 4


class BesovProfile:
    """各个 Littlewood-Paley 块的 ``L^p`` 范数。

    .. container:: operations

        .. describe:: len(x)

            返回块数。

        .. describe:: iter(x)

            依次返回 ``(j, ‖Δ_j u‖_p)``。

    Attributes
    -----------
    p: :class:`float`
        可积指数。
    entries: List[Tuple[:class:`int`, :class:`float`]]
        按 ``j`` 严格递增的 ``(j, blocknorm_j)``。
    length: :class:`float`
        盒子长度，用于把块指标换算成物理频率。
    """

    __slots__ = ('p', 'entries', 'length')

    def __init__(self, p: float, entries: Sequence[Tuple[int, float]], length: float = 1.0):
        entries = [(int(j), float(v)) for j, v in entries]
        if any(v < 0 for _, v in entries):
            raise InvalidArgument('块范数必须非负')
        if any(b[0] <= a[0] for a, b in zip(entries, entries[1:])):
            raise InvalidArgument('块指标必须严格递增')
        self.p: float = float(p)
        self.entries: List[Tuple[int, float]] = entries
        self.length: float = float(length)

    def __repr__(self) -> str:
        return f'<BesovProfile p={self.p!r} blocks={len(self.entries)}>'

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Tuple[int, float]]:
        return iter(self.entries)

    @property
    def blocks(self) -> np.ndarray:
        return np.array([j for j, _ in self.entries], dtype=np.int64)

    @property
    def norms(self) -> np.ndarray:
        return np.array([v for _, v in self.entries], dtype=np.float64)

    @property
    def jmax(self) -> int:
        return self.entries[-1][0] if self.entries else 0

    def norm(self, j: int) -> float:
        for block, value in self.entries:
            if block == j:
                return value
        raise InvalidArgument(f'剖面中没有第 {j} 块')

    def scaled(self, factor: float) -> BesovProfile:
        return BesovProfile(self.p, [(j, abs(factor) * v) for j, v in self.entries], self.length)

    def write_csv(self, path: Union[str, os.PathLike]) -> None:
        """写出列为 ``j, blocknorm`` 的 CSV。"""
        write_csv(path, ('j', 'blocknorm'), self.entries)


def _require_periodic(grid: Grid) -> None:
    if grid.boundary is not Boundary.periodic:
        raise GridError('Besov 剖面需要周期网格；狄利克雷场请先做 odd_extension')


def _block_values(values: np.ndarray, grid: Grid, partition: DyadicPartition,
                  workers: Optional[int]) -> List[np.ndarray]:
    spectrum = scipy.fft.fftn(values, workers=workers)
    return [scipy.fft.ifftn(spectrum * w, workers=workers).real for w in partition.grid_weights(grid)]


def _lp_power(values: np.ndarray, p: float, cell: float) -> float:
    if p == math.inf:
        return float(np.max(np.abs(values)))
    return float(np.sum(np.abs(values) ** p) * cell)


def besov_profile(u: Field, p: float = 2.0, partition: Optional[DyadicPartition] = None, *,
                  mean_free: bool = False, workers: Optional[int] = None) -> BesovProfile:
    """``blocknorm_j = (Σ|Δ_j u|^p h^d)^{1/p}``，``j = 0..jmax``。

    Parameters
    -----------
    u: :class:`Field`
        周期场。
    p: :class:`float`
        可积指数，可以是 ``math.inf``。
    partition: Optional[:class:`DyadicPartition`]
        二进单位分解，缺省由网格决定。
    mean_free: :class:`bool`
        是否先减去平均值。
    workers: Optional[:class:`int`]
        传给 :mod:`scipy.fft` 的线程数。

    Raises
    -------
    GridError
        网格不是周期的。
    """
    grid = u.grid
    _require_periodic(grid)
    if not p >= 1:
        raise InvalidArgument(f'可积指数 p 必须 ≥ 1，而不是 {p!r}')
    if partition is None:
        partition = DyadicPartition.for_grid(grid)
    values = u.values - np.mean(u.values) if mean_free else u.values
    blocks = _block_values(values, grid, partition, workers)
    entries = []
    for j, block in enumerate(blocks):
        power = _lp_power(block, p, grid.cell_volume)
        entries.append((j, power if p == math.inf else power ** (1.0 / p)))
    return BesovProfile(p, entries, grid.length)


def besov_profile_in_time(trajectory: Trajectory, p: float = 2.0, partition: Optional[DyadicPartition] = None, *,
                          workers: Optional[int] = None) -> BesovProfile:
    """时空块范数 ``(∫‖Δ_j u(t)‖_p^p dt)^{1/p}``，时间用左矩形规则。"""
    grid = trajectory.grid
    _require_periodic(grid)
    if not 1 <= p < math.inf:
        raise InvalidArgument(f'时空剖面要求有限的 p ≥ 1，而不是 {p!r}')
    if partition is None:
        partition = DyadicPartition.for_grid(grid)
    totals = np.zeros(partition.jmax + 1)
    for snapshot, w in zip(trajectory.snapshots, trajectory.time_weights()):
        if w <= 0:
            continue
        for j, block in enumerate(_block_values(snapshot.values, grid, partition, workers)):
            totals[j] += w * _lp_power(block, p, grid.cell_volume)
    return BesovProfile(p, [(j, t ** (1.0 / p)) for j, t in enumerate(totals)], grid.length)


def slobodeckij_constant(s: float) -> float:
    """``C_s = ∫|e^{iy} - 1|²/|y|^{1+2s} dy = -4Γ(-2s)cos(πs)``。"""
    if not 0 < s < 1:
        raise InvalidArgument(f's 必须在 (0, 1) 内，而不是 {s!r}')
    return float(-4.0 * gamma_function(-2.0 * s) * math.cos(math.pi * s))


def besov_equivalent_norm(profile: BesovProfile, s: float, length: Optional[float] = None) -> float:
    """``C_s Σ_j (2π2^j/L)^{sp} ‖Δ_j u‖_p^p``，与 ``W^{s,p}`` 半范数的 ``p`` 次幂等价。

    ``p = 2`` 且纯模式 ``|k| = 2^j`` 时与 Slobodeckij 双重积分（整条实轴）相等。
    剖面应当在去掉平均值的场上计算（见 :func:`besov_profile` 的 ``mean_free``）；
    第 0 块使用频率 ``2π/L``。
    """
    if length is None:
        length = profile.length
    p = profile.p
    constant = slobodeckij_constant(s)
    total = 0.0
    for j, norm in profile.entries:
        frequency = 2.0 * math.pi * 2.0 ** j / length
        total += frequency ** (s * p) * norm ** p
    return constant * total


def _minimum_image(k: np.ndarray, n: int) -> np.ndarray:
    return np.minimum(k, n - k)


def slobodeckij_seminorm(u: Field, s: float, p: float = 2.0, *, stride: Optional[int] = None) -> float:
    """Slobodeckij 半范数的 ``p`` 次幂 ``∬ |u(x) - u(y)|^p / |x - y|^{d+sp} dx dy``。

    周期盒子上使用最小像距离，对角线 ``x = y`` 不计入。一维是 ``O(n²)`` 的完整双重求和；
    二维只对步长为 ``stride`` 的平移子集求和，每个平移的权重相应放大（缺省使平移数不超过 64²）。

    Raises
    -------
    InvalidArgument
        ``s`` 不在 ``(0, 1)`` 内。
    """
    if not 0 < s < 1:
        raise InvalidArgument(f's 必须在 (0, 1) 内，而不是 {s!r}')
    grid = u.grid
    _require_periodic(grid)
    h = grid.spacing
    n = grid.n
    values = u.values
    exponent = grid.dim + s * p
    total = 0.0
    if grid.dim == 1:
        for k in range(1, n):
            z = _minimum_image(k, n) * h
            diff = np.roll(values, -k) - values
            total += float(np.sum(np.abs(diff) ** p)) / z ** exponent
        return total * h * h

    if stride is None:
        stride = max(1, n // 64)
    for a in range(0, n, stride):
        for b in range(0, n, stride):
            if a == 0 and b == 0:
                continue
            za, zb = _minimum_image(a, n) * h, _minimum_image(b, n) * h
            z = math.hypot(za, zb)
            diff = np.roll(values, (-a, -b), axis=(0, 1)) - values
            total += float(np.sum(np.abs(diff) ** p)) / z ** exponent
    return total * grid.cell_volume * grid.cell_volume * stride * stride


def nikolskii_seminorm(u: Field, s: float, p: float = 2.0) -> Tuple[float, float]:
    """Nikolskii 半范数的 ``p`` 次幂 ``sup_z ‖u(· + z) - u‖_p^p / |z|^{sp}`` 以及取到上确界的平移 ``|z|``。

    上确界取遍所有可表示的平移 ``z = k·h``（周期盒子上的最小像，``|z| ≤ L/2``）。
    这里按标准定义带上了 ``p`` 次幂。

    Raises
    -------
    InvalidArgument
        ``s`` 不在 ``(0, 1)`` 内。
    GridError
        场不是一维的。
    """
    if not 0 < s < 1:
        raise InvalidArgument(f's 必须在 (0, 1) 内，而不是 {s!r}')
    grid = u.grid
    if grid.dim != 1:
        raise GridError('Nikolskii 半范数只在一维上计算')
    h = grid.spacing
    values = u.values
    padded = values if grid.boundary is Boundary.periodic else np.concatenate([values, np.zeros_like(values)])
    best, best_shift = 0.0, 0.0
    for k in range(1, grid.n // 2 + 1):
        diff = np.roll(padded, -k) - padded
        value = float(np.sum(np.abs(diff) ** p)) * h / (k * h) ** (s * p)
        if value > best:
            best, best_shift = value, k * h
    return best, best_shift


class ExponentFit(NamedTuple):
    """:func:`critical_exponent_estimate` 的结果。

    ``capped`` 为真时 ``s_hat`` 等于 ``cap``，表示衰减快于网格能分辨的程度（``s* ≥ cap``）。
    """

    s_hat: float
    stderr: float
    window: Tuple[int, int]
    capped: bool
    cap: float


def default_fit_window(jmax: int) -> Tuple[int, int]:
    """缺省拟合窗口 ``[⌈jmax/3⌉, ⌊2jmax/3⌋]``。

    不足 :data:`MIN_FIT_BLOCKS` 块时先向上、再向下补足（``jmax ≤ 8`` 的粗网格）。
    """
    lo, hi = int(math.ceil(jmax / 3.0)), int(math.floor(2.0 * jmax / 3.0))
    if hi - lo + 1 < MIN_FIT_BLOCKS:
        hi = min(jmax, lo + MIN_FIT_BLOCKS - 1)
        lo = max(0, hi - MIN_FIT_BLOCKS + 1)
    return lo, hi


def critical_exponent_estimate(profile: BesovProfile, fit_window: Optional[Tuple[int, int]] = None) -> ExponentFit:
    """用 ``log₂ blocknorm_j`` 对 ``j`` 的最小二乘斜率估计临界正则性，``s_hat = -slope``。

    对于 ``(x - x0)_+^β`` 型奇性，``‖Δ_j u‖_p ~ 2^{-j(β + 1/p)}``，所以 ``s_hat ≈ β + 1/p``。
    窗口内低于噪声底（最大块范数的 ``1e-12`` 倍）的块会被截掉；剩下不足 4 块，
    或者斜率超过上限 ``cap = jmax/2`` 时返回 ``capped=True``。

    Raises
    -------
    InvalidArgument
        窗口本身不足 4 块或超出剖面范围。
    """
    jmax = profile.jmax
    cap = jmax / 2.0
    if fit_window is None:
        fit_window = default_fit_window(jmax)
    lo, hi = int(fit_window[0]), int(fit_window[1])
    if lo < 0 or hi > jmax or hi - lo + 1 < MIN_FIT_BLOCKS:
        raise InvalidArgument(f'拟合窗口 [{lo}, {hi}] 退化（需要至少 {MIN_FIT_BLOCKS} 块且在 [0, {jmax}] 内）')

    norms = dict(profile.entries)
    floor = NOISE_FLOOR * max(norms.values(), default=0.0)
    js: List[int] = []
    for j in range(lo, hi + 1):
        value = norms.get(j, 0.0)
        if value <= floor or value <= 0.0:
            break
        js.append(j)

    if len(js) < MIN_FIT_BLOCKS:
        _log.warning('拟合窗口 [%d, %d] 内只有 %d 块高于噪声底，返回上限 %.3g', lo, hi, len(js), cap)
        return ExponentFit(cap, 0.0, (lo, hi), True, cap)

    fit = linregress(np.asarray(js, dtype=np.float64), np.log2([norms[j] for j in js]))
    s_hat = -float(fit.slope)
    _log.debug('临界指数拟合：窗口 %s，s_hat=%.4f ± %.2e', (js[0], js[-1]), s_hat, fit.stderr)
    if s_hat > cap:
        _log.warning('拟合斜率 %.3g 超过上限 %.3g', s_hat, cap)
        return ExponentFit(cap, float(fit.stderr), (js[0], js[-1]), True, cap)
    return ExponentFit(s_hat, float(fit.stderr), (js[0], js[-1]), False, cap)


def rescale_field(u: Field, eta: float, m: float) -> Field:
    """``ũ(x) = η^{-2/m} u(ηx)``，放在长度为 ``L/η`` 的兼容网格上（点数不变）。

    在兼容网格上 ``ũ`` 的节点值就是 ``η^{-2/m}`` 乘以 ``u`` 的节点值，所以 Nikolskii 半范数满足
    ``|ũ|^p = η^{-2p/m + sp - 1} |u|^p``。
    """
    if not eta > 0:
        raise InvalidArgument(f'缩放因子 η 必须为正，而不是 {eta!r}')
    if not m > 0:
        raise InvalidArgument(f'指数 m 必须为正，而不是 {m!r}')
    grid = u.grid
    target = Grid(grid.dim, grid.n, grid.length / eta, grid.boundary)
    return Field(target, eta ** (-2.0 / m) * u.values)
