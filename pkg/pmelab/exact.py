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
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import gamma as gamma_function

from .enum import Boundary
from .error import GridError, InvalidArgument
from .grid import Field, Grid, laplacian, signed_power, smooth_step

__all__ = (
    'BarenblattParams',
    'barenblatt_eval',
    'barenblatt_field',
    'barenblatt_mass',
    'barenblatt_support_radius',
    'barenblatt_residual',
    'pme_discrete_residual',
    'barenblatt_critical_exponent',
    'barenblatt_threshold',
    'ebmeyer_exponent',
    'power_profile_function',
    'power_profile',
)

_log = logging.getLogger(__name__)


class BarenblattParams:
    """Barenblatt 自相似解的参数。

    .. math::

        u(t, x) = (t+γ)^{-k} (a² - k(m-1)/(2dm) |x|² (t+γ)^{-2k/d})_+^{1/(m-1)}

    相似指数 ``k`` 固定为 ``d / (d(m-1) + 2)``，这正是使质量随时间守恒的取值。

    Attributes
    -----------
    m: :class:`float`
        非线性指数，``m > 1``。
    d: :class:`int`
        空间维数。
    a: :class:`float`
        振幅参数，``a > 0``。
    gamma_shift: :class:`float`
        时间平移 ``γ > 0``。
    """

    __slots__ = ('m', 'd', 'a', 'gamma_shift')

    def __init__(self, m: float, d: int = 1, a: float = 1.0, gamma_shift: float = 1.0):
        if not m > 1:
            raise InvalidArgument(f'Barenblatt 解要求 m > 1，而不是 {m!r}')
        if d not in (1, 2):
            raise InvalidArgument(f'维数必须是 1 或 2，而不是 {d!r}')
        if not a > 0:
            raise InvalidArgument(f'振幅参数 a 必须为正，而不是 {a!r}')
        if not gamma_shift > 0:
            raise InvalidArgument(f'时间平移 γ 必须为正，而不是 {gamma_shift!r}')
        self.m: float = float(m)
        self.d: int = int(d)
        self.a: float = float(a)
        self.gamma_shift: float = float(gamma_shift)

    def __repr__(self) -> str:
        return f'<BarenblattParams m={self.m!r} d={self.d} a={self.a!r} gamma_shift={self.gamma_shift!r}>'

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, BarenblattParams) and (self.m, self.d, self.a, self.gamma_shift) == (
            other.m, other.d, other.a, other.gamma_shift)

    def __hash__(self) -> int:
        return hash((self.m, self.d, self.a, self.gamma_shift))

    @property
    def k(self) -> float:
        """:class:`float`: 相似指数 ``d / (d(m-1) + 2)``。"""
        return self.d / (self.d * (self.m - 1.0) + 2.0)

    @property
    def profile_coefficient(self) -> float:
        """:class:`float`: ``k(m-1)/(2dm)``。"""
        return self.k * (self.m - 1.0) / (2.0 * self.d * self.m)


def _shifted_time(params: BarenblattParams, t: float) -> float:
    tau = t + params.gamma_shift
    if not tau > 0:
        raise InvalidArgument(f'需要 t + γ > 0，而得到 {tau!r}')
    return tau


def barenblatt_eval(params: BarenblattParams, t: float, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """在时间 ``t`` 和点 ``x`` 处求 Barenblatt 解的值。

    ``d = 1`` 时 ``x`` 可以是任意形状的数组；``d = 2`` 时最后一个轴是坐标。
    """
    tau = _shifted_time(params, t)
    x = np.asarray(x, dtype=np.float64)
    r2 = x * x if params.d == 1 else np.sum(x * x, axis=-1)
    k = params.k
    inner = params.a ** 2 - params.profile_coefficient * r2 / tau ** (2.0 * k / params.d)
    value = tau ** (-k) * np.maximum(inner, 0.0) ** (1.0 / (params.m - 1.0))
    if np.ndim(value) == 0:
        return float(value)
    return value


def barenblatt_support_radius(params: BarenblattParams, t: float) -> float:
    """支撑半径 ``R(t) = a·((t+γ)^{2k/d}·2dm/(k(m-1)))^{1/2}``。"""
    tau = _shifted_time(params, t)
    return params.a * math.sqrt(tau ** (2.0 * params.k / params.d) / params.profile_coefficient)


def barenblatt_mass(params: BarenblattParams) -> float:
    """闭式质量 ``∫u dx``，与时间无关。"""
    q = 1.0 / (params.m - 1.0)
    d = params.d
    ball = math.pi ** (d / 2.0) * gamma_function(q + 1.0) / gamma_function(q + 1.0 + d / 2.0)
    return float(params.a ** (2.0 * q + d) * params.profile_coefficient ** (-d / 2.0) * ball)


def _offsets(grid: Grid, center: Optional[Sequence[float]]) -> np.ndarray:
    coords = grid.coordinates()
    if center is None:
        center = [grid.length / 2.0] * grid.dim
    center = list(np.broadcast_to(np.asarray(center, dtype=np.float64), (grid.dim,)))
    if grid.dim == 1:
        return coords[0] - center[0]
    return np.stack([c - c0 for c, c0 in zip(coords, center)], axis=-1)


def barenblatt_field(params: BarenblattParams, grid: Grid, t: float,
                     center: Optional[Sequence[float]] = None) -> Field:
    """把 Barenblatt 解采样到网格上，默认中心在盒子中点。"""
    if grid.dim != params.d:
        raise GridError(f'网格维数 {grid.dim} 与参数维数 {params.d} 不符')
    values = np.asarray(barenblatt_eval(params, t, _offsets(grid, center)))
    if grid.boundary is Boundary.dirichlet:
        values = values.copy()
        values[0] = 0.0
    return Field(grid, values)


def pme_discrete_residual(u_minus: Field, u_plus: Field, dt: float, m: float, *,
                          u_mid: Optional[Field] = None, mask: Optional[np.ndarray] = None) -> float:
    """离散 PME 残差 ``(u_+ - u_-)/dt - Δ_h (u_mid)^{[m]}`` 在 ``mask`` 上的最大模。

    ``u_mid`` 缺省时取两者的平均。``mask`` 为空集时返回 0。
    """
    if u_minus.grid != u_plus.grid:
        raise GridError('两个场不在同一个网格上')
    grid = u_minus.grid
    mid = u_mid.values if u_mid is not None else 0.5 * (u_minus.values + u_plus.values)
    residual = (u_plus.values - u_minus.values) / dt - laplacian(signed_power(mid, m), grid)
    if mask is not None:
        residual = residual[mask]
    if residual.size == 0:
        return 0.0
    return float(np.max(np.abs(residual)))


def barenblatt_residual(params: BarenblattParams, grid: Grid, t: float, *,
                        center: Optional[Sequence[float]] = None) -> float:
    """Barenblatt 解在 ``|x| ≤ R(t)/2`` 内的离散 PDE 残差（远离自由边界）。

    时间导数用步长 ``1e-4·(t+γ)`` 的中心差分，空间用三点格式。
    """
    tau = _shifted_time(params, t)
    dt = 1e-4 * tau
    offsets = _offsets(grid, center)
    radius = offsets if grid.dim == 1 else np.sqrt(np.sum(offsets * offsets, axis=-1))
    mask = np.abs(radius) <= barenblatt_support_radius(params, t) / 2.0
    residual = pme_discrete_residual(
        barenblatt_field(params, grid, t - dt / 2.0, center),
        barenblatt_field(params, grid, t + dt / 2.0, center),
        dt,
        params.m,
        u_mid=barenblatt_field(params, grid, t, center),
        mask=mask,
    )
    _log.debug('Barenblatt 残差 n=%d t=%g: %.3e', grid.n, t, residual)
    return residual


def barenblatt_critical_exponent(m: float, p: float) -> float:
    """Barenblatt 剖面属于 ``W^{s,p}_loc`` 的临界指数 ``s_c = 1/(m-1) + 1/p``。

    自由边界处剖面行为如 ``(R - |x|)_+^{1/(m-1)}``，单边幂奇性的临界光滑度为 ``β + 1/p``。
    """
    if not m > 1:
        raise InvalidArgument(f'需要 m > 1，而不是 {m!r}')
    if not p >= 1:
        raise InvalidArgument(f'需要 p ≥ 1，而不是 {p!r}')
    return 1.0 / (m - 1.0) + (0.0 if p == math.inf else 1.0 / p)


def barenblatt_threshold(m: float) -> float:
    """在 ``p = m + 1`` 处以 ``(2/(m+1))·γ`` 形式写出的门槛，``γ < m/(m-1)``。"""
    if not m > 1:
        raise InvalidArgument(f'需要 m > 1，而不是 {m!r}')
    return (2.0 / (m + 1.0)) * (m / (m - 1.0))


def ebmeyer_exponent(m: float) -> float:
    """经典结果 ``u ∈ L^{m+1}W^{s,m+1}``, ``s < 2/(m+1)`` 的指数。"""
    if not m > 1:
        raise InvalidArgument(f'需要 m > 1，而不是 {m!r}')
    return 2.0 / (m + 1.0)


def power_profile_function(beta: float, length: float = 1.0,
                           x0: Optional[float] = None) -> Callable[[np.ndarray], np.ndarray]:
    """返回 ``x ↦ (x - x0)_+^β · w(x)`` 的向量化函数。

    记 ``ℓ = L - x0`` 为正半支的长度。窗口 ``w`` 在 ``x ≤ x0 + ℓ/16`` 上为 1，
    在 ``x ≥ L - ℓ/16`` 上为 0，过渡是 C∞ 的，所以除了 ``x0`` 之外没有别的奇性。
    过渡区间取得尽量宽，它的谱在低块上远小于奇性的贡献。默认 ``x0 = L/4``。
    """
    if not beta > 0:
        raise InvalidArgument(f'幂次 β 必须为正，而不是 {beta!r}')
    if x0 is None:
        x0 = length / 4.0
    if not 0 < x0 < length / 2.0:
        raise InvalidArgument(f'奇点 x0 必须在 (0, L/2) 内，而不是 {x0!r}')
    margin = (length - x0) / 16.0
    start = x0 + margin
    width = length - margin - start

    def profile(x: np.ndarray) -> np.ndarray:
        x = np.mod(np.asarray(x, dtype=np.float64), length)
        window = 1.0 - smooth_step((x - start) / width)
        return np.maximum(x - x0, 0.0) ** beta * window

    return profile


def power_profile(beta: float, grid: Grid, x0: Optional[float] = None) -> Field:
    """在一维周期网格上采样 :func:`power_profile_function`。

    ``W^{s,p}`` 意义下的临界指数是 ``β + 1/p``。
    """
    if grid.dim != 1 or grid.boundary is not Boundary.periodic:
        raise GridError('幂剖面只定义在一维周期网格上')
    return Field.from_function(grid, power_profile_function(beta, grid.length, x0))
