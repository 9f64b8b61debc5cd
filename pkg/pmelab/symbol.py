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
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.fft
from scipy.optimize import brentq

from .enum import Boundary, PsiKind
from .error import GridError, InvalidArgument
from .grid import DyadicPartition, Field, Grid, smooth_step
from .kinetic import VGrid, chi_stack
from .solvers import Trajectory
from .spectral import BesovProfile

__all__ = (
    'SymbolDescriptor',
    'SpaceTimeGrid',
    'NondegeneracyFit',
    'DvBoundFit',
    'MicrolocalDecomposition',
    'symbol_eval',
    'symbol_dv',
    'omega_slice',
    'nondegeneracy_measure',
    'dv_symbol_bound',
    'fit_nondegeneracy',
    'fit_dv_bound',
    'symbol_multiplier',
    'truncation_multiplier',
    'apply_symbol',
    'space_time_kinetic',
    'microlocal_decompose',
)

_log = logging.getLogger(__name__)

VectorFunc = Callable[[np.ndarray], np.ndarray]


def _power_coefficient(exponent: float) -> Tuple[VectorFunc, VectorFunc]:
    # v ↦ e|v|^{e-1} and its derivative e(e-1)|v|^{e-2}sgn(v)
    if exponent == 1:
        return (lambda v: np.ones_like(v)), (lambda v: np.zeros_like(v))

    def value(v: np.ndarray) -> np.ndarray:
        return exponent * np.abs(v) ** (exponent - 1.0)

    def prime(v: np.ndarray) -> np.ndarray:
        a = np.abs(v)
        with np.errstate(divide='ignore', invalid='ignore'):
            out = exponent * (exponent - 1.0) * np.where(a > 0, a, 1.0) ** (exponent - 2.0) * np.sign(v)
        return out

    return value, prime


class SymbolDescriptor:
    """动理学算子 ``𝓛(iτ, iξ, v) = iτ + i a(v)·ξ + (ξ, b(v)ξ)`` 的描述。

    扩散矩阵 ``b(v)`` 以对角元给出（各向同性时各对角元相同），这覆盖了本库中的所有方程。

    Attributes
    -----------
    dim: :class:`int`
        空间维数。
    name: :class:`str`
        描述名称，例如 ``porous-medium``。
    exponents: Dict[:class:`str`, Any]
        工厂函数使用的指数。
    """

    __slots__ = ('dim', 'name', 'exponents', '_drift', '_diffusion', '_drift_prime', '_diffusion_prime')

    def __init__(self, dim: int, *, diffusion: Sequence[Tuple[VectorFunc, VectorFunc]],
                 drift: Optional[Sequence[Tuple[VectorFunc, VectorFunc]]] = None, name: str = 'custom',
                 exponents: Optional[dict] = None):
        if dim not in (1, 2):
            raise InvalidArgument(f'符号的维数必须是 1 或 2，而不是 {dim!r}')
        if len(diffusion) != dim or (drift is not None and len(drift) != dim):
            raise InvalidArgument(f'需要 {dim} 个扩散系数（以及同样多的漂移系数）')
        self.dim: int = dim
        self.name: str = name
        self.exponents: dict = dict(exponents or {})
        self._diffusion = [d[0] for d in diffusion]
        self._diffusion_prime = [d[1] for d in diffusion]
        self._drift = [a[0] for a in drift] if drift is not None else None
        self._drift_prime = [a[1] for a in drift] if drift is not None else None
        sample = np.linspace(-4.0, 4.0, 401)
        if np.any(self.diffusion_values(sample) < 0):
            raise InvalidArgument('扩散矩阵在采样点上不是半正定的')

    def __repr__(self) -> str:
        return f'<SymbolDescriptor name={self.name!r} dim={self.dim} exponents={self.exponents!r}>'

    @property
    def has_drift(self) -> bool:
        return self._drift is not None

    @property
    def isotropic(self) -> bool:
        return self.dim == 1 or (len(set(self.exponents.get('m', ()))) == 1 and not self.has_drift)

    def _stack(self, funcs: Optional[List[VectorFunc]], v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if funcs is None:
            return np.zeros(v.shape + (self.dim,))
        return np.stack([np.broadcast_to(f(v), v.shape) for f in funcs], axis=-1)

    def drift_values(self, v: np.ndarray) -> np.ndarray:
        """``a(v)``，形状为 ``v.shape + (dim,)``。"""
        return self._stack(self._drift, v)

    def diffusion_values(self, v: np.ndarray) -> np.ndarray:
        """``b(v)`` 的对角元，形状为 ``v.shape + (dim,)``。"""
        return self._stack(self._diffusion, v)

    def drift_prime_values(self, v: np.ndarray) -> np.ndarray:
        return self._stack(self._drift_prime, v)

    def diffusion_prime_values(self, v: np.ndarray) -> np.ndarray:
        return self._stack(self._diffusion_prime, v)

    def sigma_values(self, v: np.ndarray) -> np.ndarray:
        """``σ = b^{1/2}`` 的对角元。"""
        return np.sqrt(self.diffusion_values(v))

    def beta_values(self, v: np.ndarray, *, points: int = 4001) -> np.ndarray:
        """``β(v) = ∫_0^v σ``，用原函数表计算。"""
        v = np.asarray(v, dtype=np.float64)
        top = max(float(np.max(np.abs(v))), 1e-12) if v.size else 1.0
        grid = np.linspace(-top, top, points)
        sigma = self.sigma_values(grid)
        steps = 0.5 * (sigma[1:] + sigma[:-1]) * np.diff(grid)[:, None]
        table = np.concatenate([np.zeros((1, self.dim)), np.cumsum(steps, axis=0)])
        zero = np.array([np.interp(0.0, grid, table[:, j]) for j in range(self.dim)])
        return np.stack([np.interp(v, grid, table[:, j] - zero[j]) for j in range(self.dim)], axis=-1)

    @classmethod
    def porous_medium(cls, m: float, dim: int = 1) -> SymbolDescriptor:
        """``𝓛 = iτ + m|v|^{m-1}|ξ|²``。"""
        if not m > 1:
            raise InvalidArgument(f'需要 m > 1，而不是 {m!r}')
        coefficient = _power_coefficient(m)
        return cls(dim, diffusion=[coefficient] * dim, name='porous-medium', exponents={'m': (float(m),) * dim})

    @classmethod
    def anisotropic(cls, m_list: Sequence[float], n_list: Optional[Sequence[float]] = None) -> SymbolDescriptor:
        """``𝓛 = iτ + i Σ n_j|v|^{n_j-1}ξ_j + Σ m_j|v|^{m_j-1}ξ_j²``。"""
        m_list = [float(m) for m in m_list]
        if any(m < 1 for m in m_list) or not max(m_list) > 1:
            raise InvalidArgument(f'扩散指数必须 ≥ 1 且最大值 > 1：{m_list!r}')
        drift = None
        if n_list is not None:
            n_list = [float(n) for n in n_list]
            if len(n_list) != len(m_list) or any(n < 1 for n in n_list):
                raise InvalidArgument(f'通量指数必须与扩散指数一样多且都 ≥ 1：{n_list!r}')
            drift = [_power_coefficient(n) for n in n_list]
        return cls(len(m_list), diffusion=[_power_coefficient(m) for m in m_list], drift=drift, name='anisotropic',
                   exponents={'m': tuple(m_list), 'n': tuple(n_list) if n_list is not None else None})

    @classmethod
    def heat(cls, dim: int = 1) -> SymbolDescriptor:
        """线性热方程 ``𝓛 = iτ + |ξ|²``，``∂_v 𝓛 = 0``。"""
        return cls(dim, diffusion=[_power_coefficient(1.0)] * dim, name='heat', exponents={'m': (1.0,) * dim})

    @classmethod
    def transport(cls, dim: int = 1) -> SymbolDescriptor:
        """``b ≡ 0``、``a ≡ 0`` 的纯时间符号 ``𝓛 = iτ``。"""
        zero = ((lambda v: np.zeros_like(v)), (lambda v: np.zeros_like(v)))
        return cls(dim, diffusion=[zero] * dim, name='transport', exponents={'m': (0.0,) * dim})


def _as_xi(desc: SymbolDescriptor, xi: Union[float, Sequence[float], np.ndarray]) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.float64)
    if xi.ndim == 0:
        xi = xi.reshape(1)
    if xi.shape[-1] != desc.dim:
        raise InvalidArgument(f'ξ 的最后一维必须是 {desc.dim}')
    return xi


def _squeeze(value: np.ndarray) -> Union[complex, np.ndarray]:
    return complex(value) if np.ndim(value) == 0 else value


def symbol_eval(desc: SymbolDescriptor, tau: Union[float, np.ndarray], xi: Union[float, Sequence[float], np.ndarray],
                v: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """求 ``𝓛(iτ, iξ, v) = iτ + i a(v)·ξ + (ξ, b(v)ξ)``；实部总是非负。

    ``ξ`` 的最后一维是空间分量，其余维度与 ``τ``、``v`` 按 numpy 规则广播。
    """
    xi = _as_xi(desc, xi)
    v = np.asarray(v, dtype=np.float64)
    real = np.sum(desc.diffusion_values(v) * xi * xi, axis=-1)
    imag = np.asarray(tau, dtype=np.float64) + np.sum(desc.drift_values(v) * xi, axis=-1)
    return _squeeze(real + 1j * imag)


def symbol_dv(desc: SymbolDescriptor, tau: Union[float, np.ndarray], xi: Union[float, Sequence[float], np.ndarray],
              v: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """``∂_v 𝓛 = i a'(v)·ξ + (ξ, b'(v)ξ)``。"""
    xi = _as_xi(desc, xi)
    v = np.asarray(v, dtype=np.float64)
    real = np.sum(desc.diffusion_prime_values(v) * xi * xi, axis=-1)
    imag = np.sum(desc.drift_prime_values(v) * xi, axis=-1)
    return _squeeze(real + 1j * imag)


def _omega_intervals(desc: SymbolDescriptor, tau: float, xi: np.ndarray, delta: float,
                     interval: Tuple[float, float], samples: int) -> Tuple[List[Tuple[float, float]], np.ndarray,
                                                                            np.ndarray]:
    lo, hi = interval
    v = np.linspace(lo, hi, samples)
    if lo < 0.0 < hi:
        v = np.union1d(v, [0.0])
    last = v.size - 1
    gap = np.abs(symbol_eval(desc, tau, xi, v)) - delta
    inside = gap <= 0
    if not inside.any():
        return [], v, inside

    def g(x: float) -> float:
        return abs(symbol_eval(desc, tau, xi, x)) - delta

    def crossing(a: int, b: int) -> float:
        if gap[a] == 0:
            return float(v[a])
        if gap[b] == 0:
            return float(v[b])
        return float(brentq(g, v[a], v[b], xtol=1e-15 * max(1.0, hi - lo), rtol=4 * np.finfo(float).eps))

    changes = np.flatnonzero(np.diff(inside.astype(np.int8)))
    starts = [0] if inside[0] else []
    ends = []
    for c in changes:
        if inside[c + 1]:
            starts.append(c + 1)
        else:
            ends.append(c)
    if inside[-1]:
        ends.append(last)

    intervals = []
    for s, e in zip(starts, ends):
        left = float(v[s]) if s == 0 else crossing(s - 1, s)
        right = float(v[e]) if e == last else crossing(e, e + 1)
        intervals.append((left, right))
    return intervals, v, inside


def _check_interval(v_interval: Tuple[float, float]) -> Tuple[float, float]:
    lo, hi = float(v_interval[0]), float(v_interval[1])
    if not lo < hi:
        raise InvalidArgument(f'速度区间必须满足 lo < hi，而得到 {v_interval!r}')
    return lo, hi


def omega_slice(desc: SymbolDescriptor, tau: float, xi: Union[float, Sequence[float]], delta: float,
                v_interval: Tuple[float, float], *, samples: int = 2049) -> float:
    """单个 ``(τ, ξ)`` 上的 ``|{v ∈ I : |𝓛(iτ, iξ, v)| ≤ δ}|``。

    先在 ``samples`` 个等距点上扫描，再用 :func:`scipy.optimize.brentq` 精确定位每段的端点。
    """
    interval = _check_interval(v_interval)
    intervals, _, _ = _omega_intervals(desc, float(tau), _as_xi(desc, xi), float(delta), interval, samples)
    return float(sum(b - a for a, b in intervals))


def _slices(desc: SymbolDescriptor, J: float, interval: Tuple[float, float], n_xi: int, n_tau: int,
            n_dir: int) -> List[Tuple[float, np.ndarray]]:
    radii = np.linspace(J / 2.0, 2.0 * J, n_xi)
    if desc.dim == 1:
        directions = [np.array([1.0])]
    elif desc.isotropic:
        directions = [np.array([1.0, 0.0])]
    else:
        angles = np.linspace(0.0, math.pi, n_dir, endpoint=False)
        directions = [np.array([math.cos(a), math.sin(a)]) for a in angles]

    taus = [0.0]
    if desc.has_drift:
        v = np.linspace(interval[0], interval[1], 257)
        top = max(float(np.max(desc.diffusion_values(v))) * (2.0 * J) ** 2,
                  float(np.max(np.abs(desc.drift_values(v)))) * 2.0 * J, 1.0)
        ladder = np.logspace(-2.0, math.log10(top), n_tau)
        taus += list(ladder) + list(-ladder)
    return [(tau, r * d) for tau in taus for r in radii for d in directions]


def nondegeneracy_measure(desc: SymbolDescriptor, J: float, delta: float, v_interval: Tuple[float, float], *,
                          n_xi: int = 9, n_tau: int = 12, n_dir: int = 8, samples: int = 2049) -> float:
    """``ω_𝓛(J; δ) = sup_{τ, |ξ| ∈ [J/2, 2J]} |Ω_𝓛(τ, ξ; δ)|``。

    ``τ`` 取 ``{0}`` 加上直到 ``max((2J)²·max b, 2J·max|a|)`` 的对数网格（正负两侧）。
    没有漂移项时 ``|iτ + 实数| ≥ 实数``，所以只需要 ``τ = 0``。
    对于多孔介质符号上确界在 ``|ξ| = J/2``、``τ = 0`` 处取到。
    """
    interval = _check_interval(v_interval)
    best = 0.0
    for tau, xi in _slices(desc, J, interval, n_xi, n_tau, n_dir):
        intervals, _, _ = _omega_intervals(desc, tau, xi, delta, interval, samples)
        best = max(best, float(sum(b - a for a, b in intervals)))
    return best


class _DvScan(NamedTuple):
    bound: float
    envelope: float
    # smallest Ω extent max|v| over the τ = 0 slices, largest over all slices
    inner: float
    outer: float
    saturated: bool


def _envelope(desc: SymbolDescriptor, J: float, gamma: float, interval: Tuple[float, float], radius: float,
              puncture: float, samples: int) -> float:
    # each term at full |ξ_j| = 2J on the ball |v| ≤ radius
    if not radius > puncture:
        return 0.0
    magnitudes = np.geomspace(puncture, radius, max(65, samples // 8))
    v = np.concatenate([-magnitudes[::-1], magnitudes])
    v = v[(v >= interval[0]) & (v <= interval[1])]
    if v.size == 0:
        return 0.0
    top = 2.0 * J
    terms = np.abs(desc.drift_prime_values(v)) * top + np.abs(desc.diffusion_prime_values(v)) * top ** 2
    return float(np.max(np.sum(terms, axis=-1) * np.abs(v) ** gamma))


def _scan_dv(desc: SymbolDescriptor, J: float, delta: float, gamma: float, interval: Tuple[float, float],
             puncture: float, n_xi: int, n_tau: int, n_dir: int, samples: int) -> _DvScan:
    lo, hi = interval
    best = 0.0
    centred, extents = [], []
    saturated = False
    for tau, xi in _slices(desc, J, interval, n_xi, n_tau, n_dir):
        intervals, v, inside = _omega_intervals(desc, tau, xi, delta, interval, samples)
        if not intervals:
            continue
        extent = max(max(abs(a), abs(b)) for a, b in intervals)
        extents.append(extent)
        if tau == 0.0:
            centred.append(extent)
        saturated = saturated or intervals[0][0] <= lo or intervals[-1][1] >= hi
        points = np.concatenate([v[inside], np.array([x for pair in intervals for x in pair])])
        points = points[np.abs(points) >= puncture]
        if points.size == 0:
            continue
        values = np.abs(symbol_dv(desc, tau, xi, points)) * np.abs(points) ** gamma
        best = max(best, float(np.max(values)))
    if not extents:
        return _DvScan(best, 0.0, 0.0, 0.0, saturated)
    outer = max(extents)
    inner = min(centred or extents)
    return _DvScan(best, _envelope(desc, J, gamma, interval, outer, puncture, samples), inner, outer, saturated)


def _default_puncture(interval: Tuple[float, float]) -> float:
    return 1e-6 * (interval[1] - interval[0])


def dv_symbol_bound(desc: SymbolDescriptor, J: float, delta: float, gamma: float, v_interval: Tuple[float, float], *,
                    puncture: Optional[float] = None, envelope: bool = False, n_xi: int = 9, n_tau: int = 12,
                    n_dir: int = 8, samples: int = 2049) -> float:
    """``sup_{τ, |ξ|~J} sup_{v ∈ Ω} |∂_v 𝓛| |v|^γ``。

    在 ``Ω`` 的每一段上取内部采样点和精确端点求值，去掉半径为 ``puncture``（缺省 ``1e-6·|I|``）的 ``v = 0`` 邻域。

    Parameters
    -----------
    envelope: :class:`bool`
        为 ``True`` 时返回逐项上界：``R`` 为所有切片中 ``Ω`` 的最大半径，
        在 ``puncture ≤ |v| ≤ R`` 上取 ``Σ_j (|a_j'(v)|·2J + |b_j'(v)|·(2J)²)|v|^γ`` 的最大值。
        它总不小于精确的上确界；各向同性时两者的 ``J`` 指数相同，各向异性时给出由最大扩散指数控制半径、
        最小指数控制导数的较粗指数。
    """
    interval = _check_interval(v_interval)
    if puncture is None:
        puncture = _default_puncture(interval)
    scan = _scan_dv(desc, J, delta, gamma, interval, puncture, n_xi, n_tau, n_dir, samples)
    return scan.envelope if envelope else scan.bound


class NondegeneracyFit(NamedTuple):
    """``ω ≈ C (δ / J^β)^α`` 的对数最小二乘拟合。``table`` 的每行为 ``(J, δ, ω)``。"""

    alpha: float
    beta: float
    constant: float
    used: int
    table: List[Tuple[float, float, float]]


class DvBoundFit(NamedTuple):
    """``bound ≈ C J^λ δ^μ`` 的对数最小二乘拟合。``table`` 的每行为 ``(J, δ, bound)``。"""

    lam: float
    mu: float
    constant: float
    used: int
    table: List[Tuple[float, float, float]]


def _least_squares(rows: List[Tuple[float, float, float]]) -> np.ndarray:
    design = np.array([[1.0, math.log(d), math.log(J)] for J, d, _ in rows])
    target = np.array([math.log(value) for _, _, value in rows])
    coefficients, *_ = np.linalg.lstsq(design, target, rcond=None)
    return coefficients


def fit_nondegeneracy(desc: SymbolDescriptor, Js: Sequence[float], deltas: Sequence[float],
                      v_interval: Tuple[float, float], **options) -> NondegeneracyFit:
    """在 ``(J, δ)`` 网格上计算 ``ω`` 并拟合 ``(α, β)``，只使用未饱和的单元（``0 < ω < 0.99|I|``）。

    Raises
    -------
    InvalidArgument
        未饱和的单元少于 3 个。
    """
    lo, hi = _check_interval(v_interval)
    table = [(float(J), float(d), nondegeneracy_measure(desc, J, d, (lo, hi), **options)) for J in Js for d in deltas]
    rows = [row for row in table if 0.0 < row[2] < 0.99 * (hi - lo)]
    if len(rows) < 3:
        raise InvalidArgument(f'只有 {len(rows)} 个未饱和的 (J, δ) 单元，无法拟合')
    c, a_delta, a_J = _least_squares(rows)
    alpha = float(a_delta)
    beta = float(-a_J / a_delta) if a_delta != 0 else math.nan
    _log.debug('非退化拟合：α=%.4f β=%.4f（%d 个单元）', alpha, beta, len(rows))
    return NondegeneracyFit(alpha, beta, float(math.exp(c)), len(rows), table)


def fit_dv_bound(desc: SymbolDescriptor, Js: Sequence[float], deltas: Sequence[float], gamma: float,
                 v_interval: Tuple[float, float], *, puncture: Optional[float] = None, envelope: bool = False,
                 resolve: float = 10.0, n_xi: int = 9, n_tau: int = 12, n_dir: int = 8,
                 samples: int = 2049) -> DvBoundFit:
    """在 ``(J, δ)`` 网格上计算 :func:`dv_symbol_bound` 并拟合 ``(λ, μ)``。

    只使用界为正、没有任何切片的 ``Ω`` 碰到区间端点、且 ``Ω`` 半径至少为 ``resolve·puncture`` 的单元。
    精确上确界看 ``τ = 0`` 切片中最小的半径（即 ``|ξ| = 2J`` 处），``envelope=True`` 时看最大的半径。
    半径落进被挖去的邻域时，上确界会退到较小的 ``|ξ|`` 上，拟合出的指数就不对了。

    界处处为 0 时（例如热方程）返回 ``λ = μ = 0``。

    Raises
    -------
    InvalidArgument
        界不全为 0，但可用的单元少于 3 个。
    """
    lo, hi = _check_interval(v_interval)
    if puncture is None:
        puncture = _default_puncture((lo, hi))
    table, rows = [], []
    for J in Js:
        for d in deltas:
            scan = _scan_dv(desc, J, d, gamma, (lo, hi), puncture, n_xi, n_tau, n_dir, samples)
            value = scan.envelope if envelope else scan.bound
            reach = scan.outer if envelope else scan.inner
            table.append((float(J), float(d), value))
            if value > 0 and not scan.saturated and reach >= resolve * puncture:
                rows.append((float(J), float(d), value))
    if not any(value > 0 for _, _, value in table):
        return DvBoundFit(0.0, 0.0, 0.0, 0, table)
    if len(rows) < 3:
        raise InvalidArgument(f'只有 {len(rows)} 个可用的 (J, δ) 单元，无法拟合')
    c, mu, lam = _least_squares(rows)
    _log.debug('∂_v 𝓛 界拟合：λ=%.4f μ=%.4f（%d 个单元）', lam, mu, len(rows))
    return DvBoundFit(float(lam), float(mu), float(math.exp(c)), len(rows), table)


class SpaceTimeGrid:
    """时间周期化之后的时空网格：``n_t`` 个时间点 ``t_k = k·T/n_t`` 乘以空间网格。"""

    __slots__ = ('grid', 'n_t', 'duration')

    def __init__(self, grid: Grid, n_t: int, duration: float):
        if grid.boundary is not Boundary.periodic:
            raise GridError('时空网格需要周期的空间网格')
        if n_t < 4:
            raise InvalidArgument(f'时间点数必须 ≥ 4，而不是 {n_t!r}')
        if not duration > 0:
            raise InvalidArgument(f'时间长度必须为正，而不是 {duration!r}')
        self.grid: Grid = grid
        self.n_t: int = int(n_t)
        self.duration: float = float(duration)

    def __repr__(self) -> str:
        return f'<SpaceTimeGrid n_t={self.n_t} duration={self.duration!r} grid={self.grid!r}>'

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n_t,) + self.grid.shape

    def times(self) -> np.ndarray:
        return np.arange(self.n_t) * (self.duration / self.n_t)

    def frequencies(self, *, odd: bool = False) -> Tuple[np.ndarray, np.ndarray]:
        """返回可以广播到 :attr:`shape` 的 ``τ`` 与 ``ξ``（最后一维为空间分量）。

        ``odd=True`` 时奈奎斯特频率置 0，用于奇次项，使乘子共轭对称。
        """
        tau = 2.0 * math.pi * np.fft.fftfreq(self.n_t, d=self.duration / self.n_t)
        components = self.grid.angular_frequencies()
        if odd:
            if self.n_t % 2 == 0:
                tau[self.n_t // 2] = 0.0
            wavenumbers = self.grid.wavenumbers()
            components = tuple(np.where(k == -(self.grid.n // 2), 0.0, c) for k, c in zip(wavenumbers, components))
        tau = tau.reshape((-1,) + (1,) * self.grid.dim)
        xi = np.stack(components, axis=-1)[None, ...]
        return tau, xi

    def window(self) -> np.ndarray:
        """C∞ 时间窗口，在 ``[T/4, 3T/4]`` 上为 1，在两端为 0。"""
        t = self.times() / self.duration
        return smooth_step(4.0 * t) * smooth_step(4.0 * (1.0 - t))


def _symbol_on_grid(desc: SymbolDescriptor, st_grid: SpaceTimeGrid, v: float) -> np.ndarray:
    _, xi = st_grid.frequencies()
    odd_tau, odd_xi = st_grid.frequencies(odd=True)
    even = np.asarray(symbol_eval(desc, 0.0, xi, np.float64(v))).real
    odd = np.asarray(symbol_eval(desc, odd_tau, odd_xi, np.float64(v))).imag
    return even + 1j * odd


def _psi(kind: PsiKind, z: np.ndarray) -> Tuple[np.ndarray, int]:
    r = np.abs(z)
    base = DyadicPartition.phi0(r) if kind in (PsiKind.ball, PsiKind.ball_divided) else DyadicPartition.phi1(r)
    if not kind.divided:
        return base, 0
    zero = z == 0
    skipped = int(np.count_nonzero(zero & (base != 0)))
    with np.errstate(divide='ignore', invalid='ignore'):
        weights = np.where(zero, 0.0, base / np.where(zero, 1.0, z))
    return weights, skipped


def symbol_multiplier(st_grid: SpaceTimeGrid, desc: SymbolDescriptor, kind: PsiKind, delta: float, k: int,
                      v: float) -> Tuple[np.ndarray, int]:
    """``ψ(𝓛(iτ, iξ, v) / (δ2^k))`` 在时空频率网格上的值，以及被跳过的单元数。

    ``ψ₀(z) = φ₀(|z|)``，``ψ₁(z) = φ₁(|z|)``（与空间二进分解相同的鼓包），
    除式 ``ψ̃(z) = ψ(z)/z`` 在 ``𝓛 = 0`` 的单元上置 0 并计数。
    """
    if not delta > 0:
        raise InvalidArgument(f'δ 必须为正，而不是 {delta!r}')
    z = _symbol_on_grid(desc, st_grid, v) / (delta * 2.0 ** k)
    return _psi(kind, z)


def _fft_axes(st_grid: SpaceTimeGrid) -> Tuple[int, ...]:
    return tuple(range(st_grid.grid.dim + 1))


def _check_data(data: np.ndarray, st_grid: SpaceTimeGrid, vgrid: VGrid) -> None:
    if data.shape != st_grid.shape + (vgrid.n_v,):
        raise InvalidArgument(f'数据形状 {data.shape} 与时空网格 {st_grid.shape + (vgrid.n_v,)} 不符')


def truncation_multiplier(data: np.ndarray, desc: SymbolDescriptor, kind: Union[PsiKind, str], delta: float, k: int,
                          st_grid: SpaceTimeGrid, vgrid: VGrid, *, workers: Optional[int] = None) -> np.ndarray:
    """对每个 ``v`` 切片在傅里叶侧精确地乘以 ``ψ(𝓛/(δ2^k))``。

    ``data`` 的形状为 ``(n_t, *grid.shape, n_v)``。除式会跳过 ``𝓛 = 0`` 的单元，跳过数写入 DEBUG 日志。
    """
    if isinstance(kind, str):
        kind = PsiKind(kind)
    _check_data(data, st_grid, vgrid)
    axes = _fft_axes(st_grid)
    out = np.empty(data.shape, dtype=np.float64)
    skipped = 0
    for c, v in enumerate(vgrid.centers):
        weights, count = symbol_multiplier(st_grid, desc, kind, delta, k, v)
        skipped += count
        spectrum = scipy.fft.fftn(data[..., c], axes=axes, workers=workers)
        out[..., c] = scipy.fft.ifftn(spectrum * weights, axes=axes, workers=workers).real
    if skipped:
        _log.debug('截断乘子 %s 跳过了 %d 个 𝓛 = 0 的单元', kind, skipped)
    return out


def apply_symbol(data: np.ndarray, desc: SymbolDescriptor, st_grid: SpaceTimeGrid, vgrid: VGrid, *,
                 workers: Optional[int] = None) -> np.ndarray:
    """谱方法计算 ``𝓛(∂_t, ∇_x, v) f``（``𝓛(iτ, iξ, v)`` 作为乘子）。"""
    _check_data(data, st_grid, vgrid)
    axes = _fft_axes(st_grid)
    out = np.empty(data.shape, dtype=np.float64)
    for c, v in enumerate(vgrid.centers):
        spectrum = scipy.fft.fftn(data[..., c], axes=axes, workers=workers)
        out[..., c] = scipy.fft.ifftn(spectrum * _symbol_on_grid(desc, st_grid, v), axes=axes, workers=workers).real
    return out


def space_time_kinetic(trajectory: Trajectory, vgrid: VGrid, n_t: int) -> Tuple[SpaceTimeGrid, np.ndarray]:
    """把轨迹重采样到 ``n_t`` 个等距时间，构造 ``χ`` 并乘以 C∞ 时间窗口，使其在时间上周期。"""
    resampled = trajectory.resample(n_t + 1)
    sliced = Trajectory(resampled.times[:-1], resampled.snapshots[:-1])
    st_grid = SpaceTimeGrid(trajectory.grid, n_t, resampled.times[-1] - resampled.times[0])
    data = chi_stack(sliced, vgrid).astype(np.float64)
    window = st_grid.window().reshape((-1,) + (1,) * (trajectory.grid.dim + 1))
    return st_grid, data * window


class MicrolocalDecomposition:
    """``f = f⁰ + Σ_{k=1}^{kmax} shell_k + tail``。

    ``f⁰ = ψ₀(𝓛/δ) f``，``shell_k = ψ₁(𝓛/(δ2^k)) f``，``tail = (1 - ψ₀(𝓛/(δ2^{kmax}))) f``。
    给出源项 ``g`` 时，``source_piece = Σ_k (δ2^k)^{-1} ψ̃₁(𝓛/(δ2^k)) g``；
    若 ``g = 𝓛f``，它与 ``Σ shell_k`` 一致。

    Attributes
    -----------
    delta: :class:`float`
        阈值 ``δ``。
    f0: :class:`numpy.ndarray`
        低符号部分。
    shells: List[:class:`numpy.ndarray`]
        第 ``k = 1..kmax`` 个环形部分。
    tail: :class:`numpy.ndarray`
        超过 ``kmax`` 的余项。
    reconstruction_error: :class:`float`
        ``max|f⁰ + Σ shell + tail - f|``。
    tail_fraction: :class:`float`
        ``‖tail‖₂ / ‖f‖₂``。
    """

    __slots__ = ('delta', 'kmax', 'st_grid', 'vgrid', 'f0', 'shells', 'tail', 'source_piece',
                 'reconstruction_error', 'tail_fraction')

    def __init__(self, delta: float, kmax: int, st_grid: SpaceTimeGrid, vgrid: VGrid, f0: np.ndarray,
                 shells: List[np.ndarray], tail: np.ndarray, source_piece: Optional[np.ndarray],
                 reconstruction_error: float, tail_fraction: float):
        self.delta = delta
        self.kmax = kmax
        self.st_grid = st_grid
        self.vgrid = vgrid
        self.f0 = f0
        self.shells = shells
        self.tail = tail
        self.source_piece = source_piece
        self.reconstruction_error = reconstruction_error
        self.tail_fraction = tail_fraction

    def __repr__(self) -> str:
        return (f'<MicrolocalDecomposition delta={self.delta!r} kmax={self.kmax} '
                f'error={self.reconstruction_error:.3e} tail={self.tail_fraction:.3g}>')

    @property
    def tail_dominates(self) -> bool:
        return self.tail_fraction > 0.5

    def pieces(self) -> Dict[str, np.ndarray]:
        result = {'f0': self.f0}
        for k, shell in enumerate(self.shells, start=1):
            result[f'shell{k}'] = shell
        result['tail'] = self.tail
        if self.source_piece is not None:
            result['source'] = self.source_piece
        return result

    def piece_profiles(self, p: float = 2.0, phi: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> \
            Dict[str, BesovProfile]:
        """每个部分的速度平均 ``∫ piece·φ dv`` 的时空 Besov 剖面（``L^p_t`` 块范数）。"""
        grid = self.st_grid.grid
        weights = np.ones(self.vgrid.n_v) if phi is None else np.asarray(phi(self.vgrid.centers), dtype=np.float64)
        partition = DyadicPartition.for_grid(grid)
        dt = self.st_grid.duration / self.st_grid.n_t
        axes = tuple(range(1, grid.dim + 1))
        profiles = {}
        for name, piece in self.pieces().items():
            averaged = np.tensordot(piece, weights, axes=([-1], [0])) * self.vgrid.spacing
            spectrum = scipy.fft.fftn(averaged, axes=axes)
            entries = []
            for j, w in enumerate(partition.grid_weights(grid)):
                block = scipy.fft.ifftn(spectrum * w[None, ...], axes=axes).real
                total = float(np.sum(np.abs(block) ** p)) * grid.cell_volume * dt
                entries.append((j, total ** (1.0 / p)))
            profiles[name] = BesovProfile(p, entries, grid.length)
        return profiles


def microlocal_decompose(data: np.ndarray, desc: SymbolDescriptor, delta: float, kmax: int, st_grid: SpaceTimeGrid,
                         vgrid: VGrid, *, sources: Optional[np.ndarray] = None,
                         workers: Optional[int] = None) -> MicrolocalDecomposition:
    """按 ``𝓛`` 的退化程度对时空动理学数据做微局部分解（见 :class:`MicrolocalDecomposition`）。

    ``data`` 应当已经在时间上周期化（见 :func:`space_time_kinetic`）。
    余项占比超过一半时写 WARNING 日志并在结果中标记。
    """
    if kmax < 1:
        raise InvalidArgument(f'kmax 必须 ≥ 1，而不是 {kmax!r}')
    if not delta > 0:
        raise InvalidArgument(f'δ 必须为正，而不是 {delta!r}')
    _check_data(data, st_grid, vgrid)
    if sources is not None:
        _check_data(sources, st_grid, vgrid)
    axes = _fft_axes(st_grid)
    f0 = np.empty(data.shape)
    shells = [np.empty(data.shape) for _ in range(kmax)]
    tail = np.empty(data.shape)
    source_piece = np.zeros(data.shape) if sources is not None else None
    skipped = 0

    for c, v in enumerate(vgrid.centers):
        symbol = _symbol_on_grid(desc, st_grid, v)
        spectrum = scipy.fft.fftn(data[..., c], axes=axes, workers=workers)

        def back(weights: np.ndarray, source: np.ndarray = spectrum) -> np.ndarray:
            return scipy.fft.ifftn(source * weights, axes=axes, workers=workers).real

        ball, _ = _psi(PsiKind.ball, symbol / delta)
        f0[..., c] = back(ball)
        for k in range(1, kmax + 1):
            annulus, _ = _psi(PsiKind.annulus, symbol / (delta * 2.0 ** k))
            shells[k - 1][..., c] = back(annulus)
        outer, _ = _psi(PsiKind.ball, symbol / (delta * 2.0 ** kmax))
        tail[..., c] = back(1.0 - outer)

        if source_piece is not None:
            source_spectrum = scipy.fft.fftn(sources[..., c], axes=axes, workers=workers)
            for k in range(1, kmax + 1):
                scale = delta * 2.0 ** k
                divided, count = _psi(PsiKind.annulus_divided, symbol / scale)
                skipped += count
                source_piece[..., c] += back(divided / scale, source_spectrum)

    reconstruction = f0 + sum(shells) + tail
    error = float(np.max(np.abs(reconstruction - data))) if data.size else 0.0
    norm = float(np.sqrt(np.sum(data * data)))
    tail_fraction = float(np.sqrt(np.sum(tail * tail))) / norm if norm > 0 else 0.0
    result = MicrolocalDecomposition(delta, kmax, st_grid, vgrid, f0, shells, tail, source_piece, error, tail_fraction)
    if skipped:
        _log.debug('源项分解跳过了 %d 个 𝓛 = 0 的单元', skipped)
    if result.tail_dominates:
        _log.warning('微局部分解的余项占比 %.3g 超过一半，kmax=%d 太小', tail_fraction, kmax)
    return result
