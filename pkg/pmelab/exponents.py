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

import math
import os
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .error import InvalidArgument
from .exact import ebmeyer_exponent
from .utils import write_csv

__all__ = (
    'ExponentInputs',
    'ExponentResult',
    'averaging_exponents',
    'corollary_exponents',
    'isotropic_pme_exponents',
    'pme_limit_inputs',
    'aniso_exponents',
    'exponent_table',
    'write_exponent_echo',
)


def _dual(x: float) -> float:
    """共轭指数 ``x' = x/(x-1)``，``1' = ∞``，``∞' = 1``。"""
    if x == 1:
        return math.inf
    if math.isinf(x):
        return 1.0
    return x / (x - 1.0)


def _inverse(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


class ExponentInputs(NamedTuple):
    """平均引理的输入参数。

    Attributes
    -----------
    alpha: :class:`float`
        非退化条件中 ``δ`` 的幂次，``α > 0``。
    beta: :class:`float`
        非退化条件中 ``J`` 的幂次，``β > 0``。
    lam: :class:`float`
        ``∂_v 𝓛`` 界中 ``J`` 的幂次，``λ ≥ 0``。
    mu: :class:`float`
        ``∂_v 𝓛`` 界中 ``δ`` 的幂次，``μ ∈ [0, 1]``。
    gamma: :class:`float`
        耗散测度奇异矩的阶数（只做回显）。
    eta: :class:`float`
        源项的负正则性损失，``η ≥ 0``。
    q: :class:`float`
        动理学源项的可积性，``1 ≤ q ≤ p``。
    p: :class:`float`
        ``f`` 的可积性，可以是 ``math.inf``。
    r: :class:`float`
        速度方向的对偶指数，``1 ≤ r ≤ p'``。
    """

    alpha: float
    beta: float
    lam: float = 0.0
    mu: float = 1.0
    gamma: float = 0.0
    eta: float = 0.0
    q: float = 1.0
    p: float = math.inf
    r: float = 1.0

    def validate(self) -> ExponentInputs:
        if not (self.alpha > 0 and self.beta > 0):
            raise InvalidArgument(f'需要 α > 0 且 β > 0，而得到 α={self.alpha!r}, β={self.beta!r}')
        if not 0 <= self.mu <= 1:
            raise InvalidArgument(f'μ 必须在 [0, 1] 中，而不是 {self.mu!r}')
        if self.lam < 0 or self.eta < 0:
            raise InvalidArgument(f'λ 与 η 必须非负，而得到 λ={self.lam!r}, η={self.eta!r}')
        if not 1 <= self.q <= self.p:
            raise InvalidArgument(f'需要 1 ≤ q ≤ p，而得到 q={self.q!r}, p={self.p!r}')
        if not 1 <= self.r <= _dual(self.p):
            raise InvalidArgument(f"需要 1 ≤ r ≤ p'，而得到 r={self.r!r}, p={self.p!r}")
        return self


class ExponentResult(NamedTuple):
    """插值参数 ``θ``、可达到的正则性 ``s*`` 与可积性 ``p*``（``s < s*``，``p < p*``）。"""

    theta: float
    s_star: float
    p_star: float


def averaging_exponents(inputs: ExponentInputs) -> ExponentResult:
    """平均引理的指数代数。

    .. math::

        θ = \\frac{α/r}{α(1/r - 1/q') + 1},\\quad
        s^* = (1-θ)\\frac{αβ}{r} + θ\\Big(\\frac{αβ}{q'} - λ - η\\Big),\\quad
        \\frac{1}{p^*} = \\frac{1-θ}{p} + \\frac{θ}{q}

    ``p = ∞`` 与 ``q' = ∞``（即 ``q = 1``）都按极限处理。

    Raises
    -------
    InvalidArgument
        参数不满足 :meth:`ExponentInputs.validate`。
    """
    inp = inputs.validate()
    inv_q_dual = _inverse(_dual(inp.q))
    theta = (inp.alpha / inp.r) / (inp.alpha * (1.0 / inp.r - inv_q_dual) + 1.0)
    ab = inp.alpha * inp.beta
    s_star = (1.0 - theta) * ab / inp.r + theta * (ab * inv_q_dual - inp.lam - inp.eta)
    inv_p_star = (1.0 - theta) * _inverse(inp.p) + theta / inp.q
    return ExponentResult(theta, s_star, math.inf if inv_p_star == 0 else 1.0 / inv_p_star)


def corollary_exponents(alpha: float, beta: float, lam: float = 0.0) -> ExponentResult:
    """``r = 1, p = 2, q = 1`` 的特例：``s* = α(β-λ)/(α+1)``，``p* = (2α+2)/(2α+1)``。"""
    return averaging_exponents(ExponentInputs(alpha, beta, lam=lam, q=1.0, p=2.0, r=1.0))


def pme_limit_inputs(m: float, *, eta: float = 0.0) -> ExponentInputs:
    """多孔介质方程的极限参数 ``α = 1/(m-1), β = 2, λ = 0, q = 1, r = 1, p = ∞``。

    ``eta = 1/2`` 给出乘性白噪声强迫下的指数。
    """
    if not m > 1:
        raise InvalidArgument(f'需要 m > 1，而不是 {m!r}')
    return ExponentInputs(1.0 / (m - 1.0), 2.0, lam=0.0, mu=1.0, eta=eta, q=1.0, p=math.inf, r=1.0)


def isotropic_pme_exponents(m: float, gamma: float, r: float = 1.0, eta: float = 0.0) -> ExponentResult:
    """各向同性多孔介质方程的约定：``α = 1/(m-1), β = 2, λ = 2(1-γ)/(m-1), μ = 1, q = 1, p = r'``。

    ``γ → 1`` 且 ``r → 1`` 时退化为 :func:`pme_limit_inputs`。
    """
    if not m > 1:
        raise InvalidArgument(f'需要 m > 1，而不是 {m!r}')
    if not 0 <= gamma <= 1:
        raise InvalidArgument(f'γ 必须在 [0, 1] 中，而不是 {gamma!r}')
    inputs = ExponentInputs(1.0 / (m - 1.0), 2.0, lam=2.0 * (1.0 - gamma) / (m - 1.0), mu=1.0, gamma=gamma,
                            eta=eta, q=1.0, p=_dual(r), r=r)
    return averaging_exponents(inputs)


def aniso_exponents(m_list: Sequence[float], n_list: Optional[Sequence[float]] = None) -> Tuple[float, float]:
    """各向异性方程的 ``s* = (2/m̄)·(min(m̲, n̲) - 1)/(m̄ - 1)`` 与 ``p* = 2m̄/(1 + m̄)``。

    ``n_list`` 缺省时取与 ``m_list`` 相同。

    Raises
    -------
    InvalidArgument
        有指数小于 1，或者 ``m̄ ≤ 1``。
    """
    m_list = [float(m) for m in m_list]
    n_list = m_list if n_list is None else [float(n) for n in n_list]
    if not m_list or any(x < 1 for x in m_list + n_list):
        raise InvalidArgument('所有指数都必须 ≥ 1')
    m_max = max(m_list)
    if not m_max > 1:
        raise InvalidArgument(f'需要 max m_j > 1，而不是 {m_max!r}')
    lower = min(min(m_list), min(n_list))
    return (2.0 / m_max) * (lower - 1.0) / (m_max - 1.0), 2.0 * m_max / (1.0 + m_max)


TABLE_COLUMNS = ('m', 's_star', 'p_star', 's_ebmeyer')


def exponent_table(ms: Iterable[float]) -> List[Tuple[float, float, float, float]]:
    """每行 ``(m, 2/m, m, 2/(m+1))``。"""
    rows = []
    for m in ms:
        m = float(m)
        if not m > 1:
            raise InvalidArgument(f'需要 m > 1，而不是 {m!r}')
        rows.append((m, 2.0 / m, m, ebmeyer_exponent(m)))
    return rows


ECHO_COLUMNS = ExponentInputs._fields + ExponentResult._fields


def write_exponent_echo(path: Union[str, os.PathLike],
                        entries: Iterable[Tuple[ExponentInputs, ExponentResult]]) -> None:
    """把输入与结果一并写成 CSV，列为 :data:`ECHO_COLUMNS`。"""
    write_csv(path, ECHO_COLUMNS, [tuple(inp) + tuple(res) for inp, res in entries])
