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

"""不依赖绘图库的极简 SVG 图表。输出只取决于输入数据，格式化精度固定，所以同样的数据给出逐字节相同的文件。"""

from __future__ import annotations

import math
from typing import List, Mapping, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

__all__ = (
    'line_chart',
    'bar_chart',
)

WIDTH = 640
HEIGHT = 400
MARGIN = 56
PALETTE = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#17becf', '#7f7f7f')


def _fmt(value: float) -> str:
    return f'{value:.2f}'


def _label(value: float) -> str:
    return f'{value:.3g}'


def _bounds(values: Sequence[float]) -> Tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if lo == hi:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def _header(title: str, xlabel: str, ylabel: str) -> List[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 8}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{HEIGHT // 2}" text-anchor="middle" transform="rotate(-90 14 {HEIGHT // 2})">'
        f'{escape(ylabel)}</text>',
        f'<rect x="{MARGIN}" y="{MARGIN // 2}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}" '
        f'fill="none" stroke="black"/>',
    ]


def line_chart(series: Mapping[str, Tuple[Sequence[float], Sequence[float]]], *, title: str = '',
               xlabel: str = '', ylabel: str = '', log_y: bool = False) -> str:
    """把若干条折线画在同一坐标系中。

    ``log_y`` 为真时纵轴取 ``log₂``，非正的值被跳过（块范数衰减图就是这样画的）。
    """
    prepared = {}
    for name, (xs, ys) in series.items():
        points = []
        for x, y in zip(xs, ys):
            if log_y:
                if not y > 0:
                    continue
                y = math.log2(y)
            if math.isfinite(x) and math.isfinite(y):
                points.append((float(x), float(y)))
        prepared[name] = points

    x_lo, x_hi = _bounds([x for pts in prepared.values() for x, _ in pts])
    y_lo, y_hi = _bounds([y for pts in prepared.values() for _, y in pts])
    left, right = MARGIN, WIDTH - MARGIN
    top, bottom = MARGIN // 2, HEIGHT - 3 * MARGIN // 2

    def sx(x: float) -> float:
        return left + (x - x_lo) / (x_hi - x_lo) * (right - left)

    def sy(y: float) -> float:
        return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top)

    parts = _header(title, xlabel, f'log2 {ylabel}' if log_y else ylabel)
    for value, anchor in ((x_lo, left), (x_hi, right)):
        parts.append(f'<text x="{_fmt(anchor)}" y="{bottom + 16}" text-anchor="middle">{_label(value)}</text>')
    for value, anchor in ((y_lo, bottom), (y_hi, top)):
        parts.append(f'<text x="{left - 4}" y="{_fmt(anchor + 4)}" text-anchor="end">{_label(value)}</text>')

    for index, (name, points) in enumerate(prepared.items()):
        colour = PALETTE[index % len(PALETTE)]
        if points:
            path = ' '.join(f'{_fmt(sx(x))},{_fmt(sy(y))}' for x, y in points)
            parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{path}"/>')
            for x, y in points:
                parts.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="2.5" fill="{colour}"/>')
        legend_y = top + 14 + 16 * index
        parts.append(f'<text x="{right - 6}" y="{legend_y}" text-anchor="end" fill="{colour}">{escape(name)}</text>')
    parts.append('</svg>')
    return '\n'.join(parts) + '\n'


def bar_chart(labels: Sequence[str], values: Sequence[float], *, title: str = '', ylabel: str = '',
              reference: Optional[float] = None) -> str:
    """条形图；``reference`` 画成一条水平虚线（例如隐含常数的上界 1）。"""
    finite = [v for v in values if math.isfinite(v)]
    hi = max(finite + ([reference] if reference is not None else []) + [0.0]) or 1.0
    left, right = MARGIN, WIDTH - MARGIN
    top, bottom = MARGIN // 2, HEIGHT - 3 * MARGIN // 2
    slot = (right - left) / max(len(values), 1)

    def sy(y: float) -> float:
        return bottom - min(y, hi) / hi * (bottom - top)

    parts = _header(title, '', ylabel)
    parts.append(f'<text x="{left - 4}" y="{top + 4}" text-anchor="end">{_label(hi)}</text>')
    for index, (label, value) in enumerate(zip(labels, values)):
        x = left + index * slot + 0.15 * slot
        colour = PALETTE[0] if math.isfinite(value) else PALETTE[1]
        height = bottom - sy(value if math.isfinite(value) else hi)
        parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(bottom - height)}" width="{_fmt(0.7 * slot)}" '
                     f'height="{_fmt(height)}" fill="{colour}"/>')
        parts.append(f'<text x="{_fmt(x + 0.35 * slot)}" y="{bottom + 14}" text-anchor="middle" font-size="9">'
                     f'{escape(label)}</text>')
    if reference is not None:
        parts.append(f'<line x1="{left}" x2="{right}" y1="{_fmt(sy(reference))}" y2="{_fmt(sy(reference))}" '
                     f'stroke="black" stroke-dasharray="4 3"/>')
    parts.append('</svg>')
    return '\n'.join(parts) + '\n'
