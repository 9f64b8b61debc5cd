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

from typing import Any, Optional

__all__ = (
    'PMELabException',
    'InvalidArgument',
    'GridError',
    'CoverageError',
    'SnapshotError',
    'ComputeAbort',
    'BlowUpError',
    'ConfigError',
)


class PMELabException(Exception):
    """pmelab 的基本异常类，可以捕获从库引发的任何异常。"""
    pass


class InvalidArgument(PMELabException, ValueError):
    """当函数的参数以某种方式无效时引发的异常（例如超出前置条件的范围）。

    这也继承自 :exc:`ValueError`，因此可以像捕获普通参数错误一样捕获它。
    """

    pass


class GridError(InvalidArgument):
    """当网格或场违反其不变量时引发的异常，例如 ``n`` 不是 2 的幂，
    或者在狄利克雷网格上请求了只适用于周期网格的操作。"""

    pass


class CoverageError(InvalidArgument):
    """当速度网格没有覆盖数据范围时引发的异常。

    Attributes
    ------------
    needed: :class:`float`
        数据中出现的最大 ``|u|``。
    available: :class:`float`
        速度网格可覆盖的半宽。
    """

    def __init__(self, needed: float, available: float):
        self.needed: float = needed
        self.available: float = available
        super().__init__(f'速度网格覆盖不足：需要 |v| ≤ {needed:.6g}，但网格只覆盖到 {available:.6g}')


class SnapshotError(PMELabException):
    """读取格式错误的二进制快照文件时引发的异常。"""

    pass


class ComputeAbort(PMELabException):
    """计算在中途被中止时引发的异常。命令行将其映射为退出码 4。"""

    pass


class BlowUpError(ComputeAbort):
    """当数值解超过配置的上限时引发的异常。

    Attributes
    ------------
    time: :class:`float`
        检测到爆破时的模拟时间。
    step: :class:`int`
        时间步编号。
    value: :class:`float`
        当时的 ``max|u|``。
    cap: :class:`float`
        配置的上限。
    """

    def __init__(self, time: float, step: int, value: float, cap: float):
        self.time: float = time
        self.step: int = step
        self.value: float = value
        self.cap: float = cap
        super().__init__(f'第 {step} 步 (t={time:.6g}) 时 max|u|={value:.6g} 超过上限 {cap:.6g}，计算中止')


class ConfigError(PMELabException):
    """实验配置无效时引发的异常。在任何计算开始之前检查。

    Attributes
    ------------
    path: :class:`str`
        出错的配置键路径，例如 ``params.m``。
    reason: :class:`str`
        错误原因。
    """

    def __init__(self, path: str, reason: str, *, value: Optional[Any] = None):
        self.path: str = path
        self.reason: str = reason
        self.value: Optional[Any] = value
        message = f'配置项 {path!r} 无效：{reason}'
        if value is not None:
            message += f'（得到 {value!r}）'
        super().__init__(message)
