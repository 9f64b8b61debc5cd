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


"""
pmelab
~~~~~~

带外力多孔介质方程的数值实验室。

:copyright: (c) 2022-present foxwhite25
:license: MIT, see LICENSE for more details.
"""

__title__ = 'pmelab'
__author__ = 'foxwhite25'
__license__ = 'MIT'
__copyright__ = 'Copyright 2022-present foxwhite25'
__version__ = '0.3.0'

from typing import Literal, NamedTuple

from . import utils
from .enum import *
from .error import *
from .exact import *
from .exponents import *
from .flags import *
from .grid import *
from .harness import *
from .kinetic import *
from .solvers import *
from .spectral import *
from .symbol import *


class VersionInfo(NamedTuple):
    major: int
    minor: int
    micro: int
    releaselevel: Literal["alpha", "beta", "candidate", "final"]
    serial: int


version_info: VersionInfo = VersionInfo(major=0, minor=3, micro=0, releaselevel='beta', serial=0)
