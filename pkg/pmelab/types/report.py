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

from typing import Any, Dict, List, Literal, Optional, TypedDict, Union

from .config import ExperimentConfig

CheckStatusName = Literal['pass', 'fail', 'error']


class Check(TypedDict):
    name: str
    status: CheckStatusName
    deviation: Union[float, str]
    tolerance: float
    detail: str


class RunReport(TypedDict):
    config: ExperimentConfig
    passed: bool
    checks: List[Check]
    values: Dict[str, Any]
    files: List[str]


class SuiteEntry(TypedDict):
    id: str
    kind: str
    status: CheckStatusName
    passed: int
    total: int
    error: Optional[str]


class SuiteSummary(TypedDict):
    version: int
    passed: bool
    criteria: List[SuiteEntry]
