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

from typing import Any, Dict, List, Literal, TypedDict

OutputFormat = Literal['csv', 'csv+svg']
ExperimentKindName = Literal[
    'exponent-table',
    'barenblatt-validate',
    'regularity-sweep',
    'nondegeneracy-fit',
    'energy-audit',
    'anderson-run',
    'contraction',
    'scaling-identity',
    'nikolskii-bound',
    'structural',
]


class _ExperimentConfigOptional(TypedDict, total=False):
    output: str
    format: OutputFormat
    threads: int
    tolerances: Dict[str, float]


class ExperimentConfig(_ExperimentConfigOptional):
    version: int
    kind: ExperimentKindName
    params: Dict[str, Any]
    seed: int


class SuiteConfig(TypedDict, total=False):
    version: int
    seed: int
    output: str
    format: OutputFormat
    threads: int
    scale: Literal['full', 'quick']
    only: List[str]
    params: Dict[str, Dict[str, Any]]
    tolerances: Dict[str, Dict[str, float]]
