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

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

import numpy as np

__all__ = (
    'make_rng',
    'atomic_write',
    'write_csv',
    'read_csv',
)

try:
    import orjson
except ModuleNotFoundError:
    HAS_ORJSON = False
else:
    HAS_ORJSON = True

if HAS_ORJSON:

    def _to_json(obj: Any, *, pretty: bool = False) -> str:  # type: ignore
        option = orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
        if pretty:
            option |= orjson.OPT_INDENT_2
        return orjson.dumps(obj, option=option).decode('utf-8')


    _from_json = orjson.loads  # type: ignore

else:

    def _json_default(obj: Any) -> Any:
        if isinstance(obj, np.generic):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        raise TypeError(f'{obj.__class__.__name__} 无法序列化为 JSON')


    def _to_json(obj: Any, *, pretty: bool = False) -> str:
        if pretty:
            return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, default=_json_default)
        return json.dumps(obj, separators=(',', ':'), sort_keys=True, ensure_ascii=True, default=_json_default)


    _from_json = json.loads


def make_rng(seed: Optional[int]) -> np.random.Generator:
    """由整数种子构造 :class:`numpy.random.Generator`，同一种子给出逐位相同的序列。"""
    return np.random.default_rng(seed)


def atomic_write(path: Union[str, os.PathLike], data: Union[str, bytes]) -> Path:
    """先写入同目录下的临时文件，再用 :func:`os.replace` 原子替换目标文件。"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = 'wb' if isinstance(data, bytes) else 'w'
    fd, tmp = tempfile.mkstemp(prefix=f'.{path.name}.', dir=str(path.parent))
    try:
        with os.fdopen(fd, mode, **({} if mode == 'wb' else {'encoding': 'utf-8', 'newline': ''})) as fp:
            fp.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return path


def _format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: Union[str, os.PathLike], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """原子地写出 CSV 表格。浮点数用 ``repr`` 格式化，所以同样的输入给出逐字节相同的文件。"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(cell) for cell in row])
    return atomic_write(path, buffer.getvalue())


def read_csv(path: Union[str, os.PathLike]) -> List[dict]:
    with open(path, encoding='utf-8', newline='') as fp:
        return list(csv.DictReader(fp))
