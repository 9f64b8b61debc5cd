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

import asyncio
import concurrent.futures
import logging
import math
import os
import statistics
import time
from pathlib import Path
from typing import (
    TYPE_CHECKING,
    Any,
    Callable,
    Dict,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .enum import Boundary, CheckStatus, ExperimentKind
from .error import ConfigError, PMELabException
from .exact import (
    BarenblattParams,
    barenblatt_critical_exponent,
    barenblatt_field,
    barenblatt_mass,
    barenblatt_support_radius,
    barenblatt_threshold,
    power_profile,
)
from .exponents import (
    TABLE_COLUMNS,
    aniso_exponents,
    averaging_exponents,
    corollary_exponents,
    exponent_table,
    pme_limit_inputs,
    write_exponent_echo,
)
from .flags import OutputFlags
from .grid import (
    DyadicPartition,
    Field,
    Grid,
    bump,
    dft_forward,
    odd_extension,
    power_inequality_constant,
    read_snapshot,
)
from .kinetic import (
    VGrid,
    anderson_energy_audit,
    dissipation_from_run,
    entropy_audit,
    kinetic_defect,
    kinetic_mass,
    nikolskii_energy_audit,
)
from .solvers import (
    AndersonProblem,
    PMEProblem,
    l1_contraction_check,
    sample_white_noise,
    solve_anderson,
    solve_pme,
    spike_train_force,
)
from .spectral import besov_profile, critical_exponent_estimate, nikolskii_seminorm, rescale_field
from .svg import bar_chart, line_chart
from .symbol import (
    SymbolDescriptor,
    fit_dv_bound,
    fit_nondegeneracy,
    microlocal_decompose,
    space_time_kinetic,
    symbol_eval,
)
from .utils import _from_json, _to_json, atomic_write, make_rng, read_csv, write_csv

if TYPE_CHECKING:
    from .types.config import ExperimentConfig as ExperimentConfigPayload, SuiteConfig
    from .types.report import (
        Check as CheckPayload,
        RunReport as RunReportPayload,
        SuiteEntry as SuiteEntryPayload,
        SuiteSummary as SuiteSummaryPayload,
    )

__all__ = (
    'CONFIG_VERSION',
    'ExperimentConfig',
    'CheckResult',
    'RunReport',
    'SuiteEntry',
    'SuiteSummary',
    'CRITERIA',
    'run',
    'run_acceptance_suite',
    'inspect',
)

_log = logging.getLogger(__name__)

CONFIG_VERSION = 1
ONE_SIDED = 1e-9

# parameter validators


Validator = Callable[[str, Any], Any]


def _real(lo: Optional[float] = None, hi: Optional[float] = None, *, lo_open: bool = False,
          hi_open: bool = False) -> Validator:
    def check(path: str, value: Any) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, '需要一个实数', value=value)
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(path, '需要一个有限实数', value=value)
        if lo is not None and (value < lo or (lo_open and value == lo)):
            raise ConfigError(path, f'必须{">" if lo_open else "≥"} {lo}', value=value)
        if hi is not None and (value > hi or (hi_open and value == hi)):
            raise ConfigError(path, f'必须{"<" if hi_open else "≤"} {hi}', value=value)
        return value

    return check


def _integer(lo: int = 0, *, power_of_two: bool = False) -> Validator:
    def check(path: str, value: Any) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, '需要一个整数', value=value)
        if value < lo:
            raise ConfigError(path, f'必须 ≥ {lo}', value=value)
        if power_of_two and value & (value - 1):
            raise ConfigError(path, '必须是 2 的幂', value=value)
        return int(value)

    return check


def _listed(item: Validator, *, min_len: int = 0, max_len: Optional[int] = None) -> Validator:
    def check(path: str, value: Any) -> list:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(path, '需要一个列表', value=value)
        if len(value) < min_len or (max_len is not None and len(value) > max_len):
            raise ConfigError(path, f'列表长度必须在 [{min_len}, {max_len if max_len is not None else "∞"}] 内',
                              value=value)
        return [item(f'{path}[{i}]', v) for i, v in enumerate(value)]

    return check


def _choice(*options: str) -> Validator:
    def check(path: str, value: Any) -> str:
        if value not in options:
            raise ConfigError(path, f'必须是 {", ".join(options)} 之一', value=value)
        return value

    return check


def _optional(inner: Validator) -> Validator:
    def check(path: str, value: Any) -> Any:
        return None if value is None else inner(path, value)

    return check


def _interval(path: str, value: Any) -> list:
    pair = _listed(_real(), min_len=2, max_len=2)(path, value)
    if not pair[0] < 0 < pair[1]:
        raise ConfigError(path, '速度区间必须满足 lo < 0 < hi', value=value)
    return pair


_EXPONENT = _real(1.0, lo_open=True)
_POSITIVE = _real(0.0, lo_open=True)
_GRID_N = _integer(8, power_of_two=True)
_FORCINGS = ('none', 'constant', 'spikes')

Schema = Dict[str, Tuple[Any, Validator]]

_SCHEMAS: Dict[ExperimentKind, Schema] = {
    ExperimentKind.exponent_table: {
        'ms': ([1.25, 1.5, 2.0, 3.0], _listed(_EXPONENT, min_len=1)),
        'anderson_m': (1.5, _EXPONENT),
        'aniso_m': ([2.0, 3.0], _listed(_real(1.0), min_len=1, max_len=2)),
        'aniso_n': ([2.0, 3.0], _listed(_real(1.0), min_len=1, max_len=2)),
        'aniso_expected': ([1.0 / 3.0, 1.5], _listed(_real(), min_len=2, max_len=2)),
    },
    ExperimentKind.barenblatt_validate: {
        'm': (2.0, _EXPONENT),
        'd': (1, _integer(1)),
        'p': (3.0, _real(1.0)),
        'n': (16384, _GRID_N),
        'radius': (0.25, _real(0.0, 0.5, lo_open=True, hi_open=True)),
        'window': (None, _optional(_listed(_integer(0), min_len=2, max_len=2))),
    },
    ExperimentKind.regularity_sweep: {
        'betas': ([0.5, 1.0], _listed(_POSITIVE)),
        'ps': ([1.5, 2.0], _listed(_real(1.0))),
        'n': (16384, _GRID_N),
        'forced_ms': ([], _listed(_EXPONENT)),
        'forced_seeds': ([0, 1], _listed(_integer(0), min_len=1)),
        'forced_n': (1024, _GRID_N),
        'forced_p': (1.1, _real(1.0)),
        't_end': (0.002, _POSITIVE),
        'spike_count': (8, _integer(1)),
        'spike_amplitude': (100.0, _POSITIVE),
        'spike_duration': (2e-4, _POSITIVE),
        'spike_width': (0.01, _POSITIVE),
        'margin': (0.2, _real(0.0)),
    },
    ExperimentKind.nondegeneracy_fit: {
        'ms': ([1.5, 2.0, 3.0], _listed(_EXPONENT)),
        'Js': ([4.0, 8.0, 16.0, 32.0], _listed(_POSITIVE, min_len=2)),
        'deltas': ([0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0], _listed(_POSITIVE, min_len=2)),
        'v_interval': ([-1.0, 1.0], _interval),
        'gamma': (0.9, _real(0.0, 1.0)),
        'samples': (2049, _integer(65)),
        'aniso_m': ([2.0, 3.0], _listed(_real(1.0), max_len=2)),
        'aniso_n': ([2.0, 3.0], _listed(_real(1.0), max_len=2)),
        'aniso_Js': ([32.0, 64.0, 128.0, 256.0], _listed(_POSITIVE, min_len=2)),
        'aniso_deltas': ([0.05, 0.2, 0.8], _listed(_POSITIVE, min_len=2)),
    },
    ExperimentKind.energy_audit: {
        'ms': ([2.0, 3.0], _listed(_EXPONENT, min_len=1)),
        'forcings': (list(_FORCINGS), _listed(_choice(*_FORCINGS), min_len=1)),
        'gammas': ([0.5, 0.9], _listed(_real(0.0, 1.0, hi_open=True), min_len=1)),
        'ns': ([256, 512], _listed(_GRID_N, min_len=1)),
        't_end': (0.005, _POSITIVE),
        'amplitude': (1.0, _POSITIVE),
        'spike_count': (8, _integer(1)),
        'spike_width': (0.02, _POSITIVE),
        'spike_duration': (0.0005, _POSITIVE),
        'n_v': (64, _integer(4)),
        'snapshots': (100, _integer(2)),
        'slack': (0.25, _real(0.0)),
    },
    ExperimentKind.anderson_run: {
        'm': (1.5, _real(1.0, 2.0, lo_open=True, hi_open=True)),
        'seeds': ([0, 1, 2], _listed(_integer(0), min_len=1)),
        'levels': ([0.02, 0.01, 0.005], _listed(_POSITIVE, min_len=1)),
        'n': (512, _GRID_N),
        't_end': (0.01, _POSITIVE),
        'amplitude': (1.0, _POSITIVE),
        'n_v': (64, _integer(4)),
        'snapshots': (100, _integer(2)),
        'spread': (0.25, _real(0.0)),
    },
    ExperimentKind.contraction: {
        'm': (2.0, _EXPONENT),
        'ns': ([2048, 4096], _listed(_GRID_N, min_len=1)),
        't_end': (1e-4, _POSITIVE),
        'shift': (0.05, _real(0.0, 0.25)),
        'amplitude_b': (0.8, _POSITIVE),
    },
    ExperimentKind.scaling_identity: {
        'm': (2.0, _EXPONENT),
        'p': (2.0, _real(1.0)),
        's': (0.5, _real(0.0, 1.0, lo_open=True, hi_open=True)),
        'eta': (2.0, _POSITIVE),
        'n': (1024, _GRID_N),
        'radius': (0.2, _real(0.0, 0.5, lo_open=True, hi_open=True)),
    },
    ExperimentKind.nikolskii_bound: {
        'm': (2.0, _real(2.0)),
        'gamma': (1.0, _POSITIVE),
        'ns': ([256, 512], _listed(_GRID_N, min_len=1)),
        't_end': (0.005, _POSITIVE),
        'forcing': ('constant', _choice('none', 'constant')),
        'amplitude': (0.5, _POSITIVE),
        'snapshots': (50, _integer(2)),
        'spread': (0.25, _real(0.0)),
    },
    ExperimentKind.structural: {
        'n': (256, _GRID_N),
        'n_t': (128, _integer(4)),
        'n_v': (24, _integer(4)),
        'm': (2.0, _EXPONENT),
        'power_ms': ([2.0, 3.0], _listed(_real(2.0), min_len=1)),
        'delta': (100.0, _POSITIVE),
        'kmax': (8, _integer(1)),
        't_end': (0.01, _POSITIVE),
        'snapshots': (64, _integer(2)),
    },
}


def _cross_checks(kind: ExperimentKind, params: Dict[str, Any]) -> None:
    if kind is ExperimentKind.barenblatt_validate:
        if params['d'] not in (1, 2):
            raise ConfigError('params.d', '维数必须是 1 或 2', value=params['d'])
        if params['d'] == 2 and params['n'] > 1024:
            raise ConfigError('params.n', '二维网格的点数不能超过 1024', value=params['n'])
        window = params['window']
        if window is not None and window[0] > window[1]:
            raise ConfigError('params.window', '窗口必须满足 lo ≤ hi', value=window)
    elif kind is ExperimentKind.exponent_table:
        if len(params['aniso_m']) != len(params['aniso_n']) or max(params['aniso_m']) <= 1:
            raise ConfigError('params.aniso_n', '通量指数必须与扩散指数一样多，且 max m_j > 1')
    elif kind is ExperimentKind.nondegeneracy_fit:
        if len(params['aniso_m']) != len(params['aniso_n']):
            raise ConfigError('params.aniso_n', '通量指数必须与扩散指数一样多')
        if params['aniso_m'] and (len(params['aniso_m']) != 2 or max(params['aniso_m']) <= 1):
            raise ConfigError('params.aniso_m', '各向异性符号需要两个扩散指数且最大值 > 1')


def _validate_params(kind: ExperimentKind, params: Any) -> Dict[str, Any]:
    if params is None:
        params = {}
    if not isinstance(params, Mapping):
        raise ConfigError('params', '需要一个对象', value=params)
    schema = _SCHEMAS[kind]
    unknown = sorted(set(params) - set(schema))
    if unknown:
        raise ConfigError(f'params.{unknown[0]}', f'{kind} 实验没有这个参数')
    result = {}
    for name, (default, validator) in schema.items():
        value = params.get(name, default)
        result[name] = validator(f'params.{name}', value)
    _cross_checks(kind, result)
    return result


def _validate_tolerances(path: str, value: Any) -> Dict[str, float]:
    if value is None:
        return {}
    if not isinstance(value, Mapping):
        raise ConfigError(path, '需要一个对象', value=value)
    check = _real(0.0)
    return {str(k): check(f'{path}.{k}', v) for k, v in value.items()}


def _validate_format(path: str, value: Any) -> OutputFlags:
    if isinstance(value, OutputFlags):
        if not value.value:
            raise ConfigError(path, '至少需要一种输出格式', value=value.value)
        return value
    if not isinstance(value, str):
        raise ConfigError(path, '需要 csv、svg 或 csv+svg', value=value)
    try:
        return OutputFlags.from_format(value)
    except ValueError as exc:
        raise ConfigError(path, str(exc), value=value) from None


class ExperimentConfig:
    """一次实验的完整配置。构造时校验所有参数，未给出的参数取缺省值。

    JSON 形式为 ::

        {"version": 1, "kind": "barenblatt-validate", "params": {"m": 2.0}, "seed": 0,
         "format": "csv+svg", "tolerances": {"barenblatt-exponent": 0.1}}

    .. container:: operations

        .. describe:: x == y

            检查两个配置的回显是否相同。

    Attributes
    -----------
    kind: :class:`ExperimentKind`
        实验种类。
    params: Dict[:class:`str`, Any]
        校验并补全缺省值之后的参数。
    seed: :class:`int`
        随机种子，所有随机量都由它派生。
    output: Optional[:class:`str`]
        输出目录；为 ``None`` 时不写文件。
    format: :class:`OutputFlags`
        输出文件种类。
    threads: Optional[:class:`int`]
        FFT 的工作线程数。
    tolerances: Dict[:class:`str`, :class:`float`]
        按检查名覆盖容差；``"*"`` 作用于所有检查。
    """

    __slots__ = ('kind', 'params', 'seed', 'output', 'format', 'threads', 'tolerances')

    def __init__(self, kind: Union[ExperimentKind, str], params: Optional[Mapping[str, Any]] = None, *, seed: int = 0,
                 output: Optional[str] = None, format: Union[OutputFlags, str] = 'csv',
                 threads: Optional[int] = None, tolerances: Optional[Mapping[str, float]] = None):
        if not isinstance(kind, ExperimentKind):
            try:
                kind = ExperimentKind(kind)
            except ValueError:
                raise ConfigError('kind', f'必须是 {", ".join(str(k) for k in ExperimentKind)} 之一',
                                  value=kind) from None
        self.kind: ExperimentKind = kind
        self.params: Dict[str, Any] = _validate_params(kind, params)
        self.seed: int = _integer(0)('seed', seed)
        if output is not None and not isinstance(output, (str, os.PathLike)):
            raise ConfigError('output', '需要一个路径字符串', value=output)
        self.output: Optional[str] = None if output is None else os.fspath(output)
        self.format: OutputFlags = _validate_format('format', format)
        self.threads: Optional[int] = _optional(_integer(1))('threads', threads)
        self.tolerances: Dict[str, float] = _validate_tolerances('tolerances', tolerances)

    def __setattr__(self, name: str, value: Any) -> None:
        if hasattr(self, name):
            raise AttributeError(f'ExperimentConfig 不可变，请使用 replace() 修改 {name}')
        super().__setattr__(name, value)

    def __repr__(self) -> str:
        return f'<ExperimentConfig kind={self.kind} seed={self.seed} output={self.output!r}>'

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, ExperimentConfig) and self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(_to_json(self.to_dict()))

    _KEYS = frozenset({'version', 'kind', 'params', 'seed', 'output', 'format', 'threads', 'tolerances'})

    @classmethod
    def from_dict(cls, data: Any) -> ExperimentConfig:
        """从 JSON 对象构造配置。

        Raises
        -------
        ConfigError
            版本不对、有未知的键或者参数越界。
        """
        if not isinstance(data, Mapping):
            raise ConfigError('<root>', '配置必须是一个 JSON 对象', value=data)
        unknown = sorted(set(data) - cls._KEYS)
        if unknown:
            raise ConfigError(unknown[0], '未知的配置键')
        if data.get('version') != CONFIG_VERSION:
            raise ConfigError('version', f'只支持版本 {CONFIG_VERSION}', value=data.get('version'))
        if 'kind' not in data:
            raise ConfigError('kind', '缺少实验种类')
        return cls(
            data['kind'],
            data.get('params'),
            seed=data.get('seed', 0),
            output=data.get('output'),
            format=data.get('format', 'csv'),
            threads=data.get('threads'),
            tolerances=data.get('tolerances'),
        )

    @classmethod
    def from_file(cls, path: Union[str, os.PathLike]) -> ExperimentConfig:
        """读取 JSON 配置文件。文件读不到时引发 :exc:`OSError`。"""
        text = Path(path).read_text(encoding='utf-8')
        try:
            data = _from_json(text)
        except ValueError as exc:
            raise ConfigError('<root>', f'不是有效的 JSON：{exc}') from None
        return cls.from_dict(data)

    def to_dict(self) -> ExperimentConfigPayload:
        data: ExperimentConfigPayload = {
            'version': CONFIG_VERSION,
            'kind': str(self.kind),
            'params': {k: list(v) if isinstance(v, (list, tuple)) else v for k, v in self.params.items()},
            'seed': self.seed,
            'format': self.format.to_format(),
            'tolerances': dict(self.tolerances),
        }
        if self.output is not None:
            data['output'] = self.output
        if self.threads is not None:
            data['threads'] = self.threads
        return data

    def replace(self, **changes: Any) -> ExperimentConfig:
        """返回修改了部分字段的新配置（命令行的 ``--seed``、``--out`` 等就是这样生效的）。"""
        options = {name: getattr(self, name) for name in self.__slots__}
        options.update(changes)
        kind, params = options.pop('kind'), options.pop('params')
        return ExperimentConfig(kind, params, **options)


def _json_safe(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, Mapping):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


class CheckResult(NamedTuple):
    """一项硬检查。当且仅当 ``deviation < tolerance``（严格小于）时通过。"""

    name: str
    status: CheckStatus
    deviation: float
    tolerance: float
    detail: str = ''

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.passed

    def to_dict(self) -> CheckPayload:
        return {
            'name': self.name,
            'status': str(self.status),
            'deviation': _json_safe(self.deviation),
            'tolerance': _json_safe(self.tolerance),
            'detail': self.detail,
        }


class RunReport:
    """:func:`run` 的结果。

    ``wall_clock`` 只留在内存和日志里，不写进 ``report.json``，所以同样的配置给出逐字节相同的文件。

    Attributes
    -----------
    config: :class:`ExperimentConfig`
        配置回显。
    checks: List[:class:`CheckResult`]
        每项检查恰好出现一次。
    values: Dict[:class:`str`, Any]
        测得的数值。
    files: List[:class:`str`]
        写出的文件（相对于输出目录）。
    wall_clock: :class:`float`
        用时（秒）。
    """

    __slots__ = ('config', 'checks', 'values', 'files', 'wall_clock')

    def __init__(self, config: ExperimentConfig, checks: Sequence[CheckResult], values: Dict[str, Any],
                 files: Sequence[str], wall_clock: float = 0.0):
        self.config = config
        self.checks = list(checks)
        self.values = dict(values)
        self.files = list(files)
        self.wall_clock = wall_clock

    def __repr__(self) -> str:
        return f'<RunReport kind={self.config.kind} passed={self.passed} checks={len(self.checks)}>'

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> Optional[CheckResult]:
        for c in self.checks:
            if c.name == name:
                return c
        return None

    def to_dict(self) -> RunReportPayload:
        return {
            'config': self.config.to_dict(),
            'passed': self.passed,
            'checks': [c.to_dict() for c in self.checks],
            'values': _json_safe(self.values),
            'files': list(self.files),
        }

    def write(self, path: Union[str, os.PathLike]) -> None:
        atomic_write(path, _to_json(self.to_dict(), pretty=True) + '\n')


class _Run:
    # mutable state of one experiment while it executes
    __slots__ = ('config', 'out', 'checks', 'values', 'files', 'names')

    def __init__(self, config: ExperimentConfig, out: Optional[Path]):
        self.config = config
        self.out = out
        self.checks: List[CheckResult] = []
        self.values: Dict[str, Any] = {}
        self.files: List[str] = []
        self.names: set = set()

    @property
    def params(self) -> Dict[str, Any]:
        return self.config.params

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def workers(self) -> Optional[int]:
        return self.config.threads

    def check(self, name: str, deviation: float, tolerance: float, detail: str = '') -> None:
        if name in self.names:
            raise PMELabException(f'检查 {name!r} 重复')
        self.names.add(name)
        overrides = self.config.tolerances
        tolerance = overrides.get(name, overrides.get('*', tolerance))
        deviation = float(deviation)
        passed = math.isfinite(deviation) and deviation < tolerance
        status = CheckStatus.passed if passed else CheckStatus.failed
        if not passed:
            _log.warning('检查 %s 未通过：偏差 %.6g，容差 %.3g %s', name, deviation, tolerance, detail)
        self.checks.append(CheckResult(name, status, deviation, tolerance, detail))

    def finite(self, name: str, value: float, detail: str = '') -> None:
        self.check(name, 0.0 if math.isfinite(value) else math.inf, ONE_SIDED, detail or f'value={value!r}')

    def _target(self, name: str) -> Optional[Path]:
        if self.out is None:
            return None
        self.files.append(name)
        return self.out / name

    def path(self, name: str) -> Optional[Path]:
        """CSV 产物的路径；没有输出目录或关闭了 CSV 时为 ``None``。"""
        return self._target(name) if self.config.format.csv else None

    def table(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
        path = self.path(name)
        if path is not None:
            write_csv(path, header, rows)

    def plot(self, name: str, render: Callable[[], str]) -> None:
        path = self._target(name) if self.config.format.svg else None
        if path is not None:
            atomic_write(path, render())


def _bump_field(grid: Grid, center: float, radius: float, amplitude: float) -> Field:
    def profile(*coords: np.ndarray) -> np.ndarray:
        r2 = sum((c - center) ** 2 for c in coords)
        return amplitude * bump(np.sqrt(r2) / radius)

    return Field.from_function(grid, profile)


def _barenblatt_params(m: float, d: int, radius: float) -> BarenblattParams:
    # support radius is linear in the amplitude parameter a
    unit = barenblatt_support_radius(BarenblattParams(m, d), 0.0)
    return BarenblattParams(m, d, a=radius / unit)


def _stride_for(problem: Union[PMEProblem, AndersonProblem], count: int) -> int:
    dt = problem.scheme().stable_dt(problem.u0.values)
    if not math.isfinite(dt) or dt <= 0:
        return 1
    return max(1, int(problem.t_end / dt) // count)


def _relative(measured: float, expected: float) -> float:
    return abs(measured - expected) / abs(expected) if expected != 0 else abs(measured)


def _fit_row(fit: Any) -> Tuple[Any, ...]:
    return fit.s_hat, fit.stderr, fit.window[0], fit.window[1], fit.capped, fit.cap


FIT_COLUMNS = ('s_hat', 'stderr', 'window_lo', 'window_hi', 'capped', 'cap')


# experiments


def _run_exponent_table(run: _Run) -> None:
    p = run.params
    run.table('exponent_table.csv', TABLE_COLUMNS, exponent_table(p['ms']))

    echo = []
    worst = 0.0
    corollary = 0.0
    for m in p['ms']:
        inputs = pme_limit_inputs(m)
        result = averaging_exponents(inputs)
        echo.append((inputs, result))
        worst = max(worst, abs(result.theta - 1.0 / m), abs(result.s_star - 2.0 / m), abs(result.p_star - m))
        alpha = 1.0 / (m - 1.0)
        cor = corollary_exponents(alpha, 2.0)
        corollary = max(corollary, abs(cor.s_star - 2.0 / m), abs(cor.p_star - 2.0 * m / (m + 1.0)))
    run.check('pme-limit', worst, 1e-12, 'θ=1/m, s*=2/m, p*=m')
    run.check('corollary', corollary, 1e-12, 's*=α(β-λ)/(α+1), p*=(2α+2)/(2α+1)')

    m = p['anderson_m']
    inputs = pme_limit_inputs(m, eta=0.5)
    result = averaging_exponents(inputs)
    echo.append((inputs, result))
    run.check('anderson', abs(result.s_star - 1.5 / m), 1e-12, f's*={result.s_star!r}')
    run.values['anderson_s_star'] = result.s_star

    s_star, p_star = aniso_exponents(p['aniso_m'], p['aniso_n'])
    expected = p['aniso_expected']
    run.check('aniso', max(abs(s_star - expected[0]), abs(p_star - expected[1])), 1e-12,
              f's*={s_star!r}, p*={p_star!r}')
    run.values.update(aniso_s_star=s_star, aniso_p_star=p_star)

    path = run.path('exponent_echo.csv')
    if path is not None:
        write_exponent_echo(path, echo)


def _profile_chart(profiles: Mapping[str, Any], title: str) -> Callable[[], str]:
    def render() -> str:
        series = {name: (list(prof.blocks), list(prof.norms)) for name, prof in profiles.items()}
        return line_chart(series, title=title, xlabel='j', ylabel='block norm', log_y=True)

    return render


def _run_barenblatt_validate(run: _Run) -> None:
    p = run.params
    m, d = p['m'], p['d']
    grid = Grid(d, p['n'], 1.0)
    params = _barenblatt_params(m, d, p['radius'])
    u = barenblatt_field(params, grid, 0.0)
    run.values.update(mass_exact=barenblatt_mass(params), mass_discrete=u.mass())

    window = tuple(p['window']) if p['window'] is not None else None
    integrabilities = [p['p']] + ([m + 1.0] if p['p'] != m + 1.0 else [])
    profiles = {}
    rows = []
    for index, q in enumerate(integrabilities):
        profile = besov_profile(u, q, mean_free=True, workers=run.workers)
        profiles[f'p={q:g}'] = profile
        fit = critical_exponent_estimate(profile, window)
        target = barenblatt_critical_exponent(m, q)
        name = 'barenblatt-exponent' if index == 0 else 'barenblatt-exponent(p=m+1)'
        run.check(name, abs(fit.s_hat - target), 0.1, f's_hat={fit.s_hat:.4f}, target={target:.4f}')
        rows.append((q, target) + _fit_row(fit))
        run.values[f's_hat(p={q:g})'] = fit.s_hat
        path = run.path(f'besov_profile_p{q:g}.csv')
        if path is not None:
            profile.write_csv(path)

    threshold = barenblatt_threshold(m)
    run.check('threshold-consistency', abs(barenblatt_critical_exponent(m, m + 1.0) - threshold), 1e-12)
    run.values['threshold'] = threshold
    run.table('fit.csv', ('p', 'target') + FIT_COLUMNS, rows)
    run.plot('besov_profile.svg', _profile_chart(profiles, f'Barenblatt m={m:g}'))


def _run_regularity_sweep(run: _Run) -> None:
    p = run.params
    rows = []
    profiles = {}
    if p['betas'] and p['ps']:
        grid = Grid(1, p['n'])
        for beta in p['betas']:
            u = power_profile(beta, grid)
            for q in p['ps']:
                profile = besov_profile(u, q, mean_free=True, workers=run.workers)
                fit = critical_exponent_estimate(profile)
                target = beta + 1.0 / q
                run.check(f'calibration(beta={beta:g},p={q:g})', abs(fit.s_hat - target), 0.1,
                          f's_hat={fit.s_hat:.4f}')
                rows.append(('power', beta, q, '', target) + _fit_row(fit))
                profiles[f'beta={beta:g},p={q:g}'] = profile

    if p['forced_ms']:
        grid = Grid(1, p['forced_n'])
        q = p['forced_p']
        for m in p['forced_ms']:
            for seed in p['forced_seeds']:
                force = spike_train_force(grid, count=p['spike_count'], width=p['spike_width'],
                                          amplitude=p['spike_amplitude'], duration=p['spike_duration'],
                                          t_end=p['t_end'], seed=run.seed + seed)
                problem = PMEProblem(m, grid, Field.zeros(grid), force=force, t_end=p['t_end'])
                final = solve_pme(problem, snapshot_stride=10 ** 9).final
                profile = besov_profile(final, q, mean_free=True, workers=run.workers)
                fit = critical_exponent_estimate(profile)
                bound = 2.0 / m - p['margin']
                run.check(f'forced(m={m:g},seed={seed})', max(0.0, bound - fit.s_hat), ONE_SIDED,
                          f's_hat={fit.s_hat:.4f} ≥ {bound:.4f}')
                rows.append(('forced', m, q, seed, 2.0 / m) + _fit_row(fit))
                profiles[f'forced m={m:g} seed={seed}'] = profile

    run.table('regularity.csv', ('source', 'parameter', 'p', 'seed', 'target') + FIT_COLUMNS, rows)
    run.plot('regularity.svg', _profile_chart(profiles, 'block-norm decay'))


def _run_nondegeneracy_fit(run: _Run) -> None:
    p = run.params
    interval = tuple(p['v_interval'])
    gamma = p['gamma']
    omega_rows, dv_rows = [], []
    series = {}
    for m in p['ms']:
        desc = SymbolDescriptor.porous_medium(m)
        fit = fit_nondegeneracy(desc, p['Js'], p['deltas'], interval, samples=p['samples'])
        alpha = 1.0 / (m - 1.0)
        run.check(f'alpha(m={m:g})', _relative(fit.alpha, alpha), 0.05, f'α={fit.alpha:.4f}')
        run.check(f'beta(m={m:g})', _relative(fit.beta, 2.0), 0.05, f'β={fit.beta:.4f}')
        omega_rows.extend((desc.name, m, J, delta, omega) for J, delta, omega in fit.table)
        J0 = p['Js'][0]
        series[f'm={m:g}, J={J0:g}'] = ([d for J, d, _ in fit.table if J == J0],
                                        [w for J, _, w in fit.table if J == J0])

        dv = fit_dv_bound(desc, p['Js'], p['deltas'], gamma, interval, samples=p['samples'])
        formula = 2.0 - 2.0 * (m - 2.0 + gamma) / (m - 1.0)
        run.check(f'lambda(m={m:g})', _relative(dv.lam, formula), 0.1, f'λ={dv.lam:.4f}, formula={formula:.4f}')
        dv_rows.extend((desc.name, m, J, delta, bound) for J, delta, bound in dv.table)
        run.values[f'fit(m={m:g})'] = {'alpha': fit.alpha, 'beta': fit.beta, 'lambda': dv.lam, 'mu': dv.mu}

    if p['aniso_m']:
        desc = SymbolDescriptor.anisotropic(p['aniso_m'], p['aniso_n'])
        slices = {'samples': p['samples'], 'n_xi': 5, 'n_tau': 6, 'n_dir': 6}
        dv = fit_dv_bound(desc, p['aniso_Js'], p['aniso_deltas'], gamma, interval, envelope=True, **slices)
        formula = 2.0 - 2.0 * (min(p['aniso_m']) - 2.0 + gamma) / (max(p['aniso_m']) - 1.0)
        run.check('lambda-aniso', _relative(dv.lam, formula), 0.1, f'λ={dv.lam:.4f}, formula={formula:.4f}')
        sharp = fit_dv_bound(desc, p['Js'], p['aniso_deltas'], gamma, interval, **slices)
        run.check('lambda-aniso-sharp', max(0.0, sharp.lam - formula), ONE_SIDED,
                  f'λ={sharp.lam:.4f} ≤ {formula:.4f}')
        dv_rows.extend((f'{desc.name}-envelope', max(p['aniso_m']), J, delta, bound) for J, delta, bound in dv.table)
        dv_rows.extend((desc.name, max(p['aniso_m']), J, delta, bound) for J, delta, bound in sharp.table)
        run.values['fit(aniso)'] = {'lambda': dv.lam, 'mu': dv.mu, 'sharp_lambda': sharp.lam, 'sharp_mu': sharp.mu,
                                    'formula': formula}

    run.table('nondegeneracy.csv', ('symbol', 'm', 'J', 'delta', 'omega'), omega_rows)
    run.table('dv_bound.csv', ('symbol', 'm', 'J', 'delta', 'bound'), dv_rows)
    run.plot('nondegeneracy.svg',
             lambda: line_chart({k: ([math.log2(x) for x in xs], ys) for k, (xs, ys) in series.items()},
                                title='ω(J; δ)', xlabel='log2 δ', ylabel='ω', log_y=True))


def _make_force(kind: str, grid: Grid, p: Dict[str, Any], seed: int) -> Any:
    if kind == 'none':
        return None
    if kind == 'constant':
        return _bump_field(grid, 0.3, 0.2, p['amplitude'])
    return spike_train_force(grid, count=p['spike_count'], width=p['spike_width'], amplitude=p['amplitude'] * 20.0,
                             duration=p['spike_duration'], t_end=p['t_end'], seed=seed)


def _run_energy_audit(run: _Run) -> None:
    p = run.params
    constants: Dict[Tuple[float, str, float], List[float]] = {}
    rows = []
    for n in p['ns']:
        grid = Grid(1, n)
        u0 = _bump_field(grid, 0.5, 0.25, 1.0)
        for m in p['ms']:
            for forcing in p['forcings']:
                force = _make_force(forcing, grid, p, run.seed)
                problem = PMEProblem(m, grid, u0, force=force, t_end=p['t_end'])
                trajectory = solve_pme(problem, _stride_for(problem, p['snapshots']))
                vgrid = VGrid.covering(trajectory, p['n_v'])
                q = dissipation_from_run(trajectory, m, vgrid)
                audit = entropy_audit(trajectory, q, p['gammas'], u0, force)
                label = f'n={n},m={m:g},force={forcing}'
                for g in p['gammas']:
                    implied = audit.find('energy', g).implied_constant
                    run.finite(f'energy({label},gamma={g:g})', implied)
                    constants.setdefault((m, forcing, g), []).append(implied)
                if forcing != 'spikes':
                    gain = p['t_end'] * force.mass() if force is not None else 0.0
                    drift = trajectory.final.mass() - u0.mass() - gain
                    run.check(f'mass({label})', abs(drift) / u0.mass(), 1e-8, f'drift={drift:.3e}')
                rows.extend((n, m, forcing) + tuple(row) for row in audit)

    if len(p['ns']) > 1:
        for (m, forcing, g), values in constants.items():
            coarse, fine = values[0], values[-1]
            run.check(f'refinement(m={m:g},force={forcing},gamma={g:g})',
                      max(0.0, fine - (1.0 + p['slack']) * coarse), ONE_SIDED, f'{coarse:.4g} → {fine:.4g}')

    run.table('energy_audit.csv', ('n', 'm', 'forcing', 'quantity', 'gamma', 'lhs', 'rhs', 'implied_constant'),
              rows)
    finest = [(k, v[-1]) for k, v in constants.items()]
    run.values['implied_constants'] = {f'm={m:g},force={f},gamma={g:g}': c for (m, f, g), c in finest}
    run.plot('energy_audit.svg',
             lambda: bar_chart([f'{m:g}/{f}/{g:g}' for (m, f, g), _ in finest], [c for _, c in finest],
                               title='energy audit implied constants', ylabel='C', reference=1.0))


def _run_anderson(run: _Run) -> None:
    p = run.params
    m = p['m']
    grid = Grid(1, p['n'], 1.0, Boundary.dirichlet)
    u0 = _bump_field(grid, 0.5, 0.3, p['amplitude'])
    rows = []
    for seed in p['seeds']:
        noise = sample_white_noise(grid, run.seed + seed)
        constants = []
        for level in p['levels']:
            problem = AndersonProblem(m, grid, u0, noise, noise_level=level, t_end=p['t_end'])
            trajectory = solve_anderson(problem, _stride_for(problem, p['snapshots']))
            vgrid = VGrid.covering(trajectory, p['n_v'])
            q = dissipation_from_run(trajectory, m, vgrid)
            audit = anderson_energy_audit(trajectory, q, m, problem.potential)
            implied = audit.find('anderson-energy').implied_constant
            run.finite(f'anderson-bound(seed={seed},level={level:g})', implied)
            constants.append(implied)
            fit = critical_exponent_estimate(besov_profile(odd_extension(trajectory.final), mean_free=True,
                                                           workers=run.workers))
            rows.append((seed, level, implied, audit.metadata['moment_identity_ratio'],
                         audit.metadata['noise_besov_surrogate'], fit.s_hat, fit.capped))
        finite = [c for c in constants if math.isfinite(c)]
        if finite:
            centre = statistics.median(finite)
            spread = max(abs(c / centre - 1.0) for c in constants) if centre > 0 else math.inf
        else:
            spread = math.inf
        run.check(f'anderson-stability(seed={seed})', max(0.0, spread - p['spread']), ONE_SIDED,
                  f'spread={spread:.4g}')
    run.values['s_target'] = 1.5 / m
    run.table('anderson.csv', ('seed', 'level', 'implied_constant', 'moment_identity_ratio', 'noise_besov',
                               's_hat', 'capped'), rows)
    run.plot('anderson.svg', lambda: bar_chart([f'{r[0]}/{r[1]:g}' for r in rows], [r[2] for r in rows],
                                               title='Anderson energy bound', ylabel='C'))


def _run_contraction(run: _Run) -> None:
    p = run.params
    rows = []
    slacks = []
    for n in p['ns']:
        grid = Grid(1, n)
        u0_a = _bump_field(grid, 0.5, 0.25, 1.0)
        u0_b = _bump_field(grid, 0.5 + p['shift'], 0.25, p['amplitude_b'])
        problem = PMEProblem(p['m'], grid, u0_a, t_end=p['t_end'])
        report = l1_contraction_check(problem, u0_a, u0_b)
        run.check(f'contraction(n={n})', report.relative_slack, 1e-2, f'slack={report.slack:.3e}')
        ordered = l1_contraction_check(problem, u0_a, u0_a * 0.5)
        run.check(f'order(n={n})', 0.0 if ordered.order_preserved else 1.0, 0.5)
        slacks.append((report.slack, report.initial_distance))
        rows.append((n, report.initial_distance, report.sup_distance, report.slack, report.relative_slack,
                     ordered.order_preserved, report.steps))
    for (coarse, _), (fine, initial) in zip(slacks, slacks[1:]):
        allowed = max(0.5 * coarse, 1e-12 * initial)
        run.check(f'slack-halving({coarse:.3e}→{fine:.3e})', max(0.0, fine - allowed), ONE_SIDED)
    run.table('contraction.csv', ('n', 'initial_distance', 'sup_distance', 'slack', 'relative_slack',
                                  'order_preserved', 'steps'), rows)


def _run_scaling_identity(run: _Run) -> None:
    p = run.params
    m, q, s, eta = p['m'], p['p'], p['s'], p['eta']
    expected = -2.0 * q / m + s * q - 1.0
    rows = []
    for n in (p['n'], 2 * p['n']):
        grid = Grid(1, n)
        u = barenblatt_field(_barenblatt_params(m, 1, p['radius']), grid, 0.0)
        base, shift = nikolskii_seminorm(u, s, q)
        scaled, scaled_shift = nikolskii_seminorm(rescale_field(u, eta, m), s, q)
        measured = math.log(scaled / base) / math.log(eta)
        run.check(f'scaling-exponent(n={n})', _relative(measured, expected), 0.01,
                  f'measured={measured:.6f}, expected={expected:.6f}')
        rows.append((n, base, shift, scaled, scaled_shift, measured, expected))
    run.table('scaling.csv', ('n', 'seminorm', 'shift', 'rescaled', 'rescaled_shift', 'measured', 'expected'), rows)


def _run_nikolskii_bound(run: _Run) -> None:
    p = run.params
    m, gamma = p['m'], p['gamma']
    constants = []
    rows = []
    for n in p['ns']:
        grid = Grid(1, n)
        u0 = _bump_field(grid, 0.5, 0.25, 1.0)
        force = _bump_field(grid, 0.3, 0.2, p['amplitude']) if p['forcing'] == 'constant' else None
        problem = PMEProblem(m, grid, u0, force=force, t_end=p['t_end'])
        trajectory = solve_pme(problem, _stride_for(problem, p['snapshots']))
        audit = nikolskii_energy_audit(trajectory, m, gamma, force)
        implied = audit.find('nikolskii').implied_constant
        run.finite(f'nikolskii(n={n})', implied)
        constants.append(implied)
        rows.extend((n,) + tuple(row) for row in audit)
    if len(constants) > 1:
        ratio = constants[-1] / constants[0] if constants[0] > 0 else math.inf
        run.check('nikolskii-refinement', max(0.0, abs(ratio - 1.0) - p['spread']), ONE_SIDED, f'ratio={ratio:.4g}')
    run.values['implied_constants'] = constants
    run.table('nikolskii.csv', ('n', 'quantity', 'gamma', 'lhs', 'rhs', 'implied_constant'), rows)


def _run_structural(run: _Run) -> None:
    p = run.params
    n = p['n']
    rng = make_rng(run.seed)

    worst = 0.0
    for grid in (Grid(1, n), Grid(2, min(n, 64))):
        partition = DyadicPartition.for_grid(grid)
        worst = max(worst, float(np.max(np.abs(sum(partition.grid_weights(grid)) - 1.0))))
    run.check('partition-of-unity', worst, 1e-12)

    u = Field(Grid(1, n), rng.standard_normal(n))
    energy = float(np.sum(u.values ** 2))
    run.check('parseval', abs(energy - dft_forward(u).energy()) / energy, 1e-12)

    grid = Grid(1, n)
    wave = Field.from_function(grid, lambda x: np.sin(2.0 * math.pi * x))
    vgrid = VGrid.symmetric(1.2, 64)
    sandwich = float(np.max(np.abs(kinetic_mass(wave, vgrid).values - np.abs(wave.values))))
    run.check('chi-sandwich', max(0.0, sandwich - vgrid.spacing), ONE_SIDED, f'max error {sandwich:.3e}')

    defect = kinetic_defect(wave, vgrid)
    expected = np.zeros(defect.shape, dtype=np.int64)
    nodes = np.arange(n)
    upper = vgrid.boundary_index(wave.values)
    inside = upper < vgrid.n_v
    np.add.at(expected, (nodes[inside], upper[inside]), -1)
    expected[:, vgrid.zero_cell] += 1
    mismatched = int(np.count_nonzero(np.any(defect != expected, axis=-1)))
    run.check('dv-chi-delta', mismatched, 0.5, f'{mismatched} nodes differ')

    desc = SymbolDescriptor.porous_medium(p['m'])
    tau, xi, v = rng.normal(size=1000), rng.normal(size=(1000, 1)) * 10.0, rng.uniform(-2.0, 2.0, 1000)
    value = np.asarray(symbol_eval(desc, tau, xi, v))
    violations = int(np.count_nonzero(np.abs(value) < p['m'] * np.abs(v) ** (p['m'] - 1.0) * xi[:, 0] ** 2 - 1e-12))
    run.check('symbol-modulus', violations, 0.5)

    for m in p['power_ms']:
        c = power_inequality_constant(m)
        run.check(f'power-inequality(m={m:g})', _relative(c, 2.0 ** (m - 2.0)), 1e-9, f'c={c!r}')

    u0 = barenblatt_field(_barenblatt_params(p['m'], 1, 0.25), grid, 0.0)
    problem = PMEProblem(p['m'], grid, u0, t_end=p['t_end'])
    trajectory = solve_pme(problem, _stride_for(problem, p['snapshots']))
    kinetic_grid = VGrid.covering(trajectory, p['n_v'])
    st_grid, data = space_time_kinetic(trajectory, kinetic_grid, p['n_t'])
    decomposition = microlocal_decompose(data, desc, p['delta'], p['kmax'], st_grid, kinetic_grid,
                                         workers=run.workers)
    run.check('microlocal-reconstruction', decomposition.reconstruction_error, 1e-8)
    run.values['tail_fraction'] = decomposition.tail_fraction
    rows = [(name, j, norm) for name, profile in decomposition.piece_profiles().items() for j, norm in profile]
    run.table('microlocal.csv', ('piece', 'j', 'blocknorm'), rows)


_EXPERIMENTS: Dict[ExperimentKind, Callable[[_Run], None]] = {
    ExperimentKind.exponent_table: _run_exponent_table,
    ExperimentKind.barenblatt_validate: _run_barenblatt_validate,
    ExperimentKind.regularity_sweep: _run_regularity_sweep,
    ExperimentKind.nondegeneracy_fit: _run_nondegeneracy_fit,
    ExperimentKind.energy_audit: _run_energy_audit,
    ExperimentKind.anderson_run: _run_anderson,
    ExperimentKind.contraction: _run_contraction,
    ExperimentKind.scaling_identity: _run_scaling_identity,
    ExperimentKind.nikolskii_bound: _run_nikolskii_bound,
    ExperimentKind.structural: _run_structural,
}


def run(config: ExperimentConfig, *, out: Optional[Union[str, os.PathLike]] = None) -> RunReport:
    """执行一次实验。

    输出目录（``out`` 或 ``config.output``）存在时写出 ``config.json`` 回显与 ``report.json``，
    另外按 :attr:`ExperimentConfig.format` 写出 CSV 表格（``csv``）与 SVG 图（``svg``）。
    所有文件都原子地写出。

    Raises
    -------
    ComputeAbort
        求解器发散等计算中止。
    OSError
        输出目录不可写。
    """
    directory = out if out is not None else config.output
    state = _Run(config, Path(directory) if directory is not None else None)
    _log.info('开始实验 %s（seed=%d）', config.kind, config.seed)
    started = time.perf_counter()
    _EXPERIMENTS[config.kind](state)
    elapsed = time.perf_counter() - started

    report = RunReport(config, state.checks, state.values, state.files, elapsed)
    if state.out is not None:
        atomic_write(state.out / 'config.json', _to_json(config.to_dict(), pretty=True) + '\n')
        report.files.extend(['config.json', 'report.json'])
        report.write(state.out / 'report.json')
    _log.info('实验 %s 完成：%d/%d 项检查通过，用时 %.2fs', config.kind,
              sum(c.passed for c in report.checks), len(report.checks), elapsed)
    return report


# acceptance suite


class _Criterion(NamedTuple):
    kind: ExperimentKind
    params: Dict[str, Any]
    quick: Dict[str, Any]


CRITERIA: Dict[str, _Criterion] = {
    'C1': _Criterion(ExperimentKind.exponent_table, {}, {}),
    'C2': _Criterion(ExperimentKind.barenblatt_validate, {}, {'n': 4096}),
    'C3': _Criterion(ExperimentKind.regularity_sweep, {}, {'n': 4096}),
    'C4': _Criterion(ExperimentKind.nondegeneracy_fit, {},
                     {'samples': 1025, 'deltas': [0.5, 2.0, 8.0, 32.0, 128.0], 'aniso_Js': [32.0, 64.0, 128.0]}),
    'C5': _Criterion(ExperimentKind.energy_audit, {}, {'ms': [2.0], 'ns': [128, 256], 't_end': 0.002}),
    'C6': _Criterion(ExperimentKind.contraction, {}, {'ns': [512, 1024]}),
    'C7': _Criterion(ExperimentKind.regularity_sweep, {'betas': [], 'forced_ms': [1.3, 1.6]}, {'forced_seeds': [0]}),
    'C8': _Criterion(ExperimentKind.anderson_run, {}, {'n': 256, 'seeds': [0], 'levels': [0.02, 0.01]}),
    'C9': _Criterion(ExperimentKind.scaling_identity, {}, {'n': 256}),
    'C10': _Criterion(ExperimentKind.nikolskii_bound, {}, {'ns': [128, 256]}),
    'C11': _Criterion(ExperimentKind.structural, {}, {'n': 128, 'n_t': 32}),
}


class SuiteEntry(NamedTuple):
    """验收套件中一项准则的结果。计算中止等异常记为 ``error``，不会中断整个套件。"""

    id: str
    kind: ExperimentKind
    status: CheckStatus
    passed: int
    total: int
    error: Optional[str]
    report: Optional[RunReport]

    def to_dict(self) -> SuiteEntryPayload:
        return {
            'id': self.id,
            'kind': str(self.kind),
            'status': str(self.status),
            'passed': self.passed,
            'total': self.total,
            'error': self.error,
        }


class SuiteSummary:
    """:func:`run_acceptance_suite` 的汇总，按准则编号排序。"""

    __slots__ = ('entries',)

    def __init__(self, entries: Sequence[SuiteEntry]):
        self.entries: List[SuiteEntry] = list(entries)

    def __repr__(self) -> str:
        return f'<SuiteSummary passed={self.passed} criteria={len(self.entries)}>'

    def __iter__(self):
        return iter(self.entries)

    @property
    def passed(self) -> bool:
        return all(e.status is CheckStatus.passed for e in self.entries)

    def get(self, criterion: str) -> Optional[SuiteEntry]:
        for entry in self.entries:
            if entry.id == criterion:
                return entry
        return None

    def to_dict(self) -> SuiteSummaryPayload:
        return {'version': CONFIG_VERSION, 'passed': self.passed, 'criteria': [e.to_dict() for e in self.entries]}

    def write(self, directory: Union[str, os.PathLike]) -> None:
        directory = Path(directory)
        write_csv(directory / 'suite.csv', ('id', 'kind', 'status', 'passed', 'total', 'error'),
                  [(e.id, str(e.kind), str(e.status), e.passed, e.total, e.error or '') for e in self.entries])
        atomic_write(directory / 'summary.json', _to_json(self.to_dict(), pretty=True) + '\n')


_SUITE_KEYS = frozenset({'version', 'seed', 'output', 'format', 'threads', 'scale', 'only', 'params', 'tolerances'})


def _criterion_order(criterion: str) -> int:
    return int(criterion[1:])


def _suite_configs(root: Mapping[str, Any], out: Optional[Path]) -> List[Tuple[str, ExperimentConfig]]:
    unknown = sorted(set(root) - _SUITE_KEYS)
    if unknown:
        raise ConfigError(unknown[0], '未知的套件配置键')
    if root.get('version', CONFIG_VERSION) != CONFIG_VERSION:
        raise ConfigError('version', f'只支持版本 {CONFIG_VERSION}', value=root.get('version'))
    scale = _choice('full', 'quick')('scale', root.get('scale', 'full'))
    only = root.get('only')
    if only is not None:
        only = _listed(_choice(*CRITERIA), min_len=1)('only', only)
    params = root.get('params') or {}
    tolerances = root.get('tolerances') or {}
    for key, value in (('params', params), ('tolerances', tolerances)):
        if not isinstance(value, Mapping):
            raise ConfigError(key, '需要一个对象', value=value)
        for criterion in value:
            if criterion not in CRITERIA:
                raise ConfigError(f'{key}.{criterion}', '未知的准则编号')

    configs = []
    for criterion in sorted(CRITERIA, key=_criterion_order):
        if only is not None and criterion not in only:
            continue
        spec = CRITERIA[criterion]
        merged = dict(spec.params)
        if scale == 'quick':
            merged.update(spec.quick)
        merged.update(params.get(criterion, {}))
        output = os.fspath(out / criterion) if out is not None else None
        try:
            config = ExperimentConfig(spec.kind, merged, seed=root.get('seed', 0), output=output,
                                      format=root.get('format', 'csv'), threads=root.get('threads'),
                                      tolerances=tolerances.get(criterion))
        except ConfigError as exc:
            raise ConfigError(f'{criterion}.{exc.path}', exc.reason, value=exc.value) from None
        configs.append((criterion, config))
    return configs


def _execute(criterion: str, config: ExperimentConfig) -> SuiteEntry:
    try:
        report = run(config)
    except (PMELabException, ArithmeticError, ValueError) as exc:
        _log.error('准则 %s 出错：%s', criterion, exc)
        return SuiteEntry(criterion, config.kind, CheckStatus.error, 0, 0, f'{type(exc).__name__}: {exc}', None)
    status = CheckStatus.passed if report.passed else CheckStatus.failed
    passed = sum(c.passed for c in report.checks)
    return SuiteEntry(criterion, config.kind, status, passed, len(report.checks), None, report)


def run_acceptance_suite(root: Optional[SuiteConfig] = None, *, out: Optional[Union[str, os.PathLike]] = None,
                         loop: Optional[asyncio.AbstractEventLoop] = None) -> SuiteSummary:
    """运行验收准则 C1–C11。

    各准则在线程池中并发执行（``threads`` 决定并发数），结果按编号汇总；某一准则出错不影响其它准则。
    ``root`` 可以给出 ``scale``（``full`` 或 ``quick``）、``only``、按准则覆盖的 ``params`` 与 ``tolerances``。

    Raises
    -------
    ConfigError
        套件配置无效（在任何计算之前检查）。
    """
    root = dict(root or {})
    directory = out if out is not None else root.get('output')
    directory = Path(directory) if directory is not None else None
    configs = _suite_configs(root, directory)
    workers = root.get('threads') or 1

    async def runner() -> List[SuiteEntry]:
        running = asyncio.get_running_loop()
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [running.run_in_executor(executor, _execute, criterion, config) for criterion, config in configs]
            return list(await asyncio.gather(*futures))

    owned = loop is None
    loop = asyncio.new_event_loop() if owned else loop
    try:
        entries = loop.run_until_complete(runner())
    finally:
        if owned:
            loop.close()

    summary = SuiteSummary(sorted(entries, key=lambda e: _criterion_order(e.id)))
    if directory is not None:
        summary.write(directory)
    _log.info('验收套件完成：%d/%d 项准则通过', sum(e.status is CheckStatus.passed for e in summary),
              len(summary.entries))
    return summary


def _describe_report(data: Mapping[str, Any]) -> str:
    lines = [f"实验 {data['config']['kind']}：{'通过' if data['passed'] else '未通过'}"]
    for check in data['checks']:
        lines.append(f"  [{check['status']}] {check['name']}  偏差 {check['deviation']}  容差 {check['tolerance']}")
    return '\n'.join(lines)


def _describe_summary(data: Mapping[str, Any]) -> str:
    lines = [f"验收套件：{'通过' if data['passed'] else '未通过'}"]
    for entry in data['criteria']:
        suffix = f"  {entry['error']}" if entry.get('error') else ''
        lines.append(f"  {entry['id']:>4} {entry['kind']:<20} {entry['status']:<5} "
                     f"{entry['passed']}/{entry['total']}{suffix}")
    return '\n'.join(lines)


def inspect(path: Union[str, os.PathLike]) -> str:
    """返回文件的可读描述：配置回显、报告或套件汇总、快照头部、或者轨迹目录的索引。

    Raises
    -------
    ConfigError
        JSON 配置无效。
    OSError
        路径不存在或不可读。
    """
    path = Path(path)
    if path.is_dir():
        if (path / 'index.csv').exists():
            index = read_csv(path / 'index.csv')
            if not index:
                return f'轨迹 {path}：空索引'
            first, last = index[0], index[-1]
            return (f"轨迹 {path}：{len(index)} 个快照，t ∈ [{first['time']}, {last['time']}]，"
                    f"质量 {first['mass']} → {last['mass']}")
        for name in ('report.json', 'summary.json'):
            if (path / name).exists():
                return inspect(path / name)
        raise FileNotFoundError(f'{path} 中没有可识别的文件')

    if path.suffix == '.bin':
        field = read_snapshot(path)
        grid = field.grid
        return (f'快照 {path.name}：dim={grid.dim} n={grid.n} length={grid.length!r} boundary={grid.boundary}，'
                f'质量 {field.mass()!r}，max|u| {field.max_abs()!r}')

    try:
        data = _from_json(path.read_text(encoding='utf-8'))
    except ValueError as exc:
        raise ConfigError('<root>', f'不是有效的 JSON：{exc}') from None
    if isinstance(data, Mapping) and 'checks' in data and 'config' in data:
        return _describe_report(data)
    if isinstance(data, Mapping) and 'criteria' in data:
        return _describe_summary(data)
    return _to_json(ExperimentConfig.from_dict(data).to_dict(), pretty=True)
