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


import argparse
import logging
import platform
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import numpy
import scipy

import pmelab
from pmelab.error import ComputeAbort, ConfigError
from pmelab.harness import ExperimentConfig, inspect, run, run_acceptance_suite
from pmelab.utils import _from_json

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_CONFIG = 3
EXIT_COMPUTE = 4
EXIT_IO = 5


def show_version() -> None:
    entries = []

    entries.append('- Python v{0.major}.{0.minor}.{0.micro}-{0.releaselevel}'.format(sys.version_info))
    version_info = pmelab.version_info
    entries.append('- pmelab v{0.major}.{0.minor}.{0.micro}-{0.releaselevel}'.format(version_info))
    entries.append(f'- numpy v{numpy.__version__}')
    entries.append(f'- scipy v{scipy.__version__}')
    uname = platform.uname()
    entries.append('- system info: {0.system} {0.release} {0.version}'.format(uname))
    print('\n'.join(entries))


def core(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    if args.version:
        show_version()
    else:
        parser.print_help()
    return EXIT_OK


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    changes: Dict[str, Any] = {}
    if args.seed is not None:
        changes['seed'] = args.seed
    if args.threads is not None:
        changes['threads'] = args.threads
    if args.format is not None:
        changes['format'] = args.format
    if args.out is not None:
        changes['output'] = str(args.out)
    return changes


def run_command(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config)
    changes = _overrides(args)
    if changes:
        config = config.replace(**changes)
    report = run(config)
    for check in report.checks:
        print(f'[{check.status}] {check.name}: {check.deviation:.6g} < {check.tolerance:.3g}  {check.detail}'.rstrip())
    print(f'{config.kind}: {"通过" if report.passed else "未通过"}（{report.wall_clock:.2f}s）')
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def suite_command(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    root: Dict[str, Any] = {}
    if args.config is not None:
        try:
            root = _from_json(Path(args.config).read_text(encoding='utf-8'))
        except ValueError as exc:
            raise ConfigError('<root>', f'不是有效的 JSON：{exc}') from None
        if not isinstance(root, dict):
            raise ConfigError('<root>', '套件配置必须是一个 JSON 对象', value=root)
    root.update(_overrides(args))
    if args.quick:
        root['scale'] = 'quick'
    if args.only:
        root['only'] = args.only
    summary = run_acceptance_suite(root)
    for entry in summary:
        suffix = f'  {entry.error}' if entry.error else ''
        print(f'{entry.id:>4} {str(entry.kind):<20} {str(entry.status):<5} {entry.passed}/{entry.total}{suffix}')
    return EXIT_OK if summary.passed else EXIT_CHECK_FAILED


def inspect_command(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    print(inspect(args.path))
    return EXIT_OK


def _add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--out', help='输出目录（覆盖配置中的 output）', type=Path, metavar='DIR')
    parser.add_argument('--seed', help='随机种子', type=int, metavar='N')
    parser.add_argument('--threads', help='FFT 工作线程数与套件并发数', type=int, metavar='N')
    parser.add_argument('--format', help='输出格式', choices=('csv', 'csv+svg'))


def add_run_args(subparser: Any) -> None:
    parser = subparser.add_parser('run', help='按 JSON 配置运行一次实验')
    parser.set_defaults(func=run_command)
    parser.add_argument('--config', help='实验配置文件', required=True, type=Path, metavar='PATH')
    _add_output_args(parser)


def add_suite_args(subparser: Any) -> None:
    parser = subparser.add_parser('suite', help='运行验收准则 C1–C11')
    parser.set_defaults(func=suite_command)
    parser.add_argument('--config', help='套件配置文件（可选）', type=Path, metavar='PATH')
    parser.add_argument('--quick', help='使用较低的分辨率', action='store_true')
    parser.add_argument('--only', help='只运行这些准则', nargs='+', metavar='ID')
    _add_output_args(parser)


def add_inspect_args(subparser: Any) -> None:
    parser = subparser.add_parser('inspect', help='查看配置、报告、快照或轨迹目录')
    parser.set_defaults(func=inspect_command)
    parser.add_argument('path', help='要查看的文件或目录', type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='pmelab', description='pmelab 数值实验工具')
    parser.add_argument('-v', '--version', action='store_true', help='显示库版本')
    parser.add_argument('--log-level', help='日志级别（默认：WARNING）', default='WARNING',
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))
    parser.set_defaults(func=core)

    subparser = parser.add_subparsers(dest='subcommand', title='subcommands')
    add_run_args(subparser)
    add_suite_args(subparser)
    add_inspect_args(subparser)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format='[%(asctime)s] [%(levelname)-8s] %(name)s: %(message)s')
    try:
        return args.func(parser, args)
    except ConfigError as exc:
        print(f'配置错误：{exc}', file=sys.stderr)
        return EXIT_CONFIG
    except ComputeAbort as exc:
        print(f'计算中止：{exc}', file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f'IO 错误：{exc}', file=sys.stderr)
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
