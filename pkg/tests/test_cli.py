import json

import pytest

import pmelab.__main__ as cli
from pmelab.error import BlowUpError


@pytest.fixture
def config_file(tmp_path):
    def make(**data):
        path = tmp_path / 'experiment.json'
        path.write_text(json.dumps({'version': 1, **data}), encoding='utf-8')
        return path

    return make


def test_version(capsys):
    assert cli.main(['--version']) == cli.EXIT_OK
    assert 'pmelab v' in capsys.readouterr().out


def test_no_subcommand_prints_help(capsys):
    assert cli.main([]) == cli.EXIT_OK
    assert 'usage' in capsys.readouterr().out


def test_run_passes(config_file, tmp_path, capsys):
    path = config_file(kind='exponent-table')
    out = tmp_path / 'out'
    assert cli.main(['run', '--config', str(path), '--out', str(out), '--seed', '4']) == cli.EXIT_OK
    assert '[pass] pme-limit' in capsys.readouterr().out
    echo = json.loads((out / 'config.json').read_text(encoding='utf-8'))
    assert echo['seed'] == 4
    assert echo['output'] == str(out)


def test_run_with_failing_check(config_file):
    path = config_file(kind='exponent-table', tolerances={'corollary': 0.0})
    assert cli.main(['run', '--config', str(path)]) == cli.EXIT_CHECK_FAILED


def test_bad_config(config_file, capsys):
    path = config_file(kind='contraction', params={'m': 0.5})
    assert cli.main(['run', '--config', str(path)]) == cli.EXIT_CONFIG
    assert 'params.m' in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert cli.main(['run', '--config', str(tmp_path / 'missing.json')]) == cli.EXIT_IO


def test_compute_abort(config_file, monkeypatch):
    def explode(config):
        raise BlowUpError(0.1, 10, 50.0, 5.0)

    monkeypatch.setattr(cli, 'run', explode)
    assert cli.main(['run', '--config', str(config_file(kind='exponent-table'))]) == cli.EXIT_COMPUTE


def test_suite_and_inspect(tmp_path, capsys):
    out = tmp_path / 'suite'
    assert cli.main(['suite', '--quick', '--only', 'C1', '--out', str(out)]) == cli.EXIT_OK
    assert 'C1' in capsys.readouterr().out
    assert (out / 'summary.json').exists()

    assert cli.main(['inspect', str(out)]) == cli.EXIT_OK
    assert 'exponent-table' in capsys.readouterr().out


def test_suite_rejects_unknown_criterion():
    assert cli.main(['suite', '--only', 'C42']) == cli.EXIT_CONFIG


def test_suite_config_must_be_an_object(tmp_path):
    path = tmp_path / 'suite.json'
    path.write_text('[1, 2]', encoding='utf-8')
    assert cli.main(['suite', '--config', str(path)]) == cli.EXIT_CONFIG
