import json

import pytest

from pmelab import (
    CRITERIA,
    CheckStatus,
    ConfigError,
    ExperimentConfig,
    ExperimentKind,
    Field,
    Grid,
    OutputFlags,
    inspect,
    run,
    run_acceptance_suite,
    write_snapshot,
)


def test_defaults_are_filled_in():
    config = ExperimentConfig('contraction')
    assert config.kind is ExperimentKind.contraction
    assert config.params['m'] == 2.0
    assert config.params['ns'] == [2048, 4096]
    assert config.seed == 0
    assert config.format.to_format() == 'csv'


@pytest.mark.parametrize('kind, params, path', [
    ('scaling-identity', {'s': 1.0}, 'params.s'),
    ('scaling-identity', {'n': 1000}, 'params.n'),
    ('scaling-identity', {'m': True}, 'params.m'),
    ('contraction', {'ns': []}, 'params.ns'),
    ('contraction', {'bogus': 1}, 'params.bogus'),
    ('barenblatt-validate', {'d': 3}, 'params.d'),
    ('barenblatt-validate', {'window': [6, 3]}, 'params.window'),
    ('nondegeneracy-fit', {'v_interval': [0.0, 1.0]}, 'params.v_interval'),
    ('energy-audit', {'forcings': ['sometimes']}, 'params.forcings[0]'),
    ('exponent-table', {'aniso_n': [2.0]}, 'params.aniso_n'),
])
def test_invalid_params(kind, params, path):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig(kind, params)
    assert info.value.path == path


def test_invalid_top_level():
    with pytest.raises(ConfigError) as info:
        ExperimentConfig('teleport')
    assert info.value.path == 'kind'
    with pytest.raises(ConfigError):
        ExperimentConfig('contraction', seed=-1)
    with pytest.raises(ConfigError):
        ExperimentConfig('contraction', format='png')
    with pytest.raises(ConfigError):
        ExperimentConfig('contraction', tolerances={'order(n=2048)': -1.0})


@pytest.mark.parametrize('data, path', [
    ({'kind': 'contraction'}, 'version'),
    ({'version': 2, 'kind': 'contraction'}, 'version'),
    ({'version': 1}, 'kind'),
    ({'version': 1, 'kind': 'contraction', 'extra': 1}, 'extra'),
    ([], '<root>'),
])
def test_from_dict_rejects(data, path):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_dict(data)
    assert info.value.path == path


def test_echo_round_trip():
    config = ExperimentConfig('scaling-identity', {'eta': 3.0}, seed=7, format='csv+svg', threads=2,
                              tolerances={'*': 0.5})
    echoed = ExperimentConfig.from_dict(json.loads(json.dumps(config.to_dict())))
    assert echoed == config
    assert hash(echoed) == hash(config)
    assert echoed.format.svg


def test_config_is_frozen():
    config = ExperimentConfig('contraction')
    with pytest.raises(AttributeError):
        config.seed = 3
    changed = config.replace(seed=3, output='somewhere')
    assert (config.seed, config.output) == (0, None)
    assert (changed.seed, changed.output) == (3, 'somewhere')
    assert changed != config


def test_from_file(tmp_path):
    path = tmp_path / 'config.json'
    path.write_text('{"version": 1, "kind": "exponent-table", "params": {"ms": [2.0]}}', encoding='utf-8')
    assert ExperimentConfig.from_file(path).params['ms'] == [2.0]
    path.write_text('{not json', encoding='utf-8')
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(path)
    with pytest.raises(OSError):
        ExperimentConfig.from_file(tmp_path / 'missing.json')


def test_exponent_table_run(tmp_path):
    report = run(ExperimentConfig('exponent-table'), out=tmp_path)
    assert report.passed
    assert {c.name for c in report.checks} == {'pme-limit', 'corollary', 'anderson', 'aniso'}
    assert report.values['aniso_s_star'] == pytest.approx(1.0 / 3.0)
    assert set(report.files) == {'exponent_table.csv', 'exponent_echo.csv', 'config.json', 'report.json'}
    assert all((tmp_path / name).exists() for name in report.files)
    data = json.loads((tmp_path / 'report.json').read_text(encoding='utf-8'))
    assert data['passed'] is True
    assert 'wall_clock' not in data
    assert ExperimentConfig.from_dict(data['config']) == report.config


def test_run_without_output_writes_nothing(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    report = run(ExperimentConfig('exponent-table'))
    assert report.files == []
    assert list(tmp_path.iterdir()) == []


@pytest.mark.parametrize('fmt, outputs', [
    ('csv', {'nondegeneracy.csv', 'dv_bound.csv'}),
    ('svg', {'nondegeneracy.svg'}),
    ('csv+svg', {'nondegeneracy.csv', 'dv_bound.csv', 'nondegeneracy.svg'}),
])
def test_format_selects_outputs(tmp_path, fmt, outputs):
    params = {'ms': [2.0], 'Js': [4.0, 8.0], 'deltas': [0.5, 1.0, 2.0], 'aniso_m': [], 'aniso_n': []}
    report = run(ExperimentConfig('nondegeneracy-fit', params, format=fmt), out=tmp_path)
    assert report.passed, [c for c in report.failed()]
    assert set(report.files) == outputs | {'config.json', 'report.json'}
    assert {p.name for p in tmp_path.iterdir()} == set(report.files)
    echo = json.loads((tmp_path / 'config.json').read_text(encoding='utf-8'))
    assert ExperimentConfig.from_dict(echo).format == OutputFlags.from_format(fmt)


def test_format_flags():
    config = ExperimentConfig('contraction', format=OutputFlags(svg=True))
    assert config.format.to_format() == 'svg'
    assert not config.format.csv
    with pytest.raises(ConfigError):
        ExperimentConfig('contraction', format=OutputFlags())
    with pytest.raises(ConfigError):
        ExperimentConfig('contraction', format='csv+png')


def test_repeated_runs_are_byte_identical(tmp_path):
    config = ExperimentConfig('scaling-identity', {'n': 256}, seed=3)
    first, second = tmp_path / 'a', tmp_path / 'b'
    run(config, out=first)
    run(config, out=second)
    for name in ('report.json', 'config.json', 'scaling.csv'):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_scaling_identity_is_exact():
    report = run(ExperimentConfig('scaling-identity', {'n': 256, 'eta': 3.0}))
    assert report.passed
    assert all(c.deviation < 1e-9 for c in report.checks)


def test_tolerance_override_fails_checks():
    report = run(ExperimentConfig('exponent-table', tolerances={'*': 0.0}))
    assert not report.passed
    assert all(c.status is CheckStatus.failed for c in report.checks)
    assert report.failed() == report.checks

    report = run(ExperimentConfig('exponent-table', tolerances={'aniso': 0.0}))
    assert [c.name for c in report.failed()] == ['aniso']
    assert report.check('aniso').tolerance == 0.0
    assert report.check('missing') is None


def test_contraction_run():
    report = run(ExperimentConfig('contraction', {'ns': [128, 256]}))
    names = [c.name for c in report.checks]
    assert names[:4] == ['contraction(n=128)', 'order(n=128)', 'contraction(n=256)', 'order(n=256)']
    assert report.check('contraction(n=128)').passed
    assert report.check('order(n=256)').passed


def test_structural_run(tmp_path):
    config = ExperimentConfig('structural', {'n': 64, 'n_t': 16, 'n_v': 8, 'snapshots': 16, 't_end': 0.002},
                              format='csv+svg')
    report = run(config, out=tmp_path)
    assert report.passed, [c for c in report.failed()]
    assert report.check('microlocal-reconstruction').deviation < 1e-8
    assert 'microlocal.csv' in report.files


def test_suite_configuration_errors():
    with pytest.raises(ConfigError) as info:
        run_acceptance_suite({'bogus': 1})
    assert info.value.path == 'bogus'
    with pytest.raises(ConfigError):
        run_acceptance_suite({'only': ['C99']})
    with pytest.raises(ConfigError):
        run_acceptance_suite({'scale': 'tiny'})
    with pytest.raises(ConfigError) as info:
        run_acceptance_suite({'params': {'C12': {}}})
    assert info.value.path == 'params.C12'
    with pytest.raises(ConfigError) as info:
        run_acceptance_suite({'params': {'C9': {'s': 2.0}}})
    assert info.value.path == 'C9.params.s'


def test_criteria_cover_every_kind():
    assert sorted(CRITERIA, key=lambda c: int(c[1:])) == [f'C{i}' for i in range(1, 12)]
    assert {c.kind for c in CRITERIA.values()} == set(ExperimentKind)


def test_quick_suite(tmp_path):
    summary = run_acceptance_suite({'scale': 'quick', 'only': ['C9', 'C1'], 'threads': 2}, out=tmp_path)
    assert [e.id for e in summary] == ['C1', 'C9']
    assert summary.passed
    assert summary.get('C9').status is CheckStatus.passed
    assert summary.get('C2') is None
    assert (tmp_path / 'suite.csv').read_text(encoding='utf-8').startswith('id,kind,status,passed,total,error\n')
    assert (tmp_path / 'C1' / 'report.json').exists()

    text = inspect(tmp_path)
    assert 'C1' in text and 'C9' in text
    assert 'anderson' in inspect(tmp_path / 'C1')


def test_suite_records_failures_per_criterion():
    summary = run_acceptance_suite({'only': ['C1'], 'tolerances': {'C1': {'aniso': 0.0}}})
    entry = summary.get('C1')
    assert entry.status is CheckStatus.failed
    assert (entry.passed, entry.total) == (3, 4)
    assert not summary.passed


def test_inspect_files(tmp_path):
    config_path = tmp_path / 'config.json'
    config_path.write_text('{"version": 1, "kind": "contraction"}', encoding='utf-8')
    assert json.loads(inspect(config_path))['params']['m'] == 2.0

    snapshot = tmp_path / 'u.bin'
    write_snapshot(Field.constant(Grid(1, 16), 2.0), snapshot)
    assert 'n=16' in inspect(snapshot)

    broken = tmp_path / 'broken.json'
    broken.write_text('[', encoding='utf-8')
    with pytest.raises(ConfigError):
        inspect(broken)
    with pytest.raises(OSError):
        inspect(tmp_path / 'nothing-here')
