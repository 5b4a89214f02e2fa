import argparse
from pathlib import Path

import pytest

import main
from utils.errors import ConfigError
from utils.run_config import SCHEMA, RunConfig

SAMPLE = """
[run]
seed = 7

[activation]
kind = optmoid
q_out_bits = 4
noise_sigma = 0.05

[sweep]
values = inf, 16, 8
"""


def test_parse_serialize_is_idempotent():
    config = RunConfig.from_text(SAMPLE)
    text = config.to_text()
    again = RunConfig.from_text(text)
    assert again == config
    assert again.to_text() == text
    assert text.splitlines()[0] == '[activation]'


def test_defaults_come_from_schema():
    config = RunConfig()
    assert config.seed == 0
    assert config.get('train', 'lr') == SCHEMA['train']['lr']
    assert config.get_float('train', 'lr') == 3e-4
    assert not config.is_set('run', 'out_dir')


def test_typed_getters():
    config = RunConfig.from_text(SAMPLE)
    assert config.seed == 7
    assert config.get_bits('activation', 'q_out_bits') == 4
    assert config.get_bits('calibrate', 'q_in_bits') is None
    assert config.get_float('activation', 'noise_sigma') == 0.05
    assert config.get_list('sweep', 'values') == ['inf', '16', '8']
    assert config.get_optional_float('calibrate', 'bias') is None
    assert config.get_bool('eval', 'scatter') is True
    assert config.get_float_list('hwmodel', 'baud_grid') == [1e9, 10e9, 100e9]
    assert config.get_int_list('hwmodel', 'n_grid')[-1] == 2048
    assert config.overrides('activation') == {'kind': 'optmoid', 'q_out_bits': '4', 'noise_sigma': '0.05'}


def test_set_formats_values():
    config = RunConfig({'train': {'noise_in_training': True, 'lr': 0.1}})
    assert config.get('train', 'noise_in_training') == 'true'
    assert config.get_float('train', 'lr') == 0.1
    assert RunConfig.from_text(config.to_text()) == config


@pytest.mark.parametrize('text', [
    '[plotting]\ndpi = 300\n',
    '[train]\nlearning_rate = 0.1\n',
    'seed = 1\n',
])
def test_unknown_or_malformed_config_rejected(text):
    with pytest.raises(ConfigError):
        RunConfig.from_text(text)


def test_bad_values_rejected():
    config = RunConfig.from_text('[train]\nsteps = many\nnoise_in_training = maybe\n'
                                 '[activation]\nq_out_bits = 2.5\n')
    with pytest.raises(ConfigError):
        config.get_int('train', 'steps')
    with pytest.raises(ConfigError):
        config.get_bool('train', 'noise_in_training')
    with pytest.raises(ConfigError):
        config.get_bits('activation', 'q_out_bits')


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_file(tmp_path / 'absent.ini')


def test_hardware_section_covers_every_parameter():
    assert 'laser_v_l' in SCHEMA['hardware']
    assert 'mzm_r_term' in SCHEMA['hardware']


def _args(out=None):
    return argparse.Namespace(out=out, config=None, seed=None)


def test_output_dir_precedence(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(main.OUTPUT_DIR_ENV, raising=False)
    config = RunConfig()
    assert main.resolve_output_dir(_args(), config) == Path(main.DEFAULT_OUTPUT_DIR)

    config.set('run', 'out_dir', 'from_config')
    assert main.resolve_output_dir(_args(), config) == Path('from_config')

    monkeypatch.setenv(main.OUTPUT_DIR_ENV, 'from_env')
    assert main.resolve_output_dir(_args(), config) == Path('from_env')
    assert main.resolve_output_dir(_args('from_flag'), config) == Path('from_flag')


def test_seed_flag_overrides_config(tmp_path):
    path = tmp_path / 'run.ini'
    path.write_text(SAMPLE)
    args = main.build_parser().parse_args(['hwmodel', '--config', str(path), '--seed', '11'])
    assert main.load_configuration(args).seed == 11
