import pytest

import numpy as np

from infospread import ConfigError
from infospread import Mode
from infospread import NetworkConfig
from infospread.experiment import Grid
from infospread.experiment import Sample
from infospread.experiment import Condition
from infospread.experiment import Config
from infospread.experiment import ExperimentConfig
from infospread.experiment import PRESETS
from infospread.experiment import get_preset
from infospread.experiment import optimizer_sweep
from infospread.optimizer import solve_constant
from infospread.simulator import Metric
from infospread.simulator import Mobility


@pytest.mark.parametrize('values', [[1, 2, 3], ['unicast', 'broadcast']])
def test_grid(values):
    grid = Grid(values)
    assert isinstance(grid, list)
    assert len(grid) == len(values)
    assert all([grid[i] == value for i, value in enumerate(values)])


def test_sample():
    sampler = Sample(lambda: 5)
    assert all([sampler() == 5 for _ in range(10)])
    del sampler

    rng = np.random.default_rng(0)
    sampler = Sample(lambda: rng.uniform(0.5, 4.0))
    for _ in range(100):
        x = sampler()
        assert x >= 0.5 and x < 4.0


def test_condition():
    condition = Condition(lambda x: 'broadcast' if x['network.n_src'] < 10 else 'unicast')
    assert condition({'network.n_src': 4}) == 'broadcast'
    assert condition({'network.n_src': 40}) == 'unicast'
    with pytest.raises(AssertionError):
        Condition(0.5)


@pytest.mark.parametrize('num_sample', [1, 5, 10])
@pytest.mark.parametrize('keep_dict_order', [True, False])
def test_config(num_sample, keep_dict_order):
    with pytest.raises(AssertionError):
        Config([1, 2, 3])

    rng = np.random.default_rng(1)
    config = Config({'sim.out': 'some path',
                     'network.beta': Sample(lambda: rng.uniform(0.5, 4.0)),
                     'sim.mode': Condition(lambda x: 'broadcast' if x['network.beta'] < 2 else 'unicast'),
                     'network.n_bs': 8,
                     'network.n_mu': Grid([200, 400]),
                     'sim.k_max': Grid([10, 20, 30])},
                    num_sample=num_sample,
                    keep_dict_order=keep_dict_order)
    list_config = config.make_configs()

    assert len(list_config) == 2*3*num_sample
    for ID in range(2*3*num_sample):
        assert list_config[ID]['ID'] == ID

    for x in list_config:
        assert len(x.keys()) == len(config.items.keys()) + 1  # added one more 'ID'
        assert x['sim.out'] == 'some path'
        assert x['sim.mode'] == ('broadcast' if x['network.beta'] < 2 else 'unicast')
        assert x['network.n_bs'] == 8
        assert x['network.n_mu'] in [200, 400]
        assert x['sim.k_max'] in [10, 20, 30]
        assert 0.5 <= x['network.beta'] < 4.0
        if keep_dict_order:
            assert list(x.keys()) == ['ID'] + list(config.items.keys())
        else:
            assert list(x.keys()) != ['ID'] + list(config.items.keys())

        # each item is a valid experiment
        experiment = ExperimentConfig.from_dict(x)
        assert experiment.network.n_mu == x['network.n_mu']
        assert experiment.k_max == x['sim.k_max']

    # without random search, the grid is not repeated
    config = Config({'network.n_mu': Grid([200, 400])}, num_sample=num_sample)
    assert len(config.make_configs()) == 2


def test_experiment_config():
    config = ExperimentConfig()
    assert config.network == NetworkConfig()
    assert config.mode == Mode.BROADCAST
    assert config.mobility == Mobility.RANDOM_DIRECTION
    assert config.settings.step_length == 3000.0
    assert config.settings.interference_window == 5.0
    assert config.settings.source_survival == 0.5 and config.settings.flight_scale == 1.0

    config = ExperimentConfig(mode='unicast', mobility='iid', metric='bounded')
    assert config.mode == Mode.UNICAST and config.mobility == Mobility.IID and config.metric == Metric.BOUNDED

    for changes, field in [(dict(mode='multicast'), 'sim.mode'),
                           (dict(k_max=0), 'sim.k_max'),
                           (dict(trials=0), 'sim.trials'),
                           (dict(mu=0.0), 'sim.mu'),
                           (dict(workers=0), 'sim.workers'),
                           (dict(speed=-1.0), 'sim.speed'),
                           (dict(interference_window=0.5), 'sim.interference_window'),
                           (dict(seed=-1), 'sim.seed'),
                           (dict(source_survival=-0.1), 'sim.source_survival'),
                           (dict(flight_scale=0.0), 'sim.flight_scale')]:
        with pytest.raises(ConfigError) as e:
            ExperimentConfig(**changes)
        assert e.value.field == field


def test_config_file(tmp_path):
    config = ExperimentConfig(network=NetworkConfig(n_bs=5, beta=2.5), mode='unicast', trials=123,
                              out='results/run.csv', workers=3, poisson_sources=False)
    f = config.save(tmp_path/'run.cfg')
    assert ExperimentConfig.load(f) == config
    assert ExperimentConfig.parse(config.serialize()) == config
    assert 'network.beta = 2.5\n' in config.serialize()
    assert 'sim.poisson_sources = false\n' in config.serialize()
    assert 'sim.workers = 3\n' in config.serialize()
    config = config.replace(flight_scale=np.inf, source_survival=0.0)
    assert ExperimentConfig.parse(config.serialize()) == config
    assert 'sim.flight_scale = inf\n' in config.serialize()

    text = """
    # a comment line
    network.n_mu = 200   # trailing comment
    network.beta_db = 3

    sim.mode = Unicast
    sim.workers = none
    """
    config = ExperimentConfig.parse(text)
    assert config.network.n_mu == 200
    assert np.isclose(config.network.beta, 10**0.3)
    assert config.mode == Mode.UNICAST
    assert config.workers is None
    assert config.network.n_bs == 8

    # values not in the text keep those of the base
    base = ExperimentConfig(trials=7)
    assert ExperimentConfig.parse('sim.seed = 3', base=base).trials == 7


@pytest.mark.parametrize('text, field, line', [('network.n_bs = 8\nnetwork.n_mu = -1', 'network.n_mu', None),
                                               ('sim.trials = 10\nsim.trials = 20', 'sim.trials', 2),
                                               ('network.colour = red', 'network.colour', 1),
                                               ('\n\nsim.k_max = many', 'sim.k_max', 3),
                                               ('sim.poisson_sources = maybe', 'sim.poisson_sources', 1),
                                               ('network.beta = 1\nnetwork.beta_db = 0', 'network.beta_db', 2),
                                               ('sim.mode = multicast', 'sim.mode', 1),
                                               ('network.alpha = 1.5', 'network.alpha', None),
                                               ('sim.seed = -3', 'sim.seed', None)])
def test_config_file_errors(text, field, line):
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.parse(text)
    assert e.value.field == field
    assert e.value.line == line

    with pytest.raises(ConfigError) as e:
        ExperimentConfig.parse('network.n_bs = 8\nthis line is wrong')
    assert e.value.line == 2


def test_from_dict():
    config = ExperimentConfig.from_dict({'ID': 3, 'network.n_src': 6, 'sim.mu': 0.02, 'sim.mode': Mode.UNICAST})
    assert config.network.n_src == 6
    assert config.mu == 0.02
    assert config.mode == Mode.UNICAST
    assert ExperimentConfig.from_dict(config.to_dict()) == config
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({'trials': 5})


def test_presets():
    config = get_preset('fig2')
    assert config is PRESETS['fig2']
    assert config.network == NetworkConfig()
    assert config.network.beta == 1.0 and config.network.power_cap == 0.064
    assert config.mu == 0.064
    with pytest.raises(ConfigError) as e:
        get_preset('fig9')
    assert e.value.field == 'preset'


def test_optimizer_sweep():
    networks = optimizer_sweep(n=5, seed=3)
    assert len(networks) == 5
    assert all(isinstance(cfg, NetworkConfig) for cfg in networks)
    for cfg in networks:
        assert cfg.n_bs >= 1 and cfg.n_mu >= 1 and cfg.n_src >= 1
        assert 0.5 <= cfg.beta <= 4.0
        assert 0.5 <= cfg.target_ratio <= 0.95
        assert 0.01 <= cfg.power_cap <= 0.5
        solve_constant(cfg)
    assert optimizer_sweep(n=5, seed=3) == networks
    assert optimizer_sweep(n=5, seed=4) != networks
