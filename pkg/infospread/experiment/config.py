from itertools import product
from dataclasses import dataclass
from dataclasses import field
from dataclasses import fields
from dataclasses import replace
from pathlib import Path

from infospread.errors import ConfigError
from infospread.network import Mode
from infospread.network import NetworkConfig
from infospread.network import db_to_linear
from infospread.network import parse_enum
from infospread.simulator import Metric
from infospread.simulator import Mobility
from infospread.simulator import SimSettings
from infospread.simulator import Uplink


class Grid(list):
    r"""A grid search over a list of values. """
    def __init__(self, values):
        super().__init__(values)


class Sample(object):
    def __init__(self, f):
        self.f = f
        
    def __call__(self):
        return self.f()
    
    
class Condition(object):
    def __init__(self, f):
        assert callable(f)
        self.f = f
        
    def __call__(self, config):
        return self.f(config)


class Config(object):
    r"""Defines a set of configurations for a parameter sweep. 
    
    Items are stored in a dictionary under dotted names grouped by concern, e.g. ``network.beta`` is
    the target SIR and ``sim.trials`` the number of Monte Carlo trials. 
    
    Grid search (:class:`Grid`) and random search (:class:`Sample`) can be mixed; :class:`Condition`
    computes an item from the other items of the same configuration. Call :meth:`make_configs` to generate
    all configurations, each with a unique ID. 
    
    note::
    
        For random search over small positive floats e.g. transmit power, sample log-uniformly,
        
        ``np.exp(rng.uniform(np.log(low), np.log(high)))``
    
    Example::
    
        >>> config = Config({'network.n_bs': 8, 'network.beta': Grid([0.5, 1.0]), 'sim.mode': Grid(['unicast', 'broadcast'])})
        >>> import pandas as pd
        >>> print(pd.DataFrame(config.make_configs()))
           ID  network.n_bs  network.beta   sim.mode
        0   0             8           0.5    unicast
        1   1             8           0.5  broadcast
        2   2             8           1.0    unicast
        3   3             8           1.0  broadcast
    
    Args:
        items (dict): a dictionary of all configuration items. 
        num_sample (int): number of samples for random configuration items. 
            If grid search is also provided, then the grid will be repeated :attr:`num_sample`
            of times. 
        keep_dict_order (bool): if ``True``, then each generated configuration has the same
            key ordering with :attr:`items`. 
    """
    def __init__(self, items, num_sample=1, keep_dict_order=False):
        assert isinstance(items, dict), f'dict type expected, got {type(items)}'
        self.items = items
        self.num_sample = num_sample
        self.keep_dict_order = keep_dict_order
        
    def make_configs(self):
        r"""Generate a list of all combinations of configurations, including
        grid search and random search. 
        
        Returns:
            list: a list of all configurations
        """
        keys_fixed = []
        keys_grid = []
        keys_sample = []
        for key, x in self.items.items():
            if isinstance(x, Grid):
                keys_grid.append(key)
            elif isinstance(x, Sample):
                keys_sample.append(key)
            else:
                keys_fixed.append(key)
        num_sample = self.num_sample if len(keys_sample) > 0 else 1  # without random search, no repetition
                
        product_grid = list(product(*[self.items[key] for key in keys_grid]))  # len >= 1, [()]
        list_config = []
        for n in range(len(product_grid)*num_sample):
            x = {'ID': n}
            x = {**x, **{key: self.items[key] for key in keys_fixed}}
            for idx, key in enumerate(keys_grid):
                x[key] = product_grid[n % len(product_grid)][idx]
            for key in keys_sample:
                x[key] = self.items[key]()
                
            if self.keep_dict_order:
                x = {**{'ID': x['ID']}, **{key: x[key] for key in self.items.keys()}}
                
            for key, value in x.items():
                if isinstance(value, Condition):
                    x[key] = value(x)
            list_config.append(x)
        return list_config


def _flag(text):
    text = text.lower()
    if text not in ('true', 'false', 'yes', 'no', '1', '0'):
        raise ValueError(text)
    return text in ('true', 'yes', '1')


def _optional(cast):
    def f(text):
        return None if text.lower() in ('none', '') else cast(text)
    return f


_NETWORK_TYPES = {'n_bs': int, 'n_mu': int, 'n_src': int, 'area': float, 'beta': float, 'alpha': float, 
                  'power_cap': float, 'slot_cap': int, 'target_ratio': float}
_SIM_TYPES = {'mode': lambda x: parse_enum(Mode, x), 
              'mobility': lambda x: parse_enum(Mobility, x), 
              'speed': float, 
              'slot_period': float, 
              'k_max': int, 
              'trials': int, 
              'seed': int, 
              'metric': lambda x: parse_enum(Metric, x), 
              'uplink': lambda x: parse_enum(Uplink, x), 
              'poisson_sources': _flag, 
              'interference_window': float, 
              'source_survival': float, 
              'flight_scale': float, 
              'mu': float, 
              'out': _optional(str), 
              'workers': _optional(int)}


def _cast(key, value):
    group, name = key.split('.', 1)
    cast = (_NETWORK_TYPES if group == 'network' else _SIM_TYPES)[name]
    if not isinstance(value, str):
        value = str(value.value if hasattr(value, 'value') else value)
    try:
        return cast(value.strip())
    except ConfigError as e:
        raise ConfigError(e.reason, field=key) from None
    except ValueError:
        raise ConfigError(f'cannot read {value!r}', field=key) from None


def _render(value):
    if value is None:
        return 'none'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if hasattr(value, 'value'):
        return value.value
    return repr(value) if isinstance(value, float) else str(value)


@dataclass(frozen=True)
class ExperimentConfig:
    r"""A network plus everything a command needs to run on it.
    
    Stored as a flat text file of ``key = value`` lines; ``#`` starts a comment. Network keys are prefixed
    with ``network.`` and run settings with ``sim.``. ``network.beta_db`` is accepted in place of
    ``network.beta`` and converted to linear scale on reading. 
    
    Example::
    
        # reference deployment
        network.n_bs = 8
        network.n_mu = 400
        network.beta_db = 0
        sim.mode = broadcast
        sim.trials = 10000
    """
    network: NetworkConfig = field(default_factory=NetworkConfig)
    mode: Mode = Mode.BROADCAST
    mobility: Mobility = Mobility.RANDOM_DIRECTION
    speed: float = 5.0
    slot_period: float = 600.0
    k_max: int = 60
    trials: int = 10000
    seed: int = 0
    metric: Metric = Metric.TORUS
    uplink: Uplink = Uplink.ANALYSIS
    poisson_sources: bool = True
    interference_window: float = 5.0
    source_survival: float = 0.5
    flight_scale: float = 1.0
    mu: float = 0.064
    out: str = None
    workers: int = None
    
    def __post_init__(self):
        for name, enum in [('mode', Mode), ('mobility', Mobility), ('metric', Metric), ('uplink', Uplink)]:
            try:
                object.__setattr__(self, name, parse_enum(enum, getattr(self, name)))
            except ConfigError as e:
                raise ConfigError(e.reason, field=f'sim.{name}') from None
        checks = [('k_max', self.k_max >= 1, 'expected at least one slot'), 
                  ('trials', self.trials >= 1, 'expected at least one trial'), 
                  ('seed', self.seed >= 0, 'expected a non-negative seed'), 
                  ('mu', self.mu > 0, 'expected a positive transmit power'), 
                  ('workers', self.workers is None or self.workers >= 1, 'expected at least one worker')]
        for name, ok, message in checks:
            if not ok:
                raise ConfigError(f'{message}, got {getattr(self, name)}', field=f'sim.{name}')
        self.settings  # validates speed and slot period
        
    @property
    def settings(self):
        try:
            return SimSettings(speed=self.speed, slot_period=self.slot_period, metric=self.metric, uplink=self.uplink, 
                               poisson_sources=self.poisson_sources, interference_window=self.interference_window, 
                               source_survival=self.source_survival, flight_scale=self.flight_scale)
        except ConfigError as e:
            raise ConfigError(e.reason, field=f'sim.{e.field}') from None
    
    def replace(self, **changes):
        return replace(self, **changes)
    
    def to_dict(self):
        r"""Flat dictionary with dotted keys, values rendered as text. """
        items = {f'network.{f.name}': _render(getattr(self.network, f.name)) for f in fields(NetworkConfig)}
        items.update({f'sim.{f.name}': _render(getattr(self, f.name)) for f in fields(self) if f.name != 'network'})
        return items
    
    @classmethod
    def from_dict(cls, items, base=None):
        r"""Builds a configuration from dotted keys, e.g. one entry of :meth:`Config.make_configs`.
        
        Keys absent from ``items`` keep the value of ``base`` (default: all defaults). The key ``ID`` is ignored. 
        """
        return cls._build([(key, value, None) for key, value in items.items() if key != 'ID'], base)
    
    @classmethod
    def _build(cls, entries, base):
        base = cls() if base is None else base
        network, sim = {}, {}
        beta_db = None
        for key, value, line in entries:
            try:
                if key == 'network.beta_db':
                    beta_db = (float(str(value).strip()), line)
                    continue
                group, _, name = key.partition('.')
                if group not in ('network', 'sim') or name not in (_NETWORK_TYPES if group == 'network' else _SIM_TYPES):
                    raise ConfigError('unknown key', field=key)
                target = network if group == 'network' else sim
                if name in target:
                    raise ConfigError('duplicate key', field=key)
                target[name] = _cast(key, value)
            except ConfigError as e:
                raise ConfigError(e.reason, field=e.field or key, line=line) from None
            except ValueError:
                raise ConfigError(f'cannot read {value!r}', field=key, line=line) from None
        if beta_db is not None:
            if 'beta' in network:
                raise ConfigError('both beta and beta_db given', field='network.beta_db', line=beta_db[1])
            network['beta'] = db_to_linear(beta_db[0])
        try:
            cfg = replace(base.network, **network)
        except ConfigError as e:
            raise ConfigError(e.reason, field=f'network.{e.field}') from None
        return replace(base, network=cfg, **sim)
    
    @classmethod
    def parse(cls, text, base=None):
        r"""Reads the ``key = value`` format.
        
        Raises:
            ConfigError: malformed line, unknown or duplicate key, or invalid value; the message carries the
                1-based line number and the field. 
        """
        entries = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition('=')
            if not sep or not key.strip():
                raise ConfigError(f'expected "key = value", got {raw.strip()!r}', line=number)
            entries.append((key.strip(), value.strip(), number))
        return cls._build(entries, base)
    
    def serialize(self):
        return ''.join(f'{key} = {value}\n' for key, value in self.to_dict().items())
    
    @classmethod
    def load(cls, f, base=None):
        return cls.parse(Path(f).read_text(), base)
    
    def save(self, f):
        f = Path(f)
        f.write_text(self.serialize())
        return f


PRESETS = {'fig2': ExperimentConfig(network=NetworkConfig(n_bs=8, 
                                                          n_mu=400, 
                                                          n_src=4, 
                                                          area=2000.0*2000.0, 
                                                          beta=1.0, 
                                                          alpha=4.0, 
                                                          power_cap=0.064, 
                                                          slot_cap=200, 
                                                          target_ratio=0.9), 
                                    mode=Mode.BROADCAST, 
                                    mobility=Mobility.RANDOM_DIRECTION, 
                                    speed=5.0, 
                                    slot_period=600.0, 
                                    k_max=60, 
                                    trials=10000, 
                                    seed=0, 
                                    metric=Metric.TORUS, 
                                    uplink=Uplink.ANALYSIS, 
                                    mu=0.064)}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f'unknown preset {name!r}, expected one of: {", ".join(PRESETS)}', field='preset') from None
