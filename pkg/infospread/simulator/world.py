from enum import Enum
from dataclasses import dataclass
from dataclasses import field

import numpy as np

from infospread.errors import ConfigError
from infospread.network import parse_enum
from infospread.utils import Seeder


class Mobility(Enum):
    IID = 'iid'
    RANDOM_DIRECTION = 'random_direction'


class Metric(Enum):
    r"""Distance metric. ``TORUS`` wraps around the square to emulate a stationary infinite network. """
    TORUS = 'torus'
    BOUNDED = 'bounded'
    
    
class Uplink(Enum):
    r"""How cellular uplink activity is drawn each slot.
    
    * ``ANALYSIS``: every MU is busy independently with probability ``1 - p_i``; interferers are an
      independent Poisson set with the BS density (full load). 
    * ``STRUCTURAL``: every BS schedules one MU drawn uniformly from its cell; those MUs interfere. 
    """
    ANALYSIS = 'analysis'
    STRUCTURAL = 'structural'


@dataclass(frozen=True)
class SimSettings:
    r"""Physical and modelling settings of a Monte Carlo run.
    
    Args:
        speed (float): node speed in m/s (random direction mobility)
        slot_period (float): time between transmissions in seconds
        metric (Metric): distance metric
        uplink (Uplink): uplink activity model
        poisson_sources (bool): if ``True``, the sources form a Poisson field with mean count ``n_src`` in every
            slot (the field the closed forms assume), renewed between slots by births and deaths; otherwise exactly
            ``n_src`` sources persist for the whole trial
        source_survival (float): with Poisson sources, the probability that a source is still active in the next
            slot; ``0`` draws a fresh field every slot
        flight_scale (float): random direction flights have lengths uniform on ``[0, flight_scale * side]`` and a
            fresh heading each; ``inf`` moves every node along one straight segment per slot
        interference_window (float): with the torus metric and the analysis-matched uplink, uplink interferers
            are drawn over a square this many times wider than the network, centered on it, so that distant
            interferers are not lost to the wrap-around; ``1`` keeps them on the network square
    """
    speed: float = 5.0
    slot_period: float = 600.0
    metric: Metric = Metric.TORUS
    uplink: Uplink = Uplink.ANALYSIS
    poisson_sources: bool = True
    interference_window: float = 5.0
    source_survival: float = 0.5
    flight_scale: float = 1.0
    
    def __post_init__(self):
        object.__setattr__(self, 'metric', parse_enum(Metric, self.metric))
        object.__setattr__(self, 'uplink', parse_enum(Uplink, self.uplink))
        if not self.speed >= 0:
            raise ConfigError(f'expected non-negative speed, got {self.speed}', field='speed')
        if not self.slot_period > 0:
            raise ConfigError(f'expected positive slot period, got {self.slot_period}', field='slot_period')
        if not self.interference_window >= 1:
            raise ConfigError(f'interference window must be at least 1, got {self.interference_window}', 
                              field='interference_window')
        if not 0 <= self.source_survival <= 1:
            raise ConfigError(f'expected a survival probability in [0, 1], got {self.source_survival}', 
                              field='source_survival')
        if not self.flight_scale > 0:
            raise ConfigError(f'expected positive flight scale, got {self.flight_scale}', field='flight_scale')
        
    @property
    def step_length(self):
        return self.speed*self.slot_period


@dataclass
class SimWorld:
    r"""State of one Monte Carlo trial.
    
    Positions are ``(n, 2)`` arrays inside ``[0, side]^2``. Base stations never move. ``covered`` only ever
    switches from ``False`` to ``True`` within a trial. 
    """
    side: float
    mu_positions: np.ndarray
    src_positions: np.ndarray
    bs_positions: np.ndarray
    covered: np.ndarray
    speed: float
    slot_period: float
    metric: Metric
    rng_seed: int
    rng: np.random.Generator = field(repr=False)
    mu_heading: np.ndarray = None
    src_heading: np.ndarray = None
    slot: int = 0
    interference_window: float = 1.0
    max_flight: float = np.inf
    src_rate: float = None
    src_survival: float = 0.0
    
    @property
    def n_mu(self):
        return len(self.mu_positions)
    
    @property
    def n_covered(self):
        return int(self.covered.sum())


def uniform_points(rng, n, side):
    return rng.uniform(0.0, side, size=(n, 2))


def place_nodes(cfg, seed, settings=SimSettings(), rng=None):
    r"""Places every node class i.i.d. uniformly on the square.
    
    MU and BS counts are exact. The source count is exact or Poisson, see :class:`SimSettings`; in the Poisson case
    the world keeps the mean count so that :func:`renew_sources` can redraw the field between slots. 
    
    Args:
        cfg (NetworkConfig): network
        seed (int): root seed, recorded in the world
        settings (SimSettings, optional): speed, slot period and metric
        rng (Generator, optional): stream to draw from. Default: the first child stream of ``seed``
        
    Returns:
        SimWorld: a fresh world with nothing covered
    """
    if rng is None:
        rng = Seeder(seed).generator(0)
    side = cfg.side
    n_src = int(rng.poisson(cfg.n_src)) if settings.poisson_sources else cfg.n_src
    return SimWorld(side=side, 
                    mu_positions=uniform_points(rng, cfg.n_mu, side), 
                    src_positions=uniform_points(rng, n_src, side), 
                    bs_positions=uniform_points(rng, cfg.n_bs, side), 
                    covered=np.zeros(cfg.n_mu, dtype=bool), 
                    speed=settings.speed, 
                    slot_period=settings.slot_period, 
                    metric=settings.metric, 
                    rng_seed=seed, 
                    rng=rng, 
                    mu_heading=np.zeros(cfg.n_mu), 
                    src_heading=np.zeros(n_src), 
                    interference_window=settings.interference_window if settings.metric == Metric.TORUS else 1.0, 
                    max_flight=settings.flight_scale*side, 
                    src_rate=float(cfg.n_src) if settings.poisson_sources else None, 
                    src_survival=settings.source_survival)


def renew_sources(world):
    r"""Spatial birth and death of a Poisson source field between two slots.
    
    Every source stays active with probability ``src_survival``, and a Poisson number of newcomers with mean
    ``src_rate * (1 - src_survival)`` appear uniformly. Survivors of a uniform field are still uniform once moved,
    so the field of every slot is Poisson with mean count ``src_rate``. Worlds with a fixed source count are left
    unchanged.
    
    Args:
        world (SimWorld): world, modified in place
        
    Returns:
        SimWorld: the same world
    """
    if world.src_rate is None:
        return world
    rng = world.rng
    keep = rng.uniform(size=len(world.src_positions)) < world.src_survival
    n_new = int(rng.poisson(world.src_rate*(1.0 - world.src_survival)))
    world.src_positions = np.concatenate([world.src_positions[keep], uniform_points(rng, n_new, world.side)])
    world.src_heading = np.concatenate([world.src_heading[keep], rng.uniform(0.0, 2*np.pi, size=n_new)])
    return world


def distances(a, b, side, metric=Metric.TORUS):
    r"""Pairwise distances between point sets ``a`` (n, 2) and ``b`` (m, 2), shape ``(n, m)``. """
    delta = np.abs(a[:, None, :] - b[None, :, :])
    if metric == Metric.TORUS:
        delta = np.minimum(delta, side - delta)
    return np.sqrt((delta**2).sum(-1))
