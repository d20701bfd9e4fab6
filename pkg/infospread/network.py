from enum import Enum
from dataclasses import dataclass
from dataclasses import replace
import math

from .errors import ConfigError


class Mode(Enum):
    r"""Transmission mode of the source nodes. """
    UNICAST = 'unicast'
    BROADCAST = 'broadcast'


class Regime(Enum):
    r"""Power regime of the redundancy minimization. """
    CONSTANT = 'constant'
    DYNAMIC = 'dynamic'


def parse_enum(enum, value):
    r"""Accepts an enum member, its value or its name (case insensitive). """
    if isinstance(value, enum):
        return value
    text = str(value).strip().lower()
    for member in enum:
        if text in (member.value, member.name.lower()):
            return member
    choices = ', '.join(member.value for member in enum)
    raise ConfigError(f'unknown {enum.__name__} {value!r}, expected one of: {choices}')


def db_to_linear(db):
    return 10.0**(db/10.0)


@dataclass(frozen=True)
class NetworkConfig:
    r"""Deployment and constraints of the D2D spreading problem.
    
    Densities derive as ``count / area``. Counts may be zero (an empty node class) but closed forms
    call :meth:`require_positive_counts` first. 
    
    Args:
        n_bs (int): number of base stations
        n_mu (int): number of mobile users
        n_src (int): number of source nodes
        area (float): network area in square meters
        beta (float): target SIR, linear scale
        alpha (float): path-loss exponent, greater than 2
        power_cap (float): maximum source transmit power, normalized to the MU power
        slot_cap (int): maximum number of transmission slots
        target_ratio (float): target covered ratio in ``[0, 1)``
    """
    n_bs: int = 8
    n_mu: int = 400
    n_src: int = 4
    area: float = 2000.0*2000.0
    beta: float = 1.0
    alpha: float = 4.0
    power_cap: float = 0.064
    slot_cap: int = 200
    target_ratio: float = 0.9
    
    def __post_init__(self):
        for name in ['n_bs', 'n_mu', 'n_src', 'slot_cap']:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f'expected integer, got {value!r}', field=name)
        for name in ['n_bs', 'n_mu', 'n_src']:
            if getattr(self, name) < 0:
                raise ConfigError(f'expected non-negative count, got {getattr(self, name)}', field=name)
        for name in ['area', 'beta', 'alpha', 'power_cap', 'target_ratio']:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f'expected finite real, got {value!r}', field=name)
        if self.area <= 0:
            raise ConfigError(f'expected positive area, got {self.area}', field='area')
        if self.beta < 0:
            raise ConfigError(f'expected non-negative SIR threshold, got {self.beta}', field='beta')
        if self.alpha <= 2:
            raise ConfigError(f'path-loss exponent must exceed 2, got {self.alpha}', field='alpha')
        if self.power_cap <= 0:
            raise ConfigError(f'expected positive power cap, got {self.power_cap}', field='power_cap')
        if self.slot_cap < 1:
            raise ConfigError(f'expected at least one slot, got {self.slot_cap}', field='slot_cap')
        if not 0 <= self.target_ratio < 1:
            raise ConfigError(f'target ratio must lie in [0, 1), got {self.target_ratio}', field='target_ratio')
            
    def require_positive_counts(self):
        for name in ['n_bs', 'n_mu', 'n_src']:
            if getattr(self, name) < 1:
                raise ConfigError(f'closed forms need a positive count, got {getattr(self, name)}', field=name)
        return self
            
    @property
    def side(self):
        r"""Side length of the square network. """
        return math.sqrt(self.area)
    
    @property
    def lambda_b(self):
        return self.n_bs/self.area
    
    @property
    def lambda_u(self):
        return self.n_mu/self.area
    
    @property
    def lambda_s(self):
        return self.n_src/self.area
    
    def replace(self, **changes):
        return replace(self, **changes)
    
    def scaled(self, bs=1.0, mu=1.0, src=1.0):
        r"""Returns a copy with each node class scaled by a factor (counts rounded, at least one). """
        return self.replace(n_bs=max(1, int(round(self.n_bs*bs))), 
                            n_mu=max(1, int(round(self.n_mu*mu))), 
                            n_src=max(1, int(round(self.n_src*src))))
