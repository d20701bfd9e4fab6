from dataclasses import dataclass
from dataclasses import field

import numpy as np

from infospread.network import Mode
from infospread.network import NetworkConfig
from infospread.transform import describe
from infospread.utils import pickle_dump
from infospread.utils import pickle_load
from .world import Mobility
from .world import SimSettings


@dataclass
class TrialStats:
    r"""Per-trial, per-slot tallies of a Monte Carlo experiment.
    
    The arrays have shape ``(trials, k_max)`` and rows are in trial-index order, so aggregation is
    independent of how trials were scheduled. 
    
    Attributes:
        m (ndarray): receptions with SIR above threshold among eligible receivers
        m_hat (ndarray): those that reached an already covered MU
        n (ndarray): covered MUs at the end of each slot
    """
    cfg: NetworkConfig
    mode: Mode
    mobility: Mobility
    settings: SimSettings
    powers: np.ndarray
    seed: int
    m: np.ndarray
    m_hat: np.ndarray
    n: np.ndarray
    extra: dict = field(default_factory=dict)
    
    def __post_init__(self):
        assert self.m.shape == self.m_hat.shape == self.n.shape, 'tally shapes differ'
        assert np.all(self.m_hat <= self.m), 'more redundant than total receptions'
    
    @property
    def trials(self):
        return self.m.shape[0]
    
    @property
    def k_max(self):
        return self.m.shape[1]
    
    @property
    def slots(self):
        return np.arange(1, self.k_max + 1)
    
    @property
    def redundant_receptions(self):
        r"""Cumulative redundant receptions per trial and slot. """
        return np.cumsum(self.m_hat, axis=1)
    
    @property
    def ratio(self):
        return self.n/self.cfg.n_mu
    
    @property
    def previous_ratio(self):
        r"""Covered ratio at the end of the previous slot (zero before slot 1). """
        return np.hstack([np.zeros((self.trials, 1)), self.ratio[:, :-1]])
    
    @property
    def conditional_ratio(self):
        r"""``m_hat / m`` per trial and slot, ``nan`` where ``m = 0``. """
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(self.m > 0, self.m_hat/np.maximum(self.m, 1), np.nan)
    
    def summary(self, key):
        r"""Mean and standard error across trials of ``'ratio'``, ``'m'``, ``'m_hat'``, ``'n'`` or
        ``'redundant_receptions'``. 
        """
        return describe(getattr(self, key), axis=0)
    
    @classmethod
    def stack(cls, blocks, **meta):
        r"""Concatenates per-trial ``(m, m_hat, n)`` blocks in the given order. """
        m, m_hat, n = (np.concatenate([block[i] for block in blocks], axis=0) for i in range(3))
        return cls(m=m, m_hat=m_hat, n=n, **meta)
    
    def save(self, f):
        return pickle_dump(obj=self, f=f, ext='.pkl')
    
    @staticmethod
    def load(f):
        return pickle_load(f)
