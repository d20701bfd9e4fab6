from dataclasses import dataclass

import numpy as np

from infospread import oracle
from infospread.errors import InsufficientData
from infospread.transform import describe


@dataclass(frozen=True)
class HomogeneityReport:
    r"""Per-slot z-scores of the two equalities defining homogeneous mixing.
    
    First: the mean number of successful receptions equals ``N_u q`` (``q`` the analytic per-slot fresh
    coverage probability). Second: among successful receptions, the fraction reaching covered MUs equals the
    covered ratio of the previous slot; it is tested on the paired per-trial difference, over trials with at
    least one reception. 
    """
    expected_m: np.ndarray
    mean_m: np.ndarray
    se_m: np.ndarray
    z_first: np.ndarray
    mean_conditional: np.ndarray
    mean_previous: np.ndarray
    z_second: np.ndarray
    valid_trials: np.ndarray
    
    def holds(self, threshold=3.0):
        return bool(np.all(np.abs(self.z_first) <= threshold) and np.all(np.abs(self.z_second) <= threshold))
    
    def violations(self, threshold=3.0):
        r"""Slots (1-based) whose second-equality z-score exceeds ``threshold`` in magnitude. """
        return np.flatnonzero(np.abs(self.z_second) > threshold) + 1


def _z(mean, se):
    mean, se = np.asarray(mean, dtype=np.float64), np.asarray(se, dtype=np.float64)
    z = np.divide(mean, se, out=np.zeros_like(mean), where=se > 0)
    # zero spread: exact agreement scores 0, any offset is infinitely significant
    flat = (se <= 0) & (mean != 0)
    z[flat] = np.copysign(np.inf, mean[flat])
    return z


def expected_receptions(stats):
    r"""``N_u q`` per slot from the closed form (quadrature when the path-loss exponent is not 4). """
    q = {mu: oracle.coverage_curve_any(stats.cfg, mu, stats.mode, 1).q for mu in np.unique(stats.powers)}
    return stats.cfg.n_mu*np.array([q[mu] for mu in stats.powers])


def homogeneity_diagnostics(stats, min_trials=1000):
    r"""Tests both homogeneous-mixing equalities slot by slot.
    
    Args:
        stats (TrialStats): aggregated Monte Carlo tallies
        min_trials (int, optional): smallest acceptable number of trials. Default: ``1000``
        
    Returns:
        HomogeneityReport: per-slot z-scores
        
    Raises:
        InsufficientData: some slot has no trial with a successful reception
    """
    assert stats.trials >= min_trials, f'expected at least {min_trials} trials, got {stats.trials}'
    valid = stats.m > 0
    empty = np.flatnonzero(valid.sum(0) == 0)
    if empty.size > 0:
        raise InsufficientData(f'no trial has a successful reception in slot(s) {(empty + 1).tolist()}')
    expected = expected_receptions(stats)
    m = stats.summary('m')
    
    difference = stats.conditional_ratio - stats.previous_ratio
    means, ses, conditional, previous = [], [], [], []
    for t in range(stats.k_max):
        rows = valid[:, t]
        d = describe(difference[rows, t])
        means.append(d.mean)
        ses.append(d.se)
        conditional.append(stats.conditional_ratio[rows, t].mean())
        previous.append(stats.previous_ratio[rows, t].mean())
    return HomogeneityReport(expected_m=expected, 
                             mean_m=m.mean, 
                             se_m=m.se, 
                             z_first=_z(m.mean - expected, m.se), 
                             mean_conditional=np.array(conditional), 
                             mean_previous=np.array(previous), 
                             z_second=_z(np.array(means), np.array(ses)), 
                             valid_trials=valid.sum(0))
