r"""Closed-form coverage and redundancy predictions for D2D information spreading.

All functions are pure. Powers may be given as scalars or numpy arrays; scalars in give floats out. 
The closed forms assume a path-loss exponent of exactly 4 and Rayleigh fading. 
"""
from dataclasses import dataclass

import numpy as np

from .errors import ClosedFormError
from .network import Mode
from .network import parse_enum


# Exponent of the Gamma approximation of the Voronoi cell area used for the idle probability
CELL_SHAPE = 3.5


def require_closed_form(cfg):
    if cfg.alpha != 4:
        raise ClosedFormError(f'closed forms are derived for a path-loss exponent of 4, got {cfg.alpha}', 
                              field='alpha')
    cfg.require_positive_counts()


def _power(mu):
    mu = np.asarray(mu, dtype=np.float64)
    assert np.all(mu > 0), f'expected positive transmit power, got {mu}'
    return mu


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def idle_probability(cfg):
    r"""Probability that a random MU holds no uplink resource block in a slot.
    
    .. math::
        p_i = 1 - \frac{N_b}{N_u}\left(1 - \left(1 + \frac{N_u}{3.5 N_b}\right)^{-3.5}\right)
    
    Args:
        cfg (NetworkConfig): network
        
    Returns:
        float: idle probability
    """
    assert cfg.n_bs >= 1 and cfg.n_mu >= 1, f'expected at least one BS and one MU, got {cfg.n_bs}, {cfg.n_mu}'
    load = cfg.n_mu/cfg.n_bs
    busy = (1.0 - (1.0 + load/CELL_SHAPE)**(-CELL_SHAPE))/load
    return 1.0 - busy


def kappa(beta):
    r"""Interference term of the nearest-source exclusion, :math:`\sqrt\beta(\pi/2 - \tan^{-1}(\beta^{-1/2}))`.
    
    Extended continuously with ``kappa(0) = 0``. Accepts arrays. 
    """
    beta = np.asarray(beta, dtype=np.float64)
    assert np.all(beta >= 0), f'expected non-negative SIR threshold, got {beta}'
    root = np.sqrt(beta)
    # arctan2(root, 1) = pi/2 - arctan(1/root) and is exact at root = 0
    return _out(root*np.arctan2(root, 1.0))


def p_suc_unicast(cfg, mu):
    r"""Success probability of the link from a source to its nearest MU. 
    
    .. math::
        p^U = \frac{N_u}{N_u + \frac{\pi}{2}\sqrt{\beta/\mu} N_b + \frac{\pi}{2} N_s\sqrt\beta}
    
    Raises:
        ClosedFormError: path-loss exponent other than 4
    """
    require_closed_form(cfg)
    mu = _power(mu)
    root = np.sqrt(cfg.beta)
    denom = cfg.n_mu + np.pi/2*root/np.sqrt(mu)*cfg.n_bs + np.pi/2*cfg.n_src*root
    return _out(cfg.n_mu/denom)


def p_suc_broadcast(cfg, mu):
    r"""Success probability of a typical MU decoding its nearest source. 
    
    .. math::
        p^B = \frac{N_s}{N_s + \frac{\pi}{2}\sqrt{\beta/\mu} N_b + N_s\kappa}
    
    Raises:
        ClosedFormError: path-loss exponent other than 4
    """
    require_closed_form(cfg)
    mu = _power(mu)
    denom = cfg.n_src + np.pi/2*np.sqrt(cfg.beta/mu)*cfg.n_bs + cfg.n_src*kappa(cfg.beta)
    return _out(cfg.n_src/denom)


def p_suc(cfg, mu, mode):
    mode = parse_enum(Mode, mode)
    if mode == Mode.UNICAST:
        return p_suc_unicast(cfg, mu)
    return p_suc_broadcast(cfg, mu)


def fresh_probability(cfg, mu, mode):
    r"""Per-slot probability ``q`` that a given uncovered MU becomes covered.
    
    ``(N_s/N_u) p_i p^U`` for unicast, ``p_i p^B`` for broadcast. 
    """
    mode = parse_enum(Mode, mode)
    q = idle_probability(cfg)*np.asarray(p_suc(cfg, mu, mode))
    if mode == Mode.UNICAST:
        q = q*cfg.n_src/cfg.n_mu
    return _out(q)


def uncovered_fraction(q, k):
    r"""``(1 - q)^k`` evaluated as ``exp(k log1p(-q))`` for accuracy at large ``k``. """
    q = np.asarray(q, dtype=np.float64)
    with np.errstate(divide='ignore'):
        return np.exp(np.asarray(k)*np.log1p(-q))


def expected_covered(n_mu, q, k):
    r"""Expected covered MUs after ``k`` slots, :math:`N_u[1 - (1 - q)^k]`. Broadcasts over ``q`` and ``k``. """
    q = np.asarray(q, dtype=np.float64)
    with np.errstate(divide='ignore'):
        return _out(-n_mu*np.expm1(np.asarray(k)*np.log1p(-q)))


@dataclass(frozen=True)
class CoverageCurve:
    r"""Expected coverage per slot together with the probabilities that generated it.
    
    ``per_slot_expected_covered[k-1]`` is the expected number of covered MUs at the end of slot ``k``. 
    """
    mode: Mode
    mu: float
    p_suc: float
    p_idle: float
    n_mu: int
    q: float
    per_slot_expected_covered: np.ndarray
    
    @property
    def k_max(self):
        return len(self.per_slot_expected_covered)
    
    @property
    def slots(self):
        return np.arange(1, self.k_max + 1)
    
    @property
    def ratios(self):
        return self.per_slot_expected_covered/self.n_mu
    
    @property
    def redundancy(self):
        r"""Cumulative expected redundant receptions per slot, ``N_u k q - E[N_k]``. """
        return np.maximum(self.n_mu*self.slots*self.q - self.per_slot_expected_covered, 0.0)
    
    def first_slot_reaching(self, ratio):
        r"""Smallest slot whose expected ratio reaches ``ratio``, or ``None`` within ``k_max``. """
        hits = np.flatnonzero(self.ratios >= ratio)
        return int(hits[0]) + 1 if hits.size > 0 else None


def curve_from_probabilities(mode, mu, p_suc, p_idle, n_mu, q, k_max):
    r"""Builds a :class:`CoverageCurve` from an explicit per-slot fresh-coverage probability ``q``. """
    assert k_max >= 1, f'expected at least one slot, got {k_max}'
    assert 0 <= q <= 1, f'expected a probability, got {q}'
    covered = np.asarray(expected_covered(n_mu, q, np.arange(1, k_max + 1)), dtype=np.float64)
    return CoverageCurve(mode=parse_enum(Mode, mode), mu=float(mu), p_suc=float(p_suc), p_idle=float(p_idle), 
                         n_mu=n_mu, q=float(q), per_slot_expected_covered=covered)


def coverage_curve(cfg, mu, mode, k_max):
    r"""Expected coverage for slots ``1..k_max`` under a constant transmit power.
    
    Args:
        cfg (NetworkConfig): network
        mu (float): source transmit power
        mode (Mode): unicast or broadcast
        k_max (int): number of slots
        
    Returns:
        CoverageCurve: the curve
    """
    mode = parse_enum(Mode, mode)
    success = p_suc(cfg, mu, mode)
    return curve_from_probabilities(mode, mu, success, idle_probability(cfg), cfg.n_mu, 
                                    fresh_probability(cfg, mu, mode), k_max)


def redundancy(cfg, mu, k):
    r"""Expected redundant receptions by the end of slot ``k`` in broadcast mode. 
    
    .. math::
        f(\mu, k) = N_u k p_i p^B - N_u\left(1 - (1 - p_i p^B)^k\right)
        
    Nonnegative and nondecreasing in ``k``; zero at ``k = 1``. 
    """
    assert np.all(np.asarray(k) >= 1), f'expected at least one slot, got {k}'
    q = np.asarray(fresh_probability(cfg, mu, Mode.BROADCAST))
    value = cfg.n_mu*np.asarray(k)*q - np.asarray(expected_covered(cfg.n_mu, q, k))
    return _out(np.maximum(value, 0.0))


def reduced_objective(cfg, mu, k):
    r"""Redundancy with the coverage constraint active, ``N_u k p_i p^B(mu) - N_u gamma``. """
    q = fresh_probability(cfg, mu, Mode.BROADCAST)
    return cfg.n_mu*k*q - cfg.n_mu*cfg.target_ratio


def required_power(cfg, q):
    r"""Broadcast power whose per-slot fresh-coverage probability ``p_i p^B`` equals ``q``.
    
    Inverts the broadcast closed form. ``q`` must lie strictly between 0 and ``p_i/(1 + kappa)``, the
    supremum reached as the power grows without bound. 
    
    Returns:
        float: the power, or ``inf`` when ``q`` is out of reach
    """
    require_closed_form(cfg)
    assert q > 0, f'expected positive probability, got {q}'
    excess = idle_probability(cfg)/q - kappa(cfg.beta) - 1.0
    if excess <= 0:
        return float('inf')
    return float(np.pi**2*cfg.n_bs**2*cfg.beta/(4*cfg.n_src**2*excess**2))
