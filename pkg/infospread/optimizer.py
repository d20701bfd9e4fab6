r"""Redundancy minimization for broadcast spreading.

Jointly chooses the source transmit power and the number of slots minimizing the expected number of redundant
receptions, subject to reaching the target covered ratio, the power cap and the slot cap. Two regimes are
solved in closed form (constant power, and per-slot power control) and a brute-force grid search verifies both. 

Every schedule is evaluated with the same slot recurrence,

.. math::
    R_t = R_{t-1} + (1 - R_{t-1})\, p_i p^B(\mu_t), \qquad f \mathrel{+}= N_u p_i p^B(\mu_t) R_{t-1},
    
which reduces to the closed forms of :mod:`infospread.analytic` for a constant power. 
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize

from .errors import DegenerateDenominator
from .errors import Infeasible
from .network import Mode
from .network import Regime
from .network import parse_enum
from . import analytic


# Slack allowed when checking that a schedule meets the target ratio
COVERAGE_TOL = 1e-9


@dataclass(frozen=True)
class PowerSchedule:
    r"""Per-slot transmit powers and the covered ratio predicted after each slot. """
    powers: np.ndarray
    per_slot_ratio: np.ndarray
    
    def __len__(self):
        return len(self.powers)
    
    @property
    def final_ratio(self):
        return float(self.per_slot_ratio[-1])
    
    @property
    def coverage_gaps(self):
        r"""Ratio covered by each slot, ``R_t - R_{t-1}``; the last entry is the residual the final slot closes. """
        return np.diff(self.per_slot_ratio, prepend=0.0)


@dataclass(frozen=True)
class OptimizationResult:
    r"""Solution of the redundancy minimization.
    
    Attributes:
        regime (Regime): constant power or dynamic power control
        k_star (int): number of slots
        schedule (PowerSchedule): powers and predicted ratios
        predicted_redundancy (float): expected redundant receptions
        predicted_final_ratio (float): covered ratio after ``k_star`` slots
        reduced_objective (float): ``N_u k q - N_u gamma`` with ``q`` of the first slot power
        closed_form_last_power (float): dynamic regime only, the printed last-slot formula evaluated as printed
    """
    regime: Regime
    k_star: int
    schedule: PowerSchedule
    predicted_redundancy: float
    predicted_final_ratio: float
    reduced_objective: float = float('nan')
    closed_form_last_power: float = float('nan')
    
    @property
    def mu_star(self):
        r"""Power of the first slot (the constant power, or the cap in the dynamic regime). """
        return float(self.schedule.powers[0])
    
    @property
    def last_power(self):
        return float(self.schedule.powers[-1])


def schedule_trajectory(cfg, powers):
    r"""Covered ratio and cumulative redundancy after each slot of a power schedule.
    
    Args:
        cfg (NetworkConfig): network
        powers (list): per-slot powers in ``(0, power_cap]``
        
    Returns:
        tuple: ``(ratios, redundancies)`` arrays of the schedule length
    """
    powers = np.asarray(powers, dtype=np.float64)
    assert powers.ndim == 1 and powers.size >= 1, f'expected a non-empty 1-D schedule, got shape {powers.shape}'
    assert np.all(powers > 0), f'expected positive powers, got {powers}'
    assert np.all(powers <= cfg.power_cap*(1 + 1e-12)), f'power above the cap {cfg.power_cap}: {powers}'
    q = np.atleast_1d(analytic.fresh_probability(cfg, powers, Mode.BROADCAST))
    ratios = np.empty_like(q)
    redundancies = np.empty_like(q)
    ratio = 0.0
    total = 0.0
    for t, q_t in enumerate(q):
        total += cfg.n_mu*q_t*ratio
        ratio += (1.0 - ratio)*q_t
        ratios[t] = ratio
        redundancies[t] = total
    return ratios, redundancies


def evaluate_schedule(cfg, powers):
    r"""Predicted final covered ratio and total redundant receptions of a power schedule.
    
    Returns:
        tuple: ``(final_ratio, redundancy)``
    """
    ratios, redundancies = schedule_trajectory(cfg, powers)
    return float(ratios[-1]), float(redundancies[-1])


def _result(cfg, regime, powers, **extra):
    powers = np.asarray(powers, dtype=np.float64)
    ratios, redundancies = schedule_trajectory(cfg, powers)
    schedule = PowerSchedule(powers=powers, per_slot_ratio=ratios)
    objective = analytic.reduced_objective(cfg, powers[0], len(powers))
    return OptimizationResult(regime=regime, k_star=len(powers), schedule=schedule, 
                              predicted_redundancy=float(redundancies[-1]), 
                              predicted_final_ratio=float(ratios[-1]), 
                              reduced_objective=float(objective), **extra)


def max_fresh_probability(cfg):
    r"""Per-slot fresh-coverage probability at the power cap, :math:`p_i \bar p^B`. """
    return analytic.fresh_probability(cfg, cfg.power_cap, Mode.BROADCAST)


def minimal_slots(cfg, q):
    r"""Smallest ``k`` with ``1 - (1 - q)^k >= gamma``. """
    gamma = cfg.target_ratio
    if gamma == 0 or q >= 1:
        return 1
    k = max(1, math.ceil(math.log1p(-gamma)/math.log1p(-q)))
    # ceil of a rounded quotient may be off by one
    while k > 1 and 1 - analytic.uncovered_fraction(q, k - 1) >= gamma:
        k -= 1
    while 1 - analytic.uncovered_fraction(q, k) < gamma:
        k += 1
    return k


def check_feasible(cfg):
    r"""Raises :class:`Infeasible` when even the power cap for ``slot_cap`` slots misses the target.
    
    Returns:
        int: the minimal number of slots at the power cap
    """
    q = max_fresh_probability(cfg)
    reach = 1 - analytic.uncovered_fraction(q, cfg.slot_cap)
    if reach < cfg.target_ratio:
        raise Infeasible(f'power cap {cfg.power_cap} covers at most {reach:.6g} of the MUs within '
                         f'{cfg.slot_cap} slots, target {cfg.target_ratio}', 
                         constraint='slot_cap')
    return minimal_slots(cfg, q)


def per_slot_target(target, k):
    r"""Constant per-slot probability reaching ``target`` in exactly ``k`` slots, ``1 - (1 - target)^{1/k}``. """
    return -math.expm1(math.log1p(-target)/k)


def solve_constant(cfg):
    r"""Optimal constant power and slot count.
    
    The slot count is the smallest meeting the target at the power cap; the power is then lowered until the
    target is met with equality,
    
    .. math::
        \mu^* = \frac{\pi^2 N_b^2\beta}{4 N_s^2\left(\frac{p_i}{1 - (1 - \gamma)^{1/k^*}} - \kappa - 1\right)^2}
        
    Raises:
        Infeasible: the target is out of reach within the caps
        DegenerateDenominator: the bracket above is not positive
    """
    k_star = check_feasible(cfg)
    if cfg.target_ratio == 0:
        return _result(cfg, Regime.CONSTANT, [cfg.power_cap])
    if cfg.beta == 0:
        # success is certain at any power, nothing to trade off
        return _result(cfg, Regime.CONSTANT, [cfg.power_cap]*k_star)
    c = per_slot_target(cfg.target_ratio, k_star)
    excess = analytic.idle_probability(cfg)/c - analytic.kappa(cfg.beta) - 1.0
    if excess <= 0:
        raise DegenerateDenominator(f'p_i/(1 - (1 - gamma)^(1/k)) - kappa - 1 = {excess:.6g} is not positive '
                                    f'for k = {k_star}')
    mu_star = np.pi**2*cfg.n_bs**2*cfg.beta/(4*cfg.n_src**2*excess**2)
    mu_star = min(float(mu_star), cfg.power_cap)
    return _result(cfg, Regime.CONSTANT, [mu_star]*k_star)


def printed_last_power(cfg, k_star):
    r"""The dynamic-regime last-slot power as printed in closed form, kept for comparison only.
    
    The printed expression mixes ``(1 - p_i p)^{k-1}`` in the numerator with ``(1 - p)^{k-1}`` in the
    denominator; it is evaluated literally. 
    """
    p_bar = analytic.p_suc_broadcast(cfg, cfg.power_cap)
    p_idle = analytic.idle_probability(cfg)
    k = analytic.kappa(cfg.beta)
    gamma = cfg.target_ratio
    top = np.pi**2*cfg.n_bs**2*cfg.beta*((1 - p_idle*p_bar)**(k_star - 1) + gamma - 1)**2
    bottom = 4*cfg.n_src**2*((1 - gamma)*(1 + k) + (1 + k - p_idle)*(1 - p_bar)**(k_star - 1))**2
    return float(top/bottom)


def last_slot_power(cfg, ratio_before, tol=1e-12):
    r"""Smallest power whose slot lifts the covered ratio from ``ratio_before`` to exactly ``gamma``.
    
    Solved by bracketing root search on the slot recurrence over ``(0, power_cap]``. 
    
    Returns:
        float: the power
    """
    gamma = cfg.target_ratio
    
    def residual(mu):
        return ratio_before + (1 - ratio_before)*analytic.fresh_probability(cfg, mu, Mode.BROADCAST) - gamma
    
    high = cfg.power_cap
    if residual(high) <= 0:
        return high
    low = high
    while residual(low) > 0:
        low *= 1e-3
        if low < 1e-300:
            return low
    mu = optimize.brentq(residual, low, high, xtol=1e-300, rtol=4*np.finfo(float).eps, maxiter=500)
    # land on the feasible side of the root
    while residual(mu) < -tol:
        mu = np.nextafter(mu, np.inf)
    return float(min(mu, high))


def solve_dynamic(cfg):
    r"""Optimal per-slot power control.
    
    Every slot but the last transmits at the cap; the last slot transmits just enough to close the residual
    ``gamma - [1 - (1 - p_i \bar p)^{k^*-1}]``. The slot count equals the constant-power one. 
    
    Raises:
        Infeasible: the target is out of reach within the caps
    """
    k_star = check_feasible(cfg)
    if cfg.target_ratio == 0:
        return _result(cfg, Regime.DYNAMIC, [cfg.power_cap])
    q_bar = max_fresh_probability(cfg)
    ratio_before = 1 - float(analytic.uncovered_fraction(q_bar, k_star - 1))
    if cfg.beta == 0:
        last = cfg.power_cap
    else:
        last = last_slot_power(cfg, ratio_before)
    powers = [cfg.power_cap]*(k_star - 1) + [last]
    return _result(cfg, Regime.DYNAMIC, powers, closed_form_last_power=printed_last_power(cfg, k_star))


def solve(cfg, regime):
    regime = parse_enum(Regime, regime)
    return solve_constant(cfg) if regime == Regime.CONSTANT else solve_dynamic(cfg)


def power_grid(cfg, size):
    r"""Uniform grid ``power_cap * i/size`` for ``i = 1..size``; covers ``(0, power_cap]``. """
    assert size >= 1, f'expected a positive grid size, got {size}'
    return cfg.power_cap*np.arange(1, size + 1)/size


def grid_oracle(cfg, power_grid_size=10000, k_range=None, regime=Regime.CONSTANT):
    r"""Exhaustive minimizer over a power grid.
    
    For the constant regime every schedule ``[mu]*k`` is searched; for the dynamic regime every schedule
    ``[power_cap]*(k-1) + [mu]``. Points missing the target are discarded. Ties go to the smaller ``k``, then the
    smaller power. 
    
    Args:
        cfg (NetworkConfig): network
        power_grid_size (int, optional): grid resolution. Default: ``10000``
        k_range (iterable, optional): slot counts to search. Default: ``1..slot_cap``
        regime (Regime, optional): schedule family. Default: constant
        
    Raises:
        Infeasible: no grid point meets the constraints
    """
    regime = parse_enum(Regime, regime)
    if k_range is None:
        k_range = range(1, cfg.slot_cap + 1)
    ks = np.array([k for k in k_range if 1 <= k <= cfg.slot_cap], dtype=np.int64)
    grid = power_grid(cfg, power_grid_size)
    q = np.asarray(analytic.fresh_probability(cfg, grid, Mode.BROADCAST))
    q_bar = max_fresh_probability(cfg)
    best = None
    for k in ks:
        if regime == Regime.CONSTANT:
            ratio = 1 - analytic.uncovered_fraction(q, k)
            f = cfg.n_mu*(k*q - ratio)
        else:
            before = 1 - analytic.uncovered_fraction(q_bar, k - 1)
            head = cfg.n_mu*((k - 1)*q_bar - before)  # redundancy of the capped slots
            ratio = before + (1 - before)*q
            f = head + cfg.n_mu*q*before
        f = np.maximum(f, 0.0)
        feasible = np.flatnonzero(ratio >= cfg.target_ratio)
        if feasible.size == 0:
            continue
        i = feasible[np.argmin(f[feasible])]  # argmin returns the first, i.e. smallest power
        if best is None or f[i] < best[0]:
            best = (f[i], int(k), float(grid[i]))
    if best is None:
        raise Infeasible(f'no grid point of {power_grid_size} powers and slots {ks.min() if ks.size else "-"}..'
                         f'{ks.max() if ks.size else "-"} meets the target {cfg.target_ratio}', constraint='grid')
    _, k, mu = best
    powers = [mu]*k if regime == Regime.CONSTANT else [cfg.power_cap]*(k - 1) + [mu]
    return _result(cfg, regime, powers)
