from concurrent.futures import ProcessPoolExecutor

import numpy as np

from infospread.analytic import idle_probability
from infospread.network import Mode
from infospread.network import parse_enum
from infospread.utils import CloudpickleWrapper
from infospread.utils import Seeder
from .mobility import step_mobility
from .slot import run_slot
from .stats import TrialStats
from .world import Mobility
from .world import SimSettings
from .world import place_nodes


def resolve_powers(mu_or_schedule, k_max=None, power_cap=None):
    r"""A constant power repeated ``k_max`` times, or a schedule whose length fixes ``k_max``. 
    
    Every power must lie in ``(0, power_cap]``. 
    """
    powers = np.atleast_1d(np.asarray(mu_or_schedule, dtype=np.float64))
    if powers.size == 1 and k_max is not None:
        powers = np.full(k_max, powers[0])
    assert k_max is None or powers.size == k_max, f'schedule of length {powers.size} for {k_max} slots'
    assert np.all(powers > 0), f'expected positive powers, got {powers}'
    assert power_cap is None or np.all(powers <= power_cap), f'powers {powers} exceed the power cap {power_cap}'
    return powers


def run_trial(cfg, powers, mode, mobility, settings, seed, rng):
    r"""One trial drawing only from ``rng``. Returns per-slot ``(m, m_hat, n)`` arrays. """
    world = place_nodes(cfg, seed, settings, rng=rng)
    p_idle = idle_probability(cfg) if cfg.n_bs > 0 and cfg.n_mu > 0 else 1.0
    out = np.zeros((3, len(powers)), dtype=np.int64)
    for t, mu in enumerate(powers):
        if t > 0:
            step_mobility(world, mobility)
        world, record = run_slot(world, cfg, mu, mode, settings.uplink, p_idle)
        out[:, t] = record.m, record.m_hat, record.n
    return out


def _run_block(job):
    cfg, powers, mode, mobility, settings, seed, indices = job
    rngs = Seeder(seed).spawn(len(indices), start=indices.start)
    out = np.stack([run_trial(cfg, powers, mode, mobility, settings, seed, rng) for rng in rngs])
    return out[:, 0], out[:, 1], out[:, 2]


def run_experiment(cfg, mu_or_schedule, mode, mobility, k_max, trials, seed, 
                   settings=SimSettings(), workers=None, block_size=250):
    r"""Runs independent Monte Carlo trials and aggregates their per-slot tallies.
    
    Trial ``i`` draws only from child stream ``i`` of ``seed`` (see :class:`Seeder`), and blocks of trials are
    collected in index order, so the result is bit-identical for any ``workers``. 
    
    Args:
        cfg (NetworkConfig): network
        mu_or_schedule (float/list): constant power or per-slot powers in ``(0, cfg.power_cap]``
        mode (Mode): unicast or broadcast
        mobility (Mobility): mobility model
        k_max (int): number of slots (``None`` takes the schedule length)
        trials (int): number of trials
        seed (int): root seed
        settings (SimSettings, optional): speed, slot period, metric, uplink
        workers (int, optional): process count. If ``None``, trials run serially. 
        block_size (int, optional): trials per job. Default: ``250``
        
    Returns:
        TrialStats: per-trial tallies
    """
    assert trials >= 1, f'expected at least one trial, got {trials}'
    mode = parse_enum(Mode, mode)
    mobility = parse_enum(Mobility, mobility)
    powers = resolve_powers(mu_or_schedule, k_max, cfg.power_cap)
    jobs = [(cfg, powers, mode, mobility, settings, seed, range(start, min(start + block_size, trials))) 
            for start in range(0, trials, block_size)]
    if workers is None or workers <= 1:
        blocks = [_run_block(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as executor:
            blocks = list(executor.map(CloudpickleWrapper(_run_block), jobs))
    return TrialStats.stack(blocks, cfg=cfg, mode=mode, mobility=mobility, settings=settings, 
                            powers=powers, seed=seed)
