from dataclasses import dataclass

import numpy as np

from infospread.analytic import idle_probability
from infospread.network import Mode
from infospread.network import parse_enum
from .world import Metric
from .world import Uplink
from .world import distances
from .world import uniform_points


@dataclass(frozen=True)
class SlotRecord:
    r"""Outcome of one slot.
    
    Attributes:
        m (int): MUs whose SIR reached the threshold (eligible receivers only)
        m_hat (int): how many of those were already covered
        n (int): covered MUs at the end of the slot
    """
    m: int
    m_hat: int
    n: int
    
    @property
    def fresh(self):
        return self.m - self.m_hat


def uplink_activity(world, cfg, uplink, p_idle=None):
    r"""Draws which MUs are busy with the cellular uplink and where uplink interferers are.
    
    With the analysis-matched uplink the interferers form a Poisson field of BS density over a square
    ``world.interference_window`` times wider than the network; beyond the network square distances are
    plain Euclidean. 
    
    Returns:
        tuple: ``(busy, interferers, metric)``, a boolean mask over MUs, an ``(n, 2)`` array of positions and the
        metric for receiver-to-interferer distances
    """
    rng = world.rng
    if uplink == Uplink.ANALYSIS:
        if p_idle is None:
            p_idle = idle_probability(cfg) if cfg.n_bs > 0 and cfg.n_mu > 0 else 1.0
        busy = rng.random(world.n_mu) < 1.0 - p_idle
        window = world.interference_window
        count = rng.poisson(cfg.n_bs*window**2)
        interferers = uniform_points(rng, count, window*world.side) - (window - 1)*world.side/2
        return busy, interferers, world.metric if window == 1 else Metric.BOUNDED
    busy = np.zeros(world.n_mu, dtype=bool)
    if world.n_mu > 0 and len(world.bs_positions) > 0:
        cell = distances(world.mu_positions, world.bs_positions, world.side, world.metric).argmin(1)
        for b in range(len(world.bs_positions)):
            members = np.flatnonzero(cell == b)
            if members.size > 0:
                busy[rng.choice(members)] = True
    return busy, world.mu_positions[busy], world.metric


def _path_gain(d, alpha):
    with np.errstate(divide='ignore'):
        return d**(-alpha)


def broadcast_success(world, cfg, mu, receivers, interferers, cell_metric=None):
    r"""Boolean success per receiver decoding its nearest source. """
    rng = world.rng
    n_src = len(world.src_positions)
    if receivers.size == 0 or n_src == 0:
        return np.zeros(receivers.size, dtype=bool)
    positions = world.mu_positions[receivers]
    d_src = distances(positions, world.src_positions, world.side, world.metric)
    power = mu*rng.exponential(1.0, size=d_src.shape)*_path_gain(d_src, cfg.alpha)
    serving = d_src.argmin(1)  # ties go to the lowest index
    signal = power[np.arange(len(positions)), serving]
    interference = power.sum(1) - signal
    if len(interferers) > 0:
        d_cell = distances(positions, interferers, world.side, cell_metric or world.metric)
        interference = interference + (rng.exponential(1.0, size=d_cell.shape)*_path_gain(d_cell, cfg.alpha)).sum(1)
    with np.errstate(divide='ignore', invalid='ignore'):
        sir = signal/interference
    return sir >= cfg.beta


def unicast_success(world, cfg, mu, idle, interferers, cell_metric=None):
    r"""Indices of MUs reached by unicast: each source targets its nearest MU, idle or not. """
    rng = world.rng
    n_src = len(world.src_positions)
    if world.n_mu == 0 or n_src == 0:
        return np.zeros(0, dtype=np.int64)
    targets = distances(world.src_positions, world.mu_positions, world.side, world.metric).argmin(1)
    positions = world.mu_positions[targets]
    d_src = distances(positions, world.src_positions, world.side, world.metric)
    power = mu*rng.exponential(1.0, size=d_src.shape)*_path_gain(d_src, cfg.alpha)
    signal = power[np.arange(n_src), np.arange(n_src)]
    interference = power.sum(1) - signal
    if len(interferers) > 0:
        d_cell = distances(positions, interferers, world.side, cell_metric or world.metric)
        interference = interference + (rng.exponential(1.0, size=d_cell.shape)*_path_gain(d_cell, cfg.alpha)).sum(1)
    with np.errstate(divide='ignore', invalid='ignore'):
        sir = signal/interference
    ok = (sir >= cfg.beta) & idle[targets]
    return np.unique(targets[ok])


def run_slot(world, cfg, mu, mode, uplink=Uplink.ANALYSIS, p_idle=None):
    r"""Simulates one transmission slot.
    
    Uplink activity is drawn first; busy MUs cannot receive. Fading is Rayleigh, redrawn per link and slot. In
    broadcast mode every idle MU decodes its nearest source with the other sources and the uplink
    interferers as interference. In unicast mode each source serves only its nearest MU. Every MU whose SIR
    reaches ``beta`` becomes covered. 
    
    Args:
        world (SimWorld): world, modified in place
        cfg (NetworkConfig): network
        mu (float): source transmit power
        mode (Mode): unicast or broadcast
        uplink (Uplink, optional): uplink activity model. Default: analysis-matched
        p_idle (float, optional): idle probability override for the analysis-matched uplink
        
    Returns:
        tuple: ``(world, record)``
    """
    assert mu > 0, f'expected positive transmit power, got {mu}'
    mode = parse_enum(Mode, mode)
    busy, interferers, cell_metric = uplink_activity(world, cfg, parse_enum(Uplink, uplink), p_idle)
    idle = ~busy
    if mode == Mode.BROADCAST:
        receivers = np.flatnonzero(idle)
        reached = receivers[broadcast_success(world, cfg, mu, receivers, interferers, cell_metric)]
    else:
        reached = unicast_success(world, cfg, mu, idle, interferers, cell_metric)
    m_hat = int(world.covered[reached].sum())
    world.covered[reached] = True
    world.slot += 1
    return world, SlotRecord(m=int(reached.size), m_hat=m_hat, n=world.n_covered)
