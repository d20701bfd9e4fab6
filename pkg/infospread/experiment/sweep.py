import numpy as np

from infospread.errors import InfospreadError
from infospread.network import NetworkConfig
from infospread.optimizer import solve_constant
from infospread.utils import Seeder
from .config import Config
from .config import Sample


def sweep_items(base, rng):
    r"""Random perturbations of ``base``: node counts scaled by factors in ``[0.5, 2]``, target SIR in
    ``[0.5, 4]``, target ratio in ``[0.5, 0.95]`` and power cap log-uniform in ``[0.01, 0.5]``. 
    """
    def count(n):
        return Sample(lambda: max(1, int(round(n*rng.uniform(0.5, 2.0)))))
    
    return {'network.n_bs': count(base.n_bs), 
            'network.n_mu': count(base.n_mu), 
            'network.n_src': count(base.n_src), 
            'network.area': base.area, 
            'network.alpha': base.alpha, 
            'network.slot_cap': base.slot_cap, 
            'network.beta': Sample(lambda: float(rng.uniform(0.5, 4.0))), 
            'network.target_ratio': Sample(lambda: float(rng.uniform(0.5, 0.95))), 
            'network.power_cap': Sample(lambda: float(np.exp(rng.uniform(np.log(0.01), np.log(0.5)))))}


def to_network(item):
    return NetworkConfig(**{key.split('.', 1)[1]: value for key, value in item.items() if key.startswith('network.')})


def optimizer_sweep(n=20, seed=0, base=NetworkConfig(), max_draws=100):
    r"""Draws ``n`` random feasible networks around ``base``.
    
    Candidates are drawn in batches from a :class:`Config` of :class:`Sample` items; a candidate is kept when
    :func:`solve_constant` succeeds on it (target reachable within the caps, positive denominator). 
    
    Args:
        n (int, optional): number of networks. Default: ``20``
        seed (int, optional): root seed, the same seed gives the same networks. Default: ``0``
        base (NetworkConfig, optional): network to perturb. Default: the reference deployment
        max_draws (int, optional): candidates per requested network before giving up. Default: ``100``
        
    Returns:
        list: ``n`` feasible :class:`NetworkConfig`
    """
    assert n >= 1, f'expected a positive sweep size, got {n}'
    rng = Seeder(seed).generator(0)
    config = Config(sweep_items(base, rng), num_sample=n)
    networks = []
    for _ in range(max_draws):
        for item in config.make_configs():
            cfg = to_network(item)
            try:
                solve_constant(cfg)
            except InfospreadError:
                continue
            networks.append(cfg)
            if len(networks) == n:
                return networks
    raise RuntimeError(f'only {len(networks)} of {n} random networks were feasible after {max_draws} batches')
