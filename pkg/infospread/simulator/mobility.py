import numpy as np

from infospread.network import parse_enum
from .world import Metric
from .world import Mobility
from .world import renew_sources
from .world import uniform_points


def reflect(x, side):
    r"""Folds coordinates back into ``[0, side]`` by specular reflection at the borders.

    Points already inside are returned unchanged.
    """
    y = np.mod(x, 2*side)
    return np.where(y > side, 2*side - y, y)


def wrap(x, side):
    r"""Wraps coordinates around the torus ``[0, side)``. """
    return np.mod(x, side)


def travel(rng, positions, distance, max_flight, side, border=reflect):
    r"""Random direction travel of ``distance`` meters per node.

    Each node flies along a uniform heading for a length uniform on ``[0, max_flight]``, then turns to a fresh
    heading, until it has covered ``distance``. The last flight is cut short. With an infinite ``max_flight`` the
    whole distance is one straight flight.

    Args:
        rng (Generator): random stream
        positions (ndarray): ``(n, 2)`` start positions
        distance (float): path length traveled by every node
        max_flight (float): longest flight
        side (float): side of the square
        border (callable, optional): border policy, :func:`reflect` or :func:`wrap`

    Returns:
        tuple: end positions and the heading of the last flight of each node
    """
    n = len(positions)
    remaining = np.full(n, float(distance))
    heading = rng.uniform(0.0, 2*np.pi, size=n)
    while np.any(remaining > 0):
        if np.isinf(max_flight):
            flight = remaining
        else:
            flight = np.minimum(rng.uniform(0.0, max_flight, size=n), remaining)
        positions = border(positions + flight[:, None]*np.stack([np.cos(heading), np.sin(heading)], axis=-1), side)
        remaining = remaining - flight
        turning = remaining > 0
        heading = np.where(turning, rng.uniform(0.0, 2*np.pi, size=n), heading)
    return positions, heading


def step_mobility(world, model):
    r"""Moves mobile users and sources for one slot period, then renews a Poisson source field.

    * ``IID``: every position is redrawn uniformly, independently of the previous one.
    * ``RANDOM_DIRECTION``: every node draws a fresh uniform heading and travels ``speed * slot_period`` meters
      in flights of random length, turning to a fresh heading after each flight (see :func:`travel`). Nodes
      wrap around the torus metric and reflect off the borders of the bounded square.

    Base stations stay put.

    Args:
        world (SimWorld): world, modified in place
        model (Mobility): mobility model

    Returns:
        SimWorld: the same world
    """
    model = parse_enum(Mobility, model)
    rng = world.rng
    if model == Mobility.IID:
        world.mu_positions = uniform_points(rng, world.n_mu, world.side)
        world.src_positions = uniform_points(rng, len(world.src_positions), world.side)
    else:
        distance = world.speed*world.slot_period
        border = wrap if world.metric == Metric.TORUS else reflect
        world.mu_positions, world.mu_heading = travel(rng, world.mu_positions, distance, world.max_flight,
                                                      world.side, border)
        world.src_positions, world.src_heading = travel(rng, world.src_positions, distance, world.max_flight,
                                                        world.side, border)
    return renew_sources(world)
