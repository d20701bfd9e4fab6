import warnings

import pytest

import numpy as np
from scipy import stats as scipy_stats

from infospread import SEEDS
from infospread import InsufficientData
from infospread import Mode
from infospread import NetworkConfig
from infospread.analytic import coverage_curve
from infospread.analytic import fresh_probability
from infospread.simulator import Metric
from infospread.simulator import Mobility
from infospread.simulator import SimSettings
from infospread.simulator import TrialStats
from infospread.simulator import Uplink
from infospread.simulator import distances
from infospread.simulator import homogeneity_diagnostics
from infospread.simulator import place_nodes
from infospread.simulator import reflect
from infospread.simulator import renew_sources
from infospread.simulator import run_experiment
from infospread.simulator import run_slot
from infospread.simulator import step_mobility
from infospread.simulator import travel
from infospread.simulator import wrap
from infospread.simulator.diagnostics import _z
from infospread.simulator.runner import resolve_powers
from infospread.simulator.slot import uplink_activity


def _uniformity_pvalue(positions, side, bins=10):
    counts, _, _ = np.histogram2d(positions[:, 0], positions[:, 1], bins=bins, range=[[0, side], [0, side]])
    return scipy_stats.chisquare(counts.ravel()).pvalue


def test_sim_settings():
    settings = SimSettings(metric='bounded', uplink='structural')
    assert settings.metric == Metric.BOUNDED
    assert settings.uplink == Uplink.STRUCTURAL
    assert SimSettings().step_length == 3000.0
    with pytest.raises(ValueError):
        SimSettings(speed=-1.0)
    with pytest.raises(ValueError):
        SimSettings(metric='sphere')
    with pytest.raises(ValueError):
        SimSettings(interference_window=0.5)
    with pytest.raises(ValueError):
        SimSettings(source_survival=1.5)
    with pytest.raises(ValueError):
        SimSettings(flight_scale=0.0)


def test_distances():
    a = np.array([[1.0, 1.0]])
    b = np.array([[1999.0, 1.0], [1.0, 4.0]])
    assert np.allclose(distances(a, b, 2000.0, Metric.TORUS), [[2.0, 3.0]])
    assert np.allclose(distances(a, b, 2000.0, Metric.BOUNDED), [[1998.0, 3.0]])
    assert distances(a, np.zeros((0, 2)), 2000.0).shape == (1, 0)


def test_place_nodes():
    cfg = NetworkConfig()
    settings = SimSettings(poisson_sources=False)
    world = place_nodes(cfg, SEEDS[0], settings)
    assert world.mu_positions.shape == (400, 2)
    assert world.src_positions.shape == (4, 2)
    assert world.bs_positions.shape == (8, 2)
    assert world.n_covered == 0
    for positions in [world.mu_positions, world.src_positions, world.bs_positions]:
        assert np.all((positions >= 0) & (positions <= cfg.side))
    
    again = place_nodes(cfg, SEEDS[0], settings)
    assert np.array_equal(world.mu_positions, again.mu_positions)
    assert np.array_equal(world.bs_positions, again.bs_positions)
    other = place_nodes(cfg, SEEDS[1], settings)
    assert not np.array_equal(world.mu_positions, other.mu_positions)
    
    counts = [len(place_nodes(cfg, seed).src_positions) for seed in range(200)]
    assert len(set(counts)) > 1
    assert abs(np.mean(counts) - 4) < 4*np.sqrt(4/200)
    
    assert world.src_rate is None
    assert place_nodes(cfg, SEEDS[0]).src_rate == 4.0
    assert place_nodes(cfg, SEEDS[0]).max_flight == cfg.side
    
    empty = place_nodes(cfg.replace(n_mu=0), SEEDS[0])
    assert empty.n_mu == 0
    
    
def test_placement_is_uniform():
    cfg = NetworkConfig(n_mu=10000)
    positions = place_nodes(cfg, SEEDS[2]).mu_positions
    # the mean of U(0, L) has standard error L/sqrt(12 n)
    se = cfg.side/np.sqrt(12*len(positions))
    assert np.all(np.abs(positions.mean(0) - cfg.side/2) < 3*se)
    assert _uniformity_pvalue(positions, cfg.side) > 0.001


def test_reflect():
    side = 10.0
    x = np.array([-3.0, 0.0, 4.0, 10.0, 13.0, 27.0, -21.0])
    assert np.allclose(reflect(x, side), [3.0, 0.0, 4.0, 10.0, 7.0, 7.0, 1.0])
    inside = np.linspace(0, side, 11)
    assert np.array_equal(reflect(inside, side), inside)


def test_step_mobility():
    cfg = NetworkConfig(n_mu=10000)
    
    world = place_nodes(cfg, SEEDS[3], SimSettings(speed=0.0))
    before = world.mu_positions.copy()
    step_mobility(world, Mobility.RANDOM_DIRECTION)
    assert np.allclose(world.mu_positions, before)
    
    world = place_nodes(cfg, SEEDS[3], SimSettings(speed=5.0, slot_period=600.0))
    bs = world.bs_positions.copy()
    before = world.mu_positions.copy()
    assert world.speed*world.slot_period >= np.sqrt(2)*cfg.side
    step_mobility(world, 'random_direction')
    assert np.all((world.mu_positions >= 0) & (world.mu_positions <= cfg.side))
    assert np.array_equal(world.bs_positions, bs)
    assert not np.allclose(world.mu_positions, before)
    assert _uniformity_pvalue(world.mu_positions, cfg.side) > 0.001
    
    step_mobility(world, Mobility.IID)
    assert _uniformity_pvalue(world.mu_positions, cfg.side) > 0.001
    assert np.array_equal(world.bs_positions, bs)
    
    # a short step stays close
    world = place_nodes(cfg, SEEDS[3], SimSettings(speed=0.05))
    before = world.mu_positions.copy()
    step_mobility(world, Mobility.RANDOM_DIRECTION)
    delta = np.abs(world.mu_positions - before)
    delta = np.minimum(delta, cfg.side - delta)
    assert np.all(np.linalg.norm(delta, axis=1) <= 30.0 + 1e-9)
    
    world = place_nodes(cfg, SEEDS[3], SimSettings(metric='bounded'))
    step_mobility(world, Mobility.RANDOM_DIRECTION)
    assert np.all((world.mu_positions >= 0) & (world.mu_positions <= cfg.side))


def test_wrap():
    side = 10.0
    x = np.array([-3.0, 0.0, 4.0, 13.0, 27.0])
    assert np.allclose(wrap(x, side), [7.0, 0.0, 4.0, 3.0, 7.0])


def test_travel():
    side = 2000.0
    rng = np.random.default_rng(SEEDS[12])
    start = np.full((10000, 2), side/2)
    
    # one straight flight: every end point lies on a circle around the start
    end, heading = travel(rng, start, 300.0, np.inf, side)
    assert np.allclose(np.linalg.norm(end - start, axis=1), 300.0)
    assert np.allclose(end, start + 300.0*np.stack([np.cos(heading), np.sin(heading)], axis=-1))
    end, _ = travel(rng, start, 3000.0, np.inf, side, border=wrap)
    assert _uniformity_pvalue(end, side) < 0.001
    
    # turning after flights of random length spreads the end points over the whole torus
    end, _ = travel(rng, start, 3000.0, side, side, border=wrap)
    assert np.all((end >= 0) & (end <= side))
    assert _uniformity_pvalue(end, side) > 0.001
    
    # the path is never longer than the distance
    end, _ = travel(rng, start, 500.0, 100.0, side)
    assert np.all(np.linalg.norm(end - start, axis=1) <= 500.0 + 1e-9)
    assert np.linalg.norm(end - start, axis=1).mean() < 400.0
    
    end, _ = travel(rng, start, 0.0, side, side)
    assert np.array_equal(end, start)
    end, heading = travel(rng, np.zeros((0, 2)), 3000.0, side, side)
    assert end.shape == (0, 2) and heading.shape == (0,)


def test_renew_sources():
    cfg = NetworkConfig()
    world = place_nodes(cfg, SEEDS[13], SimSettings(source_survival=0.0))
    counts = []
    for _ in range(2000):
        renew_sources(world)
        assert len(world.src_heading) == len(world.src_positions)
        counts.append(len(world.src_positions))
    # Poisson counts: mean and variance both n_src
    assert abs(np.mean(counts) - 4) < 4*np.sqrt(4/2000)
    assert abs(np.var(counts) - 4) < 0.5
    
    world = place_nodes(cfg, SEEDS[13], SimSettings(source_survival=1.0))
    before = world.src_positions.copy()
    renew_sources(world)
    assert np.array_equal(world.src_positions, before)
    
    # half of the sources carry over, the count stays Poisson
    world = place_nodes(cfg, SEEDS[13], SimSettings(source_survival=0.5))
    counts = []
    for _ in range(2000):
        step_mobility(world, Mobility.IID)
        counts.append(len(world.src_positions))
    # consecutive counts are correlated, the variance of the mean triples
    assert abs(np.mean(counts) - 4) < 4*np.sqrt(3*4/2000)
    
    world = place_nodes(cfg, SEEDS[13], SimSettings(poisson_sources=False))
    for _ in range(5):
        step_mobility(world, Mobility.RANDOM_DIRECTION)
        assert len(world.src_positions) == cfg.n_src


@pytest.mark.parametrize('mode', [Mode.UNICAST, Mode.BROADCAST])
def test_zero_threshold(mode):
    cfg = NetworkConfig(beta=0.0)
    world = place_nodes(cfg, SEEDS[4], SimSettings(poisson_sources=False))
    world, record = run_slot(world, cfg, 0.064, mode, p_idle=1.0)
    if mode == Mode.BROADCAST:
        assert record.m == record.n == cfg.n_mu
    else:
        targets = distances(world.src_positions, world.mu_positions, world.side).argmin(1)
        assert record.m == record.n == len(set(targets))
    assert record.m_hat == 0
    world, record = run_slot(world, cfg, 0.064, mode, p_idle=1.0)
    assert record.m_hat == record.m


def test_single_interferer():
    # one receiver, its serving source and one interfering source, no cellular uplink
    cfg = NetworkConfig(n_bs=0, n_mu=1, n_src=2, beta=1.0)
    world = place_nodes(cfg, SEEDS[5], SimSettings(poisson_sources=False))
    world.mu_positions[:] = [[100.0, 100.0]]
    world.src_positions[:] = [[150.0, 100.0], [200.0, 100.0]]
    slots = 4000
    successes = sum(run_slot(world, cfg, 0.064, Mode.BROADCAST, p_idle=1.0)[1].m for _ in range(slots))
    # P[h1 d1^-4 >= beta h2 d2^-4] for unit exponentials
    expected = 1/(1 + cfg.beta*(50.0/100.0)**4)
    se = np.sqrt(expected*(1 - expected)/slots)
    assert abs(successes/slots - expected) < 4*se


def test_resolve_powers():
    assert np.array_equal(resolve_powers(0.064, 3), [0.064]*3)
    assert np.array_equal(resolve_powers([0.01, 0.02], None), [0.01, 0.02])
    with pytest.raises(AssertionError):
        resolve_powers([0.01, 0.02], 3)
    with pytest.raises(AssertionError):
        resolve_powers(0.0, 2)
    assert np.array_equal(resolve_powers([0.01, 0.064], 2, power_cap=0.064), [0.01, 0.064])
    with pytest.raises(AssertionError):
        resolve_powers(0.1, 2, power_cap=0.064)
    with pytest.raises(AssertionError):
        run_experiment(NetworkConfig(), [0.064, 0.07], 'broadcast', 'iid', k_max=None, trials=1, seed=0)


def test_run_experiment_determinism(tmp_path):
    cfg = NetworkConfig()
    kwargs = dict(mode='broadcast', mobility='random_direction', k_max=6, trials=23, seed=SEEDS[6], block_size=7)
    stats = run_experiment(cfg, 0.064, **kwargs)
    assert isinstance(stats, TrialStats)
    assert stats.m.shape == (23, 6) and stats.trials == 23 and stats.k_max == 6
    assert np.all(stats.m_hat <= stats.m)
    assert np.all(np.diff(stats.n, axis=1) >= 0)
    assert np.all(stats.n <= cfg.n_mu)
    assert np.array_equal(stats.redundant_receptions, np.cumsum(stats.m_hat, 1))
    assert np.array_equal(stats.n[:, 0], stats.m[:, 0])
    
    again = run_experiment(cfg, 0.064, **kwargs)
    parallel = run_experiment(cfg, 0.064, workers=2, **kwargs)
    for key in ['m', 'm_hat', 'n']:
        assert np.array_equal(getattr(stats, key), getattr(again, key))
        assert np.array_equal(getattr(stats, key), getattr(parallel, key))
    
    single = run_experiment(cfg, 0.064, 'broadcast', 'iid', k_max=1, trials=1, seed=SEEDS[6])
    assert single.m.shape == (1, 1)
    assert np.array_equal(single.m, run_experiment(cfg, 0.064, 'broadcast', 'iid', 1, 1, SEEDS[6]).m)
    
    f = stats.save(tmp_path/'stats')
    loaded = TrialStats.load(f)
    assert f.suffix == '.pkl'
    assert np.array_equal(loaded.n, stats.n)
    assert loaded.cfg == cfg and loaded.mode == Mode.BROADCAST


def test_empty_network():
    stats = run_experiment(NetworkConfig(n_mu=0), 0.064, 'broadcast', 'iid', k_max=3, trials=5, seed=0)
    assert np.all(stats.m == 0) and np.all(stats.n == 0)
    with pytest.raises(InsufficientData):
        homogeneity_diagnostics(stats, min_trials=1)
        
        
def test_schedule_experiment():
    cfg = NetworkConfig()
    stats = run_experiment(cfg, [0.064, 0.01, 0.03], 'broadcast', 'iid', k_max=None, trials=10, seed=1)
    assert stats.k_max == 3
    assert np.array_equal(stats.powers, [0.064, 0.01, 0.03])


@pytest.mark.parametrize('mode', [Mode.BROADCAST, Mode.UNICAST])
def test_fresh_coverage_probability(mode):
    cfg = NetworkConfig()
    trials = 3000
    stats = run_experiment(cfg, 0.064, mode, 'iid', k_max=1, trials=trials, seed=SEEDS[7])
    m = stats.summary('m')
    expected = cfg.n_mu*fresh_probability(cfg, 0.064, mode)
    assert abs(m.mean[0] - expected) < 4*m.se[0]
    
    
def test_structural_uplink():
    cfg = NetworkConfig()
    settings = SimSettings(uplink='structural', metric='bounded')
    stats = run_experiment(cfg, 0.064, 'broadcast', 'random_direction', k_max=5, trials=50, seed=2, 
                           settings=settings)
    assert np.all(stats.m_hat <= stats.m)
    assert stats.n[:, -1].mean() > 0


@pytest.mark.parametrize('mobility', [Mobility.IID, Mobility.RANDOM_DIRECTION])
@pytest.mark.parametrize('mode', [Mode.BROADCAST, Mode.UNICAST])
def test_coverage_curve_regression(mode, mobility):
    cfg = NetworkConfig()
    analytic = coverage_curve(cfg, 0.064, Mode.BROADCAST, 80)
    k_max = analytic.first_slot_reaching(0.95)
    curve = coverage_curve(cfg, 0.064, mode, k_max)
    stats = run_experiment(cfg, 0.064, mode, mobility, k_max, trials=500, seed=SEEDS[8])
    assert np.all(np.abs(stats.summary('ratio').mean - curve.ratios) <= 0.03)
    # the first slot sees a Poisson source field, as the closed form assumes
    m = stats.summary('m')
    assert abs(m.mean[0] - cfg.n_mu*curve.q) < 4*m.se[0]


def test_source_field_changes_between_slots():
    cfg = NetworkConfig()
    world = place_nodes(cfg, SEEDS[14])
    counts = {len(world.src_positions)}
    for _ in range(30):
        step_mobility(world, Mobility.RANDOM_DIRECTION)
        counts.add(len(world.src_positions))
    assert len(counts) > 1


@pytest.mark.parametrize('mobility, speed', [(Mobility.IID, 5.0), (Mobility.RANDOM_DIRECTION, 5.0)])
def test_homogeneous_condition_holds(mobility, speed):
    cfg = NetworkConfig()
    stats = run_experiment(cfg, 0.064, 'broadcast', mobility, k_max=12, trials=1000, seed=SEEDS[9], 
                           settings=SimSettings(speed=speed))
    report = homogeneity_diagnostics(stats)
    assert report.z_first.shape == report.z_second.shape == (12,)
    assert np.allclose(report.expected_m, cfg.n_mu*fresh_probability(cfg, 0.064, Mode.BROADCAST))
    assert np.all(report.valid_trials > 0)
    assert report.holds(threshold=4.0)
    assert report.violations(threshold=4.0).size == 0
    
    with pytest.raises(AssertionError):
        homogeneity_diagnostics(stats, min_trials=5000)


def test_homogeneous_condition_fails_at_low_speed():
    cfg = NetworkConfig()
    stats = run_experiment(cfg, 0.064, 'broadcast', 'random_direction', k_max=10, trials=300, seed=SEEDS[10], 
                           settings=SimSettings(speed=0.05))
    report = homogeneity_diagnostics(stats, min_trials=100)
    assert np.abs(report.z_second).max() > 3
    assert report.violations().size > 0
    # covered MUs stay around the surviving slow sources
    assert np.all(report.mean_conditional[1:] >= report.mean_previous[1:])


def test_homogeneity_report():
    cfg = NetworkConfig()
    stats = run_experiment(cfg, 0.064, 'broadcast', 'iid', k_max=3, trials=20, seed=SEEDS[15])
    report = homogeneity_diagnostics(stats, min_trials=1)
    assert report.valid_trials.shape == (3,)
    assert np.array_equal(report.valid_trials, (stats.m > 0).sum(0))
    assert np.all(report.valid_trials <= 20)
    assert np.all(np.isfinite(report.z_first)) and np.all(np.isfinite(report.z_second))


def test_z_scores():
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        z = _z(np.array([0.0, 1.0, -2.0, 0.0, 3.0]), np.array([0.0, 0.0, 0.0, 2.0, 1.5]))
    assert np.array_equal(z, [0.0, np.inf, -np.inf, 0.0, 2.0])


@pytest.mark.slow
@pytest.mark.parametrize('mode, mobility', [(Mode.BROADCAST, Mobility.RANDOM_DIRECTION), 
                                            (Mode.UNICAST, Mobility.RANDOM_DIRECTION), 
                                            (Mode.BROADCAST, Mobility.IID)])
def test_coverage_curve_full_scale(mode, mobility):
    cfg = NetworkConfig()
    k_max = coverage_curve(cfg, 0.064, Mode.BROADCAST, 80).first_slot_reaching(0.95)
    curve = coverage_curve(cfg, 0.064, mode, k_max)
    stats = run_experiment(cfg, 0.064, mode, mobility, k_max, trials=10000, seed=SEEDS[16], workers=4)
    assert np.all(np.abs(stats.summary('ratio').mean - curve.ratios) <= 0.03)


@pytest.mark.slow
@pytest.mark.parametrize('mobility', [Mobility.IID, Mobility.RANDOM_DIRECTION])
def test_homogeneous_condition_full_scale(mobility):
    cfg = NetworkConfig()
    stats = run_experiment(cfg, 0.064, 'broadcast', mobility, k_max=10, trials=10000, seed=SEEDS[17], workers=4)
    report = homogeneity_diagnostics(stats)
    assert report.holds(threshold=3.0)
    assert report.violations(threshold=3.0).size == 0


def test_interference_window():
    cfg = NetworkConfig()
    world = place_nodes(cfg, SEEDS[11], SimSettings(interference_window=3.0))
    assert world.interference_window == 3.0
    counts = []
    for _ in range(200):
        busy, interferers, metric = uplink_activity(world, cfg, Uplink.ANALYSIS)
        assert metric == Metric.BOUNDED
        assert np.all((interferers >= -world.side) & (interferers <= 2*world.side))
        counts.append(len(interferers))
    assert abs(np.mean(counts) - 9*cfg.n_bs) < 4*np.sqrt(9*cfg.n_bs/200)
    
    bounded = place_nodes(cfg, SEEDS[11], SimSettings(metric='bounded', interference_window=3.0))
    assert bounded.interference_window == 1.0
    _, interferers, metric = uplink_activity(bounded, cfg, Uplink.ANALYSIS)
    assert metric == Metric.BOUNDED
    assert np.all((interferers >= 0) & (interferers <= bounded.side))
    
    _, interferers, metric = uplink_activity(world, cfg, Uplink.STRUCTURAL)
    assert metric == Metric.TORUS
    assert len(interferers) <= cfg.n_bs
