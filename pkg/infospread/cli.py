r"""Command line: ``infospread {predict, verify, simulate, optimize}``.

Every command prints a report and writes a CSV (to ``--out`` or, without it, to standard output after the
report). With ``--out`` a YAML sidecar of the resolved configuration and summary is written next to the CSV. 
"""
import argparse
from io import StringIO
from pathlib import Path
import sys

import numpy as np
import pandas as pd

from . import analytic
from . import oracle
from . import optimizer
from .errors import ConfigError
from .errors import Infeasible
from .errors import InfospreadError
from .errors import OracleMismatch
from .experiment import ExperimentConfig
from .experiment import get_preset
from .experiment import optimizer_sweep
from .logger import Logger
from .network import Mode
from .network import Regime
from .network import db_to_linear
from .simulator import Mobility
from .simulator import homogeneity_diagnostics
from .simulator import run_experiment
from .utils import color_str
from .utils import color_verdict
from .utils import timed
from .utils import yaml_dump


# Largest relative deviation accepted between closed forms and quadrature
ORACLE_TOL = 1e-6
# Infinite z-scores are written as this magnitude, CSV cells stay finite
Z_CAP = 1e6
# Largest gap accepted between simulated and analytic covered ratios, up to the slot where the analytic
# broadcast curve reaches BAND_HORIZON
BAND_TOL = 0.03
BAND_HORIZON = 0.95


def write_csv(df, f=None):
    r"""Fixed column order, 9 significant digits, ``\n`` line ends. Returns the text. """
    numeric = df.select_dtypes(include=[np.number]).to_numpy(dtype=np.float64)
    assert np.all(np.isfinite(numeric)), 'refusing to write non-finite CSV cells'
    buffer = StringIO()
    df.to_csv(buffer, index=False, float_format='%.9g', lineterminator='\n')
    text = buffer.getvalue()
    if f is None:
        sys.stdout.write(text)
    else:
        Path(f).write_text(text)
    return text


def write_outputs(df, config, summary):
    if config.out is None:
        print()
        write_csv(df)
        return
    out = Path(config.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(df, out)
    yaml_dump({'config': config.to_dict(), 'summary': summary}, out.with_suffix(''), ext='.yml')
    print(color_str(f'Results written to {out}', 'cyan'))


def load_config(args):
    r"""Preset (or defaults), then the config file, then command-line overrides. """
    config = get_preset(args.preset) if args.preset is not None else ExperimentConfig()
    if args.config is not None:
        if not Path(args.config).is_file():
            raise ConfigError(f'no such file {args.config}', field='config')
        config = ExperimentConfig.load(args.config, base=config)
    network = {}
    if args.beta_db is not None:
        network['beta'] = db_to_linear(args.beta_db)
    if args.alpha is not None:
        network['alpha'] = args.alpha
    if network:
        config = config.replace(network=config.network.replace(**network))
    changes = {name: getattr(args, name) for name in ['mode', 'trials', 'seed', 'k_max', 'mu', 'out', 'workers', 'mobility', 'speed'] 
               if getattr(args, name, None) is not None}
    return config.replace(**changes) if changes else config


def cmd_predict(config):
    cfg = config.network
    curve = analytic.coverage_curve(cfg, config.mu, config.mode, config.k_max)
    logger = Logger()
    logger('mode', config.mode.value)
    logger('mu', config.mu)
    logger('p_idle', curve.p_idle)
    logger('p_suc', curve.p_suc)
    logger('fresh_probability', curve.q)
    logger('slot_reaching_target', curve.first_slot_reaching(cfg.target_ratio))
    logger('final_ratio', float(curve.ratios[-1]))
    logger.dump(border='-'*50, digits=9)
    df = pd.DataFrame({'k': curve.slots, 
                       'expected_covered': curve.per_slot_expected_covered, 
                       'ratio': curve.ratios, 
                       'redundancy': curve.redundancy})
    summary = logger.summary()
    write_outputs(df, config, summary)
    return 0


def cmd_verify(config, grid=oracle.VerifyGrid()):
    cfg = config.network
    analytic.require_closed_form(cfg)
    with timed('Verification took'):
        rows = oracle.verify_grid(cfg, grid)
    df = pd.DataFrame(rows)
    worst = df.loc[df['rel_dev'].idxmax()]
    verdict = 'PASS' if worst['rel_dev'] <= ORACLE_TOL else 'FAIL'
    logger = Logger()
    logger('points', len(df))
    for mode, group in df.groupby('mode', sort=False):
        logger(f'max_rel_dev_{mode}', float(group['rel_dev'].max()))
    logger('worst_point', f'{worst["mode"]} beta={worst["beta"]:g} mu={worst["mu"]:g} '
                          f'counts=({worst["n_bs"]}, {worst["n_mu"]}, {worst["n_src"]})')
    logger('tolerance', ORACLE_TOL)
    logger.dump(border='-'*50, digits=9)
    print(f'Verdict: {color_verdict(verdict)}')
    summary = logger.summary()
    summary['verdict'] = verdict
    write_outputs(df, config, summary)
    if verdict == 'FAIL':
        raise OracleMismatch(f'closed form and quadrature differ by {worst["rel_dev"]:.3g} > {ORACLE_TOL}')
    return 0


def cmd_simulate(config):
    cfg = config.network
    if config.mu > cfg.power_cap:
        raise ConfigError(f'transmit power {config.mu} exceeds the power cap {cfg.power_cap}', field='sim.mu')
    with timed('Simulation took'):
        stats = run_experiment(cfg, config.mu, config.mode, config.mobility, config.k_max, config.trials, 
                               config.seed, settings=config.settings, workers=config.workers)
    curve = oracle.coverage_curve_any(cfg, config.mu, config.mode, config.k_max)
    broadcast = curve if config.mode == Mode.BROADCAST else \
        oracle.coverage_curve_any(cfg, config.mu, Mode.BROADCAST, config.k_max)
    horizon = broadcast.first_slot_reaching(BAND_HORIZON) or config.k_max
    report = homogeneity_diagnostics(stats, min_trials=1)
    ratio = stats.summary('ratio')
    gap = np.abs(ratio.mean - curve.ratios)
    logger = Logger()
    logger('mode', config.mode.value)
    logger('mobility', config.mobility.value)
    logger('trials', stats.trials)
    logger('max_abs_gap', float(gap.max()))
    logger('band_horizon', horizon)
    logger('band_gap', float(gap[:horizon].max()))
    logger('max_abs_z_first', float(np.abs(report.z_first).max()))
    logger('max_abs_z_second', float(np.abs(report.z_second).max()))
    logger.dump(border='-'*50, digits=9)
    band = 'PASS' if logger.last('band_gap') <= BAND_TOL else 'FAIL'
    print(f'Analytic curve within ±{BAND_TOL} up to slot {horizon}: {color_verdict(band)}')
    verdict = 'PASS' if report.holds() else 'WARN'
    print(f'Homogeneous condition: {color_verdict(verdict)}')
    if stats.trials < 1000:
        print(color_str(f'Only {stats.trials} trials, z-scores are indicative', 'yellow'))
    df = pd.DataFrame({'k': stats.slots, 
                       'mean_ratio': ratio.mean, 
                       'se': ratio.se, 
                       'analytic_ratio': curve.ratios, 
                       'z_homog_1': np.clip(report.z_first, -Z_CAP, Z_CAP), 
                       'z_homog_2': np.clip(report.z_second, -Z_CAP, Z_CAP)})
    summary = logger.summary()
    summary['band'] = band
    summary['homogeneous'] = verdict
    write_outputs(df, config, summary)
    if config.out is not None:
        stats.save(Path(config.out).with_suffix('.pkl'))
    return 0


def _agrees(result, check, slack=1e-9):
    return result.k_star == check.k_star and \
        check.predicted_redundancy >= result.predicted_redundancy - slack*max(1.0, result.predicted_redundancy)


def _sweep_row(i, cfg, use_oracle, grid_size):
    constant = optimizer.solve_constant(cfg)
    dynamic = optimizer.solve_dynamic(cfg)
    row = {'ID': i, 'n_bs': cfg.n_bs, 'n_mu': cfg.n_mu, 'n_src': cfg.n_src, 'beta': cfg.beta, 
           'target_ratio': cfg.target_ratio, 'power_cap': cfg.power_cap, 
           'k_star': constant.k_star, 'mu_star': constant.mu_star, 'redundancy_constant': constant.predicted_redundancy, 
           'last_power': dynamic.last_power, 'redundancy_dynamic': dynamic.predicted_redundancy}
    if use_oracle:
        check = optimizer.grid_oracle(cfg, grid_size)
        row.update({'k_oracle': check.k_star, 'redundancy_oracle': check.predicted_redundancy, 
                    'agree': int(_agrees(constant, check))})
    return row


def cmd_optimize(config, regime='both', use_oracle=False, sweep=None, grid_size=10000):
    if sweep is not None:
        with timed('Sweep took'):
            df = pd.DataFrame([_sweep_row(i, cfg, use_oracle, grid_size) 
                               for i, cfg in enumerate(optimizer_sweep(sweep, config.seed, config.network))])
        logger = Logger()
        logger('configs', len(df))
        logger('max_dynamic_minus_constant', float((df['redundancy_dynamic'] - df['redundancy_constant']).max()))
        verdict = 'PASS'
        if use_oracle:
            logger('oracle_disagreements', int((df['agree'] == 0).sum()))
            verdict = 'PASS' if df['agree'].all() else 'FAIL'
        logger.dump(border='-'*50, digits=9)
        print(f'Oracle: {color_verdict(verdict)}')
        summary = logger.summary()
        summary['verdict'] = verdict
        write_outputs(df, config, summary)
        if verdict == 'FAIL':
            raise OracleMismatch('grid search disagrees with the closed-form optimum on the sweep')
        return 0
    
    cfg = config.network
    regimes = [Regime.CONSTANT, Regime.DYNAMIC] if regime == 'both' else [Regime(regime)]
    try:
        results = [optimizer.solve(cfg, r) for r in regimes]
    except Infeasible as e:
        print(f'{color_verdict("INFEASIBLE")} binding constraint: {e.constraint}')
        raise
    logger = Logger()
    mismatch = []
    for result in results:
        name = result.regime.value
        logger(f'{name}_k_star', result.k_star)
        logger(f'{name}_mu_star' if result.regime == Regime.CONSTANT else f'{name}_last_power', 
               result.mu_star if result.regime == Regime.CONSTANT else result.last_power)
        logger(f'{name}_redundancy', result.predicted_redundancy)
        logger(f'{name}_final_ratio', result.predicted_final_ratio)
        if result.regime == Regime.CONSTANT:
            logger(f'{name}_reduced_objective', result.reduced_objective)
        else:
            logger(f'{name}_closed_form_last_power', result.closed_form_last_power)
        if use_oracle:
            check = optimizer.grid_oracle(cfg, grid_size, regime=result.regime)
            ok = _agrees(result, check)
            logger(f'{name}_oracle', f'k={check.k_star} redundancy={check.predicted_redundancy:.9g}')
            if not ok:
                mismatch.append(name)
    logger.dump(border='-'*50, digits=9)
    if use_oracle:
        print(f'Oracle: {color_verdict("FAIL" if mismatch else "PASS")}')
    
    k = max(len(result.schedule) for result in results)
    columns = {'slot': np.arange(1, k + 1)}
    for result in results:
        columns[f'{result.regime.value}_power'] = result.schedule.powers
        columns[f'{result.regime.value}_ratio'] = result.schedule.per_slot_ratio
    summary = logger.summary()
    write_outputs(pd.DataFrame(columns), config, summary)
    if mismatch:
        raise OracleMismatch(f'grid search disagrees with the {", ".join(mismatch)} optimum')
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog='infospread', 
                                     description='Coverage and redundancy of D2D information spreading.')
    commands = parser.add_subparsers(dest='command', required=True)
    for name, description in [('predict', 'closed-form coverage curve and redundancy per slot'), 
                              ('verify', 'closed forms against numerical integration'), 
                              ('simulate', 'Monte Carlo coverage curve and homogeneous-condition diagnostics'), 
                              ('optimize', 'optimal transmit power and slot count')]:
        sub = commands.add_parser(name, help=description, description=description)
        sub.add_argument('--config', type=str, default=None, help='key = value configuration file')
        sub.add_argument('--preset', type=str, default=None, help='bundled configuration, e.g. fig2')
        sub.add_argument('--mode', type=str, default=None, choices=[m.value for m in Mode])
        sub.add_argument('--mu', type=float, default=None, help='source transmit power')
        sub.add_argument('--k-max', type=int, default=None, help='number of slots')
        sub.add_argument('--beta-db', type=float, default=None, help='target SIR in dB, overrides network.beta')
        sub.add_argument('--alpha', type=float, default=None, help='path-loss exponent')
        sub.add_argument('--seed', type=int, default=None)
        sub.add_argument('--out', type=str, default=None, help='CSV output path')
        if name == 'simulate':
            sub.add_argument('--trials', type=int, default=None)
            sub.add_argument('--workers', type=int, default=None, help='worker processes, serial if omitted')
            sub.add_argument('--mobility', type=str, default=None, choices=[m.value for m in Mobility])
            sub.add_argument('--speed', type=float, default=None, help='node speed in m/s')
        if name == 'optimize':
            sub.add_argument('--regime', type=str, default='both', choices=['constant', 'dynamic', 'both'])
            sub.add_argument('--oracle', action='store_true', help='cross-check with a brute-force grid search')
            sub.add_argument('--grid-size', type=int, default=10000, help='powers in the grid search')
            sub.add_argument('--sweep', type=int, default=None, help='solve N random feasible networks')
    return parser


def main(argv=None):
    r"""Runs a command and returns its exit status (see :data:`infospread.errors.EXIT_CODES`). """
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        if args.command == 'predict':
            return cmd_predict(config)
        elif args.command == 'verify':
            return cmd_verify(config)
        elif args.command == 'simulate':
            return cmd_simulate(config)
        return cmd_optimize(config, regime=args.regime, use_oracle=args.oracle, sweep=args.sweep, 
                            grid_size=args.grid_size)
    except InfospreadError as e:
        print(color_str(f'{type(e).__name__}: {e}', 'red', bold=True), file=sys.stderr)
        return e.exit_code
