r"""Numerical evaluation of the success probabilities from the underlying integrals.

The success probability is the expectation, over the serving distance ``x``, of the Laplace transform of the
aggregate interference evaluated at ``beta x^alpha / mu``. Both the outer expectation and (for a general
path-loss exponent) the inner interference integrals are computed by adaptive quadrature after mapping the
semi-infinite range onto ``[0, 1)``. The results serve as an oracle for :mod:`infospread.analytic`. 
"""
from dataclasses import dataclass
from itertools import product
import warnings

import numpy as np
from scipy import integrate

from .errors import ConfigError
from .errors import QuadratureError
from .network import Mode
from .network import parse_enum
from . import analytic


@dataclass(frozen=True)
class QuadratureSpec:
    r"""Tolerances of the adaptive quadrature.
    
    Args:
        abs_tol (float): absolute tolerance. Default: ``1e-10``
        rel_tol (float): relative tolerance, at least ``1e-12``. Default: ``1e-9``
        max_subdivisions (int): subinterval limit, at least 50. Default: ``200``
    """
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 200
    
    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ConfigError(f'expected positive tolerance, got {self.abs_tol}', field='abs_tol')
        if not self.rel_tol >= 1e-12:
            raise ConfigError(f'relative tolerance below 1e-12: {self.rel_tol}', field='rel_tol')
        if self.max_subdivisions < 50:
            raise ConfigError(f'expected at least 50 subdivisions, got {self.max_subdivisions}', 
                              field='max_subdivisions')


DEFAULT_SPEC = QuadratureSpec()


def integrate_tail(f, lower, scale, spec=DEFAULT_SPEC):
    r"""Integrates ``f`` over ``[lower, inf)`` with the substitution ``x = lower + scale t/(1 - t)``.
    
    Args:
        f (callable): integrand of one real variable
        lower (float): lower limit
        scale (float): positive length scale of the integrand, places the bulk of ``t`` mid-interval
        spec (QuadratureSpec): tolerances
        
    Raises:
        QuadratureError: no convergence within ``spec.max_subdivisions``
    """
    assert scale > 0, f'expected positive scale, got {scale}'
    
    def g(t):
        if t >= 1.0:
            return 0.0
        s = 1.0 - t
        return f(lower + scale*t/s)*scale/(s*s)
    
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        out = integrate.quad(g, 0.0, 1.0, epsabs=spec.abs_tol, epsrel=spec.rel_tol, 
                             limit=spec.max_subdivisions, full_output=1)
    value, error, info = out[:3]
    if len(out) > 3 and out[3]:
        raise QuadratureError(f'quadrature over [{lower}, inf) did not converge: {out[3]} '
                              f'(estimate {value}, error {error}, {info["neval"]} evaluations)')
    return value


def _method(cfg, method):
    assert method in ['auto', 'quad', 'closed'], f'unknown method {method!r}'
    if method == 'auto':
        return 'closed' if cfg.alpha == 4 else 'quad'
    if method == 'closed' and cfg.alpha != 4:
        raise ConfigError(f'closed antiderivatives need a path-loss exponent of 4, got {cfg.alpha}', field='alpha')
    return method


def field_exponent(density, alpha, w, lower=0.0, spec=DEFAULT_SPEC, method='quad'):
    r"""Exponent of the Laplace transform of a Poisson field of Rayleigh-faded interferers outside a ball.
    
    .. math::
        2\pi\lambda\int_{a}^{\infty}\left(1 - \frac{1}{1 + w r^{-\alpha}}\right) r\,dr
        
    With ``method='closed'`` (``alpha = 4``) the antiderivative 
    :math:`\pi\lambda\frac{\sqrt w}{2}\cdot 2(\pi/2 - \tan^{-1}(a^2/\sqrt w))` is used. 
    
    Args:
        density (float): interferer density
        alpha (float): path-loss exponent
        w (float): Laplace argument times interferer power
        lower (float): exclusion radius ``a``
    """
    assert w >= 0 and lower >= 0, f'expected non-negative argument and radius, got {w}, {lower}'
    if density == 0 or w == 0:
        return 0.0
    if method == 'closed':
        root = np.sqrt(w)
        return 2*np.pi*density*root/2*(np.pi/2 - np.arctan(lower**2/root))
    return 2*np.pi*density*integrate_tail(lambda r: w*r/(r**alpha + w), lower, w**(1/alpha), spec)


def cellular_exponent_general(density, alpha, z):
    r"""Closed cellular-field exponent for any ``alpha > 2``: 
    :math:`2\pi\lambda z^{2/\alpha}\frac{\pi/\alpha}{\sin(2\pi/\alpha)}`. 
    """
    return 2*np.pi*density*z**(2/alpha)*(np.pi/alpha)/np.sin(2*np.pi/alpha)


def _laplace(cfg, mu, z, exclusion, spec, method):
    assert z >= 0, f'expected non-negative Laplace argument, got {z}'
    assert mu >= 0, f'expected non-negative power, got {mu}'
    method = _method(cfg, method)
    # uplink MUs transmit with unit power, sources with mu
    cellular = field_exponent(cfg.lambda_b, cfg.alpha, z, 0.0, spec, method)
    sources = field_exponent(cfg.lambda_s, cfg.alpha, z*mu, exclusion, spec, method)
    return float(np.exp(-cellular - sources))


def laplace_interference_unicast(cfg, mu, z, nearest_src_dist=0.0, spec=DEFAULT_SPEC, method='auto'):
    r"""Laplace transform of the aggregate interference at the receiver of a unicast link.
    
    The product of the cellular-uplink factor (interferers from the origin) and the interfering-source factor,
    the latter restricted to sources beyond ``nearest_src_dist``. The serving distance of a unicast link is
    measured to the nearest MU and does not constrain the other sources, so the success probability uses
    ``nearest_src_dist = 0``; a positive value evaluates the exclusion-ball reading. 
    
    Args:
        cfg (NetworkConfig): network
        mu (float): source transmit power
        z (float): Laplace argument
        nearest_src_dist (float, optional): exclusion radius for interfering sources. Default: ``0``
        spec (QuadratureSpec, optional): tolerances
        method (str, optional): ``'auto'``, ``'quad'`` or ``'closed'``. Default: ``'auto'``
        
    Returns:
        float: value in ``(0, 1]``
    """
    return _laplace(cfg, mu, z, nearest_src_dist, spec, method)


def laplace_interference_broadcast(cfg, mu, z, serving_dist=0.0, spec=DEFAULT_SPEC, method='auto'):
    r"""Laplace transform of the aggregate interference at a broadcast receiver.
    
    Interfering sources are integrated from ``serving_dist``. The receiver decodes its nearest source, so
    every other source lies beyond the serving distance and :func:`p_suc_numeric` passes it here. 
    """
    return _laplace(cfg, mu, z, serving_dist, spec, method)


def p_suc_numeric(cfg, mu, mode, spec=DEFAULT_SPEC, method='auto', exclude_nearer_sources=None):
    r"""Success probability by numerical integration over the serving distance. 
    
    .. math::
        p = \int_0^\infty \mathcal{L}_I\left(\frac{\beta x^\alpha}{\mu}\right) 2\pi\lambda x e^{-\lambda\pi x^2}dx
        
    with :math:`\lambda = \lambda_u` for unicast and :math:`\lambda_s` for broadcast. 
    
    Args:
        cfg (NetworkConfig): network, any ``alpha > 2``
        mu (float): positive transmit power
        mode (Mode): unicast or broadcast
        spec (QuadratureSpec, optional): tolerances
        method (str, optional): inner interference integrals, see :func:`field_exponent`
        exclude_nearer_sources (bool, optional): integrate interfering sources from the serving distance.
            ``None`` selects the mode default: ``True`` for broadcast, ``False`` for unicast. 
            
    Raises:
        QuadratureError: no convergence
    """
    assert mu > 0, f'expected positive transmit power, got {mu}'
    mode = parse_enum(Mode, mode)
    if exclude_nearer_sources is None:
        exclude_nearer_sources = mode == Mode.BROADCAST
    if mode == Mode.UNICAST:
        density, laplace = cfg.lambda_u, laplace_interference_unicast
    else:
        density, laplace = cfg.lambda_s, laplace_interference_broadcast
    assert density > 0, f'expected a positive serving density in {mode.value} mode'
    
    def integrand(x):
        nearest = density*np.pi*x*x
        if nearest > 745.0:  # exp underflows
            return 0.0
        z = cfg.beta*x**cfg.alpha/mu
        exclusion = x if exclude_nearer_sources else 0.0
        return laplace(cfg, mu, z, exclusion, spec, method)*2*np.pi*density*x*np.exp(-nearest)
    
    return integrate_tail(integrand, 0.0, 1/np.sqrt(np.pi*density), spec)


def p_suc_unicast_excluded(cfg, mu):
    r"""Closed form (``alpha = 4``) of the unicast success probability when interfering sources are
    excluded from the serving-distance ball:
    :math:`\lambda_u / (\lambda_u + \frac{\pi}{2}\sqrt{\beta/\mu}\lambda_b + \lambda_s\kappa)`. 
    """
    analytic.require_closed_form(cfg)
    assert mu > 0, f'expected positive transmit power, got {mu}'
    denom = cfg.n_mu + np.pi/2*np.sqrt(cfg.beta/mu)*cfg.n_bs + cfg.n_src*analytic.kappa(cfg.beta)
    return cfg.n_mu/denom


@dataclass(frozen=True)
class VerifyGrid:
    r"""Points on which closed forms are compared with quadrature.
    
    Each node class density is scaled independently by every factor in ``scales``. The default has
    5 powers x 5 thresholds x 27 density combinations = 675 points per mode. 
    """
    mus: tuple = (1e-3, 1e-2, 0.064, 1.0, 10.0)
    betas: tuple = (0.1, 0.5, 1.0, 4.0, 10.0)
    scales: tuple = (0.5, 1.0, 2.0)
    
    def points(self, cfg):
        for bs, mu_scale, src in product(self.scales, repeat=3):
            scaled = cfg.scaled(bs=bs, mu=mu_scale, src=src)
            for beta in self.betas:
                for mu in self.mus:
                    yield scaled.replace(beta=float(beta)), float(mu), (bs, mu_scale, src)
                    
    def __len__(self):
        return len(self.mus)*len(self.betas)*len(self.scales)**3


def verify_grid(cfg, grid=VerifyGrid(), spec=DEFAULT_SPEC, modes=(Mode.UNICAST, Mode.BROADCAST)):
    r"""Closed form versus quadrature over a grid.
    
    Returns:
        list: one dict per (point, mode) with keys ``mode, n_bs, n_mu, n_src, beta, mu, closed, numeric, rel_dev``
    """
    rows = []
    for point, mu, _ in grid.points(cfg):
        for mode in modes:
            closed = analytic.p_suc(point, mu, mode)
            numeric = p_suc_numeric(point, mu, mode, spec)
            rows.append({'mode': mode.value, 'n_bs': point.n_bs, 'n_mu': point.n_mu, 'n_src': point.n_src, 
                         'beta': point.beta, 'mu': mu, 'closed': closed, 'numeric': numeric, 
                         'rel_dev': abs(numeric - closed)/closed})
    return rows


def coverage_curve_any(cfg, mu, mode, k_max, spec=DEFAULT_SPEC):
    r"""Like :func:`analytic.coverage_curve`, falling back to :func:`p_suc_numeric` when ``alpha != 4``. """
    if cfg.alpha == 4:
        return analytic.coverage_curve(cfg, mu, mode, k_max)
    mode = parse_enum(Mode, mode)
    cfg.require_positive_counts()
    success = p_suc_numeric(cfg, mu, mode, spec)
    p_idle = analytic.idle_probability(cfg)
    q = p_idle*success*(cfg.n_src/cfg.n_mu if mode == Mode.UNICAST else 1.0)
    return analytic.curve_from_probabilities(mode, mu, success, p_idle, cfg.n_mu, q, k_max)
