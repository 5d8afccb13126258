"""Continuous Poisson and continuous binomial distributions.

The continuous Poisson law with intensity ``lam`` has distribution function
``Gamma(x, lam) / Gamma(x)`` on ``x > 0``; the continuous binomial law with
real ``n > 0`` and ``0 < p < 1`` has ``B(x, n+1-x, p) / B(x, n+1-x)`` on
``(0, n+1]``.  Both agree with the classical discrete CDFs (``P(X < k)``) at
the integers.

Evaluation functions accept scalars or numpy arrays for ``x`` and return the
same shape.  Densities come in two independent routes: ``"derivative"``
(Richardson-extrapolated central difference of the CDF) and
``"double_integral"`` (direct two-dimensional quadrature of the quotient-rule
expression for the derivative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special as sc

from .errors import DomainError
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate
from .rng import RandomStream
from .special import reg_beta_pair, reg_gamma_pair

ROUTES = ("derivative", "double_integral")


@dataclass(frozen=True)
class ContPoissonParams:
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"continuous Poisson needs finite lambda > 0, got {self.lam!r}")


@dataclass(frozen=True)
class ContBinomialParams:
    """``n`` is real-valued; the support is ``[0, n + 1]``."""

    n: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.n) and self.n > 0):
            raise DomainError(f"continuous binomial needs finite n > 0, got {self.n!r}")
        if not (0 < self.p < 1):
            raise DomainError(f"continuous binomial needs 0 < p < 1, got {self.p!r}")

    @property
    def upper(self) -> float:
        return self.n + 1.0


Distribution = Union[ContPoissonParams, ContBinomialParams]


def _prepare(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("evaluation points must be finite")
    return arr


def _finish(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def _pois_tails(lam, x):
    """(F, 1 - F) for the continuous Poisson law, each tail computed directly."""
    x = np.asarray(x, dtype=float)
    cdf = np.zeros_like(x)
    sf = np.ones_like(x)
    pos = x > 0
    if np.any(pos):
        lower, upper = reg_gamma_pair(x[pos], lam)
        cdf[pos] = upper
        sf[pos] = lower
    return cdf, sf


def _binom_tails(n, p, x):
    x = np.asarray(x, dtype=float)
    top = n + 1.0
    cdf = np.where(x >= top, 1.0, 0.0)
    sf = np.asarray(1.0 - cdf)
    inside = (x > 0) & (x < top)
    if np.any(inside):
        xi = x[inside]
        lower, upper = reg_beta_pair(xi, top - xi, p)
        cdf[inside] = upper
        sf[inside] = lower
    return cdf, sf


def _tails(dist, x):
    if isinstance(dist, ContPoissonParams):
        return _pois_tails(dist.lam, x)
    if isinstance(dist, ContBinomialParams):
        return _binom_tails(dist.n, dist.p, x)
    raise TypeError(f"unsupported distribution {dist!r}")


def _support(dist):
    if isinstance(dist, ContPoissonParams):
        return 0.0, math.inf
    return 0.0, dist.upper


def cpois_cdf(params: ContPoissonParams, x):
    """Distribution function of the continuous Poisson law (0 for x <= 0)."""
    return _finish(_pois_tails(params.lam, _prepare(x))[0])


def cpois_sf(params: ContPoissonParams, x):
    """1 - cpois_cdf, computed without cancellation in the upper tail."""
    return _finish(_pois_tails(params.lam, _prepare(x))[1])


def cbinom_cdf(params: ContBinomialParams, x):
    """Distribution function of the continuous binomial law (1 above n + 1)."""
    return _finish(_binom_tails(params.n, params.p, _prepare(x))[0])


def cbinom_sf(params: ContBinomialParams, x):
    return _finish(_binom_tails(params.n, params.p, _prepare(x))[1])


def cdf(dist: Distribution, x):
    return _finish(_tails(dist, _prepare(x))[0])


def sf(dist: Distribution, x):
    return _finish(_tails(dist, _prepare(x))[1])


# --- densities -------------------------------------------------------------


def _fd_density(dist, x):
    """Central difference of the CDF, one Richardson step.

    Differences the CDF where it is below 1/2 and the survival function
    elsewhere, so the upper tail keeps its relative accuracy.
    """
    lo, hi = _support(dist)
    h = np.maximum(1e-5, 1e-7 * x)
    h = np.minimum(h, 0.5 * (x - lo))
    if math.isfinite(hi):
        h = np.minimum(h, 0.5 * (hi - x))
    base_cdf, _ = _tails(dist, x)
    use_sf = base_cdf > 0.5

    def tail(pts):
        c, s = _tails(dist, pts)
        return np.where(use_sf, -s, c)

    def diff(step):
        return (tail(x + step) - tail(x - step)) / (2.0 * step)

    return (4.0 * diff(0.5 * h) - diff(h)) / 3.0


def _pois_density_2d(lam: float, x: float, cfg: QuadratureConfig) -> float:
    # s = lam * z**(1/x) absorbs s**(x-1) ds; the inner range becomes (0, 1).
    log_lam = math.log(lam)
    log_front = x * log_lam - math.lgamma(x + 1.0)
    lgx = math.lgamma(x)

    def outer(t):
        log_t = math.log(t)

        def inner(z):
            log_s = log_lam + np.log(z) / x
            return np.exp(-np.exp(log_s)) * (log_t - log_s)

        val, _ = integrate(inner, 0.0, 1.0, cfg, vectorized=True, singular="left")
        return math.exp(-t + (x - 1.0) * log_t - lgx) * val

    points = [x - 1.0] if x - 1.0 > lam else []
    val, _ = integrate(outer, lam, math.inf, cfg, points=points)
    return math.exp(log_front) * val


def _binom_density_2d(n: float, p: float, x: float, cfg: QuadratureConfig) -> float:
    # s = p z**(1/x) and 1 - t = (1-p) v**(1/y) absorb the endpoint powers.
    y = n + 1.0 - x
    log_p = math.log(p)
    log_q = math.log1p(-p)
    log_front = x * log_p + y * log_q - math.log(x) - math.log(y) - 2.0 * sc.betaln(x, y)

    def outer(v):
        log_w = log_q + math.log(v) / y
        w = math.exp(log_w)
        t = 1.0 - w
        log_t = math.log1p(-w)

        def inner(z):
            log_s = log_p + np.log(z) / x
            log1m_s = np.log1p(-np.exp(log_s))
            return np.exp((y - 1.0) * log1m_s) * (log_t - log_w + log1m_s - log_s)

        val, _ = integrate(inner, 0.0, 1.0, cfg, vectorized=True, singular="left")
        return t ** (x - 1.0) * val

    val, _ = integrate(outer, 0.0, 1.0, cfg, singular="left")
    return math.exp(log_front) * val


def _density(dist, x, route, cfg):
    if route not in ROUTES:
        raise DomainError(f"route must be one of {ROUTES}, got {route!r}")
    arr = _prepare(x)
    lo, hi = _support(dist)
    out = np.zeros_like(arr)
    inside = (arr > lo) & (arr < hi)
    if np.any(inside):
        xi = arr[inside]
        if route == "derivative":
            out[inside] = _fd_density(dist, xi)
        elif isinstance(dist, ContPoissonParams):
            out[inside] = [_pois_density_2d(dist.lam, float(v), cfg) for v in xi]
        else:
            out[inside] = [_binom_density_2d(dist.n, dist.p, float(v), cfg) for v in xi]
    return _finish(out)


def cpois_pdf(params: ContPoissonParams, x, route: str = "derivative", cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Density of the continuous Poisson law; 0 outside ``(0, inf)``."""
    return _density(params, x, route, cfg)


def cbinom_pdf(params: ContBinomialParams, x, route: str = "derivative", cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Density of the continuous binomial law; 0 outside ``(0, n + 1)``."""
    return _density(params, x, route, cfg)


def pdf(dist: Distribution, x, route: str = "derivative", cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    if not isinstance(dist, (ContPoissonParams, ContBinomialParams)):
        raise TypeError(f"unsupported distribution {dist!r}")
    return _density(dist, x, route, cfg)


# --- quantiles and sampling --------------------------------------------------

_BISECT_WIDTH = 1e-12


def quantile(dist: Distribution, q):
    """Inverse distribution function.

    Bisection to a bracket of width 1e-12, then two Newton steps kept inside
    the bracket.  ``quantile(0) == 0``; at ``q == 1`` the binomial returns
    ``n + 1`` and the Poisson returns ``math.inf``.
    """
    qs = np.asarray(q, dtype=float)
    if not np.all(np.isfinite(qs)) or np.any(qs < 0) or np.any(qs > 1):
        raise DomainError("quantile levels must lie in [0, 1]")
    lo_s, hi_s = _support(dist)
    out = np.where(qs >= 1.0, hi_s, 0.0)
    todo = (qs > 0) & (qs < 1)
    if np.any(todo):
        out[todo] = _invert(dist, qs[todo])
    return _finish(out)


def _invert(dist, q):
    lo = np.zeros_like(q)
    if isinstance(dist, ContPoissonParams):
        hi = np.full_like(q, dist.lam + 1.0)
        while True:
            short = _tails(dist, hi)[0] < q
            if not np.any(short):
                break
            lo[short] = hi[short]
            hi[short] *= 2.0
    else:
        hi = np.full_like(q, dist.upper)

    while np.max(hi - lo) > _BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        stuck = (mid <= lo) | (mid >= hi)
        if np.all(stuck | (hi - lo <= _BISECT_WIDTH)):
            break
        below = _tails(dist, mid)[0] < q
        lo = np.where(below & ~stuck, mid, lo)
        hi = np.where(~below & ~stuck, mid, hi)

    x = 0.5 * (lo + hi)
    for _ in range(2):
        x = _newton_step(dist, x, q, lo, hi)
    return x


def _newton_step(dist, x, q, lo, hi):
    inside = x > 0
    if isinstance(dist, ContBinomialParams):
        inside &= x < dist.upper
    if not np.any(inside):
        return x
    xi = x[inside]
    c, s = _tails(dist, xi)
    # Residual from whichever tail is accurate.
    resid = np.where(c > 0.5, (1.0 - q[inside]) - s, c - q[inside])
    dens = _fd_density(dist, xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(dens > 0, resid / dens, 0.0)
    cand = xi - step
    ok = (cand >= lo[inside]) & (cand <= hi[inside]) & np.isfinite(cand)
    x = x.copy()
    x[inside] = np.where(ok, cand, xi)
    return x


def sample(dist: Distribution, stream: RandomStream, count: int) -> np.ndarray:
    """``count`` inverse-CDF variates driven by consecutive uniforms of ``stream``."""
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise DomainError("count must be a positive integer")
    u = stream.uniform(int(count))
    return np.asarray(quantile(dist, u), dtype=float)


# --- interval masses and classical laws ------------------------------------


def interval_mass(dist: Distribution, x):
    """Closed-form mass of ``[x, x + 1)``.

    Poisson: ``exp(-lam) lam**x / Gamma(x + 1)`` for ``x >= 0``.
    Binomial: ``Gamma(n+1) / (Gamma(x+1) Gamma(n-x+1)) p**x (1-p)**(n-x)``
    for ``0 <= x <= n``.
    """
    arr = _prepare(x)
    if isinstance(dist, ContPoissonParams):
        if np.any(arr < 0):
            raise DomainError("interval mass needs x >= 0")
        log_mass = -dist.lam + arr * math.log(dist.lam) - sc.gammaln(arr + 1.0)
    elif isinstance(dist, ContBinomialParams):
        if np.any(arr < 0) or np.any(arr > dist.n):
            raise DomainError("interval mass needs 0 <= x <= n")
        n, p = dist.n, dist.p
        log_mass = (
            sc.gammaln(n + 1.0) - sc.gammaln(arr + 1.0) - sc.gammaln(n - arr + 1.0)
            + arr * math.log(p) + (n - arr) * math.log1p(-p)
        )
    else:
        raise TypeError(f"unsupported distribution {dist!r}")
    return _finish(np.exp(log_mass))


def classical_poisson_cdf(lam: float, x: float) -> float:
    """P(X < x) for X ~ Poisson(lam), by direct summation."""
    if not (math.isfinite(lam) and lam > 0):
        raise DomainError("lambda must be finite and positive")
    if x <= 0:
        return 0.0
    log_lam = math.log(lam)
    top = math.ceil(x) - 1
    return math.fsum(math.exp(-lam + k * log_lam - math.lgamma(k + 1.0)) for k in range(top + 1))


def classical_binomial_cdf(n: int, p: float, x: float) -> float:
    """P(X < x) for X ~ Binomial(n, p), by direct summation."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if not 0 <= p <= 1:
        raise DomainError("p must lie in [0, 1]")
    n = int(n)
    if x <= 0:
        return 0.0
    if x > n:
        return 1.0
    top = math.ceil(x) - 1
    return math.fsum(math.comb(n, k) * p**k * (1.0 - p) ** (n - k) for k in range(top + 1))
