"""Real special functions: log-gamma, regularized incomplete gamma and beta
functions, and the Volterra mu/nu functions.

The incomplete-function routines are vectorized over numpy arrays and return
both tails, each computed directly where it is the smaller one, so callers can
difference whichever tail keeps relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .errors import ConvergenceError, DomainError
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate

_EPS = np.finfo(float).eps
_FPMIN = np.finfo(float).tiny / _EPS
_CF_TOL = 2.0 * _EPS
_MAX_ITER = 20000


def log_gamma(x):
    """ln Gamma(x) for x > 0 (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("log_gamma requires finite x > 0")
    out = sc.gammaln(arr)
    return float(out) if out.ndim == 0 else out


def _as_float_arrays(*args):
    arrs = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
    return [np.array(a, dtype=float) for a in arrs]


def _gamma_series(a, x):
    # Lower tail by power series; valid and fast for x < a + 1.  The sum is
    # carried times a (and Gamma(a) becomes Gamma(a+1)) so tiny a cannot overflow.
    ap = a.copy()
    term = np.ones_like(a)
    total = term.copy()
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if np.all(np.abs(term) <= np.abs(total) * _CF_TOL):
            break
    else:
        raise ConvergenceError(
            "incomplete gamma series did not converge",
            estimate=total,
            diagnostics={"a": a, "x": x},
        )
    with np.errstate(divide="ignore"):
        log_front = -x + a * np.log(x) - sc.gammaln(a + 1.0)
    return total * np.exp(log_front)


def _gamma_contfrac(a, x):
    # Upper tail by modified Lentz evaluation of the Legendre continued fraction.
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.all(np.abs(delta - 1.0) <= _CF_TOL):
            break
    else:
        raise ConvergenceError(
            "incomplete gamma continued fraction did not converge",
            estimate=h,
            diagnostics={"a": a, "x": x},
        )
    return np.exp(-x + a * np.log(x) - sc.gammaln(a)) * h


def reg_gamma_pair(a, x):
    """Return ``(P, Q)``: the regularized lower and upper incomplete gamma
    functions ``gamma(a, x)/Gamma(a)`` and ``Gamma(a, x)/Gamma(a)``.

    ``a > 0`` and ``x >= 0``, scalars or broadcastable arrays.
    """
    a, x = _as_float_arrays(a, x)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(x))):
        raise DomainError("incomplete gamma arguments must be finite")
    if np.any(a <= 0) or np.any(x < 0):
        raise DomainError("incomplete gamma requires a > 0 and x >= 0")
    lower = np.zeros_like(x)
    upper = np.ones_like(x)
    pos = x > 0
    series = pos & (x < a + 1.0)
    frac = pos & ~series
    if np.any(series):
        lower[series] = _gamma_series(a[series], x[series])
        upper[series] = 1.0 - lower[series]
    if np.any(frac):
        upper[frac] = _gamma_contfrac(a[frac], x[frac])
        lower[frac] = 1.0 - upper[frac]
    np.clip(lower, 0.0, 1.0, out=lower)
    np.clip(upper, 0.0, 1.0, out=upper)
    if lower.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


def reg_gamma_upper(x, lam):
    """Gamma(x, lam) / Gamma(x), the normalized upper incomplete gamma function.

    Note the argument order: ``x`` is the shape, ``lam`` the lower limit of
    integration.
    """
    return reg_gamma_pair(x, lam)[1]


def reg_gamma_lower(x, lam):
    """gamma(x, lam) / Gamma(x) = 1 - reg_gamma_upper(x, lam)."""
    return reg_gamma_pair(x, lam)[0]


def _beta_contfrac(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.all(np.abs(delta - 1.0) <= _CF_TOL):
            return h
    raise ConvergenceError(
        "incomplete beta continued fraction did not converge",
        estimate=h,
        diagnostics={"a": a, "b": b, "x": x},
    )


def reg_beta_pair(a, b, p):
    """Return ``(I, 1 - I)`` where ``I = I_p(a, b)`` is the regularized lower
    incomplete beta function.  The second entry equals ``B(a, b, p)/B(a, b)``
    with ``B(a, b, p)`` the upper-tail integral from ``p`` to 1.
    """
    a, b, p = _as_float_arrays(a, b, p)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(p))):
        raise DomainError("incomplete beta arguments must be finite")
    if np.any(a <= 0) or np.any(b <= 0) or np.any(p < 0) or np.any(p > 1):
        raise DomainError("incomplete beta requires a, b > 0 and 0 <= p <= 1")
    lower = np.where(p >= 1.0, 1.0, 0.0)
    upper = np.asarray(1.0 - lower)
    inner = (p > 0) & (p < 1)
    if np.any(inner):
        ai, bi, pi = a[inner], b[inner], p[inner]
        log_front = ai * np.log(pi) + bi * np.log1p(-pi) - sc.betaln(ai, bi)
        front = np.exp(log_front)
        direct = pi < (ai + 1.0) / (ai + bi + 2.0)
        lo = np.empty_like(pi)
        up = np.empty_like(pi)
        if np.any(direct):
            j = direct
            lo[j] = front[j] * _beta_contfrac(ai[j], bi[j], pi[j]) / ai[j]
            up[j] = 1.0 - lo[j]
        if np.any(~direct):
            j = ~direct
            up[j] = front[j] * _beta_contfrac(bi[j], ai[j], 1.0 - pi[j]) / bi[j]
            lo[j] = 1.0 - up[j]
        lower[inner] = lo
        upper[inner] = up
    np.clip(lower, 0.0, 1.0, out=lower)
    np.clip(upper, 0.0, 1.0, out=upper)
    if lower.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


def reg_beta_upper(x, y, p):
    """B(x, y, p) / B(x, y): the mass of the Beta(x, y) law above ``p``."""
    return reg_beta_pair(x, y, p)[1]


def reg_beta_lower(x, y, p):
    """I_p(x, y) = 1 - reg_beta_upper(x, y, p)."""
    return reg_beta_pair(x, y, p)[0]


@dataclass(frozen=True)
class VolterraArgs:
    t: float
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        for name in ("t", "alpha", "beta"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"Volterra argument {name} must be finite")
        if self.t < 0:
            raise DomainError("Volterra functions are defined for t >= 0")
        if self.beta <= -1:
            raise DomainError("Volterra mu requires beta > -1")
        if self.alpha < -1:
            raise DomainError("alpha < -1 is not supported")


# Scan grid for locating the integrand peak and its tail cut: 2**(j/4).
_SCAN = 2.0 ** (np.arange(-240, 97) / 4.0)


def _volterra_log_integrand(x, log_t, alpha, beta):
    with np.errstate(divide="ignore"):
        return x * log_t + beta * np.log(x) - sc.gammaln(beta + 1.0) - sc.gammaln(x + alpha + 1.0)


def volterra_parts(log_t: float, alpha: float, beta: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Return ``(log_scale, integral)`` with

        t**(-alpha) * mu(t, alpha, beta) == exp(log_scale) * integral

    for ``t = exp(log_t)``.  Working from ``log t`` keeps arguments such as
    ``t = exp(-1e5)`` usable, and the split form keeps huge or tiny values
    representable.
    """
    log_env = np.log(_SCAN) + _volterra_log_integrand(_SCAN, log_t, alpha, beta)
    peak = int(np.argmax(log_env))
    cut = log_env[peak] + math.log(cfg.tail_cutoff_tol)
    beyond = np.nonzero(log_env[peak:] < cut)[0]
    if peak == len(_SCAN) - 1 or len(beyond) == 0:
        raise ConvergenceError(
            "Volterra truncation point not found within the safety bound",
            diagnostics={"log_t": log_t, "alpha": alpha, "beta": beta, "x_max": float(_SCAN[-1])},
        )
    x_cut = 2.0 * _SCAN[peak + beyond[0]]
    # Refine the mode on the scan for the breakpoint and the scale factor.
    x_mode = float(_SCAN[peak])
    log_peak = float(_volterra_log_integrand(np.array(x_mode), log_t, alpha, beta))

    def g(y):
        return np.exp(_volterra_log_integrand(x_cut * y, log_t, alpha, beta) - log_peak)

    y_mode = x_mode / x_cut
    if beta < 0:
        left, e1 = integrate(g, 0.0, y_mode, cfg, vectorized=True, singular="left")
        right, e2 = integrate(g, y_mode, 1.0, cfg, vectorized=True)
        value = left + right
    else:
        value, _ = integrate(g, 0.0, 1.0, cfg, vectorized=True, points=[y_mode])
    return log_peak + math.log(x_cut), value


def volterra_mu(t: float, alpha: float = 0.0, beta: float = 0.0, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """mu(t, alpha, beta) = int_0^inf t**(x+alpha) x**beta / (Gamma(beta+1) Gamma(x+alpha+1)) dx."""
    args = VolterraArgs(float(t), float(alpha), float(beta))
    if args.t == 0.0:
        if args.alpha < 0:
            raise DomainError("mu(0, alpha, beta) diverges for alpha < 0")
        return 0.0
    log_t = math.log(args.t)
    log_scale, value = volterra_parts(log_t, args.alpha, args.beta, cfg)
    return math.exp(log_scale + args.alpha * log_t) * value


def volterra_nu(t: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """nu(t) = int_0^inf t**x / Gamma(x+1) dx."""
    return volterra_mu(t, 0.0, 0.0, cfg)
