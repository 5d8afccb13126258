"""Moments of the continuous Poisson law and their Laplace transforms.

Two independent routes give the k-th moment ``m_k(lam)``:

* ``"volterra"``: ``k! * int_0^lam exp(-t) mu(t, -1, k-1) dt``;
* ``"tail_integral"``: ``k * int_0^inf x**(k-1) (1 - F_lam(x)) dx``.

In ``lam`` the transforms are ``k! / (s ln(1+s)**k)``, and the double
transform of the whole family is ``ln(1+s) / (s (u + ln(1+s)))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import ContPoissonParams, cpois_pdf, cpois_sf
from .errors import DomainError
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate
from .special import volterra_parts

MOMENT_ROUTES = ("volterra", "tail_integral")


@dataclass(frozen=True)
class MomentRequest:
    lam: float
    k: int
    route: str = "tail_integral"

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError("lambda must be finite and positive")
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 0:
            raise DomainError("moment order k must be a non-negative integer")
        if self.route not in MOMENT_ROUTES:
            raise DomainError(f"route must be one of {MOMENT_ROUTES}, got {self.route!r}")
        if self.route == "volterra" and self.k < 1:
            raise DomainError("the Volterra route needs k >= 1")


@dataclass(frozen=True)
class DoubleLaplacePoint:
    """``u`` is conjugate to the variate, ``s`` to the intensity."""

    u: float
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and self.u >= 0):
            raise DomainError("u must be finite and >= 0")
        if not (math.isfinite(self.s) and self.s > 0):
            raise DomainError("s must be finite and > 0")


def _weighted_volterra_integral(rate: float, alpha: float, beta: float, t_upper: float, cfg: QuadratureConfig) -> float:
    """int_0^t_upper exp(-rate t) mu(t, alpha, beta) dt, alpha >= -1.

    The part below t = 1 is taken in u = -ln t, where mu(t, -1, beta) ~
    1/(t |ln t|**(beta+2)) turns into an algebraically decaying integrand.
    """
    total = 0.0
    t_split = min(1.0, t_upper)

    def low(u):
        log_scale, val = volterra_parts(-u, alpha, beta, cfg)
        # dt = t du and t * mu = t**(1+alpha) * [t**(-alpha) mu]
        return math.exp(-rate * math.exp(-u) - u * (1.0 + alpha) + log_scale) * val

    val, _ = integrate(low, -math.log(t_split), math.inf, cfg)
    total += val

    if t_upper > 1.0:
        def high(t):
            log_t = math.log(t)
            log_w = -rate * t + alpha * log_t
            if log_w + t + 2.0 * log_t < -745.0:
                return 0.0
            log_scale, v = volterra_parts(log_t, alpha, beta, cfg)
            return math.exp(log_w + log_scale) * v

        val, _ = integrate(high, 1.0, t_upper, cfg)
        total += val
    return total


def moment(lam: float, k: int, route: str = "tail_integral", cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """k-th moment of the continuous Poisson law with intensity ``lam``.

    ``m_0 = 1`` by convention.
    """
    req = MomentRequest(float(lam), k, route)
    if req.k == 0:
        return 1.0
    if req.route == "volterra":
        return math.factorial(req.k) * _weighted_volterra_integral(1.0, -1.0, req.k - 1.0, req.lam, cfg)
    dist = ContPoissonParams(req.lam)

    def integrand(x):
        return req.k * x ** (req.k - 1) * np.asarray(cpois_sf(dist, x))

    val, _ = integrate(integrand, 0.0, math.inf, cfg, vectorized=True, points=[req.lam])
    return val


def moment_laplace(k: int, s: float) -> float:
    """Closed-form Laplace transform in ``lam`` of ``m_k``: k! / (s ln(1+s)**k).

    ``k = 0`` gives ``1/s`` (the transform of ``m_0 = 1``).
    """
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise DomainError("k must be a non-negative integer")
    if not (math.isfinite(s) and s > 0):
        raise DomainError("s must be finite and > 0")
    k = int(k)
    return math.exp(math.lgamma(k + 1.0) - math.log(s) - k * math.log(math.log1p(s)))


def double_laplace(u: float, s: float) -> float:
    """ln(1+s) / (s (u + ln(1+s))): the transform of the law in x and of the family in lam."""
    pt = DoubleLaplacePoint(float(u), float(s))
    ell = math.log1p(pt.s)
    return ell / (pt.s * (pt.u + ell))


def double_laplace_series(u: float, s: float, terms: int) -> np.ndarray:
    """Partial sums ``sum_{k<=K} (-u)**k m_hat_k(s) / k!`` for K = 0..terms-1.

    Converges (geometrically) only for ``u < ln(1+s)``.
    """
    pt = DoubleLaplacePoint(float(u), float(s))
    # m_hat_k / k! is formed directly so large k cannot overflow.
    ell = math.log1p(pt.s)
    parts = [(-pt.u / ell) ** k / pt.s for k in range(terms)]
    return np.cumsum(parts)


def series_converges(u: float, s: float) -> bool:
    return u < math.log1p(s)


def volterra_laplace_closed(s: float, alpha: float, beta: float) -> float:
    """1 / (s**(alpha+1) (ln s)**(beta+1)), valid for s > 1."""
    if not s > 1:
        raise DomainError("the Volterra transform formula needs s > 1")
    return 1.0 / (s ** (alpha + 1.0) * math.log(s) ** (beta + 1.0))


def volterra_laplace_numeric(s: float, alpha: float, beta: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """int_0^inf exp(-s t) mu(t, alpha, beta) dt by quadrature (s > 1)."""
    if not s > 1:
        raise DomainError("the Volterra transform converges only for s > 1")
    return _weighted_volterra_integral(s, alpha, beta, math.inf, cfg)


def _outer_cutoff(s: float, k: int, tol: float) -> float:
    # Smallest grid point with exp(-s L) (L + k)**k below tol.
    cut = 1.0
    while -s * cut + k * math.log(cut + k) > math.log(tol):
        cut *= 1.25
    return cut


def moment_laplace_numeric(k: int, s: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE, route: str = "tail_integral") -> float:
    """int_0^Lmax exp(-s lam) m_k(lam) dlam, with Lmax from the bound m_k(lam) <= (lam + k)**k."""
    if not (math.isfinite(s) and s > 0):
        raise DomainError("s must be finite and > 0")
    cut = _outer_cutoff(s, k, cfg.abs_tol)
    inner_cfg = cfg.tightened(10.0)

    def f(lam):
        return math.exp(-s * lam) * moment(lam, k, route, inner_cfg)

    val, _ = integrate(f, 0.0, cut, cfg)
    return val


def laplace_transform_of_law(lam: float, u: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """E exp(-u X) for X continuous-Poisson(lam), integrating the density."""
    dist = ContPoissonParams(lam)

    def f(x):
        return np.exp(-u * x) * np.asarray(cpois_pdf(dist, x))

    val, _ = integrate(f, 0.0, math.inf, cfg, vectorized=True, points=[lam])
    return val


def double_laplace_numeric(u: float, s: float, cfg: QuadratureConfig | None = None) -> float:
    """Two-dimensional quadrature of exp(-u x - s lam) f_lam(x) over x > 0, 0 < lam < Lmax."""
    pt = DoubleLaplacePoint(float(u), float(s))
    cfg = cfg or QuadratureConfig(abs_tol=1e-9, rel_tol=1e-7)
    cut = math.log(1.0 / cfg.abs_tol) / pt.s

    def f(lam):
        return math.exp(-pt.s * lam) * laplace_transform_of_law(lam, pt.u, cfg)

    val, _ = integrate(f, 0.0, cut, cfg)
    return val


@dataclass(frozen=True)
class IdentityCheck:
    identity: str
    point: str
    numeric: float
    closed_form: float
    tolerance: float

    @property
    def rel_error(self) -> float:
        return abs(self.numeric - self.closed_form) / abs(self.closed_form)

    @property
    def passed(self) -> bool:
        return self.rel_error <= self.tolerance


VOLTERRA_GRID = [(s, a, b) for s in (1.5, 2.0, 4.0) for a, b in ((0, 0), (-1, 0), (-1, 1), (-1, 2))]
MOMENT_CHAIN_GRID = [(1, s) for s in (0.5, 1.0, 2.0)]
DOUBLE_LAPLACE_POINTS = [(0.3, 1.0), (1.0, 1.0)]


def laplace_battery(cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> list[IdentityCheck]:
    """Run the numeric-versus-closed-form identity checks."""
    checks = []
    for s, a, b in VOLTERRA_GRID:
        checks.append(IdentityCheck(
            "volterra_laplace", f"s={s},alpha={a},beta={b}",
            volterra_laplace_numeric(s, a, b, cfg), volterra_laplace_closed(s, a, b), 1e-6,
        ))
    for k, s in MOMENT_CHAIN_GRID:
        checks.append(IdentityCheck(
            "moment_laplace", f"k={k},s={s}",
            moment_laplace_numeric(k, s, cfg), moment_laplace(k, s), 1e-4,
        ))
    for u, s in DOUBLE_LAPLACE_POINTS:
        if series_converges(u, s):
            checks.append(IdentityCheck(
                "double_laplace_series", f"u={u},s={s}",
                float(double_laplace_series(u, s, 200)[-1]), double_laplace(u, s), 1e-3,
            ))
        checks.append(IdentityCheck(
            "double_laplace_quadrature", f"u={u},s={s}",
            double_laplace_numeric(u, s), double_laplace(u, s), 1e-3,
        ))
    return checks
