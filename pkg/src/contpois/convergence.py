"""Binomial-to-Poisson convergence of the continuous laws.

Runs a schedule of continuous binomial laws with ``n * p(n) -> lam`` against
the continuous Poisson law, recording the largest CDF gap and the largest gap
between unit-interval masses ``[x, x+1)`` over an evaluation grid.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import special as sc

from .distributions import ContBinomialParams, ContPoissonParams, cbinom_cdf, cpois_cdf, interval_mass
from .errors import ConvergenceError, DomainError

DEFAULT_SCHEDULE = (16, 64, 256, 1024, 4096)
CSV_COLUMNS = ("N", "p", "sup_cdf_distance", "sup_interval_distance")


def default_grid(lam: float) -> np.ndarray:
    """200 uniform points on [0, lam + 6 sqrt(lam) + 4] plus the half-integers there."""
    top = lam + 6.0 * math.sqrt(lam) + 4.0
    halves = np.arange(0.5, top, 1.0)
    return np.unique(np.concatenate([np.linspace(0.0, top, 200), halves]))


@dataclass
class ConvergenceExperiment:
    lam: float
    n_schedule: Sequence[float] = DEFAULT_SCHEDULE
    grid: Sequence[float] | None = None
    p_rule: Callable[[float], float] | None = None

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError("lambda must be finite and positive")
        sched = [float(n) for n in self.n_schedule]
        if not sched:
            raise DomainError("the N schedule is empty")
        if any(not (math.isfinite(n) and n > 0) for n in sched):
            raise DomainError("every N must be finite and positive")
        if any(b <= a for a, b in zip(sched, sched[1:])):
            raise DomainError("the N schedule must be strictly increasing")
        self.n_schedule = tuple(sched)
        for n in sched:
            p = self.p_of(n)
            if not 0 < p < 1:
                raise DomainError(f"rule gives p = {p!r} outside (0, 1) at N = {n}")
        grid = default_grid(self.lam) if self.grid is None else np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or len(grid) == 0 or np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be a non-empty increasing sequence")
        if grid[0] < 0 or grid[-1] > min(sched) + 1.0:
            raise DomainError("grid points must lie in [0, min N + 1]")
        self.grid = grid

    def p_of(self, n: float) -> float:
        return self.lam / n if self.p_rule is None else float(self.p_rule(n))


@dataclass
class ConvergenceRecord:
    n: float
    p: float
    sup_cdf_distance: float
    sup_interval_distance: float
    interval_distances: np.ndarray = field(repr=False)


@dataclass
class ConvergenceReport:
    lam: float
    grid: np.ndarray
    records: list[ConvergenceRecord]

    @property
    def monotone(self) -> bool:
        """True when the sup CDF distance strictly decreases along the schedule."""
        d = [r.sup_cdf_distance for r in self.records]
        return all(b < a for a, b in zip(d, d[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            writer.writerow([_fmt(r.n), _fmt(r.p), _fmt(r.sup_cdf_distance), _fmt(r.sup_interval_distance)])
        return buf.getvalue()

    def to_json(self) -> str:
        body = {
            "lambda": self.lam,
            "grid_size": int(len(self.grid)),
            "grid_max": float(self.grid[-1]),
            "monotone": self.monotone,
            "records": [
                {"N": r.n, "p": r.p, "sup_cdf_distance": r.sup_cdf_distance,
                 "sup_interval_distance": r.sup_interval_distance}
                for r in self.records
            ],
        }
        return json.dumps(body, indent=2)


def _fmt(v: float) -> str:
    return repr(float(v))


def run_convergence(exp: ConvergenceExperiment) -> ConvergenceReport:
    grid = np.asarray(exp.grid)
    pois = ContPoissonParams(exp.lam)
    pois_cdf = np.asarray(cpois_cdf(pois, grid))
    pois_mass = np.asarray(interval_mass(pois, grid))
    records = []
    for n in exp.n_schedule:
        p = exp.p_of(n)
        binom = ContBinomialParams(n, p)
        try:
            bin_cdf = np.asarray(cbinom_cdf(binom, grid))
            ok = grid <= n
            bin_mass = np.asarray(interval_mass(binom, grid[ok]))
        except (ConvergenceError, DomainError, FloatingPointError) as err:
            raise type(err)(f"evaluation failed at N={n}, p={p}: {err}") from err
        cdf_gap = np.abs(bin_cdf - pois_cdf)
        mass_gap = np.full_like(grid, np.nan)
        mass_gap[ok] = np.abs(bin_mass - pois_mass[ok])
        records.append(ConvergenceRecord(
            n=n,
            p=p,
            sup_cdf_distance=float(np.max(cdf_gap)),
            sup_interval_distance=float(np.nanmax(mass_gap)),
            interval_distances=mass_gap,
        ))
    return ConvergenceReport(exp.lam, grid, records)


class IntervalMassCheck(NamedTuple):
    binomial_mass: float
    poisson_mass: float
    abs_diff: float


def interval_mass_limit_check(lam: float, n: float, x: float) -> IntervalMassCheck:
    """Masses of [x, x+1) under the binomial law with p = lam/n and the Poisson law."""
    if not (lam > 0 and n > 0 and lam / n < 1):
        raise DomainError("need lam > 0, n > 0 and lam / n < 1")
    if not 0 <= x <= n:
        raise DomainError("need 0 <= x <= n")
    b = float(interval_mass(ContBinomialParams(n, lam / n), x))
    q = float(interval_mass(ContPoissonParams(lam), x))
    return IntervalMassCheck(b, q, abs(b - q))


def falling_factor_ratio(n: float, x: float) -> float:
    """Gamma(n+1) / (Gamma(n-x+1) n**x), which tends to 1 as n grows."""
    return math.exp(sc.gammaln(n + 1.0) - sc.gammaln(n - x + 1.0) - x * math.log(n))
