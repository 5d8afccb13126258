import csv
import io
import json
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from contpois.convergence import (
    CSV_COLUMNS,
    ConvergenceExperiment,
    default_grid,
    falling_factor_ratio,
    interval_mass_limit_check,
    run_convergence,
)
from contpois.errors import DomainError

SCHEDULE = (16, 64, 256, 1024)


@pytest.fixture(scope="module")
def report():
    return run_convergence(ConvergenceExperiment(2.0, SCHEDULE))


class TestExperiment:
    def test_default_grid(self):
        g = default_grid(2.0)
        top = 2 + 6 * math.sqrt(2) + 4
        assert g[0] == 0.0 and g[-1] == pytest.approx(top)
        assert np.all(np.diff(g) > 0)
        assert all(np.any(np.isclose(g, h)) for h in np.arange(0.5, top, 1.0))

    @pytest.mark.parametrize("kw", [
        {"lam": 2.0, "n_schedule": (1.5, 16)},          # p = lam / N >= 1
        {"lam": 2.0, "n_schedule": (64, 16)},           # not increasing
        {"lam": 2.0, "n_schedule": ()},
        {"lam": -1.0, "n_schedule": (16,)},
        {"lam": 2.0, "n_schedule": (16,), "grid": [0.0, 20.0]},   # beyond min N + 1
        {"lam": 2.0, "n_schedule": (16,), "grid": [1.0, 0.5]},
    ])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            ConvergenceExperiment(**kw)


class TestReport:
    def test_sup_cdf_strictly_decreasing(self, report):
        d = [r.sup_cdf_distance for r in report.records]
        assert all(b < a for a, b in zip(d, d[1:]))
        assert report.monotone

    def test_distances_in_unit_interval(self, report):
        for r in report.records:
            assert 0 <= r.sup_cdf_distance <= 1
            assert 0 <= r.sup_interval_distance <= 1
            v = r.interval_distances[~np.isnan(r.interval_distances)]
            assert np.all((v >= 0) & (v <= 1))

    def test_interval_masses_converge_pointwise(self, report):
        first, last = report.records[0].interval_distances, report.records[-1].interval_distances
        assert np.all(last < first)

    def test_cdf_bound(self, report):
        last = report.records[-1].sup_cdf_distance
        assert last <= report.records[0].sup_cdf_distance
        assert last <= 0.05

    def test_x_zero_exact_arithmetic(self, report):
        # |(1 - 2/1024)**1024 - e**-2| with the power exact and e**-2 at 50 digits.
        mpmath.mp.dps = 50
        power = Fraction(1022, 1024) ** 1024
        exact = abs(mpmath.mpf(power.numerator) / power.denominator - mpmath.exp(-2))
        assert float(exact) == pytest.approx(2.6e-4, rel=0.03)
        rec = report.records[-1]
        assert report.grid[0] == 0.0
        assert rec.interval_distances[0] == pytest.approx(float(exact), rel=1e-9)

    def test_per_n_evaluation_is_order_free(self, report):
        for rec in report.records:
            solo = run_convergence(ConvergenceExperiment(2.0, (rec.n,), grid=report.grid)).records[0]
            assert solo.sup_cdf_distance == rec.sup_cdf_distance
            assert np.array_equal(solo.interval_distances, rec.interval_distances, equal_nan=True)

    def test_perturbed_rule(self):
        exp = ConvergenceExperiment(2.0, SCHEDULE, p_rule=lambda n: 2.0 / n + n ** -2.0)
        rep = run_convergence(exp)
        d = [r.sup_cdf_distance for r in rep.records]
        assert d[-1] < d[0] and d[-1] <= 0.05

    def test_csv(self, report):
        text = report.to_csv()
        assert "\r" not in text
        rows = list(csv.reader(io.StringIO(text)))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert len(rows) == 1 + len(SCHEDULE)
        for row, rec in zip(rows[1:], report.records):
            assert float(row[2]) == rec.sup_cdf_distance  # exact round trip

    def test_json(self, report):
        body = json.loads(report.to_json())
        assert body["monotone"] is True
        assert [r["N"] for r in body["records"]] == list(map(float, SCHEDULE))


class TestLimitCheck:
    def test_x_zero(self):
        chk = interval_mass_limit_check(2.0, 50.0, 0.0)
        assert chk.binomial_mass == pytest.approx((1 - 2 / 50) ** 50, rel=1e-13)
        assert chk.poisson_mass == pytest.approx(math.exp(-2), rel=1e-14)

    def test_monotone_along_n(self):
        diffs = [interval_mass_limit_check(1.0, n, 1.5).abs_diff for n in (1e2, 1e3, 1e4)]
        assert diffs[0] > diffs[1] > diffs[2]

    def test_falling_factor(self):
        assert abs(falling_factor_ratio(1e4, 2.5) - 1) <= 1e-3

    @pytest.mark.parametrize("args", [(2.0, 1.0, 0.5), (1.0, 10.0, 11.0), (1.0, 10.0, -1.0)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            interval_mass_limit_check(*args)
