"""Command-line front end.

Every command writes its main output file plus ``<output>.manifest.json``
describing the run.  Exit codes: 0 success, 1 a deterministic identity check
failed (``laplace-check``), 2 invalid arguments, 3 numerical failure.
Statistical verdicts never change the exit code.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .convergence import DEFAULT_SCHEDULE, ConvergenceExperiment, run_convergence
from .distributions import (
    ContBinomialParams,
    ContPoissonParams,
    cdf,
    interval_mass,
    pdf,
    quantile,
    sample,
)
from .errors import ConvergenceError, DomainError, ExperimentDesignError
from .gamma_process import GammaProcessParams, HitTimeExperiment, ks_compare, run_hit_experiment
from .moments import laplace_battery, moment
from .rng import GENERATOR_NAME, RandomStream

OUTPUT_DIR_ENV = "CONTPOIS_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None
    library_version: str = __version__
    generator_name: str = GENERATOR_NAME
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())


def fmt(v) -> str:
    """Shortest decimal string that round-trips to the same double."""
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(v)


def parse_points(spec: str) -> np.ndarray:
    """``"1,2.5,4"`` or ``"start:stop:num"`` (inclusive linspace), mixable with commas."""
    out = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise DomainError(f"bad range {part!r}; expected start:stop:num")
            start, stop, num = float(bits[0]), float(bits[1]), int(bits[2])
            if num < 1:
                raise DomainError("range needs at least one point")
            out.extend(np.linspace(start, stop, num).tolist())
        else:
            out.append(float(part))
    if not out:
        raise DomainError("no evaluation points given")
    arr = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("evaluation points must be finite")
    return arr


def _output_path(args, default_name: str) -> Path:
    if args.output:
        return Path(args.output)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / default_name


def _write(path: Path, text: str, manifest: RunManifest) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    with open(str(path) + ".manifest.json", "w", newline="\n") as fh:
        json.dump(asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _distribution(args):
    if args.distribution == "cpois":
        if args.lam is None:
            raise UsageError("cpois needs --lambda")
        return ContPoissonParams(args.lam)
    if args.n is None or args.p is None:
        raise UsageError("cbinom needs --n and --p")
    return ContBinomialParams(args.n, args.p)


def cmd_eval(args, argv) -> int:
    dist = _distribution(args)
    if args.quantity == "moment":
        if not isinstance(dist, ContPoissonParams):
            raise UsageError("moments are available for cpois only")
        if args.k is None:
            raise UsageError("moment needs --k")
        route = {"tail": "tail_integral"}.get(args.route or "tail", args.route)
        value = moment(dist.lam, args.k, route)
        text = _csv(["k", "value"], [[args.k, fmt(value)]])
    else:
        if args.points is None:
            raise UsageError(f"{args.quantity} needs --points")
        pts = parse_points(args.points)
        if args.quantity == "cdf":
            vals = cdf(dist, pts)
        elif args.quantity == "pdf":
            vals = pdf(dist, pts, args.route or "derivative")
        elif args.quantity == "quantile":
            vals = quantile(dist, pts)
        else:
            vals = interval_mass(dist, pts)
        vals = np.atleast_1d(vals)
        text = _csv(["x", "value"], [[fmt(x), fmt(v)] for x, v in zip(pts, vals)])
    path = _output_path(args, f"eval-{args.distribution}-{args.quantity}.csv")
    _write(path, text, RunManifest("eval", {"argv": argv}, None))
    return 0


def cmd_sample(args, argv) -> int:
    dist = _distribution(args)
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    values = sample(dist, RandomStream(args.seed, args.stream_id), args.count)
    text = _csv(["value"], [[fmt(v)] for v in values])
    path = _output_path(args, f"sample-{args.distribution}.csv")
    _write(path, text, RunManifest("sample", {"argv": argv}, args.seed))
    return 0


def cmd_converge(args, argv) -> int:
    try:
        schedule = [float(v) for v in args.schedule.split(",") if v.strip()]
    except ValueError as err:
        raise UsageError(f"bad --schedule: {err}") from None
    exp = ConvergenceExperiment(args.lam, schedule)
    report = run_convergence(exp)
    path = _output_path(args, "converge.csv")
    manifest = RunManifest("converge", {"argv": argv}, None)
    _write(path, report.to_csv(), manifest)
    _write(path.with_suffix(".json"), report.to_json() + "\n", manifest)
    return 0


def _read_samples(path: str) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] and not _is_number(rows[0][0]):
        rows = rows[1:]
    return np.asarray([float(r[0]) for r in rows if r], dtype=float)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def cmd_gamma_hit(args, argv) -> int:
    path = _output_path(args, "gamma-hit.json")
    if args.ks_only:
        if args.samples is None or args.lam is None:
            raise UsageError("--ks-only needs --samples and --lambda")
        report = ks_compare(_read_samples(args.samples), ContPoissonParams(args.lam))
        _write(path, report.to_json() + "\n", RunManifest("gamma-hit", {"argv": argv}, None))
        return 0
    for name in ("alpha", "beta", "c", "dt", "n_paths", "seed"):
        if getattr(args, name) is None:
            raise UsageError(f"gamma-hit needs --{name.replace('_', '-')}")
    exp = HitTimeExperiment(
        GammaProcessParams(args.alpha, args.beta), args.c, args.dt, args.n_paths,
        RandomStream(args.seed, args.stream_id),
    )
    hits, report = run_hit_experiment(exp, workers=args.workers)
    body = {"experiment": exp.to_dict(), "report": report.to_dict(),
            "censored_paths": [int(i) for i in hits.censored]}
    manifest = RunManifest("gamma-hit", {"argv": argv}, args.seed)
    _write(path, json.dumps(body, indent=2, sort_keys=True) + "\n", manifest)
    if args.samples_out:
        _write(Path(args.samples_out), _csv(["value"], [[fmt(v)] for v in hits.values]), manifest)
    return 0


def cmd_laplace_check(args, argv) -> int:
    checks = laplace_battery()
    rows = [[c.identity, c.point, fmt(c.numeric), fmt(c.closed_form), fmt(c.rel_error), fmt(c.tolerance),
             "pass" if c.passed else "FAIL"] for c in checks]
    text = _csv(["identity", "point", "numeric", "closed_form", "rel_error", "tolerance", "verdict"], rows)
    _write(_output_path(args, "laplace-check.csv"), text, RunManifest("laplace-check", {"argv": argv}, None))
    return 0 if all(c.passed for c in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="contpois", description="Continuous Poisson and binomial laws: evaluation and checks.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def dist_flags(p):
        p.add_argument("distribution", choices=["cpois", "cbinom"])
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--n", type=float)
        p.add_argument("--p", type=float)
        p.add_argument("--output")

    p = sub.add_parser("eval", help="evaluate cdf, pdf, quantile, interval mass or moments")
    dist_flags(p)
    p.add_argument("quantity", choices=["cdf", "pdf", "quantile", "interval-mass", "moment"])
    p.add_argument("--points", help="comma list and/or start:stop:num ranges")
    p.add_argument("--k", type=int)
    p.add_argument("--route", choices=["derivative", "double_integral", "volterra", "tail"])
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sample", help="inverse-CDF samples")
    dist_flags(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stream-id", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("converge", help="binomial-to-Poisson convergence report")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--schedule", default=",".join(str(n) for n in DEFAULT_SCHEDULE))
    p.add_argument("--output")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("gamma-hit", help="Gamma-process first-passage experiment")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--n-paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--stream-id", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--samples-out", help="also dump the scaled hit times as CSV")
    p.add_argument("--ks-only", action="store_true", help="only compare --samples against --lambda")
    p.add_argument("--samples")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--output")
    p.set_defaults(func=cmd_gamma_hit)

    p = sub.add_parser("laplace-check", help="run the Laplace-transform identity battery")
    p.add_argument("--output")
    p.set_defaults(func=cmd_laplace_check)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, argv)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (UsageError, DomainError) as err:
        print(f"contpois: error: {err}", file=sys.stderr)
        return 2
    except (ConvergenceError, ExperimentDesignError) as err:
        print(f"contpois: numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
