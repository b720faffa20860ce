"""Command-line front end.

Exit codes: 0 success, 1 usage or malformed input, 2 degenerate input
(all Y equal), 3 bootstrap degeneracy exhausted, 4 configuration mismatch.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from ._seeding import default_threads, derive_rng, derive_seed
from .core import PairedSample, tie_counts, xi
from .exceptions import ConfigMismatchError, DegeneracyExhaustedError, DegenerateSampleError, InvalidInputError
from .resampling import bootstrap_variance, confidence_interval
from .selection import DEFAULT_GAMMAS, BickelSakov, Cluster, FixedPower, select_m
from .simulation import (
    CalibrationResult,
    Gaussian,
    PoissonMixture,
    StudentT,
    StudyConfig,
    calibrate_truth,
    model_to_dict,
    run_study,
)

DEFAULT_SEED = 20240101
EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE, EXIT_EXHAUSTED, EXIT_MISMATCH = 0, 1, 2, 3, 4
RECORD_COLUMNS = ["run", "xi_n", "chosen_m", "sigma_star_sq", "ci_low", "ci_high", "covered"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- input ---------------------------------------------------------------


def _is_number(field: str) -> bool:
    try:
        float(field)
    except ValueError:
        return False
    return True


def parse_pairs(text: str) -> PairedSample:
    """Parse two-column ``x,y`` CSV text; a non-numeric first row is a header."""
    xs, ys = [], []
    first = True
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not f.strip() for f in row):
            continue
        if row[0].lstrip().startswith("#"):
            continue
        fields = [f.strip() for f in row]
        if first:
            first = False
            if not all(_is_number(f) for f in fields):
                continue
        if len(fields) != 2:
            raise InvalidInputError(f"line {lineno}: expected 2 columns, got {len(fields)}")
        try:
            x, y = float(fields[0]), float(fields[1])
        except ValueError:
            raise InvalidInputError(f"line {lineno}: cannot parse {','.join(fields)!r} as numbers") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InvalidInputError(f"line {lineno}: non-finite value")
        xs.append(x)
        ys.append(y)
    if len(xs) < 2:
        raise InvalidInputError(f"need at least 2 data rows, found {len(xs)}")
    return PairedSample(xs, ys)


def read_pairs(path: str) -> tuple[PairedSample, str]:
    """Sample plus a 64-bit content digest of the raw file."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    digest = hashlib.blake2b(raw, digest_size=8).hexdigest()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError:
        raise InvalidInputError(f"{path} is not valid UTF-8") from None
    return parse_pairs(text), digest


# -- output --------------------------------------------------------------


def manifest(command: str, params: dict, seed: int, input_digest: str | None = None) -> dict:
    return {
        "command": command,
        "parameters": params,
        "seed": seed,
        "tool_version": __version__,
        "input_digest": input_digest,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def _clean(obj):
    # JSON has no NaN; uncomputed entries become null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_records(path: Path, records, man: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("# manifest: " + json.dumps(man, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in RECORD_COLUMNS])


def read_records(path) -> list[dict]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    out = []
    for row in rows:
        out.append(
            {
                "run": int(row["run"]),
                "xi_n": float(row["xi_n"]),
                "chosen_m": int(row["chosen_m"]),
                "sigma_star_sq": float(row["sigma_star_sq"]),
                "ci_low": float(row["ci_low"]),
                "ci_high": float(row["ci_high"]),
                "covered": bool(int(row["covered"])),
            }
        )
    return out


# -- argument helpers ------------------------------------------------------


def _rule_from_args(args):
    if args.rule == "fixed":
        return FixedPower(args.gamma)
    if args.rule == "bickel-sakov":
        return BickelSakov(args.q, args.m_floor)
    gammas = DEFAULT_GAMMAS
    if args.gammas:
        try:
            gammas = tuple(float(g) for g in args.gammas.split(","))
        except ValueError:
            raise UsageError(f"--gammas must be comma-separated numbers, got {args.gammas!r}") from None
    return Cluster(gammas)


def _rule_params(rule) -> dict:
    if isinstance(rule, FixedPower):
        return {"rule": "fixed", "gamma": rule.gamma}
    if isinstance(rule, BickelSakov):
        return {"rule": "bickel-sakov", "q": rule.q, "m_floor": rule.m_floor}
    return {"rule": "cluster", "gammas": list(rule.gammas)}


def _model_from_args(args):
    if args.model == "gaussian":
        return Gaussian(args.rho)
    if args.model == "t":
        return StudentT(args.nu, args.rho)
    return PoissonMixture(args.lam, args.rho)


def _threads(args) -> int:
    return args.threads if args.threads else default_threads()


# -- commands --------------------------------------------------------------


def cmd_xi(args, out) -> int:
    sample, digest = read_pairs(args.input)
    value = xi(sample, derive_rng(args.seed, 0))
    x_ties, y_ties = tie_counts(sample)
    report = {
        "xi": value,
        "n": sample.n,
        "x_ties": x_ties,
        "y_ties": y_ties,
        "manifest": manifest("xi", {"input": str(args.input)}, args.seed, digest),
    }
    out.write(dumps(report))
    return EXIT_OK


def cmd_bootstrap(args, out) -> int:
    sample, digest = read_pairs(args.input)
    rule = _rule_from_args(args)
    xi_n = xi(sample, derive_rng(args.seed, 0))
    trace = select_m(sample, rule, args.B, derive_seed(args.seed, 1), _threads(args))
    sigma_sq = bootstrap_variance(trace.chosen)
    est = confidence_interval(xi_n, math.sqrt(sigma_sq), sample.n, args.level)
    params = {"input": str(args.input), **_rule_params(rule), "B": args.B, "level": args.level}
    report = {
        "xi_n": xi_n,
        "n": sample.n,
        "chosen_m": trace.chosen_m,
        "chosen_index": trace.chosen_index,
        "candidate_ms": trace.candidate_ms,
        "distance_matrix": trace.pairwise_distances.tolist(),
        "sigma_star_sq": sigma_sq,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "level": est.level,
        "z": est.z,
        "bootstrap_center": trace.chosen.center,
        "centering": "monte-carlo-mean",
        "redraws": sum(c.redraws for c in trace.candidates),
        "discrete_warning": trace.discrete_warning,
        "manifest": manifest("bootstrap", params, args.seed, digest),
    }
    out.write(dumps(report))
    return EXIT_OK


def cmd_calibrate(args, out) -> int:
    model = _model_from_args(args)
    res = calibrate_truth(model, args.n_cal, args.M_cal, args.seed, _threads(args))
    params = {**model_to_dict(model), "n_cal": args.n_cal, "M_cal": args.M_cal}
    report = {**res.to_dict(), "manifest": manifest("calibrate", params, args.seed)}
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    out.write(text)
    return EXIT_OK


def cmd_study(args, out) -> int:
    model = _model_from_args(args)
    rule = _rule_from_args(args)
    threads = _threads(args)
    if args.truth:
        try:
            data = json.loads(Path(args.truth).read_text())
            data.pop("manifest", None)
            truth = CalibrationResult.from_dict(data)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise InvalidInputError(f"cannot load calibration from {args.truth}: {exc}") from None
        if truth.model != model:
            raise ConfigMismatchError(f"calibration file is for {model_to_dict(truth.model)}, study asks for {model_to_dict(model)}")
    elif args.calibrate:
        truth = calibrate_truth(model, args.n_cal, args.M_cal, derive_seed(args.seed, 2), threads)
    else:
        raise UsageError("study needs --truth FILE or --calibrate")
    cfg = StudyConfig(model=model, n=args.n, M=args.M, B=args.B, rule=rule, level=args.level, seed=args.seed)
    rep = run_study(cfg, truth, threads)
    params = {
        **model_to_dict(model),
        "n": args.n,
        "M": args.M,
        "B": args.B,
        **_rule_params(rule),
        "level": args.level,
        "truth": truth.to_dict(),
    }
    man = manifest("study", params, args.seed)
    report = {
        "rmse": rep.rmse,
        "rrmse": rep.rrmse,
        "coverage": rep.coverage,
        "coverage_se": rep.coverage_se,
        "mean_ci_length": rep.mean_ci_length,
        "n_runs": len(rep.records),
        "n_failed": rep.n_failed,
        "truth_xi": rep.truth_xi,
        "truth_sigma_sq": rep.truth_sigma_sq,
        "manifest": man,
    }
    text = dumps(report)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.json").write_text(text)
        write_records(outdir / "records.csv", rep.records, man)
    out.write(text)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _add_rule_flags(p):
    p.add_argument("--rule", choices=["fixed", "bickel-sakov", "cluster"], default="cluster")
    p.add_argument("--gamma", type=float, default=0.5, help="exponent for --rule fixed")
    p.add_argument("--gammas", default=None, help="comma-separated exponents for --rule cluster")
    p.add_argument("--q", type=float, default=0.5, help="shrink factor for --rule bickel-sakov")
    p.add_argument("--m-floor", dest="m_floor", type=int, default=3)
    p.add_argument("--B", type=int, default=2000, help="bootstrap replicates per candidate m")
    p.add_argument("--level", type=float, default=0.95)


def _add_model_flags(p):
    p.add_argument("--model", choices=["gaussian", "t", "poisson"], required=True)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--nu", type=float, default=3.0)
    p.add_argument("--lambda", dest="lam", type=float, default=2.0)


def _add_common(p):
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $XIBOOT_THREADS or all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xiboot", description="Chatterjee's xi with m-out-of-n bootstrap inference")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("xi", help="rank correlation of a two-column CSV")
    p.add_argument("input")
    _add_common(p)
    p.set_defaults(func=cmd_xi)

    p = sub.add_parser("bootstrap", help="variance estimate and confidence interval")
    p.add_argument("input")
    _add_rule_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("calibrate", help="simulate population xi and limiting variance")
    _add_model_flags(p)
    p.add_argument("--n-cal", dest="n_cal", type=int, default=20000)
    p.add_argument("--M-cal", dest="M_cal", type=int, default=5000)
    p.add_argument("--out", default=None, help="also write the JSON here")
    _add_common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("study", help="Monte Carlo study of RMSE and coverage")
    _add_model_flags(p)
    _add_rule_flags(p)
    p.set_defaults(B=500)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--M", type=int, default=200)
    p.add_argument("--truth", default=None, help="calibration JSON from `xiboot calibrate`")
    p.add_argument("--calibrate", action="store_true", help="calibrate inline instead of --truth")
    p.add_argument("--n-cal", dest="n_cal", type=int, default=20000)
    p.add_argument("--M-cal", dest="M_cal", type=int, default=5000)
    p.add_argument("--out", default=None, help="directory for report.json and records.csv")
    _add_common(p)
    p.set_defaults(func=cmd_study)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("xiboot: error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except DegenerateSampleError as exc:
        print(f"xiboot: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DegeneracyExhaustedError as exc:
        print(f"xiboot: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except ConfigMismatchError as exc:
        print(f"xiboot: configuration mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (InvalidInputError, UsageError) as exc:
        print(f"xiboot: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
