"""Command line front end.

    dsalearn simulate     --config FILE [--out PATH|-] [--seed N] [--runs N] [--threads N]
    dsalearn bound        --config FILE [--out PATH|-]
    dsalearn trace        --config FILE [--out PATH|-] [--seed N] [--runs N] [--threads N]
    dsalearn validate     --config FILE
    dsalearn echo-config  --config FILE

Exit status: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from dataclasses import replace

import numpy as np

from .bound import upper_bound
from .config import ConfigError, ExperimentSpec, emit_config, parse_config
from .markov import validate
from .observation import access_threshold, db_to_amplitude, false_alarm
from .policy import PolicyKind
from .sim import run_monte_carlo

SIMULATE_COLUMNS = (
    "policy", "snr_db", "zeta", "mean_discounted_reward", "std_err",
    "interference_rate", "interference_ci_lo", "interference_ci_hi",
    "upper_bound", "runs", "horizon", "seed",
)
BOUND_COLUMNS = ("snr_db", "zeta", "alpha", "epsilon", "upper_bound")
TRACE_COLUMNS = ("slot", "mean_mass_on_truth", "q05", "q95")

_KNOWN_TEST = (PolicyKind.G1_KNOWN, PolicyKind.G2_ACK, PolicyKind.G3_COMBINED)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    target = os.path.abspath(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".tmp-", suffix=".csv")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from None
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def known_epsilon(spec: ExperimentSpec, snr_db: float, zeta: float) -> float:
    theta = db_to_amplitude(snr_db, spec.sigma)
    return false_alarm(access_threshold(zeta, theta, spec.sigma), spec.sigma)


def cmd_simulate(spec: ExperimentSpec, threads: int = 1) -> list[dict]:
    rows = []
    for kind, zeta, snr in spec.cells():
        res = run_monte_carlo(spec.sim_config(kind, zeta, snr), threads=threads)
        ub = None
        if kind in _KNOWN_TEST and spec.channels <= 16:
            ub = upper_bound(spec.model, spec.alpha, known_epsilon(spec, snr, zeta))
        inter = res.interference
        rows.append({
            "policy": kind.value,
            "snr_db": float(snr),
            "zeta": float(zeta),
            "mean_discounted_reward": res.mean_reward,
            "std_err": res.std_err,
            "interference_rate": inter.rate,
            "interference_ci_lo": inter.ci_lo,
            "interference_ci_hi": inter.ci_hi,
            "upper_bound": ub,
            "runs": res.runs,
            "horizon": spec.horizon,
            "seed": spec.seed,
        })
    return rows


def cmd_bound(spec: ExperimentSpec) -> list[dict]:
    rows = []
    for zeta in spec.zeta:
        for snr in spec.snr_db:
            eps = known_epsilon(spec, snr, zeta)
            rows.append({
                "snr_db": float(snr),
                "zeta": float(zeta),
                "alpha": spec.alpha,
                "epsilon": eps,
                "upper_bound": upper_bound(spec.model, spec.alpha, eps),
            })
    return rows


def cmd_trace(spec: ExperimentSpec, threads: int = 1) -> list[dict]:
    mass = run_monte_carlo(spec.trace_config(), threads=threads).mass_on_truth
    mean = mass.mean(axis=0)
    q05, q95 = np.quantile(mass, [0.05, 0.95], axis=0)
    return [
        {"slot": k, "mean_mass_on_truth": float(mean[k]), "q05": float(q05[k]), "q95": float(q95[k])}
        for k in range(mass.shape[1])
    ]


def cmd_validate(spec: ExperimentSpec) -> str:
    problems = validate(spec.model)
    for kind, zeta, snr in spec.cells():
        spec.sim_config(kind, zeta, snr)
    if problems:
        raise ConfigError("; ".join(problems))
    return f"ok: {len(list(spec.cells()))} cells\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dsalearn", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("simulate", "bound", "trace", "validate", "echo-config"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, metavar="PATH")
        if name in ("simulate", "bound", "trace"):
            p.add_argument("--out", default="-", metavar="PATH", help="output CSV, '-' for stdout")
        if name in ("simulate", "trace"):
            p.add_argument("--seed", type=int, help="override the master seed")
            p.add_argument("--runs", type=int, help="override the episode count")
            p.add_argument("--threads", type=int, default=1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = parse_config(args.config)
        if getattr(args, "seed", None) is not None:
            spec = replace(spec, seed=args.seed)
        if getattr(args, "runs", None) is not None:
            if args.runs < 1:
                raise ConfigError("must be >= 1", "--runs")
            spec = replace(spec, runs=args.runs)
        if args.command == "echo-config":
            sys.stdout.write(emit_config(spec))
        elif args.command == "validate":
            sys.stdout.write(cmd_validate(spec))
        elif args.command == "bound":
            write_atomic(args.out, to_csv(BOUND_COLUMNS, cmd_bound(spec)))
        elif args.command == "simulate":
            write_atomic(args.out, to_csv(SIMULATE_COLUMNS, cmd_simulate(spec, args.threads)))
        else:
            write_atomic(args.out, to_csv(TRACE_COLUMNS, cmd_trace(spec, args.threads)))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # invariant violations surfacing from model construction
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
