"""Command-line front end.

Subcommands

    validate      check the standing model hypotheses on a grid
    rate          optimal certified rate (or a fixed --lambda certificate)
    simulate      one path dumped as CSV (t, state, local_time, is_jump)
    verify-exact  log-gap decay regression against the certified rate
    verify-bound  one-sided coupling-bound margins at selected times
    stationary    pooled empirical stationary distribution
    gap-rate      certified rate of a two-particle spread process
    gap-equiv     distributional equality of pair spread vs reduced model

Outputs are deterministic: artifacts are named {command}-{config hash} and a
given (config, seed) pair always produces byte-identical files. Exit codes:
0 success/pass, 1 usage or model errors, 2 verification failure or an
infeasible rate request. The root seed comes from --seed, else the RJD_SEED
environment variable, else a fixed default.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import levy, verify
from .model import load_model, validate_model
from .rate import (
    InfeasibleRateError,
    VLyapunov,
    certificate_at,
    k_value,
    optimize_lambda,
)
from .sim import simulate_rjd
from .streams import DEFAULT_SEED

__all__ = ["main", "run"]


def _parse_times(text: str):
    try:
        times = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"cannot parse time list {text!r}") from exc
    if not times:
        raise ValueError("empty time list")
    return sorted(times)


def _config_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def _seed_from(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get("RJD_SEED")
    if env is not None:
        return int(env)
    return DEFAULT_SEED


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rjd", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, pair=False):
        sp.add_argument("--model", required=True, help="model definition file (JSON)")
        sp.add_argument("--out", default="rjd-out", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="root seed (overrides RJD_SEED)")
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        return sp

    sp = common(sub.add_parser("validate", help="check model hypotheses"))
    sp.add_argument("--grid-step", type=float, default=None)

    sp = common(sub.add_parser("rate", help="certified convergence rate"))
    sp.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="fix the exponent instead of optimizing (stronger norm, lower rate)")

    sp = common(sub.add_parser("simulate", help="simulate one path, dump CSV"))
    sp.add_argument("--x0", type=float, default=0.0)
    sp.add_argument("--t-max", type=float, default=10.0)
    sp.add_argument("--dt", type=float, default=1e-3)

    sp = common(sub.add_parser("verify-exact", help="decay-rate regression"))
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--x1", type=float, default=0.0)
    sp.add_argument("--x2", type=float, default=2.0)
    sp.add_argument("--times", type=str, default="0.5,1,1.5,2,2.5,3")
    sp.add_argument("--paths", type=int, default=verify.RATE_TEST_PATHS)
    sp.add_argument("--dt", type=float, default=verify.DEFAULT_DT)

    sp = common(sub.add_parser("verify-bound", help="coupling-bound margins"))
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--x1", type=float, default=0.0)
    sp.add_argument("--x2", type=float, default=2.0)
    sp.add_argument("--times", type=str, default="1,2,3")
    sp.add_argument("--paths", type=int, default=verify.RATE_TEST_PATHS)
    sp.add_argument("--dt", type=float, default=verify.DEFAULT_DT)

    sp = common(sub.add_parser("stationary", help="empirical stationary law"))
    sp.add_argument("--x0", type=float, default=0.0)
    sp.add_argument("--t-max", type=float, default=40.0)
    sp.add_argument("--paths", type=int, default=verify.DIST_TEST_PATHS)
    sp.add_argument("--dt", type=float, default=verify.DEFAULT_DT)

    sp = common(sub.add_parser("gap-rate", help="certified rate of the pair spread"))
    sp.add_argument("--lambda", dest="lam", type=float, default=None)

    sp = common(sub.add_parser("gap-equiv", help="pair spread vs reduced model"))
    sp.add_argument("--x0", type=float, default=1.0, help="starting gap")
    sp.add_argument("--t-max", type=float, default=2.0)
    sp.add_argument("--paths", type=int, default=10_000)
    # the pair and the reduced model discretize the boundary differently
    # (rank crossing vs projection); the KS check needs a small step
    sp.add_argument("--dt", type=float, default=5e-5)

    return p


def run(argv=None) -> int:
    """Parse arguments, dispatch, write artifacts; returns the exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except InfeasibleRateError as exc:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "verdict": "fail",
            "error": str(exc),
            "min_sampled_k_max": exc.min_value,
            "argmin_lambda": exc.argmin,
        }
        _write_json(out_dir / f"{args.command}-infeasible.json", payload)
        print(f"FAIL {args.command}: {exc}")
        return 2
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    seed = _seed_from(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_text = Path(args.model).read_text(encoding="utf-8")
    cfg = {
        "command": args.command,
        "seed": seed,
        "model_sha": hashlib.sha256(model_text.encode()).hexdigest()[:12],
        "params": {
            k: v
            for k, v in sorted(vars(args).items())
            if k not in {"command", "model", "out", "seed", "threads"}
        },
    }
    tag = f"{args.command}-{_config_hash(cfg)}"

    if args.command in {"gap-rate", "gap-equiv"}:
        pair = levy.pair_model_from_config(json.loads(model_text))
        return _dispatch_pair(args, pair, seed, out_dir, tag)

    model = load_model(args.model)

    if args.command == "validate":
        rep = validate_model(model, grid_step=args.grid_step)
        _write_json(out_dir / f"{tag}.json", rep.to_dict())
        print(f"{'PASS' if rep.ok else 'FAIL'} validate: rho={rep.rho:g} "
              f"assumptions=({rep.assumption1_ok}, {rep.assumption2_ok}, {rep.assumption3_ok})")
        return 0 if rep.ok else 2

    if args.command == "rate":
        cert = optimize_lambda(model) if args.lam is None else certificate_at(model, args.lam)
        _write_json(out_dir / f"{tag}.json", cert.to_dict())
        print(f"OK rate: lambda*={cert.lambda_star:.6f} kappa={cert.kappa:.6f} "
              f"feasible=(0, {cert.feasible_interval[1]:.6f})")
        return 0

    if args.command == "simulate":
        rec = simulate_rjd(model, args.x0, args.t_max, args.dt, seed)
        rec.to_csv(out_dir / f"{tag}.csv")
        _write_json(
            out_dir / f"{tag}.json",
            {
                "n_jumps": rec.n_jumps,
                "final_state": float(rec.states[-1]),
                "final_local_time": float(rec.local_time[-1]),
                "seed": seed,
            },
        )
        print(f"OK simulate: T={args.t_max:g} jumps={rec.n_jumps} "
              f"final={rec.states[-1]:.6f}")
        return 0

    if args.command == "verify-exact":
        lam = args.lam if args.lam is not None else optimize_lambda(model).lambda_star
        times = _parse_times(args.times)
        fit = verify.exact_rate_test(
            model, lam, args.x1, args.x2, times, args.paths, args.dt, seed, threads=args.threads
        )
        v = VLyapunov(lam)
        k_lam = abs(k_value(model, 0.0, lam))
        predicted = (v(args.x2) - v(args.x1)) * np.exp(-k_lam * np.asarray(fit.times))
        _write_csv(
            out_dir / f"{tag}.csv",
            "t,estimate,stderr,predicted",
            zip(fit.times, fit.estimates, fit.stderrs, predicted),
        )
        _write_json(out_dir / f"{tag}.json", fit.to_dict())
        print(f"{'PASS' if fit.passed else 'FAIL'} verify-exact: slope={fit.slope:.6f} "
              f"target={fit.predicted_slope:.6f} tol={fit.tolerance:.6f}")
        return 0 if fit.passed else 2

    if args.command == "verify-bound":
        cert = optimize_lambda(model) if args.lam is None else certificate_at(model, args.lam)
        times = _parse_times(args.times)
        rep = verify.coupling_bound_check(
            model, cert, args.x1, args.x2, times, args.paths, args.dt, seed, threads=args.threads
        )
        _write_csv(out_dir / f"{tag}.csv", "t,estimate,stderr,bound", rep.csv_rows())
        _write_json(out_dir / f"{tag}.json", rep.to_dict())
        worst = min(r["margin"] for r in rep.rows)
        print(f"{'PASS' if rep.passed else 'FAIL'} verify-bound: worst margin={worst:.6f}")
        return 0 if rep.passed else 2

    if args.command == "stationary":
        t_end = args.t_max
        t_burn = 0.5 * t_end
        stride = max((t_end - t_burn) / 8.0, args.dt)
        emp = verify.estimate_stationary(
            model, t_burn, t_end, stride, args.paths, args.dt, seed, x0=args.x0,
            threads=args.threads,
        )
        _write_json(out_dir / f"{tag}.json", emp.to_dict())
        _write_csv(
            out_dir / f"{tag}.csv",
            "bin_lo,bin_hi,count",
            zip(emp.hist_edges[:-1], emp.hist_edges[1:], emp.hist_counts),
        )
        print(f"OK stationary: mean={emp.mean:.6f} second_moment={emp.second_moment:.6f} "
              f"n={emp.samples.size}")
        return 0

    raise ValueError(f"unknown command {args.command!r}")


def _dispatch_pair(args, pair, seed, out_dir, tag) -> int:
    if args.command == "gap-rate":
        model = levy.gap_model(pair)
        cert = optimize_lambda(model) if args.lam is None else certificate_at(model, args.lam)
        payload = cert.to_dict()
        payload["gap_model"] = {
            "g": float(model.dd.g_at(0.0)),
            "sigma2": float(model.dd.sigma2_at(0.0)),
            "jump_kind": model.jumps.kind,
        }
        _write_json(out_dir / f"{tag}.json", payload)
        print(f"OK gap-rate: g={payload['gap_model']['g']:g} "
              f"sigma2={payload['gap_model']['sigma2']:g} "
              f"lambda*={cert.lambda_star:.6f} kappa={cert.kappa:.6f}")
        return 0

    if args.command == "gap-equiv":
        rep = levy.gap_equivalence_test(
            pair, args.x0, args.t_max, args.paths, args.dt,
            seeds=(seed, seed + 1), threads=args.threads,
        )
        _write_json(out_dir / f"{tag}.json", rep.to_dict())
        print(f"{'PASS' if rep.passed else 'FAIL'} gap-equiv: KS={rep.statistic:.5f} "
              f"p={rep.p_value:.4f}")
        return 0 if rep.passed else 2

    raise ValueError(f"unknown command {args.command!r}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
