"""Command-line entry point: ``run``, ``batch``, ``validate`` and ``params``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .batch import BatchError, run_batch
from .export import outcome_dict, write_csv, write_outcome
from .scenario import ScenarioError, load_scenario
from .sim import NumericError, run, with_seed
from .svg import emit_snapshots

EXIT_OK, EXIT_INVALID, EXIT_FAILED, EXIT_IO = 0, 1, 2, 3


def parse_seeds(text: str) -> list[int]:
    """``"1..20"`` (inclusive) or ``"1,4,9"``."""
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise ValueError("empty seed range")
        return list(range(lo, hi + 1))
    return [int(s) for s in text.split(",") if s.strip()]


def _load(path: str):
    try:
        return load_scenario(path), None
    except OSError as exc:
        return None, (EXIT_IO, f"cannot read {path}: {exc}")
    except ScenarioError as exc:
        return None, (EXIT_INVALID, str(exc))


def cmd_run(args) -> int:
    cfg, err = _load(args.scenario)
    if err:
        print(err[1], file=sys.stderr)
        return err[0]
    if args.seed is not None:
        cfg = with_seed(cfg, args.seed)
    try:
        log, out = run(cfg)
    except NumericError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAILED
    times = [float(t) for t in args.snapshots.split(",")] if args.snapshots else []
    if args.export_dir:
        try:
            d = Path(args.export_dir)
            d.mkdir(parents=True, exist_ok=True)
            write_csv(log, d / "trajectory.csv")
            write_outcome(out, d / "outcome.json")
            emit_snapshots(log, times, cfg, d)
        except OSError as exc:
            print(f"export failed: {exc}", file=sys.stderr)
            return EXIT_IO
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_INVALID
    print(json.dumps(outcome_dict(out), sort_keys=True))
    return EXIT_OK if out.status == "done" else EXIT_FAILED


def cmd_batch(args) -> int:
    cfg, err = _load(args.scenario)
    if err:
        print(err[1], file=sys.stderr)
        return err[0]
    try:
        seeds = parse_seeds(args.seeds)
    except ValueError as exc:
        print(f"bad --seeds: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        summary = run_batch(cfg, seeds, args.workers)
    except BatchError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAILED
    for seed, o in summary.outcomes:
        print(f"seed {seed}: {o.status} T_f1={o.T_f1} T_f2={o.T_f2} min_J={o.min_J} max_funnel={o.max_funnel}")
    print(
        f"done {summary.n_done}/{summary.n_runs}  min_J={summary.min_J}  max_funnel={summary.max_funnel}  "
        f"wall={summary.wall_total:.1f}s"
    )
    return EXIT_OK if summary.n_done == summary.n_runs else EXIT_FAILED


def cmd_validate(args) -> int:
    cfg, err = _load(args.scenario)
    if err:
        print(err[1], file=sys.stderr)
        return err[0]
    print(f"{args.scenario}: ok")
    return EXIT_OK


def cmd_params(args) -> int:
    cfg, err = _load(args.scenario)
    if err:
        print(err[1], file=sys.stderr)
        return err[0]
    f = cfg.formation()
    print(f"N            {f.n}")
    print(f"eps_D        {f.eps_d:.6f}")
    print(f"l_xi_min     {f.l_xi_min:.6f}")
    print(f"eps_B        {f.eps_b:.6f}")
    print(f"apothem      {f.apothem:.6f}")
    print(f"spacing      {f.eps_d * 2 * math.sin(f.lam / 2):.6f}")
    print(f"V_B          {cfg.beacon_bound():.6f}")
    print(f"feasible     alpha_hat={cfg.alpha_hat} > V_A/V_D={cfg.V_A / cfg.V_D:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="safeherd", description=__doc__)
    sub = p.add_subparsers(dest="verb", required=True)
    r = sub.add_parser("run", help="simulate one scenario")
    r.add_argument("scenario")
    r.add_argument("--seed", type=int)
    r.add_argument("--export-dir")
    r.add_argument("--snapshots", help="comma-separated times in seconds")
    r.set_defaults(func=cmd_run)
    b = sub.add_parser("batch", help="seed sweep")
    b.add_argument("scenario")
    b.add_argument("--seeds", required=True, help="a..b or a,b,c")
    b.add_argument("--workers", type=int, default=1)
    b.set_defaults(func=cmd_batch)
    v = sub.add_parser("validate", help="parse and validate a scenario")
    v.add_argument("scenario")
    v.set_defaults(func=cmd_validate)
    q = sub.add_parser("params", help="print the synthesized formation and fence speed bound")
    q.add_argument("scenario")
    q.set_defaults(func=cmd_params)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
