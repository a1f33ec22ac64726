"""Command-line interface: single runs with transcripts, tradeoff sweeps to
CSV, and the verification checks."""

from __future__ import annotations

import argparse
import sys

from .algorithms import gd_config, make_gd, truncate_algorithm
from .experiments import records_to_csv, run_single, sweep
from .instances import make_hard_family, parse_instance_token
from .verifier import (
    verify_cardinality_bound,
    verify_grunbaum,
    verify_packing_bound,
    verify_separation,
)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _cmd_run(args) -> int:
    instance = parse_instance_token(args.instance)
    transcript = run_single(args.d, args.eps, args.alg, instance, args.seed)
    if args.transcript:
        with open(args.transcript, "w", newline="") as fh:
            fh.write(transcript.serialize())
    out = " ".join(repr(float(v)) for v in transcript.output)
    sub = "NA" if transcript.suboptimality is None else repr(transcript.suboptimality)
    print(f"alg={args.alg} instance={instance.token}")
    print(f"output {out}")
    print(f"suboptimality {sub}")
    print(f"queries {transcript.horizon} peak_bits {transcript.peak_memory_bits}")
    return 0


def _cmd_sweep(args) -> int:
    records = sweep(
        args.d,
        args.eps,
        args.algs,
        seed=args.seed,
        out_path=args.out,
        query_bound_const=args.query_bound_const,
    )
    if args.out:
        print(f"wrote {len(records)} rows to {args.out}")
    else:
        sys.stdout.write(records_to_csv(records))
    return 0


def _cmd_verify(args) -> int:
    if args.check == "packing":
        report = verify_packing_bound(args.d, args.b, args.alpha, budget=args.budget)
    elif args.check == "separation":
        family = make_hard_family(args.d, args.eps)
        report = verify_separation(family, args.eps, n_probes=args.n_probes, seed=args.seed)
    elif args.check == "cardinality":
        family = make_hard_family(args.d, args.eps)
        alg = truncate_algorithm(make_gd(gd_config(args.d, args.eps)), args.m_bits)
        report = verify_cardinality_bound(alg, family, args.eps)
    else:
        report = verify_grunbaum(
            trials=args.trials,
            d_range=tuple(args.d_range),
            seed=args.seed,
            n_samples=args.n_samples,
        )
    print(report.text())
    if args.csv:
        with open(args.csv, "a", newline="") as fh:
            fh.write(report.csv_row() + "\n")
    return 0 if report.status != "fail" else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="membound",
        description="Memory-bounded first-order convex optimization harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one algorithm on one instance")
    p_run.add_argument("--alg", choices=["gd", "com"], required=True)
    p_run.add_argument("--d", type=int, required=True)
    p_run.add_argument("--eps", type=float, required=True)
    p_run.add_argument("--instance", required=True, help="instance token, e.g. dist:d=2:c=0.5,0.0")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--transcript", help="write the full transcript to this path")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="measure tradeoff cells and write CSV")
    p_sweep.add_argument("--d", type=_int_list, required=True, help="comma-separated dimensions")
    p_sweep.add_argument("--eps", type=_float_list, required=True, help="comma-separated accuracies")
    p_sweep.add_argument("--algs", type=lambda s: s.split(","), default=["gd", "com"])
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--out", help="CSV output path (stdout when omitted)")
    p_sweep.add_argument("--query-bound-const", type=float, default=1.0)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run one verification check")
    p_verify.add_argument(
        "--check", choices=["grunbaum", "packing", "separation", "cardinality"], required=True
    )
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--csv", help="append the report as a CSV row to this path")
    p_verify.add_argument("--d", type=int, default=2)
    p_verify.add_argument("--eps", type=float, default=0.1)
    p_verify.add_argument("--b", type=float, default=1.0, help="ball radius (packing)")
    p_verify.add_argument("--alpha", type=float, default=0.5, help="separation (packing)")
    p_verify.add_argument("--budget", type=int, default=None, help="packing budget")
    p_verify.add_argument("--n-probes", type=int, default=100_000)
    p_verify.add_argument("--m-bits", type=int, default=4, help="memory budget (cardinality)")
    p_verify.add_argument("--trials", type=int, default=50)
    p_verify.add_argument("--d-range", type=_int_list, default=[2, 3, 4, 5, 6])
    p_verify.add_argument("--n-samples", type=int, default=100_000)
    p_verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
