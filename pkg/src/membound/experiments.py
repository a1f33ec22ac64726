"""Sweep harness: per-(d, eps) measurements of (queries, memory bits, worst
suboptimality) for each algorithm over the fixed 10-instance corpus, plus
the two theoretical lower-bound rows, serialized to a deterministic CSV.

The worst case over the fixed corpus under-approximates the worst case over
the whole function class, so measured rows are upper-bound evidence only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace as _dc_replace

from .algorithms import com_config, gd_config, make_com, make_gd
from .instances import standard_corpus
from .protocol import Transcript, run

__all__ = [
    "TradeoffRecord",
    "PASS_FACTOR",
    "CSV_HEADER",
    "run_cell",
    "sweep",
    "records_to_csv",
    "run_single",
]

ALG_KINDS = ("gd", "com")

# Uniform pass criterion: achieved suboptimality <= 3 * eps, the constant the
# end-to-end analyses of both methods deliver.
PASS_FACTOR = 3.0

CSV_HEADER = "d,eps,alg,M_bits,T_queries,subopt,pass,label"

LABEL_GD = "GD-corner"
LABEL_COM = "CoM-corner"
LABEL_QUERY_BOUND = "lower-bound-query"
LABEL_MEMORY_BOUND = "lower-bound-memory"


@dataclass(frozen=True)
class TradeoffRecord:
    """One cell of the query/memory tradeoff picture.

    Measured rows carry run data; lower-bound rows carry theoretical values
    in the one relevant column and None elsewhere.
    """

    d: int
    eps: float
    alg: str
    M_bits: float | None
    T_queries: float | None
    subopt: float | None
    passed: bool | None
    label: str

    def csv_row(self) -> str:
        return ",".join(
            [
                str(self.d),
                repr(float(self.eps)),
                self.alg,
                _num(self.M_bits),
                _num(self.T_queries),
                _num(self.subopt),
                "" if self.passed is None else str(self.passed).lower(),
                self.label,
            ]
        )


def _num(v) -> str:
    if v is None:
        return ""
    f = float(v)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def _build_algorithm(d: int, eps: float, alg_kind: str, seed: int):
    if alg_kind == "gd":
        alg = make_gd(gd_config(d, eps))
        return _dc_replace(alg, meta=dict(alg.meta, seed=seed))
    if alg_kind == "com":
        return make_com(com_config(d, eps, seed=seed))
    raise ValueError(f"alg_kind must be one of {ALG_KINDS}, got {alg_kind!r}")


def run_single(d: int, eps: float, alg_kind: str, instance, seed: int) -> Transcript:
    """Run one algorithm on one instance at the standard L = B = 1 settings."""
    if instance.L > 1 + 1e-9 or instance.B > 1 + 1e-9:
        raise ValueError(
            f"instance outside the L = B = 1 class (L={instance.L:.6g}, B={instance.B:.6g})"
        )
    alg = _build_algorithm(d, eps, alg_kind, seed)
    return run(alg, instance)


def run_cell(d: int, eps: float, alg_kind: str, seed: int) -> TradeoffRecord:
    """Measure one tradeoff cell: worst suboptimality over the standard
    corpus plus the realized (T, M) of the algorithm at these settings."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if not (0 < eps <= 0.5):
        raise ValueError(f"eps must be in (0, 1/2] at L = B = 1, got {eps!r}")
    alg = _build_algorithm(d, eps, alg_kind, seed)
    worst = -math.inf
    peak = 0
    for inst in standard_corpus(d, seed):
        transcript = run(alg, inst)
        worst = max(worst, transcript.suboptimality)
        peak = max(peak, transcript.peak_memory_bits)
    return TradeoffRecord(
        d=d,
        eps=eps,
        alg=alg_kind,
        M_bits=peak,
        T_queries=alg.horizon,
        subopt=worst,
        passed=bool(worst <= PASS_FACTOR * eps),
        label=LABEL_GD if alg_kind == "gd" else LABEL_COM,
    )


def _failed_cell(d: int, eps: float, alg_kind: str) -> TradeoffRecord:
    return TradeoffRecord(
        d=d,
        eps=eps,
        alg=alg_kind,
        M_bits=None,
        T_queries=None,
        subopt=None,
        passed=False,
        label=LABEL_GD if alg_kind == "gd" else LABEL_COM,
    )


def query_bound_record(d: int, eps: float, const: float = 1.0) -> TradeoffRecord:
    """Theoretical query floor T >= const * d * log2(1/eps); the asymptotic
    statement hides the constant, so it is configurable."""
    return TradeoffRecord(
        d=d,
        eps=eps,
        alg="bound",
        M_bits=None,
        T_queries=const * d * math.log2(1 / eps),
        subopt=None,
        passed=None,
        label=LABEL_QUERY_BOUND,
    )


def memory_bound_record(d: int, eps: float) -> TradeoffRecord:
    """Theoretical memory floor M >= d * log2(1/(2 eps)): representing the
    answer alone needs that many bits."""
    return TradeoffRecord(
        d=d,
        eps=eps,
        alg="bound",
        M_bits=d * math.log2(1 / (2 * eps)),
        T_queries=None,
        subopt=None,
        passed=None,
        label=LABEL_MEMORY_BOUND,
    )


def sweep(
    d_list,
    eps_list,
    algs,
    seed: int,
    out_path=None,
    query_bound_const: float = 1.0,
) -> list[TradeoffRecord]:
    """Run every (d, eps, alg) cell plus the two bound rows per (d, eps).

    Rows come out in sorted (d, eps) order with algorithms in the order
    given, so the CSV is byte-identical across runs with equal arguments.
    A failing cell is recorded as failed rather than aborting the sweep.
    """
    d_list = sorted(set(int(d) for d in d_list))
    eps_list = sorted(set(float(e) for e in eps_list))
    algs = list(algs)
    if not d_list or not eps_list or not algs:
        raise ValueError("d_list, eps_list and algs must be nonempty")
    for a in algs:
        if a not in ALG_KINDS:
            raise ValueError(f"unknown algorithm kind {a!r}")
    records = []
    for d in d_list:
        for eps in eps_list:
            for a in algs:
                try:
                    records.append(run_cell(d, eps, a, seed))
                except Exception:
                    records.append(_failed_cell(d, eps, a))
            records.append(query_bound_record(d, eps, query_bound_const))
            records.append(memory_bound_record(d, eps))
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            fh.write(records_to_csv(records))
    return records


def records_to_csv(records) -> str:
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in records]) + "\n"
