"""Executable desk-scale checks of the lower-bound machinery: lattice
packings meet the volume bound, hard families are pairwise separated,
small-memory algorithms provably fail on some family member, and halfspace
cuts through centroids retain the expected volume fraction.

Each check returns a CheckReport that is reproducible from (name,
parameters, seed); failures always carry a concrete counterexample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    CutSet,
    DegenerateBodyError,
    Halfspace,
    estimate_centroid,
    estimate_volume_fraction,
    greedy_packing,
    spawn_rng,
    spawn_seed,
)
from .instances import ConvexInstance
from .protocol import AlgorithmSpec, count_distinct_outputs, run

__all__ = [
    "CheckReport",
    "PASS",
    "FAIL",
    "REFUSED",
    "verify_packing_bound",
    "verify_separation",
    "verify_cardinality_bound",
    "verify_grunbaum",
]

PASS = "pass"
FAIL = "fail"
REFUSED = "refused"

GRUNBAUM_LO = 1.0 / math.e
GRUNBAUM_HI = 1.0 - 1.0 / math.e


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification: status plus the numbers behind it."""

    name: str
    params: dict
    status: str
    measured: dict = field(default_factory=dict)
    bound: float | None = None
    counterexample: dict | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def text(self) -> str:
        lines = [f"check {self.name}: {self.status.upper()}"]
        if self.params:
            lines.append("  params: " + _kv(self.params))
        if self.bound is not None:
            lines.append(f"  bound: {self.bound!r}")
        if self.measured:
            lines.append("  measured: " + _kv(self.measured))
        if self.counterexample:
            lines.append("  counterexample: " + _kv(self.counterexample))
        if self.note:
            lines.append(f"  note: {self.note}")
        return "\n".join(lines)

    def csv_row(self) -> str:
        bound = "" if self.bound is None else repr(self.bound)
        fields = [
            self.name,
            _kv(self.params),
            self.status,
            _kv(self.measured),
            bound,
            _kv(self.counterexample or {}),
            self.note,
        ]
        return ",".join('"' + f.replace('"', '""') + '"' for f in fields)


def _kv(d: dict) -> str:
    return "; ".join(f"{k}={_scalar(v)}" for k, v in d.items())


def _scalar(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, np.ndarray):
        return "(" + " ".join(repr(float(x)) for x in v) + ")"
    return str(v)


def verify_packing_bound(
    d: int, B: float, alpha: float, budget: int | None = None
) -> CheckReport:
    """Check the greedy packing reaches the covering lower bound (B/alpha)^d."""
    if d > 4:
        raise ValueError(f"packing check is budgeted for d <= 4, got d={d}")
    target = (B / alpha) ** d
    if budget is None:
        budget = math.ceil(target)
    packing = greedy_packing(d, B, alpha, budget=budget)
    size = len(packing)
    params = {"d": d, "B": float(B), "alpha": float(alpha), "budget": budget}
    measured = {"size": size}
    if size + 1e-9 >= min(target, budget):
        return CheckReport(
            "packing-bound", params, PASS, measured, bound=target
        )
    return CheckReport(
        "packing-bound",
        params,
        FAIL,
        measured,
        bound=target,
        counterexample={"size": size, "required": target},
    )


def verify_separation(
    family: list[ConvexInstance], eps: float, n_probes: int = 100_000, seed: int = 0
) -> CheckReport:
    """Check the defining property of the hard family: no point is
    eps-optimal for two members at once.

    Probes n_probes random points plus every member's optimum. Refuses (not
    a failure) when the optima are closer than 2 eps / L, i.e. the family
    was not built for this eps.
    """
    if not family:
        raise ValueError("family must be nonempty")
    L = family[0].L
    centers = np.array([inst.x_star for inst in family])
    n = centers.shape[0]
    params = {"N": n, "eps": float(eps), "n_probes": int(n_probes), "seed": seed}
    if n >= 2:
        gaps = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=2)
        min_gap = float(np.min(gaps[np.triu_indices(n, k=1)]))
        if min_gap <= 2 * eps / L:
            return CheckReport(
                "separation",
                params,
                REFUSED,
                measured={"min_gap": min_gap},
                bound=2 * eps / L,
                note="family optima are not 2*eps/L separated; construction precondition violated",
            )
    rng = spawn_rng(seed)
    d = centers.shape[1]
    radius = float(np.max(np.linalg.norm(centers, axis=1))) + eps / L
    dirs = rng.standard_normal((n_probes, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    probes = dirs * (radius * rng.random(n_probes) ** (1.0 / d))[:, None]
    probes = np.vstack([probes, centers])
    # f_i(x) <= eps iff ||x - x_i|| <= eps / L.
    close = (
        np.linalg.norm(probes[:, None, :] - centers[None, :, :], axis=2) <= eps / L
    )
    per_probe = close.sum(axis=1)
    bad = np.flatnonzero(per_probe >= 2)
    measured = {
        "probes": int(probes.shape[0]),
        "eps_optimal_hits": int(per_probe.sum()),
    }
    if bad.size:
        i = int(bad[0])
        members = np.flatnonzero(close[i]).tolist()
        return CheckReport(
            "separation",
            params,
            FAIL,
            measured,
            bound=float(eps),
            counterexample={"probe": probes[i], "members": str(members)},
        )
    return CheckReport("separation", params, PASS, measured, bound=float(eps))


def verify_cardinality_bound(
    alg: AlgorithmSpec, family: list[ConvexInstance], eps: float
) -> CheckReport:
    """Run the output-counting argument end to end: when the family is
    separated and larger than 2^M, the algorithm must return a > eps
    suboptimal answer on at least one member; find and report one.
    """
    M = alg.memory_budget
    N = len(family)
    params = {"alg": alg.name, "M": M, "N": N, "eps": float(eps)}
    if 2**M >= N:
        return CheckReport(
            "cardinality-bound",
            params,
            REFUSED,
            measured={"outputs_cap": 2**M},
            note="bound not binding: 2^M >= N",
        )
    n_outputs = count_distinct_outputs(alg)
    sep = verify_separation(family, eps, n_probes=1000, seed=0)
    if not sep.passed:
        return CheckReport(
            "cardinality-bound",
            params,
            REFUSED,
            measured={"distinct_outputs": n_outputs},
            note=f"family separation check came back {sep.status}",
        )
    subopts = []
    for inst in family:
        subopts.append(run(alg, inst).suboptimality)
    subopts = np.array(subopts)
    failing = np.flatnonzero(subopts > eps)
    measured = {
        "distinct_outputs": n_outputs,
        "failing_members": int(failing.size),
        "worst_suboptimality": float(np.max(subopts)),
    }
    if failing.size == 0:
        return CheckReport(
            "cardinality-bound",
            params,
            FAIL,
            measured,
            bound=float(eps),
            counterexample={"reason": "no failing member found despite 2^M < N"},
        )
    i = int(failing[int(np.argmax(subopts[failing]))])
    return CheckReport(
        "cardinality-bound",
        params,
        PASS,
        measured,
        bound=float(eps),
        counterexample={
            "failing_instance": family[i].token,
            "suboptimality": float(subopts[i]),
        },
    )


def _random_cut_body(d: int, n_cuts: int, seed: int) -> tuple[CutSet, np.ndarray]:
    """Unit ball with n_cuts random halfspace cuts, each anchored at a point
    sampled inside the current body. Returns the body and an interior-ish
    start point for further sampling."""
    body = CutSet(1.0)
    anchor = np.zeros(d)
    for k in range(n_cuts):
        rng = spawn_rng(seed, k)
        inner = estimate_centroid(
            body,
            seed=spawn_seed(seed, 100 + k),
            n_samples=50,
            burn_in=50,
            start=anchor,
            dimension=d,
        )
        normal = rng.standard_normal(d)
        normal /= np.linalg.norm(normal)
        body = body.with_cut(normal, inner)
        anchor = inner
    return body, anchor


def verify_grunbaum(
    trials: int = 50,
    d_range: tuple[int, ...] = (2, 3, 4, 5, 6),
    seed: int = 0,
    n_samples: int = 100_000,
) -> CheckReport:
    """Cut random convex bodies through their estimated centroids and check
    the retained volume fraction stays within [1/e - 3s, 1 - 1/e + 3s] for
    the binomial sampling deviation s.

    Also runs a negative control: an off-center cut (distance 0.8 from the
    unit ball's centroid) must exit the band, confirming the test has power.
    Degenerate-body aborts are counted separately, not failed.
    """
    if max(d_range) > 8:
        raise ValueError(f"grunbaum check is budgeted for d <= 8, got {max(d_range)}")
    params = {
        "trials": trials,
        "d_range": "-".join(str(d) for d in d_range),
        "seed": seed,
        "n_samples": n_samples,
    }
    fractions = []
    aborts = 0
    worst = None  # (band distance, trial info)
    for i in range(trials):
        d = d_range[i % len(d_range)]
        trial_seed = spawn_seed(seed, i)
        rng = spawn_rng(seed, i, 1)
        n_cuts = int(rng.integers(0, 11))
        try:
            body, anchor = _random_cut_body(d, n_cuts, trial_seed)
            centroid = estimate_centroid(
                body,
                seed=spawn_seed(seed, i, 2),
                n_samples=n_samples,
                start=anchor,
                dimension=d,
            )
            direction = rng.standard_normal(d)
            direction /= np.linalg.norm(direction)
            frac = estimate_volume_fraction(
                body,
                Halfspace(direction, centroid),
                seed=spawn_seed(seed, i, 3),
                n_samples=n_samples,
                start=centroid,
            )
        except DegenerateBodyError:
            aborts += 1
            continue
        sigma = math.sqrt(max(frac * (1 - frac), 1e-12) / n_samples)
        lo, hi = GRUNBAUM_LO - 3 * sigma, GRUNBAUM_HI + 3 * sigma
        fractions.append(frac)
        dist = max(lo - frac, frac - hi)
        if worst is None or dist > worst[0]:
            worst = (dist, {"trial": i, "d": d, "n_cuts": n_cuts, "fraction": frac})

    # Negative control: cut far off-center; the small cap must fall below the band.
    d0 = d_range[0]
    ball = CutSet(1.0)
    e1 = np.zeros(d0)
    e1[0] = 1.0
    control = estimate_volume_fraction(
        ball,
        Halfspace(-e1, 0.8 * e1),  # keeps {x_1 >= 0.8}, the small cap
        seed=spawn_seed(seed, trials, 4),
        n_samples=n_samples,
    )
    control_sigma = math.sqrt(max(control * (1 - control), 1e-12) / n_samples)
    control_exits = control < GRUNBAUM_LO - 3 * control_sigma or control > GRUNBAUM_HI + 3 * control_sigma

    measured = {
        "trials_run": len(fractions),
        "degenerate_aborts": aborts,
        "min_fraction": float(min(fractions)) if fractions else float("nan"),
        "max_fraction": float(max(fractions)) if fractions else float("nan"),
        "control_fraction": float(control),
    }
    in_band = worst is not None and worst[0] <= 0
    if in_band and control_exits and fractions:
        return CheckReport("grunbaum", params, PASS, measured, bound=GRUNBAUM_LO)
    counter = None
    if worst is not None and worst[0] > 0:
        counter = worst[1]
    elif not control_exits:
        counter = {"control_fraction": control, "reason": "negative control stayed in band"}
    return CheckReport(
        "grunbaum", params, FAIL, measured, bound=GRUNBAUM_LO, counterexample=counter
    )
