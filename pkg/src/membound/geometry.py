"""Convex-body primitives: ball-and-halfspace bodies, seeded hit-and-run
sampling for centroid and volume-fraction estimates, and greedy lattice
packings of the ball.

Everything here is a pure function of its arguments including the seed:
random streams come from numpy Generators keyed by (master_seed, round), so
any estimate can be replayed bit-exactly. The walk itself is a numba kernel
fed with pre-generated random numbers; no RNG state lives inside it.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "DegenerateBodyError",
    "Halfspace",
    "CutSet",
    "PackingSet",
    "spawn_seed",
    "spawn_rng",
    "default_sample_budget",
    "default_burn_in",
    "estimate_centroid",
    "estimate_volume_fraction",
    "greedy_packing",
]

SAMPLES_ENV_VAR = "MEMBOUND_SAMPLES"

_LATTICE_EPS = 1e-9


class DegenerateBodyError(RuntimeError):
    """The sampler could not find an interior point: the body is (numerically)
    empty or lower-dimensional."""


@dataclass(frozen=True, eq=False)
class Halfspace:
    """The set {x : <normal, x - anchor> <= 0}. A zero normal is the whole space."""

    normal: np.ndarray
    anchor: np.ndarray

    def contains(self, x) -> bool:
        return float(np.dot(self.normal, np.asarray(x) - self.anchor)) <= 0.0


class CutSet:
    """A ball of given radius intersected with an ordered list of halfspace cuts.

    Membership is exact and O(#cuts); cuts accumulate, so successive bodies
    are nested by construction.
    """

    def __init__(self, radius: float, cuts: tuple[Halfspace, ...] = ()):
        if not radius > 0:
            raise ValueError(f"radius must be positive, got {radius!r}")
        self.radius = float(radius)
        self.cuts = tuple(cuts)

    @property
    def n_cuts(self) -> int:
        return len(self.cuts)

    def with_cut(self, normal, anchor) -> "CutSet":
        h = Halfspace(
            np.asarray(normal, dtype=float).copy(),
            np.asarray(anchor, dtype=float).copy(),
        )
        return CutSet(self.radius, self.cuts + (h,))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        if float(np.linalg.norm(x)) > self.radius:
            return False
        return all(h.contains(x) for h in self.cuts)

    def _arrays(self, d: int):
        # (normals, offsets) with offsets[j] = <g_j, c_j>, the kernel's form.
        k = self.n_cuts
        normals = np.zeros((k, d))
        offsets = np.zeros(k)
        for j, h in enumerate(self.cuts):
            normals[j] = h.normal
            offsets[j] = float(np.dot(h.normal, h.anchor))
        return normals, offsets


@dataclass(frozen=True, eq=False)
class PackingSet:
    """Points in the radius-B ball with pairwise L2 distance > separation."""

    points: np.ndarray
    separation: float

    def __len__(self) -> int:
        return self.points.shape[0]


def spawn_seed(master_seed: int, *key: int) -> int:
    """Derive a child seed from a master seed and an index key.

    This is the "hash(master_seed, t)" of the determinism contract, realized
    with numpy's SeedSequence spawning so replayed rounds reproduce their
    random streams bit-exactly.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def spawn_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(spawn_seed(master_seed, *key) if key else int(master_seed))


def default_sample_budget() -> int:
    """Default hit-and-run sample count; MEMBOUND_SAMPLES overrides."""
    raw = os.environ.get(SAMPLES_ENV_VAR)
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError(f"{SAMPLES_ENV_VAR} must be >= 1, got {raw!r}")
        return n
    return 2000


def default_burn_in(d: int) -> int:
    return 100 * int(d)


@njit(cache=True)
def _walk(x, radius, normals, offsets, dirs, unifs, burn_in, fail_limit, samples):
    """Hit-and-run chain over ball(radius) cut by <g_j, x> <= offsets[j].

    Writes post-burn-in states into `samples`; returns (#samples written,
    status) with status 1 when `fail_limit` consecutive chords came up empty.
    """
    n_steps = dirs.shape[0]
    d = x.shape[0]
    k = normals.shape[0]
    u = np.empty(d)
    fails = 0
    wrote = 0
    for i in range(n_steps):
        nv = 0.0
        for j in range(d):
            nv += dirs[i, j] * dirs[i, j]
        nv = math.sqrt(nv)
        if nv == 0.0:
            fails += 1
            if fails >= fail_limit:
                return wrote, 1
            continue
        for j in range(d):
            u[j] = dirs[i, j] / nv
        xu = 0.0
        xx = 0.0
        for j in range(d):
            xu += x[j] * u[j]
            xx += x[j] * x[j]
        disc = xu * xu + radius * radius - xx
        if disc <= 0.0:
            fails += 1
            if fails >= fail_limit:
                return wrote, 1
            continue
        root = math.sqrt(disc)
        lo = -xu - root
        hi = -xu + root
        for c in range(k):
            gu = 0.0
            gx = 0.0
            for j in range(d):
                gu += normals[c, j] * u[j]
                gx += normals[c, j] * x[j]
            slack = offsets[c] - gx
            if slack < 0.0:
                slack = 0.0
            if gu > 0.0:
                t = slack / gu
                if t < hi:
                    hi = t
            elif gu < 0.0:
                t = slack / gu
                if t > lo:
                    lo = t
        span = hi - lo
        if span <= 0.0 or not math.isfinite(span):
            fails += 1
            if fails >= fail_limit:
                return wrote, 1
            continue
        fails = 0
        t = lo + unifs[i] * span
        for j in range(d):
            x[j] += t * u[j]
        if i >= burn_in:
            for j in range(d):
                samples[wrote, j] = x[j]
            wrote += 1
    return wrote, 0


def _check_start(body: CutSet, x: np.ndarray) -> None:
    # Tolerant membership: boundary starts (the previous centroid, on the
    # newest cut plane) are expected; genuinely outside points are caller bugs.
    if float(np.linalg.norm(x)) > body.radius * (1 + 1e-9):
        raise DegenerateBodyError(
            f"start point with norm {np.linalg.norm(x):.6g} lies outside the "
            f"radius-{body.radius:.6g} ball"
        )
    for j, h in enumerate(body.cuts):
        violation = float(np.dot(h.normal, x - h.anchor))
        if violation > 1e-9 * (1 + float(np.linalg.norm(h.normal))):
            raise DegenerateBodyError(
                f"start point violates cut {j} by {violation:.6g}; no interior "
                "starting point available"
            )


def _run_chain(body: CutSet, d: int, seed: int, n_samples: int, burn_in: int, start):
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    if start is None:
        x0 = np.zeros(d)
    else:
        x0 = np.asarray(start, dtype=float).copy()
        if x0.shape != (d,) or not np.all(np.isfinite(x0)):
            raise ValueError("start point must be a finite vector of the body's dimension")
    _check_start(body, x0)
    rng = np.random.default_rng(int(seed))
    steps = burn_in + n_samples
    dirs = rng.standard_normal((steps, d))
    unifs = rng.random(steps)
    normals, offsets = body._arrays(d)
    samples = np.empty((n_samples, d))
    wrote, status = _walk(
        x0, body.radius, normals, offsets, dirs, unifs, burn_in, 50 * d, samples
    )
    if status != 0 or wrote == 0:
        raise DegenerateBodyError(
            f"no interior point found after {50 * d} consecutive empty chords "
            f"(radius {body.radius:.3g}, {body.n_cuts} cuts); body is empty or degenerate"
        )
    return samples[:wrote]


def estimate_centroid(
    K: CutSet,
    seed: int,
    n_samples: int | None = None,
    burn_in: int | None = None,
    start=None,
    dimension: int | None = None,
) -> np.ndarray:
    """Monte Carlo centroid of K: the mean of hit-and-run samples.

    The chain starts from `start` (the caller threads the previous round's
    centroid; defaults to the origin, valid for the un-cut ball) and is a
    pure function of (K, seed, n_samples, burn_in, start): equal arguments
    give bit-identical results.
    """
    d = _body_dimension(K, start, dimension)
    if n_samples is None:
        n_samples = default_sample_budget()
    if burn_in is None:
        burn_in = default_burn_in(d)
    samples = _run_chain(K, d, seed, n_samples, burn_in, start)
    return samples.mean(axis=0)


def estimate_volume_fraction(
    K: CutSet,
    H: Halfspace,
    seed: int,
    n_samples: int | None = None,
    burn_in: int | None = None,
    start=None,
) -> float:
    """Fraction of hit-and-run samples from K that fall in the halfspace H."""
    d = int(np.asarray(H.normal).shape[0])
    if n_samples is None:
        n_samples = default_sample_budget()
    if burn_in is None:
        burn_in = default_burn_in(d)
    samples = _run_chain(K, d, seed, n_samples, burn_in, start)
    side = (samples - H.anchor) @ H.normal
    return float(np.mean(side <= 0.0))


def _body_dimension(K: CutSet, start, dimension) -> int:
    if dimension is not None:
        return int(dimension)
    if K.n_cuts:
        return int(K.cuts[0].normal.shape[0])
    if start is not None:
        return int(np.asarray(start).shape[0])
    raise ValueError(
        "dimension of an un-cut ball is ambiguous; pass dimension= or start="
    )


def greedy_packing(d: int, B: float, alpha: float, budget: int) -> PackingSet:
    """Greedy alpha-separated packing of the radius-B ball.

    Scans the origin-centered cubic lattice of spacing alpha/sqrt(d)
    restricted to the ball, in lexicographic order, admitting a point iff its
    distance to every admitted point exceeds alpha; stops at `budget` points.
    A maximal pass is also an alpha-covering of the scanned ball, so the
    result size reaches (B/alpha)^d whenever the budget permits.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if not (0 < alpha < 2 * B):
        raise ValueError(
            f"need 0 < alpha < 2B (alpha >= 2B admits a single point), got alpha={alpha!r}, B={B!r}"
        )
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    h = alpha / math.sqrt(d)
    k_max = int(math.floor(B / h + _LATTICE_EPS))
    axis = np.arange(-k_max, k_max + 1, dtype=float) * h
    if len(axis) ** d > 5e7:
        raise ValueError(
            f"lattice of {len(axis)}^{d} points is beyond the enumeration budget"
        )
    mesh = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    in_ball = np.sum(mesh * mesh, axis=1) <= B * B * (1 + _LATTICE_EPS)
    candidates = mesh[in_ball]
    admitted = np.empty((min(budget, candidates.shape[0]), d))
    n = 0
    a2 = alpha * alpha
    for point in candidates:
        if n and float(np.min(np.sum((admitted[:n] - point) ** 2, axis=1))) <= a2:
            continue
        admitted[n] = point
        n += 1
        if n >= budget:
            break
    return PackingSet(points=admitted[:n].copy(), separation=float(alpha))
