"""The two reference memory-bounded methods, expressed as decoder/encoder/
output families with explicit bit accounting.

Gradient descent keeps (current iterate, best iterate, best value) as three
fixed-width quantized fields. Center of mass appends one (quantized
gradient, quantized value) record per round and reconstructs everything
else -- the cut bodies and their centroids -- by replaying the stored cuts
with per-round derived seeds, so the anchors never consume memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import (
    CutSet,
    default_burn_in,
    default_sample_budget,
    estimate_centroid,
    spawn_seed,
)
from .protocol import AlgorithmSpec, FirstOrderReply, MemoryState
from .quantization import (
    ScalarCodec,
    VectorCodec,
    decode_scalar,
    decode_vector,
    encode_scalar,
    encode_vector,
    make_scalar_codec,
    make_vector_codec,
)

__all__ = [
    "GDConfig",
    "CoMConfig",
    "gd_config",
    "com_config",
    "make_gd",
    "make_com",
    "replay_centroids",
    "truncate_algorithm",
    "constant_algorithm",
    "gd_covering_bound_bits",
    "com_covering_bound_bits",
]

# Unprojected descent iterates drift: ||x_t - x*||^2 grows by at most
# eta^2 L^2 + D^2 + 2 D ||x_t - x*|| per round, which with eta = B/(L sqrt(T))
# and D = B/T keeps iterates inside ~3.9B and pre-quantization points inside
# ~4.1B for every T >= 1. 5B gives the codec a safe margin.
ITERATE_RADIUS_FACTOR = 5.0


@dataclass(frozen=True)
class GDConfig:
    """Problem parameters plus the derived step size, quantization error and
    codecs for the three-field descent layout."""

    d: int
    L: float
    B: float
    eps: float
    T: int
    stepsize: float
    iterate_error: float
    iterate_codec: VectorCodec
    value_codec: ScalarCodec

    @property
    def layout_bits(self) -> int:
        """Fixed state width: iterate, best iterate, best value."""
        return 2 * self.iterate_codec.bits_per_vector + self.value_codec.bits_per_scalar

    @property
    def value_bound(self) -> float:
        return self.value_codec.hi


@dataclass(frozen=True)
class CoMConfig:
    """Problem parameters plus codecs and sampling budget for the cut-replay
    center-of-mass layout (one gradient+value record appended per round)."""

    d: int
    L: float
    B: float
    eps: float
    alpha: float
    T: int
    slack_factor: int
    gradient_codec: VectorCodec
    value_codec: ScalarCodec
    output_codec: VectorCodec
    seed: int
    n_samples: int
    burn_in: int

    @property
    def record_bits(self) -> int:
        return self.gradient_codec.bits_per_vector + self.value_codec.bits_per_scalar

    @property
    def layout_bits(self) -> int:
        return self.T * self.record_bits

    @property
    def value_bound(self) -> float:
        return self.value_codec.hi


def gd_config(
    d: int, eps: float, L: float = 1.0, B: float = 1.0, T: int | None = None
) -> GDConfig:
    """Build the descent configuration for target accuracy eps.

    T defaults to ceil(9 L^2 B^2 / eps^2), the smallest horizon with a
    3 L B / sqrt(T) <= eps best-iterate guarantee; smaller T is rejected.
    Iterates are quantized to L2 error D = B/T, values to step eps with
    round-down so the stored best never beats the true best.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if not (eps > 0 and L > 0 and B > 0):
        raise ValueError("eps, L, B must be positive")
    t_min = 9 * L * L * B * B / (eps * eps)
    if T is None:
        T = math.ceil(t_min)
    if T < t_min * (1 - 1e-12):
        raise ValueError(f"T={T} below the guarantee threshold {t_min:.6g}")
    D = B / T
    V = 2 * L * B
    return GDConfig(
        d=int(d),
        L=float(L),
        B=float(B),
        eps=float(eps),
        T=int(T),
        stepsize=B / (L * math.sqrt(T)),
        iterate_error=D,
        iterate_codec=make_vector_codec(d, ITERATE_RADIUS_FACTOR * B, D),
        value_codec=make_scalar_codec(-V, V, eps, rounding="down"),
    )


def com_config(
    d: int,
    eps: float,
    L: float = 1.0,
    B: float = 1.0,
    slack_factor: int = 2,
    seed: int = 0,
    n_samples: int | None = None,
    burn_in: int | None = None,
) -> CoMConfig:
    """Build the center-of-mass configuration for target accuracy eps.

    alpha = eps / (4 L B); the horizon is ceil(3 d ln(1/alpha)) times
    slack_factor (default 2: Monte Carlo centroids weaken the exact-centroid
    volume-halving constant, so we run longer and verify the end-to-end
    guarantee empirically). Gradients are quantized to L2 error eps/(4B),
    values to step eps (nearest), the returned point to L2 error eps/L.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if not (eps > 0 and L > 0 and B > 0):
        raise ValueError("eps, L, B must be positive")
    if eps > L * B / 2:
        raise ValueError(f"need eps <= LB/2, got eps={eps!r} with L={L!r}, B={B!r}")
    if slack_factor < 1:
        raise ValueError(f"slack_factor must be >= 1, got {slack_factor}")
    alpha = eps / (4 * L * B)
    T = int(math.ceil(3 * d * math.log(1 / alpha))) * int(slack_factor)
    V = 2 * L * B
    return CoMConfig(
        d=int(d),
        L=float(L),
        B=float(B),
        eps=float(eps),
        alpha=alpha,
        T=T,
        slack_factor=int(slack_factor),
        gradient_codec=make_vector_codec(d, L, eps / (4 * B)),
        value_codec=make_scalar_codec(-V, V, eps, rounding="nearest"),
        output_codec=make_vector_codec(d, B, eps / L),
        seed=int(seed),
        n_samples=int(n_samples) if n_samples is not None else default_sample_budget(),
        burn_in=int(burn_in) if burn_in is not None else default_burn_in(d),
    )


def _cap_norm(x: np.ndarray, radius: float) -> np.ndarray:
    # Keeps encoder/decoder maps total; never triggers on in-model runs.
    n = float(np.linalg.norm(x))
    if n > radius:
        return x * (radius / n)
    return x


def _clamp(v: float, codec: ScalarCodec) -> float:
    return min(max(float(v), codec.lo), codec.hi)


def make_gd(cfg: GDConfig) -> AlgorithmSpec:
    """Memory-bounded gradient descent over the three-field layout.

    Layout (MSB first): encode(x_t) || encode(x_best) || encode(F_best).
    The encoder compares the raw oracle value against the decoded stored
    best, so round-down quantization preserves F_best <= F(x_best).
    """
    t_min = 9 * cfg.L**2 * cfg.B**2 / cfg.eps**2
    if cfg.T < t_min * (1 - 1e-12):
        raise ValueError(f"T={cfg.T} below the guarantee threshold {t_min:.6g}")
    vec = cfg.iterate_codec
    val = cfg.value_codec
    if vec.dimension != cfg.d:
        raise ValueError("iterate codec dimension does not match the configuration")
    nv = vec.bits_per_vector
    M = cfg.layout_bits
    d = cfg.d
    radius = vec.radius

    def _iterate(state: MemoryState) -> np.ndarray:
        if len(state.bits) < M:
            return np.zeros(d)
        return decode_vector(vec, state.bits[:nv], clamp=True)

    def decode(t: int, state: MemoryState) -> np.ndarray:
        return _iterate(state)

    def encode(t: int, state: MemoryState, reply: FirstOrderReply) -> MemoryState:
        x_t = _iterate(state)
        if len(state.bits) < M:
            best_val = math.inf
            best_bits = value_bits = ""
        else:
            best_bits = state.bits[nv : 2 * nv]
            value_bits = state.bits[2 * nv :]
            best_val = decode_scalar(val, value_bits, clamp=True)
        if reply.value < best_val:
            best_bits = encode_vector(vec, _cap_norm(x_t, radius))
            value_bits = encode_scalar(val, _clamp(reply.value, val))
        x_next = x_t - cfg.stepsize * reply.subgradient
        iterate_bits = encode_vector(vec, _cap_norm(x_next, radius))
        return MemoryState(iterate_bits + best_bits + value_bits, M)

    def output(state: MemoryState) -> np.ndarray:
        if len(state.bits) < M:
            return np.zeros(d)
        return decode_vector(vec, state.bits[nv : 2 * nv], clamp=True)

    return AlgorithmSpec(
        name="gd",
        dimension=d,
        memory_budget=M,
        horizon=cfg.T,
        decode=decode,
        encode=encode,
        output=output,
        meta={"eps": cfg.eps, "L": cfg.L, "B": cfg.B, "V": cfg.value_bound},
    )


def _parse_records(cfg: CoMConfig, bits: str) -> list[tuple[np.ndarray, float]]:
    rec = cfg.record_bits
    gb = cfg.gradient_codec.bits_per_vector
    out = []
    for i in range(len(bits) // rec):
        chunk = bits[i * rec : (i + 1) * rec]
        g = decode_vector(cfg.gradient_codec, chunk[:gb], clamp=True)
        v = decode_scalar(cfg.value_codec, chunk[gb:], clamp=True)
        out.append((g, v))
    return out


def replay_centroids(
    cfg: CoMConfig, records: list[tuple[np.ndarray, float]], count: int | None = None
) -> list[np.ndarray]:
    """Recompute centroids c_0 .. c_{count-1} from stored cut records.

    Body j is the ball cut by records[0..j-1], each cut anchored at the
    centroid it was measured from; centroid j uses the seed derived for
    round j+1 and starts its walk from the previous centroid, so the replay
    reproduces the original estimates bit-exactly.
    """
    if count is None:
        count = len(records)
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > len(records) + 1:
        raise ValueError(f"need at least {count - 1} records, have {len(records)}")
    body = CutSet(cfg.B)
    centroids: list[np.ndarray] = []
    start = None
    for j in range(count):
        c = estimate_centroid(
            body,
            seed=spawn_seed(cfg.seed, j + 1),
            n_samples=cfg.n_samples,
            burn_in=cfg.burn_in,
            start=start,
            dimension=cfg.d,
        )
        centroids.append(c)
        if j + 1 < count:
            body = body.with_cut(records[j][0], c)
        start = c
    return centroids


def make_com(cfg: CoMConfig) -> AlgorithmSpec:
    """Memory-bounded center of mass with cut replay.

    Layout: T appended records of encode(gradient) || encode(value). The
    decoder replays all stored cuts to rebuild the current body and queries
    its fresh Monte Carlo centroid; the output replays every centroid, takes
    the stored-value argmin (ties to the earliest round) and returns it
    through the output codec.
    """
    gcodec = cfg.gradient_codec
    M = cfg.layout_bits
    d = cfg.d

    def decode(t: int, state: MemoryState) -> np.ndarray:
        records = _parse_records(cfg, state.bits)[: t - 1]
        return replay_centroids(cfg, records, count=len(records) + 1)[-1]

    def encode(t: int, state: MemoryState, reply: FirstOrderReply) -> MemoryState:
        g_bits = encode_vector(gcodec, _cap_norm(np.asarray(reply.subgradient, float), cfg.L))
        v_bits = encode_scalar(cfg.value_codec, _clamp(reply.value, cfg.value_codec))
        return MemoryState(state.bits + g_bits + v_bits, M)

    def output(state: MemoryState) -> np.ndarray:
        records = _parse_records(cfg, state.bits)
        if not records:
            return np.zeros(d)
        centroids = replay_centroids(cfg, records, count=len(records))
        values = np.array([v for _, v in records])
        best = centroids[int(np.argmin(values))]
        bits = encode_vector(cfg.output_codec, _cap_norm(best, cfg.B))
        return decode_vector(cfg.output_codec, bits)

    return AlgorithmSpec(
        name="com",
        dimension=d,
        memory_budget=M,
        horizon=cfg.T,
        decode=decode,
        encode=encode,
        output=output,
        meta={
            "eps": cfg.eps,
            "L": cfg.L,
            "B": cfg.B,
            "V": cfg.value_bound,
            "seed": cfg.seed,
        },
    )


def truncate_algorithm(alg: AlgorithmSpec, memory_budget: int) -> AlgorithmSpec:
    """Restrict an algorithm to a smaller bit budget.

    States are the first `memory_budget` bits of the inner layout; decoders
    and the output map see them zero-padded back to the inner width. The
    result is a legitimate (deliberately lossy) member of the smaller-memory
    class, used to exhibit output-cardinality failures.
    """
    inner = alg.memory_budget
    if not 0 <= memory_budget < inner:
        raise ValueError(f"truncation budget must be in [0, {inner}), got {memory_budget}")

    def pad(state: MemoryState) -> MemoryState:
        return MemoryState(state.bits + "0" * (inner - len(state.bits)), inner)

    def decode(t: int, state: MemoryState) -> np.ndarray:
        return alg.decode(t, pad(state))

    def encode(t: int, state: MemoryState, reply: FirstOrderReply) -> MemoryState:
        full = alg.encode(t, pad(state), reply)
        return MemoryState(full.bits[:memory_budget], memory_budget)

    def output(state: MemoryState) -> np.ndarray:
        return alg.output(pad(state))

    return AlgorithmSpec(
        name=f"{alg.name}-trunc{memory_budget}",
        dimension=alg.dimension,
        memory_budget=memory_budget,
        horizon=alg.horizon,
        decode=decode,
        encode=encode,
        output=output,
        meta=dict(alg.meta, truncated_from=inner),
    )


def constant_algorithm(d: int, point=None, horizon: int = 1) -> AlgorithmSpec:
    """Zero-memory algorithm: queries and returns a fixed point."""
    p = np.zeros(d) if point is None else np.asarray(point, dtype=float).copy()

    def decode(t: int, state: MemoryState) -> np.ndarray:
        return p.copy()

    def encode(t: int, state: MemoryState, reply: FirstOrderReply) -> MemoryState:
        return MemoryState("", 0)

    def output(state: MemoryState) -> np.ndarray:
        return p.copy()

    return AlgorithmSpec(
        name="constant",
        dimension=int(d),
        memory_budget=0,
        horizon=int(horizon),
        decode=decode,
        encode=encode,
        output=output,
    )


def gd_covering_bound_bits(d: int, eps: float, L: float = 1.0, B: float = 1.0) -> float:
    """Covering-number memory estimate for the descent layout:
    2 d log2(1 + 36 L^2 B^2 / eps^2) + log2(2 L B / eps)."""
    return 2 * d * math.log2(1 + 36 * L * L * B * B / (eps * eps)) + math.log2(
        2 * L * B / eps
    )


def com_covering_bound_bits(d: int, eps: float, L: float = 1.0, B: float = 1.0) -> float:
    """Covering-number memory estimate for the cut-replay layout:
    3 d^2 log2^2(17 LB/eps) + 3 d log2(4 LB/eps) log2(2 LB/eps) + d log2(1 + 4 LB/eps)."""
    r = L * B / eps
    return (
        3 * d * d * math.log2(17 * r) ** 2
        + 3 * d * math.log2(4 * r) * math.log2(2 * r)
        + d * math.log2(1 + 4 * r)
    )
