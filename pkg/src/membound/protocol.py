"""The formal memory-bounded query model: algorithms as families of decoder,
encoder and output maps over an M-bit memory state, and the harness that
runs the query loop while enforcing the bit bottleneck.

The decoder's sole input is the memory state (plus the round index), so no
information can flow from one oracle reply to the next query except through
the <= M stored bits; the harness additionally asserts the capacity after
every encode and records a full transcript.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .instances import ConvexInstance

__all__ = [
    "MemoryState",
    "FirstOrderReply",
    "AlgorithmSpec",
    "RoundRecord",
    "Transcript",
    "CapacityError",
    "ProtocolError",
    "EnumerationBudgetError",
    "run",
    "count_distinct_outputs",
    "ENUMERATION_CAP",
]

ENUMERATION_CAP = 20


class ProtocolError(RuntimeError):
    """A decoder/encoder violated the model contract."""


class CapacityError(ProtocolError):
    """An encoder returned more bits than the declared budget."""


class EnumerationBudgetError(ValueError):
    """Output enumeration requested beyond the 2^20-state cap."""


@dataclass(frozen=True)
class MemoryState:
    """An immutable bit string of length <= capacity.

    The initial state is blank (zero length; vacuously all-zero). Encoders
    produce successors; nothing else carries state between oracle calls.
    """

    bits: str
    capacity: int

    def __post_init__(self):
        if self.capacity < 0:
            raise ValueError(f"capacity must be >= 0, got {self.capacity}")
        if len(self.bits) > self.capacity:
            raise CapacityError(
                f"{len(self.bits)} bits exceed the {self.capacity}-bit budget"
            )
        if self.bits.strip("01"):
            raise ValueError("bits must contain only '0' and '1'")

    @classmethod
    def blank(cls, capacity: int) -> "MemoryState":
        return cls("", capacity)

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True, eq=False)
class FirstOrderReply:
    """One oracle answer: the function value and a subgradient at the query."""

    value: float
    subgradient: np.ndarray


@dataclass(frozen=True, eq=False)
class AlgorithmSpec:
    """A memory-bounded algorithm: decode/encode families indexed by the
    1-based round t, plus the output map applied to the final state.

    All three maps must be pure; the harness never feeds the oracle reply
    anywhere except the encoder.
    """

    name: str
    dimension: int
    memory_budget: int
    horizon: int
    decode: Callable[[int, MemoryState], np.ndarray]
    encode: Callable[[int, MemoryState, FirstOrderReply], MemoryState]
    output: Callable[[MemoryState], np.ndarray]
    meta: Mapping[str, object] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class RoundRecord:
    t: int
    query: np.ndarray
    value: float
    state_bits: str
    memory_bits: int


@dataclass(frozen=True, eq=False)
class Transcript:
    """Everything one run produced, in replayable form."""

    instance_token: str
    d: int
    L: float
    B: float
    memory_budget: int
    horizon: int
    rounds: tuple[RoundRecord, ...]
    output: np.ndarray
    peak_memory_bits: int
    suboptimality: float | None
    meta: Mapping[str, object] = field(default_factory=dict)

    def serialize(self) -> str:
        """Line-oriented text form; floats use shortest round-trip decimals."""
        lines = ["membound-transcript v1"]
        eps = self.meta.get("eps")
        head = [
            f"d={self.d}",
            f"L={self.L!r}",
            f"B={self.B!r}",
            f"eps={'NA' if eps is None else repr(float(eps))}",
            f"M={self.memory_budget}",
            f"T={self.horizon}",
            f"seed={self.meta.get('seed', 'NA')}",
            f"alg={self.meta.get('alg', 'NA')}",
            f"instance={self.instance_token}",
        ]
        lines.append(" ".join(head))
        for r in self.rounds:
            coords = " ".join(repr(float(v)) for v in r.query)
            lines.append(f"{r.t} {coords} {r.value!r} {r.memory_bits}")
        lines.append("output " + " ".join(repr(float(v)) for v in self.output))
        sub = "NA" if self.suboptimality is None else repr(self.suboptimality)
        lines.append(f"suboptimality {sub}")
        lines.append(f"peak_bits {self.peak_memory_bits}")
        return "\n".join(lines) + "\n"


def _check_point(x, d: int, t: int, role: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise ProtocolError(f"{role} at round {t} returned shape {x.shape}, want ({d},)")
    if not np.all(np.isfinite(x)):
        raise ProtocolError(f"{role} at round {t} returned a non-finite point")
    return x


def run(alg: AlgorithmSpec, f: ConvexInstance) -> Transcript:
    """Execute the T-round decode/query/encode loop from the blank state.

    Asserts the capacity invariant after every encode and that replies
    respect the instance's Lipschitz bound; the transcript is bit-reproducible
    given (alg, f).
    """
    if f.d != alg.dimension:
        raise ValueError(f"instance dimension {f.d} != algorithm dimension {alg.dimension}")
    if alg.horizon < 1 or alg.memory_budget < 0:
        raise ValueError("algorithm budgets must be positive")
    for cap_key, inst_val in (("L", f.L), ("B", f.B), ("V", f.V)):
        cap = alg.meta.get(cap_key)
        if cap is not None and inst_val > cap * (1 + 1e-9):
            raise ValueError(
                f"instance {cap_key}={inst_val:.6g} exceeds the algorithm's "
                f"declared cap {cap:.6g}"
            )

    state = MemoryState.blank(alg.memory_budget)
    rounds = []
    peak = 0
    for t in range(1, alg.horizon + 1):
        x_t = _check_point(alg.decode(t, state), alg.dimension, t, "decoder")
        value = float(f.evaluate(x_t))
        g = np.asarray(f.subgradient(x_t), dtype=float)
        if not (np.isfinite(value) and np.all(np.isfinite(g))):
            raise ProtocolError(f"oracle reply at round {t} is non-finite")
        if float(np.linalg.norm(g)) > f.L * (1 + 1e-9):
            raise ProtocolError(
                f"subgradient norm {np.linalg.norm(g):.6g} exceeds L={f.L:.6g} at round {t}"
            )
        reply = FirstOrderReply(value=value, subgradient=g)
        new_state = alg.encode(t, state, reply)
        if not isinstance(new_state, MemoryState):
            raise ProtocolError(f"encoder at round {t} did not return a MemoryState")
        if len(new_state) > alg.memory_budget:
            raise CapacityError(
                f"round {t}: encoder wrote {len(new_state)} bits, budget is {alg.memory_budget}"
            )
        state = new_state
        peak = max(peak, len(state))
        rounds.append(
            RoundRecord(
                t=t, query=x_t, value=value, state_bits=state.bits, memory_bits=len(state)
            )
        )

    out = _check_point(alg.output(state), alg.dimension, alg.horizon, "output")
    subopt = None
    if f.f_star is not None:
        subopt = float(f.evaluate(out)) - f.f_star
    return Transcript(
        instance_token=f.token,
        d=f.d,
        L=f.L,
        B=f.B,
        memory_budget=alg.memory_budget,
        horizon=alg.horizon,
        rounds=tuple(rounds),
        output=out,
        peak_memory_bits=peak,
        suboptimality=subopt,
        meta=dict(alg.meta, alg=alg.name),
    )


def count_distinct_outputs(alg: AlgorithmSpec) -> int:
    """Number of distinct points the output map can produce over all 2^M
    final states. Refuses M > 20 (enumeration budget)."""
    M = alg.memory_budget
    if M > ENUMERATION_CAP:
        raise EnumerationBudgetError(f"M={M} exceeds the enumeration cap {ENUMERATION_CAP}")
    seen = set()
    for i in range(2**M):
        bits = format(i, f"0{M}b") if M else ""
        point = np.asarray(alg.output(MemoryState(bits, M)), dtype=float)
        seen.add(tuple(point.tolist()))
    return len(seen)
