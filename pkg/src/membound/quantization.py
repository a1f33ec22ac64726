"""Fixed-width uniform quantizers for vectors in a ball and for bounded scalars.

A vector codec snaps points of the radius-R ball onto an axis-aligned cubic
grid whose step is chosen so the nearest grid point is within a stated L2
error D. A scalar codec maps a bounded interval onto evenly spaced levels
with either round-down or round-to-nearest semantics. Both are pure,
stateless bijections between their codeword sets and fixed-width bit fields
(most-significant bit first, coordinates in index order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "VectorCodec",
    "ScalarCodec",
    "EncodeRangeError",
    "DecodeDomainError",
    "make_vector_codec",
    "encode_vector",
    "decode_vector",
    "make_scalar_codec",
    "encode_scalar",
    "decode_scalar",
]

# Absolute nudge applied before floor/ceil so values an ulp below an exact
# grid ratio land on it. Ratios here stay far below 1e7, where double
# rounding error is still < 1e-9.
_EPS = 1e-9

ROUND_DOWN = "down"
ROUND_NEAREST = "nearest"


class EncodeRangeError(ValueError):
    """Input lies outside the codec's encodable range."""


class DecodeDomainError(ValueError):
    """Bit pattern does not name a codeword of this codec."""


@dataclass(frozen=True)
class VectorCodec:
    """Cubic-grid quantizer for points with ||x|| <= radius.

    Grid points per axis are k * grid_step for k in [-half_width, half_width];
    the origin is always a codeword and the grid extends one step past the
    radius. grid_step = 2 * max_error / sqrt(dimension) makes the nearest
    grid point at most max_error away in L2.
    """

    dimension: int
    radius: float
    max_error: float
    grid_step: float
    half_width: int
    bits_per_axis: int
    bits_per_vector: int

    @property
    def levels_per_axis(self) -> int:
        return 2 * self.half_width + 1

    def axis_codewords(self) -> np.ndarray:
        """All per-axis codeword values, in index order."""
        k = np.arange(-self.half_width, self.half_width + 1)
        return k * self.grid_step


@dataclass(frozen=True)
class ScalarCodec:
    """Uniform quantizer for values in [lo, hi] at a fixed step."""

    lo: float
    hi: float
    step: float
    rounding: str
    n_levels: int
    bits_per_scalar: int

    def codewords(self) -> np.ndarray:
        return self.lo + self.step * np.arange(self.n_levels)


def make_vector_codec(d: int, R: float, D: float) -> VectorCodec:
    """Build the cubic-grid codec for the radius-R ball in R^d with L2 error D."""
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    if not (R > 0 and math.isfinite(R)):
        raise ValueError(f"radius must be positive, got {R!r}")
    if not (0 < D <= R):
        raise ValueError(f"max_error must satisfy 0 < D <= R, got D={D!r}, R={R!r}")
    s = 2.0 * D / math.sqrt(d)
    half_width = int(math.floor(R / s + 1 + _EPS))
    # Level count per the padded bound floor(2(R+s)/s) + 1; always >= the
    # actual 2*half_width + 1 grid, so indices fit in the bit field.
    level_bound = int(math.floor(2.0 * (R + s) / s + _EPS)) + 1
    bits_per_axis = max(1, (level_bound - 1).bit_length())
    return VectorCodec(
        dimension=int(d),
        radius=float(R),
        max_error=float(D),
        grid_step=s,
        half_width=half_width,
        bits_per_axis=bits_per_axis,
        bits_per_vector=int(d) * bits_per_axis,
    )


def _axis_index(codec: VectorCodec, value: float) -> int:
    # Round to the nearest grid multiple, ties toward -inf.
    k = math.ceil(value / codec.grid_step - 0.5)
    return int(k) + codec.half_width


def encode_vector(codec: VectorCodec, x) -> str:
    """Encode a point of the ball to a bit string of length bits_per_vector.

    Rounds each coordinate to the nearest grid point (ties toward -inf).
    Rejects points with ||x|| > radius.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (codec.dimension,):
        raise ValueError(f"expected shape ({codec.dimension},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise EncodeRangeError("cannot encode non-finite coordinates")
    norm = float(np.linalg.norm(x))
    if norm > codec.radius * (1 + _EPS):
        raise EncodeRangeError(
            f"point with norm {norm:.6g} outside the radius-{codec.radius:.6g} ball"
        )
    parts = []
    for xi in x:
        u = _axis_index(codec, float(xi))
        # In-ball points always land inside the grid; guard anyway.
        u = min(max(u, 0), codec.levels_per_axis - 1)
        parts.append(format(u, f"0{codec.bits_per_axis}b"))
    return "".join(parts)


def decode_vector(codec: VectorCodec, bits: str, clamp: bool = False) -> np.ndarray:
    """Decode a bit string back to its grid point.

    With clamp=False, bit patterns whose per-axis index exceeds the grid are
    rejected; with clamp=True they saturate to the nearest valid index
    (used by algorithm decoders, which must be total on bit strings).
    """
    if len(bits) != codec.bits_per_vector:
        raise DecodeDomainError(
            f"expected {codec.bits_per_vector} bits, got {len(bits)}"
        )
    b = codec.bits_per_axis
    out = np.empty(codec.dimension)
    for i in range(codec.dimension):
        u = int(bits[i * b : (i + 1) * b], 2)
        if u >= codec.levels_per_axis:
            if not clamp:
                raise DecodeDomainError(
                    f"axis {i} index {u} outside grid of {codec.levels_per_axis} levels"
                )
            u = codec.levels_per_axis - 1
        out[i] = (u - codec.half_width) * codec.grid_step
    return out


def make_scalar_codec(
    lo: float, hi: float, step: float, rounding: str = ROUND_DOWN
) -> ScalarCodec:
    """Build a uniform scalar codec on [lo, hi] with the given step and rounding."""
    if not (lo < hi):
        raise ValueError(f"need lo < hi, got [{lo!r}, {hi!r}]")
    if not (0 < step <= hi - lo):
        raise ValueError(f"need 0 < step <= hi - lo, got step={step!r}")
    if rounding not in (ROUND_DOWN, ROUND_NEAREST):
        raise ValueError(f"rounding must be 'down' or 'nearest', got {rounding!r}")
    ratio = (hi - lo) / step
    n_levels = int(math.floor(ratio + _EPS)) + 1
    bits = max(1, math.ceil(math.log2(ratio + 1) - 1e-12))
    return ScalarCodec(
        lo=float(lo),
        hi=float(hi),
        step=float(step),
        rounding=rounding,
        n_levels=n_levels,
        bits_per_scalar=bits,
    )


def encode_scalar(codec: ScalarCodec, v: float) -> str:
    """Encode a value to a bit string of length bits_per_scalar.

    Values past the range by at most one step clamp to the edge level;
    anything further out is rejected.
    """
    v = float(v)
    if not math.isfinite(v):
        raise EncodeRangeError("cannot encode a non-finite value")
    if v < codec.lo - codec.step * (1 + _EPS) or v > codec.hi + codec.step * (1 + _EPS):
        raise EncodeRangeError(
            f"value {v:.6g} outside [{codec.lo:.6g}, {codec.hi:.6g}] by more than one step"
        )
    q = (v - codec.lo) / codec.step
    if codec.rounding == ROUND_DOWN:
        k = math.floor(q + _EPS)
    else:
        k = math.ceil(q - 0.5)
    k = min(max(int(k), 0), codec.n_levels - 1)
    return format(k, f"0{codec.bits_per_scalar}b")


def decode_scalar(codec: ScalarCodec, bits: str, clamp: bool = False) -> float:
    """Decode a bit string back to its level value."""
    if len(bits) != codec.bits_per_scalar:
        raise DecodeDomainError(
            f"expected {codec.bits_per_scalar} bits, got {len(bits)}"
        )
    k = int(bits, 2)
    if k >= codec.n_levels:
        if not clamp:
            raise DecodeDomainError(f"index {k} outside {codec.n_levels} levels")
        k = codec.n_levels - 1
    return codec.lo + k * codec.step
