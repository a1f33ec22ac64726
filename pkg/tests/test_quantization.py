import itertools
import math

import numpy as np
import pytest

from membound.quantization import (
    DecodeDomainError,
    EncodeRangeError,
    decode_scalar,
    decode_vector,
    encode_scalar,
    encode_vector,
    make_scalar_codec,
    make_vector_codec,
)


def ball_points(rng, n, d, radius):
    dirs = rng.standard_normal((n, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return dirs * (radius * rng.random(n) ** (1.0 / d))[:, None]


def nearest_grid_oracle(codec, x):
    # Independent per-axis search over the enumerated grid, ties toward -inf.
    axis = codec.axis_codewords()
    out = np.empty_like(np.asarray(x, dtype=float))
    for i, xi in enumerate(x):
        dists = np.abs(axis - xi)
        best = np.min(dists)
        out[i] = axis[np.flatnonzero(dists <= best + 1e-15)[0]]
    return out


class TestVectorCodec:
    def test_d1_example_grid(self):
        c = make_vector_codec(1, 1.0, 0.25)
        assert c.grid_step == pytest.approx(0.5)
        # grid of spacing 0.5 covering [-1.5, 1.5]: one step past the ball
        assert c.axis_codewords() == pytest.approx(
            [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5]
        )
        assert c.levels_per_axis == 7
        assert c.bits_per_axis == 3
        assert c.bits_per_vector == 3

    def test_bit_formula_is_the_declared_one(self):
        for d, R, D in [(1, 1.0, 0.25), (2, 1.0, 0.5), (3, 2.0, 0.3), (5, 5.0, 0.01)]:
            c = make_vector_codec(d, R, D)
            s = c.grid_step
            declared = d * math.ceil(math.log2(math.floor(2 * (R + s) / s) + 1))
            assert c.bits_per_vector == declared
            assert s == pytest.approx(2 * D / math.sqrt(d))

    def test_zero_vector_is_fixed_point(self):
        for d in (1, 2, 4):
            c = make_vector_codec(d, 1.0, 0.25)
            bits = encode_vector(c, np.zeros(d))
            assert np.array_equal(decode_vector(c, bits), np.zeros(d))

    def test_x03_rounds_to_05(self):
        c = make_vector_codec(1, 1.0, 0.25)
        decoded = decode_vector(c, encode_vector(c, [0.3]))
        assert decoded == pytest.approx([0.5])
        assert abs(decoded[0] - 0.3) <= 0.25

    def test_codewords_are_fixed_points(self):
        c = make_vector_codec(2, 1.0, 0.3)
        axis = c.axis_codewords()
        for xi in axis:
            for yj in axis:
                x = np.array([xi, yj])
                if np.linalg.norm(x) > c.radius:
                    continue
                bits = encode_vector(c, x)
                assert np.array_equal(decode_vector(c, bits), x)
                assert encode_vector(c, decode_vector(c, bits)) == bits

    def test_matches_nearest_grid_oracle(self):
        c = make_vector_codec(2, 1.0, 0.5)
        rng = np.random.default_rng(7)
        for x in ball_points(rng, 1000, 2, 1.0):
            decoded = decode_vector(c, encode_vector(c, x))
            assert decoded == pytest.approx(nearest_grid_oracle(c, x))

    def test_example_d2_roundtrip_error(self):
        c = make_vector_codec(2, 1.0, 0.5)
        x = np.array([0.4, 0.4])
        decoded = decode_vector(c, encode_vector(c, x))
        assert np.linalg.norm(decoded - x) <= 0.5

    @pytest.mark.parametrize("d", [1, 2, 3, 5])
    def test_roundtrip_error_bound_bulk(self, d):
        c = make_vector_codec(d, 1.0, 0.17)
        rng = np.random.default_rng(100 + d)
        pts = ball_points(rng, 10_000, d, 1.0)
        worst = 0.0
        for x in pts:
            decoded = decode_vector(c, encode_vector(c, x))
            err = float(np.linalg.norm(decoded - x))
            worst = max(worst, err)
            assert np.linalg.norm(decoded) <= c.radius + c.max_error + 1e-12
        assert worst <= c.max_error * (1 + 1e-9)

    def test_boundary_point_decodes_within_R_plus_D(self):
        c = make_vector_codec(3, 1.0, 0.2)
        x = np.array([1.0, 0.0, 0.0])
        decoded = decode_vector(c, encode_vector(c, x))
        assert np.linalg.norm(decoded) <= 1.0 + c.max_error + 1e-12

    def test_tie_breaks_toward_minus_inf(self):
        c = make_vector_codec(1, 1.0, 0.25)  # step 0.5
        assert decode_vector(c, encode_vector(c, [0.25]))[0] == pytest.approx(0.0)
        assert decode_vector(c, encode_vector(c, [-0.25]))[0] == pytest.approx(-0.5)

    def test_bits_cover_exhaustive_codeword_count(self):
        for d in (1, 2, 3):
            c = make_vector_codec(d, 1.0, 0.4)
            n_axis = len(c.axis_codewords())
            assert n_axis == c.levels_per_axis
            seen = set()
            for combo in itertools.product(range(n_axis), repeat=d):
                bits = "".join(format(u, f"0{c.bits_per_axis}b") for u in combo)
                seen.add(tuple(decode_vector(c, bits).tolist()))
            assert len(seen) == n_axis**d
            assert n_axis**d <= 2**c.bits_per_vector

    def test_encode_is_deterministic(self):
        c = make_vector_codec(4, 1.0, 0.1)
        rng = np.random.default_rng(3)
        for x in ball_points(rng, 50, 4, 1.0):
            assert encode_vector(c, x) == encode_vector(c, x)

    def test_rejections(self):
        c = make_vector_codec(2, 1.0, 0.25)
        with pytest.raises(EncodeRangeError):
            encode_vector(c, [1.2, 0.9])
        with pytest.raises(EncodeRangeError):
            encode_vector(c, [np.nan, 0.0])
        with pytest.raises(DecodeDomainError):
            decode_vector(c, "1" * c.bits_per_vector)  # index beyond the grid
        with pytest.raises(DecodeDomainError):
            decode_vector(c, "01")
        # clamp mode is total instead
        decoded = decode_vector(c, "1" * c.bits_per_vector, clamp=True)
        assert np.all(np.isfinite(decoded))

    def test_constructor_rejects_bad_params(self):
        with pytest.raises(ValueError):
            make_vector_codec(0, 1.0, 0.1)
        with pytest.raises(ValueError):
            make_vector_codec(2, -1.0, 0.1)
        with pytest.raises(ValueError):
            make_vector_codec(2, 1.0, 0.0)
        with pytest.raises(ValueError):
            make_vector_codec(2, 1.0, 1.5)  # D > R


class TestScalarCodec:
    def test_round_down_examples(self):
        c = make_scalar_codec(0.0, 1.0, 0.1, "down")
        assert decode_scalar(c, encode_scalar(c, 0.37)) == pytest.approx(0.3)
        # exact multiple is a fixed point
        assert decode_scalar(c, encode_scalar(c, 0.3)) == pytest.approx(0.3)

    def test_bit_count_example(self):
        c = make_scalar_codec(0.0, 2.0, 0.1)
        assert c.n_levels == 21
        assert c.bits_per_scalar == 5

    def test_round_down_never_overestimates(self):
        c = make_scalar_codec(-1.0, 1.0, 0.05, "down")
        rng = np.random.default_rng(11)
        for v in rng.uniform(-1.0, 1.0, size=10_000):
            dec = decode_scalar(c, encode_scalar(c, v))
            assert dec <= v
            assert v < dec + c.step * (1 + 1e-9)

    def test_nearest_error_bound(self):
        c = make_scalar_codec(-1.0, 1.0, 0.05, "nearest")
        rng = np.random.default_rng(12)
        for v in rng.uniform(-1.0, 1.0, size=10_000):
            dec = decode_scalar(c, encode_scalar(c, v))
            assert abs(dec - v) <= c.step / 2 * (1 + 1e-9)

    def test_clamps_within_one_step_rejects_beyond(self):
        c = make_scalar_codec(0.0, 1.0, 0.1, "down")
        assert decode_scalar(c, encode_scalar(c, -0.05)) == pytest.approx(0.0)
        assert decode_scalar(c, encode_scalar(c, 1.08)) == pytest.approx(1.0)
        with pytest.raises(EncodeRangeError):
            encode_scalar(c, 1.25)
        with pytest.raises(EncodeRangeError):
            encode_scalar(c, -0.25)

    def test_decode_domain(self):
        c = make_scalar_codec(0.0, 1.0, 0.3, "down")  # 4 levels, 3 bits (ratio 10/3)
        with pytest.raises(DecodeDomainError):
            decode_scalar(c, "1" * c.bits_per_scalar)
        assert decode_scalar(c, "1" * c.bits_per_scalar, clamp=True) == pytest.approx(0.9)

    def test_constructor_rejects_bad_params(self):
        with pytest.raises(ValueError):
            make_scalar_codec(1.0, 0.0, 0.1)
        with pytest.raises(ValueError):
            make_scalar_codec(0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            make_scalar_codec(0.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            make_scalar_codec(0.0, 1.0, 0.1, "sideways")

    def test_hi_endpoint_encodable(self):
        c = make_scalar_codec(-2.0, 2.0, 0.1, "down")
        assert decode_scalar(c, encode_scalar(c, 2.0)) == pytest.approx(2.0)
        c2 = make_scalar_codec(-2.0, 2.0, 0.1, "nearest")
        assert decode_scalar(c2, encode_scalar(c2, 2.0)) == pytest.approx(2.0)
