import math

import numpy as np
import pytest

from membound.geometry import (
    CutSet,
    DegenerateBodyError,
    Halfspace,
    default_sample_budget,
    estimate_centroid,
    estimate_volume_fraction,
    greedy_packing,
    spawn_rng,
    spawn_seed,
)

HALF_DISK_CENTROID = 4.0 / (3.0 * math.pi)  # analytic, ~0.42441


def unit_ball():
    return CutSet(1.0)


def half_disk():
    # {x in unit disk : x_1 >= 0}
    return unit_ball().with_cut([-1.0, 0.0], [0.0, 0.0])


class TestCutSet:
    def test_membership_exact(self):
        K = half_disk()
        assert K.contains([0.5, 0.0])
        assert K.contains([0.0, 0.0])  # boundary of the cut
        assert not K.contains([-0.1, 0.0])
        assert not K.contains([0.9, 0.9])  # outside the ball

    def test_zero_normal_cut_is_noop(self):
        K = unit_ball().with_cut([0.0, 0.0], [0.3, 0.3])
        assert K.contains([-0.5, 0.5])
        assert K.n_cuts == 1

    def test_cuts_accumulate_in_order(self):
        K = unit_ball()
        for i in range(4):
            K = K.with_cut([1.0, 0.0], [0.1 * i, 0.0])
        assert K.n_cuts == 4
        assert [h.anchor[0] for h in K.cuts] == pytest.approx([0.0, 0.1, 0.2, 0.3])

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            CutSet(0.0)


class TestCentroid:
    def test_full_ball_centroid_near_origin(self):
        c = estimate_centroid(unit_ball(), seed=1, n_samples=20_000, dimension=2)
        assert np.linalg.norm(c) < 0.02

    def test_interval_centroid(self):
        # d=1 ball cut at 0, keeping [0, 1]
        seg = CutSet(1.0).with_cut([-1.0], [0.0])
        c = estimate_centroid(seg, seed=3, n_samples=50_000, start=[0.5])
        assert c[0] == pytest.approx(0.5, abs=0.01)

    def test_half_disk_centroid(self):
        c = estimate_centroid(half_disk(), seed=2, n_samples=50_000, start=[0.1, 0.0])
        assert c[0] == pytest.approx(HALF_DISK_CENTROID, abs=0.02)
        assert c[1] == pytest.approx(0.0, abs=0.02)

    def test_bit_identical_given_equal_arguments(self):
        a = estimate_centroid(half_disk(), seed=9, n_samples=5000, start=[0.1, 0.0])
        b = estimate_centroid(half_disk(), seed=9, n_samples=5000, start=[0.1, 0.0])
        assert np.array_equal(a, b)
        c = estimate_centroid(half_disk(), seed=10, n_samples=5000, start=[0.1, 0.0])
        assert not np.array_equal(a, c)

    def test_error_shrinks_with_budget(self):
        errs = {}
        for n in (500, 50_000):
            c = estimate_centroid(half_disk(), seed=4, n_samples=n, start=[0.1, 0.0])
            errs[n] = abs(c[0] - HALF_DISK_CENTROID)
        assert errs[50_000] < 0.02
        assert errs[50_000] < errs[500]

    def test_boundary_start_is_fine(self):
        # the cut passes through the start point, as in the harness
        c = estimate_centroid(half_disk(), seed=5, n_samples=5000, start=[0.0, 0.0])
        assert c[0] > 0.3

    def test_degenerate_body_raises(self):
        empty = (
            unit_ball()
            .with_cut([-1.0, 0.0], [0.5, 0.0])  # x1 >= 0.5
            .with_cut([1.0, 0.0], [-0.5, 0.0])  # x1 <= -0.5
        )
        with pytest.raises(DegenerateBodyError):
            estimate_centroid(empty, seed=1, n_samples=100, dimension=2)

    def test_start_outside_body_raises(self):
        with pytest.raises(DegenerateBodyError):
            estimate_centroid(half_disk(), seed=1, n_samples=100, start=[-0.9, 0.0])

    def test_uncut_ball_needs_dimension(self):
        with pytest.raises(ValueError):
            estimate_centroid(unit_ball(), seed=1, n_samples=10)


class TestVolumeFraction:
    def test_whole_space_halfspace(self):
        H = Halfspace(np.zeros(2), np.zeros(2))  # 0 <= 0 everywhere
        frac = estimate_volume_fraction(unit_ball(), H, seed=1, n_samples=2000, start=[0.0, 0.0])
        assert frac == 1.0

    def test_interval_quarter(self):
        # [-1, 1] against {x >= 0.5}
        H = Halfspace(np.array([-1.0]), np.array([0.5]))
        frac = estimate_volume_fraction(CutSet(1.0), H, seed=4, n_samples=100_000, start=[0.0])
        assert frac == pytest.approx(0.25, abs=0.01)

    def test_centroid_cut_near_half(self):
        c = estimate_centroid(unit_ball(), seed=6, n_samples=50_000, dimension=2)
        H = Halfspace(np.array([1.0, 0.0]), c)
        frac = estimate_volume_fraction(unit_ball(), H, seed=7, n_samples=50_000, start=c)
        assert 1 / math.e - 0.05 <= frac <= 1 - 1 / math.e + 0.05

    def test_deterministic(self):
        H = Halfspace(np.array([1.0, 0.0]), np.zeros(2))
        a = estimate_volume_fraction(unit_ball(), H, seed=8, n_samples=5000, start=[0.0, 0.0])
        b = estimate_volume_fraction(unit_ball(), H, seed=8, n_samples=5000, start=[0.0, 0.0])
        assert a == b


class TestGreedyPacking:
    def test_d1_alpha_half(self):
        p = greedy_packing(1, 1.0, 0.5, budget=10)
        assert len(p) >= 2  # the guaranteed bound
        assert p.points.ravel().tolist() == pytest.approx([-1.0, 0.0, 1.0])

    @pytest.mark.parametrize("d,alpha", [(1, 0.5), (2, 0.5), (3, 0.5), (2, 0.25)])
    def test_meets_volume_bound(self, d, alpha):
        target = math.ceil((1.0 / alpha) ** d)
        p = greedy_packing(d, 1.0, alpha, budget=target)
        assert len(p) >= target

    def test_pairwise_separation_brute_force(self):
        p = greedy_packing(3, 1.0, 0.4, budget=200)
        pts = p.points
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                assert np.linalg.norm(pts[i] - pts[j]) > p.separation

    def test_points_stay_in_ball(self):
        p = greedy_packing(2, 1.0, 0.3, budget=100)
        assert np.all(np.linalg.norm(p.points, axis=1) <= 1.0 + 1e-9)

    def test_budget_caps_size(self):
        p = greedy_packing(2, 1.0, 0.25, budget=5)
        assert len(p) == 5

    def test_deterministic(self):
        a = greedy_packing(2, 1.0, 0.3, budget=50)
        b = greedy_packing(2, 1.0, 0.3, budget=50)
        assert np.array_equal(a.points, b.points)

    def test_rejects_degenerate_alpha(self):
        with pytest.raises(ValueError):
            greedy_packing(2, 1.0, 2.0, budget=5)
        with pytest.raises(ValueError):
            greedy_packing(2, 1.0, 2.5, budget=5)


class TestSeeding:
    def test_spawn_seed_deterministic_and_keyed(self):
        assert spawn_seed(7, 3) == spawn_seed(7, 3)
        assert spawn_seed(7, 3) != spawn_seed(7, 4)
        assert spawn_seed(7, 3) != spawn_seed(8, 3)
        assert spawn_seed(5, 1, 2) != spawn_seed(5, 2, 1)

    def test_spawn_rng_streams(self):
        a = spawn_rng(7, 3).random(4)
        b = spawn_rng(7, 3).random(4)
        assert np.array_equal(a, b)

    def test_sample_budget_env_override(self, monkeypatch):
        monkeypatch.delenv("MEMBOUND_SAMPLES", raising=False)
        assert default_sample_budget() == 2000
        monkeypatch.setenv("MEMBOUND_SAMPLES", "123")
        assert default_sample_budget() == 123
        monkeypatch.setenv("MEMBOUND_SAMPLES", "0")
        with pytest.raises(ValueError):
            default_sample_budget()
