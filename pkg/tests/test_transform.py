import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sphc
from sphc.errors import (
    LengthMismatch,
    NonFiniteInput,
    NormViolation,
    UnsupportedDtype,
    ZeroNormRow,
)
from conftest import brute_dot

F32_EPS = 1.19e-7


def unit_rows(n, d, seed):
    return sphc.gen_uniform(n, d, seed)


class TestToSpherical:
    def test_north_pole_d3(self):
        theta = sphc.to_spherical(np.array([[0, 0, 1]], np.float32))
        np.testing.assert_allclose(theta, [[math.pi / 2, math.pi / 2]], atol=1e-7)

    def test_first_axis_d3(self):
        # degenerate tail: arccos(1) = 0 and atan2(0, 0) = 0
        theta = sphc.to_spherical(np.array([[1, 0, 0]], np.float32))
        np.testing.assert_array_equal(theta, [[0.0, 0.0]])

    def test_d2_single_angle(self):
        x = np.array([[math.cos(0.3), math.sin(0.3)]], np.float32)
        theta = sphc.to_spherical(x)
        assert theta.shape == (1, 1)
        assert abs(theta[0, 0] - 0.3) < 1e-7

    def test_exponent_concentration_d768(self, angles_2000x768):
        # columns whose remaining tail spans >= 64 coordinates sit in [1, 2)
        d = 768
        cols = angles_2000x768[:, : d - 64]
        fields = (cols.reshape(-1).view(np.uint32) >> np.uint32(23)) & np.uint32(0xFF)
        assert (fields == 127).mean() > 0.999

    def test_rejects_nan(self):
        x = np.array([[np.nan, 0.0]], np.float32)
        with pytest.raises(NonFiniteInput):
            sphc.to_spherical(x)

    def test_rejects_non_float32(self):
        with pytest.raises(UnsupportedDtype):
            sphc.to_spherical(np.ones((2, 4), np.float64))

    def test_rejects_d1(self):
        with pytest.raises(sphc.errors.DimensionTooSmall):
            sphc.to_spherical(np.ones((2, 1), np.float32))


class TestFromSpherical:
    def test_inverse_of_north_pole(self):
        x = sphc.from_spherical(np.array([[math.pi / 2, math.pi / 2]], np.float32))
        np.testing.assert_allclose(x, [[0, 0, 1]], atol=1e-7)

    def test_inverse_of_first_axis(self):
        x = sphc.from_spherical(np.array([[0.0, 0.0]], np.float32))
        np.testing.assert_array_equal(x, [[1, 0, 0]])

    def test_roundtrip_bound_d768(self, uniform_2000x768):
        x = uniform_2000x768
        x2 = sphc.from_spherical(sphc.to_spherical(x))
        err = np.abs(x2.astype(np.float64) - x.astype(np.float64)).max()
        assert err < F32_EPS

    def test_roundtrip_self_cosine_d768(self, uniform_2000x768):
        x = uniform_2000x768.astype(np.float64)
        x2 = sphc.from_spherical(sphc.to_spherical(uniform_2000x768)).astype(np.float64)
        cos_dev = np.abs(np.einsum("ij,ij->i", x, x2) - 1.0).max()
        assert cos_dev < 2e-7

    def test_output_rows_unit_norm(self):
        x2 = sphc.from_spherical(sphc.to_spherical(unit_rows(200, 128, 5)))
        norms = np.linalg.norm(x2.astype(np.float64), axis=1)
        assert np.abs(norms - 1.0).max() < F32_EPS * np.sqrt(128)

    def test_first_basis_vector_roundtrips_exactly(self):
        # arccos(1) = 0 collapses the sine product, so every later component
        # reconstructs to exactly 0
        for d in (2, 3, 8, 64):
            x = np.zeros((1, d), np.float32)
            x[0, 0] = 1.0
            np.testing.assert_array_equal(sphc.from_spherical(sphc.to_spherical(x)), x)

    def test_basis_vectors_trailing_zeros_exact(self):
        # leading zeros pass through arccos(0) = pi/2, whose float32 rounding
        # costs cos(fl(pi/2)) ~ 4.4e-8, so exactness is only guaranteed from
        # the hot position onward
        for d in (3, 8, 64):
            x2 = sphc.from_spherical(sphc.to_spherical(np.eye(d, dtype=np.float32)))
            for k in range(d):
                assert x2[k, k] == 1.0
                np.testing.assert_array_equal(x2[k, k + 1 :], 0.0)
                assert np.abs(x2[k, :k]).max(initial=0.0) < F32_EPS

    def test_trailing_zero_block_stays_exactly_zero(self):
        x = np.zeros((1, 16), np.float32)
        x[0, 2] = 0.6
        x[0, 3] = 0.8
        x2 = sphc.from_spherical(sphc.to_spherical(x))
        np.testing.assert_array_equal(x2[0, 4:], 0.0)
        assert np.abs(x2 - x).max() < F32_EPS


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), d=st.integers(2, 12))
def test_angle_ranges_hold_for_any_unit_rows(seed, d):
    theta = sphc.to_spherical(unit_rows(8, d, seed))
    if d > 2:
        body = theta[:, : d - 2]
        assert body.min() >= 0.0 and body.max() <= math.pi
    final = theta[:, -1]
    assert final.min() >= -math.pi and final.max() <= math.pi


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31), d=st.sampled_from([64, 96, 257]))
def test_roundtrip_bound_holds_from_d64(seed, d):
    x = unit_rows(16, d, seed)
    x2 = sphc.from_spherical(sphc.to_spherical(x))
    assert np.abs(x2.astype(np.float64) - x.astype(np.float64)).max() < F32_EPS


class TestAngleSimilarity:
    def test_self_similarity(self, angles_2000x768):
        row = angles_2000x768[3]
        assert abs(sphc.angle_similarity(row, row) - 1.0) < 1e-6

    def test_orthogonal_axes(self):
        theta = sphc.to_spherical(np.array([[0, 0, 1]], np.float32))[0]
        phi = sphc.to_spherical(np.array([[1, 0, 0]], np.float32))[0]
        assert abs(sphc.angle_similarity(theta, phi)) < 1e-6

    def test_matches_cartesian_dot_oracle_d16(self):
        theta = sphc.to_spherical(unit_rows(1, 16, 101))[0]
        phi = sphc.to_spherical(unit_rows(1, 16, 202))[0]
        oracle = brute_dot(
            sphc.from_spherical(theta.reshape(1, -1))[0],
            sphc.from_spherical(phi.reshape(1, -1))[0],
        )
        assert abs(sphc.angle_similarity(theta, phi) - oracle) < 1e-6

    @pytest.mark.parametrize("d", [2, 3, 8, 64, 768])
    def test_recurrence_equals_brute_dot_across_dims(self, d):
        theta = sphc.to_spherical(unit_rows(20, d, 7))
        phi = sphc.to_spherical(unit_rows(20, d, 8))
        xs = sphc.from_spherical(theta)
        ys = sphc.from_spherical(phi)
        sims = sphc.angle_similarity(theta, phi)
        for i in range(20):
            assert abs(sims[i] - brute_dot(xs[i], ys[i])) < 1e-6

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            sphc.angle_similarity(np.zeros(3), np.zeros(4))


class TestCheckNorms:
    def test_unit_row_accepted(self):
        x = unit_rows(1, 64, 1)
        out, report = sphc.check_norms(x, tolerance=1e-3)
        assert out is x
        assert report.max_deviation < 1e-6
        assert report.violations == 0

    def test_renormalize_scaled_row(self):
        x = unit_rows(1, 64, 2) * np.float32(2.0)
        out, report = sphc.check_norms(x, renormalize=True)
        assert abs(np.linalg.norm(out.astype(np.float64)) - 1.0) < 1e-6
        np.testing.assert_allclose(report.norms, [2.0], rtol=1e-6)

    def test_violation_raised(self):
        x = unit_rows(1, 64, 3) * np.float32(1.01)
        with pytest.raises(NormViolation) as exc:
            sphc.check_norms(x, tolerance=1e-3, renormalize=False)
        assert exc.value.count == 1
        assert 0.005 < exc.value.max_deviation < 0.015

    def test_zero_row_rejected_under_renormalize(self):
        x = np.zeros((2, 8), np.float32)
        x[0, 0] = 1.0
        with pytest.raises(ZeroNormRow):
            sphc.check_norms(x, renormalize=True)


def test_transform_scales_linearly():
    # O(n*d): doubling n must not change the per-row cost by more than 1.5x
    import time

    d = 768
    small = unit_rows(2000, d, 9)
    big = unit_rows(4000, d, 9)
    sphc.to_spherical(small)  # warm
    times = {}
    for name, m in (("small", small), ("big", big)):
        best = math.inf
        for _ in range(3):
            t0 = time.perf_counter()
            sphc.to_spherical(m)
            best = min(best, time.perf_counter() - t0)
        times[name] = best
    per_row_ratio = (times["big"] / 4000) / (times["small"] / 2000)
    assert per_row_ratio < 1.5
