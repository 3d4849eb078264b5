import numpy as np
import pytest
from scipy.special import ive

import sphc
from sphc.errors import BadFormat, TooManyRows, UnsupportedLayout


def mean_pairwise_cosine(x: np.ndarray) -> float:
    """Average x_i . x_j over i != j, via the resultant-vector identity."""
    xd = x.astype(np.float64)
    n = xd.shape[0]
    total = np.linalg.norm(xd.sum(axis=0)) ** 2 - np.einsum("ij,ij->", xd, xd)
    return float(total / (n * (n - 1)))


def vmf_expected_cosine(d: int, kappa: float) -> float:
    """Bessel-ratio oracle: squared mean resultant length of a vMF sample."""
    a = ive(d / 2, kappa) / ive(d / 2 - 1, kappa)
    return float(a * a)


class TestGenUniform:
    def test_unit_norms(self):
        x = sphc.gen_uniform(500, 768, seed=0)
        assert np.abs(np.linalg.norm(x.astype(np.float64), axis=1) - 1).max() < 1e-6

    def test_mean_pairwise_cosine_near_zero(self):
        x = sphc.gen_uniform(2000, 768, seed=1)
        assert abs(mean_pairwise_cosine(x)) < 0.01

    def test_seed_determinism(self):
        a = sphc.gen_uniform(100, 64, seed=7)
        b = sphc.gen_uniform(100, 64, seed=7)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, sphc.gen_uniform(100, 64, seed=8))


class TestGenVmf:
    def test_kappa_zero_looks_uniform(self):
        x = sphc.gen_vmf(2000, 768, kappa=0.0, seed=2)
        assert abs(mean_pairwise_cosine(x)) < 0.01

    def test_tight_concentration_band(self):
        x = sphc.gen_vmf(2000, 768, kappa=1000.0, seed=3)
        assert abs(mean_pairwise_cosine(x) - 0.47) < 0.03

    def test_moderate_concentration_band(self):
        x = sphc.gen_vmf(2000, 768, kappa=100.0, seed=4)
        assert abs(mean_pairwise_cosine(x) - 0.016) < 0.01

    @pytest.mark.parametrize("kappa", [10.0, 100.0, 1000.0])
    def test_matches_bessel_ratio_oracle(self, kappa):
        x = sphc.gen_vmf(3000, 256, kappa=kappa, seed=5)
        assert abs(mean_pairwise_cosine(x) - vmf_expected_cosine(256, kappa)) < 0.01

    def test_unit_norms_and_determinism(self):
        a = sphc.gen_vmf(200, 96, kappa=50.0, clusters=5, seed=6)
        assert np.abs(np.linalg.norm(a.astype(np.float64), axis=1) - 1).max() < 1e-6
        assert np.array_equal(a, sphc.gen_vmf(200, 96, kappa=50.0, clusters=5, seed=6))

    def test_clusters_round_robin_spread(self):
        # 5 far-apart clusters pull the global mean cosine toward zero
        x = sphc.gen_vmf(2000, 768, kappa=50.0, clusters=5, seed=7)
        assert abs(mean_pairwise_cosine(x)) < 0.05


class TestGenOrthogonal:
    def test_pairwise_dots_vanish(self):
        x = sphc.gen_orthogonal(100, 768, seed=8)
        gram = x.astype(np.float64) @ x.astype(np.float64).T
        assert np.abs(gram - np.eye(100)).max() < 1e-6

    def test_unit_norms(self):
        x = sphc.gen_orthogonal(64, 64, seed=9)
        assert np.abs(np.linalg.norm(x.astype(np.float64), axis=1) - 1).max() < 1e-6

    def test_too_many_rows(self):
        with pytest.raises(TooManyRows):
            sphc.gen_orthogonal(769, 768, seed=10)


class TestGenSparse:
    def test_exact_nonzero_count(self):
        x = sphc.gen_sparse(200, 768, density=0.1, seed=11)
        assert ((x != 0).sum(axis=1) == 77).all()

    def test_unit_norms(self):
        x = sphc.gen_sparse(200, 768, density=0.1, seed=12)
        assert np.abs(np.linalg.norm(x.astype(np.float64), axis=1) - 1).max() < 1e-6

    def test_spherical_beats_baseline_markedly(self):
        x = sphc.gen_sparse(1000, 768, density=0.1, seed=13)
        rep = sphc.compare_methods(x)
        assert rep.ratio_gain_vs_baseline >= 0.15


class TestGenerateDispatch:
    def test_round_trips_spec(self):
        spec = sphc.GenSpec(distribution="vmf", n=50, d=32, seed=1, kappa=5.0)
        assert sphc.generate(spec).shape == (50, 32)

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            sphc.generate(sphc.GenSpec(distribution="nope", n=5, d=8))
        with pytest.raises(ValueError):
            sphc.generate(sphc.GenSpec(distribution="sparse", n=5, d=8, density=0.0))


class TestArrayFiles:
    def test_npy_roundtrip_bit_exact(self, tmp_path):
        x = sphc.gen_uniform(17, 9, seed=14)
        path = tmp_path / "m.npy"
        sphc.write_array(path, x)
        assert np.array_equal(sphc.read_array(path), x)

    def test_npy_header_bytes_for_2x3(self, tmp_path):
        path = tmp_path / "m.npy"
        sphc.write_array(path, np.zeros((2, 3), np.float32))
        blob = path.read_bytes()
        assert blob[:6] == b"\x93NUMPY"
        assert blob[6:8] == bytes([1, 0])
        header = blob[10 : 10 + int.from_bytes(blob[8:10], "little")].decode()
        assert "'descr': '<f4'" in header
        assert "'fortran_order': False" in header
        assert "'shape': (2, 3)" in header
        assert header.endswith("\n")
        assert (10 + len(header)) % 64 == 0

    def test_numpy_reads_our_files(self, tmp_path):
        x = sphc.gen_uniform(5, 7, seed=15)
        path = tmp_path / "m.npy"
        sphc.write_array(path, x)
        assert np.array_equal(np.load(path), x)

    def test_we_read_numpy_files(self, tmp_path):
        x = sphc.gen_uniform(6, 4, seed=16)
        path = tmp_path / "m.npy"
        np.save(path, x)
        assert np.array_equal(sphc.read_array(path), x)

    def test_column_major_rejected(self, tmp_path):
        path = tmp_path / "m.npy"
        np.save(path, np.asfortranarray(sphc.gen_uniform(4, 6, seed=17)))
        with pytest.raises(UnsupportedLayout):
            sphc.read_array(path)

    def test_wrong_dtype_rejected(self, tmp_path):
        path = tmp_path / "m.npy"
        np.save(path, np.zeros((2, 2), np.float64))
        with pytest.raises(UnsupportedLayout):
            sphc.read_array(path)

    def test_bad_magic_raw_without_shape(self, tmp_path):
        path = tmp_path / "m.bin"
        path.write_bytes(b"\x00" * 64)
        with pytest.raises(BadFormat):
            sphc.read_array(path)

    def test_raw_roundtrip(self, tmp_path):
        x = sphc.gen_uniform(8, 16, seed=18)
        path = tmp_path / "m.f32"
        sphc.write_array(path, x)
        assert np.array_equal(sphc.read_array(path, shape=(8, 16)), x)

    def test_raw_length_mismatch(self, tmp_path):
        path = tmp_path / "m.f32"
        path.write_bytes(b"\x00" * 100)
        with pytest.raises(BadFormat):
            sphc.read_array(path, shape=(5, 6))
