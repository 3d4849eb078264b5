"""Entropy, exponent-concentration, error, and ratio-comparison measurements.

Entropies are computed on exact byte histograms (no sampling); inputs at desk
scale are at most tens of MB. Reports serialize as flat key=value documents so
harnesses can diff them; see report_text().
"""

import json
from dataclasses import dataclass

import numpy as np

from . import codec
from .errors import EmptyInput, NoQualifyingColumns, ShapeMismatch

_EXP_MASK = np.uint32(0xFF)
_EXP_SHIFT = np.uint32(23)


@dataclass
class EntropyReport:
    total_bits_per_byte: float
    plane_bits_per_byte: tuple  # 4 entropies, least-significant byte plane first
    exponent_entropy_bits: float
    exponent_unique: int
    exponent_histogram: np.ndarray  # 256 counts

    def as_dict(self) -> dict:
        return {
            "total_bits_per_byte": self.total_bits_per_byte,
            "plane_bits_per_byte": list(self.plane_bits_per_byte),
            "exponent_entropy_bits": self.exponent_entropy_bits,
            "exponent_unique": self.exponent_unique,
            "exponent_histogram": self.exponent_histogram.tolist(),
        }


@dataclass
class ErrorReport:
    max_abs: float
    mean_abs: float
    cos_max_err: float  # max_i |<x_i, x'_i> - 1|
    cross_pair_max_err: float | None = None  # max |x_i.x_j - x'_i.x'_j| over sampled pairs

    def as_dict(self) -> dict:
        out = {
            "max_abs": self.max_abs,
            "mean_abs": self.mean_abs,
            "cos_max_err": self.cos_max_err,
        }
        if self.cross_pair_max_err is not None:
            out["cross_pair_max_err"] = self.cross_pair_max_err
        return out


@dataclass
class ComparisonReport:
    raw_bytes: int
    baseline_bytes: int
    spherical_bytes: int
    ratio_baseline: float
    ratio_spherical: float
    size_reduction_vs_baseline: float  # 1 - spherical/baseline
    ratio_gain_vs_baseline: float  # baseline/spherical - 1

    @classmethod
    def from_sizes(cls, raw_bytes: int, baseline_bytes: int, spherical_bytes: int):
        return cls(
            raw_bytes=raw_bytes,
            baseline_bytes=baseline_bytes,
            spherical_bytes=spherical_bytes,
            ratio_baseline=raw_bytes / baseline_bytes,
            ratio_spherical=raw_bytes / spherical_bytes,
            size_reduction_vs_baseline=1.0 - spherical_bytes / baseline_bytes,
            ratio_gain_vs_baseline=baseline_bytes / spherical_bytes - 1.0,
        )

    def as_dict(self) -> dict:
        return {
            "raw_bytes": self.raw_bytes,
            "baseline_bytes": self.baseline_bytes,
            "spherical_bytes": self.spherical_bytes,
            "ratio_baseline": self.ratio_baseline,
            "ratio_spherical": self.ratio_spherical,
            "size_reduction_vs_baseline": self.size_reduction_vs_baseline,
            "ratio_gain_vs_baseline": self.ratio_gain_vs_baseline,
        }


def _entropy_from_counts(counts: np.ndarray) -> float:
    total = counts.sum()
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def byte_entropy(buf) -> float:
    """Shannon entropy of the 256-bin byte histogram, in bits per byte."""
    raw = np.frombuffer(buf, dtype=np.uint8) if not isinstance(buf, np.ndarray) else buf.reshape(-1).view(np.uint8)
    if raw.size == 0:
        raise EmptyInput("cannot measure entropy of an empty buffer")
    return _entropy_from_counts(np.bincount(raw, minlength=256))


def exponent_stats(values: np.ndarray) -> tuple[np.ndarray, float, int]:
    """Histogram, Shannon entropy, and distinct count of the 8-bit exponent
    field (bits 30..23) over a float32 buffer."""
    values = np.ascontiguousarray(values, dtype=np.float32)
    if values.size == 0:
        raise EmptyInput("cannot measure exponents of an empty buffer")
    fields = (values.view(np.uint32).reshape(-1) >> _EXP_SHIFT) & _EXP_MASK
    hist = np.bincount(fields, minlength=256)
    return hist, _entropy_from_counts(hist), int((hist > 0).sum())


def entropy_report(values: np.ndarray) -> EntropyReport:
    """Full byte-level entropy profile of a float32 buffer."""
    values = np.ascontiguousarray(values, dtype=np.float32)
    if values.size == 0:
        raise EmptyInput("cannot profile an empty buffer")
    u = values.view(np.uint32).reshape(-1)
    planes = tuple(
        _entropy_from_counts(
            np.bincount(((u >> np.uint32(8 * p)) & np.uint32(0xFF)), minlength=256)
        )
        for p in range(4)
    )
    hist, exp_entropy, unique = exponent_stats(values)
    return EntropyReport(
        total_bits_per_byte=byte_entropy(values.view(np.uint8)),
        plane_bits_per_byte=planes,
        exponent_entropy_bits=exp_entropy,
        exponent_unique=unique,
        exponent_histogram=hist,
    )


def concentration_fraction(theta: np.ndarray, min_tail: int = 64) -> float:
    """Fraction of angle entries whose exponent field is 127, restricted to
    angle columns k (1-based) with d - k >= min_tail."""
    theta = np.ascontiguousarray(theta, dtype=np.float32)
    if theta.ndim != 2:
        raise ShapeMismatch("expected an (n, d-1) angle matrix")
    d = theta.shape[1] + 1
    ncols = d - min_tail  # columns k = 1 .. d - min_tail qualify
    if ncols < 1:
        raise NoQualifyingColumns(
            f"no angle column has a tail of {min_tail} coordinates at d={d}"
        )
    ncols = min(ncols, theta.shape[1])
    fields = (theta[:, :ncols].reshape(-1).view(np.uint32) >> _EXP_SHIFT) & _EXP_MASK
    return float((fields == 127).mean())


def reconstruction_errors(
    x: np.ndarray, x_prime: np.ndarray, cross_pairs: int = 0, seed: int = 0
) -> ErrorReport:
    """Element-wise and cosine deviations between a matrix and its
    reconstruction, accumulated in binary64.

    cross_pairs > 0 additionally samples that many random (i, j) pairs and
    reports the worst |x_i.x_j - x'_i.x'_j| dot-product perturbation.
    """
    if x.shape != x_prime.shape:
        raise ShapeMismatch(f"shape mismatch: {x.shape} vs {x_prime.shape}")
    a = np.asarray(x, dtype=np.float64)
    b = np.asarray(x_prime, dtype=np.float64)
    diff = np.abs(a - b)
    cos_dev = np.abs(np.einsum("ij,ij->i", a, b) - 1.0)
    cross = None
    if cross_pairs > 0 and a.ndim == 2 and a.shape[0] > 1:
        rng = np.random.Generator(np.random.Philox(seed))
        i = rng.integers(0, a.shape[0], size=cross_pairs)
        j = rng.integers(0, a.shape[0], size=cross_pairs)
        orig = np.einsum("ij,ij->i", a[i], a[j])
        recon = np.einsum("ij,ij->i", b[i], b[j])
        cross = float(np.abs(orig - recon).max())
    return ErrorReport(
        max_abs=float(diff.max()),
        mean_abs=float(diff.mean()),
        cos_max_err=float(cos_dev.max()),
        cross_pair_max_err=cross,
    )


def compare_methods(
    x: np.ndarray, opts: codec.CodecOptions | None = None, threads: int | None = None
) -> ComparisonReport:
    """Compress a matrix in both modes with identical level and chunking."""
    opts = opts or codec.CodecOptions()
    base_opts = codec.CodecOptions(
        mode=codec.MODE_BASELINE, level=opts.level, chunk_size=opts.chunk_size,
        truncate_bits=opts.truncate_bits, store_norms=opts.store_norms,
        renormalize=opts.renormalize, norm_tolerance=opts.norm_tolerance,
    )
    sph_opts = codec.CodecOptions(
        mode=codec.MODE_SPHERICAL, level=opts.level, chunk_size=opts.chunk_size,
        truncate_bits=opts.truncate_bits, store_norms=opts.store_norms,
        renormalize=opts.renormalize, norm_tolerance=opts.norm_tolerance,
    )
    baseline = codec.compress(x, base_opts, threads=threads)
    spherical = codec.compress(x, sph_opts, threads=threads)
    return ComparisonReport.from_sizes(x.nbytes, len(baseline), len(spherical))


def report_text(mapping: dict, json_mode: bool = False) -> str:
    """Serialize a flat report dict as key=value lines (or one JSON object)."""
    if json_mode:
        return json.dumps(mapping, indent=2, sort_keys=False)
    lines = []
    for key, value in mapping.items():
        if isinstance(value, (list, tuple)):
            value = ",".join(_fmt(v) for v in value)
        else:
            value = _fmt(value)
        lines.append(f"{key}={value}")
    return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)
