"""Spherical coordinate transforms and direct similarity on angles.

An embedding matrix is a plain C-order float32 ndarray of shape (n, d) with
d >= 2 whose rows are unit-norm (within tolerance). Its angle representation
is float32 of shape (n, d-1): columns 0..d-3 lie in [0, pi], the final column
in [-pi, pi]. All intermediate arithmetic runs in binary64; only stored angles
and reconstructed coordinates are rounded to float32.

Operations here are pure functions of their inputs and rows are independent,
so callers may partition rows across workers without changing results.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DimensionTooSmall,
    LengthMismatch,
    NonFiniteInput,
    NormViolation,
    UnsupportedDtype,
    ZeroNormRow,
)

DEFAULT_NORM_TOLERANCE = 1e-3


@dataclass
class NormReport:
    """Per-row Euclidean norms of the input before any renormalization."""

    norms: np.ndarray  # (n,) binary64
    max_deviation: float  # max |norm - 1|
    violations: int  # rows with |norm - 1| > tolerance

    def as_dict(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "violations": self.violations,
        }


def _require_matrix(x, min_dim: int = 2) -> np.ndarray:
    if not isinstance(x, np.ndarray):
        x = np.asarray(x)
    if x.dtype != np.float32:
        raise UnsupportedDtype(
            f"expected float32 input, got {x.dtype}; the codec targets the "
            "8-bit-exponent/23-bit-mantissa layout and reduced-precision inputs "
            "compress better with the baseline applied to their raw bytes"
        )
    if x.ndim != 2:
        raise DimensionTooSmall(f"expected a 2-D matrix, got ndim={x.ndim}")
    if x.shape[1] < min_dim:
        raise DimensionTooSmall(f"need d >= {min_dim}, got d={x.shape[1]}")
    if x.shape[0] < 1:
        raise DimensionTooSmall("need at least one row")
    if not np.isfinite(x).all():
        raise NonFiniteInput("input contains NaN or Inf")
    return np.ascontiguousarray(x)


def to_spherical(x: np.ndarray) -> np.ndarray:
    """Convert unit-norm rows to their (d-1)-angle representation.

    Runs in O(n*d) using a single backward pass per row for the partial
    squared norms.
    """
    x = _require_matrix(x)
    n, d = x.shape
    out = np.empty((n, d - 1), np.float32)
    _kernels.spherical_forward(x, out)
    return out


def from_spherical(theta: np.ndarray) -> np.ndarray:
    """Reconstruct float32 coordinates from an angle matrix."""
    theta = _require_matrix(theta, min_dim=1)
    n, dm1 = theta.shape
    out = np.empty((n, dm1 + 1), np.float32)
    _kernels.spherical_inverse(theta, out)
    return out


def angle_similarity(theta_row, phi_row):
    """Dot product of two unit vectors computed directly from their angles.

    Accepts single rows of length d-1 or stacked (m, d-1) batches; returns a
    binary64 scalar or an (m,) binary64 vector. O(d) per pair via the backward
    recurrence R_k = cos(t_k)cos(p_k) + sin(t_k)sin(p_k) * R_{k+1} seeded with
    R_{d-1} = cos(t_{d-1} - p_{d-1}).
    """
    t = np.asarray(theta_row, dtype=np.float64)
    p = np.asarray(phi_row, dtype=np.float64)
    if t.shape != p.shape:
        raise LengthMismatch(f"angle rows differ in shape: {t.shape} vs {p.shape}")
    if t.ndim not in (1, 2) or t.shape[-1] < 1:
        raise LengthMismatch("need rows of at least one angle")
    ct, st = np.cos(t), np.sin(t)
    cp, sp = np.cos(p), np.sin(p)
    r = np.cos(t[..., -1] - p[..., -1])
    for k in range(t.shape[-1] - 2, -1, -1):
        r = ct[..., k] * cp[..., k] + st[..., k] * sp[..., k] * r
    return float(r) if t.ndim == 1 else r


def check_norms(
    x: np.ndarray,
    tolerance: float = DEFAULT_NORM_TOLERANCE,
    renormalize: bool = False,
) -> tuple[np.ndarray, NormReport]:
    """Validate (or restore) the unit-norm invariant.

    Without renormalize, rows whose norm deviates from 1 by more than
    tolerance raise NormViolation. With renormalize, every row is divided by
    its own norm and the original norms are preserved in the report; a row of
    all zeros has no direction and raises ZeroNormRow.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    x = _require_matrix(x)
    return _norm_policy(x, tolerance, renormalize)


def _norm_policy(
    x: np.ndarray, tolerance: float, renormalize: bool
) -> tuple[np.ndarray, NormReport]:
    """check_norms body for input already validated by _require_matrix."""
    norms = _kernels.row_norms(x)
    dev = np.abs(norms - 1.0)
    max_dev = float(dev.max())
    violations = int((dev > tolerance).sum())
    report = NormReport(norms=norms, max_deviation=max_dev, violations=violations)
    if renormalize:
        if (norms == 0.0).any():
            raise ZeroNormRow("cannot renormalize a row of all zeros")
        out = np.empty_like(x)
        _kernels.renormalize_rows(x, norms, out)
        return out, report
    if violations:
        raise NormViolation(violations, max_dev)
    return x, report
