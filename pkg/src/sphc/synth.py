"""Deterministic synthetic unit-norm matrices, plus NPY/raw file ingestion.

Random source: the counter-based Philox 4x64 bit generator keyed from the u64
seed through numpy's SeedSequence. Same seed, same platform-independent draw
order, bit-identical output. Rows may be generated in parallel only if that
ordering is preserved; the implementations here are single sequential passes.
"""

import ast
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadFormat, NonConvergence, TooManyRows, UnsupportedLayout

DIST_UNIFORM = "uniform"
DIST_VMF = "vmf"
DIST_ORTHOGONAL = "orthogonal"
DIST_SPARSE = "sparse"
DISTRIBUTIONS = (DIST_UNIFORM, DIST_VMF, DIST_ORTHOGONAL, DIST_SPARSE)

_REJECTION_CAP = 1000  # rounds; the envelope accepts >60% per draw, so hitting
                       # this means the sampler itself is broken, not the data


@dataclass
class GenSpec:
    distribution: str
    n: int
    d: int
    seed: int = 0
    kappa: float = 0.0  # vMF concentration
    clusters: int = 1  # vMF mean directions, rows assigned round-robin
    density: float = 0.1  # sparse nonzero fraction

    def validate(self) -> None:
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}")
        if self.n < 1 or self.d < 2:
            raise ValueError(f"need n >= 1 and d >= 2, got n={self.n}, d={self.d}")
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if self.clusters < 1:
            raise ValueError("clusters must be >= 1")
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _unit_rows(m: np.ndarray) -> np.ndarray:
    return (m / np.linalg.norm(m, axis=1, keepdims=True)).astype(np.float32)


def gen_uniform(n: int, d: int, seed: int = 0) -> np.ndarray:
    """Rows drawn uniformly on the unit sphere (normalized Gaussians)."""
    return _unit_rows(_rng(seed).standard_normal((n, d)))


def _vmf_radii(rng: np.random.Generator, kappa: float, d: int, count: int) -> np.ndarray:
    """Sample the mean-direction component w with density prop. to
    exp(kappa*w) * (1 - w^2)^((d-3)/2) via the standard envelope rejection."""
    dim = d - 1
    b = dim / (np.sqrt(4.0 * kappa * kappa + dim * dim) + 2.0 * kappa)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + dim * np.log(1.0 - x0 * x0)
    out = np.empty(count, np.float64)
    filled = 0
    for _ in range(_REJECTION_CAP):
        if filled >= count:
            return out
        need = count - filled
        z = rng.beta(dim / 2.0, dim / 2.0, size=need)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.random(need)
        accepted = w[kappa * w + dim * np.log(1.0 - x0 * w) - c >= np.log(u)]
        out[filled:filled + accepted.size] = accepted
        filled += accepted.size
    raise NonConvergence(
        f"vMF envelope rejection did not fill {count} draws in {_REJECTION_CAP} rounds"
    )


def gen_vmf(n: int, d: int, kappa: float, clusters: int = 1, seed: int = 0) -> np.ndarray:
    """von Mises-Fisher samples around `clusters` uniform mean directions.

    Rows are assigned to clusters round-robin. Each sample combines a radial
    component w from the rejection sampler with a uniform tangent direction:
    x = sqrt(1 - w^2) * v + w * mu.
    """
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    if clusters < 1:
        raise ValueError("clusters must be >= 1")
    rng = _rng(seed)
    mus = rng.standard_normal((clusters, d))
    mus /= np.linalg.norm(mus, axis=1, keepdims=True)
    w = _vmf_radii(rng, kappa, d, n)
    z = rng.standard_normal((n, d))
    mu_rows = mus[np.arange(n) % clusters]
    z -= np.einsum("ij,ij->i", z, mu_rows)[:, None] * mu_rows
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    samples = np.sqrt(1.0 - w * w)[:, None] * z + w[:, None] * mu_rows
    return _unit_rows(samples)


def gen_orthogonal(n: int, d: int, seed: int = 0) -> np.ndarray:
    """First n rows of an orthonormal basis from QR of a random Gaussian."""
    if n > d:
        raise TooManyRows(f"cannot fit {n} orthonormal rows in dimension {d}")
    q, r = np.linalg.qr(_rng(seed).standard_normal((d, n)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return np.ascontiguousarray((q * signs).T.astype(np.float32))


def gen_sparse(n: int, d: int, density: float = 0.1, seed: int = 0) -> np.ndarray:
    """Rows with exactly ceil(density*d) Gaussian entries, then normalized."""
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    nnz = int(np.ceil(density * d))
    rng = _rng(seed)
    positions = np.argsort(rng.random((n, d)), axis=1)[:, :nnz]
    values = rng.standard_normal((n, nnz))
    m = np.zeros((n, d), np.float64)
    np.put_along_axis(m, positions, values, axis=1)
    return _unit_rows(m)


def generate(spec: GenSpec) -> np.ndarray:
    spec.validate()
    if spec.distribution == DIST_UNIFORM:
        return gen_uniform(spec.n, spec.d, spec.seed)
    if spec.distribution == DIST_VMF:
        return gen_vmf(spec.n, spec.d, spec.kappa, spec.clusters, spec.seed)
    if spec.distribution == DIST_ORTHOGONAL:
        return gen_orthogonal(spec.n, spec.d, spec.seed)
    return gen_sparse(spec.n, spec.d, spec.density, spec.seed)


# --- array files ------------------------------------------------------------
#
# NPY v1.0 only: magic \x93NUMPY, version 1.0, u16 little-endian header length,
# then a Python-literal dict declaring '<f4', C order, and a 2-D shape, padded
# with spaces to a 64-byte boundary and terminated by \n. Anything else is a
# raw little-endian float32 file whose shape the caller must supply.

_NPY_MAGIC = b"\x93NUMPY"


def write_array(path, matrix: np.ndarray) -> None:
    """Write a 2-D float32 matrix as NPY v1.0 (.npy) or raw bytes (other)."""
    if matrix.ndim != 2:
        raise UnsupportedLayout(f"can only write 2-D matrices, got ndim={matrix.ndim}")
    if matrix.dtype != np.float32:
        raise UnsupportedLayout(f"can only write float32 matrices, got {matrix.dtype}")
    matrix = np.ascontiguousarray(matrix)
    path = Path(path)
    with open(path, "wb") as fh:
        if path.suffix == ".npy":
            fh.write(_npy_header(matrix.shape))
        fh.write(matrix.tobytes())


def _npy_header(shape: tuple[int, int]) -> bytes:
    text = "{'descr': '<f4', 'fortran_order': False, 'shape': (%d, %d), }" % shape
    prefix_len = len(_NPY_MAGIC) + 2 + 2  # magic + version + u16 length
    pad = (64 - (prefix_len + len(text) + 1) % 64) % 64
    text = text + " " * pad + "\n"
    return _NPY_MAGIC + bytes([1, 0]) + struct.pack("<H", len(text)) + text.encode("latin1")


def read_array(path, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Read a matrix back. Files starting with the NPY magic are parsed as
    NPY v1.0; anything else needs an explicit (n, d) shape."""
    path = Path(path)
    with open(path, "rb") as fh:
        data = fh.read()
    if data[: len(_NPY_MAGIC)] == _NPY_MAGIC:
        return _parse_npy(data)
    if shape is None:
        raise BadFormat(
            f"{path} is not an NPY file; reading raw float32 requires a shape"
        )
    n, d = shape
    if len(data) != 4 * n * d:
        raise BadFormat(f"{path} holds {len(data)} bytes, shape {shape} needs {4 * n * d}")
    return np.frombuffer(data, dtype="<f4").reshape(n, d).copy()


def _parse_npy(data: bytes) -> np.ndarray:
    if len(data) < 10:
        raise BadFormat("NPY file truncated before the header")
    major, minor = data[6], data[7]
    if (major, minor) != (1, 0):
        raise BadFormat(f"only NPY v1.0 is supported, got v{major}.{minor}")
    (hlen,) = struct.unpack("<H", data[8:10])
    header_end = 10 + hlen
    if len(data) < header_end:
        raise BadFormat("NPY header extends past the end of the file")
    try:
        meta = ast.literal_eval(data[10:header_end].decode("latin1"))
        descr, fortran, shape = meta["descr"], meta["fortran_order"], meta["shape"]
    except (ValueError, SyntaxError, KeyError, TypeError) as exc:
        raise BadFormat(f"malformed NPY header: {exc}") from exc
    if descr != "<f4":
        raise UnsupportedLayout(f"only little-endian float32 ('<f4') is supported, got {descr!r}")
    if fortran:
        raise UnsupportedLayout("column-major (fortran_order) NPY files are not supported")
    if not (isinstance(shape, tuple) and len(shape) == 2):
        raise UnsupportedLayout(f"only 2-D arrays are supported, got shape {shape}")
    n, d = shape
    expected = 4 * n * d
    if len(data) - header_end != expected:
        raise BadFormat(
            f"NPY payload holds {len(data) - header_end} bytes, shape {shape} needs {expected}"
        )
    return np.frombuffer(data, dtype="<f4", offset=header_end).reshape(n, d).copy()
