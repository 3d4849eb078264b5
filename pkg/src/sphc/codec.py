"""Container serialization: transpose + byte-plane shuffle + Zstandard frames.

Container layout (.sphc, little-endian):

    bytes 0-3    magic "SPHC"
    4            version (1)
    5            mode (0 spherical, 1 baseline)
    6            flags (bit0 norms stream present, bit1 mantissa truncation applied)
    7            truncate_bits
    8-15         n (u64 rows)
    16-19        d (u32 columns)
    20-23        chunk_size (u32, 0 = all rows in one chunk)
    24-27        num_chunks (u32)
    then         num_chunks * u64 compressed chunk lengths
    then         if flags bit0: u64 norms stream length + one Zstandard frame
    then         chunk payloads, each an independent Zstandard frame

Each chunk is shuffled and entropy-coded on its own, so random access never
decodes foreign rows; chunks are also encoded/decoded concurrently when a
thread count > 1 is requested (results are identical either way because rows
never interact).
"""

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels, _libzstd
from .errors import (
    BadMagic,
    BitCountOutOfRange,
    CorruptFrame,
    LengthMismatch,
    RangeOutOfBounds,
    TruncatedHeader,
    UnsupportedVersion,
)
from .transform import DEFAULT_NORM_TOLERANCE, _norm_policy, _require_matrix

MAGIC = b"SPHC"
VERSION = 1
MODE_SPHERICAL = "spherical"
MODE_BASELINE = "baseline"
_MODE_CODES = {MODE_SPHERICAL: 0, MODE_BASELINE: 1}
_MODE_NAMES = {v: k for k, v in _MODE_CODES.items()}
_FLAG_NORMS = 0x01
_FLAG_TRUNCATED = 0x02

_HEADER = struct.Struct("<4sBBBBQIII")
HEADER_SIZE = _HEADER.size  # 28

DEFAULT_LEVEL = 3
DEFAULT_CHUNK_SIZE = 1000


@dataclass
class CodecOptions:
    mode: str = MODE_SPHERICAL
    level: int = DEFAULT_LEVEL
    chunk_size: int = DEFAULT_CHUNK_SIZE
    truncate_bits: int = 0
    store_norms: bool = False
    renormalize: bool = False
    norm_tolerance: float = DEFAULT_NORM_TOLERANCE

    def validate(self) -> None:
        if self.mode not in _MODE_CODES:
            raise ValueError(f"mode must be one of {sorted(_MODE_CODES)}, got {self.mode!r}")
        if not 1 <= self.level <= _libzstd.max_level():
            raise ValueError(f"level must be in [1, {_libzstd.max_level()}], got {self.level}")
        if self.chunk_size < 0:
            raise ValueError("chunk_size must be >= 0 (0 = single chunk)")
        if not 0 <= self.truncate_bits <= 22:
            raise BitCountOutOfRange(f"truncate_bits must be in [0, 22], got {self.truncate_bits}")
        if self.norm_tolerance <= 0:
            raise ValueError("norm_tolerance must be positive")
        if self.mode == MODE_BASELINE and self.store_norms and not self.renormalize:
            raise ValueError(
                "store_norms without renormalize is contradictory in baseline mode: "
                "the stored coordinates already carry their scale"
            )


@dataclass
class ContainerHeader:
    mode: str
    n: int
    d: int
    chunk_size: int  # as written (0 = all rows)
    num_chunks: int
    truncate_bits: int = 0
    norms_present: bool = False
    version: int = VERSION

    @property
    def effective_chunk_size(self) -> int:
        return self.chunk_size if self.chunk_size > 0 else self.n

    @property
    def width(self) -> int:
        """Stored float32 values per row: d-1 angles or d coordinates."""
        return self.d - 1 if self.mode == MODE_SPHERICAL else self.d

    def pack(self) -> bytes:
        flags = (_FLAG_NORMS if self.norms_present else 0) | (
            _FLAG_TRUNCATED if self.truncate_bits else 0
        )
        return _HEADER.pack(
            MAGIC, self.version, _MODE_CODES[self.mode], flags,
            self.truncate_bits, self.n, self.d, self.chunk_size, self.num_chunks,
        )


@dataclass
class ParsedContainer:
    header: ContainerHeader
    chunk_lengths: np.ndarray  # (num_chunks,) u64
    chunk_offsets: np.ndarray  # (num_chunks + 1,) absolute payload offsets
    norms_offset: int = 0
    norms_length: int = 0


def shuffle_filter(chunk: np.ndarray) -> bytes:
    """Transpose an (m, w) float32 chunk to value-column order and split it
    into the four little-endian byte planes, least-significant plane first."""
    chunk = _as_f32_2d(chunk)
    m, w = chunk.shape
    out = np.empty(4 * m * w, np.uint8)
    _kernels.shuffle_bytes(chunk.view(np.uint32), out)
    return out.tobytes()


def unshuffle_filter(buf, m: int, w: int) -> np.ndarray:
    """Exact inverse of shuffle_filter."""
    raw = np.frombuffer(buf, dtype=np.uint8) if not isinstance(buf, np.ndarray) else buf
    if raw.size != 4 * m * w:
        raise LengthMismatch(f"buffer holds {raw.size} bytes, expected {4 * m * w}")
    out = np.empty((m, w), np.uint32)
    _kernels.unshuffle_bytes(raw, m, w, out)
    return out.view(np.float32)


def truncate_mantissa(values: np.ndarray, k: int) -> np.ndarray:
    """Zero the k least-significant mantissa bits of every float32 value."""
    if not 0 <= k <= 22:
        raise BitCountOutOfRange(f"k must be in [0, 22], got {k}")
    if values.dtype != np.float32:
        raise ValueError("truncate_mantissa operates on float32 values")
    out = np.ascontiguousarray(values).copy()
    if k:
        _truncate_inplace(out, k)
    return out


def _truncate_inplace(values: np.ndarray, k: int) -> None:
    mask = np.uint32((0xFFFFFFFF << k) & 0xFFFFFFFF)
    u = values.view(np.uint32)
    np.bitwise_and(u, mask, out=u)


def _as_f32_2d(chunk: np.ndarray) -> np.ndarray:
    chunk = np.ascontiguousarray(chunk, dtype=np.float32)
    if chunk.ndim != 2 or chunk.shape[0] < 1 or chunk.shape[1] < 1:
        raise LengthMismatch(f"expected a non-empty 2-D chunk, got shape {chunk.shape}")
    return chunk


def _resolve_threads(threads) -> int:
    if threads is None:
        return os.cpu_count() or 1
    return max(1, int(threads))


def _map_chunks(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def compress(x: np.ndarray, opts: CodecOptions | None = None, threads: int | None = None) -> bytes:
    """Serialize a float32 matrix into a .sphc container."""
    opts = opts or CodecOptions()
    opts.validate()
    x = _require_matrix(x)
    n, d = x.shape
    threads = _resolve_threads(threads)

    norms = None
    if opts.mode == MODE_SPHERICAL or opts.renormalize or opts.store_norms:
        x, report = _norm_policy(x, opts.norm_tolerance, opts.renormalize)
        if opts.store_norms:
            norms = report.norms.astype(np.float32)

    cs = opts.chunk_size if opts.chunk_size > 0 else n
    bounds = [(lo, min(lo + cs, n)) for lo in range(0, n, cs)]
    spherical = opts.mode == MODE_SPHERICAL
    w = d - 1 if spherical else d

    def encode(span):
        lo, hi = span
        rows = x[lo:hi]
        if spherical:
            vals = np.empty((hi - lo, w), np.float32)
            _kernels.spherical_forward(rows, vals)
        else:
            vals = rows
        if opts.truncate_bits:
            if vals is rows:
                vals = rows.copy()
            _truncate_inplace(vals, opts.truncate_bits)
        shuffled = np.empty(4 * vals.size, np.uint8)
        _kernels.shuffle_bytes(vals.view(np.uint32), shuffled)
        return _libzstd.compress_frame(shuffled, opts.level)

    frames = _map_chunks(encode, bounds, threads)

    header = ContainerHeader(
        mode=opts.mode, n=n, d=d, chunk_size=opts.chunk_size,
        num_chunks=len(bounds), truncate_bits=opts.truncate_bits,
        norms_present=norms is not None,
    )
    parts = [header.pack()]
    parts.append(np.array([len(f) for f in frames], dtype="<u8").tobytes())
    if norms is not None:
        norms_frame = _libzstd.compress_frame(
            np.frombuffer(shuffle_filter(norms.reshape(n, 1)), np.uint8), opts.level
        )
        parts.append(struct.pack("<Q", len(norms_frame)))
        parts.append(norms_frame)
    parts.extend(frames)
    return b"".join(parts)


def read_header(container: bytes) -> ParsedContainer:
    """Parse the header and compute absolute chunk payload offsets.

    Needs only the metadata region (header, chunk table, norms length field);
    no payload is decoded.
    """
    blob = memoryview(container)
    if len(blob) < HEADER_SIZE:
        raise TruncatedHeader(f"container holds {len(blob)} bytes, header needs {HEADER_SIZE}")
    magic, version, mode_code, flags, tbits, n, d, chunk_size, num_chunks = _HEADER.unpack(
        blob[:HEADER_SIZE]
    )
    if magic != MAGIC:
        raise BadMagic(f"bad magic {bytes(magic)!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersion(f"container version {version}, supported: {VERSION}")
    if mode_code not in _MODE_NAMES:
        raise CorruptFrame(f"unknown mode code {mode_code}")
    if d < 2 or n < 1:
        raise CorruptFrame(f"invalid dimensions n={n}, d={d}")
    header = ContainerHeader(
        mode=_MODE_NAMES[mode_code], n=n, d=d, chunk_size=chunk_size,
        num_chunks=num_chunks, truncate_bits=tbits,
        norms_present=bool(flags & _FLAG_NORMS),
    )
    cs = header.effective_chunk_size
    if num_chunks != (n + cs - 1) // cs:
        raise CorruptFrame(
            f"chunk count {num_chunks} inconsistent with n={n}, chunk_size={cs}"
        )
    table_end = HEADER_SIZE + 8 * num_chunks
    if len(blob) < table_end:
        raise TruncatedHeader("container ends inside the chunk table")
    lengths = np.frombuffer(blob[HEADER_SIZE:table_end], dtype="<u8")
    norms_offset = norms_length = 0
    payload_base = table_end
    if header.norms_present:
        if len(blob) < table_end + 8:
            raise TruncatedHeader("container ends before the norms stream length")
        (norms_length,) = struct.unpack("<Q", blob[table_end:table_end + 8])
        norms_offset = table_end + 8
        payload_base = norms_offset + norms_length
    offsets = np.empty(num_chunks + 1, dtype=np.uint64)
    offsets[0] = payload_base
    np.cumsum(lengths, out=offsets[1:])
    offsets[1:] += payload_base
    return ParsedContainer(
        header=header, chunk_lengths=lengths.copy(), chunk_offsets=offsets,
        norms_offset=norms_offset, norms_length=norms_length,
    )


def _resolve_range(n: int, row_range) -> tuple[int, int]:
    if row_range is None:
        return 0, n
    a, b = row_range
    if not (0 <= a < b <= n):
        raise RangeOutOfBounds(f"row range [{a}, {b}) invalid for n={n}")
    return int(a), int(b)


def _decode_chunks(container, parsed: ParsedContainer, a: int, b: int, threads: int, sink):
    """Decode every chunk intersecting [a, b) and hand (rows_f32, out_lo) to sink."""
    header = parsed.header
    cs = header.effective_chunk_size
    w = header.width
    raw = np.frombuffer(container, dtype=np.uint8)
    c0, c1 = a // cs, (b + cs - 1) // cs

    def decode(c):
        lo, hi = c * cs, min((c + 1) * cs, header.n)
        m = hi - lo
        o0, o1 = int(parsed.chunk_offsets[c]), int(parsed.chunk_offsets[c + 1])
        if o1 > raw.size:
            raise CorruptFrame("chunk payload extends past the container end")
        shuffled = _libzstd.decompress_frame(raw[o0:o1], 4 * m * w)
        vals = np.empty((m, w), np.uint32)
        _kernels.unshuffle_bytes(shuffled, m, w, vals)
        local_lo, local_hi = max(a, lo) - lo, min(b, hi) - lo
        sink(vals.view(np.float32)[local_lo:local_hi], max(a, lo) - a)

    _map_chunks(decode, list(range(c0, c1)), threads)


def _decode_norms(container, parsed: ParsedContainer) -> np.ndarray:
    o = parsed.norms_offset
    frame = np.frombuffer(container, dtype=np.uint8)[o:o + parsed.norms_length]
    n = parsed.header.n
    shuffled = _libzstd.decompress_frame(frame, 4 * n)
    return unshuffle_filter(shuffled, n, 1).reshape(n)


def decompress(
    container: bytes,
    row_range: tuple[int, int] | None = None,
    threads: int | None = None,
    return_norms: bool = False,
):
    """Reconstruct the float32 matrix (rows [a, b) if a range is given).

    Only chunks intersecting the requested range are decoded, and the output
    is bit-identical to the matching slice of a full decompression. When a
    norms stream is present rows are rescaled by their stored norms, and the
    norms slice is returned alongside the matrix if return_norms is set.
    """
    parsed = read_header(container)
    header = parsed.header
    a, b = _resolve_range(header.n, row_range)
    threads = _resolve_threads(threads)
    out = np.empty((b - a, header.d), np.float32)

    if header.mode == MODE_SPHERICAL:
        def sink(angles, out_lo):
            _kernels.spherical_inverse(angles, out[out_lo:out_lo + angles.shape[0]])
    else:
        def sink(coords, out_lo):
            out[out_lo:out_lo + coords.shape[0]] = coords

    _decode_chunks(container, parsed, a, b, threads, sink)

    norms = None
    if header.norms_present:
        norms = _decode_norms(container, parsed)[a:b]
        out = (out.astype(np.float64) * norms.astype(np.float64)[:, None]).astype(np.float32)
    if return_norms:
        return out, norms
    return out


def decode_stored(
    container: bytes,
    row_range: tuple[int, int] | None = None,
    threads: int | None = None,
) -> np.ndarray:
    """Return the stored float32 values (angles in spherical mode, coordinates
    in baseline mode) without applying the inverse transform."""
    parsed = read_header(container)
    a, b = _resolve_range(parsed.header.n, row_range)
    out = np.empty((b - a, parsed.header.width), np.float32)

    def sink(vals, out_lo):
        out[out_lo:out_lo + vals.shape[0]] = vals

    _decode_chunks(container, parsed, a, b, _resolve_threads(threads), sink)
    return out
