"""Minimal ctypes binding to the system libzstd.

Only the one-shot frame API is used: every chunk is an independent standard
Zstandard frame (RFC 8878), and frame sizes are tracked in the container, so
no streaming or seekable-format machinery is needed. One-shot calls allocate
their own context, which makes them safe to issue from multiple threads, and
ctypes releases the GIL for the duration of each call.
"""

import ctypes
import ctypes.util

import numpy as np

from .errors import CorruptFrame

_lib = None


def _load():
    global _lib
    if _lib is not None:
        return _lib
    name = ctypes.util.find_library("zstd") or "libzstd.so.1"
    lib = ctypes.CDLL(name)
    lib.ZSTD_compressBound.restype = ctypes.c_size_t
    lib.ZSTD_compressBound.argtypes = [ctypes.c_size_t]
    lib.ZSTD_compress.restype = ctypes.c_size_t
    lib.ZSTD_compress.argtypes = [
        ctypes.c_void_p, ctypes.c_size_t, ctypes.c_void_p, ctypes.c_size_t, ctypes.c_int,
    ]
    lib.ZSTD_decompress.restype = ctypes.c_size_t
    lib.ZSTD_decompress.argtypes = [
        ctypes.c_void_p, ctypes.c_size_t, ctypes.c_void_p, ctypes.c_size_t,
    ]
    lib.ZSTD_isError.restype = ctypes.c_uint
    lib.ZSTD_isError.argtypes = [ctypes.c_size_t]
    lib.ZSTD_getErrorName.restype = ctypes.c_char_p
    lib.ZSTD_getErrorName.argtypes = [ctypes.c_size_t]
    lib.ZSTD_maxCLevel.restype = ctypes.c_int
    lib.ZSTD_versionNumber.restype = ctypes.c_uint
    _lib = lib
    return lib


def max_level() -> int:
    return _load().ZSTD_maxCLevel()


def version() -> str:
    v = _load().ZSTD_versionNumber()
    return f"{v // 10000}.{v // 100 % 100}.{v % 100}"


def _pin(data):
    """Normalize input to (owner, pointer, length); owner must outlive the call."""
    if isinstance(data, np.ndarray):
        if data.dtype != np.uint8 or not data.flags.c_contiguous:
            raise TypeError("expected a contiguous uint8 array")
        return data, data.ctypes.data, data.nbytes
    if not isinstance(data, bytes):
        data = bytes(data)
    ptr = ctypes.cast(ctypes.c_char_p(data), ctypes.c_void_p).value
    return data, ptr, len(data)


def compress_frame(data, level: int) -> bytes:
    """Compress a buffer into a single Zstandard frame."""
    lib = _load()
    owner, ptr, length = _pin(data)
    bound = lib.ZSTD_compressBound(length)
    dst = ctypes.create_string_buffer(bound)
    written = lib.ZSTD_compress(dst, bound, ptr, length, level)
    del owner
    if lib.ZSTD_isError(written):
        raise CorruptFrame(
            f"zstd compression failed: {lib.ZSTD_getErrorName(written).decode()}"
        )
    return dst.raw[:written]


def decompress_frame(data, expected_size: int) -> np.ndarray:
    """Decode one frame into a fresh uint8 array of exactly expected_size bytes."""
    lib = _load()
    owner, ptr, length = _pin(data)
    out = np.empty(expected_size, dtype=np.uint8)
    produced = lib.ZSTD_decompress(out.ctypes.data, expected_size, ptr, length)
    del owner
    if lib.ZSTD_isError(produced):
        raise CorruptFrame(
            f"zstd decompression failed: {lib.ZSTD_getErrorName(produced).decode()}"
        )
    if produced != expected_size:
        raise CorruptFrame(
            f"frame decoded to {produced} bytes, expected {expected_size}"
        )
    return out
