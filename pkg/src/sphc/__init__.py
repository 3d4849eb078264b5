"""Compression for unit-norm float32 embedding matrices.

Rows on the unit hypersphere are stored as d-1 spherical angles, which
concentrate around pi/2 in high dimensions. That collapses the IEEE 754
exponent field to a single dominant value and makes high-order mantissa bits
predictable, so a transpose + byte-plane shuffle + Zstandard pipeline
compresses them well beyond what the same pipeline achieves on raw
coordinates, while the reconstruction error stays below float32 machine
epsilon (1.19e-7). Containers are chunked for random access, and dot products
can be evaluated directly on the stored angles.
"""

from . import errors
from .analysis import (
    ComparisonReport,
    EntropyReport,
    ErrorReport,
    byte_entropy,
    compare_methods,
    concentration_fraction,
    entropy_report,
    exponent_stats,
    reconstruction_errors,
)
from .codec import (
    MODE_BASELINE,
    MODE_SPHERICAL,
    CodecOptions,
    ContainerHeader,
    compress,
    decode_stored,
    decompress,
    read_header,
    shuffle_filter,
    truncate_mantissa,
    unshuffle_filter,
)
from .synth import (
    GenSpec,
    gen_orthogonal,
    gen_sparse,
    gen_uniform,
    gen_vmf,
    generate,
    read_array,
    write_array,
)
from .transform import (
    NormReport,
    angle_similarity,
    check_norms,
    from_spherical,
    to_spherical,
)

__version__ = "0.1.0"

__all__ = [
    "CodecOptions", "ComparisonReport", "ContainerHeader", "EntropyReport",
    "ErrorReport", "GenSpec", "MODE_BASELINE", "MODE_SPHERICAL", "NormReport",
    "angle_similarity", "byte_entropy", "check_norms", "compare_methods",
    "compress", "concentration_fraction", "decode_stored", "decompress",
    "entropy_report", "errors", "exponent_stats", "from_spherical",
    "gen_orthogonal", "gen_sparse", "gen_uniform", "gen_vmf", "generate",
    "read_array", "read_header", "reconstruction_errors", "shuffle_filter",
    "to_spherical", "truncate_mantissa", "unshuffle_filter", "write_array",
]
