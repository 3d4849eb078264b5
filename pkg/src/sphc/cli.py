"""Command-line surface: compress, decompress, analyze, verify, gen, bench,
similarity.

Exit codes: 0 success, 1 usage, 2 data error (norm violations, corrupt
containers, shape mismatches, out-of-range rows), 3 I/O error. Non-zero exits
always carry an `error: <Name>: <message>` diagnostic on stderr. Reports go to
stdout as flat key=value text, or one JSON object with --json.

Throughput figures are always measured against the raw (uncompressed) byte
count. --threads defaults to the available cores; 1 forces sequential
evaluation (results are identical either way).
"""

import argparse
import sys
import time

import numpy as np

from . import _kernels, analysis, codec, synth, transform
from .errors import NoQualifyingColumns, SphcError, UnsupportedLayout


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_shape(text: str) -> tuple[int, int]:
    try:
        n, d = (int(part) for part in text.split(","))
        return n, d
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N,D with two integers, got {text!r}")


def _parse_rows(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a row range A..B, got {text!r}")


def _parse_levels(text: str) -> list[int]:
    try:
        levels = [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated level list, got {text!r}")
    if not levels or any(lv < 1 for lv in levels):
        raise argparse.ArgumentTypeError(f"levels must be positive integers, got {text!r}")
    return levels


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sphc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compress", help="matrix file -> .sphc container")
    c.add_argument("--input", required=True)
    c.add_argument("--output", required=True)
    c.add_argument("--shape", type=_parse_shape, help="N,D for raw (non-NPY) input")
    c.add_argument("--mode", choices=[codec.MODE_SPHERICAL, codec.MODE_BASELINE],
                   default=codec.MODE_SPHERICAL)
    c.add_argument("--level", type=int, default=codec.DEFAULT_LEVEL)
    c.add_argument("--chunk-size", type=int, default=codec.DEFAULT_CHUNK_SIZE,
                   help="rows per chunk, 0 = single chunk")
    c.add_argument("--truncate-bits", type=int, default=0)
    c.add_argument("--store-norms", action="store_true")
    c.add_argument("--renormalize", action="store_true")
    c.add_argument("--norm-tolerance", type=float, default=transform.DEFAULT_NORM_TOLERANCE)
    c.add_argument("--threads", type=int, default=None)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_compress)

    dc = sub.add_parser("decompress", help=".sphc container -> matrix file")
    dc.add_argument("--input", required=True)
    dc.add_argument("--output", required=True)
    dc.add_argument("--rows", type=_parse_rows, help="half-open row range A..B")
    dc.add_argument("--threads", type=int, default=None)
    dc.add_argument("--json", action="store_true")
    dc.set_defaults(func=cmd_decompress)

    an = sub.add_parser("analyze", help="entropy/concentration profile of a matrix")
    an.add_argument("--input", required=True)
    an.add_argument("--shape", type=_parse_shape)
    an.add_argument("--min-tail", type=int, default=64)
    an.add_argument("--json", action="store_true")
    an.set_defaults(func=cmd_analyze)

    ve = sub.add_parser("verify", help="error report between two matrices")
    ve.add_argument("--original", required=True)
    ve.add_argument("--candidate", required=True)
    ve.add_argument("--shape", type=_parse_shape)
    ve.add_argument("--cross-pairs", type=int, default=10000)
    ve.add_argument("--json", action="store_true")
    ve.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="write a synthetic unit-norm matrix")
    g.add_argument("--dist", choices=list(synth.DISTRIBUTIONS), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--kappa", type=float, default=0.0)
    g.add_argument("--clusters", type=int, default=1)
    g.add_argument("--density", type=float, default=0.1)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--output", required=True)
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="level sweep over generated data")
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--size-mb", type=float, required=True)
    b.add_argument("--levels", type=_parse_levels, required=True)
    b.add_argument("--mode", choices=[codec.MODE_SPHERICAL, codec.MODE_BASELINE],
                   default=codec.MODE_SPHERICAL)
    b.add_argument("--chunk-size", type=int, default=codec.DEFAULT_CHUNK_SIZE)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--threads", type=int, default=None)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("similarity", help="dot product straight from stored angles")
    s.add_argument("--input", required=True)
    s.add_argument("--row-a", type=int, required=True)
    s.add_argument("--row-b", type=int, required=True)
    s.add_argument("--check", action="store_true",
                   help="cross-check against the reconstructed Cartesian dot")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_similarity)
    return p


def _emit(report: dict, json_mode: bool) -> None:
    print(analysis.report_text(report, json_mode))


def _read_matrix(path, shape):
    return synth.read_array(path, shape=shape)


def cmd_compress(args) -> int:
    x = _read_matrix(args.input, args.shape)
    opts = codec.CodecOptions(
        mode=args.mode, level=args.level, chunk_size=args.chunk_size,
        truncate_bits=args.truncate_bits, store_norms=args.store_norms,
        renormalize=args.renormalize, norm_tolerance=args.norm_tolerance,
    )
    t0 = time.perf_counter()
    blob = codec.compress(x, opts, threads=args.threads)
    elapsed = time.perf_counter() - t0
    with open(args.output, "wb") as fh:
        fh.write(blob)
    _emit({
        "n": x.shape[0], "d": x.shape[1], "mode": args.mode, "level": args.level,
        "chunk_size": args.chunk_size, "raw_bytes": x.nbytes,
        "compressed_bytes": len(blob), "ratio": x.nbytes / len(blob),
        "seconds": elapsed, "throughput_mb_s": x.nbytes / 2**20 / elapsed,
    }, args.json)
    return 0


def cmd_decompress(args) -> int:
    with open(args.input, "rb") as fh:
        blob = fh.read()
    t0 = time.perf_counter()
    out = codec.decompress(blob, row_range=args.rows, threads=args.threads)
    elapsed = time.perf_counter() - t0
    synth.write_array(args.output, out)
    _emit({
        "rows": out.shape[0], "d": out.shape[1], "raw_bytes": out.nbytes,
        "norms_applied": codec.read_header(blob).header.norms_present,
        "seconds": elapsed, "throughput_mb_s": out.nbytes / 2**20 / elapsed,
    }, args.json)
    return 0


def cmd_analyze(args) -> int:
    x = _read_matrix(args.input, args.shape)
    x = transform._require_matrix(x)
    # measurement path: angles are scale-invariant per row, so no norm gate here
    angles = np.empty((x.shape[0], x.shape[1] - 1), np.float32)
    _kernels.spherical_forward(x, angles)

    cart = analysis.entropy_report(x)
    sph = analysis.entropy_report(angles)
    report = {"n": x.shape[0], "d": x.shape[1]}
    for prefix, rep in (("cartesian", cart), ("spherical", sph)):
        for key, value in rep.as_dict().items():
            report[f"{prefix}.{key}"] = value
    report["entropy_gap_bits_per_byte"] = (
        cart.total_bits_per_byte - sph.total_bits_per_byte
    )
    try:
        report["concentration_fraction"] = analysis.concentration_fraction(
            angles, min_tail=args.min_tail
        )
    except NoQualifyingColumns as exc:
        print(f"warning: NoQualifyingColumns: {exc}", file=sys.stderr)
    _emit(report, args.json)
    return 0


def cmd_verify(args) -> int:
    original = _read_matrix(args.original, args.shape)
    candidate = _read_matrix(args.candidate, args.shape)
    rep = analysis.reconstruction_errors(original, candidate, cross_pairs=args.cross_pairs)
    _emit(rep.as_dict(), args.json)
    return 0


def cmd_gen(args) -> int:
    spec = synth.GenSpec(
        distribution=args.dist, n=args.n, d=args.d, seed=args.seed,
        kappa=args.kappa, clusters=args.clusters, density=args.density,
    )
    matrix = synth.generate(spec)
    synth.write_array(args.output, matrix)
    _emit({
        "distribution": args.dist, "n": args.n, "d": args.d, "seed": args.seed,
        "output": args.output, "bytes": matrix.nbytes,
    }, args.json)
    return 0


def cmd_bench(args) -> int:
    n = max(1, int(args.size_mb * 2**20) // (4 * args.d))
    x = synth.gen_uniform(n, args.d, args.seed)
    raw_mb = x.nbytes / 2**20
    opts = codec.CodecOptions(mode=args.mode, chunk_size=args.chunk_size)
    # warm-up outside the timed region (JIT compilation, page faults)
    codec.decompress(codec.compress(x[: min(n, 64)], opts, threads=args.threads),
                     threads=args.threads)
    rows = []
    for level in args.levels:
        opts.level = level
        t0 = time.perf_counter()
        blob = codec.compress(x, opts, threads=args.threads)
        enc = time.perf_counter() - t0
        t0 = time.perf_counter()
        codec.decompress(blob, threads=args.threads)
        dec = time.perf_counter() - t0
        rows.append({
            "level": level, "size_bytes": len(blob), "ratio": x.nbytes / len(blob),
            "enc_mb_s": raw_mb / enc, "dec_mb_s": raw_mb / dec,
        })
    if args.json:
        _emit({"n": n, "d": args.d, "raw_bytes": x.nbytes, "levels": rows}, True)
        return 0
    print(f"n={n} d={args.d} raw_mb={raw_mb:.2f} mode={args.mode}")
    print(f"{'level':>5} {'size_bytes':>12} {'ratio':>7} {'enc_mb_s':>9} {'dec_mb_s':>9}")
    for row in rows:
        print(f"{row['level']:>5} {row['size_bytes']:>12} {row['ratio']:>7.3f} "
              f"{row['enc_mb_s']:>9.1f} {row['dec_mb_s']:>9.1f}")
    return 0


def cmd_similarity(args) -> int:
    with open(args.input, "rb") as fh:
        blob = fh.read()
    parsed = codec.read_header(blob)
    if parsed.header.mode != codec.MODE_SPHERICAL:
        raise UnsupportedLayout("similarity needs a spherical-mode container (angles)")
    ta = codec.decode_stored(blob, (args.row_a, args.row_a + 1))[0]
    tb = codec.decode_stored(blob, (args.row_b, args.row_b + 1))[0]
    report = {
        "row_a": args.row_a, "row_b": args.row_b,
        "similarity": transform.angle_similarity(ta, tb),
    }
    if args.check:
        ra = transform.from_spherical(ta.reshape(1, -1))[0].astype(np.float64)
        rb = transform.from_spherical(tb.reshape(1, -1))[0].astype(np.float64)
        report["cartesian_dot"] = float(ra @ rb)
        report["check_delta"] = abs(report["similarity"] - report["cartesian_dot"])
    _emit(report, args.json)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 1
    except SphcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())
