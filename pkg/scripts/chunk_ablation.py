#!/usr/bin/env python3
"""Batch-size and chunk-granularity ablation.

Top block: compression ratio vs total batch size with full-matrix chunking
(small batches give the entropy coder too little context). Bottom block: fixed
n with varying chunk size, reporting the size overhead against full-matrix
compression and the wall time of a single-row random access.
"""

import argparse
import time

import numpy as np

import sphc


def one_row_latency(blob: bytes, n: int, reps: int = 20, seed: int = 1) -> float:
    rng = np.random.Generator(np.random.Philox(seed))
    rows = rng.integers(0, n, size=reps)
    t0 = time.perf_counter()
    for r in rows:
        sphc.decompress(blob, row_range=(int(r), int(r) + 1))
    return (time.perf_counter() - t0) / reps


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--d", type=int, default=768)
    ap.add_argument("--level", type=int, default=19,
                    help="high effort keeps small-chunk overhead lowest")
    ap.add_argument("--seed", type=int, default=4)
    args = ap.parse_args()

    print(f"scale sweep (full-matrix chunking), d={args.d}, level={args.level}")
    print(f"{'n':>8} {'raw_kb':>9} {'compressed_kb':>14} {'ratio':>7}")
    for n in (1, 10, 100, 1000, args.n):
        x = sphc.gen_uniform(n, args.d, args.seed)
        blob = sphc.compress(x, sphc.CodecOptions(level=args.level, chunk_size=0))
        print(f"{n:>8} {x.nbytes / 1024:>9.0f} {len(blob) / 1024:>14.0f} "
              f"{x.nbytes / len(blob):>6.2f}x")

    x = sphc.gen_uniform(args.n, args.d, args.seed)
    full = sphc.compress(x, sphc.CodecOptions(level=args.level, chunk_size=0))
    print(f"\nchunking for random access, n={args.n}")
    print(f"{'chunk':>8} {'compressed_kb':>14} {'ratio':>7} {'overhead':>9} {'1-row_ms':>9}")
    for chunk in (1, 10, 100, 1000, 0):
        blob = sphc.compress(x, sphc.CodecOptions(level=args.level, chunk_size=chunk))
        label = chunk if chunk else "full"
        print(f"{label:>8} {len(blob) / 1024:>14.0f} {x.nbytes / len(blob):>6.2f}x "
              f"{len(blob) / len(full) - 1:>+8.1%} {one_row_latency(blob, args.n) * 1e3:>9.2f}")


if __name__ == "__main__":
    main()
