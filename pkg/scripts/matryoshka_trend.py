#!/usr/bin/env python3
"""Compression vs dimensionality at fixed row count.

The spherical advantage grows with d: the angle count d-1 approaches d, and
angle concentration around pi/2 tightens (variance ~ 1/(d-k-1)), so both the
stored-value fraction and its compressibility improve.
"""

import argparse

import sphc


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--dims", type=lambda s: [int(v) for v in s.split(",")],
                    default=[64, 128, 256, 512, 768, 1024])
    ap.add_argument("--level", type=int, default=3)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()

    print(f"n={args.n} level={args.level} seed={args.seed}")
    print(f"{'d':>6} {'raw_kb':>8} {'baseline_kb':>12} {'spherical_kb':>13} "
          f"{'ratio':>7} {'gain':>7}")
    for d in args.dims:
        x = sphc.gen_uniform(args.n, d, args.seed)
        rep = sphc.compare_methods(x, sphc.CodecOptions(level=args.level))
        print(f"{d:>6} {rep.raw_bytes / 1024:>8.0f} {rep.baseline_bytes / 1024:>12.0f} "
              f"{rep.spherical_bytes / 1024:>13.0f} {rep.ratio_spherical:>6.2f}x "
              f"{rep.ratio_gain_vs_baseline:>+6.1%}")


if __name__ == "__main__":
    main()
