/**
 * Buffer-protocol bindings for the sphc compressor.
 *
 * Thin delegation layer: calls run the sphc CLI in a subprocess and exchange
 * data through temp files, so containers are byte-identical to what the
 * primary implementation produces for the same input and options. The input
 * buffer is handed to the OS in a single pass (no intermediate copy); compute
 * happens in the subprocess, so callers are free to run compressions in
 * parallel.
 */

import { spawnSync } from "node:child_process";
import { endianness } from "node:os";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import {
  DimensionTooSmall,
  LengthMismatch,
  UnsupportedDtype,
  throwMapped,
} from "./errors.js";
import { parseNpy, type Matrix } from "./npy.js";

export * from "./errors.js";
export { parseNpy, type Matrix } from "./npy.js";

/** Contiguous little-endian float32 region with shape metadata. */
export interface BufferView {
  data: Float32Array | Uint8Array;
  n: number;
  d: number;
  /** element-type tag; only little-endian float32 is accepted */
  dtype: "<f4";
}

export interface CodecOptions {
  mode?: "spherical" | "baseline";
  level?: number;
  chunkSize?: number;
  truncateBits?: number;
  storeNorms?: boolean;
  renormalize?: boolean;
  normTolerance?: number;
  threads?: number;
}

export interface BindingOptions {
  /** command vector for the primary CLI; default: SPHC_CLI env or python3 -m sphc */
  cli?: string[];
}

function resolveCli(binding?: BindingOptions): string[] {
  if (binding?.cli) return binding.cli;
  const env = process.env.SPHC_CLI;
  if (env) return env.split(" ").filter((s) => s.length);
  return ["python3", "-m", "sphc"];
}

function viewBytes(view: BufferView): Uint8Array {
  if (view.dtype !== "<f4") {
    throw new UnsupportedDtype(
      `element-type tag must be '<f4', got '${String(view.dtype)}'`,
    );
  }
  if (endianness() !== "LE") {
    throw new UnsupportedDtype("host is big-endian; '<f4' views need a little-endian host");
  }
  if (!Number.isInteger(view.n) || !Number.isInteger(view.d) || view.n < 1 || view.d < 2) {
    throw new DimensionTooSmall(`need n >= 1 and d >= 2, got n=${view.n}, d=${view.d}`);
  }
  const bytes =
    view.data instanceof Float32Array
      ? new Uint8Array(view.data.buffer, view.data.byteOffset, view.data.byteLength)
      : view.data;
  if (bytes.byteLength !== 4 * view.n * view.d) {
    throw new LengthMismatch(
      `buffer holds ${bytes.byteLength} bytes, shape (${view.n}, ${view.d}) needs ${4 * view.n * view.d}`,
    );
  }
  return bytes;
}

function runCli(binding: BindingOptions | undefined, args: string[]): string {
  const [cmd, ...prefix] = resolveCli(binding);
  const proc = spawnSync(cmd, [...prefix, ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (proc.error) throw proc.error;
  if (proc.status !== 0) throwMapped(proc.stderr ?? "", proc.status);
  return proc.stdout ?? "";
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "sphc-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

function optionFlags(opts?: CodecOptions): string[] {
  const flags: string[] = [];
  if (!opts) return flags;
  if (opts.mode !== undefined) flags.push("--mode", opts.mode);
  if (opts.level !== undefined) flags.push("--level", String(opts.level));
  if (opts.chunkSize !== undefined) flags.push("--chunk-size", String(opts.chunkSize));
  if (opts.truncateBits !== undefined) flags.push("--truncate-bits", String(opts.truncateBits));
  if (opts.storeNorms) flags.push("--store-norms");
  if (opts.renormalize) flags.push("--renormalize");
  if (opts.normTolerance !== undefined) flags.push("--norm-tolerance", String(opts.normTolerance));
  if (opts.threads !== undefined) flags.push("--threads", String(opts.threads));
  return flags;
}

/** Compress a float32 buffer; output bytes match the primary CLI exactly. */
export function compressBuffer(
  view: BufferView,
  opts?: CodecOptions,
  binding?: BindingOptions,
): Uint8Array {
  const bytes = viewBytes(view);
  return withTempDir((dir) => {
    const input = path.join(dir, "in.f32");
    const output = path.join(dir, "out.sphc");
    fs.writeFileSync(input, bytes);
    runCli(binding, [
      "compress", "--input", input, "--shape", `${view.n},${view.d}`,
      "--output", output, ...optionFlags(opts),
    ]);
    return new Uint8Array(fs.readFileSync(output));
  });
}

/** Decompress a container (optionally a half-open row range) back to float32. */
export function decompressBuffer(
  container: Uint8Array,
  rowRange?: [number, number],
  binding?: BindingOptions,
): Matrix {
  return withTempDir((dir) => {
    const input = path.join(dir, "in.sphc");
    const output = path.join(dir, "out.npy");
    fs.writeFileSync(input, container);
    const args = ["decompress", "--input", input, "--output", output];
    if (rowRange) args.push("--rows", `${rowRange[0]}..${rowRange[1]}`);
    runCli(binding, args);
    return parseNpy(fs.readFileSync(output));
  });
}

/** Entropy / exponent-concentration profile of a float32 buffer. */
export function analyzeBuffer(
  view: BufferView,
  binding?: BindingOptions,
): Record<string, unknown> {
  const bytes = viewBytes(view);
  return withTempDir((dir) => {
    const input = path.join(dir, "in.f32");
    fs.writeFileSync(input, bytes);
    const stdout = runCli(binding, [
      "analyze", "--input", input, "--shape", `${view.n},${view.d}`, "--json",
    ]);
    return JSON.parse(stdout) as Record<string, unknown>;
  });
}
