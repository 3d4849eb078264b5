import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, describe, expect, it } from "vitest";

import {
  analyzeBuffer,
  compressBuffer,
  decompressBuffer,
  parseNpy,
  CorruptFrame,
  LengthMismatch,
  RangeOutOfBounds,
  UnsupportedDtype,
  type BufferView,
  type CodecOptions,
} from "../src/index.js";

const CLI = process.env.SPHC_CLI?.split(" ") ?? ["python3", "-m", "sphc"];
const F32_EPS = 1.19e-7;

const workDir = fs.mkdtempSync(path.join(os.tmpdir(), "sphc-test-"));
afterAll(() => fs.rmSync(workDir, { recursive: true, force: true }));

function cli(args: string[]): void {
  const proc = spawnSync(CLI[0], [...CLI.slice(1), ...args], { encoding: "utf8" });
  if (proc.status !== 0) {
    throw new Error(`cli ${args[0]} failed (${proc.status}): ${proc.stderr}`);
  }
}

function genMatrix(n: number, d: number, seed: number): { view: BufferView; npyPath: string } {
  const npyPath = path.join(workDir, `gen-${n}x${d}-${seed}.npy`);
  cli(["gen", "--dist", "uniform", "--n", String(n), "--d", String(d),
       "--seed", String(seed), "--output", npyPath]);
  const { data, shape } = parseNpy(fs.readFileSync(npyPath));
  return { view: { data, n: shape[0], d: shape[1], dtype: "<f4" }, npyPath };
}

function cliCompress(npyPath: string, flags: string[]): Uint8Array {
  const out = path.join(workDir, `cli-${path.basename(npyPath)}-${flags.join("")}.sphc`);
  cli(["compress", "--input", npyPath, "--output", out, ...flags]);
  return new Uint8Array(fs.readFileSync(out));
}

interface Triple {
  name: string;
  gen: [number, number, number];
  opts: CodecOptions;
  cliFlags: string[];
}

// three fixed (input, options) triples for the golden byte-equality check
const TRIPLES: Triple[] = [
  {
    name: "spherical defaults",
    gen: [128, 96, 1],
    opts: {},
    cliFlags: [],
  },
  {
    name: "spherical level 1, small chunks, stored norms",
    gen: [64, 128, 2],
    opts: { level: 1, chunkSize: 16, storeNorms: true, renormalize: true },
    cliFlags: ["--level", "1", "--chunk-size", "16", "--store-norms", "--renormalize"],
  },
  {
    name: "baseline level 19, single chunk, truncate 6",
    gen: [50, 64, 3],
    opts: { mode: "baseline", level: 19, chunkSize: 0, truncateBits: 6 },
    cliFlags: ["--mode", "baseline", "--level", "19", "--chunk-size", "0", "--truncate-bits", "6"],
  },
];

describe("binding equivalence", () => {
  for (const triple of TRIPLES) {
    it(`container bytes equal the CLI output (${triple.name})`, () => {
      const { view, npyPath } = genMatrix(...triple.gen);
      const fromCli = cliCompress(npyPath, triple.cliFlags);
      const fromBinding = compressBuffer(view, triple.opts);
      expect(Buffer.compare(Buffer.from(fromBinding), Buffer.from(fromCli))).toBe(0);
    });
  }
});

describe("roundtrip", () => {
  it("stays within float32 machine epsilon", () => {
    const { view } = genMatrix(200, 256, 7);
    const container = compressBuffer(view);
    const { data, shape } = decompressBuffer(container);
    expect(shape).toEqual([200, 256]);
    const original = view.data as Float32Array;
    let worst = 0;
    for (let i = 0; i < data.length; i++) {
      worst = Math.max(worst, Math.abs(data[i] - original[i]));
    }
    expect(worst).toBeLessThan(F32_EPS);
  });

  it("row ranges equal the matching slice of a full decompression", () => {
    const { view } = genMatrix(150, 64, 8);
    const container = compressBuffer(view, { chunkSize: 40 });
    const full = decompressBuffer(container);
    const part = decompressBuffer(container, [35, 85]);
    expect(part.shape).toEqual([50, 64]);
    const fullBytes = new Uint8Array(full.data.buffer, 35 * 64 * 4, 50 * 64 * 4);
    const partBytes = new Uint8Array(part.data.buffer, 0, part.data.byteLength);
    expect(Buffer.compare(Buffer.from(partBytes), Buffer.from(fullBytes))).toBe(0);
  });
});

describe("error mapping", () => {
  it("rejects a wrong element-type tag locally", () => {
    const data = new Float32Array(8);
    const view = { data, n: 2, d: 4, dtype: "<f8" } as unknown as BufferView;
    expect(() => compressBuffer(view)).toThrow(UnsupportedDtype);
  });

  it("rejects a shape/buffer length mismatch locally", () => {
    const view: BufferView = { data: new Float32Array(8), n: 3, d: 4, dtype: "<f4" };
    expect(() => compressBuffer(view)).toThrow(LengthMismatch);
  });

  it("maps a corrupted payload to CorruptFrame", () => {
    const { view } = genMatrix(40, 32, 9);
    const container = compressBuffer(view);
    container[container.length - 10] ^= 0xff;
    container[container.length - 11] ^= 0xff;
    expect(() => decompressBuffer(container)).toThrow(CorruptFrame);
  });

  it("maps out-of-range rows to RangeOutOfBounds", () => {
    const { view } = genMatrix(10, 16, 10);
    const container = compressBuffer(view);
    expect(() => decompressBuffer(container, [5, 11])).toThrow(RangeOutOfBounds);
  });
});

describe("analysis delegation", () => {
  it("returns the entropy / concentration profile", () => {
    const { view } = genMatrix(300, 256, 11);
    const report = analyzeBuffer(view);
    expect(report["n"]).toBe(300);
    expect(report["concentration_fraction"] as number).toBeGreaterThan(0.99);
    expect(report["spherical.exponent_entropy_bits"] as number).toBeLessThan(0.2);
    expect((report["cartesian.exponent_histogram"] as number[]).length).toBe(256);
  });
});
