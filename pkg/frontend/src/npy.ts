/** Minimal NPY v1.0 reader for little-endian float32 C-order 2-D arrays. */

import { BadFormat, UnsupportedLayout } from "./errors.js";

const MAGIC = Buffer.from("\x93NUMPY", "latin1");

export interface Matrix {
  data: Float32Array;
  shape: [number, number];
}

export function parseNpy(buf: Buffer): Matrix {
  if (buf.length < 10 || !buf.subarray(0, 6).equals(MAGIC)) {
    throw new BadFormat("not an NPY file");
  }
  if (buf[6] !== 1 || buf[7] !== 0) {
    throw new BadFormat(`only NPY v1.0 is supported, got v${buf[6]}.${buf[7]}`);
  }
  const headerLen = buf.readUInt16LE(8);
  const header = buf.subarray(10, 10 + headerLen).toString("latin1");
  const descr = header.match(/'descr':\s*'([^']+)'/)?.[1];
  const fortran = header.match(/'fortran_order':\s*(True|False)/)?.[1];
  const shapeText = header.match(/'shape':\s*\(([^)]*)\)/)?.[1];
  if (!descr || !fortran || shapeText === undefined) {
    throw new BadFormat("malformed NPY header");
  }
  if (descr !== "<f4") {
    throw new UnsupportedLayout(`only '<f4' is supported, got '${descr}'`);
  }
  if (fortran === "True") {
    throw new UnsupportedLayout("column-major NPY files are not supported");
  }
  const dims = shapeText.split(",").map((s) => s.trim()).filter((s) => s.length);
  if (dims.length !== 2) {
    throw new UnsupportedLayout(`only 2-D arrays are supported, got (${shapeText})`);
  }
  const [n, d] = dims.map(Number) as [number, number];
  const body = buf.subarray(10 + headerLen);
  if (body.length !== 4 * n * d) {
    throw new BadFormat(`NPY payload holds ${body.length} bytes, expected ${4 * n * d}`);
  }
  // copy out so the Float32Array owns aligned memory independent of `buf`
  const data = new Float32Array(n * d);
  new Uint8Array(data.buffer).set(body);
  return { data, shape: [n, d] };
}
