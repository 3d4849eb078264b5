/**
 * Typed exceptions mirroring the codec's error cases one-to-one by name.
 * The CLI prints `error: <Name>: <message>` on stderr; `throwMapped` turns
 * that back into the matching class.
 */

export class SphcError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

export class NonFiniteInput extends SphcError {}
export class DimensionTooSmall extends SphcError {}
export class LengthMismatch extends SphcError {}
export class ShapeMismatch extends SphcError {}
export class UnsupportedDtype extends SphcError {}
export class NormViolation extends SphcError {}
export class ZeroNormRow extends SphcError {}
export class BitCountOutOfRange extends SphcError {}
export class BadMagic extends SphcError {}
export class UnsupportedVersion extends SphcError {}
export class TruncatedHeader extends SphcError {}
export class CorruptFrame extends SphcError {}
export class RangeOutOfBounds extends SphcError {}
export class EmptyInput extends SphcError {}
export class NoQualifyingColumns extends SphcError {}
export class TooManyRows extends SphcError {}
export class NonConvergence extends SphcError {}
export class BadFormat extends SphcError {}
export class UnsupportedLayout extends SphcError {}

/** Process-level failure that does not correspond to a codec error case. */
export class CommandFailed extends SphcError {}

const REGISTRY: Record<string, new (message: string) => SphcError> = {
  NonFiniteInput,
  DimensionTooSmall,
  LengthMismatch,
  ShapeMismatch,
  UnsupportedDtype,
  NormViolation,
  ZeroNormRow,
  BitCountOutOfRange,
  BadMagic,
  UnsupportedVersion,
  TruncatedHeader,
  CorruptFrame,
  RangeOutOfBounds,
  EmptyInput,
  NoQualifyingColumns,
  TooManyRows,
  NonConvergence,
  BadFormat,
  UnsupportedLayout,
};

export function throwMapped(stderr: string, exitCode: number | null): never {
  const match = stderr.match(/error: (\w+): ([^\n]*)/);
  if (match && REGISTRY[match[1]]) {
    throw new REGISTRY[match[1]](match[2]);
  }
  throw new CommandFailed(
    `sphc CLI exited with code ${exitCode}: ${stderr.trim() || "(no diagnostic)"}`,
  );
}
