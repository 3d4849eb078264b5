"""Exception taxonomy shared by all sphc modules."""


class SphcError(Exception):
    """Base class for every error raised by this package."""


class NonFiniteInput(SphcError):
    pass


class DimensionTooSmall(SphcError):
    pass


class LengthMismatch(SphcError):
    pass


class ShapeMismatch(SphcError):
    pass


class UnsupportedDtype(SphcError):
    pass


class NormViolation(SphcError):
    """Rows deviate from unit norm beyond tolerance and renormalize is off."""

    def __init__(self, count: int, max_deviation: float):
        self.count = count
        self.max_deviation = max_deviation
        super().__init__(
            f"{count} row(s) deviate from unit norm beyond tolerance "
            f"(max deviation {max_deviation:.3e}); pass renormalize to accept"
        )


class ZeroNormRow(SphcError):
    pass


class BitCountOutOfRange(SphcError):
    pass


class BadMagic(SphcError):
    pass


class UnsupportedVersion(SphcError):
    pass


class TruncatedHeader(SphcError):
    pass


class CorruptFrame(SphcError):
    pass


class RangeOutOfBounds(SphcError):
    pass


class EmptyInput(SphcError):
    pass


class NoQualifyingColumns(SphcError):
    pass


class TooManyRows(SphcError):
    pass


class NonConvergence(SphcError):
    pass


class BadFormat(SphcError):
    pass


class UnsupportedLayout(SphcError):
    pass
