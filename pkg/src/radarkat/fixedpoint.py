"""Two's-complement fixed-point arithmetic with explicit Q formats.

Raw values are plain Python ints, so intermediate arithmetic is exact;
saturation and rounding happen only where a hardware datapath would apply
them.  The rounding mode is round-to-nearest-even everywhere, and overflow
always saturates (never wraps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class QFormat:
    """Signed fixed-point format: one sign bit + int_bits + frac_bits."""

    int_bits: int
    frac_bits: int

    def __post_init__(self) -> None:
        if self.int_bits < 0 or self.frac_bits < 0:
            raise ValueError(f"negative field width in {self!r}")
        if self.width > 32:
            raise ValueError(f"word width {self.width} exceeds 32 bits")

    @property
    def width(self) -> int:
        return 1 + self.int_bits + self.frac_bits

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    @property
    def raw_min(self) -> int:
        return -(1 << (self.width - 1))

    @property
    def raw_max(self) -> int:
        return (1 << (self.width - 1)) - 1

    @property
    def lsb(self) -> float:
        return 1.0 / self.scale


# Word formats used by the modeled device.  Note the sign bit is counted
# inside the leading figure for the 16-bit formats (Q12.4 = s + 11 + 4) and
# outside it for the 24-bit ones (Q2.21 = s + 2 + 21, needed to hold pi).
Q12_4 = QFormat(11, 4)   # ADC / MTI samples, 16-bit memory words
Q0_23 = QFormat(0, 23)   # FFT bins and magnitudes, 24-bit memory words
Q2_21 = QFormat(2, 21)   # phases in radians, 24-bit result registers
Q8_8 = QFormat(7, 8)     # CFAR threshold factor, 16-bit config register


@dataclass(frozen=True)
class Fixed:
    """A raw two's-complement value tagged with its format."""

    raw: int
    fmt: QFormat

    def __post_init__(self) -> None:
        if not (self.fmt.raw_min <= self.raw <= self.fmt.raw_max):
            raise ValueError(
                f"raw {self.raw:#x} outside {self.fmt.width}-bit signed range"
            )

    @property
    def real(self) -> float:
        return self.raw / self.fmt.scale

    def __repr__(self) -> str:
        digits = (self.fmt.width + 3) // 4
        word = self.raw & ((1 << self.fmt.width) - 1)
        return f"Fixed(0x{word:0{digits}X}, s{self.fmt.int_bits}.{self.fmt.frac_bits})"


def rne_shift(value: int, shift: int) -> int:
    """Arithmetic right shift with round-to-nearest-even."""
    if shift <= 0:
        return value << -shift
    q = value >> shift
    r = value - (q << shift)
    half = 1 << (shift - 1)
    if r > half or (r == half and (q & 1)):
        q += 1
    return q


def saturate(value: int, fmt: QFormat) -> int:
    if value > fmt.raw_max:
        return fmt.raw_max
    if value < fmt.raw_min:
        return fmt.raw_min
    return value


def quantize(x: float, fmt: QFormat) -> Fixed:
    """Round a real number to the nearest representable value, saturating."""
    if math.isnan(x):
        raise ValueError("cannot quantize NaN")
    if math.isinf(x):
        raw = fmt.raw_max if x > 0 else fmt.raw_min
        return Fixed(raw, fmt)
    # Python round() is round-half-even.
    raw = round(x * fmt.scale)
    return Fixed(saturate(raw, fmt), fmt)


def to_real(a: Fixed) -> float:
    return a.raw / a.fmt.scale


def sat_add(a: Fixed, b: Fixed) -> Fixed:
    if a.fmt != b.fmt:
        raise ValueError(f"format mismatch: {a.fmt} vs {b.fmt}")
    return Fixed(saturate(a.raw + b.raw, a.fmt), a.fmt)


def sat_sub(a: Fixed, b: Fixed) -> Fixed:
    if a.fmt != b.fmt:
        raise ValueError(f"format mismatch: {a.fmt} vs {b.fmt}")
    return Fixed(saturate(a.raw - b.raw, a.fmt), a.fmt)


def sat_mul(a: Fixed, b: Fixed, out_fmt: QFormat) -> Fixed:
    """Full-precision product, RNE-shifted to out_fmt, saturated."""
    prod = a.raw * b.raw
    shift = a.fmt.frac_bits + b.fmt.frac_bits - out_fmt.frac_bits
    return Fixed(saturate(rne_shift(prod, shift), out_fmt), out_fmt)


def decode_word(word: int, width: int) -> int:
    """Two's-complement decode of an unsigned memory word."""
    if word >= (1 << (width - 1)):
        return word - (1 << width)
    return word


def encode_word(raw: int, width: int) -> int:
    """Unsigned memory-word encoding of a signed raw value."""
    return raw & ((1 << width) - 1)
