"""Sparse memory images, the memh file reader/writer, and the memory map.

Memory images are sparse address->word maps.  Absent addresses are
*uninitialized*, which is distinct from zero: step KATs rely on that to
detect a step that wrote nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fixedpoint import Q0_23, Q12_4, QFormat, decode_word, encode_word

_HEX_DIGITS = set("0123456789abcdefABCDEF")


class MemhParseError(ValueError):
    """Malformed memh input; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class RegionError(ValueError):
    pass


@dataclass
class MemoryImage:
    """Sparse map of 32-bit word addresses to unsigned words."""

    word_bits: int
    cells: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.word_bits not in (16, 24):
            raise ValueError(f"word_bits must be 16 or 24, got {self.word_bits}")

    @property
    def word_max(self) -> int:
        return (1 << self.word_bits) - 1

    def set(self, addr: int, word: int) -> None:
        if not (0 <= word <= self.word_max):
            raise ValueError(f"word {word:#x} too wide for {self.word_bits} bits")
        self.cells[addr] = word

    def get(self, addr: int) -> int | None:
        return self.cells.get(addr)

    def copy(self) -> "MemoryImage":
        return MemoryImage(self.word_bits, dict(self.cells))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MemoryImage)
            and self.word_bits == other.word_bits
            and self.cells == other.cells
        )

    def __len__(self) -> int:
        return len(self.cells)


def _strip_comments(text: str) -> list[tuple[str, int]]:
    """Tokenize memh text, dropping // and /* */ comments.

    Returns (token, line_number) pairs.
    """
    tokens: list[tuple[str, int]] = []
    line = 1
    i = 0
    n = len(text)
    cur = ""
    cur_line = 1

    def flush() -> None:
        nonlocal cur
        if cur:
            tokens.append((cur, cur_line))
            cur = ""

    while i < n:
        ch = text[i]
        if ch == "\n":
            flush()
            line += 1
            i += 1
        elif ch in " \t\r\f\v":
            flush()
            i += 1
        elif text.startswith("//", i):
            flush()
            j = text.find("\n", i)
            i = n if j < 0 else j
        elif text.startswith("/*", i):
            flush()
            j = text.find("*/", i + 2)
            if j < 0:
                raise MemhParseError("unterminated block comment", line)
            line += text.count("\n", i, j)
            i = j + 2
        else:
            if not cur:
                cur_line = line
            cur += ch
            i += 1
    flush()
    return tokens


def parse_memh(text: str, word_bits: int) -> MemoryImage:
    """Parse readmemh-style text: @HEXADDR sets the cursor, hex tokens fill
    consecutive addresses; // and /* */ comments and any whitespace allowed."""
    img = MemoryImage(word_bits)
    cursor = 0
    for tok, line in _strip_comments(text):
        if tok.startswith("@"):
            body = tok[1:]
            if not body or any(c not in _HEX_DIGITS for c in body):
                raise MemhParseError(f"malformed address token {tok!r}", line)
            cursor = int(body, 16)
            continue
        if any(c not in _HEX_DIGITS for c in tok):
            raise MemhParseError(f"malformed hex token {tok!r}", line)
        value = int(tok, 16)
        if value > img.word_max:
            raise MemhParseError(
                f"token {tok!r} wider than {word_bits}-bit word", line
            )
        img.cells[cursor] = value
        cursor += 1
    return img


def emit_memh(img: MemoryImage) -> str:
    """Canonical form: ascending addresses, one `@ADDR VALUE` per line,
    uppercase hex, value zero-padded to the word width."""
    digits = img.word_bits // 4
    lines = [
        f"@{addr:04X} {img.cells[addr]:0{digits}X}\n"
        for addr in sorted(img.cells)
    ]
    return "".join(lines)


@dataclass(frozen=True)
class RegionLayout:
    """Address layout of one step's data region.

    Index order is channel-major, then burst/bin, then sample; complex
    elements occupy (real, imag) pairs at consecutive addresses.
    """

    name: str
    base: int
    shape: tuple[int, ...]
    fmt: QFormat
    complex_pairs: bool = False

    @property
    def elements(self) -> int:
        count = 1
        for dim in self.shape:
            count *= dim
        return count

    @property
    def extent(self) -> int:
        """Region size in words."""
        return self.elements * (2 if self.complex_pairs else 1)

    @property
    def word_bits(self) -> int:
        return self.fmt.width

    def addresses(self) -> range:
        return range(self.base, self.base + self.extent)


def read_region(img: MemoryImage, layout: RegionLayout) -> np.ndarray:
    """Decode a region to signed raw values, shaped per the layout.

    Complex layouts gain a trailing axis of size 2 (real, imag).
    Uninitialized addresses inside the extent are an error.
    """
    missing = [a for a in layout.addresses() if a not in img.cells]
    if missing:
        shown = ", ".join(f"0x{a:04X}" for a in missing[:8])
        more = "" if len(missing) <= 8 else f" (+{len(missing) - 8} more)"
        raise RegionError(
            f"{layout.name}: uninitialized addresses in region: {shown}{more}"
        )
    flat = np.array(
        [decode_word(img.cells[a], layout.word_bits) for a in layout.addresses()],
        dtype=np.int64,
    )
    shape = layout.shape + ((2,) if layout.complex_pairs else ())
    return flat.reshape(shape)


def write_region(
    img: MemoryImage, layout: RegionLayout, data: np.ndarray
) -> MemoryImage:
    """Encode signed raw values into the region (mutates and returns img)."""
    flat = np.asarray(data, dtype=np.int64).reshape(-1)
    if flat.size != layout.extent:
        raise RegionError(
            f"{layout.name}: data length {flat.size} != extent {layout.extent}"
        )
    base = layout.base
    width = layout.word_bits
    for offset, raw in enumerate(flat.tolist()):
        img.cells[base + offset] = encode_word(raw, width)
    return img


# Fixed region bases; regions must stay pairwise disjoint for any accepted
# configuration (config validation enforces the extents fit).
ADC_BASE = 0x0000
MTI_BASE = 0x2000
RFFT_BASE = 0x4000
CFFT_BASE = 0x8000
MEM_TOP = 0x10000

REGION_BOUNDS = {
    "adc": (ADC_BASE, MTI_BASE, 16),
    "mti": (MTI_BASE, RFFT_BASE, 16),
    "rfft": (RFFT_BASE, CFFT_BASE, 24),
    "cfft": (CFFT_BASE, MEM_TOP, 24),
}


def region_for(step: str, cfg) -> RegionLayout:
    """Memory layout of a step's data for a given chain configuration."""
    n, m, r = cfg.n, cfg.m, cfg.r
    half = n // 2
    dop = m - 1
    layouts = {
        "adc": RegionLayout("adc", ADC_BASE, (r, m, n), Q12_4),
        "mti": RegionLayout("mti", MTI_BASE, (r, dop, n), Q12_4),
        "rfft": RegionLayout("rfft", RFFT_BASE, (r, dop, half), Q0_23, True),
        "cfft": RegionLayout("cfft", CFFT_BASE, (r, half, dop), Q0_23, True),
    }
    key = step.lower()
    if key not in layouts:
        raise ValueError(f"no region for step {step!r}")
    layout = layouts[key]
    lo, hi, bits = REGION_BOUNDS[key]
    if layout.extent > hi - lo:
        raise RegionError(
            f"{key} region needs {layout.extent} words, only {hi - lo} available"
        )
    assert layout.word_bits == bits
    return layout


def region_of_address(addr: int) -> tuple[str, int] | None:
    """Map a bus address to (region name, word bits), or None if unmapped."""
    for name, (lo, hi, bits) in REGION_BOUNDS.items():
        if lo <= addr < hi:
            return name, bits
    return None
