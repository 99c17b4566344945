"""Alphabets, fixed-length symbol blocks, bit strings, and empirical statistics.

Blocks are immutable tuples of symbol indices; text conversion goes through an
Alphabet. Counts in empirical distributions stay integers and probabilities are
exact Fractions, so equality between distributions is exact.
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator

from .errors import EnumerationCapError, PreconditionError, TruncationError

DEFAULT_ENUMERATION_CAP = 1 << 20


def enumeration_cap() -> int:
    """Current cap on exhaustive enumerations; UNIRDC_CAP overrides the default."""
    raw = os.environ.get("UNIRDC_CAP", "")
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise PreconditionError(f"UNIRDC_CAP must be an integer, got {raw!r}")
        if cap <= 0:
            raise PreconditionError("UNIRDC_CAP must be positive")
        return cap
    return DEFAULT_ENUMERATION_CAP


def check_enumerable(count: int, what: str = "enumeration") -> None:
    cap = enumeration_cap()
    if count > cap:
        raise EnumerationCapError(f"{what} needs {count} states but the cap is {cap}")


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct single-character symbols; index = position."""

    symbols: str

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise PreconditionError("alphabet needs at least 2 symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise PreconditionError("alphabet symbols must be distinct")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, ch: str) -> int:
        pos = self.symbols.find(ch)
        if pos < 0:
            raise PreconditionError(f"symbol {ch!r} is not in alphabet {self.symbols!r}")
        return pos

    def to_block(self, text: str) -> "Block":
        return Block(tuple(self.index(ch) for ch in text))

    def to_text(self, block: "Block") -> str:
        block.validate(self.size)
        return "".join(self.symbols[s] for s in block.symbols)


BINARY = Alphabet("01")


@dataclass(frozen=True)
class Block:
    """Immutable fixed-length block of symbol indices."""

    symbols: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.symbols, tuple):
            object.__setattr__(self, "symbols", tuple(self.symbols))
        for s in self.symbols:
            if not isinstance(s, int) or s < 0:
                raise PreconditionError("block symbols must be non-negative integers")

    @property
    def n(self) -> int:
        return len(self.symbols)

    def validate(self, alphabet_size: int) -> None:
        for s in self.symbols:
            if s >= alphabet_size:
                raise PreconditionError(
                    f"symbol index {s} out of range for alphabet of size {alphabet_size}"
                )

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]


def enumerate_blocks(n: int, alphabet_size: int) -> Iterator[Block]:
    """All blocks of length n in lexicographic order, subject to the cap."""
    if n < 0:
        raise PreconditionError("block length must be non-negative")
    if alphabet_size < 2:
        raise PreconditionError("alphabet size must be at least 2")
    check_enumerable(alphabet_size**n, f"enumerating {alphabet_size}^{n} blocks")
    for tup in product(range(alphabet_size), repeat=n):
        yield Block(tup)


@dataclass(frozen=True)
class BitString:
    """Immutable bit sequence, most-significant bit first, with no padding.

    The bits are packed into a single integer; ``value`` holds the bits of the
    string read as a big-endian number and ``length`` is the exact bit count.
    """

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise PreconditionError("bit length must be non-negative")
        if self.value < 0 or self.value >> self.length:
            raise PreconditionError("bit value does not fit in the declared length")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitString":
        value = 0
        length = 0
        for b in bits:
            if b not in (0, 1):
                raise PreconditionError("bits must be 0 or 1")
            value = (value << 1) | b
            length += 1
        return cls(value, length)

    @classmethod
    def from_text(cls, text: str) -> "BitString":
        return cls.from_bits(int(ch) for ch in text)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.value >> (self.length - 1 - i)) & 1

    def __iter__(self):
        for i in range(self.length):
            yield self[i]

    def __add__(self, other: "BitString") -> "BitString":
        return BitString((self.value << other.length) | other.value, self.length + other.length)

    def to_text(self) -> str:
        return "".join(str(b) for b in self)

    def to_bytes(self) -> bytes:
        """Pack MSB-first, padding the final byte with zero bits on the right."""
        nbytes = (self.length + 7) // 8
        padded = self.value << (8 * nbytes - self.length)
        return padded.to_bytes(nbytes, "big")

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> "BitString":
        nbytes = (length + 7) // 8
        if len(data) < nbytes:
            raise TruncationError("byte payload shorter than the declared bit count")
        value = int.from_bytes(data[:nbytes], "big") >> (8 * nbytes - length)
        return cls(value, length)

    def write(self, f) -> None:
        """Serialize with an explicit 32-bit bit-count header."""
        f.write(struct.pack(">I", self.length))
        f.write(self.to_bytes())

    @classmethod
    def read(cls, f) -> "BitString":
        header = f.read(4)
        if len(header) < 4:
            raise TruncationError("missing bit-count header")
        (length,) = struct.unpack(">I", header)
        nbytes = (length + 7) // 8
        data = f.read(nbytes)
        return cls.from_bytes(data, length)


class BitWriter:
    """Mutable accumulator producing a BitString."""

    def __init__(self):
        self._value = 0
        self._length = 0

    def write(self, value: int, width: int) -> None:
        if width < 0 or value < 0 or (width >= 0 and value >> width):
            raise PreconditionError(f"value {value} does not fit in {width} bits")
        self._value = (self._value << width) | value
        self._length += width

    def write_bits(self, bits: BitString) -> None:
        self._value = (self._value << bits.length) | bits.value
        self._length += bits.length

    def getvalue(self) -> BitString:
        return BitString(self._value, self._length)

    def __len__(self) -> int:
        return self._length


class BitReader:
    """Cursor over a BitString; raises TruncationError past the end."""

    def __init__(self, bits: BitString):
        self._bits = bits
        self.pos = 0

    @property
    def remaining(self) -> int:
        return self._bits.length - self.pos

    def read(self, width: int) -> int:
        if width < 0:
            raise PreconditionError("read width must be non-negative")
        if width > self.remaining:
            raise TruncationError("bit stream exhausted mid-read")
        shift = self._bits.length - self.pos - width
        self.pos += width
        return (self._bits.value >> shift) & ((1 << width) - 1)


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """Integer block counts of aligned order-sized chunks of one or two blocks.

    Keys are tuples of symbol indices for a single block, or pairs of such
    tuples for a joint distribution. order * number of chunks == n always.
    """

    order: int
    n: int
    counts: dict

    def __post_init__(self):
        if self.order <= 0:
            raise PreconditionError("order must be positive")
        if self.n % self.order != 0:
            raise PreconditionError(f"order {self.order} does not divide n {self.n}")
        total = sum(self.counts.values())
        if total != self.n // self.order:
            raise PreconditionError("counts must sum to n / order")

    @property
    def is_joint(self) -> bool:
        if not self.counts:
            return False
        key = next(iter(self.counts))
        return bool(key) and isinstance(key[0], tuple)

    def probs(self) -> dict:
        """Exact chunk frequencies as Fractions."""
        chunks = self.n // self.order
        return {k: Fraction(v, chunks) for k, v in self.counts.items()}

    def __eq__(self, other):
        if not isinstance(other, EmpiricalDistribution):
            return NotImplemented
        return (
            self.order == other.order and self.n == other.n and self.counts == other.counts
        )

    def __hash__(self):
        return hash((self.order, self.n, frozenset(self.counts.items())))


def _chunks(block: Block, order: int):
    if block.n == 0:
        raise PreconditionError("block must be nonempty")
    if block.n % order != 0:
        raise PreconditionError(f"order {order} does not divide block length {block.n}")
    sym = block.symbols
    return [sym[i : i + order] for i in range(0, len(sym), order)]


def empirical_distribution(block: Block, order: int = 1) -> EmpiricalDistribution:
    """Counts of aligned order-length chunks of the block."""
    counts: dict = {}
    for chunk in _chunks(block, order):
        counts[chunk] = counts.get(chunk, 0) + 1
    return EmpiricalDistribution(order, block.n, counts)


def joint_empirical_distribution(
    first: Block, second: Block, order: int = 1
) -> EmpiricalDistribution:
    """Counts of aligned chunk pairs from two blocks of equal length."""
    if first.n != second.n:
        raise PreconditionError("joint statistics need blocks of equal length")
    counts: dict = {}
    for a, b in zip(_chunks(first, order), _chunks(second, order)):
        counts[(a, b)] = counts.get((a, b), 0) + 1
    return EmpiricalDistribution(order, first.n, counts)


def marginalize(joint: EmpiricalDistribution, which: int) -> EmpiricalDistribution:
    """Project a joint distribution onto one side (0 = first, 1 = second)."""
    if which not in (0, 1):
        raise PreconditionError("which must be 0 or 1")
    counts: dict = {}
    for key, v in joint.counts.items():
        part = key[which]
        counts[part] = counts.get(part, 0) + v
    return EmpiricalDistribution(joint.order, joint.n, counts)


def read_blocks(lines: Iterable[str], alphabet: Alphabet) -> list[Block]:
    """One block per line; any character outside the alphabet is rejected."""
    blocks = []
    for line in lines:
        text = line.rstrip("\n")
        if not text:
            continue
        blocks.append(alphabet.to_block(text))
    return blocks


def write_blocks(blocks: Iterable[Block], alphabet: Alphabet) -> str:
    return "".join(alphabet.to_text(b) + "\n" for b in blocks)
