"""Random-codebook codec: encode a block as the index of its first cover.

A seed determines an infinite codeword stream; the encoder scans it for the
first codeword within the distortion budget and transmits that index with a
self-delimiting integer code behind a one-bit escape flag. The decoder
regenerates the same stream from the shared seed and replays it up to the
index, so codewords are never stored. When the draw budget runs out, the
escape path ships an explicit witness block in raw fixed-width symbols.
"""
from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .core import BitReader, BitString, BitWriter, Block
from .distortion import DistortionSpec, distortion, find_witness
from .errors import (
    CapacityError,
    CorruptStreamError,
    EnumerationCapError,
    PreconditionError,
    TruncationError,
    UncodableInputError,
)
from .lz78 import symbol_width
from .universal import (
    UniversalTable,
    _BitfeedSampler,
    _ExactSampler,
    build_universal_table,
)

__all__ = [
    "CodebookStream",
    "EncodedMessage",
    "TheoreticalLength",
    "index_code_encode",
    "index_code_decode",
    "theoretical_length",
    "encode",
    "decode",
    "write_container",
    "read_container",
]

DEFAULT_MAX_DRAWS = 1 << 20

EXACT = "exact"
BITFEED = "bitfeed"


@dataclass(frozen=True)
class CodebookStream:
    """Deterministic codeword stream configuration shared by both ends.

    mode selects the exact table sampler or the approximate bitfeed sampler;
    base is the nominal per-symbol codebook size used only in the length
    accounting, and max_draws caps the scan before the escape path.
    """

    seed: int
    n: int
    alphabet_size: int
    mode: str = EXACT
    base: float | None = None
    max_draws: int = DEFAULT_MAX_DRAWS
    length_mode: str = "plain"
    table: UniversalTable | None = None

    def __post_init__(self):
        if self.mode not in (EXACT, BITFEED):
            raise PreconditionError(f"unknown sampler mode {self.mode!r}")
        if self.n < 1:
            raise PreconditionError("stream needs n >= 1")
        if self.max_draws < 1:
            raise PreconditionError("max_draws must be positive")
        if self.table is not None and (
            self.table.n != self.n
            or self.table.alphabet_size != self.alphabet_size
            or self.table.length_mode != self.length_mode
        ):
            raise PreconditionError("supplied table does not match the stream")

    @property
    def nominal_base(self) -> float:
        return self.base if self.base is not None else 2.0 * self.alphabet_size

    @cached_property
    def resolved_table(self) -> UniversalTable:
        if self.table is not None:
            if (
                self.table.n != self.n
                or self.table.alphabet_size != self.alphabet_size
                or self.table.length_mode != self.length_mode
            ):
                raise PreconditionError("supplied table does not match the stream")
            return self.table
        return build_universal_table(self.n, self.alphabet_size, self.length_mode)

    def sampler(self):
        """Fresh sampler seeded identically every call."""
        if self.mode == EXACT:
            return _ExactSampler(self.resolved_table, self.seed)
        return _BitfeedSampler(self.n, self.alphabet_size, self.seed)

    def codewords(self):
        """Infinite deterministic codeword sequence; restart on every call."""
        s = self.sampler()
        while True:
            yield s.draw()


def index_code_encode(i: int) -> BitString:
    """Self-delimiting code for a positive integer (zero-count prefix form).

    The bit count of i is itself sent with a unary-prefixed binary code, then
    the bits of i below its leading one follow. Length is floor(log2 i) +
    2 * floor(log2(floor(log2 i) + 1)) + 1 bits.
    """
    if i < 1:
        raise PreconditionError("index must be positive")
    nbits = i.bit_length()
    prefix = nbits.bit_length() - 1
    w = BitWriter()
    w.write(0, prefix)
    w.write(nbits, prefix + 1)  # leading bit of nbits is the terminator
    w.write(i & ((1 << (nbits - 1)) - 1), nbits - 1)
    return w.getvalue()


def index_code_decode(reader: BitReader) -> int:
    """Read one self-delimiting integer from the stream."""
    prefix = 0
    while True:
        bit = reader.read(1)
        if bit:
            break
        prefix += 1
        if prefix > 64:
            raise CorruptStreamError("index code prefix too long")
    nbits = (1 << prefix) | reader.read(prefix)
    rest = reader.read(nbits - 1)
    return (1 << (nbits - 1)) | rest


@dataclass(frozen=True)
class TheoreticalLength:
    """Idealized index-description length under the harmonic weighting."""

    bits: float
    decomposed_bound: float
    log_term: float


def theoretical_length(index: int, n: int, base: float) -> TheoreticalLength:
    """-log2 of the normalized harmonic weight of the index.

    The normalizer over base^n candidates is bounded by n ln(base) + 1, so the
    value is log2(index) + log2(n ln base + 1); the decomposed bound replaces
    the second term with log2 n + log2(ln base + 1), which dominates it for
    every n >= 1.
    """
    if index < 1:
        raise PreconditionError("index must be positive")
    if base <= 1:
        raise PreconditionError("base must exceed 1")
    log_term = math.log2(math.log(base) + 1)
    bits = math.log2(index) + math.log2(n * math.log(base) + 1)
    return TheoreticalLength(
        bits=bits,
        decomposed_bound=math.log2(index) + math.log2(n) + log_term,
        log_term=log_term,
    )


@dataclass(frozen=True)
class EncodedMessage:
    """One encoded block: escape flag, payload bits, and length accounting."""

    escape: bool
    payload: BitString
    index: int | None
    theoretical_bits: float

    def to_bits(self) -> BitString:
        w = BitWriter()
        w.write(1 if self.escape else 0, 1)
        w.write_bits(self.payload)
        return w.getvalue()

    @property
    def total_bits(self) -> int:
        return 1 + self.payload.length


def encode(x: Block, level, spec: DistortionSpec, stream: CodebookStream) -> EncodedMessage:
    """Scan the stream for the first codeword within the budget and code it."""
    if x.n != stream.n:
        raise PreconditionError("block length does not match the stream")
    if spec.repro_size != stream.alphabet_size:
        raise PreconditionError("reproduction alphabet does not match the stream")
    if stream.nominal_base <= spec.repro_size:
        warnings.warn(
            "nominal codebook base does not exceed the reproduction alphabet size; "
            "the length accounting loses its interpretation",
            stacklevel=2,
        )
    budget = x.n * Fraction(level)

    witness: Block | None = None
    if spec.kind == "per_letter_matrix":
        witness = find_witness(x, level, spec)
        if witness is None:
            raise UncodableInputError("no reproduction block meets the budget")

    sampler = stream.sampler()
    for i in range(1, stream.max_draws + 1):
        xhat = sampler.draw()
        if distortion(x, xhat, spec) <= budget:
            return EncodedMessage(
                escape=False,
                payload=index_code_encode(i),
                index=i,
                theoretical_bits=theoretical_length(i, x.n, stream.nominal_base).bits,
            )

    if witness is None:
        try:
            witness = find_witness(x, level, spec)
        except EnumerationCapError as e:
            raise CapacityError(
                f"draw budget exhausted and witness search is infeasible: {e}"
            )
        if witness is None:
            raise UncodableInputError("no reproduction block meets the budget")
    sym_w = symbol_width(spec.repro_size)
    w = BitWriter()
    for s in witness.symbols:
        w.write(s, sym_w)
    payload = w.getvalue()
    return EncodedMessage(
        escape=True,
        payload=payload,
        index=None,
        theoretical_bits=1 + payload.length,
    )


def decode(msg: EncodedMessage, stream: CodebookStream) -> Block:
    """Replay the stream up to the transmitted index, or read the witness."""
    if msg.escape:
        sym_w = symbol_width(stream.alphabet_size)
        if msg.payload.length != stream.n * sym_w:
            raise CorruptStreamError("witness payload has the wrong bit count")
        reader = BitReader(msg.payload)
        symbols = []
        for _ in range(stream.n):
            v = reader.read(sym_w)
            if v >= stream.alphabet_size:
                raise CorruptStreamError(f"witness symbol {v} outside alphabet")
            symbols.append(v)
        return Block(tuple(symbols))
    reader = BitReader(msg.payload)
    try:
        index = index_code_decode(reader)
    except TruncationError:
        raise CorruptStreamError("malformed index code")
    if reader.remaining:
        raise CorruptStreamError("trailing bits after the index code")
    if index > stream.max_draws:
        raise CorruptStreamError(
            f"index {index} exceeds the stream's draw budget {stream.max_draws}"
        )
    sampler = stream.sampler()
    xhat = None
    for _ in range(index):
        xhat = sampler.draw()
    return xhat


def message_from_bits(bits: BitString) -> EncodedMessage:
    """Split a wire bit string into escape flag and payload.

    Index messages carry a self-delimiting integer, so the index is restored
    here; theoretical_bits is advisory and not on the wire, so it stays 0.
    """
    if bits.length < 1:
        raise TruncationError("empty message")
    reader = BitReader(bits)
    escape = bool(reader.read(1))
    payload = BitString(bits.value & ((1 << (bits.length - 1)) - 1), bits.length - 1)
    index = None
    if not escape:
        index = index_code_decode(BitReader(payload))
    return EncodedMessage(escape=escape, payload=payload, index=index, theoretical_bits=0.0)


MAGIC = b"UR"
_VERSION = 1
_MODE_CODES = {EXACT: 0, BITFEED: 1}
_MODE_NAMES = {v: k for k, v in _MODE_CODES.items()}
_LENGTH_CODES = {"plain": 0, "capped": 1}
_LENGTH_NAMES = {v: k for k, v in _LENGTH_CODES.items()}


@dataclass(frozen=True)
class ContainerHeader:
    n: int
    alphabet_size: int
    seed: int
    mode: str
    length_mode: str
    level: Fraction


def write_container(f, stream: CodebookStream, level, messages) -> None:
    """16-byte header (magic, flags, K, n, level as a rational, seed), then
    one bit-counted record per message."""
    level = Fraction(level)
    if not (0 <= level.numerator <= 255 and 1 <= level.denominator <= 255):
        raise PreconditionError("container stores the level as a uint8/uint8 rational")
    if not 0 <= stream.seed < 1 << 64:
        raise PreconditionError("container seeds must fit in 64 bits")
    flags = (
        (_VERSION << 4)
        | _MODE_CODES[stream.mode]
        | (_LENGTH_CODES[stream.length_mode] << 1)
    )
    f.write(MAGIC)
    f.write(
        struct.pack(
            ">BBHBBQ",
            flags,
            stream.alphabet_size,
            stream.n,
            level.numerator,
            level.denominator,
            stream.seed,
        )
    )
    msgs = list(messages)
    f.write(struct.pack(">I", len(msgs)))
    for m in msgs:
        m.to_bits().write(f)


def read_container(f) -> tuple[ContainerHeader, list[EncodedMessage]]:
    header = f.read(16)
    if len(header) < 16 or header[:2] != MAGIC:
        raise CorruptStreamError("not a codec container")
    flags, k, n, num, den, seed = struct.unpack(">BBHBBQ", header[2:])
    if flags >> 4 != _VERSION:
        raise CorruptStreamError(f"unsupported container version {flags >> 4}")
    mode = _MODE_NAMES[flags & 1]
    length_mode = _LENGTH_NAMES[(flags >> 1) & 1]
    if den == 0:
        raise CorruptStreamError("level denominator is zero")
    count_raw = f.read(4)
    if len(count_raw) < 4:
        raise TruncationError("missing message count")
    (count,) = struct.unpack(">I", count_raw)
    messages = []
    for _ in range(count):
        bits = BitString.read(f)
        messages.append(message_from_bits(bits))
    info = ContainerHeader(
        n=n,
        alphabet_size=k,
        seed=seed,
        mode=mode,
        length_mode=length_mode,
        level=Fraction(num, den),
    )
    return info, messages
