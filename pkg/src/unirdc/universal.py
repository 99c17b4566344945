"""The parse-length-induced universal distribution over reproduction blocks.

Every block of length n gets weight 2^-L where L is its bit-exact parse code
length (or the capped variant); the Kraft inequality makes the weights sum to
at most one, and normalizing yields an exact rational distribution. Spheres
are weighed exactly, and two samplers are provided: an exact one driven by
integer cumulative inversion, and a faster approximate one that feeds fair
bits straight into the phrase decoder.
"""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .core import Block, check_enumerable, enumerate_blocks
from .distortion import DistortionSpec, distortion
from .errors import PreconditionError
from . import lz78

__all__ = [
    "UniversalTable",
    "SphereMass",
    "MassEstimate",
    "build_universal_table",
    "sphere_mass",
    "sample_exact",
    "sample_bitfeed",
    "bitfeed_distribution",
    "estimate_sphere_mass",
    "total_variation",
]


@dataclass(frozen=True)
class UniversalTable:
    """Exact weight table over all blocks of one length, in lexicographic order."""

    n: int
    alphabet_size: int
    length_mode: str
    blocks: tuple[Block, ...]
    bits: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.blocks)

    @cached_property
    def max_bits(self) -> int:
        return max(self.bits)

    @cached_property
    def _scaled_weights(self) -> tuple[int, ...]:
        # weight of block i is _scaled_weights[i] / 2^max_bits, an exact dyadic
        top = self.max_bits
        return tuple(1 << (top - b) for b in self.bits)

    @cached_property
    def _cumulative(self) -> list[int]:
        out = []
        acc = 0
        for w in self._scaled_weights:
            acc += w
            out.append(acc)
        return out

    @cached_property
    def normalizer(self) -> Fraction:
        """Exact total weight; at most 1 by the Kraft inequality."""
        return Fraction(self._cumulative[-1], 1 << self.max_bits)

    @cached_property
    def _index(self) -> dict[Block, int]:
        return {b: i for i, b in enumerate(self.blocks)}

    def bit_length_of(self, block: Block) -> int:
        return self.bits[self._index[block]]

    def weight(self, block: Block) -> Fraction:
        return Fraction(1, 1 << self.bit_length_of(block))

    def prob(self, block: Block) -> Fraction:
        """Exact normalized probability of one block."""
        i = self._index[block]
        return Fraction(self._scaled_weights[i], self._cumulative[-1])

    def probs(self) -> dict[Block, Fraction]:
        total = self._cumulative[-1]
        return {
            b: Fraction(w, total) for b, w in zip(self.blocks, self._scaled_weights)
        }

    @property
    def length_excess(self) -> float:
        """Measured (max bits) / (n * log2 K) - 1, the worst-case length overhead."""
        return self.max_bits / (self.n * math.log2(self.alphabet_size)) - 1.0

    def to_csv(self, f, alphabet=None) -> None:
        """Rows of block, bit length, and the dyadic weight 1 * 2^-bits."""
        f.write("block,bits,weight_numerator,weight_exponent\n")
        for b, bits in zip(self.blocks, self.bits):
            text = alphabet.to_text(b) if alphabet else "".join(str(s) for s in b)
            f.write(f"{text},{bits},1,{bits}\n")


def build_universal_table(
    n: int, alphabet_size: int, length_mode: str = "plain"
) -> UniversalTable:
    """Enumerate all blocks of length n and record their code lengths."""
    if n < 1:
        raise PreconditionError("table needs n >= 1")
    if length_mode not in ("plain", "capped"):
        raise PreconditionError(f"unknown length mode {length_mode!r}")
    check_enumerable(alphabet_size**n, "universal table")
    blocks = tuple(enumerate_blocks(n, alphabet_size))
    if length_mode == "plain":
        bits = tuple(lz78.lz_bit_length(b, alphabet_size) for b in blocks)
    else:
        bits = tuple(lz78.lz_capped_length(b, alphabet_size) for b in blocks)
    return UniversalTable(
        n=n, alphabet_size=alphabet_size, length_mode=length_mode, blocks=blocks, bits=bits
    )


@dataclass(frozen=True)
class SphereMass:
    """Exact universal mass of a distortion sphere around one source block."""

    mass: Fraction
    sphere_size: int
    min_bits: int | None

    @property
    def empty(self) -> bool:
        return self.sphere_size == 0

    def neg_log2_mass(self) -> float:
        if self.mass == 0:
            return math.inf
        return -math.log2(float(self.mass.numerator)) + math.log2(
            float(self.mass.denominator)
        )


def sphere_mass(x: Block, level, spec: DistortionSpec, table: UniversalTable) -> SphereMass:
    """Exact mass, size, and minimum code length of the sphere around x."""
    if x.n != table.n:
        raise PreconditionError("block length does not match the table")
    if spec.repro_size != table.alphabet_size:
        raise PreconditionError("reproduction alphabet does not match the table")
    x.validate(spec.source_size)
    budget = x.n * Fraction(level)
    scaled = table._scaled_weights
    total = 0
    count = 0
    min_bits: int | None = None
    for i, xhat in enumerate(table.blocks):
        if distortion(x, xhat, spec) <= budget:
            total += scaled[i]
            count += 1
            b = table.bits[i]
            if min_bits is None or b < min_bits:
                min_bits = b
    return SphereMass(
        mass=Fraction(total, table._cumulative[-1]),
        sphere_size=count,
        min_bits=min_bits,
    )


def sample_exact(table: UniversalTable, seed: int, count: int) -> list[Block]:
    """Draw blocks i.i.d. with their exact table probabilities.

    Cumulative inversion runs on scaled integer weights: a uniform integer
    below the scaled total is drawn by rejection from the seeded bit stream,
    so every block comes out with exactly its rational probability.
    """
    if count < 0:
        raise PreconditionError("count must be non-negative")
    rng = random.Random(seed)
    cum = table._cumulative
    total = cum[-1]
    nbits = total.bit_length()
    out = []
    for _ in range(count):
        r = rng.getrandbits(nbits)
        while r >= total:
            r = rng.getrandbits(nbits)
        out.append(table.blocks[bisect_right(cum, r)])
    return out


class _ExactSampler:
    """Stateful single-draw version of sample_exact for streaming use."""

    def __init__(self, table: UniversalTable, seed: int):
        self.table = table
        self.rng = random.Random(seed)
        self._cum = table._cumulative
        self._total = self._cum[-1]
        self._nbits = self._total.bit_length()

    def draw(self) -> Block:
        r = self.rng.getrandbits(self._nbits)
        while r >= self._total:
            r = self.rng.getrandbits(self._nbits)
        return self.table.blocks[bisect_right(self._cum, r)]


def _bitfeed_draw(rng: random.Random, n: int, alphabet_size: int) -> Block:
    sym_w = lz78.symbol_width(alphabet_size)
    strings: list[tuple[int, ...]] = [()]
    out: list[int] = []
    i = 1
    while len(out) < n:
        w = lz78.pointer_width(i)
        pointer = rng.getrandbits(w) if w else 0
        while pointer >= i:
            pointer = rng.getrandbits(w)
        s = strings[pointer]
        remaining = n - len(out)
        if len(s) >= remaining:
            out.extend(s[:remaining])
            break
        symbol = rng.getrandbits(sym_w)
        while symbol >= alphabet_size:
            symbol = rng.getrandbits(sym_w)
        s = s + (symbol,)
        strings.append(s)
        out.extend(s)
        i += 1
    return Block(tuple(out))


def sample_bitfeed(n: int, alphabet_size: int, seed: int, count: int) -> list[Block]:
    """Approximate sampler: feed fair bits into the phrase decoder loop.

    Each phrase reads a pointer and, while the budget allows, an innovation
    symbol; bit patterns that name an unseen phrase or an out-of-range symbol
    are redrawn within the phrase, and the final phrase is truncated at n.
    The resulting law is close to, but not exactly, the table distribution;
    see bitfeed_distribution for the exact law at small n.
    """
    if n < 1:
        raise PreconditionError("sampler needs n >= 1")
    if count < 0:
        raise PreconditionError("count must be non-negative")
    rng = random.Random(seed)
    return [_bitfeed_draw(rng, n, alphabet_size) for _ in range(count)]


class _BitfeedSampler:
    def __init__(self, n: int, alphabet_size: int, seed: int):
        self.n = n
        self.alphabet_size = alphabet_size
        self.rng = random.Random(seed)

    def draw(self) -> Block:
        return _bitfeed_draw(self.rng, self.n, self.alphabet_size)


def bitfeed_distribution(n: int, alphabet_size: int) -> dict[Block, Fraction]:
    """Exact law of the bitfeed sampler, by enumerating every phrase path.

    After rejection the pointer of phrase i is uniform over i choices and each
    innovation symbol is uniform over the alphabet, so every generation path
    has an exact rational probability. Path counts grow roughly factorially
    in the phrase count; intended for small n (the enumeration cap applies).
    """
    if n < 1:
        raise PreconditionError("distribution needs n >= 1")
    check_enumerable(alphabet_size**n, "bitfeed law")
    out: dict[Block, Fraction] = {}

    def visit(strings, emitted, i, prob):
        for pointer in range(i):
            s = strings[pointer]
            p = prob / i
            remaining = n - len(emitted)
            if len(s) >= remaining:
                block = Block(tuple(emitted + list(s[:remaining])))
                out[block] = out.get(block, Fraction(0)) + p
                continue
            for symbol in range(alphabet_size):
                q = p / alphabet_size
                new = s + (symbol,)
                nxt = emitted + list(new)
                if len(nxt) == n:
                    block = Block(tuple(nxt))
                    out[block] = out.get(block, Fraction(0)) + q
                else:
                    visit(strings + [new], nxt, i + 1, q)

    visit([()], [], 1, Fraction(1))
    return out


def total_variation(p: dict, q: dict) -> Fraction:
    """Exact total variation distance between two block distributions."""
    keys = set(p) | set(q)
    diff = sum(abs(Fraction(p.get(k, 0)) - Fraction(q.get(k, 0))) for k in keys)
    return diff / 2


@dataclass(frozen=True)
class MassEstimate:
    """Monte Carlo sphere-mass estimate from the approximate sampler."""

    estimate: float
    low: float
    high: float
    trials: int
    hits: int
    note: str = "approximate-sampler bias not corrected"


def estimate_sphere_mass(
    x: Block,
    level,
    spec: DistortionSpec,
    seed: int,
    trials: int,
    confidence: float = 0.99,
) -> MassEstimate:
    """Estimate the sphere mass by counting bitfeed draws inside the sphere.

    The interval is a Wilson score interval for the hit rate; it covers the
    sampler's own hit probability, not the exact table mass, since the
    bitfeed law is biased.
    """
    if trials <= 0:
        raise PreconditionError("trials must be positive")
    if not 0 < confidence < 1:
        raise PreconditionError("confidence must be in (0, 1)")
    budget = x.n * Fraction(level)
    rng = random.Random(seed)
    hits = 0
    for _ in range(trials):
        xhat = _bitfeed_draw(rng, x.n, spec.repro_size)
        if distortion(x, xhat, spec) <= budget:
            hits += 1
    p = hits / trials
    # Wilson score interval
    from scipy.stats import norm

    z = float(norm.ppf(0.5 + confidence / 2))
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return MassEstimate(
        estimate=p,
        low=max(0.0, center - half),
        high=min(1.0, center + half),
        trials=trials,
        hits=hits,
    )
