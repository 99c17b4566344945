"""Walk through incremental parsing and its exact length accounting.

Parses a reference string phrase by phrase, checks the bit-length identity,
verifies the per-length Kraft sums are exact rationals at or below one, and
builds the counting sequences that maximize the phrase count, showing how
their per-symbol overhead shrinks with depth.
"""
from fractions import Fraction

from unirdc import (
    Alphabet,
    build_counting_sequence,
    kraft_sum,
    lz_bit_length,
    lz_decode,
    lz_encode,
    lz_length_bound,
    lz_parse,
    parse_overhead,
)


def main() -> None:
    ab = Alphabet("ab")
    text = "abbabaabbaaabaa"
    block = ab.to_block(text)
    parse = lz_parse(block, 2)

    print(f"input: {text!r}  (n={block.n})")
    print(f"phrases ({parse.phrase_count}):")
    for i, phrase in enumerate(parse.phrase_strings(), start=1):
        rendered = "".join(ab.symbols[s] for s in phrase)
        pointer_bits = (i - 1).bit_length()
        print(f"  {i:2d}  {rendered:<4}  pointer bits {pointer_bits}")
    print(f"final phrase repeats an earlier one: {parse.final_is_duplicate}")

    bits = lz_bit_length(block, 2)
    code = lz_encode(block, 2)
    assert code.length == bits
    assert lz_decode(code, block.n, 2) == block
    print(f"code length {bits} bits, round trip exact")

    bound = lz_length_bound(parse.phrase_count, block.n, 2)
    print(
        f"length bound: {bits} <= {bound.bound_bits:.2f} "
        f"= (c+1) log2(2K(c+1)) with c={parse.phrase_count}"
    )

    print("\nKraft sums (exact rationals, one per block length):")
    for n in (1, 2, 4, 6, 8, 10):
        s = kraft_sum(n, 2)
        print(f"  n={n:2d}  sum {str(s):>12}  = {float(s):.6f}")

    print("\ncounting sequences (every word of length <= m, in order):")
    print(f"{'m':>3} {'n':>6} {'phrases':>8} {'bits':>7} {'overhead':>9}")
    for m in range(1, 7):
        seq = build_counting_sequence(m, 2)
        print(
            f"{m:>3} {seq.length:>6} {seq.phrase_count:>8} "
            f"{seq.bit_length:>7} {seq.measured_epsilon:>9.4f}"
        )
    print("the guaranteed ceiling shrinks like 1/log n:")
    for n in (16, 256, 4096, 65536):
        print(f"  n={n:<6d} parse overhead <= {parse_overhead(n, 2):.4f} bits/symbol")


if __name__ == "__main__":
    main()
