import io
import math

import pytest
from fractions import Fraction

from unirdc import (
    BINARY,
    Alphabet,
    BitReader,
    BitString,
    CodebookStream,
    CorruptStreamError,
    PreconditionError,
    UncodableInputError,
    build_universal_table,
    decode,
    distortion,
    encode,
    enumerate_blocks,
    hamming,
    index_code_decode,
    index_code_encode,
    per_letter,
    read_container,
    theoretical_length,
    write_container,
)
from unirdc.codec import message_from_bits

HAMMING = hamming(BINARY)


def stream(seed=7, n=6, k=2, **kw):
    return CodebookStream(seed=seed, n=n, alphabet_size=k, mode="exact", **kw)


def test_index_code_base_cases():
    assert index_code_encode(1).to_text() == "1"
    assert index_code_encode(17).length == 9
    assert index_code_encode(2).to_text() == "0100"


def test_index_code_round_trip():
    for i in range(1, 1 << 20):
        if i < 4096 or i % 997 == 0 or (i & (i - 1)) == 0 or (i + 1) & i == 0:
            r = BitReader(index_code_encode(i))
            assert index_code_decode(r) == i
            assert r.remaining == 0


def test_index_code_dense_range_exact():
    for i in range(1, 5000):
        assert index_code_decode(BitReader(index_code_encode(i))) == i


def test_index_code_rejects_garbage():
    with pytest.raises(CorruptStreamError):
        index_code_decode(BitReader(BitString.from_text("0" * 70)))


def test_theoretical_length_values():
    tl = theoretical_length(1, 10, 2.0)
    assert tl.bits == pytest.approx(math.log2(10 * math.log(2) + 1))
    assert tl.bits <= tl.decomposed_bound
    tl = theoretical_length(4, 10, 2.0)
    assert tl.bits == pytest.approx(2 + math.log2(10 * math.log(2) + 1))
    assert tl.log_term == pytest.approx(math.log2(math.log(2) + 1))


def test_theoretical_length_dominance_sweep():
    for base in (2.0, 4.0):
        c = math.log2(math.log(base) + 1)
        for n in (1, 2, 16, 128, 1024):
            for i in (1, 2, 3, 255, 4096, 65536):
                tl = theoretical_length(i, n, base)
                assert tl.bits <= math.log2(i) + math.log2(n) + c + 1e-12


def test_round_trip_exhaustive_small():
    s = stream(seed=21, n=5)
    level = Fraction(1, 5)
    for x in enumerate_blocks(5, 2):
        msg = encode(x, level, HAMMING, s)
        y = decode(msg, s)
        assert distortion(x, y, HAMMING) <= 5 * level


def test_full_sphere_always_first_codeword():
    s = stream(seed=9)
    for x in list(enumerate_blocks(6, 2))[:16]:
        msg = encode(x, 1, HAMMING, s)
        assert msg.index == 1 and not msg.escape
        assert msg.payload.to_text() == "1"  # the 1-bit code for index 1
        assert msg.to_bits().to_text() == "01"  # escape flag 0 in front


def test_message_bits_round_trip():
    s = stream(seed=5)
    x = BINARY.to_block("011001")
    msg = encode(x, Fraction(1, 6), HAMMING, s)
    again = message_from_bits(msg.to_bits())
    assert (again.escape, again.payload, again.index) == (
        msg.escape,
        msg.payload,
        msg.index,
    )
    assert decode(again, s) == decode(msg, s)


def test_escape_round_trip_returns_witness():
    s = stream(seed=3, max_draws=1)
    x = BINARY.to_block("010110")
    msg = encode(x, 0, HAMMING, s)  # zero budget: only x itself fits
    assert msg.escape
    assert decode(msg, s) == x
    assert msg.total_bits == 1 + 6


def test_escape_theoretical_bits_is_raw_cost():
    s = stream(seed=3, max_draws=1)
    msg = encode(BINARY.to_block("010110"), 0, HAMMING, s)
    assert msg.theoretical_bits == msg.total_bits


def test_uncodable_input():
    src = Alphabet("abc")
    spec = per_letter([[1, 2], [2, 1], [1, 1]], src, BINARY)
    s = CodebookStream(seed=1, n=3, alphabet_size=2, mode="exact")
    with pytest.raises(UncodableInputError):
        encode(src.to_block("abc"), Fraction(1, 3), spec, s)


def test_seed_mismatch_detected_by_distortion():
    s1, s2 = stream(seed=7), stream(seed=8)
    x = BINARY.to_block("011010")
    level = Fraction(1, 6)
    msg = encode(x, level, HAMMING, s1)
    if not msg.escape and msg.index > 1:
        y = decode(msg, s2)
        assert distortion(x, y, HAMMING) > 6 * level


def test_same_seed_reproduces_codewords():
    a = list(zip(range(40), stream(seed=13).codewords()))
    b = list(zip(range(40), stream(seed=13).codewords()))
    assert a == b


def test_bitfeed_mode_round_trip():
    s = CodebookStream(seed=4, n=6, alphabet_size=2, mode="bitfeed")
    level = Fraction(1, 3)
    for x in list(enumerate_blocks(6, 2))[::7]:
        y = decode(encode(x, level, HAMMING, s), s)
        assert distortion(x, y, HAMMING) <= 6 * level


def test_base_warning():
    s = stream(base=2.0)
    with pytest.warns(UserWarning):
        encode(BINARY.to_block("000000"), 1, HAMMING, s)


def test_decode_rejects_out_of_range_index():
    s_large = stream(seed=7, max_draws=1 << 20)
    x = BINARY.to_block("010101")
    msg = encode(x, 0, HAMMING, s_large)
    if not msg.escape:
        s_small = stream(seed=7, max_draws=1)
        if msg.index > 1:
            with pytest.raises(CorruptStreamError):
                decode(msg, s_small)


def test_container_round_trip():
    s = stream(seed=11)
    level = Fraction(1, 6)
    xs = [BINARY.to_block(t) for t in ("011010", "000000", "111111")]
    msgs = [encode(x, level, HAMMING, s) for x in xs]
    buf = io.BytesIO()
    write_container(buf, s, level, msgs)
    buf.seek(0)
    header, decoded = read_container(buf)
    assert header.n == 6 and header.alphabet_size == 2 and header.seed == 11
    assert header.mode == "exact" and header.length_mode == "plain"
    assert header.level == level
    assert [(m.escape, m.payload, m.index) for m in decoded] == [
        (m.escape, m.payload, m.index) for m in msgs
    ]
    replay = CodebookStream(
        seed=header.seed, n=header.n, alphabet_size=header.alphabet_size,
        mode=header.mode, length_mode=header.length_mode,
    )
    for x, m in zip(xs, decoded):
        assert distortion(x, decode(m, replay), HAMMING) <= 6 * level


def test_container_rejects_bad_magic():
    s = stream(seed=11)
    buf = io.BytesIO()
    write_container(buf, s, Fraction(1, 6), [])
    raw = bytearray(buf.getvalue())
    raw[0] ^= 0xFF
    with pytest.raises(CorruptStreamError):
        read_container(io.BytesIO(bytes(raw)))


def test_container_rejects_truncation():
    s = stream(seed=11)
    msg = encode(BINARY.to_block("011010"), Fraction(1, 6), HAMMING, s)
    buf = io.BytesIO()
    write_container(buf, s, Fraction(1, 6), [msg])
    raw = buf.getvalue()
    with pytest.raises(Exception):
        read_container(io.BytesIO(raw[:-1]))


def test_container_level_must_fit():
    s = stream(seed=11)
    with pytest.raises(PreconditionError):
        write_container(io.BytesIO(), s, Fraction(1, 1000), [])


def test_stream_validation():
    with pytest.raises(PreconditionError):
        CodebookStream(seed=1, n=4, alphabet_size=2, mode="nope")
    with pytest.raises(PreconditionError):
        CodebookStream(seed=1, n=0, alphabet_size=2, mode="exact")
    t = build_universal_table(4, 2, "plain")
    with pytest.raises(PreconditionError):
        CodebookStream(seed=1, n=5, alphabet_size=2, mode="exact", table=t)
