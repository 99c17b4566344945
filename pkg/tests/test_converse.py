import math
from itertools import combinations

import pytest
from fractions import Fraction

from unirdc import (
    BINARY,
    Alphabet,
    PreconditionError,
    UncoverableError,
    all_type_classes,
    build_universal_table,
    converse_length_bound,
    covering_lower_bound,
    distortion,
    double_counting_check,
    empirical_distribution,
    enumerate_blocks,
    enumerate_type_class,
    greedy_cover,
    hamming,
    length_slack_terms,
    lz_bit_length,
    multinomial,
    per_letter,
    short_codeword_count,
    shortest_first_lengths,
    tree_node_count,
)
from unirdc.core import EmpiricalDistribution

AB = Alphabet("ab")
HAMMING = hamming(BINARY)
HAMMING_AB = hamming(AB)


def dist_of(text, order=1):
    return empirical_distribution(AB.to_block(text), order)


def test_multinomial():
    assert multinomial(4, [2, 2]) == 6
    assert multinomial(6, [1, 2, 3]) == 60
    assert multinomial(5, [5]) == 1


def test_type_class_counting_oracles():
    assert enumerate_type_class(dist_of("aabb")).cardinality == 6
    assert enumerate_type_class(dist_of("abab", 2)).cardinality == 1
    assert enumerate_type_class(dist_of("aaabba", 2)).cardinality == 6


def test_type_class_members_consistent():
    tc = enumerate_type_class(dist_of("aabb"))
    assert len(tc.members) == tc.cardinality
    for m in tc.members:
        assert empirical_distribution(m, 1) == tc.distribution
    # members are produced in lexicographic order
    assert [m.symbols for m in tc.members] == sorted(m.symbols for m in tc.members)


def test_all_type_classes_partition():
    classes = all_type_classes(4, 1, 2)
    assert sum(tc.cardinality for tc in classes) == 16
    seen = set()
    for tc in classes:
        seen.update(tc.members)
    assert len(seen) == 16


def test_double_counting_exhaustive_small():
    classes = all_type_classes(4, 1, 2)
    for p in classes:
        for q in classes:
            for level in (0, Fraction(1, 4), Fraction(1, 2), 1):
                r = double_counting_check(p, q, level, HAMMING)
                assert r.ok, r.detail


def test_double_counting_edge_levels():
    p = enumerate_type_class(dist_of("aabb"))
    q = enumerate_type_class(dist_of("abbb"))
    full = double_counting_check(p, q, 1, HAMMING_AB)
    assert full.ok and full.forward_size == q.cardinality
    empty = double_counting_check(p, q, -1, HAMMING_AB)
    assert empty.ok and empty.forward_size == 0 and empty.reverse_size == 0


def test_double_counting_rejects_callable_measure():
    from unirdc import callable_spec

    spec = callable_spec(lambda x, y: 0, AB, AB)
    p = enumerate_type_class(dist_of("aabb"))
    with pytest.raises(PreconditionError):
        double_counting_check(p, p, 0, spec)


def test_covering_bound_trivial_cases():
    tc = enumerate_type_class(dist_of("aabb"))
    assert covering_lower_bound(tc, 1, HAMMING_AB).min_codebook_size == 1
    assert covering_lower_bound(tc, 0, HAMMING_AB).min_codebook_size == tc.cardinality


def test_covering_bound_oracle_n6():
    # balanced type at n=6, one flip allowed: 20 members, best sphere covers 4
    tc = enumerate_type_class(dist_of("aaabbb"))
    rep = covering_lower_bound(tc, Fraction(1, 6), HAMMING_AB)
    assert rep.min_codebook_size == 5
    assert rep.max_covered == 4
    assert rep.best_cover_type is not None


def test_greedy_cover_trivial_cases():
    tc = enumerate_type_class(dist_of("aabb"))
    assert greedy_cover(tc, 1, HAMMING_AB).size == 1
    assert greedy_cover(tc, 0, HAMMING_AB).size == tc.cardinality


def test_greedy_cover_within_classic_ratio():
    tc = enumerate_type_class(dist_of("aaabbb"))
    rep = covering_lower_bound(tc, Fraction(1, 6), HAMMING_AB)
    g = greedy_cover(tc, Fraction(1, 6), HAMMING_AB)
    m0 = rep.min_codebook_size
    assert m0 <= g.size
    assert g.size <= math.ceil(m0 * (1 + math.log(tc.cardinality)))
    # every member is inside some chosen sphere
    budget = 6 * Fraction(1, 6)
    for x in tc.members:
        assert any(distortion(x, xh, HAMMING_AB) <= budget for xh in g.codebook)


def test_greedy_cover_uncoverable():
    src = Alphabet("abc")
    spec = per_letter([[1, 2], [2, 1], [1, 1]], src, BINARY)
    tc = enumerate_type_class(empirical_distribution(src.to_block("abc"), 1))
    with pytest.raises(UncoverableError):
        greedy_cover(tc, Fraction(1, 3), spec)


def test_exhaustive_minimal_covers_respect_bound():
    # brute-force minimum covers can never beat ceil(M0)
    for text, level in (("aabb", Fraction(1, 4)), ("aaab", Fraction(1, 4))):
        tc = enumerate_type_class(dist_of(text))
        rep = covering_lower_bound(tc, level, HAMMING_AB)
        n = tc.distribution.n
        budget = n * level
        candidates = list(enumerate_blocks(n, 2))
        sets = []
        for xh in candidates:
            mask = 0
            for i, x in enumerate(tc.members):
                if distortion(x, xh, HAMMING_AB) <= budget:
                    mask |= 1 << i
            sets.append(mask)
        want = (1 << len(tc.members)) - 1
        best = None
        for size in range(1, 5):
            for combo in combinations(range(len(candidates)), size):
                acc = 0
                for j in combo:
                    acc |= sets[j]
                if acc == want:
                    best = size
                    break
            if best:
                break
        assert best is not None
        assert best >= math.ceil(rep.min_codebook_size)


def test_short_codeword_oracles():
    b = short_codeword_count(1024, 16, 1.0)
    assert b.max_count == 127
    assert b.bound == pytest.approx(2 * 1024 / 16 - 1)
    assert b.fraction_guarantee == pytest.approx(1 - 2 / 16)
    loose = short_codeword_count(1024, 16, 1e-9)
    assert loose.bound == pytest.approx(2 * 1024 - 1, rel=1e-6)


def test_short_codeword_brute_force():
    # shortest-first assignment saturates the counting limit but never beats it
    for m in (10, 31, 64):
        for n, eps in ((4, 1.0), (8, 0.5)):
            b = short_codeword_count(m, n, eps)
            lengths = shortest_first_lengths(m)
            short = sum(1 for L in lengths if L <= b.threshold_bits)
            assert short <= b.max_count


def test_shortest_first_lengths():
    assert shortest_first_lengths(5) == [1, 1, 2, 2, 2]
    assert shortest_first_lengths(1) == [1]
    # exactly 2^l strings of each length l are available
    lengths = shortest_first_lengths(2 + 4 + 8)
    assert lengths.count(1) == 2 and lengths.count(2) == 4 and lengths.count(3) == 8


def test_tree_node_count():
    assert tree_node_count(2, 2) == 7
    assert tree_node_count(2, 1) == 3
    assert tree_node_count(3, 2) == 13


def test_slack_terms_reported():
    terms = length_slack_terms(8, 2, 2, 2)
    assert terms["tree_nodes"] == 7
    assert terms["delta_per_symbol"] > 0
    assert terms["base_slack"] > 0
    assert terms["delta_per_symbol"] == pytest.approx(
        terms["parse_overhead"] + terms["base_slack"] + terms["chunk_term_outside"]
    )
    with pytest.raises(PreconditionError):
        length_slack_terms(8, 2, 2, 3)  # order must divide n


def test_one_over_order_term_smallest_at_full_order():
    # the 1/order contribution is trivially smallest at order n; the total
    # slack is not, since the tree-node terms explode with the order
    n = 8
    assert min(1.0 / l for l in (1, 2, 4, 8)) == 1.0 / n
    totals = {l: length_slack_terms(n, 2, 2, l)["delta_per_symbol"] for l in (1, 2, 4, 8)}
    assert totals[1] < totals[8]


def test_type_log_size_slack_nonnegative_default_convention():
    # log2 |class| >= bits - n * Delta for every block at these sizes
    for n in (4, 6, 8):
        for order in (1, 2):
            delta = length_slack_terms(n, 2, 2, order)["delta_per_symbol"]
            for tc in all_type_classes(n, order, 2):
                log_size = math.log2(tc.cardinality)
                for xh in tc.members:
                    assert log_size >= lz_bit_length(xh, 2) - n * delta


def test_converse_length_bound_report():
    t = build_universal_table(6, 2, "plain")
    x = BINARY.to_block("010101")
    rep = converse_length_bound(x, Fraction(1, 6), HAMMING, 1, 1.0, t)
    assert rep.min_codebook_size is not None
    assert rep.sphere_mass_bits > 0
    assert rep.bound_bits == pytest.approx(
        rep.sphere_mass_bits - 6 * rep.delta_per_symbol - 1.0 * math.log2(6)
    )
    assert rep.tree_nodes == 3
    assert set(rep.slack_terms) == {
        "parse_overhead",
        "base_slack",
        "chunk_term_inside",
        "chunk_term_outside",
        "tree_nodes",
        "delta_per_symbol",
    }


def test_enumerate_type_class_rejects_joint():
    x, y = AB.to_block("ab"), AB.to_block("ba")
    from unirdc import joint_empirical_distribution

    j = joint_empirical_distribution(x, y, 1)
    with pytest.raises(PreconditionError):
        enumerate_type_class(j)
