from fractions import Fraction
from itertools import product

import pytest

from detk.correction import (
    PartitionTriple,
    coefficient_norm_bound,
    derive,
    log_series,
    partition_triples,
    power_sums,
    trace_correction,
    verify_decomposition,
    verify_lemma_membership,
    verify_z_oracle,
    x_poly,
    y_poly,
    y_subset,
    z_closed,
    z_partition,
)
from detk.ncpoly import A, B, CapError, NcPoly, is_commutator_member, trace_normal_form

P = NcPoly.parse
AB = A * B


def z_by_colorings(k1, k2):
    """Independent oracle: scan every 3-coloring of 1..j and keep those with the right sizes."""
    acc = NcPoly.zero()
    for j in range(1, k1 + k2 + 1):
        for colors in product((1, 2, 3), repeat=j):
            n1, n2, n3 = colors.count(1), colors.count(2), colors.count(3)
            if n1 + n3 != k1 or n2 + n3 != k2:
                continue
            w = "".join({1: "A", 2: "B", 3: "AB"}[c] for c in colors)
            acc = acc + NcPoly({w: Fraction((-1) ** n3, j)})
    return acc


def x_by_truncation(k):
    """Oracle for x_k: long-word part of the log series expanded by multiplication."""
    return log_series(k).filter_length(lo=k)


def test_z_special_cases():
    assert z_partition(0, 0).is_zero()
    assert z_partition(2, 0) == P("1/2 AA")
    assert z_partition(0, 3) == P("1/3 BBB")


def test_z_one_one():
    expected = P("-1/2 AB + 1/2 BA")
    assert z_partition(1, 1) == expected
    assert z_closed(1, 1) == expected
    assert z_by_colorings(1, 1) == expected


def test_z_closed_domain():
    with pytest.raises(ValueError):
        z_closed(1, 0)


@pytest.mark.parametrize("k1,k2", [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (3, 2), (2, 3), (4, 2)])
def test_z_partition_matches_colorings(k1, k2):
    assert z_partition(k1, k2) == z_by_colorings(k1, k2)


def test_z_forms_agree_up_to_ten():
    results = verify_z_oracle(10)
    assert len(results) == sum(total - 1 for total in range(2, 11))
    assert all(r.passed for r in results), [r.name for r in results if not r.passed]


def test_z_cap():
    with pytest.raises(CapError):
        z_partition(11, 10)
    with pytest.raises(CapError):
        z_closed(15, 6)


def test_partition_triples():
    triples = list(partition_triples(3, 1, 1, 1))
    assert len(triples) == 6
    # permutations of the factors A, B, AB; two of them spell ABAB
    assert sorted(t.word() for t in triples) == ["AABB", "ABAB", "ABAB", "ABBA", "BAAB", "BABA"]
    with pytest.raises(ValueError):
        PartitionTriple(2, frozenset({1}), frozenset(), frozenset())
    t = PartitionTriple(3, frozenset({2}), frozenset({3}), frozenset({1}))
    assert t.word() == "ABAB"


def test_y_subset_examples():
    assert y_subset(1, {1}) == AB
    assert y_subset(1, set()) == A + B
    assert y_subset(2, {1}) == P("ABA + ABB")
    assert y_subset(3, {2}) == (A + B) * AB * (A + B)
    with pytest.raises(ValueError):
        y_subset(2, {3})


def test_y_subset_word_length():
    for j in range(1, 6):
        for mask in range(2 ** j):
            s = {m + 1 for m in range(j) if mask >> m & 1}
            assert {len(w) for w in y_subset(j, s).words()} == {j + len(s)}


def test_x_poly_small():
    assert x_poly(1).is_zero()
    assert x_poly(2) == -AB
    assert x_poly(3) == P("1/2 ABAB - 1/2 ABA - 1/2 ABB - 1/2 AAB - 1/2 BAB")


@pytest.mark.parametrize("k", range(2, 9))
def test_x_poly_matches_truncated_series(k):
    assert x_poly(k) == x_by_truncation(k)


def test_y_poly_small():
    assert y_poly(1).is_zero()
    assert y_poly(2) == A + B
    expected = A + B + P("1/2 AA + 1/2 AB + 1/2 BA + 1/2 BB") - AB
    assert y_poly(3) == expected
    assert y_poly(3) == log_series(3) - x_poly(3)


@pytest.mark.parametrize("k", range(2, 11))
def test_word_length_windows(k):
    assert {len(w) for w in x_poly(k).words()} <= set(range(k, 2 * k - 1))
    assert x_poly(k).degree() == 2 * k - 2
    assert {len(w) for w in y_poly(k).words()} <= set(range(1, k))


@pytest.mark.parametrize("k", range(1, 11))
def test_decomposition(k):
    assert verify_decomposition(k)


@pytest.mark.parametrize("k", range(1, 11))
def test_lemma_membership(k):
    rep = verify_lemma_membership(k)
    assert rep.passed, rep.first_failure()


def test_lemma_report_contents():
    rep = verify_lemma_membership(3)
    names = [c.name for c in rep.checks]
    assert "z_1,1 in [Pol2,Pol2]" in names
    assert any(n.startswith("y_3 = sum of z") for n in names)
    assert (y_poly(2) - (A + B)).is_zero()


def test_power_sums():
    assert power_sums(3) == P("A + B + 1/2 AA + 1/2 BB")
    assert not is_commutator_member(power_sums(3))


def test_trace_correction_small():
    assert trace_correction(1).is_zero()
    assert trace_correction(2) == -AB
    grouped_tr3 = -(A * B * A + B * A * B - Fraction(1, 2) * AB * AB)
    assert trace_correction(3) == trace_normal_form(grouped_tr3)
    assert trace_correction(3) == P("-AAB - ABB + 1/2 ABAB")


def test_trace_correction_sorted_canonical():
    tf = trace_correction(6)
    assert [w for w, _ in tf.sorted_items()] == sorted(tf.words(), key=lambda w: (len(w), w))
    assert trace_normal_form(tf) == tf


@pytest.mark.parametrize("k", range(1, 9))
def test_letter_swap_symmetry(k):
    x = x_poly(k)
    assert trace_normal_form(x - x.swap_letters()).is_zero()


def test_coefficient_norm_bound():
    assert coefficient_norm_bound(1) == 0
    assert coefficient_norm_bound(2) == 1
    assert coefficient_norm_bound(3) == Fraction(5, 2)
    assert coefficient_norm_bound(4) == sum(abs(c) for _, c in x_poly(4).items())


def test_cap(monkeypatch):
    with pytest.raises(CapError):
        x_poly(13)
    with pytest.raises(CapError):
        x_poly(5, cap=4)
    monkeypatch.setenv("DETK_CAP_K", "3")
    with pytest.raises(CapError):
        y_poly(4)
    assert y_poly(3) == log_series(3) - x_poly(3)
    with pytest.raises(ValueError):
        x_poly(0)


def test_derive_set():
    cs = derive(4)
    assert cs.x == x_poly(4) and cs.y == y_poly(4)
    assert cs.trace_form == trace_normal_form(cs.x)
    obj = cs.to_json_obj()
    assert obj["k"] == 4 and obj["word_count"] == len(cs.x) and obj["max_len"] == 6
    assert NcPoly.from_json_obj(obj["x"]) == cs.x
    assert "X_4 =" in cs.to_text()
    assert r"\operatorname{tr}" in cs.to_latex()
    assert derive(1).to_json_obj()["max_len"] == 0
