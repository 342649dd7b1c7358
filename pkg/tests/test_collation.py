import unicodedata

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import all_sequences, naive_edit_distance
from tht.collation import (
    AlignOp,
    align,
    edit_distance,
    normalized_distance,
    pseudo_witness,
    tokenize,
)
from tht.errors import UnknownLayerLabel

ALPHA3 = ("x", "y", "z")


# -- tokenize ---------------------------------------------------------------

def test_tokenize_sutra():
    assert tokenize("वृद्धिः आत् ऐच्").tokens == ("वृद्धिः", "आत्", "ऐच्")


def test_tokenize_empty():
    assert tokenize("").tokens == ()


def test_tokenize_strips_danda():
    assert tokenize("कष्टश्रितः।").tokens == ("कष्टश्रितः",)
    assert tokenize("इति॥ अथ").tokens == ("इति", "अथ")


def test_tokenize_ascii_punctuation_separates():
    assert tokenize("[विधीयते], च;").tokens == ("विधीयते", "च")
    assert tokenize("a-b c.d").tokens == ("a", "b", "c", "d")


def test_tokenize_keeps_avagraha():
    assert tokenize("संज्ञा ऽधिक्रियते").tokens == ("संज्ञा", "ऽधिक्रियते")


def test_tokenize_nfc_normalizes():
    decomposed = "éclat"  # e + combining acute
    (token,) = tokenize(decomposed).tokens
    assert token == "éclat"


@given(st.text(max_size=80))
def test_tokenize_tokens_never_empty_or_separated(text):
    tokens = tokenize(text).tokens
    for token in tokens:
        assert token
        assert not any(c.isspace() or c in "।॥" for c in token)
        assert token == unicodedata.normalize("NFC", token)


# -- edit distance -----------------------------------------------------------

def test_edit_distance_examples():
    assert edit_distance(["a", "b", "c"], ["a", "x", "c"]) == 1
    assert edit_distance(["a", "b"], []) == 2
    assert edit_distance([], []) == 0


def test_edit_distance_identity_random_sequences():
    for seq in all_sequences(ALPHA3, 4):
        assert edit_distance(seq, seq) == 0


def test_edit_distance_matches_naive_recursion_exhaustively():
    sequences = all_sequences(ALPHA3, 5)
    for a in sequences:
        for b in sequences:
            assert edit_distance(a, b) == naive_edit_distance(a, b)


def test_edit_distance_metric_laws_exhaustive():
    sequences = all_sequences(ALPHA3, 4)
    n = len(sequences)
    d = [[edit_distance(sequences[i], sequences[j]) for j in range(n)]
         for i in range(n)]
    for i in range(n):
        assert d[i][i] == 0
        for j in range(i + 1, n):
            assert d[i][j] == d[j][i]
            assert d[i][j] > 0  # distinct sequences never at distance 0
    for i in range(n):
        di = d[i]
        for j in range(n):
            dij = di[j]
            dj = d[j]
            for k in range(n):
                assert di[k] <= dij + dj[k]


# -- normalized distance -------------------------------------------------------

def test_normalized_examples():
    assert normalized_distance(["a", "b", "c"], ["a", "x", "c"]) == pytest.approx(1 / 3)
    assert normalized_distance([], []) == 0.0
    assert normalized_distance(["a"], ["b", "c"]) == 1.0


@given(st.lists(st.sampled_from(ALPHA3), max_size=6),
       st.lists(st.sampled_from(ALPHA3), max_size=6))
def test_normalized_bounds(a, b):
    nd = normalized_distance(a, b)
    assert 0.0 <= nd <= 1.0
    assert (nd == 0.0) == (list(a) == list(b))


# -- alignment ----------------------------------------------------------------

def replay_alignment(a, b, ops):
    out = []
    for op in ops:
        if op.kind in ("match", "substitute"):
            out.append(b[op.j])
        elif op.kind == "insert":
            out.append(b[op.j])
        # delete consumes from a only
    return out


def test_align_trivial_cases():
    assert align(["a"], ["a"]) == [AlignOp("match", 0, 0)]
    assert align([], ["x"]) == [AlignOp("insert", None, 0)]
    assert [op.kind for op in align(["a", "b"], ["a", "c"])] == ["match", "substitute"]


def test_align_cost_soundness_and_replay_exhaustive():
    sequences = all_sequences(ALPHA3, 4)
    for a in sequences:
        for b in sequences:
            ops = align(a, b)
            non_match = sum(1 for op in ops if op.kind != "match")
            assert non_match == edit_distance(a, b)
            assert tuple(replay_alignment(a, b, ops)) == b
            consumed_a = [op.i for op in ops if op.i is not None]
            consumed_b = [op.j for op in ops if op.j is not None]
            assert consumed_a == list(range(len(a)))
            assert consumed_b == list(range(len(b)))


def test_align_prefers_match_over_indels():
    ops = align(["a", "b"], ["b"])
    # Deleting "a" then matching "b" beats substituting then deleting.
    assert [op.kind for op in ops] == ["delete", "match"]


# -- pseudo-witness --------------------------------------------------------------

def test_pseudo_witness_counts_and_order(kv_store):
    per_unit = pseudo_witness(kv_store.corpus, "Ny", "KV",
                              ["1.1.1.1", "1.1.1.2"])
    total = sum(len(seq) for seq in per_unit.values())
    assert total == 24
    base = tokenize(kv_store.corpus.get_work("KV").get_unit("1.1.1.1").base_text)
    got = per_unit["1.1.1.1"].tokens
    positions = [base.tokens.index(t) for t in got[:3]]
    assert positions == sorted(positions)
    assert got == base.tokens[:18]


def test_pseudo_witness_pm(kv_store):
    per_unit = pseudo_witness(kv_store.corpus, "Pm", "KV",
                              ["1.1.1.1", "1.1.1.2"])
    assert sum(len(seq) for seq in per_unit.values()) == 12


def test_pseudo_witness_layer_without_annotations(kv_store):
    kv_store.add_layer("KV/1.1.1", "Mk", "…")
    per_unit = pseudo_witness(kv_store.corpus, "Mk", "KV", ["1.1.1.1"])
    assert per_unit["1.1.1.1"].tokens == ()


def test_pseudo_witness_unknown_label(kv_store):
    with pytest.raises(UnknownLayerLabel):
        pseudo_witness(kv_store.corpus, "Zz", "KV", None)
