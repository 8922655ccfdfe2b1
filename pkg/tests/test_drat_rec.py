import dataclasses
import itertools
import random

import pytest

from relkit import catalog as C
from relkit.automata import DetKTapeAutomaton, permute_tapes
from relkit.drat_rec import (build_independent, decide_recognizable, eq_to_rec, independent_to_det,
                             is_null_transparent, kary_encode, null_transparent_dfa, plain_view,
                             pumped_words, shuffle_encode, validate_witness)
from relkit.equiv import approx_equiv
from relkit.errors import ArityError
from relkit.generate import random_det
from relkit.oracles import bounded_equiv, enumerate_relation, index_probe, member_det

from evaluators import kary_condition, sample_flat, sample_shuffle, shuffle_condition
from helpers import AB, words


def full_relation(k=2):
    """Two states, one per tape; every tuple is accepted."""
    owner = {"p": 0, "q": 1}
    delta = {("p", c): "p" for c in AB}
    delta[("p", "⊣")] = "q"
    delta.update({("q", c): "q" for c in AB})
    return DetKTapeAutomaton(2, AB, ("p", "q"), owner, "p", {"q"}, delta)


def no_finals(a):
    return DetKTapeAutomaton(a.k, a.alphabet, a.states, a.owner, a.initial, (), a.delta,
                             a.endmarked)


def subjects(n, k=2, start=0):
    fixed = [C.catalog(x) for x in ("LEN2", "EQ", "SUBSEQ")]
    return fixed + [random_det(k, 3, seed) for seed in range(start, start + n)]


# -- null transparency -------------------------------------------------------------

def test_empty_word_never_null_transparent():
    for a in subjects(5):
        assert not is_null_transparent(a, ())


def test_null_transparent_closed_under_square():
    for a in subjects(10):
        for v in words(AB, 3):
            if v and is_null_transparent(a, v):
                assert is_null_transparent(a, v + v)


def test_null_transparent_dfa_matches_definition():
    for a in subjects(10):
        d = null_transparent_dfa(a)
        for v in words(AB, 3):
            assert d.accepts(v) == is_null_transparent(a, v), v


def test_null_transparent_other_tape():
    for seed in range(8):
        a = random_det(3, 3, seed)
        d = null_transparent_dfa(a, 2)
        for v in words(AB, 3):
            assert d.accepts(v) == is_null_transparent(a, v, 2)


# -- encodings ---------------------------------------------------------------------

def test_shuffle_encoding_matches_conditions():
    positives = {1: 0, 2: 0}
    for i, a in enumerate(subjects(17)):
        c1, c2 = shuffle_encode(a)
        rnd = random.Random(i)
        for _ in range(12):
            enc = sample_shuffle(a, rnd)
            if enc is None:
                continue
            for which, c in ((1, c1), (2, c2)):
                expect = shuffle_condition(a, enc, which)
                assert member_det(c, enc) == expect
                positives[which] += expect
    assert positives[1] > 10 and positives[2] > 10


def test_shuffle_encoding_needs_two_tapes():
    with pytest.raises(ArityError):
        shuffle_encode(random_det(3, 2, 0))


def test_kary_encoding_matches_conditions():
    positives = {1: 0, 2: 0}
    for i, a in enumerate(subjects(12) + [random_det(3, 3, s) for s in range(5)]):
        p1, p2 = kary_encode(a)
        rnd = random.Random(i)
        for _ in range(40):
            enc = sample_flat(a, rnd)
            if enc is None:
                continue
            for which, c in ((1, p1), (2, p2)):
                expect = kary_condition(a, enc, which)
                assert member_det(c, enc) == expect
                positives[which] += expect
    assert positives[1] > 10 and positives[2] > 10


def test_encodings_agree_on_recognizable_examples():
    c1, c2 = shuffle_encode(C.catalog("LEN2"))
    assert bounded_equiv(c1, c2, 6).equal
    for a in (C.catalog("LEN2"), full_relation()):
        p1, p2 = kary_encode(a)
        assert bounded_equiv(p1, p2, 6).equal


# -- decision ----------------------------------------------------------------------

def test_catalog_verdicts():
    assert decide_recognizable(C.catalog("LEN2")).recognizable
    for name in ("EQ", "SUBSEQ"):
        v = decide_recognizable(C.catalog(name))
        assert not v.recognizable and v.tape == 0 and validate_witness(C.catalog(name), v.witness)
    assert decide_recognizable(full_relation()).recognizable


def test_simon_recognizable():
    for n in (1, 2):
        assert decide_recognizable(C.catalog("SIMON(%d)" % n)).recognizable


def test_permutation_invariant():
    for seed in range(30):
        a = random_det(2, 3, seed)
        b = permute_tapes(a, [1, 0])
        assert decide_recognizable(a).recognizable == decide_recognizable(b).recognizable


def test_three_tape_verdicts_validate():
    for seed in range(15):
        a = random_det(3, 3, seed)
        v = decide_recognizable(a)
        if not v.recognizable:
            assert validate_witness(a, v.witness)


def test_verdict_agrees_with_independent_build():
    for seed in range(25):
        a = random_det(2, 3, seed)
        v = decide_recognizable(a)
        got = build_independent(a, cap=40)
        if v.recognizable:
            assert bounded_equiv(independent_to_det(got), a, 5).equal
        else:
            assert not got.recognizable


def test_random_witnesses_validate_and_mutations_fail():
    found = 0
    for seed in range(40):
        a = random_det(2, 3, seed)
        v = decide_recognizable(a)
        if v.recognizable:
            continue
        found += 1
        w = v.witness
        assert validate_witness(a, w)
        assert not validate_witness(a, dataclasses.replace(w, v1=()))
        assert not validate_witness(a, dataclasses.replace(w, tape=a.k))
        assert not validate_witness(a, dataclasses.replace(w, q=("missing",)))
    assert found >= 5


def test_pumped_words_are_pairwise_inequivalent():
    for a in subjects(20)[1:]:
        v = decide_recognizable(a)
        if v.recognizable:
            continue
        ws = pumped_words(a, v.witness, 3)
        for u, x in itertools.combinations(ws, 2):
            assert not approx_equiv(a, v.tape, u, x), (u, x)


def test_recognizable_relations_have_bounded_probe():
    for seed in range(10):
        a = random_det(2, 3, seed)
        if decide_recognizable(a).recognizable:
            vals = [index_probe(a, 0, L) for L in (3, 5, 6)]
            ind = build_independent(a)
            assert max(vals) <= len(ind.components[0].states)


# -- equivalence to recognizability ------------------------------------------------

def test_eq_to_rec_examples():
    eq = C.catalog("EQ")
    assert decide_recognizable(eq_to_rec(eq, eq)).recognizable
    assert not decide_recognizable(eq_to_rec(eq, C.catalog("SUBSEQ"))).recognizable


def test_eq_to_rec_random():
    for seed in range(20):
        a = random_det(2, 3, seed)
        b = random_det(2, 3, seed) if seed % 3 == 0 else random_det(2, 3, seed + 500)
        same = bounded_equiv(a, b).equal
        assert decide_recognizable(eq_to_rec(a, b)).recognizable == same


def test_eq_to_rec_arity():
    with pytest.raises(ArityError):
        eq_to_rec(random_det(2, 2, 0), random_det(3, 2, 0))


# -- independent automata ----------------------------------------------------------

def test_len2_components():
    ind = build_independent(C.catalog("LEN2"))
    assert [len(d.states) for d in ind.components] == [3, 3]
    assert bounded_equiv(independent_to_det(ind), C.catalog("LEN2"), 6).equal


def test_simon_components():
    for n, low in ((1, 2), (2, 4)):
        a = C.catalog("SIMON(%d)" % n)
        ind = build_independent(a)
        assert len(ind.components[0].states) >= low
        assert bounded_equiv(independent_to_det(ind), a, 6).equal


def test_independent_membership():
    ind = build_independent(C.catalog("LEN2"))
    for x, y in itertools.product(words(AB, 3), repeat=2):
        assert ind.member((x, y)) == member_det(C.catalog("LEN2"), (x, y))


def test_probe_below_component_size():
    for seed in range(10):
        a = random_det(2, 3, seed)
        ind = build_independent(a, cap=40)
        if not hasattr(ind, "components"):
            continue
        for j in range(2):
            assert index_probe(a, j, 5) <= len(ind.components[j].states)


def test_no_finals_gives_empty_relation():
    ind = build_independent(no_finals(C.catalog("LEN2")))
    assert not ind.finals
    assert enumerate_relation(independent_to_det(ind), 4) == []


def test_nonrecognizable_build_returns_verdict():
    got = build_independent(C.catalog("EQ"), cap=30)
    assert not got.recognizable and validate_witness(C.catalog("EQ"), got.witness)


def test_plain_view_keeps_relation():
    for seed in range(5):
        a = random_det(2, 3, seed)
        assert not plain_view(a).endmarked
