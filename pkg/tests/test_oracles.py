import itertools
import random

import pytest

from relkit import catalog as C
from relkit.automata import PAD, DetKTapeAutomaton, KTapeAutomaton, UpWord
from relkit.errors import ArityError, BudgetError, RelkitError
from relkit.generate import random_det, random_dpa, random_tuple
from relkit.omega import dpa_to_nba
from relkit.oracles import (TupleEnumerator, bounded_equiv, complete_bound, convolve, deconvolve,
                            enumerate_relation, index_probe, member, member_det, member_nondet,
                            member_upword)

from helpers import AB, tuples_upto


def flip_final(a, q=None):
    q = a.initial if q is None else q
    finals = set(a.finals) ^ {q}
    return DetKTapeAutomaton(a.k, a.alphabet, a.states, a.owner, a.initial, finals, a.delta,
                             a.endmarked)


def is_subseq(x, y):
    it = iter(y)
    return all(c in it for c in x)


def test_member_det_arity_error():
    with pytest.raises(ArityError):
        member_det(C.catalog("LEN2"), ("a",))


def test_member_det_empty_tuple_is_forced_run():
    a = C.catalog("SUBSEQ")
    assert member_det(a, ("", ""))
    assert not member_det(C.catalog("LEN2"), ("", ""))


def test_infix_examples():
    a = C.catalog("INFIX")
    assert member_nondet(a, ("ab", "aabb"))
    assert not member_nondet(a, ("aa", "abab"))


def test_infix_matches_definition():
    a = C.catalog("INFIX")
    for x, y in tuples_upto(2, 6):
        assert member_nondet(a, (x, y)) == ("".join(x) in "".join(y))


def test_empty_nondet_automaton():
    for final in (True, False):
        a = KTapeAutomaton(2, AB, ("s",), "s", {"s"} if final else (), ())
        assert member_nondet(a, ("", "")) == final


def test_subseq_matches_definition():
    a = C.catalog("SUBSEQ")
    for x, y in tuples_upto(2, 6):
        assert member_det(a, (x, y)) == is_subseq(x, y)


def test_convolve_examples():
    assert convolve(("ab", "a")) == (("a", "a"), ("b", PAD))
    assert convolve(("", "")) == ()


def test_convolve_round_trip():
    rnd = random.Random(5)
    for _ in range(1000):
        u = random_tuple(rnd.randint(1, 3), 4, rnd)
        if not any(u):
            continue
        assert deconvolve(convolve(u), len(u)) == u


def test_deconvolve_rejects_bad_padding():
    with pytest.raises(RelkitError):
        deconvolve(((PAD, "a"), ("a", "b")), 2)
    with pytest.raises(RelkitError):
        deconvolve(((PAD, PAD),), 2)


def test_enumerator_exhaustive_and_ordered():
    en = TupleEnumerator(2, AB)
    got = list(en.up_to(4))
    assert len(got) == len(set(got)) == len(tuples_upto(2, 4))
    keys = [(sum(map(len, u))) for u in got]
    assert keys == sorted(keys)


def test_enumerate_len2():
    got = enumerate_relation(C.catalog("LEN2"), 2)
    assert got and all(sum(map(len, u)) == 2 for u in got)
    assert len(got) == len([u for u in tuples_upto(2, 2) if sum(map(len, u)) == 2])


def test_enumerate_subseq_count():
    got = enumerate_relation(C.catalog("SUBSEQ"), 4)
    direct = sum(1 for x, y in tuples_upto(2, 4) if is_subseq(x, y))
    assert len(got) == direct


def test_enumerate_empty():
    a = flip_final(C.catalog("SUBSEQ"), None)
    empty = DetKTapeAutomaton(2, AB, a.states, a.owner, a.initial, (), a.delta)
    assert enumerate_relation(empty, 5) == []


def test_bounded_equiv_reflexive_and_flip():
    a = C.catalog("LEN2")
    assert bounded_equiv(a, a).equal
    for q in a.states:
        b = flip_final(a, q)
        res = bounded_equiv(a, b)
        if not res.equal:
            u = res.counterexample
            assert member_det(a, u) != member_det(b, u)
            assert sum(map(len, u)) <= complete_bound(a, b)


def test_bounded_equiv_engines_agree():
    for seed in range(40):
        a, b = random_det(2, 3, seed), random_det(2, 3, seed + 1000)
        r1 = bounded_equiv(a, b, 6, engine="enumerate")
        r2 = bounded_equiv(a, b, 6, engine="series", seed=seed)
        assert r1.equal == r2.equal
        if not r1.equal:
            assert member_det(a, r2.counterexample) != member_det(b, r2.counterexample)


def test_bounded_equiv_counterexample_is_minimal():
    for seed in range(20):
        a, b = random_det(2, 3, seed), random_det(2, 3, seed + 77)
        res = bounded_equiv(a, b, 6, engine="enumerate")
        if res.equal:
            continue
        n = sum(map(len, res.counterexample))
        for u in tuples_upto(2, n - 1):
            assert member_det(a, u) == member_det(b, u)


def test_equal_implies_same_enumeration():
    for seed in range(20):
        a = random_det(2, 3, seed)
        b = random_det(2, 3, seed) if seed % 2 else a
        if bounded_equiv(a, b).equal:
            for L in range(5):
                assert enumerate_relation(a, L) == enumerate_relation(b, L)


def test_bounded_equiv_budget():
    a = C.catalog("SIMON(2)")
    with pytest.raises(BudgetError) as e:
        bounded_equiv(a, a, 30, engine="enumerate", cap=1000)
    assert e.value.needed == 30


def test_index_probe_examples():
    assert index_probe(C.catalog("LEN2"), 0, 3) == 3
    assert index_probe(C.catalog("EQ"), 0, 3) == 15
    a = C.catalog("LEN2")
    empty = DetKTapeAutomaton(2, AB, a.states, a.owner, a.initial, (), a.delta)
    assert index_probe(empty, 0, 3) == 1


def test_index_probe_monotone():
    for seed in range(10):
        a = random_det(2, 4, seed)
        vals = [index_probe(a, 0, L) for L in range(5)]
        assert vals == sorted(vals)


def test_subseq_probe_grows():
    vals = [index_probe(C.catalog("SUBSEQ"), 0, L) for L in range(1, 5)]
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_member_upword_examples():
    assert member_upword(C.catalog("EQ_OMEGA"), (UpWord((), "a"), UpWord((), "a")))
    assert member_upword(C.catalog("NEQ_OMEGA"), (UpWord("ab", "a"), UpWord("aa", "a")))
    assert not member_upword(C.catalog("NOT_EE_OMEGA"), (UpWord((), "ab"), UpWord((), "ab")))


def test_member_upword_dpa_vs_nba():
    rnd = random.Random(3)
    letters = tuple(itertools.product(AB, repeat=2))
    for seed in range(8):
        d = random_dpa(4, seed, alphabet=letters)
        n = dpa_to_nba(d)
        for _ in range(50):
            w = UpWord(tuple(rnd.choice(letters) for _ in range(rnd.randint(0, 3))),
                       tuple(rnd.choice(letters) for _ in range(rnd.randint(1, 3))))
            assert member_upword(d, w) == member_upword(n, w)


def test_member_dispatch():
    assert member(C.catalog("INFIX"), ("a", "ba"))
    assert member(C.catalog("LEN2"), ("a", "b"))
