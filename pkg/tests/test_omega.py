import itertools
import random

from relkit import catalog as C
from relkit.automata import Dpa, Nba, UpWord, trim
from relkit.generate import pair_alphabet, random_dpa, random_nba
from relkit.omega import is_empty
from relkit.omega_rec import (check_three_cycles_witness, co_equiv_nba, decide_omega_recognizable,
                              detect_periodic_pattern, detect_prefix_pattern, expand_clique,
                              has_infinite_clique, sanity_check, three_cycles,
                              three_cycles_witnesses, validate_certificate)
from relkit.oracles import member_upword

from helpers import AB, first_tape_dpa, words

PAIRS = pair_alphabet(AB)


def rand_upword(rnd, alphabet=AB):
    return UpWord(tuple(rnd.choice(alphabet) for _ in range(rnd.randint(0, 3))),
                  tuple(rnd.choice(alphabet) for _ in range(rnd.randint(1, 3))))


def runs(a, top, bot):
    """src -> set of (dst, saw a final state) over the pair word (top, bot)."""
    out = {}
    for s in a.states:
        cur = {(s, s in a.finals)}
        for c in zip(top, bot):
            cur = {(r, f or r in a.finals) for q, f in cur for r in a.post(q, c)}
        out[s] = cur
    return out


def brute_three_cycles(a, max_uy=2, max_vwx=3):
    """Pattern relations found by enumerating every word up to the given lengths."""
    diag = {s: set() for s in a.states}
    for u in words(AB, max_uy):
        for s, ends in runs(a, u, u).items():
            diag[s] |= ends
    rel, relf = set(), set()
    for n in range(1, max_vwx + 1):
        ws = list(itertools.product(AB, repeat=n))
        for v, w, x in itertools.product(ws, ws, ws):
            if v == w:
                continue
            vv, wv, xv, xw, xx = (runs(a, *p) for p in ((v, v), (w, v), (x, v), (x, w), (x, x)))
            for q1 in a.states:
                for q2, f1 in diag[q1]:
                    if not any(d == q2 for d, _ in vv[q2]):
                        continue
                    for q3, f2 in wv[q2]:
                        if not any(d == q3 for d, _ in xv[q3]):
                            continue
                        for q4, f3 in xw[q3]:
                            if not any(d == q4 for d, _ in xx[q4]):
                                continue
                            for q5, f4 in diag[q4]:
                                rel.add((q1, q5))
                                if f1 or f2 or f3 or f4:
                                    relf.add((q1, q5))
    return rel, relf


def two_class_co_equiv():
    """Pairs whose first letters differ: complement of a two-class equivalence."""
    delta = {}
    for c in PAIRS:
        delta[("s", c)] = ("d",) if c[0] != c[1] else ()
        delta[("d", c)] = ("d",)
    return Nba(PAIRS, ("s", "d"), "s", {"d"}, delta)


def finite_index_nbas(n=10):
    """Co-equivalences of relations constraining only the first component."""
    out = []
    for seed in range(n):
        d = random_dpa(2 + seed % 3, seed, alphabet=AB)
        out.append(co_equiv_nba(first_tape_dpa(d), 0))
    return out


def product_dpa():
    """x has infinitely many a and y eventually only b."""
    prio = {"init": 3, "ya": 1, "xa": 2, "none": 3}

    def cls(c):
        return "ya" if c[1] == "a" else ("xa" if c[0] == "a" else "none")
    states = tuple(prio)
    delta = {(q, c): cls(c) for q in states for c in PAIRS}
    return Dpa(PAIRS, states, "init", delta, prio)


# -- co-equivalence -------------------------------------------------------------

def test_co_equiv_of_equality_is_inequality():
    co = co_equiv_nba(C.catalog("EQ_OMEGA"), 0)
    rnd = random.Random(0)
    for _ in range(30):
        x, y = rand_upword(rnd), rand_upword(rnd)
        if rnd.random() < 0.3:
            y = x
        assert member_upword(co, (x, y)) == (not x.same_word(y))
        assert member_upword(co, (x, y)) == member_upword(co, (y, x))


def test_co_equiv_full_relation_empty():
    full = Dpa(PAIRS, ("s",), "s", {("s", c): "s" for c in PAIRS}, {"s": 0})
    assert is_empty(co_equiv_nba(full, 0))


# -- three cycles ---------------------------------------------------------------

def test_three_cycles_single_state():
    a = Nba(PAIRS, ("q",), "q", {"q"}, {("q", c): ("q",) for c in PAIRS})
    rel, relf = three_cycles(a)
    assert ("q", "q") in rel and ("q", "q") in relf


def test_three_cycles_diagonal_only():
    a = Nba(PAIRS, ("q",), "q", {"q"}, {("q", c): ("q",) for c in PAIRS if c[0] == c[1]})
    assert three_cycles(a) == (set(), set())


def test_three_cycles_vs_brute_force_random():
    for seed in range(20):
        a = random_nba(3, seed, alphabet=PAIRS, density=0.4)
        rel, relf = three_cycles(a)
        brel, brelf = brute_three_cycles(a)
        assert brel <= rel and brelf <= relf
        assert relf <= rel


def test_three_cycles_vs_brute_force_catalog():
    for name in ("NEQ_OMEGA", "NOT_EE_OMEGA", "EE_OMEGA"):
        a = C.catalog(name)
        assert brute_three_cycles(a) == three_cycles(a), name


def test_three_cycles_witnesses_check():
    for seed in range(10):
        a = random_nba(3, seed, alphabet=PAIRS, density=0.4)
        for (q1, q5), (anyw, finw) in three_cycles_witnesses(a).items():
            assert (anyw.q1, anyw.q5) == (q1, q5) and check_three_cycles_witness(a, anyw)
            if finw is not None:
                assert finw.final and check_three_cycles_witness(a, finw)


def test_three_cycles_trim_invariant_and_monotone():
    for seed in range(10):
        a = random_nba(3, seed, alphabet=PAIRS, density=0.4)
        rel, relf = three_cycles(a)
        t = trim(a)
        trel, trelf = three_cycles(t)
        live = set(t.states)
        assert {p for p in rel if set(p) <= live} >= trel
        more = Nba(a.alphabet, a.states, a.initial, set(a.states), a.delta)
        assert relf <= three_cycles(more)[1]


# -- clique patterns ------------------------------------------------------------

def test_prefix_pattern_on_neq():
    c = detect_prefix_pattern(C.catalog("NEQ_OMEGA"))
    assert c is not None and c.kind == "prefix"
    assert validate_certificate(C.catalog("NEQ_OMEGA"), c, 4)


def test_prefix_pattern_absent():
    empty = Nba(PAIRS, ("s",), "s", (), {})
    assert detect_prefix_pattern(empty) is None
    assert detect_prefix_pattern(C.catalog("NOT_EE_OMEGA")) is None


def test_periodic_pattern_on_not_ee():
    a = C.catalog("NOT_EE_OMEGA")
    c = detect_periodic_pattern(a)
    assert c is not None and c.kind == "periodic"
    assert validate_certificate(a, c, 4)


def test_periodic_pattern_absent():
    assert detect_periodic_pattern(Nba(PAIRS, ("s",), "s", (), {})) is None
    for a in finite_index_nbas(4):
        assert detect_periodic_pattern(a) is None


def test_has_infinite_clique():
    assert has_infinite_clique(C.catalog("NOT_EE_OMEGA")) is not None
    assert has_infinite_clique(C.catalog("NEQ_OMEGA")) is not None
    assert has_infinite_clique(two_class_co_equiv()) is None


def test_expand_clique_families():
    a = C.catalog("NEQ_OMEGA")
    c = has_infinite_clique(a)
    for n in range(1, 7):
        fam = expand_clique(c, n)
        assert len(fam) == n + 1
        assert len({w.canonical() for w in fam}) == n + 1
    assert validate_certificate(a, c, 5)


def test_sanity_mode_on_catalog():
    assert sanity_check(C.catalog("NOT_EE_OMEGA")) == []
    assert has_infinite_clique(C.catalog("NOT_EE_OMEGA"), sanity=True) is not None


# -- decision -------------------------------------------------------------------

def test_equality_not_recognizable():
    v = decide_omega_recognizable(C.catalog("EQ_OMEGA"))
    assert not v.recognizable and v.tape == 0
    assert validate_certificate(v.subject, v.certificate)


def test_product_relation_recognizable():
    assert decide_omega_recognizable(product_dpa()).recognizable


def test_equal_ends_not_recognizable():
    v = decide_omega_recognizable(C.catalog("EE_OMEGA_DPA"))
    assert not v.recognizable and validate_certificate(v.subject, v.certificate)


def test_first_tape_relations_recognizable():
    for seed in range(5):
        d = first_tape_dpa(random_dpa(3, seed, alphabet=AB))
        assert decide_omega_recognizable(d).recognizable


def test_nba_inputs():
    eq = Nba(PAIRS, ("s",), "s", {"s"}, {("s", c): ("s",) for c in PAIRS if c[0] == c[1]})
    v = decide_omega_recognizable(eq)
    assert not v.recognizable and validate_certificate(v.subject, v.certificate)
    inf_a = Nba(PAIRS, ("s", "f"), "s", {"f"},
                {(q, c): ("f",) if c[0] == "a" else ("s",) for q in "sf" for c in PAIRS})
    assert decide_omega_recognizable(inf_a).recognizable
