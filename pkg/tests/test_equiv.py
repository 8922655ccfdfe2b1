import itertools
import random

import pytest

from relkit import catalog as C
from relkit.equiv import (Partition, approx_equiv, coarsest_refinement, generated_partition,
                          odot, project, residual_fixed, residual_prefix,
                          right_congruence_equiv)
from relkit.errors import ArityError
from relkit.generate import random_det, random_tuple
from relkit.oracles import bounded_equiv, index_probe, member_det

from helpers import AB, tuples_upto, words


def random_partition(k, rnd):
    labels = [rnd.randrange(k) for _ in range(k)]
    blocks = {}
    for i, l in enumerate(labels):
        blocks.setdefault(l, []).append(i)
    return Partition(k, tuple(tuple(b) for b in blocks.values()))


def test_odot_examples():
    assert odot([0], ("a",), ("b", "c")) == (("a",), ("b",), ("c",))
    assert odot([1], ("x",), ("y", "z")) == (("y",), ("x",), ("z",))
    with pytest.raises(ArityError):
        odot([0, 1], ("a",), ("b",))


def test_odot_projections():
    rnd = random.Random(0)
    for _ in range(100):
        k = rnd.randint(2, 4)
        idx = sorted(rnd.sample(range(k), rnd.randint(1, k - 1)))
        u = random_tuple(len(idx), 3, rnd)
        v = random_tuple(k - len(idx), 3, rnd)
        w = odot(idx, u, v)
        assert project(idx, w) == u
        assert project([i for i in range(k) if i not in idx], w) == v


def test_partition_meets():
    p1 = Partition(3, ((0, 1), (2,)))
    p2 = Partition(3, ((0,), (1, 2)))
    assert coarsest_refinement(p1, p2) == Partition.discrete(3)
    assert generated_partition([[0], [0, 1]], 3) == Partition.discrete(3)
    rnd = random.Random(1)
    for _ in range(50):
        p = random_partition(rnd.randint(1, 5), rnd)
        assert coarsest_refinement(p, p) == p
        assert p.refines(Partition.single(p.k))


def test_partition_canonical_order():
    p = Partition(4, ((3, 1), (2,), (0,)))
    assert p.blocks == ((0,), (1, 3), (2,))
    assert str(p) == "{{1}, {2,4}, {3}}"


def test_residual_fixed_subseq_examples():
    a = C.catalog("SUBSEQ")
    r = residual_fixed(a, 0, ())
    assert all(member_det(r, (y,)) for y in words(AB, 4))
    r = residual_fixed(a, 0, "ab")
    assert member_det(r, ("aabb",)) and not member_det(r, ("ba",))
    for y in words(AB, 4):
        assert member_det(r, (y,)) == member_det(a, (("a", "b"), y))


def test_residual_fixed_random_500():
    rnd = random.Random(2)
    cases = 0
    for seed in range(50):
        k = 2 if seed % 3 else 3
        a = random_det(k, 4, seed)
        j = rnd.randrange(k)
        for _ in range(10):
            u = random_tuple(1, 4, rnd)[0]
            r = residual_fixed(a, j, u)
            z = random_tuple(k - 1, 3, rnd)
            assert member_det(r, z) == member_det(a, odot([j], (u,), z))
            cases += 1
    assert cases >= 500


def test_residual_prefix_random_500():
    rnd = random.Random(3)
    cases = 0
    for seed in range(50):
        k = 2 if seed % 3 else 3
        a = random_det(k, 4, seed)
        j = rnd.randrange(k)
        for _ in range(10):
            u = random_tuple(1, 3, rnd)[0]
            r = residual_prefix(a, j, u)
            w = random_tuple(k, 3, rnd)
            full = w[:j] + (u + w[j],) + w[j + 1:]
            assert member_det(r, w) == member_det(a, full)
            cases += 1
    assert cases >= 500


def test_residual_prefix_identity_and_composition():
    rnd = random.Random(4)
    for seed in range(15):
        a = random_det(2, 3, seed)
        assert bounded_equiv(residual_prefix(a, 0, ()), a).equal
        u, v = random_tuple(2, 2, rnd)
        left = residual_prefix(residual_prefix(a, 1, u), 1, v)
        assert bounded_equiv(left, residual_prefix(a, 1, u + v), 6).equal


def test_len2_classes():
    a = C.catalog("LEN2")
    assert approx_equiv(a, 0, "aa", "ab")
    assert not approx_equiv(a, 0, "a", "aa")
    assert approx_equiv(a, 0, "ab", "ab")
    assert right_congruence_equiv(a, 0, "b", "b")


def test_congruence_refines_and_is_right_invariant():
    rnd = random.Random(5)
    checked = 0
    for seed in range(40):
        a = random_det(2, 3, seed)
        for _ in range(5):
            u, v = (tuple(rnd.choice(AB) for _ in range(rnd.randint(0, 3))) for _ in range(2))
            if right_congruence_equiv(a, 0, u, v):
                checked += 1
                assert approx_equiv(a, 0, u, v)
                for c in AB:
                    assert right_congruence_equiv(a, 0, u + (c,), v + (c,))
                for z in words(AB, 2):
                    for t in words(AB, 4):
                        assert member_det(a, (u + z, t)) == member_det(a, (v + z, t))
    assert checked > 20


def test_equivalences_are_equivalences():
    ws = words(AB, 2)
    for seed in range(4):
        a = random_det(2, 3, seed)
        for rel in (approx_equiv, right_congruence_equiv):
            m = {(u, v): rel(a, 0, u, v) for u in ws for v in ws}
            for u in ws:
                assert m[(u, u)]
            for u, v in itertools.product(ws, ws):
                assert m[(u, v)] == m[(v, u)]
            for u, v, w in itertools.product(ws, ws, ws):
                if m[(u, v)] and m[(v, w)]:
                    assert m[(u, w)]


def test_probe_below_class_count():
    ws = words(AB, 2)
    for seed in range(6):
        a = random_det(2, 3, seed)
        reps = []
        for u in ws:
            if not any(approx_equiv(a, 0, u, r) for r in reps):
                reps.append(u)
        assert index_probe(a, 0, 2) <= len(reps)


def test_residual_tuple_spaces():
    a = random_det(3, 4, 9)
    r = residual_fixed(a, 1, "ab")
    assert r.k == 2
    for z in tuples_upto(2, 3):
        assert member_det(r, z) == member_det(a, (z[0], ("a", "b"), z[1]))
