"""Büchi and parity automata: conversions, complementation, products and emptiness."""
from __future__ import annotations

from collections import deque
from itertools import product

from .automata import Dpa, Nba, UpWord, trim
from .errors import BudgetError


def complement_dpa(d: Dpa) -> Dpa:
    """Shift every priority by one, which swaps the parity of the minimum."""
    return Dpa(d.alphabet, d.states, d.initial, d.delta, {q: p + 1 for q, p in d.priority.items()})


def dpa_to_nba(d: Dpa) -> Nba:
    """Guess an even priority p and the point after which no priority below p occurs."""
    evens = sorted({p for p in d.priority.values() if p % 2 == 0})
    states = [("run", q) for q in d.states]
    finals = set()
    delta: dict = {}
    for p in evens:
        for q in d.states:
            if d.priority[q] >= p:
                states.append((p, q))
                if d.priority[q] == p:
                    finals.add((p, q))
    sset = set(states)
    for q in d.states:
        for c in d.alphabet:
            r = d.delta[(q, c)]
            out = [("run", r)] + [(p, r) for p in evens if (p, r) in sset]
            delta[(("run", q), c)] = tuple(out)
            for p in evens:
                if (p, q) in sset and (p, r) in sset:
                    delta[((p, q), c)] = ((p, r),)
    return Nba(d.alphabet, states, ("run", d.initial), finals, delta)


def complement_nba(b: Nba, rank_cap: int | None = None, max_states: int = 20000) -> Nba:
    """Rank-based complementation (level rankings with an obligation set).

    States are pairs (ranking, obligations).  Ranks range over ``0..rank_cap`` with
    ``rank_cap = 2n`` by default, which suffices for an n-state automaton (a larger cap
    never makes the result wrong, only bigger).
    """
    n = len(b.states)
    top = 2 * n if rank_cap is None else rank_cap
    order = {q: i for i, q in enumerate(b.states)}
    init_rank = top if top % 2 == 0 or b.initial not in b.finals else top - 1
    init = ((( b.initial, init_rank),), frozenset())
    states = [init]
    seen = {init}
    delta: dict = {}
    finals = {init} if not init[1] else set()
    todo = deque([init])
    while todo:
        node = todo.popleft()
        f, obl = node
        for c in b.alphabet:
            bound: dict = {}
            for q, rk in f:
                for r in b.post(q, c):
                    bound[r] = min(bound.get(r, rk), rk)
            targets = sorted(bound, key=order.get)
            choices = []
            for r in targets:
                opts = [x for x in range(bound[r] + 1) if x % 2 == 0 or r not in b.finals]
                choices.append(opts)
            succs = []
            for ranks in product(*choices):
                g = tuple(zip(targets, ranks))
                gmap = dict(g)
                if obl:
                    nxt_obl = {r for q in obl for r in b.post(q, c) if gmap[r] % 2 == 0}
                else:
                    nxt_obl = {r for r, x in g if x % 2 == 0}
                m = (g, frozenset(nxt_obl))
                succs.append(m)
                if m not in seen:
                    if len(seen) >= max_states:
                        raise BudgetError(
                            f"rank-based complement exceeds {max_states} states",
                            cap=max_states, needed=None, stage="complement_nba")
                    seen.add(m)
                    states.append(m)
                    if not m[1]:
                        finals.add(m)
                    todo.append(m)
            delta[(node, c)] = tuple(succs)
    return Nba(b.alphabet, states, init, finals, delta)


def product_nba(b1: Nba, b2: Nba) -> Nba:
    """Intersection with a flag that waits for a final state of each operand in turn."""
    if tuple(b1.alphabet) != tuple(b2.alphabet):
        alph = tuple(c for c in b1.alphabet if c in set(b2.alphabet))
    else:
        alph = b1.alphabet
    init = (b1.initial, b2.initial, 0)
    states, seen, delta, finals = [init], {init}, {}, set()
    todo = deque([init])
    while todo:
        node = todo.popleft()
        p, q, flag = node
        if flag == 0 and p in b1.finals:
            nflag = 1
        elif flag == 1 and q in b2.finals:
            nflag = 0
        else:
            nflag = flag
        if flag == 1 and q in b2.finals:
            finals.add(node)
        for c in alph:
            out = []
            for p2 in b1.post(p, c):
                for q2 in b2.post(q, c):
                    m = (p2, q2, nflag)
                    out.append(m)
                    if m not in seen:
                        seen.add(m)
                        states.append(m)
                        todo.append(m)
            if out:
                delta[(node, c)] = tuple(out)
    return Nba(alph, states, init, finals, delta)


def union_nba(parts: list[Nba]) -> Nba:
    """Disjoint union with a fresh initial state copying the initial moves."""
    alph = tuple(dict.fromkeys(c for b in parts for c in b.alphabet))
    init = ("init",)
    states, delta, finals = [init], {}, set()
    for i, b in enumerate(parts):
        for q in b.states:
            states.append((i, q))
        finals |= {(i, q) for q in b.finals}
        for (q, c), rs in b.delta.items():
            delta[((i, q), c)] = tuple((i, r) for r in rs)
        for c in b.alphabet:
            rs = [(i, r) for r in b.post(b.initial, c)]
            if rs:
                delta[(init, c)] = delta.get((init, c), ()) + tuple(rs)
    # the initial state itself may be accepting only through a loop; it is never revisited
    return Nba(alph, states, init, finals, delta)


def is_empty(b: Nba) -> bool:
    return not trim(b).finals


def accepted_lasso(b: Nba) -> UpWord | None:
    """Some accepted ultimately periodic word, or ``None`` for an empty language."""
    t = trim(b)
    if not t.finals:
        return None
    # shortest path to a final state lying on a cycle, then the shortest cycle through it
    par = {t.initial: None}
    todo = deque([t.initial])
    while todo:
        q = todo.popleft()
        for (src, c), rs in t.delta.items():
            if src != q:
                continue
            for r in rs:
                if r not in par:
                    par[r] = (q, c)
                    todo.append(r)
    for f in t.states:
        if f not in t.finals or f not in par:
            continue
        cyc = _cycle_word(t, f)
        if cyc is None:
            continue
        pre = []
        x = f
        while par[x] is not None:
            x, c = par[x]
            pre.append(c)
        return UpWord(tuple(reversed(pre)), cyc)
    return None


def _cycle_word(b: Nba, f) -> tuple | None:
    par: dict = {}
    todo = deque()
    for (q, c), rs in b.delta.items():
        if q == f:
            for r in rs:
                if r not in par:
                    par[r] = (f, c)
                    todo.append(r)
    while todo:
        q = todo.popleft()
        if q == f:
            break
        for (src, c), rs in b.delta.items():
            if src != q:
                continue
            for r in rs:
                if r not in par:
                    par[r] = (q, c)
                    todo.append(r)
    if f not in par:
        return None
    word = []
    x = f
    while True:
        x, c = par[x]
        word.append(c)
        if x == f:
            break
    return tuple(reversed(word))


__all__ = [
    "complement_dpa", "dpa_to_nba", "complement_nba", "product_nba", "union_nba",
    "is_empty", "accepted_lasso",
]
