"""Reference semantics: membership, enumeration, bounded equivalence and index probes."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from math import comb, lcm
from typing import Iterator, Sequence

from .automata import (END, PAD, DetKTapeAutomaton, Dfa, Dpa, IndependentKTape,
                       KTapeAutomaton, Nba, UpWord, as_tuple, as_word, run_plain, with_end)
from .errors import ArityError, BudgetError, RelkitError

ENUM_CAP = 200_000


def _arity(a) -> int:
    if isinstance(a, (DetKTapeAutomaton, KTapeAutomaton)):
        return a.k
    if isinstance(a, IndependentKTape):
        return a.k
    if isinstance(a, Dfa):
        return 1
    raise TypeError(f"not a finite-word relation automaton: {type(a).__name__}")


def _check_arity(a, u) -> tuple:
    u = as_tuple(u)
    if len(u) != _arity(a):
        raise ArityError(f"expected {_arity(a)} components, got {len(u)}")
    return u


def member_det(a: DetKTapeAutomaton, u: Sequence) -> bool:
    u = _check_arity(a, u)
    if a.endmarked:
        u = tuple(w + (END,) for w in u)
    return run_plain(a, u) in a.finals


def member_nondet(a: KTapeAutomaton, u: Sequence) -> bool:
    """Breadth-first search over configurations (state, position vector)."""
    u = _check_arity(a, u)
    by_src: dict = {}
    for s, ws, d in a.transitions:
        by_src.setdefault(s, []).append((ws, d))
    start = (a.initial, (0,) * a.k)
    goal = tuple(len(w) for w in u)
    seen = {start}
    todo = deque([start])
    while todo:
        q, pos = todo.popleft()
        if pos == goal and q in a.finals:
            return True
        for ws, d in by_src.get(q, ()):
            npos = []
            for t, w in enumerate(ws):
                p = pos[t]
                if u[t][p:p + len(w)] != w:
                    break
                npos.append(p + len(w))
            else:
                nxt = (d, tuple(npos))
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
    return False


def member(a, u) -> bool:
    """Membership of a tuple in the relation of any finite-word automaton."""
    if isinstance(a, DetKTapeAutomaton):
        return member_det(a, u)
    if isinstance(a, KTapeAutomaton):
        return member_nondet(a, u)
    if isinstance(a, IndependentKTape):
        return a.member(u)
    if isinstance(a, Dfa):
        (w,) = _check_arity(a, u)
        return a.accepts(w)
    raise TypeError(f"not a finite-word relation automaton: {type(a).__name__}")


# ---------------------------------------------------------------------------
# convolution

def convolve(u: Sequence) -> tuple:
    """Letter-by-letter convolution, shorter components padded with ``PAD``."""
    u = as_tuple(u)
    n = max((len(w) for w in u), default=0)
    return tuple(tuple(w[i] if i < len(w) else PAD for w in u) for i in range(n))


def deconvolve(word: Sequence, k: int | None = None) -> tuple:
    """Inverse of :func:`convolve`; rejects letters of the wrong arity and bad padding."""
    word = tuple(word)
    if k is None:
        if not word:
            raise RelkitError("cannot infer the arity of an empty convolution")
        k = len(word[0])
    comps: list[list] = [[] for _ in range(k)]
    ended = [False] * k
    for i, letter in enumerate(word):
        if not isinstance(letter, tuple) or len(letter) != k:
            raise RelkitError(f"position {i}: letter {letter!r} is not a {k}-tuple")
        if all(c == PAD for c in letter):
            raise RelkitError(f"position {i}: all components are padding")
        for t, c in enumerate(letter):
            if c == PAD:
                ended[t] = True
            elif ended[t]:
                raise RelkitError(f"position {i}: component {t + 1} resumes after padding")
            else:
                comps[t].append(c)
    return tuple(tuple(w) for w in comps)


# ---------------------------------------------------------------------------
# enumeration

def length_vectors(k: int, s: int) -> Iterator[tuple]:
    """Compositions of ``s`` into ``k`` parts in lexicographic order."""
    if k == 1:
        yield (s,)
        return
    for first in range(s + 1):
        for rest in length_vectors(k - 1, s - first):
            yield (first,) + rest


class TupleEnumerator:
    """All k-tuples over an alphabet ordered by total length, then length vector
    (lexicographic), then the letters tape by tape (lexicographic)."""

    def __init__(self, k: int, alphabet: Sequence):
        self.k = k
        self.alphabet = tuple(alphabet)

    def level(self, s: int) -> Iterator[tuple]:
        for vec in length_vectors(self.k, s):
            for flat in itertools.product(self.alphabet, repeat=s):
                out, i = [], 0
                for n in vec:
                    out.append(tuple(flat[i:i + n]))
                    i += n
                yield tuple(out)

    def __iter__(self) -> Iterator[tuple]:
        s = 0
        while True:
            yield from self.level(s)
            s += 1

    def up_to(self, bound: int) -> Iterator[tuple]:
        for s in range(bound + 1):
            yield from self.level(s)

    def count(self, bound: int) -> int:
        m = len(self.alphabet)
        return sum(comb(s + self.k - 1, self.k - 1) * m ** s for s in range(bound + 1))


def _user_alphabet(a) -> tuple:
    if isinstance(a, IndependentKTape):
        seen: dict = {}
        for d in a.components:
            for c in d.alphabet:
                seen.setdefault(c, None)
        return tuple(seen)
    return tuple(a.alphabet)


def enumerate_relation(a, bound: int, cap: int = ENUM_CAP) -> list[tuple]:
    """Members of total length at most ``bound`` in enumeration order."""
    en = TupleEnumerator(_arity(a), _user_alphabet(a))
    need = en.count(bound)
    if need > cap:
        raise BudgetError(f"enumeration up to length {bound} visits {need} tuples",
                          cap=cap, needed=need, stage="enumerate")
    return [u for u in en.up_to(bound) if member(a, u)]


# ---------------------------------------------------------------------------
# bounded equivalence

@dataclass(frozen=True)
class EquivResult:
    equal: bool
    counterexample: tuple | None
    bound: int
    complete: bool
    engine: str

    def __bool__(self) -> bool:
        return self.equal


def _concrete_size(a) -> int:
    if isinstance(a, DetKTapeAutomaton):
        return len(with_end(a).states) + a.k  # one implicit sink per tape owner
    if isinstance(a, KTapeAutomaton):
        return len(a.states)
    if isinstance(a, IndependentKTape):
        n = 1
        for d in a.components:
            n *= len(d.states)
        return n
    if isinstance(a, Dfa):
        return len(a.states)
    raise TypeError(type(a).__name__)


AUTO_ENUM = 4096


def complete_bound(a, b) -> int:
    """Length up to which agreement of two deterministic automata implies equality."""
    return _concrete_size(a) + _concrete_size(b) - 1


def bounded_equiv(a, b, bound: int | None = None, engine: str = "auto",
                  cap: int = ENUM_CAP, seed: int = 0) -> EquivResult:
    """Compare two relations on all tuples of total length at most ``bound``.

    Without ``bound`` the complete bound for deterministic automata is used and a positive
    answer means equality.  ``engine`` is ``"enumerate"`` (explicit tuples), ``"series"``
    (randomised identity test, deterministic automata only) or ``"auto"``.  The returned
    counterexample is the first differing tuple in enumeration order.
    """
    k = _arity(a)
    if _arity(b) != k:
        raise ArityError(f"arity mismatch: {k} vs {_arity(b)}")
    complete = bound is None
    if complete:
        if not all(isinstance(x, DetKTapeAutomaton) for x in (a, b)):
            raise RelkitError("a complete bound is only known for deterministic automata")
        bound = complete_bound(a, b)
    alph = tuple(dict.fromkeys(_user_alphabet(a) + _user_alphabet(b)))
    en = TupleEnumerator(k, alph)
    need = en.count(bound)
    det = all(isinstance(x, DetKTapeAutomaton) for x in (a, b))
    if engine == "auto":
        # exhaustive enumeration only while it is cheap; the series test scales far better
        engine = "enumerate" if (need <= AUTO_ENUM and need <= cap) or not det else "series"
    if engine == "enumerate":
        if need > cap:
            raise BudgetError(f"enumeration up to length {bound} visits {need} tuples",
                              cap=cap, needed=bound, stage="bounded_equiv")
        for u in en.up_to(bound):
            if member(a, u) != member(b, u):
                return EquivResult(False, u, bound, complete, "enumerate")
        return EquivResult(True, None, bound, complete, "enumerate")
    if engine != "series":
        raise ValueError(f"unknown engine {engine!r}")
    if not det:
        raise RelkitError("the series engine needs deterministic automata")
    from .series import find_difference

    pa, pb = _plain_pair(a, b, alph)
    extra = k if a.endmarked else 0
    diff = find_difference(pa, pb, bound + extra, seed=seed)
    if diff is None:
        return EquivResult(True, None, bound, complete, "series")
    if a.endmarked:
        diff = tuple(w[:-1] for w in diff)
    return EquivResult(False, diff, bound, complete, "series")


def _plain_pair(a: DetKTapeAutomaton, b: DetKTapeAutomaton, alph: tuple):
    if a.endmarked != b.endmarked:
        raise RelkitError("cannot compare endmarked and plain automata")
    pa, pb = with_end(a), with_end(b)
    letters = alph + ((END,) if a.endmarked else ())
    letters = tuple(dict.fromkeys(letters + pa.alphabet + pb.alphabet))
    return (_with_alphabet(pa, letters), _with_alphabet(pb, letters))


def _with_alphabet(a: DetKTapeAutomaton, letters: tuple) -> DetKTapeAutomaton:
    return DetKTapeAutomaton(a.k, letters, a.states, a.owner, a.initial, a.finals, a.delta,
                             a.endmarked)


# ---------------------------------------------------------------------------
# index probe

def index_probe(a, j: int, bound: int, cap: int = ENUM_CAP) -> int:
    """Distinct rows of the membership matrix words-on-tape-``j`` x contexts.

    Rows are indexed by words ``x`` with ``|x| <= bound``; columns by tuples ``z`` over the
    other tapes with total length at most ``bound``.  The value lower-bounds the index of
    the equivalence that identifies words with the same residual.
    """
    k = _arity(a)
    if not 0 <= j < k:
        raise ArityError(f"tape {j + 1} out of range for arity {k}")
    alph = _user_alphabet(a)
    rows = list(TupleEnumerator(1, alph).up_to(bound))
    cols = list(TupleEnumerator(k - 1, alph).up_to(bound)) if k > 1 else [()]
    if len(rows) * len(cols) > cap:
        raise BudgetError("index probe matrix too large", cap=cap,
                          needed=len(rows) * len(cols), stage="index_probe")
    seen = set()
    for (x,) in rows:
        row = tuple(member(a, z[:j] + (x,) + z[j:]) for z in cols)
        seen.add(row)
    return len(seen)


# ---------------------------------------------------------------------------
# omega membership

def lasso_letters(w) -> tuple[tuple, tuple]:
    """Prefix and period (as letter sequences) of an ultimately periodic word or tuple.

    A tuple of :class:`UpWord` is aligned to a common prefix length and period so that its
    letters are tuples of component letters.
    """
    if isinstance(w, UpWord):
        return w.prefix, w.period
    ws = tuple(w)
    if not ws or not all(isinstance(x, UpWord) for x in ws):
        raise TypeError("expected an UpWord or a tuple of UpWords")
    p = max(len(x.prefix) for x in ws)
    per = 1
    for x in ws:
        per = lcm(per, len(x.period))
    pre = tuple(tuple(x.letter(i) for x in ws) for i in range(p))
    cyc = tuple(tuple(x.letter(i) for x in ws) for i in range(p, p + per))
    return pre, cyc


def member_upword(b, w) -> bool:
    """Acceptance of an ultimately periodic word (or aligned tuple) by an NBA or a DPA."""
    pre, per = lasso_letters(w)
    if isinstance(b, Dpa):
        q = b.initial
        for c in pre:
            q = b.delta[(q, c)]
        seen: dict = {}
        trace = []
        while q not in seen:
            seen[q] = len(trace)
            for c in per:
                q = b.delta[(q, c)]
                trace.append(q)
        loop = trace[seen[q]:]
        return min(b.priority[s] for s in loop) % 2 == 0
    if not isinstance(b, Nba):
        raise TypeError(f"not an omega-automaton: {type(b).__name__}")
    seq = pre + per
    m, start = len(seq), len(pre)

    def nxt(i):
        return i + 1 if i + 1 < m else start

    succ: dict = {}
    init = (b.initial, 0)
    seen = {init}
    todo = deque([init])
    while todo:
        node = todo.popleft()
        q, i = node
        out = [(r, nxt(i)) for r in b.post(q, seq[i])]
        succ[node] = out
        for x in out:
            if x not in seen:
                seen.add(x)
                todo.append(x)
    # an accepting node of the periodic part that lies on a cycle
    for node in seen:
        q, i = node
        if i < start or q not in b.finals:
            continue
        back = {node}
        stack = [node]
        found = False
        while stack and not found:
            x = stack.pop()
            for y in succ[x]:
                if y == node:
                    found = True
                    break
                if y not in back:
                    back.add(y)
                    stack.append(y)
        if found:
            return True
    return False


__all__ = [
    "member_det", "member_nondet", "member", "convolve", "deconvolve", "TupleEnumerator",
    "length_vectors", "enumerate_relation", "EquivResult", "bounded_equiv", "complete_bound",
    "index_probe", "member_upword", "lasso_letters",
]
