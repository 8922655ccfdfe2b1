"""Automaton value types, well-formedness checks and structural helpers.

Conventions used throughout the package:

* a word is a tuple of letters; ``str`` inputs are split into characters;
* tapes are numbered from 0 internally (the text format and the CLI show them from 1);
* states and letters are arbitrary hashable values.  User-facing letters are strings,
  internal encodings are free to use tuples as letters.

A :class:`DetKTapeAutomaton` has *endmarker semantics* by default: the library appends
``END`` to every tape before running it.  Setting ``endmarked=False`` gives the plain
semantics, in which ``END`` (if present) is an ordinary letter.  :func:`with_end` turns the
former into the latter.
"""
from __future__ import annotations

from collections import deque
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Union

PAD = "⊥"
END = "⊣"
START = "⊢"
RESERVED = frozenset({PAD, END, START, "#", "$", "⋄"})

State = Hashable
Letter = Hashable
Word = tuple


def as_word(w: Any) -> Word:
    if isinstance(w, tuple):
        return w
    return tuple(w)


def as_tuple(u: Iterable) -> tuple[Word, ...]:
    return tuple(as_word(w) for w in u)


def _frozen_map(m: Mapping) -> Mapping:
    return MappingProxyType(dict(m))


@dataclass(frozen=True)
class Dfa:
    """Complete DFA; ``finals`` may be empty for components of an independent automaton."""

    alphabet: tuple
    states: tuple
    initial: State
    delta: Mapping
    finals: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "delta", _frozen_map(self.delta))
        object.__setattr__(self, "finals", frozenset(self.finals))

    def run(self, word: Iterable, start: State | None = None) -> State | None:
        q = self.initial if start is None else start
        for c in word:
            q = self.delta.get((q, c))
            if q is None:
                return None
        return q

    def accepts(self, word: Iterable) -> bool:
        return self.run(word) in self.finals


@dataclass(frozen=True)
class DetKTapeAutomaton:
    """Deterministic k-tape automaton with tape ownership.

    ``owner[q]`` is the tape read in state ``q``.  ``delta`` maps ``(q, letter)`` to the
    next state; letters range over the alphabet plus ``END`` when ``endmarked``.  Missing
    entries lead to an implicit rejecting sink.
    """

    k: int
    alphabet: tuple
    states: tuple
    owner: Mapping
    initial: State
    finals: frozenset
    delta: Mapping
    endmarked: bool = True

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "owner", _frozen_map(self.owner))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "delta", _frozen_map(self.delta))

    @property
    def letters(self) -> tuple:
        """Letters a transition may carry."""
        return self.alphabet + (END,) if self.endmarked else self.alphabet

    def step(self, q: State, c: Letter) -> State | None:
        return self.delta.get((q, c))

    def successors(self, q: State):
        for c in self.letters:
            r = self.delta.get((q, c))
            if r is not None:
                yield c, r

    def rooted(self, q: State) -> "DetKTapeAutomaton":
        """Same automaton with initial state ``q`` (recognizes R_q)."""
        return DetKTapeAutomaton(self.k, self.alphabet, self.states, self.owner, q,
                                 self.finals, self.delta, self.endmarked)


@dataclass(frozen=True)
class KTapeAutomaton:
    """Nondeterministic k-tape automaton with word-labelled transitions."""

    k: int
    alphabet: tuple
    states: tuple
    initial: State
    finals: frozenset
    transitions: tuple  # of (src, (w_1, ..., w_k), dst)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "transitions",
                           tuple((s, as_tuple(ws), d) for s, ws, d in self.transitions))


@dataclass(frozen=True)
class IndependentKTape:
    """Tuple of complete component DFAs and a set of accepting state tuples."""

    components: tuple
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "finals", frozenset(tuple(f) for f in self.finals))

    @property
    def k(self) -> int:
        return len(self.components)

    def member(self, u: Sequence) -> bool:
        u = as_tuple(u)
        if len(u) != self.k:
            from .errors import ArityError
            raise ArityError(f"expected {self.k} components, got {len(u)}")
        return tuple(d.run(w) for d, w in zip(self.components, u)) in self.finals


@dataclass(frozen=True)
class Nba:
    """Nondeterministic Büchi automaton; ``delta[(q, letter)]`` is a tuple of targets."""

    alphabet: tuple
    states: tuple
    initial: State
    finals: frozenset
    delta: Mapping

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "delta",
                           _frozen_map({key: tuple(v) for key, v in self.delta.items() if v}))

    def post(self, q: State, c: Letter) -> tuple:
        return self.delta.get((q, c), ())


@dataclass(frozen=True)
class Dpa:
    """Deterministic parity automaton, min-even acceptance."""

    alphabet: tuple
    states: tuple
    initial: State
    delta: Mapping
    priority: Mapping

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "delta", _frozen_map(self.delta))
        object.__setattr__(self, "priority", _frozen_map(self.priority))


@dataclass(frozen=True)
class UpWord:
    """Ultimately periodic word ``prefix . period^omega``."""

    prefix: tuple
    period: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", as_word(self.prefix))
        object.__setattr__(self, "period", as_word(self.period))
        if not self.period:
            raise ValueError("period of an ultimately periodic word must be nonempty")

    def letter(self, i: int) -> Letter:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def canonical(self) -> "UpWord":
        """Shortest representation (primitive period, shortest prefix)."""
        per = self.period
        n = len(per)
        for d in range(1, n + 1):
            if n % d == 0 and per[:d] * (n // d) == per:
                per = per[:d]
                break
        pre = self.prefix
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        return UpWord(pre, per)

    def same_word(self, other: "UpWord") -> bool:
        return self.canonical() == other.canonical()

    def __str__(self) -> str:
        return f"{''.join(map(str, self.prefix))}({''.join(map(str, self.period))})^w"


Automaton = Union[Dfa, DetKTapeAutomaton, KTapeAutomaton, IndependentKTape, Nba, Dpa]


# ---------------------------------------------------------------------------
# validation

def _reserved_letters(alphabet: Iterable, allow_end: bool) -> list:
    bad = []
    for c in alphabet:
        parts = c if isinstance(c, tuple) else (c,)
        for p in parts:
            if isinstance(c, tuple) and p == PAD:
                continue  # padding inside convolution letters
            if isinstance(p, str) and p in RESERVED and not (allow_end and p == END):
                bad.append(c)
                break
    return bad


def _alphabet_violations(alphabet: tuple, allow_end: bool = False) -> list[str]:
    out = []
    if not alphabet:
        out.append("alphabet is empty")
    if len(set(alphabet)) != len(alphabet):
        out.append("alphabet has duplicate letters")
    for c in _reserved_letters(alphabet, allow_end):
        out.append(f"reserved symbol {c!r} in alphabet")
    return out


def validate(a: Automaton) -> list[str]:
    """Return every invariant violation of ``a`` (an empty list means well-formed)."""
    if isinstance(a, Dfa):
        out = _alphabet_violations(a.alphabet)
        sts = set(a.states)
        if a.initial not in sts:
            out.append(f"initial state {a.initial!r} is not declared")
        for f in a.finals - sts:
            out.append(f"final state {f!r} is not declared")
        for q in a.states:
            for c in a.alphabet:
                r = a.delta.get((q, c))
                if r is None:
                    out.append(f"transition function not total: no move from {q!r} on {c!r}")
                elif r not in sts:
                    out.append(f"transition {q!r} -{c!r}-> {r!r} targets an undeclared state")
        return out
    if isinstance(a, DetKTapeAutomaton):
        out = _alphabet_violations(a.alphabet, allow_end=not a.endmarked)
        if a.k < 1:
            out.append("arity must be at least 1")
        sts = set(a.states)
        if len(sts) != len(a.states):
            out.append("duplicate state declaration")
        if a.initial not in sts:
            out.append(f"initial state {a.initial!r} is not declared")
        for f in a.finals - sts:
            out.append(f"final state {f!r} is not declared")
        if set(a.owner) != sts:
            out.append("state ownership not a partition: "
                       f"unowned {sorted(map(repr, sts - set(a.owner)))}, "
                       f"foreign {sorted(map(repr, set(a.owner) - sts))}")
        for q, t in a.owner.items():
            if not isinstance(t, int) or not 0 <= t < a.k:
                out.append(f"state {q!r} owned by invalid tape {t!r}")
        letters = set(a.letters)
        for (q, c), r in a.delta.items():
            if q not in sts or r not in sts:
                out.append(f"transition {q!r} -{c!r}-> {r!r} uses an undeclared state")
            if c not in letters:
                out.append(f"transition {q!r} -{c!r}-> {r!r} reads a letter outside the alphabet")
        return out
    if isinstance(a, KTapeAutomaton):
        out = _alphabet_violations(a.alphabet)
        sts = set(a.states)
        if a.initial not in sts:
            out.append(f"initial state {a.initial!r} is not declared")
        for f in a.finals - sts:
            out.append(f"final state {f!r} is not declared")
        alph = set(a.alphabet)
        for s, ws, d in a.transitions:
            if s not in sts or d not in sts:
                out.append(f"transition {s!r} {ws!r} {d!r} uses an undeclared state")
            if len(ws) != a.k:
                out.append(f"transition {s!r} {ws!r} {d!r} has {len(ws)} components, expected {a.k}")
            for w in ws:
                for c in w:
                    if c not in alph:
                        out.append(f"transition {s!r} {ws!r} {d!r} reads {c!r} outside the alphabet")
        return out
    if isinstance(a, IndependentKTape):
        out = []
        for i, d in enumerate(a.components):
            out += [f"component {i + 1}: {v}" for v in validate(d)]
        for f in a.finals:
            if len(f) != a.k:
                out.append(f"final tuple {f!r} has wrong length")
                continue
            for i, (q, d) in enumerate(zip(f, a.components)):
                if q not in d.states:
                    out.append(f"final tuple {f!r} names unknown state {q!r} of component {i + 1}")
        return out
    if isinstance(a, Nba):
        out = _alphabet_violations(a.alphabet)
        sts = set(a.states)
        if a.initial not in sts:
            out.append(f"initial state {a.initial!r} is not declared")
        for f in a.finals - sts:
            out.append(f"final state {f!r} is not declared")
        alph = set(a.alphabet)
        for (q, c), targets in a.delta.items():
            for r in targets:
                if q not in sts or r not in sts:
                    out.append(f"transition {q!r} -{c!r}-> {r!r} uses an undeclared state")
            if c not in alph:
                out.append(f"transition from {q!r} reads {c!r} outside the alphabet")
        return out
    if isinstance(a, Dpa):
        out = _alphabet_violations(a.alphabet)
        sts = set(a.states)
        if a.initial not in sts:
            out.append(f"initial state {a.initial!r} is not declared")
        for q in a.states:
            p = a.priority.get(q)
            if p is None:
                out.append(f"state {q!r} has no priority")
            elif not isinstance(p, int) or p < 0 or p > 2 * len(a.states):
                out.append(f"state {q!r} has priority {p!r} outside [0, {2 * len(a.states)}]")
            for c in a.alphabet:
                r = a.delta.get((q, c))
                if r is None:
                    out.append(f"transition function not total: no move from {q!r} on {c!r}")
                elif r not in sts:
                    out.append(f"transition {q!r} -{c!r}-> {r!r} targets an undeclared state")
        return out
    raise TypeError(f"not an automaton: {type(a).__name__}")


def is_valid(a: Automaton) -> bool:
    return not validate(a)


# ---------------------------------------------------------------------------
# graph helpers

def _reach(start: Iterable, succ) -> set:
    seen = set(start)
    todo = deque(seen)
    while todo:
        q = todo.popleft()
        for r in succ(q):
            if r not in seen:
                seen.add(r)
                todo.append(r)
    return seen


def _edges(a: Automaton) -> dict:
    """Successor sets of every state (ignoring labels)."""
    succ: dict = {q: set() for q in a.states}
    if isinstance(a, DetKTapeAutomaton) or isinstance(a, Dfa) or isinstance(a, Dpa):
        for (q, _), r in a.delta.items():
            succ[q].add(r)
    elif isinstance(a, KTapeAutomaton):
        for s, _, d in a.transitions:
            succ[s].add(d)
    elif isinstance(a, Nba):
        for (q, _), rs in a.delta.items():
            succ[q].update(rs)
    return succ


def reachable(a: Automaton) -> set:
    succ = _edges(a)
    return _reach([a.initial], succ.__getitem__)


def coreachable(a: Automaton, targets: Iterable) -> set:
    pred: dict = {q: set() for q in a.states}
    for q, rs in _edges(a).items():
        for r in rs:
            pred[r].add(q)
    return _reach(targets, pred.__getitem__)


def _nba_live(a: Nba) -> set:
    """States from which an accepting cycle is reachable."""
    import networkx as nx

    g = nx.DiGraph()
    g.add_nodes_from(a.states)
    for (q, _), rs in a.delta.items():
        for r in rs:
            g.add_edge(q, r)
    good = set()
    for comp in nx.strongly_connected_components(g):
        if not comp & a.finals:
            continue
        if len(comp) > 1 or any(g.has_edge(q, q) for q in comp):
            good |= comp
    return coreachable(a, good)


def trim(a: Automaton) -> Automaton:
    """Drop unreachable states and states that cannot contribute to acceptance.

    For Büchi automata "contribute" means reaching an accepting cycle; for finite-word
    automata it means reaching a final state.  The initial state is always kept.
    """
    if isinstance(a, Nba):
        live = reachable(a) & _nba_live(a)
        keep = set(live)
    elif isinstance(a, (DetKTapeAutomaton, KTapeAutomaton)):
        keep = reachable(a) & coreachable(a, a.finals)
    elif isinstance(a, (Dfa, Dpa)):
        return a  # complete automata keep their sinks
    else:
        raise TypeError(f"cannot trim {type(a).__name__}")
    keep.add(a.initial)
    states = tuple(q for q in a.states if q in keep)
    if isinstance(a, Nba):
        delta = {}
        for (q, c), rs in a.delta.items():
            if q in keep:
                rs2 = tuple(r for r in rs if r in keep)
                if rs2:
                    delta[(q, c)] = rs2
        # the initial state is kept even when dead; it must not stay final then
        return Nba(a.alphabet, states, a.initial, a.finals & live, delta)
    if isinstance(a, KTapeAutomaton):
        trans = tuple(t for t in a.transitions if t[0] in keep and t[2] in keep)
        return KTapeAutomaton(a.k, a.alphabet, states, a.initial, a.finals & keep, trans)
    delta = {(q, c): r for (q, c), r in a.delta.items() if q in keep and r in keep}
    owner = {q: a.owner[q] for q in states}
    return DetKTapeAutomaton(a.k, a.alphabet, states, owner, a.initial, a.finals & keep, delta,
                             a.endmarked)


# ---------------------------------------------------------------------------
# deterministic multitape helpers

def with_end(a: DetKTapeAutomaton) -> DetKTapeAutomaton:
    """Plain-semantics automaton over ``alphabet + (END,)`` recognizing R(a)·(END,...,END).

    States are pairs ``(q, closed)`` where ``closed`` is the bitmask of tapes whose
    endmarker has been read; only the reachable part is built.
    """
    if not a.endmarked:
        return a
    full = (1 << a.k) - 1
    init = (a.initial, 0)
    states = [init]
    seen = {init}
    owner, delta, finals = {}, {}, set()
    todo = deque([init])
    while todo:
        q, mask = node = todo.popleft()
        t = a.owner[q]
        owner[node] = t
        if mask == full and q in a.finals:
            finals.add(node)
        if mask >> t & 1:
            continue
        for c in a.letters:
            r = a.delta.get((q, c))
            if r is None:
                continue
            nxt = (r, mask | (1 << t)) if c == END else (r, mask)
            delta[(node, c)] = nxt
            if nxt not in seen:
                seen.add(nxt)
                states.append(nxt)
                todo.append(nxt)
    return DetKTapeAutomaton(a.k, a.alphabet + (END,), states, owner, init, finals, delta,
                             endmarked=False)


def run_plain(a: DetKTapeAutomaton, tapes: Sequence, start: State | None = None):
    """Follow the unique path on ``tapes`` (no endmarker added).

    Returns the state where the path stops if it consumed every tape, else ``None``.
    """
    q = a.initial if start is None else start
    pos = [0] * a.k
    delta, owner = a.delta, a.owner
    while True:
        t = owner[q]
        if pos[t] == len(tapes[t]):
            break
        q = delta.get((q, tapes[t][pos[t]]))
        if q is None:
            return None
        pos[t] += 1
    if any(p != len(w) for p, w in zip(pos, tapes)):
        return None
    return q


def path_end(a: DetKTapeAutomaton, tapes: Sequence, start: State) -> State | None:
    """Endpoint of the path from ``start`` consuming exactly ``tapes``, if any."""
    return run_plain(a, tapes, start)


def accepts_plain(a: DetKTapeAutomaton, tapes: Sequence, start: State | None = None) -> bool:
    return run_plain(a, tapes, start) in a.finals


def permute_tapes(a: DetKTapeAutomaton, order: Sequence[int]) -> DetKTapeAutomaton:
    """New automaton whose tape i is tape ``order[i]`` of ``a``."""
    inv = {old: new for new, old in enumerate(order)}
    owner = {q: inv[t] for q, t in a.owner.items()}
    return DetKTapeAutomaton(a.k, a.alphabet, a.states, owner, a.initial, a.finals, a.delta,
                             a.endmarked)


def tape_to_front(k: int, j: int) -> list[int]:
    return [j] + [i for i in range(k) if i != j]


def det_to_nondet(a: DetKTapeAutomaton) -> KTapeAutomaton:
    """Nondeterministic view: unit-word transitions plus endmarker chains.

    Endmarker moves become epsilon moves guarded by a per-tape "closed" mask, so the
    view recognizes exactly R(a) over the plain alphabet.
    """
    e = with_end(a) if a.endmarked else a
    trans = []
    for (q, c), r in e.delta.items():
        ws = [()] * a.k
        if c != END or not a.endmarked:
            ws[e.owner[q]] = (c,)
        trans.append((q, tuple(ws), r))
    return KTapeAutomaton(a.k, a.alphabet, e.states, e.initial, e.finals, tuple(trans))


def relabel(a: DetKTapeAutomaton, names: Mapping | None = None) -> DetKTapeAutomaton:
    """Rename states to short strings ``s0, s1, ...`` (or by ``names``)."""
    if names is None:
        names = {q: f"s{i}" for i, q in enumerate(a.states)}
    return DetKTapeAutomaton(
        a.k, a.alphabet, [names[q] for q in a.states], {names[q]: t for q, t in a.owner.items()},
        names[a.initial], {names[q] for q in a.finals},
        {(names[q], c): names[r] for (q, c), r in a.delta.items()}, a.endmarked)


def det_from_table(k: int, alphabet, owner: Mapping, initial, finals, delta: Mapping,
                   endmarked: bool = True, states=None) -> DetKTapeAutomaton:
    states = tuple(owner) if states is None else tuple(states)
    return DetKTapeAutomaton(k, tuple(alphabet), states, dict(owner), initial, frozenset(finals),
                             dict(delta), endmarked)


__all__ = [
    "PAD", "END", "START", "RESERVED", "as_word", "as_tuple", "Dfa", "DetKTapeAutomaton",
    "KTapeAutomaton", "IndependentKTape", "Nba", "Dpa", "UpWord", "validate", "is_valid",
    "trim", "reachable", "coreachable", "with_end", "run_plain", "accepts_plain",
    "permute_tapes", "tape_to_front", "det_to_nondet", "relabel", "det_from_table",
    "path_end",
]
