"""Partitions of tape indices, recombination of tuples and the residual equivalences."""
from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .automata import END, DetKTapeAutomaton, as_tuple, as_word
from .errors import ArityError, RelkitError
from .oracles import bounded_equiv


@dataclass(frozen=True)
class Partition:
    """Partition of the tape indices ``0..k-1`` in canonical order."""

    k: int
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks if b), key=lambda b: b[0]))
        seen = [x for b in blocks for x in b]
        if sorted(seen) != list(range(self.k)):
            raise RelkitError(f"blocks {blocks} do not partition 0..{self.k - 1}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def discrete(cls, k: int) -> "Partition":
        return cls(k, tuple((i,) for i in range(k)))

    @classmethod
    def single(cls, k: int) -> "Partition":
        return cls(k, (tuple(range(k)),))

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, i: int) -> int:
        for n, b in enumerate(self.blocks):
            if i in b:
                return n
        raise ArityError(f"index {i} outside 0..{self.k - 1}")

    def refines(self, other: "Partition") -> bool:
        """Every block of ``self`` lies inside a block of ``other``."""
        return all(len({other.block_of(i) for i in b}) == 1 for b in self.blocks)

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(str(i + 1) for i in b) + "}" for b in self.blocks) + "}"


def coarsest_refinement(p1: Partition, p2: Partition) -> Partition:
    if p1.k != p2.k:
        raise ArityError(f"partitions of {p1.k} and {p2.k} indices")
    blocks = [tuple(sorted(set(a) & set(b))) for a in p1.blocks for b in p2.blocks]
    return Partition(p1.k, tuple(b for b in blocks if b))


def generated_partition(sets: Iterable[Iterable[int]], k: int) -> Partition:
    """Coarsest partition in which every given set is a union of blocks."""
    p = Partition.single(k)
    for s in sets:
        s = set(s)
        rest = set(range(k)) - s
        p = coarsest_refinement(p, Partition(k, tuple(b for b in (tuple(s), tuple(rest)) if b)))
    return p


def odot(index: Iterable[int], u: Sequence, v: Sequence) -> tuple:
    """The tuple whose projection to ``index`` is ``u`` and to the other tapes is ``v``."""
    idx = sorted(set(index))
    u, v = as_tuple(u), as_tuple(v)
    if len(idx) != len(u):
        raise ArityError(f"index set of size {len(idx)} but {len(u)} words")
    k = len(u) + len(v)
    if idx and idx[-1] >= k:
        raise ArityError(f"index {idx[-1]} outside 0..{k - 1}")
    iu, iv = iter(u), iter(v)
    s = set(idx)
    return tuple(next(iu) if t in s else next(iv) for t in range(k))


def project(index: Iterable[int], u: Sequence) -> tuple:
    s = set(index)
    return tuple(w for t, w in enumerate(as_tuple(u)) if t in s)


# ---------------------------------------------------------------------------
# residual automata

def _residual(a: DetKTapeAutomaton, j: int, u: tuple, fixed: bool) -> DetKTapeAutomaton:
    if not a.endmarked:
        raise RelkitError("residuals are defined for endmarked automata")
    if not 0 <= j < a.k:
        raise ArityError(f"tape {j + 1} out of range for arity {a.k}")
    word = u + (END,) if fixed else u
    n = len(word)

    def settle(q, i):
        # follow the forced chain on tape j; None means the rejecting sink
        while q is not None and a.owner[q] == j and i < n:
            q = a.delta.get((q, word[i]))
            i += 1
        if q is None:
            return None
        if fixed and a.owner[q] == j:
            # u.END exhausted while tape j is still demanded: the run stops here
            return ("stop", q)
        return (q, i)

    k2 = a.k - 1 if fixed else a.k
    if k2 < 1:
        raise ArityError("fixing the only tape leaves no tapes")

    def tape_of(t):
        return t - (t > j) if fixed else t

    init = settle(a.initial, 0)
    owner, delta, finals, states = {}, {}, set(), []
    if init is None:
        init = ("sink",)
    todo = deque([init])
    seen = {init}
    while todo:
        node = todo.popleft()
        states.append(node)
        if node == ("sink",):
            owner[node] = 0
            continue
        if node[0] == "stop":
            q = node[1]
            # tape j is exhausted, so the run ends here once the other tapes end too
            owner[node] = 0
            if q in a.finals:
                finals.add(node)
            continue
        q, i = node
        owner[node] = tape_of(a.owner[q])
        if q in a.finals and i == n:
            finals.add(node)
        for c in a.letters:
            r = a.delta.get((q, c))
            if r is None:
                continue
            nxt = settle(r, i)
            if nxt is None:
                continue
            delta[(node, c)] = nxt
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return DetKTapeAutomaton(k2, a.alphabet, states, owner, init, finals, delta, True)


def residual_fixed(a: DetKTapeAutomaton, j: int, u) -> DetKTapeAutomaton:
    """(k-1)-tape automaton for ``{z : u (on tape j) odot z in R(a)}``.

    States are pairs (q, i) with i a position in ``u END``; moves of tape j are forced and
    compressed away.
    """
    return _residual(a, j, as_word(u), True)


def residual_prefix(a: DetKTapeAutomaton, j: int, u) -> DetKTapeAutomaton:
    """k-tape automaton for ``{w : w with u prepended on tape j in R(a)}``."""
    return _residual(a, j, as_word(u), False)


def approx_equiv(a: DetKTapeAutomaton, j: int, u, v, **kw) -> bool:
    """Whether u and v have the same residual on tape j (every context agrees)."""
    return bounded_equiv(residual_fixed(a, j, u), residual_fixed(a, j, v), **kw).equal


def right_congruence_equiv(a: DetKTapeAutomaton, j: int, u, v, **kw) -> bool:
    """Whether uz and vz have the same residual on tape j for every word z."""
    return bounded_equiv(residual_prefix(a, j, u), residual_prefix(a, j, v), **kw).equal


__all__ = [
    "Partition", "coarsest_refinement", "generated_partition", "odot", "project",
    "residual_fixed", "residual_prefix", "approx_equiv", "right_congruence_equiv",
]
