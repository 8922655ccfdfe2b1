"""Synchronicity of deterministic rational relations.

All constructions run on the plain view A = trim(with_end(a)), so component words carry their
endmarker ("inner" ⊣).  For a partition P = {B_1, .., B_t} of the tapes the summarized relation
packs the tapes of each block into one tape over convolution letters: tuples in
(Σ ∪ {⊣, ⊥})^|B| other than all-⊥ (singleton blocks use 1-tuples).  Summarized automata are
endmarked, with the plain END as their own ("outer") endmarker.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .automata import (END, PAD, DetKTapeAutomaton, Dfa, IndependentKTape, KTapeAutomaton,
                       permute_tapes, run_plain, tape_to_front, trim, with_end)
from .drat_rec import (RecVerdict, _complete, _decide_binary, _shortest_path, build_independent,
                       decide_recognizable)
from .equiv import Partition
from .errors import ArityError, BudgetError, RelkitError
from .oracles import convolve, deconvolve, member_det

HASH = "hash"
START_LETTER = "start"


def _plain(a: DetKTapeAutomaton) -> DetKTapeAutomaton:
    return trim(with_end(a)) if a.endmarked else trim(a)


# ---------------------------------------------------------------------------
# partitions

def _weights(a: DetKTapeAutomaton, i: int, j: int):
    for (q, _c), r in a.delta.items():
        t = a.owner[q]
        yield q, r, 1 if t == i else (-1 if t == j else 0)


def _conflict_edge(a: DetKTapeAutomaton, comp: set, i: int, j: int):
    """An edge inside ``comp`` inconsistent with BFS potentials, with the potentials."""
    edges = [(q, r, w) for q, r, w in _weights(a, i, j) if q in comp and r in comp]
    out = {}
    for q, r, w in edges:
        out.setdefault(q, []).append((r, w))
    root = next(iter(comp))
    pot = {root: 0}
    tree = {root: None}
    todo = deque([root])
    while todo:
        q = todo.popleft()
        for r, w in out.get(q, ()):
            if r not in pot:
                pot[r] = pot[q] + w
                tree[r] = q
                todo.append(r)
    for q, r, w in edges:
        if pot[q] + w != pot[r]:
            return (q, r, w), pot, root
    return None, pot, root


def _graph(a: DetKTapeAutomaton) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(a.states)
    g.add_edges_from((q, r) for (q, _), r in a.delta.items())
    return g


def separated_pairs(a: DetKTapeAutomaton) -> dict:
    """State -> set of tape pairs (i, j), i < j, separated by some cycle reaching the state."""
    g = _graph(a)
    sep = {q: set() for q in a.states}
    sccs = [c for c in nx.strongly_connected_components(g)
            if len(c) > 1 or any(g.has_edge(q, q) for q in c)]
    for i, j in itertools.combinations(range(a.k), 2):
        for comp in sccs:
            edge, _, _ = _conflict_edge(a, comp, i, j)
            if edge is None:
                continue
            src = next(iter(comp))
            for q in nx.descendants(g, src) | {src}:
                sep[q].add((i, j))
    return sep


def compute_partitions(a: DetKTapeAutomaton) -> dict:
    """State -> :class:`Partition`: tapes i, j share a block iff every cycle from which the
    state is reachable reads equally many letters on both.

    Runs on the plain view of endmarked input; keys are then plain-view states.
    """
    p = _plain(a) if a.endmarked else a
    sep = separated_pairs(p)
    out = {}
    for q in p.states:
        blocks = []
        for i in range(p.k):
            for b in blocks:
                if all((min(i, x), max(i, x)) not in sep[q] for x in b):
                    b.append(i)
                    break
            else:
                blocks.append([i])
        part = Partition(p.k, tuple(tuple(b) for b in blocks))
        for i, j in itertools.combinations(range(p.k), 2):
            if (part.block_of(i) == part.block_of(j)) == ((i, j) in sep[q]):
                raise RelkitError("internal error: separation is not transitive")
        out[q] = part
    return out


def asynchronous_cycle(a: DetKTapeAutomaton, target, i: int, j: int):
    """(state p, cycle words) with |v_i| != |v_j| on a cycle at p from which ``target`` is
    reachable, for a plain automaton; ``None`` if there is none."""
    g = _graph(a)
    for comp in nx.strongly_connected_components(g):
        if len(comp) == 1 and not any(g.has_edge(q, q) for q in comp):
            continue
        edge, pot, root = _conflict_edge(a, comp, i, j)
        if edge is None:
            continue
        if target != root and target not in nx.descendants(g, root):
            continue
        x, y, _ = edge
        sub = a
        for cyc in (_path_in(sub, comp, root, x, y), _path_in(sub, comp, root, y, None)):
            words = cyc
            if len(words[i]) != len(words[j]):
                return root, words
    return None


def _path_in(a, comp, root, via, then):
    """Words of the closed walk root ->* via (-> then) ->* root inside ``comp``."""
    def bfs(src, dst):
        par = {src: None}
        todo = deque([src])
        while todo:
            s = todo.popleft()
            if s == dst and par[s] is not None or (s == dst and src != dst):
                break
            for c in a.alphabet:
                r = a.delta.get((s, c))
                if r is not None and r in comp and r not in par:
                    par[r] = (s, c)
                    todo.append(r)
        steps = []
        s = dst
        while s != src or (not steps and src == dst and par.get(dst) is not None and False):
            s, c = par[s]
            steps.append((s, c))
            if s == src:
                break
        return list(reversed(steps))

    steps = bfs(root, via) if via != root else []
    if then is not None:
        c = next(c for c in a.alphabet if a.delta.get((via, c)) == then)
        steps.append((via, c))
        cur = then
    else:
        cur = via
    if cur != root:
        steps += bfs(cur, root)
    words = [[] for _ in range(a.k)]
    for s, c in steps:
        words[a.owner[s]].append(c)
    return tuple(tuple(w) for w in words)


# ---------------------------------------------------------------------------
# summarized automata

def block_letters(size: int, letters) -> list:
    return [t for t in itertools.product(tuple(letters) + (PAD,), repeat=size)
            if any(c != PAD for c in t)]


def summarize_tuple(u, part: Partition, plain: bool = False) -> tuple:
    """Summarized image of a tuple: per block the convolution of its (endmarked) words."""
    words = [tuple(w) if plain else tuple(w) + (END,) for w in u]
    out = []
    for b in part.blocks:
        comp = [words[i] for i in b]
        n = max((len(w) for w in comp), default=0)
        out.append(tuple(tuple(w[x] if x < len(w) else PAD for w in comp) for x in range(n)))
    return tuple(out)


@dataclass(frozen=True)
class Summary:
    automaton: DetKTapeAutomaton
    source: object
    partition: Partition
    queue_bound: int


def summarize(a: DetKTapeAutomaton, q, independents: dict, partitions: dict | None = None,
              queue_bound: int | None = None, cap: int = 200_000) -> Summary:
    """Endmarked deterministic automaton for the summarized relation R_q^P with P = P_q.

    ``a`` must be a plain automaton (see :func:`relkit.drat_rec.plain_view`).  ``independents``
    maps every state q' reachable from q with a strictly finer partition to an independent
    automaton of its own summarized relation.
    """
    if a.endmarked:
        raise RelkitError("summarize expects a plain automaton")
    parts = compute_partitions(a) if partitions is None else partitions
    P = parts[q]
    t = len(P)
    blk = {i: P.block_of(i) for i in range(a.k)}
    bound = len(a.states) + 2 if queue_bound is None else queue_bound
    letters = [c for c in a.alphabet]
    alph = []
    for b in P.blocks:
        alph += block_letters(len(b), letters)
    alph_set = {n: block_letters(n, letters) for n in {len(b) for b in P.blocks}}

    # finer partitions: block index map f and the component blocks inside every block
    def fmap(p2):
        P2 = parts[p2]
        return [P.block_of(b2[0]) for b2 in P2.blocks], P2

    def settle(p, queues, ended):
        """Forced moves on queued symbols; returns a node."""
        while True:
            if parts[p] != P:
                ind = independents.get(p)
                if ind is None:
                    raise RelkitError(f"missing independent automaton for state {p!r}")
                return ("I", p, tuple(d.initial for d in ind.components), queues, ended,
                        (False,) * len(ind.components), 0)
            tp = a.owner[p]
            moving = any((p, c) in a.delta for c in a.alphabet)
            if p in a.finals and not any(queues):
                return ("acc", 0)
            if not moving:
                return None
            if queues[tp]:
                c = queues[tp][0]
                nxt = a.delta.get((p, c))
                if nxt is None:
                    return None
                queues = queues[:tp] + (queues[tp][1:],) + queues[tp + 1:]
                p = nxt
                continue
            if ended[tp]:
                return None
            return ("A", p, queues, ended)

    def push(queues, ended, b, c):
        """Append input symbol c of tape b; None for a malformed convolution."""
        if c == PAD:
            return queues, ended[:b] + (True,) + ended[b + 1:]
        if ended[b]:
            return None
        nq = queues[b] + (c,)
        if len(nq) > bound:
            return None
        return queues[:b] + (nq,) + queues[b + 1:], ended

    def shift(queues, ended, b, c):
        """Shift register step for tape b in the second part: returns (head, queues, ended)."""
        if ended[b]:
            if c != PAD:
                return None
            head = queues[b][0] if queues[b] else PAD
            return head, queues[:b] + (queues[b][1:],) + queues[b + 1:], ended
        if c == PAD:
            head = queues[b][0] if queues[b] else PAD
            return (head, queues[:b] + (queues[b][1:],) + queues[b + 1:],
                    ended[:b] + (True,) + ended[b + 1:])
        if queues[b]:
            return queues[b][0], queues[:b] + (queues[b][1:] + (c,),) + queues[b + 1:], ended
        return c, queues, ended

    def feed(node, m, symbols):
        """One step of the second part on the block-m symbols (after shifting)."""
        _, p2, comps, queues, ended, done, _m = node
        ind = independents[p2]
        f, P2 = fmap(p2)
        heads = {}
        for b, c in zip(P.blocks[m], symbols):
            r = shift(queues, ended, b, c)
            if r is None:
                return None
            heads[b], queues, ended = r
        comps, done = list(comps), list(done)
        for i2, b2 in enumerate(P2.blocks):
            if f[i2] != m:
                continue
            letter = tuple(heads[b] for b in b2)
            if all(c == PAD for c in letter):
                done[i2] = True
                continue
            if done[i2]:
                return None
            nxt = ind.components[i2].delta.get((comps[i2], letter))
            if nxt is None:
                return None
            comps[i2] = nxt
        return ("I", p2, tuple(comps), queues, ended, tuple(done), m)

    def expand(node):
        kind = node[0]
        if kind == "acc":
            m = node[1]
            return (m if m < t else 0), ([(END, ("acc", m + 1))] if m < t else [])
        if kind == "fin":
            return 0, []
        if kind == "A":
            _, p, queues, ended = node
            tp = a.owner[p]
            i = blk[tp]
            block = P.blocks[i]
            moves = []
            for letter in alph_set[len(block)]:
                c = letter[block.index(tp)]
                if c == PAD:
                    continue
                nxt = a.delta.get((p, c))
                if nxt is None:
                    continue
                qs, en = queues, ended
                ok = True
                for b, x in zip(block, letter):
                    if b == tp:
                        continue
                    r = push(qs, en, b, x)
                    if r is None:
                        ok = False
                        break
                    qs, en = r
                if not ok:
                    continue
                m = settle(nxt, qs, en)
                if m is not None:
                    moves.append((letter, m))
            return i, moves
        # second part
        m = node[6]
        if m >= t:
            return 0, []
        moves = []
        for letter in alph_set[len(P.blocks[m])]:
            r = feed(node, m, letter)
            if r is not None:
                moves.append((letter, r))
        # the outer endmarker of block m: drain its queues, then move on
        cur = node
        while any(cur[3][b] for b in P.blocks[m]):
            cur = feed(cur, m, (PAD,) * len(P.blocks[m]))
            if cur is None:
                break
        if cur is not None:
            _, p2, comps, queues, ended, done, _m = cur
            ended = tuple(True if blk[b] == m else e for b, e in enumerate(ended))
            if m + 1 < t:
                moves.append((END, ("I", p2, comps, queues, ended, done, m + 1)))
            else:
                moves.append((END, ("fin", comps in independents[p2].finals)))
        return m, moves

    def final(node):
        return (node[0] == "acc" and node[1] == t) or (node[0] == "fin" and node[1])

    start = settle(q, ((),) * a.k, (False,) * a.k)
    if start is None:
        start = ("dead",)
    owner, delta, finals, states = {}, {}, set(), []
    seen = {start}
    todo = deque([start])
    while todo:
        node = todo.popleft()
        states.append(node)
        if node == ("dead",):
            owner[node] = 0
            continue
        tp, moves = expand(node)
        owner[node] = tp
        if final(node):
            finals.add(node)
        for c, m in moves:
            delta[(node, c)] = m
            if m not in seen:
                if len(seen) >= cap:
                    raise BudgetError(f"summarized automaton for {q!r} exceeds {cap} states",
                                      cap=cap, needed=None, stage="summarize")
                seen.add(m)
                todo.append(m)
    aut = DetKTapeAutomaton(t, tuple(alph), states, owner, start, finals, delta, True)
    return Summary(aut, q, P, bound)


# ---------------------------------------------------------------------------
# decision

@dataclass(frozen=True)
class ThreeClassCertificate:
    """Convolution prefixes x_1, x_2, x_3 with suffixes y[(i, j)] such that exactly one of
    x_i y[(i, j)] and x_j y[(i, j)] is the convolution of a tuple of the relation."""

    k: int
    prefixes: tuple
    suffixes: dict

    def describe(self) -> dict:
        def show(w):
            return " ".join("".join(map(str, c)) for c in w)
        out = {f"x{i + 1}": show(x) for i, x in enumerate(self.prefixes)}
        for (i, j), y in sorted(self.suffixes.items()):
            out[f"y{i + 1}{j + 1}"] = show(y)
        return out


def validate_certificate(a: DetKTapeAutomaton, cert: ThreeClassCertificate) -> bool:
    """Every pair is separated, and every word involved is a convolution."""
    n = len(cert.prefixes)
    if n < 3:
        return False
    for i, j in itertools.combinations(range(n), 2):
        y = cert.suffixes.get((i, j))
        if y is None:
            return False
        try:
            ui = deconvolve(tuple(cert.prefixes[i]) + tuple(y), cert.k)
            uj = deconvolve(tuple(cert.prefixes[j]) + tuple(y), cert.k)
        except RelkitError:
            return False
        if member_det(a, ui) == member_det(a, uj):
            return False
    return True


@dataclass
class SyncVerdict:
    synchronous: bool
    state: object = None
    evidence: RecVerdict | None = None
    certificate: ThreeClassCertificate | None = None
    layers: dict = field(default_factory=dict)
    partitions: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.synchronous

    def trace(self) -> list[str]:
        out = []
        for t in sorted(self.layers, reverse=True):
            sts = self.layers[t]
            parts = sorted({str(self.partitions[q]) for q in sts})
            out.append(f"layer {t}: {len(sts)} states, partitions {', '.join(parts) or '-'}")
        return out


def _layers(a: DetKTapeAutomaton, cap: int, build_all: bool, seed: int = 0):
    p = _plain(a)
    parts = compute_partitions(p)
    layers: dict = {}
    for q in p.states:
        layers.setdefault(len(parts[q]), []).append(q)
    indep: dict = {}
    summaries: dict = {}
    for t in range(p.k, 1, -1):
        for q in layers.get(t, []):
            s = summarize(p, q, indep, parts)
            summaries[q] = s
            try:
                v = decide_recognizable(s.automaton, seed)
            except BudgetError as e:
                raise BudgetError(f"state {q!r}: {e}", cap=e.cap, needed=e.needed,
                                  stage=f"recognizability of the summary at {q!r}") from e
            if not v.recognizable:
                return p, parts, layers, indep, summaries, (q, v)
            if t > 2 or build_all:
                ind = build_independent(s.automaton, cap=cap, seed=seed)
                if not isinstance(ind, IndependentKTape):
                    return p, parts, layers, indep, summaries, (q, ind)
                indep[q] = ind
    return p, parts, layers, indep, summaries, None


def decide_synchronous(a: DetKTapeAutomaton, cap: int = 2000, seed: int = 0,
                       certificate: bool = True) -> SyncVerdict:
    """Synchronous, or not synchronous with the state whose summary is not recognizable."""
    p, parts, layers, _, _, bad = _layers(a, cap, False, seed)
    if bad is None:
        return SyncVerdict(True, layers=layers, partitions=parts)
    q, v = bad
    cert = three_class_certificate(a, q) if certificate else None
    return SyncVerdict(False, q, v, cert, layers, parts)


# ---------------------------------------------------------------------------
# Nerode evidence

def _strip(w):
    return tuple(c for c in w if c != END)


def three_class_certificate(a: DetKTapeAutomaton, q, h: int = 3, max_pump: int = 40):
    """Three pairwise Nerode-inequivalent convolution prefixes (binary relations).

    Follows the pumping argument: an asynchronous cycle before q lets the longer tape run
    ahead, and a non-recognizability pattern at q provides the separated words.  Returns
    ``None`` when no certificate is found (always for arity above two).
    """
    if a.k != 2:
        return None
    p = _plain(a)
    for short, other in ((0, 1), (1, 0)):
        cyc = asynchronous_cycle(p, q, 0, 1)
        if cyc is None:
            return None
        root, words = cyc
        if len(words[short]) >= len(words[other]):
            continue
        rooted = trim(DetKTapeAutomaton(2, p.alphabet, p.states, p.owner, q, p.finals, p.delta,
                                        False))
        view = rooted if short == 0 else permute_tapes(rooted, tape_to_front(2, short))
        view = _complete(view)
        wit = _decide_binary(view, 0)
        if wit is None:
            return None
        to_root = _shortest_path(p, p.initial, root)
        root_q = _shortest_path(p, root, q)
        q_wit = _shortest_path(view, view.initial, wit.q)
        if None in (to_root, root_q, q_wit):
            return None
        # back to original tape order
        q_wit = (q_wit[0], q_wit[1]) if short == 0 else (q_wit[1], q_wit[0])
        s_words = [wit.v1 * n + wit.w1 for n in range(h)]
        t_words = {(i, j): wit.v2[0] * i + wit.x[0] + wit.y[0]
                   for i, j in itertools.combinations(range(h), 2)}
        for n in range(1, max_pump):
            u = [to_root[x] + words[x] * n + root_q[x] + q_wit[x] for x in range(2)]
            cert = _assemble(a, u, short, other, s_words, t_words)
            if cert is not None:
                return cert
    return None


def _assemble(a, u, short, other, s_words, t_words):
    h = len(s_words)
    tuples = {}
    for (i, j), t in t_words.items():
        for x in (i, j):
            w = [None, None]
            w[short] = _strip(u[short] + s_words[x])
            w[other] = _strip(u[other] + t)
            tuples[(x, (i, j))] = tuple(w)
    ell = max(len(w[short]) for w in tuples.values())
    prefixes = [None] * h
    suffixes = {}
    for (x, pair), w in tuples.items():
        if len(w[other]) < ell:
            return None
        conv = convolve(w)
        pre, suf = conv[:ell], conv[ell:]
        if prefixes[x] is None:
            prefixes[x] = pre
        elif prefixes[x] != pre:
            return None
        if suffixes.setdefault(pair, suf) != suf:
            return None
    cert = ThreeClassCertificate(2, tuple(prefixes), suffixes)
    return cert if validate_certificate(a, cert) else None


# ---------------------------------------------------------------------------
# reductions and the synchronous automaton

def rec_to_sync(a):
    """Automaton for {(hash^n1 start w1, .., hash^nk start wk) : w in R(a)}.

    ``hash`` and ``start`` are fresh letters; every tape first loops on ``hash`` and then reads
    ``start`` before the original automaton takes over.  Determinism is preserved.
    """
    if HASH in a.alphabet or START_LETTER in a.alphabet:
        raise RelkitError("rec_to_sync needs the letters 'hash' and 'start' to be fresh")
    alph = tuple(a.alphabet) + (HASH, START_LETTER)
    if isinstance(a, KTapeAutomaton):
        trans = list(a.transitions)
        k = a.k
        for t in range(k):
            eps = ((),) * k
            lab = lambda w: eps[:t] + ((w,),) + eps[t + 1:]  # noqa: E731
            trans.append(((("pre", t)), lab(HASH), ("pre", t)))
            trans.append(((("pre", t)), lab(START_LETTER), ("pre", t + 1) if t + 1 < k else a.initial))
        states = tuple(("pre", t) for t in range(k)) + tuple(a.states)
        return KTapeAutomaton(k, alph, states, ("pre", 0), a.finals, tuple(trans))
    owner = dict(a.owner)
    delta = dict(a.delta)
    for t in range(a.k):
        owner[("pre", t)] = t
        delta[(("pre", t), HASH)] = ("pre", t)
        delta[(("pre", t), START_LETTER)] = ("pre", t + 1) if t + 1 < a.k else a.initial
    states = [("pre", t) for t in range(a.k)] + list(a.states)
    return DetKTapeAutomaton(a.k, alph, states, owner, ("pre", 0), a.finals, delta, a.endmarked)


def synchronous_automaton(a: DetKTapeAutomaton, cap: int = 2000, seed: int = 0,
                          dfa_cap: int = 100_000):
    """DFA over convolution letters for ⊗R(a), or the negative :class:`SyncVerdict`."""
    p, parts, layers, indep, _, bad = _layers(a, cap, True, seed)
    if bad is not None:
        q, v = bad
        return SyncVerdict(False, q, v, three_class_certificate(a, q), layers, parts)
    q0 = p.initial
    P = parts[q0]
    if len(P) == 1:
        s = summarize(p, q0, indep, parts).automaton
        init = s.initial

        def step(m, letter):
            return s.delta.get((m, letter))

        def accept(m):
            m = s.delta.get((m, END)) if m is not None else None
            return m in s.finals
    else:
        ind = indep[q0]
        init = (tuple(d.initial for d in ind.components), (False,) * len(ind.components))

        def step(m, letter):
            comps, done = list(m[0]), list(m[1])
            for i, b in enumerate(P.blocks):
                part = tuple(letter[x] for x in b)
                if all(c == PAD for c in part):
                    done[i] = True
                    continue
                if done[i]:
                    return None
                comps[i] = ind.components[i].delta.get((comps[i], part))
                if comps[i] is None:
                    return None
            return tuple(comps), tuple(done)

        def accept(m):
            return m is not None and m[0] in ind.finals

    k = a.k
    user = [c for c in a.alphabet]
    letters = [t for t in itertools.product(user + [PAD], repeat=k) if any(c != PAD for c in t)]

    def inner(ended_before, letter):
        """The letter of conv(u ⊣) at this position and the new ended flags."""
        out, ended = [], []
        for e, c in zip(ended_before, letter):
            if e:
                if c != PAD:
                    return None, None
                out.append(PAD)
                ended.append(True)
            elif c == PAD:
                out.append(END)
                ended.append(True)
            else:
                out.append(c)
                ended.append(False)
        return tuple(out), tuple(ended)

    def closing(m, ended):
        last = tuple(PAD if e else END for e in ended)
        if all(e for e in ended):
            return accept(m)
        m2 = step(m, last)
        return m2 is not None and accept(m2)

    start = (init, (False,) * k)
    dead = ("dead",)
    states, delta, finals = [start, dead], {}, set()
    seen = {start, dead}
    todo = deque([start])
    while todo:
        node = todo.popleft()
        m, ended = node
        if closing(m, ended):
            finals.add(node)
        for letter in letters:
            il, en = inner(ended, letter)
            nxt = dead
            if il is not None:
                m2 = step(m, il)
                if m2 is not None:
                    nxt = (m2, en)
            delta[(node, letter)] = nxt
            if nxt not in seen:
                if len(seen) >= dfa_cap:
                    raise BudgetError("synchronous automaton exceeds its cap", cap=dfa_cap,
                                      needed=None, stage="synchronous_automaton")
                seen.add(nxt)
                states.append(nxt)
                todo.append(nxt)
    for letter in letters:
        delta[(dead, letter)] = dead
    return Dfa(tuple(letters), tuple(states), start, delta, finals)


__all__ = [
    "compute_partitions", "separated_pairs", "asynchronous_cycle", "summarize", "Summary",
    "summarize_tuple", "block_letters", "decide_synchronous", "SyncVerdict",
    "ThreeClassCertificate", "validate_certificate", "three_class_certificate", "rec_to_sync",
    "synchronous_automaton", "HASH", "START_LETTER",
]
