"""ω-recognizability of ω-synchronous relations via infinite cliques of co-equivalences.

A relation over Σ^k is ω-recognizable iff for every tape j the equivalence "same residual
on tape j" has finite index, i.e. its complement (an NBA over pairs, see
:func:`co_equiv_nba`) has no infinite clique.  Infinite cliques are detected through two
run patterns built from *three-cycles patterns* between states q1 and q5::

    q1 -(u,u)-> q2 -(v,v)-> q2 -(w,v)-> q3 -(x,v)-> q3 -(x,w)-> q4 -(x,x)-> q4 -(y,y)-> q5

with |v| = |w| = |x| > 0 and v != w.  The pattern is *final* when one of the runs on
(u,u), (w,v), (x,w) or (y,y) visits an accepting state.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from itertools import product

from .automata import Dpa, Nba, UpWord, trim
from .errors import RelkitError
from .omega import complement_dpa, complement_nba, dpa_to_nba
from .oracles import member_upword


@dataclass(frozen=True)
class ThreeCyclesWitness:
    q1: object
    q2: object
    q3: object
    q4: object
    q5: object
    u: tuple
    v: tuple
    w: tuple
    x: tuple
    y: tuple
    final: bool = False

    def segment(self, i: int, n: int) -> tuple:
        """The word u v^i w x^(n-i) y."""
        return self.u + self.v * i + self.w + self.x * (n - i) + self.y


@dataclass(frozen=True)
class CliqueCertificate:
    """Evidence of an infinite clique.

    ``kind == "prefix"``: ``chain`` holds one pattern from the initial state and ``lasso``
    is an ultimately periodic word accepted diagonally from its last state.  The family is
    ``u v^i w x^(n-i) y . lasso``.

    ``kind == "periodic"``: ``prefix`` is a diagonal word leading to the first state of
    ``chain``; the patterns ``chain[loop:]`` form a cycle whose last pattern is final.
    """

    kind: str
    chain: tuple
    prefix: tuple = ()
    lasso: UpWord | None = None
    loop: int = 0

    def describe(self) -> dict:
        def s(w):
            return "".join(map(str, w))
        out = {"kind": self.kind}
        if self.kind == "prefix":
            p = self.chain[0]
            out.update(u=s(p.u), v=s(p.v), w=s(p.w), x=s(p.x), y=s(p.y), z=str(self.lasso))
        else:
            out["z"] = s(self.prefix)
            out["loop"] = str(self.loop + 1)
            for i, p in enumerate(self.chain, 1):
                out[f"t{i}"] = f"{s(p.u)}|{s(p.v)}|{s(p.w)}|{s(p.x)}|{s(p.y)}"
        return out


def expand_clique(c: CliqueCertificate, n: int) -> list[UpWord]:
    """The n+1 words of the clique family encoded by a certificate."""
    out = []
    for i in range(n + 1):
        if c.kind == "prefix":
            p = c.chain[0]
            out.append(UpWord(p.segment(i, n) + c.lasso.prefix, c.lasso.period))
        else:
            head = c.prefix + tuple(x for p in c.chain[:c.loop] for x in p.segment(i, n))
            per = tuple(x for p in c.chain[c.loop:] for x in p.segment(i, n))
            out.append(UpWord(head, per))
    return out


def validate_certificate(a: Nba, c: CliqueCertificate, max_n: int = 5) -> bool:
    """Families for n = 1..max_n are pairwise distinct and pairwise accepted by ``a``."""
    for n in range(1, max_n + 1):
        fam = expand_clique(c, n)
        for i in range(len(fam)):
            for j in range(len(fam)):
                if i == j:
                    continue
                if fam[i].same_word(fam[j]):
                    return False
                if not member_upword(a, (fam[i], fam[j])):
                    return False
    return True


# ---------------------------------------------------------------------------
# co-equivalence automata

def _component_alphabet(letters) -> tuple:
    seen: dict = {}
    for c in letters:
        for x in c:
            seen.setdefault(x, None)
    return tuple(seen)


def co_equiv_nba(r: Dpa | Nba, j: int, complement_budget: int = 20000) -> Nba:
    """NBA over pairs (x, y) of words that differ in their tape-j residual of ``r``.

    (x, y) is accepted iff some z over the other tapes puts x into the relation and y out of
    it, or the other way round.  Both disjuncts share the guessed letters of z.
    """
    letters = tuple(r.alphabet)
    k = len(letters[0])
    if not 0 <= j < k:
        raise RelkitError(f"tape {j + 1} out of range for arity {k}")
    sigma = _component_alphabet(letters)
    if isinstance(r, Dpa):
        pos, neg = dpa_to_nba(r), dpa_to_nba(complement_dpa(r))
    else:
        pos, neg = r, complement_nba(r, max_states=complement_budget)
    pos, neg = trim(pos), trim(neg)
    others = list(product(sigma, repeat=k - 1))

    def put(a, z):
        return z[:j] + (a,) + z[j:]

    init = ("init",)
    states, delta, finals = [init], {}, set()
    seen = {init}
    todo = deque()
    pairs = [(x, y) for x in sigma for y in sigma]
    for side, (b1, b2) in enumerate(((pos, neg), (neg, pos))):
        start = (side, b1.initial, b2.initial, 0)
        # the fresh initial state copies the moves of each disjunct's initial state
        todo.append(start)
        seen.add(start)
        states.append(start)
    moves: dict = {}
    while todo:
        node = todo.popleft()
        side, p, q, flag = node
        b1, b2 = (pos, neg) if side == 0 else (neg, pos)
        if flag == 0 and p in b1.finals:
            nflag = 1
        elif flag == 1 and q in b2.finals:
            nflag = 0
        else:
            nflag = flag
        if flag == 1 and q in b2.finals:
            finals.add(node)
        for (x, y) in pairs:
            out = set()
            for z in others:
                for p2 in b1.post(p, put(x, z)):
                    for q2 in b2.post(q, put(y, z)):
                        out.add((side, p2, q2, nflag))
            if out:
                moves[(node, (x, y))] = out
                for m in out:
                    if m not in seen:
                        seen.add(m)
                        states.append(m)
                        todo.append(m)
    for (node, c), out in moves.items():
        delta[(node, c)] = tuple(sorted(out, key=repr))
    for side in (0, 1):
        b1, b2 = (pos, neg) if side == 0 else (neg, pos)
        start = (side, b1.initial, b2.initial, 0)
        for c in pairs:
            if (start, c) in delta:
                delta[(init, c)] = delta.get((init, c), ()) + delta[(start, c)]
    nba = Nba(pairs, states, init, finals, delta)
    return _compact(trim(nba))


def _compact(a: Nba) -> Nba:
    """Rename states to integers and merge bisimilar states."""
    idx = {q: i for i, q in enumerate(a.states)}
    n = len(a.states)
    # partition refinement for strong bisimulation that respects finality
    block = [1 if q in a.finals else 0 for q in a.states]
    letters = a.alphabet
    while True:
        sig = {}
        nb = []
        for q in a.states:
            key = (block[idx[q]],) + tuple(
                frozenset(block[idx[r]] for r in a.post(q, c)) for c in letters)
            nb.append(sig.setdefault(key, len(sig)))
        if len(sig) == len(set(block)):
            block = nb
            break
        block = nb
    init = block[idx[a.initial]]
    delta: dict = {}
    for (q, c), rs in a.delta.items():
        delta[(block[idx[q]], c)] = tuple(sorted({block[idx[r]] for r in rs}))
    finals = {block[idx[q]] for q in a.finals}
    states = tuple(range(max(block) + 1)) if n else ()
    return Nba(letters, states, init, finals, delta)


# ---------------------------------------------------------------------------
# pattern search

class _Patterns:
    def __init__(self, a: Nba):
        self.a = a
        self.sigma = _component_alphabet(a.alphabet)
        self.states = list(a.states)
        self.idx = {q: i for i, q in enumerate(self.states)}
        n = len(self.states)
        self.n = n
        self.fin = [q in a.finals for q in self.states]
        letters = set(a.alphabet)
        self.post = {}
        for x in self.sigma:
            for y in self.sigma:
                if (x, y) in letters:
                    self.post[(x, y)] = [tuple(self.idx[r] for r in a.post(q, (x, y)))
                                         for q in self.states]
                else:
                    self.post[(x, y)] = [()] * n
        succ = [set() for _ in range(n)]
        dsucc = [set() for _ in range(n)]
        for (x, y), table in self.post.items():
            for i, rs in enumerate(table):
                succ[i].update(rs)
                if x == y:
                    dsucc[i].update(rs)
        self.succ, self.dsucc = succ, dsucc
        self.reach = [self._bfs(i, succ) for i in range(n)]
        self.dreach = [self._bfs(i, dsucc) for i in range(n)]
        self.on_cycle = [any(i in self.reach[r] for r in succ[i]) for i in range(n)]
        self.on_dcycle = [any(i in self.dreach[r] for r in dsucc[i]) for i in range(n)]
        self._mid: dict = {}
        self._rel: dict = {}
        self._pairs: dict = {}

    @staticmethod
    def _bfs(i, succ):
        seen = {i}
        todo = [i]
        while todo:
            q = todo.pop()
            for r in succ[q]:
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return seen

    # diagonal paths ---------------------------------------------------------
    def diag_path(self, p: int, q: int, need_final: bool):
        """Shortest diagonal word from p to q (visiting a final state if asked)."""
        start = (p, self.fin[p])
        par = {start: None}
        todo = deque([start])
        while todo:
            node = todo.popleft()
            s, f = node
            if s == q and (f or not need_final):
                word = []
                while par[node] is not None:
                    node, c = par[node]
                    word.append(c)
                return tuple(reversed(word))
            for c in self.sigma:
                for r in self.post[(c, c)][s]:
                    m = (r, f or self.fin[r])
                    if m not in par:
                        par[m] = (node, c)
                        todo.append(m)
        return None

    def diag_targets(self, p: int) -> dict:
        """q -> whether some diagonal path p ~> q visits a final state."""
        start = (p, self.fin[p])
        seen = {start}
        todo = [start]
        while todo:
            s, f = todo.pop()
            for r in self.dsucc[s]:
                m = (r, f or self.fin[r])
                if m not in seen:
                    seen.add(m)
                    todo.append(m)
        out: dict = {}
        for s, f in seen:
            out[s] = out.get(s, False) or f
        return out

    # middle part -------------------------------------------------------------
    def middle(self, q2: int, q3: int, q4: int):
        """Words (v, w, x) for the middle runs, separately without and with a final visit."""
        key = (q2, q3, q4)
        if key in self._mid:
            return self._mid[key]
        ab = self._pair_reach("ab", q2)
        cd = self._pair_reach("cd", q3)
        if (q2, q3, True) not in ab or ((q3, q4, False) not in cd and (q3, q4, True) not in cd):
            res = (None, None)
        else:
            res = self._middle_search(q2, q3, q4)
        self._mid[key] = res
        return res

    def _pair_reach(self, kind: str, q: int) -> set:
        """Reachable pairs of two of the five middle runs, both started in q.

        "ab" pairs the (v,v) and (w,v) runs, "cd" the (x,v) and (x,w) runs.  The flag
        records v != w.  A projection of the full product, so it only ever prunes.
        """
        key = (kind, q)
        got = self._pairs.get(key)
        if got is not None:
            return got
        post = self.post
        start = (q, q, False)
        seen = {start}
        todo = [start]
        triples = list(product(self.sigma, repeat=3))
        while todo:
            s1, s2, diff = todo.pop()
            for v, w, x in triples:
                l1, l2 = ((v, v), (w, v)) if kind == "ab" else ((x, v), (x, w))
                nd = diff or v != w
                for r1 in post[l1][s1]:
                    for r2 in post[l2][s2]:
                        m = (r1, r2, nd)
                        if m not in seen:
                            seen.add(m)
                            todo.append(m)
        self._pairs[key] = seen
        return seen

    def _middle_search(self, q2, q3, q4):
        fin, post, reach, dreach = self.fin, self.post, self.reach, self.dreach
        goal = (q2, q3, q3, q4, q4)
        f0 = fin[q2] or fin[q3]
        start = (q2, q2, q3, q3, q4, False, f0)
        par = {start: None}
        todo = deque([start])
        found = {False: None, True: None}
        triples = list(product(self.sigma, repeat=3))
        while todo:
            node = todo.popleft()
            sa, sb, sc, sd, se, diff, f = node
            for (vv, ww, xx) in triples:
                la = post[(vv, vv)][sa]
                if not la:
                    continue
                lb = post[(ww, vv)][sb]
                if not lb:
                    continue
                lc = post[(xx, vv)][sc]
                if not lc:
                    continue
                ld = post[(xx, ww)][sd]
                if not ld:
                    continue
                le = post[(xx, xx)][se]
                if not le:
                    continue
                nd = diff or vv != ww
                la = [r for r in la if q2 in dreach[r]]
                lb = [r for r in lb if q3 in reach[r]]
                lc = [r for r in lc if q3 in reach[r]]
                ld = [r for r in ld if q4 in reach[r]]
                le = [r for r in le if q4 in dreach[r]]
                for ra in la:
                    for rb in lb:
                        for rc in lc:
                            for rd in ld:
                                nf = f or fin[rb] or fin[rd]
                                for re_ in le:
                                    m = (ra, rb, rc, rd, re_, nd, nf)
                                    if m in par:
                                        continue
                                    par[m] = (node, (vv, ww, xx))
                                    if nd and (ra, rb, rc, rd, re_) == goal:
                                        if found[nf] is None:
                                            found[nf] = self._words(par, m)
                                        if nf and found[False] is None:
                                            found[False] = found[True]
                                        if found[True] is not None:
                                            return found[False], found[True]
                                    todo.append(m)
        return found[False], found[True]

    @staticmethod
    def _words(par, node):
        v, w, x = [], [], []
        while par[node] is not None:
            node, (a, b, c) = par[node]
            v.append(a)
            w.append(b)
            x.append(c)
        return tuple(reversed(v)), tuple(reversed(w)), tuple(reversed(x))

    # relations ---------------------------------------------------------------
    def rel_from(self, q1: int) -> dict:
        """q5 -> (witness of some pattern, witness of a final pattern or None)."""
        if q1 in self._rel:
            return self._rel[q1]
        out: dict = {}
        d1 = self.diag_targets(q1)
        for q2, f12 in d1.items():
            if not self.on_dcycle[q2]:
                continue
            for q3 in self.reach[q2]:
                if not self.on_cycle[q3]:
                    continue
                for q4 in self.reach[q3]:
                    if not self.on_dcycle[q4]:
                        continue
                    m_any, m_fin = self.middle(q2, q3, q4)
                    if m_any is None:
                        continue
                    for q5, f45 in self.diag_targets(q4).items():
                        cur = out.get(q5, (None, None))
                        if cur[1] is not None:
                            continue
                        if m_fin is not None:
                            wit = self._witness(q1, q2, q3, q4, q5, m_fin, False, False, True)
                        elif f12:
                            wit = self._witness(q1, q2, q3, q4, q5, m_any, True, False, True)
                        elif f45:
                            wit = self._witness(q1, q2, q3, q4, q5, m_any, False, True, True)
                        else:
                            wit = None
                        anyw = cur[0]
                        if anyw is None:
                            anyw = wit or self._witness(q1, q2, q3, q4, q5, m_any, False, False,
                                                        False)
                        out[q5] = (anyw, wit)
        self._rel[q1] = out
        return out

    def _witness(self, q1, q2, q3, q4, q5, mid, fu, fy, final):
        u = self.diag_path(q1, q2, fu)
        y = self.diag_path(q4, q5, fy)
        v, w, x = mid
        s = self.states
        return ThreeCyclesWitness(s[q1], s[q2], s[q3], s[q4], s[q5], u, v, w, x, y, final)

    def diag_lasso(self, q: int) -> UpWord | None:
        """A diagonal ultimately periodic word accepted from q."""
        for f in sorted(self.dreach[q]):
            if not self.fin[f] or not self.on_dcycle[f]:
                continue
            pre = self.diag_path(q, f, False)
            best = None
            for c in self.sigma:
                for r in self.post[(c, c)][f]:
                    if f in self.dreach[r]:
                        tail = self.diag_path(r, f, False)
                        cand = (c,) + tail
                        if best is None or len(cand) < len(best):
                            best = cand
            return UpWord(pre, best)
        return None


def three_cycles(a: Nba):
    """The pattern relations (rel, relF) as sets of state pairs."""
    pat = _Patterns(a)
    rel, relf = set(), set()
    for i in range(pat.n):
        for q5, (anyw, finw) in pat.rel_from(i).items():
            rel.add((pat.states[i], pat.states[q5]))
            if finw is not None:
                relf.add((pat.states[i], pat.states[q5]))
    return rel, relf


def three_cycles_witnesses(a: Nba) -> dict:
    pat = _Patterns(a)
    out = {}
    for i in range(pat.n):
        for q5, ws in pat.rel_from(i).items():
            out[(pat.states[i], pat.states[q5])] = ws
    return out


def check_three_cycles_witness(a: Nba, t: ThreeCyclesWitness) -> bool:
    """Run simulation of the seven runs of a pattern (and its final flag)."""
    if not (len(t.v) == len(t.w) == len(t.x) > 0 and t.v != t.w):
        return False
    runs = [
        (t.q1, t.u, t.u, t.q2, True), (t.q2, t.v, t.v, t.q2, False),
        (t.q2, t.w, t.v, t.q3, True), (t.q3, t.x, t.v, t.q3, False),
        (t.q3, t.x, t.w, t.q4, True), (t.q4, t.x, t.x, t.q4, False),
        (t.q4, t.y, t.y, t.q5, True),
    ]
    final_seen = False
    for src, top, bot, dst, counts in runs:
        cur = {(src, src in a.finals)}
        for c in zip(top, bot):
            cur = {(r, f or r in a.finals) for q, f in cur for r in a.post(q, c)}
        ends = [f for q, f in cur if q == dst]
        if not ends:
            return False
        if counts and any(ends):
            final_seen = True
    return final_seen or not t.final


# ---------------------------------------------------------------------------
# clique patterns

def detect_prefix_pattern(a: Nba) -> CliqueCertificate | None:
    if not a.finals:
        return None
    pat = _Patterns(a)
    q0 = pat.idx[a.initial]
    for q5, (anyw, _) in sorted(pat.rel_from(q0).items()):
        lasso = pat.diag_lasso(q5)
        if lasso is not None:
            return CliqueCertificate("prefix", (anyw,), lasso=lasso)
    return None


def detect_periodic_pattern(a: Nba) -> CliqueCertificate | None:
    if not a.finals:
        return None
    pat = _Patterns(a)
    q0 = pat.idx[a.initial]
    starts = sorted(pat.dreach[q0])
    # explore the pattern graph from the diagonal successors of the initial state
    edges: dict = {}
    order = list(starts)
    seen = set(starts)
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        edges[q] = pat.rel_from(q)
        for r in edges[q]:
            if r not in seen:
                seen.add(r)
                order.append(r)
    # a final edge a => b on a cycle; the loop b =>* a => b ends with the final edge
    for a_ in order:
        for b_, (_, fw) in sorted(edges[a_].items()):
            if fw is None:
                continue
            back = _rel_path(edges, b_, a_)
            if back is None:
                continue
            for q1 in starts:
                head = _rel_path(edges, q1, b_)
                if head is None:
                    continue
                z = pat.diag_path(q0, q1, False)
                loop_chain = [edges[s][t][0] for s, t in back] + [fw]
                head_chain = [edges[s][t][0] for s, t in head]
                return CliqueCertificate("periodic", tuple(head_chain + loop_chain), prefix=z,
                                         loop=len(head_chain))
    return None


def _rel_path(edges, src, dst):
    """Edges of a shortest path src =>* dst in the pattern graph."""
    par = {src: None}
    todo = deque([src])
    while todo:
        q = todo.popleft()
        if q == dst:
            path = []
            while par[q] is not None:
                p = par[q]
                path.append((p, q))
                q = p
            return list(reversed(path))
        for r in edges.get(q, {}):
            if r not in par:
                par[r] = q
                todo.append(r)
    return None


def sanity_check(a: Nba, samples: int = 40, seed: int = 0) -> list[str]:
    """Sample ultimately periodic words and report failures of the co-equivalence laws."""
    rnd = random.Random(seed)
    sigma = _component_alphabet(a.alphabet)

    def word():
        return UpWord(tuple(rnd.choice(sigma) for _ in range(rnd.randint(0, 3))),
                      tuple(rnd.choice(sigma) for _ in range(rnd.randint(1, 3))))

    issues = []
    for _ in range(samples):
        x, y, z = word(), word(), word()
        if member_upword(a, (x, x)):
            issues.append(f"reflexivity fails on {x}")
        if member_upword(a, (x, y)) != member_upword(a, (y, x)):
            issues.append(f"symmetry fails on {x}, {y}")
        if (not member_upword(a, (x, y)) and not member_upword(a, (y, z))
                and member_upword(a, (x, z))):
            issues.append(f"transitivity fails on {x}, {y}, {z}")
    return issues


def has_infinite_clique(a: Nba, sanity: bool = False) -> CliqueCertificate | None:
    """Certificate of an infinite clique of a co-equivalence NBA, or ``None``."""
    if sanity:
        issues = sanity_check(a)
        if issues:
            raise RelkitError("input is not a co-equivalence: " + "; ".join(issues[:3]))
    return detect_prefix_pattern(a) or detect_periodic_pattern(a)


@dataclass(frozen=True)
class OmegaVerdict:
    recognizable: bool
    tape: int | None = None
    certificate: CliqueCertificate | None = None
    subject: Nba | None = field(default=None, repr=False)


def decide_omega_recognizable(r: Dpa | Nba, complement_budget: int = 20000) -> OmegaVerdict:
    k = len(tuple(r.alphabet)[0])
    for j in range(k - 1):
        co = co_equiv_nba(r, j, complement_budget)
        cert = has_infinite_clique(co)
        if cert is not None:
            return OmegaVerdict(False, j, cert, co)
    return OmegaVerdict(True)


__all__ = [
    "ThreeCyclesWitness", "CliqueCertificate", "OmegaVerdict", "co_equiv_nba", "three_cycles",
    "three_cycles_witnesses", "check_three_cycles_witness", "detect_prefix_pattern",
    "detect_periodic_pattern", "has_infinite_clique", "decide_omega_recognizable",
    "expand_clique", "validate_certificate", "sanity_check",
]
