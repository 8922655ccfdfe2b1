"""Randomised polynomial identity testing for deterministic multitape automata.

A plain deterministic k-tape automaton defines the polynomial

    P_A(W) = sum over accepted tuples u of  prod_{t, i} W[t, i, u_t[i]]

in commuting variables W[t, i, c] (tape, position, letter).  Distinct tuples give distinct
multilinear monomials, so two automata agree on all tuples of total length <= L exactly when
their truncated polynomials coincide.  We evaluate at random points modulo a prime with a
level-by-level dynamic programme over configurations (state, length vector); by determinism
every configuration value is the sum over the distinct tuple prefixes that reach it.

Length vectors of a level are ranked in lexicographic order, which makes the first non-zero
entry of ``P_A - P_B`` the length-lexicographically least length vector of a difference.  The
letters of the least differing tuple are then recovered by self-reduction: positions are fixed
one at a time with one-hot weights.
"""
from __future__ import annotations

from math import comb

import numpy as np
from numba import njit

from .automata import DetKTapeAutomaton, run_plain
from .errors import BudgetError

PRIME = 2147483647  # 2^31 - 1
MAX_CELLS = 60_000_000


@njit(cache=True)
def _rank(vec, k, s, binom):
    # lexicographic rank of a composition of s into k parts
    r = 0
    rem = s
    for i in range(k - 1):
        parts = k - i - 1
        li = vec[i]
        # number of compositions with a smaller i-th entry
        r += binom[rem + parts, parts] - binom[rem - li + parts, parts]
        rem -= li
    return r


@njit(cache=True)
def _level_dp(owner, trans, final_w, init_idx, init_val, W, max_level, k, binom, stop_first):
    n = owner.shape[0]
    nl = trans.shape[1]
    P = 2147483647
    maxcols = binom[max_level + k - 1, k - 1]
    cur = np.zeros((n, maxcols), dtype=np.int64)
    nxt = np.zeros((n, maxcols), dtype=np.int64)
    lo = np.full(n, maxcols, dtype=np.int64)
    hi = np.full(n, -1, dtype=np.int64)
    lo2 = np.full(n, maxcols, dtype=np.int64)
    hi2 = np.full(n, -1, dtype=np.int64)
    for i in range(init_idx.shape[0]):
        q = init_idx[i]
        cur[q, 0] = (cur[q, 0] + init_val[i]) % P
        lo[q] = 0
        hi[q] = 0
    total = 0
    vec = np.zeros(k, dtype=np.int64)
    for s in range(max_level + 1):
        ncols = binom[s + k - 1, k - 1]
        acc = np.zeros(ncols, dtype=np.int64)
        for q in range(n):
            if final_w[q] != 0 and hi[q] >= lo[q]:
                for c in range(lo[q], hi[q] + 1):
                    acc[c] = (acc[c] + cur[q, c] * final_w[q]) % P
        for c in range(ncols):
            if acc[c] != 0:
                if stop_first:
                    return s, c, total
                total = (total + acc[c]) % P
        if s == max_level:
            break
        # positions and successor ranks of every column of this level
        pos = np.zeros((k, ncols), dtype=np.int64)
        nrank = np.zeros((k, ncols), dtype=np.int64)
        for i in range(k):
            vec[i] = 0
        vec[k - 1] = s
        for c in range(ncols):
            for t in range(k):
                pos[t, c] = vec[t]
                vec[t] += 1
                nrank[t, c] = _rank(vec, k, s + 1, binom)
                vec[t] -= 1
            # advance to the lexicographic successor composition
            if c + 1 < ncols:
                j = k - 2
                while vec[j + 1] == 0:
                    j -= 1
                # vec[j] += 1 and move the remaining mass to the last slot
                restsum = 0
                for m in range(j + 1, k):
                    restsum += vec[m]
                    vec[m] = 0
                vec[j] += 1
                vec[k - 1] = restsum - 1
        active = False
        for q in range(n):
            if hi[q] < lo[q]:
                continue
            t = owner[q]
            if t < 0:
                continue
            for x in range(nl):
                r = trans[q, x]
                if r < 0:
                    continue
                for c in range(lo[q], hi[q] + 1):
                    v = cur[q, c]
                    if v == 0:
                        continue
                    w = W[t, pos[t, c], x]
                    if w == 0:
                        continue
                    nc = nrank[t, c]
                    nxt[r, nc] = (nxt[r, nc] + v * w) % P
                    if nc < lo2[r]:
                        lo2[r] = nc
                    if nc > hi2[r]:
                        hi2[r] = nc
                    active = True
        for q in range(n):
            if hi[q] >= lo[q]:
                for c in range(lo[q], hi[q] + 1):
                    cur[q, c] = 0
            lo[q] = lo2[q]
            hi[q] = hi2[q]
            lo2[q] = maxcols
            hi2[q] = -1
        cur, nxt = nxt, cur
        if not active:
            break
    return -1, -1, total


def _binom_table(m: int, width: int) -> np.ndarray:
    # only columns 0..width are ever read
    t = np.zeros((m + 1, width + 1), dtype=np.int64)
    for i in range(m + 1):
        t[i, 0] = 1
        for j in range(1, min(i, width) + 1):
            t[i, j] = t[i - 1, j - 1] + t[i - 1, j]
    return t


def unrank(col: int, k: int, s: int) -> tuple[int, ...]:
    """Length vector with lexicographic rank ``col`` among compositions of ``s``."""
    vec = []
    rem = s
    for i in range(k - 1):
        parts = k - i - 1
        for li in range(rem + 1):
            cnt = comb(rem - li + parts - 1, parts - 1)
            if col < cnt:
                vec.append(li)
                rem -= li
                break
            col -= cnt
    vec.append(rem)
    return tuple(vec)


class Compiled:
    """Array form of a disjoint union of plain deterministic automata."""

    def __init__(self, autos: list[DetKTapeAutomaton], signs: list[int], letters: list):
        k = autos[0].k
        self.k = k
        self.letters = list(letters)
        lidx = {c: i for i, c in enumerate(self.letters)}
        offsets = []
        n = 0
        for a in autos:
            offsets.append(n)
            n += len(a.states)
        owner = np.full(n, -1, dtype=np.int64)
        trans = np.full((n, len(self.letters)), -1, dtype=np.int64)
        final_w = np.zeros(n, dtype=np.int64)
        init_idx = []
        for a, off, sg in zip(autos, offsets, signs):
            sidx = {q: off + i for i, q in enumerate(a.states)}
            for q in a.states:
                owner[sidx[q]] = a.owner[q]
            for (q, c), r in a.delta.items():
                trans[sidx[q], lidx[c]] = sidx[r]
            for f in a.finals:
                final_w[sidx[f]] = sg % PRIME
            init_idx.append(sidx[a.initial])
        self.owner, self.trans, self.final_w = owner, trans, final_w
        self.init_idx = np.array(init_idx, dtype=np.int64)
        self.init_val = np.ones(len(init_idx), dtype=np.int64)
        self.n = n

    def run(self, W: np.ndarray, max_level: int, stop_first: bool):
        k = self.k
        cols = comb(max_level + k - 1, k - 1)
        if self.n * cols > MAX_CELLS:
            raise BudgetError(
                f"series evaluation needs {self.n * cols} cells (cap {MAX_CELLS})",
                cap=MAX_CELLS, needed=self.n * cols, stage="series")
        binom = _binom_table(max_level + k + 1, k)
        return _level_dp(self.owner, self.trans, self.final_w, self.init_idx, self.init_val,
                         W, max_level, k, binom, stop_first)


def random_weights(rng: np.random.Generator, k: int, max_level: int, nl: int) -> np.ndarray:
    return rng.integers(1, PRIME, size=(k, max_level + 1, nl), dtype=np.int64)


def _letters_of(*autos: DetKTapeAutomaton) -> list:
    seen = {}
    for a in autos:
        for c in a.alphabet:
            seen.setdefault(c, None)
        for (_, c) in a.delta:
            seen.setdefault(c, None)
    return list(seen)


def find_difference(a: DetKTapeAutomaton, b: DetKTapeAutomaton, max_level: int,
                    seed: int = 0, trials: int = 2):
    """Least tuple (length, length vector, letters) accepted by exactly one of two plain
    automata among tuples of total length <= ``max_level``; ``None`` if they agree.

    Agreement is certain up to a failure probability below ``trials * max_level / 2^31``
    per trial; a reported difference is always checked by direct simulation.
    """
    if a.endmarked or b.endmarked:
        raise ValueError("find_difference expects plain automata")
    letters = _letters_of(a, b)
    comp = Compiled([a, b], [1, -1], letters)
    rng = np.random.default_rng(seed)
    k, nl = a.k, len(letters)
    hit = None
    for _ in range(trials):
        W = random_weights(rng, k, max_level, nl)
        s, col, _ = comp.run(W, max_level, True)
        if s >= 0:
            hit = (s, col)
            break
    if hit is None:
        return None
    s, col = hit
    lengths = unrank(col, k, s)
    for attempt in range(8):
        tup = _self_reduce(comp, rng, lengths, s, col, nl)
        if tup is not None:
            words = tuple(tuple(letters[i] for i in w) for w in tup)
            if (run_plain(a, words) in a.finals) != (run_plain(b, words) in b.finals):
                return words
    raise RuntimeError("self-reduction failed to isolate a difference")


def _self_reduce(comp: Compiled, rng, lengths, s, col, nl):
    k = comp.k
    W = random_weights(rng, k, s, nl)
    chosen = [[] for _ in range(k)]
    for t in range(k):
        for i in range(lengths[t]):
            found = False
            for x in range(nl):
                W2 = W.copy()
                W2[t, i, :] = 0
                W2[t, i, x] = 1
                lev, c, _ = comp.run(W2, s, True)
                if (lev, c) == (s, col):
                    W = W2
                    chosen[t].append(x)
                    found = True
                    break
            if not found:
                return None
    return chosen


def fingerprint_residual(a: DetKTapeAutomaton, tape: int, prefix: tuple, bound: int,
                         W: np.ndarray, letters: list, comp: Compiled | None = None) -> int:
    """Evaluation of the residual ``{w : (prefix on tape) . w in R(a)}`` truncated at
    total length ``bound`` (letters of ``a`` are plain; ``W`` is shared by all calls).
    """
    lidx = {c: i for i, c in enumerate(letters)}
    k = a.k
    m = len(prefix)
    max_level = m + bound
    Wf = np.empty((k, max_level + 1, len(letters)), dtype=np.int64)
    for t in range(k):
        if t == tape:
            Wf[t, :m, :] = 0
            for i, c in enumerate(prefix):
                Wf[t, i, lidx[c]] = 1
            Wf[t, m:, :] = W[t, :max_level + 1 - m, :]
        else:
            Wf[t] = W[t, :max_level + 1, :]
    if comp is None:
        comp = Compiled([a], [1], letters)
    _, _, total = comp.run(Wf, max_level, False)
    return int(total)
