"""Seeded random automata for property tests, the acceptance suite and ``relkit generate``."""
from __future__ import annotations

import random
from itertools import product

from .automata import END, DetKTapeAutomaton, Dfa, Dpa, Nba, trim

AB = ("a", "b")


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_det(k: int, states: int, seed=0, alphabet=AB, final_prob: float = 0.4,
               end_prob: float = 0.5, trimmed: bool = True) -> DetKTapeAutomaton:
    """Endmarked deterministic k-tape automaton with a total transition function.

    Each state owns a random tape; the endmarker leads to a random state with probability
    ``end_prob`` and is otherwise routed like an ordinary letter.  With ``trimmed`` the
    useless states are dropped (the relation is unchanged).
    """
    rnd = _rng(seed)
    names = [f"q{i}" for i in range(states)]
    owner = {q: rnd.randrange(k) for q in names}
    delta = {}
    for q in names:
        for c in tuple(alphabet) + (END,):
            delta[(q, c)] = rnd.choice(names)
    finals = {q for q in names if rnd.random() < final_prob}
    a = DetKTapeAutomaton(k, tuple(alphabet), names, owner, names[0], finals, delta)
    return trim(a) if trimmed else a


def random_nba(states: int, seed=0, alphabet=AB, density: float = 0.35,
               final_prob: float = 0.4) -> Nba:
    rnd = _rng(seed)
    names = [f"q{i}" for i in range(states)]
    delta = {}
    for q in names:
        for c in alphabet:
            delta[(q, c)] = tuple(r for r in names if rnd.random() < density)
    finals = {q for q in names if rnd.random() < final_prob}
    return Nba(tuple(alphabet), names, names[0], finals, delta)


def pair_alphabet(alphabet=AB) -> tuple:
    return tuple(product(alphabet, repeat=2))


def random_dpa(states: int, seed=0, alphabet=None, max_priority: int = 3) -> Dpa:
    rnd = _rng(seed)
    alphabet = pair_alphabet() if alphabet is None else tuple(alphabet)
    names = [f"q{i}" for i in range(states)]
    delta = {(q, c): rnd.choice(names) for q in names for c in alphabet}
    prio = {q: rnd.randint(0, max_priority) for q in names}
    return Dpa(alphabet, names, names[0], delta, prio)


def random_dfa(states: int, seed=0, alphabet=AB, final_prob: float = 0.4) -> Dfa:
    rnd = _rng(seed)
    names = [f"q{i}" for i in range(states)]
    delta = {(q, c): rnd.choice(names) for q in names for c in alphabet}
    return Dfa(tuple(alphabet), names, names[0], delta, {q for q in names if rnd.random() < final_prob})


def random_tuple(k: int, max_len: int, seed=0, alphabet=AB) -> tuple:
    rnd = _rng(seed)
    return tuple(tuple(rnd.choice(alphabet) for _ in range(rnd.randint(0, max_len)))
                 for _ in range(k))


__all__ = ["random_det", "random_nba", "random_dpa", "random_dfa", "random_tuple",
           "pair_alphabet"]
