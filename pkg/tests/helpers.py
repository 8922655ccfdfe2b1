"""Small shared utilities for the test-suite."""
import itertools

from relkit.automata import Dpa

AB = ("a", "b")


def words(alphabet, max_len):
    out = [()]
    for n in range(1, max_len + 1):
        out += list(itertools.product(alphabet, repeat=n))
    return out


def tuples_upto(k, total, alphabet=AB):
    """All k-tuples of words with total length at most ``total``."""
    ws = words(alphabet, total)
    return [u for u in itertools.product(ws, repeat=k) if sum(map(len, u)) <= total]


def first_tape_dpa(d):
    """DPA over letter pairs that runs ``d`` on the first component only."""
    pairs = tuple(itertools.product(d.alphabet, repeat=2))
    delta = {(q, c): d.delta[(q, c[0])] for q in d.states for c in pairs}
    return Dpa(pairs, d.states, d.initial, delta, d.priority)
