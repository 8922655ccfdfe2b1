"""Named example relations used by tests, the CLI and the acceptance suite."""
from __future__ import annotations

import re
from itertools import product
from math import log2

from .automata import END, PAD, DetKTapeAutomaton, Dfa, Dpa, KTapeAutomaton, Nba
from .errors import RelkitError

AB = ("a", "b")


def len2(alphabet=AB) -> DetKTapeAutomaton:
    """{(x, y) : |x| + |y| >= 2}: tape 1 is read completely, then tape 2."""
    owner, delta = {}, {}
    for t in (0, 1):
        for c in range(3):
            owner[f"t{t + 1}c{c}"] = t
            for x in alphabet:
                delta[(f"t{t + 1}c{c}", x)] = f"t{t + 1}c{min(c + 1, 2)}"
    for c in range(3):
        delta[(f"t1c{c}", END)] = f"t2c{c}"
        delta[(f"t2c{c}", END)] = "done" if c == 2 else "short"
    owner["done"] = 0
    owner["short"] = 0
    return DetKTapeAutomaton(2, alphabet, list(owner), owner, "t1c0", {"done"}, delta)


def eq_det(alphabet=AB) -> DetKTapeAutomaton:
    """Equality read letter by letter, alternating between the tapes."""
    owner = {"s": 0, "e": 1, "done": 0}
    delta = {("s", END): "e", ("e", END): "done"}
    for x in alphabet:
        owner[f"w{x}"] = 1
        delta[("s", x)] = f"w{x}"
        delta[(f"w{x}", x)] = "s"
    return DetKTapeAutomaton(2, alphabet, list(owner), owner, "s", {"done"}, delta)


def eq_conv(alphabet=AB) -> Dfa:
    """Equality as a DFA over convolutions (letters of (alphabet + PAD)^2)."""
    letters = [(x, y) for x in alphabet + (PAD,) for y in alphabet + (PAD,) if (x, y) != (PAD, PAD)]
    delta = {}
    for c in letters:
        delta[("eq", c)] = "eq" if c[0] == c[1] else "no"
        delta[("no", c)] = "no"
    return Dfa(letters, ("eq", "no"), "eq", delta, {"eq"})


def subseq(alphabet=AB) -> DetKTapeAutomaton:
    """{(x, y) : x is a scattered subword of y}, greedy embedding."""
    owner = {"p": 0, "skip": 1, "done": 0}
    delta = {("p", END): "skip", ("skip", END): "done"}
    for x in alphabet:
        delta[("skip", x)] = "skip"
        owner[f"f{x}"] = 1
        delta[("p", x)] = f"f{x}"
        for y in alphabet:
            delta[(f"f{x}", y)] = "p" if y == x else f"f{x}"
    return DetKTapeAutomaton(2, alphabet, list(owner), owner, "p", {"done"}, delta)


def infix(alphabet=AB) -> KTapeAutomaton:
    """{(x, y) : x is a factor of y}."""
    trans = []
    for c in alphabet:
        trans.append(("pre", ((), (c,)), "pre"))
        trans.append(("pre", ((c,), (c,)), "mid"))
        trans.append(("mid", ((c,), (c,)), "mid"))
        trans.append(("mid", ((), (c,)), "post"))
        trans.append(("post", ((), (c,)), "post"))
    trans.append(("pre", ((), ()), "post"))
    return KTapeAutomaton(2, alphabet, ("pre", "mid", "post"), "pre", {"pre", "mid", "post"}, trans)


def simon(n: int) -> DetKTapeAutomaton:
    """{(u, v) : |v| <= 2n and v is a scattered subword of u} over n letters.

    Tape 2 is read one letter at a time; each letter is then searched greedily on tape 1.
    The state count is (2n + 1)(n + 1) + 2.
    """
    if not 1 <= n <= 26:
        raise RelkitError("SIMON(n) needs 1 <= n <= 26")
    alphabet = tuple(chr(ord("a") + i) for i in range(n))
    owner, delta = {}, {}
    for i in range(2 * n + 1):
        owner[f"v{i}"] = 1
        delta[(f"v{i}", END)] = "rest"
        if i < 2 * n:
            for x in alphabet:
                owner[f"u{i}{x}"] = 0
                delta[(f"v{i}", x)] = f"u{i}{x}"
                for y in alphabet:
                    delta[(f"u{i}{x}", y)] = f"v{i + 1}" if y == x else f"u{i}{x}"
    owner["rest"] = 0
    owner["done"] = 0
    for x in alphabet:
        delta[("rest", x)] = "rest"
    delta[("rest", END)] = "done"
    return DetKTapeAutomaton(2, alphabet, list(owner), owner, "v0", {"done"}, delta)


def simon_state_bound(n: int, c: float = 4.0) -> float:
    return c * n * n * max(1.0, log2(n))


# ---------------------------------------------------------------------------
# omega relations over pairs

def _pairs(alphabet):
    return [(x, y) for x in alphabet for y in alphabet]


def eq_omega(alphabet=AB) -> Dpa:
    delta = {}
    for c in _pairs(alphabet):
        delta[("eq", c)] = "eq" if c[0] == c[1] else "no"
        delta[("no", c)] = "no"
    return Dpa(_pairs(alphabet), ("eq", "no"), "eq", delta, {"eq": 0, "no": 1})


def neq_omega(alphabet=AB) -> Nba:
    delta = {}
    for c in _pairs(alphabet):
        delta[("same", c)] = ("same",) if c[0] == c[1] else ("diff",)
        delta[("diff", c)] = ("diff",)
    return Nba(_pairs(alphabet), ("same", "diff"), "same", {"diff"}, delta)


def ee_omega(alphabet=AB) -> Nba:
    """Equal ends: the components eventually agree letter by letter."""
    delta = {}
    for c in _pairs(alphabet):
        delta[("wait", c)] = ("wait", "tail") if c[0] == c[1] else ("wait",)
        if c[0] == c[1]:
            delta[("tail", c)] = ("tail",)
    return Nba(_pairs(alphabet), ("wait", "tail"), "wait", {"tail"}, delta)


def ee_omega_dpa(alphabet=AB) -> Dpa:
    delta = {}
    for c in _pairs(alphabet):
        for q in ("agree", "differ"):
            delta[(q, c)] = "agree" if c[0] == c[1] else "differ"
    return Dpa(_pairs(alphabet), ("agree", "differ"), "agree", delta, {"agree": 2, "differ": 1})


def not_ee_omega(alphabet=AB) -> Nba:
    """Infinitely many positions where the components differ."""
    delta = {}
    for c in _pairs(alphabet):
        for q in ("agree", "differ"):
            delta[(q, c)] = ("agree",) if c[0] == c[1] else ("differ",)
    return Nba(_pairs(alphabet), ("agree", "differ"), "agree", {"differ"}, delta)


CATALOG = {
    "LEN2": len2,
    "EQ": eq_det,
    "EQ_CONV": eq_conv,
    "SUBSEQ": subseq,
    "INFIX": infix,
    "EQ_OMEGA": eq_omega,
    "NEQ_OMEGA": neq_omega,
    "EE_OMEGA": ee_omega,
    "EE_OMEGA_DPA": ee_omega_dpa,
    "NOT_EE_OMEGA": not_ee_omega,
}


def names() -> list[str]:
    return list(CATALOG) + ["SIMON(n)"]


def catalog(name: str):
    """Look up a catalog entry; ``SIMON(n)`` takes its parameter in the name."""
    m = re.fullmatch(r"SIMON\((\d+)\)", name.strip())
    if m:
        return simon(int(m.group(1)))
    try:
        return CATALOG[name.strip()]()
    except KeyError:
        raise RelkitError(f"unknown catalog entry {name!r}; known: {', '.join(names())}") from None


__all__ = ["catalog", "names", "simon", "simon_state_bound", "CATALOG"]
