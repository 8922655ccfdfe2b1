"""Line-oriented text format for every automaton type.

One declaration per line, ``#`` starts a comment.  Headers::

    ktape k=<int> det=<0|1> alphabet=<comma-list>
    nba alphabet=<comma-list>
    dpa alphabet=<comma-list>
    dfa alphabet=<comma-list>
    indep k=<int>

followed by ``state <name> [tape=<i>] [initial] [final]`` lines, ``trans`` lines and, for
parity automata, ``prio <state> <int>`` lines.  Deterministic ``ktape`` transitions are
``trans <src> <letter> <dst>`` (``END`` is the endmarker); nondeterministic ones are
``trans <src> (<w1>,...,<wk>) <dst>``.  Tuple letters are written ``(a,b)`` with ``_`` for
padding.  Tapes are numbered from 1.  An ``indep`` file holds ``component <i>
alphabet=<list>`` sections (each with its own state/trans lines, closed by ``end``) and
``finaltuple (<s1>,...,<sk>)`` lines.

Words inside tuples are letter strings when every letter is a single character, otherwise
letters are separated by ``.``.
"""
from __future__ import annotations

import re

from .automata import (END, PAD, RESERVED, DetKTapeAutomaton, Dfa, Dpa, IndependentKTape,
                       KTapeAutomaton, Nba, validate)
from .errors import ParseError

_NAME = re.compile(r"[A-Za-z0-9_.'\-\[\]]+")
_BAD_LETTER = set(" \t,()=#")


# ---------------------------------------------------------------------------
# printing

def _state_names(states) -> dict:
    names = [q if isinstance(q, str) else None for q in states]
    ok = (all(n is not None and _NAME.fullmatch(n) for n in names)
          and len(set(names)) == len(names))
    if ok:
        return {q: q for q in states}
    return {q: f"q{i}" for i, q in enumerate(states)}


def _letter(c) -> str:
    if c == END:
        return "END"
    if c == PAD:
        return "_"
    if isinstance(c, tuple):
        return "(" + ",".join(_letter(x) for x in c) + ")"
    return str(c)


def _word(w, sep: str) -> str:
    return sep.join(_letter(c) for c in w)


def _sep(alphabet) -> str:
    flat = [x for c in alphabet for x in (c if isinstance(c, tuple) else (c,))]
    return "" if all(isinstance(c, str) and len(c) == 1 for c in flat) else "."


def _states_block(states, names, initial, finals, owner=None) -> list[str]:
    out = []
    for q in states:
        parts = ["state", names[q]]
        if owner is not None:
            parts.append(f"tape={owner[q] + 1}")
        if q == initial:
            parts.append("initial")
        if q in finals:
            parts.append("final")
        out.append(" ".join(parts))
    return out


def _alpha(alphabet) -> str:
    return ",".join(_letter(c) for c in alphabet)


def dumps(a) -> str:
    """Canonical text of an automaton."""
    if isinstance(a, DetKTapeAutomaton):
        if not a.endmarked:
            raise ParseError("only endmarked deterministic automata have a text form")
        n = _state_names(a.states)
        lines = [f"ktape k={a.k} det=1 alphabet={_alpha(a.alphabet)}"]
        lines += _states_block(a.states, n, a.initial, a.finals, a.owner)
        for q in a.states:
            for c in a.letters:
                r = a.delta.get((q, c))
                if r is not None:
                    lines.append(f"trans {n[q]} {_letter(c)} {n[r]}")
    elif isinstance(a, KTapeAutomaton):
        n = _state_names(a.states)
        sep = _sep(a.alphabet)
        lines = [f"ktape k={a.k} det=0 alphabet={_alpha(a.alphabet)}"]
        lines += _states_block(a.states, n, a.initial, a.finals)
        for s, ws, d in a.transitions:
            lines.append(f"trans {n[s]} (" + ",".join(_word(w, sep) for w in ws) + f") {n[d]}")
    elif isinstance(a, Nba):
        n = _state_names(a.states)
        lines = [f"nba alphabet={_alpha(a.alphabet)}"]
        lines += _states_block(a.states, n, a.initial, a.finals)
        for q in a.states:
            for c in a.alphabet:
                for r in a.post(q, c):
                    lines.append(f"trans {n[q]} {_letter(c)} {n[r]}")
    elif isinstance(a, Dpa):
        n = _state_names(a.states)
        lines = [f"dpa alphabet={_alpha(a.alphabet)}"]
        lines += _states_block(a.states, n, a.initial, ())
        lines += [f"prio {n[q]} {a.priority[q]}" for q in a.states]
        lines += _dfa_trans(a, n)
    elif isinstance(a, Dfa):
        lines = _dfa_lines(a, "dfa")
    elif isinstance(a, IndependentKTape):
        lines = [f"indep k={a.k}"]
        names = []
        for i, d in enumerate(a.components, 1):
            lines += _dfa_lines(d, f"component {i}")
            lines.append("end")
            names.append(_state_names(d.states))
        for f in sorted(a.finals, key=lambda t: [d.states.index(x)
                                                for d, x in zip(a.components, t)]):
            lines.append("finaltuple (" + ",".join(nm[x] for nm, x in zip(names, f)) + ")")
    else:
        raise ParseError(f"no text form for {type(a).__name__}")
    return "\n".join(lines) + "\n"


def _dfa_trans(a, n) -> list[str]:
    out = []
    for q in a.states:
        for c in a.alphabet:
            r = a.delta.get((q, c))
            if r is not None:
                out.append(f"trans {n[q]} {_letter(c)} {n[r]}")
    return out


def _dfa_lines(a: Dfa, head: str) -> list[str]:
    n = _state_names(a.states)
    lines = [f"{head} alphabet={_alpha(a.alphabet)}"]
    lines += _states_block(a.states, n, a.initial, a.finals)
    return lines + _dfa_trans(a, n)


# ---------------------------------------------------------------------------
# parsing

def _split_top(s: str, line: int) -> list[str]:
    """Split on commas outside parentheses."""
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses", line)
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ParseError("unbalanced parentheses", line)
    out.append("".join(cur))
    return out


def _parse_letter(tok: str, line: int, tuple_ok: bool = True):
    tok = tok.strip()
    if tok.startswith("("):
        if not tuple_ok or not tok.endswith(")"):
            raise ParseError(f"malformed letter {tok!r}", line)
        return tuple(_parse_letter(x, line, False) if x.strip() != "_" else PAD
                     for x in _split_top(tok[1:-1], line))
    if tok == "END":
        return END
    if not tok or any(ch in _BAD_LETTER for ch in tok):
        raise ParseError(f"malformed letter {tok!r}", line)
    return tok


def _parse_alphabet(s: str, line: int) -> tuple:
    if not s:
        return ()
    letters = []
    for tok in _split_top(s, line):
        c = _parse_letter(tok, line)
        if isinstance(c, tuple):
            bad = any(x in RESERVED and x != PAD for x in c)
        else:
            bad = c in RESERVED or c == "_"
        if bad:
            raise ParseError(f"reserved symbol {tok.strip()!r} in alphabet", line)
        if c in letters:
            raise ParseError(f"duplicate letter {tok.strip()!r} in alphabet", line)
        letters.append(c)
    return tuple(letters)


def _parse_word(s: str, alphabet: tuple, line: int) -> tuple:
    s = s.strip()
    if not s:
        return ()
    if _sep(alphabet) == "":
        w = tuple(s)
    else:
        w = tuple(x.strip() for x in s.split("."))
    for c in w:
        if c not in alphabet:
            raise ParseError(f"letter {c!r} not in the alphabet", line)
    return w


def parse_word(s: str, alphabet) -> tuple:
    """Word literal over ``alphabet`` (single characters, or letters joined by ``.``)."""
    return _parse_word(s, tuple(alphabet), None)


def parse_tuple(s: str, alphabet) -> tuple:
    """Tuple literal such as ``("ab","a")`` or ``(ab,a)``."""
    s = s.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError(f"tuple literal must be parenthesized: {s!r}")
    parts = _split_top(s[1:-1], None)
    if len(parts) > 1 and parts[-1].strip() == "":
        parts = parts[:-1]
    return tuple(parse_word(p.strip().strip('"').strip("'"), alphabet) for p in parts)


def format_tuple(u) -> str:
    """Tuple literal ``("ab","a")``."""
    return "(" + ",".join('"' + "".join(map(_letter, w)) + '"' for w in u) + ")"


def _kv(tokens, line: int, allowed: set) -> dict:
    out = {}
    for t in tokens:
        if "=" not in t:
            raise ParseError(f"expected key=value, got {t!r}", line)
        k, v = t.split("=", 1)
        if k not in allowed:
            raise ParseError(f"unknown attribute {k!r}", line)
        if k in out:
            raise ParseError(f"duplicate attribute {k!r}", line)
        out[k] = v
    return out


class _Section:
    def __init__(self, kind: str, line: int, alphabet=(), k: int = 0, det: bool = True):
        self.kind, self.line, self.alphabet, self.k, self.det = kind, line, alphabet, k, det
        self.states: list = []
        self.owner: dict = {}
        self.initial = None
        self.finals: set = set()
        self.trans: list = []
        self.prio: dict = {}

    def add_state(self, toks, line):
        if not toks or not _NAME.fullmatch(toks[0]):
            raise ParseError("state needs a name", line)
        name = toks[0]
        if name in self.owner or name in self.states:
            raise ParseError(f"duplicate state {name!r}", line)
        self.states.append(name)
        seen = set()
        for t in toks[1:]:
            if t in seen:
                raise ParseError(f"repeated flag {t!r}", line)
            seen.add(t.split("=")[0])
            if t == "initial":
                if self.initial is not None:
                    raise ParseError("second initial state", line)
                self.initial = name
            elif t == "final":
                self.finals.add(name)
            elif t.startswith("tape=") and self.kind == "ktape" and self.det:
                try:
                    tape = int(t[5:])
                except ValueError:
                    raise ParseError(f"bad tape {t[5:]!r}", line) from None
                if not 1 <= tape <= self.k:
                    raise ParseError(f"tape {tape} outside 1..{self.k}", line)
                self.owner[name] = tape - 1
            else:
                raise ParseError(f"unknown state flag {t!r}", line)
        if self.kind == "ktape" and self.det and name not in self.owner:
            raise ParseError(f"state {name!r} needs tape=<i>", line)

    def build(self):
        if self.initial is None:
            raise ParseError(f"{self.kind} section starting on line {self.line} has no initial state",
                             self.line)
        sts = set(self.states)
        for _s, _c, _d, ln in self.trans:
            for q in (_s, _d):
                if q not in sts:
                    raise ParseError(f"undeclared state {q!r}", ln)
        if self.kind == "ktape" and not self.det:
            return KTapeAutomaton(self.k, self.alphabet, self.states, self.initial, self.finals,
                                  [(s, c, d) for s, c, d, _ in self.trans])
        if self.kind == "nba":
            delta: dict = {}
            for s, c, d, _ in self.trans:
                delta.setdefault((s, c), []).append(d)
            return Nba(self.alphabet, self.states, self.initial, self.finals, delta)
        delta = {}
        for s, c, d, ln in self.trans:
            if (s, c) in delta:
                raise ParseError(f"second transition from {s!r} on {_letter(c)}", ln)
            delta[(s, c)] = d
        if self.kind == "ktape":
            return DetKTapeAutomaton(self.k, self.alphabet, self.states, self.owner,
                                     self.initial, self.finals, delta, True)
        if self.kind == "dpa":
            missing = [q for q in self.states if q not in self.prio]
            if missing:
                raise ParseError(f"state {missing[0]!r} has no priority", self.line)
            return Dpa(self.alphabet, self.states, self.initial, delta, self.prio)
        return Dfa(self.alphabet, self.states, self.initial, delta, self.finals)


def loads(text: str):
    """Parse one automaton; raises :class:`ParseError` with the line number."""
    head = None
    cur: _Section | None = None
    comps: list = []
    finaltuples: list = []
    indep_k = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kw = toks[0]
        if head is None:
            if kw == "ktape":
                kv = _kv(toks[1:], ln, {"k", "det", "alphabet"})
                try:
                    k = int(kv["k"])
                except (KeyError, ValueError):
                    raise ParseError("ktape header needs k=<int>", ln) from None
                if k < 1:
                    raise ParseError("arity must be at least 1", ln)
                if kv.get("det") not in ("0", "1"):
                    raise ParseError("ktape header needs det=0 or det=1", ln)
                alpha = _parse_alphabet(kv.get("alphabet", ""), ln)
                if any(isinstance(c, tuple) for c in alpha):
                    raise ParseError("ktape alphabets hold plain letters", ln)
                cur = _Section("ktape", ln, alpha, k, kv["det"] == "1")
            elif kw in ("nba", "dpa", "dfa"):
                kv = _kv(toks[1:], ln, {"alphabet"})
                cur = _Section(kw, ln, _parse_alphabet(kv.get("alphabet", ""), ln))
            elif kw == "indep":
                kv = _kv(toks[1:], ln, {"k"})
                try:
                    indep_k = int(kv["k"])
                except (KeyError, ValueError):
                    raise ParseError("indep header needs k=<int>", ln) from None
                cur = None
            else:
                raise ParseError(f"expected a header, got {kw!r}", ln)
            head = kw
            continue
        if head == "indep" and cur is None:
            if kw == "component":
                if len(toks) < 2 or toks[1] != str(len(comps) + 1):
                    raise ParseError(f"expected component {len(comps) + 1}", ln)
                kv = _kv(toks[2:], ln, {"alphabet"})
                cur = _Section("dfa", ln, _parse_alphabet(kv.get("alphabet", ""), ln))
                continue
            if kw == "finaltuple":
                finaltuples.append((" ".join(toks[1:]), ln))
                continue
            raise ParseError(f"unknown keyword {kw!r}", ln)
        if kw in ("ktape", "nba", "dpa", "dfa", "indep", "component"):
            raise ParseError(f"unexpected header {kw!r}", ln)
        if kw == "state":
            cur.add_state(toks[1:], ln)
        elif kw == "trans":
            _trans(cur, line, ln)
        elif kw == "prio" and cur.kind == "dpa":
            if len(toks) != 3:
                raise ParseError("prio <state> <int>", ln)
            try:
                p = int(toks[2])
            except ValueError:
                raise ParseError(f"bad priority {toks[2]!r}", ln) from None
            if toks[1] in cur.prio:
                raise ParseError(f"second priority for {toks[1]!r}", ln)
            if toks[1] not in cur.states:
                raise ParseError(f"undeclared state {toks[1]!r}", ln)
            cur.prio[toks[1]] = p
        elif kw == "end" and head == "indep":
            comps.append(cur.build())
            cur = None
        else:
            raise ParseError(f"unknown keyword {kw!r}", ln)
    if head is None:
        raise ParseError("empty input: no header")
    if head == "indep":
        if cur is not None:
            raise ParseError(f"component starting on line {cur.line} lacks 'end'", cur.line)
        if len(comps) != indep_k:
            raise ParseError(f"indep k={indep_k} but {len(comps)} components")
        finals = []
        for s, ln in finaltuples:
            if not (s.startswith("(") and s.endswith(")")):
                raise ParseError("finaltuple needs (<s1>,...,<sk>)", ln)
            names = [x.strip() for x in s[1:-1].split(",")]
            if len(names) != indep_k:
                raise ParseError(f"finaltuple needs {indep_k} states", ln)
            for d, x in zip(comps, names):
                if x not in d.states:
                    raise ParseError(f"undeclared state {x!r}", ln)
            finals.append(tuple(names))
        a = IndependentKTape(comps, finals)
    else:
        a = cur.build()
    issues = validate(a)
    if issues:
        raise ParseError("; ".join(issues[:3]))
    return a


def _trans(cur: _Section, line: str, ln: int):
    body = line[len("trans"):].strip()
    m = re.fullmatch(r"(\S+)\s+(\(.*\)|\S+)\s+(\S+)", body)
    if not m:
        raise ParseError("trans <src> <label> <dst>", ln)
    src, lab, dst = m.groups()
    if cur.kind == "ktape" and not cur.det:
        if not lab.startswith("("):
            raise ParseError("nondeterministic transitions carry a word tuple", ln)
        parts = _split_top(lab[1:-1], ln)
        if len(parts) != cur.k:
            raise ParseError(f"expected {cur.k} words, got {len(parts)}", ln)
        c = tuple(_parse_word(p, cur.alphabet, ln) for p in parts)
    else:
        c = _parse_letter(lab, ln)
        ok = cur.alphabet + ((END,) if cur.kind == "ktape" else ())
        if c not in ok:
            raise ParseError(f"letter {lab!r} not in the alphabet", ln)
    cur.trans.append((src, c, dst, ln))


def load(path: str):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(a, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(a))


__all__ = ["dumps", "loads", "load", "dump", "parse_tuple", "parse_word", "format_tuple"]
