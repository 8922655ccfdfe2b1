"""``relkit`` command line.

Exit codes: 0 positive verdict, 1 negative verdict, 2 budget exceeded, 3 input error,
4 a witness failed its own re-check under ``--validate``.
"""
from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time

from . import catalog as cat
from .automata import DetKTapeAutomaton, Dpa, Nba, validate
from .drat_rec import (build_independent, decide_recognizable, eq_to_rec, pumped_words,
                       validate_witness)
from .equiv import approx_equiv, right_congruence_equiv
from .errors import BudgetError, RelkitError
from .generate import random_det
from .omega_rec import decide_omega_recognizable, has_infinite_clique
from .omega_rec import validate_certificate as validate_clique
from .oracles import bounded_equiv, enumerate_relation, index_probe, member
from .sync import decide_synchronous, rec_to_sync, synchronous_automaton
from .sync import validate_certificate as validate_sync
from .textfmt import dumps, format_tuple, loads, parse_tuple, parse_word

OK, NEG, BUDGET, INPUT, INVALID = 0, 1, 2, 3, 4


class InputError(RelkitError):
    pass


class ValidationFailure(RelkitError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# inputs and reports

def _source(spec: str):
    """Automaton and its text from a file, a catalog name or a ``random k=.. ..`` spec."""
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
        return loads(text), text
    if spec.startswith("random"):
        a = _random(spec.split()[1:])
    else:
        a = cat.catalog(spec)
    return a, dumps(a)


def _random(tokens) -> DetKTapeAutomaton:
    opts = {"k": "2", "states": "3", "seed": "0", "alphabet": "a,b"}
    for t in tokens:
        key, _, val = t.partition("=")
        if key not in opts or not val:
            raise InputError(f"bad random option {t!r}; use k=.. states=.. seed=.. alphabet=..")
        opts[key] = val
    try:
        k, n, seed = int(opts["k"]), int(opts["states"]), int(opts["seed"])
    except ValueError:
        raise InputError("k, states and seed must be integers") from None
    if k < 1 or n < 1:
        raise InputError("k and states must be positive")
    return random_det(k, n, seed, tuple(opts["alphabet"].split(",")))


def _need(a, kinds, what: str):
    if not isinstance(a, kinds):
        raise InputError(f"{what} needs {' or '.join(k.__name__ for k in kinds)}, "
                         f"got {type(a).__name__}")
    return a


class Report:
    def __init__(self, command: str, args, inputs):
        self.lines = [f"command: {command}"]
        for name, text in inputs:
            digest = hashlib.sha256(text.encode()).hexdigest()[:16]
            self.lines.append(f"input: {name} sha256:{digest}")
        self.lines.append(f"seed: {getattr(args, 'seed', 0)}")
        self.t0 = time.perf_counter()
        self.blocks: list[str] = []

    def add(self, line: str):
        self.lines.append(line)

    def block(self, tag: str, body: str):
        self.blocks.append(f"```{tag}\n{body.rstrip()}\n```")

    def witness(self, fields: dict, extra: list[str] = ()):
        body = ["witness {"] + [f"  {k}={v}" for k, v in fields.items()] + list(extra) + ["}"]
        self.block("witness", "\n".join(body))

    def emit(self, verdict: str, out=None):
        out = sys.stdout if out is None else out
        self.lines.insert(1, f"verdict: {verdict}")
        self.lines.append(f"time: {time.perf_counter() - self.t0:.3f}s")
        out.write("\n".join(self.lines + self.blocks) + "\n")


# ---------------------------------------------------------------------------
# commands

def cmd_print(args):
    a, _ = _source(args.file)
    sys.stdout.write(dumps(a))
    return OK


def cmd_validate(args):
    a, _ = _source(args.file)
    issues = validate(a)
    for i in issues:
        print(i)
    print("valid" if not issues else "invalid")
    return OK if not issues else NEG


def cmd_oracle(args):
    a, text = _source(args.file)
    rep = Report(f"oracle {args.op}", args, [(args.file, text)])
    alph = _user_alphabet(a)
    if args.op == "member":
        u = parse_tuple(args.tuple, alph)
        ok = member(a, u)
        rep.add(f"tuple: {format_tuple(u)}")
        rep.emit("member" if ok else "not_member")
        return OK if ok else NEG
    if args.op == "enum":
        ts = enumerate_relation(a, args.bound)
        rep.add(f"bound: {args.bound}")
        rep.add(f"count: {len(ts)}")
        rep.block("tuples", "\n".join(format_tuple(u) for u in ts) or "(none)")
        rep.emit("enumerated")
        return OK
    if args.op == "equiv":
        b, text2 = _source(args.other)
        rep.lines.insert(2, f"input: {args.other} sha256:"
                         f"{hashlib.sha256(text2.encode()).hexdigest()[:16]}")
        res = bounded_equiv(a, b, args.bound, seed=args.seed)
        rep.add(f"bound: {res.bound} ({'complete' if res.complete else 'partial'})")
        rep.add(f"engine: {res.engine}")
        if not res.equal:
            rep.witness({"kind": "counterexample", "u": format_tuple(res.counterexample)})
        rep.emit("equal" if res.equal else "different")
        return OK if res.equal else NEG
    if args.op == "probe":
        n = index_probe(a, args.tape - 1, args.bound)
        rep.add(f"tape: {args.tape}")
        rep.add(f"bound: {args.bound}")
        rep.emit(f"index >= {n}")
        return OK
    raise InputError(f"unknown oracle {args.op!r}")


def _user_alphabet(a):
    if hasattr(a, "components"):
        return a.components[0].alphabet
    return a.alphabet


def cmd_equiv(args):
    a, text = _source(args.file)
    _need(a, (DetKTapeAutomaton,), "equiv")
    u, v = parse_word(args.u, a.alphabet), parse_word(args.v, a.alphabet)
    rep = Report(f"equiv {args.op}", args, [(args.file, text)])
    fn = approx_equiv if args.op == "approx" else right_congruence_equiv
    ok = fn(a, args.tape - 1, u, v, bound=args.bound)
    rep.add(f"tape: {args.tape}")
    rep.emit("equivalent" if ok else "inequivalent")
    return OK if ok else NEG


def _omega_rec(args):
    a, text = _source(args.file)
    _need(a, (Dpa, Nba), "omega-rec")
    rep = Report("omega rec", args, [(args.file, text)])
    v = decide_omega_recognizable(a, complement_budget=args.cap)
    if v.recognizable:
        rep.emit("recognizable")
        return OK
    if args.validate and not validate_clique(v.subject, v.certificate):
        raise ValidationFailure("clique certificate failed its re-check")
    rep.add(f"tape: {v.tape + 1}")
    rep.witness(v.certificate.describe())
    rep.emit("not_recognizable")
    return NEG


def _clique(args):
    a, text = _source(args.file)
    _need(a, (Nba,), "clique")
    rep = Report("omega clique", args, [(args.file, text)])
    c = has_infinite_clique(a)
    if c is None:
        rep.emit("no_clique")
        return NEG
    if args.validate and not validate_clique(a, c):
        raise ValidationFailure("clique certificate failed its re-check")
    rep.witness(c.describe())
    rep.emit("infinite_clique")
    return OK


def _drat_rec(args):
    a, text = _source(args.file)
    _need(a, (DetKTapeAutomaton,), "drat-rec")
    rep = Report("drat rec", args, [(args.file, text)])
    v = decide_recognizable(a, seed=args.seed)
    if v.recognizable:
        rep.emit("recognizable")
        return OK
    w = v.witness
    if args.validate and not validate_witness(a, w):
        raise ValidationFailure("pattern witness failed its re-check")
    # pairwise inequivalent words on the witness tape
    extra = [f"  class{i}={''.join(map(str, u))}" for i, u in enumerate(pumped_words(a, w, 3))]
    rep.witness(w.describe(), extra)
    rep.emit("not_recognizable")
    return NEG


def _drat_independent(args):
    a, text = _source(args.file)
    _need(a, (DetKTapeAutomaton,), "drat independent")
    rep = Report("drat independent", args, [(args.file, text)])
    rep.add(f"cap: {args.cap}")
    res = build_independent(a, cap=args.cap, seed=args.seed)
    if not hasattr(res, "components"):
        rep.witness(res.witness.describe())
        rep.emit("not_recognizable")
        return NEG
    rep.add("component sizes: " + ", ".join(str(len(d.states)) for d in res.components))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(dumps(res))
        rep.add(f"written: {args.output}")
    else:
        rep.block("indep", dumps(res))
    rep.emit("recognizable")
    return OK


def _drat_sync(args):
    a, text = _source(args.file)
    _need(a, (DetKTapeAutomaton,), "drat-sync")
    rep = Report("drat sync", args, [(args.file, text)])
    rep.add(f"cap: {args.cap}")
    if args.emit_sync:
        res = synchronous_automaton(a, cap=args.cap, seed=args.seed)
        v = res if hasattr(res, "synchronous") else decide_synchronous(a, args.cap, args.seed,
                                                                      certificate=False)
    else:
        res = None
        v = decide_synchronous(a, args.cap, args.seed)
    for line in v.trace():
        rep.add(line)
    if v.synchronous:
        if res is not None:
            with open(args.emit_sync, "w", encoding="utf-8") as fh:
                fh.write(dumps(res))
            rep.add(f"written: {args.emit_sync} ({len(res.states)} states)")
        rep.emit("synchronous")
        return OK
    rep.add(f"state: {v.state}")
    fields = {"kind": "sync"}
    if v.certificate is not None:
        if args.validate and not validate_sync(a, v.certificate):
            raise ValidationFailure("three-class certificate failed its re-check")
        fields.update(kind="three_class", **v.certificate.describe())
    elif v.evidence is not None and v.evidence.witness is not None:
        fields.update(kind="summary_pattern", **{k: val for k, val in
                                                 v.evidence.witness.describe().items()
                                                 if k != "kind"})
    rep.witness(fields)
    rep.emit("not_synchronous")
    return NEG


def cmd_decide(args):
    return {"omega-rec": _omega_rec, "clique": _clique, "drat-rec": _drat_rec,
            "drat-sync": _drat_sync}[args.kind](args)


def cmd_omega(args):
    return {"rec": _omega_rec, "clique": _clique}[args.op](args)


def cmd_drat(args):
    return {"rec": _drat_rec, "independent": _drat_independent, "sync": _drat_sync}[args.op](args)


def cmd_generate(args):
    spec = " ".join(args.spec)
    a = _random(args.spec[1:]) if args.spec[0] == "random" else cat.catalog(spec)
    text = f"# {spec}\n" + dumps(a)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_reduce(args):
    srcs = [_source(f) for f in args.files]
    for a, _ in srcs:
        _need(a, (DetKTapeAutomaton,), args.kind)
    if args.kind == "eq-to-rec":
        if len(srcs) != 2:
            raise InputError("eq-to-rec takes two automata")
        out = eq_to_rec(srcs[0][0], srcs[1][0])
    else:
        if len(srcs) != 1:
            raise InputError("rec-to-sync takes one automaton")
        out = rec_to_sync(srcs[0][0])
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(dumps(out))
    elif not args.check:
        sys.stdout.write(dumps(out))
    if not args.check:
        return OK
    rep = Report(f"reduce {args.kind} --check", args,
                 [(f, t) for f, (_, t) in zip(args.files, srcs)])
    if args.kind == "eq-to-rec":
        lhs = bounded_equiv(srcs[0][0], srcs[1][0], seed=args.seed).equal
        rhs = decide_recognizable(out, seed=args.seed).recognizable
        rep.add(f"equal: {lhs}")
        rep.add(f"reduced recognizable: {rhs}")
    else:
        lhs = decide_recognizable(srcs[0][0], seed=args.seed).recognizable
        rhs = decide_synchronous(out, args.cap, args.seed, certificate=False).synchronous
        rep.add(f"recognizable: {lhs}")
        rep.add(f"reduced synchronous: {rhs}")
    rep.emit("agree" if lhs == rhs else "disagree")
    return OK if lhs == rhs else NEG


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=None,
                        help="state cap (default 2000; 20000 for omega complementation)")
    common.add_argument("--bound", type=int, default=None)
    common.add_argument("--validate", action="store_true")

    p = _Parser(prog="relkit", description="Recognizability and synchronicity of relations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("print", help="parse and print canonically")
    s.add_argument("file")
    s.set_defaults(fn=cmd_print)
    s = sub.add_parser("validate", help="check automaton invariants")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("oracle", parents=[common], help="brute-force semantics")
    s.add_argument("op", choices=["member", "enum", "equiv", "probe"])
    s.add_argument("file")
    s.add_argument("tuple", nargs="?", help="tuple literal for member")
    s.add_argument("--other", help="second automaton for equiv")
    s.add_argument("--tape", type=int, default=1)
    s.set_defaults(fn=cmd_oracle)

    s = sub.add_parser("equiv", parents=[common], help="residual equivalences")
    s.add_argument("op", choices=["approx", "rc"])
    s.add_argument("file")
    s.add_argument("u")
    s.add_argument("v")
    s.add_argument("--tape", type=int, default=1)
    s.set_defaults(fn=cmd_equiv)

    s = sub.add_parser("omega", parents=[common], help="omega-synchronous relations")
    s.add_argument("op", choices=["rec", "clique"])
    s.add_argument("file")
    s.set_defaults(fn=cmd_omega)

    s = sub.add_parser("drat", parents=[common], help="deterministic rational relations")
    s.add_argument("op", choices=["rec", "independent", "sync"])
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.add_argument("--emit-sync", dest="emit_sync")
    s.set_defaults(fn=cmd_drat)

    s = sub.add_parser("decide", parents=[common], help="run a decision procedure")
    s.add_argument("kind", choices=["omega-rec", "drat-rec", "drat-sync", "clique"])
    s.add_argument("file")
    s.add_argument("--emit-sync", dest="emit_sync")
    s.set_defaults(fn=cmd_decide)

    s = sub.add_parser("generate", help="catalog entry or random automaton")
    s.add_argument("spec", nargs="+")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_generate)

    s = sub.add_parser("reduce", parents=[common], help="reductions between problems")
    s.add_argument("kind", choices=["eq-to-rec", "rec-to-sync"])
    s.add_argument("files", nargs="+")
    s.add_argument("-o", "--output")
    s.add_argument("--check", action="store_true")
    s.set_defaults(fn=cmd_reduce)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    if getattr(args, "cap", 0) is None:
        omega = args.command == "omega" or getattr(args, "kind", "") in ("omega-rec", "clique")
        args.cap = 20000 if omega else 2000
    if args.command == "oracle":
        if args.op == "member" and args.tuple is None:
            print("relkit: error: oracle member needs a tuple literal", file=sys.stderr)
            return INPUT
        if args.op == "equiv" and args.other is None:
            print("relkit: error: oracle equiv needs --other", file=sys.stderr)
            return INPUT
        if args.op in ("enum", "probe") and args.bound is None:
            args.bound = 4
    try:
        return args.fn(args)
    except BudgetError as e:
        print(f"budget exceeded: {e} (cap={e.cap}, needed={e.needed}, stage={e.stage})",
              file=sys.stderr)
        return BUDGET
    except ValidationFailure as e:
        print(f"validation failed: {e}", file=sys.stderr)
        return INVALID
    except (RelkitError, OSError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return INPUT


if __name__ == "__main__":
    sys.exit(main())
