"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line (printed immediately and repeated in the terminal
summary) before asserting, so a failing criterion still reports what it measured.
"""
import dataclasses
import itertools
import random
import time

import conftest
from relkit import catalog as C
from relkit.automata import relabel, trim, with_end
from relkit.drat_rec import (build_independent, decide_recognizable, eq_to_rec, independent_to_det,
                             validate_witness)
from relkit.equiv import odot, residual_fixed, residual_prefix
from relkit.generate import pair_alphabet, random_det, random_dpa, random_nba, random_tuple
from relkit.omega_rec import (co_equiv_nba, decide_omega_recognizable, expand_clique,
                              has_infinite_clique, three_cycles)
from relkit.omega_rec import validate_certificate as validate_clique
from relkit.oracles import bounded_equiv, member_det, member_upword
from relkit.sync import compute_partitions, decide_synchronous, rec_to_sync
from relkit.sync import validate_certificate as validate_three_class

from helpers import AB, first_tape_dpa
from test_omega import brute_three_cycles
from test_sync import partitions_by_cycles


def report(n, ok, detail):
    line = f"[criterion {n}] {'PASS' if ok else 'FAIL'} {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_criterion_1_catalog_matrix():
    t0 = time.perf_counter()
    expected = {"LEN2": (True, True), "EQ": (False, True), "SUBSEQ": (False, False)}
    got = {}
    for name in expected:
        a = C.catalog(name)
        got[name] = (decide_recognizable(a).recognizable, decide_synchronous(a).synchronous)
    dt = time.perf_counter() - t0
    ok = got == expected and dt < 60
    shown = ", ".join(f"{n}: rec={r} sync={s}" for n, (r, s) in got.items())
    assert report(1, ok, f"{shown} ({dt:.1f}s)")


def test_criterion_2_omega_suite():
    t0 = time.perf_counter()
    v = decide_omega_recognizable(C.catalog("EQ_OMEGA"))
    eq_ok = not v.recognizable
    ne = C.catalog("NOT_EE_OMEGA")
    cert = has_infinite_clique(ne)
    fam_ok = cert is not None
    shapes = []
    if fam_ok:
        for n in range(1, 6):
            fam = expand_clique(cert, n)
            shapes.append(str(fam[0]))
            for x, y in itertools.permutations(fam, 2):
                fam_ok &= not x.same_word(y) and member_upword(ne, (x, y))
    finite = []
    for seed in range(10):
        d = random_dpa(2 + seed % 3, seed, alphabet=AB)
        finite.append(has_infinite_clique(co_equiv_nba(first_tape_dpa(d), 0)) is None)
    dt = time.perf_counter() - t0
    ok = eq_ok and fam_ok and all(finite) and dt < 120
    assert report(2, ok, f"EQ_OMEGA rec={v.recognizable}, clique {cert and cert.kind} "
                         f"families n=1..5 ok={fam_ok} (e.g. {shapes[:2]}), finite-index "
                         f"none {sum(finite)}/10 ({dt:.1f}s)")


def test_criterion_3_lower_bound_family():
    sizes, equal = [], []
    for n in (1, 2):
        a = C.catalog(f"SIMON({n})")
        ind = build_independent(a)
        sizes.append(len(ind.components[0].states))
        equal.append(bounded_equiv(independent_to_det(ind), a, 6).equal)
    ok = sizes[0] >= 2 and sizes[1] >= 4 and all(equal)
    assert report(3, ok, f"component-1 sizes {sizes}, reconstruction equal up to 6: {equal}")


def test_criterion_4_reduction_metamorphics():
    bad_eq, same_count = 0, 0
    for seed in range(100):
        n = 2 + seed % 3
        a = random_det(2, n, seed)
        b = relabel(a) if seed % 3 == 0 else random_det(2, n, seed + 1000)
        same = bounded_equiv(a, b).equal
        same_count += same
        bad_eq += decide_recognizable(eq_to_rec(a, b)).recognizable != same
    bad_sync, rec_count = 0, 0
    for seed in range(50):
        a = random_det(2, 2 + seed % 3, seed + 5000)
        r = decide_recognizable(a).recognizable
        rec_count += r
        bad_sync += decide_synchronous(rec_to_sync(a)).synchronous != r
    ok = bad_eq == 0 and bad_sync == 0
    assert report(4, ok, f"eq-to-rec disagreements {bad_eq}/100 ({same_count} equal pairs), "
                         f"rec-to-sync disagreements {bad_sync}/50 ({rec_count} recognizable)")


def test_criterion_5_oracle_suites():
    pairs = pair_alphabet(AB)
    tc_ok = True
    for seed in range(20):
        a = random_nba(3, seed, alphabet=pairs, density=0.4)
        rel, relf = three_cycles(a)
        brel, brelf = brute_three_cycles(a)
        tc_ok &= brel <= rel and brelf <= relf
    for name in ("NEQ_OMEGA", "NOT_EE_OMEGA", "EE_OMEGA"):
        tc_ok &= brute_three_cycles(C.catalog(name)) == three_cycles(C.catalog(name))
    part_ok, autos = True, 0
    for seed in range(60):
        for states in range(1, 6):
            p = trim(with_end(random_det(2 + seed % 2, states, seed)))
            part_ok &= compute_partitions(p) == partitions_by_cycles(p)
            autos += 1
    rnd = random.Random(11)
    fixed_bad = prefix_bad = cases = 0
    for seed in range(60):
        k = 2 if seed % 3 else 3
        a = random_det(k, 4, seed)
        j = rnd.randrange(k)
        for _ in range(10):
            u = random_tuple(1, 4, rnd)[0]
            z = random_tuple(k - 1, 3, rnd)
            fixed_bad += member_det(residual_fixed(a, j, u), z) != member_det(a, odot([j], (u,), z))
            w = random_tuple(k, 3, rnd)
            full = w[:j] + (tuple(u) + tuple(w[j]),) + w[j + 1:]
            prefix_bad += member_det(residual_prefix(a, j, u), w) != member_det(a, full)
            cases += 1
    ok = tc_ok and part_ok and fixed_bad == 0 and prefix_bad == 0 and cases >= 500
    assert report(5, ok, f"three_cycles vs brute force ok={tc_ok}, partitions vs simple cycles "
                         f"ok={part_ok} on {autos} automata, residual mismatches "
                         f"{fixed_bad}+{prefix_bad} on {cases} cases each")


def test_criterion_6_witness_soundness():
    total = valid = 0
    mutants_rejected = mutants = 0
    # non-recognizability patterns
    subjects = [C.catalog("EQ"), C.catalog("SUBSEQ")] + [random_det(2, 3, s) for s in range(40)]
    subjects += [random_det(3, 3, s) for s in range(10)]
    for a in subjects:
        v = decide_recognizable(a)
        if v.recognizable:
            continue
        total += 1
        valid += validate_witness(a, v.witness)
        for bad in (dataclasses.replace(v.witness, v1=()),
                    dataclasses.replace(v.witness, y=v.witness.x, x=v.witness.y)
                    if v.witness.x != v.witness.y else None):
            if bad is None:
                continue
            mutants += 1
            mutants_rejected += not validate_witness(a, bad)
    # clique certificates
    nbas = [C.catalog(n) for n in ("NEQ_OMEGA", "NOT_EE_OMEGA")]
    nbas.append(co_equiv_nba(C.catalog("EQ_OMEGA"), 0))
    for a in nbas:
        c = has_infinite_clique(a)
        total += 1
        valid += c is not None and validate_clique(a, c)
        if c is not None:
            flat = tuple(dataclasses.replace(p, w=p.v, x=p.v) for p in c.chain)
            mutants += 1
            mutants_rejected += not validate_clique(a, dataclasses.replace(c, chain=flat))
    # three-class certificates
    for a in [C.catalog("SUBSEQ")] + [random_det(2, 3, s) for s in range(40)]:
        v = decide_synchronous(a)
        if v.synchronous:
            continue
        total += 1
        valid += v.certificate is not None and validate_three_class(a, v.certificate)
        if v.certificate is not None:
            cert = v.certificate
            mutants += 1
            same = dataclasses.replace(cert, prefixes=(cert.prefixes[0],) * len(cert.prefixes))
            mutants_rejected += not validate_three_class(a, same)
    ok = total > 0 and valid == total and mutants > 0 and mutants_rejected == mutants
    assert report(6, ok, f"{valid}/{total} witnesses validate, {mutants_rejected}/{mutants} "
                         f"corrupted witnesses rejected")
