"""Acceptance suite: one check per criterion, each printing a single PASS/FAIL line.

Run under pytest (``pytest -v -s tests/test_acceptance.py``) or directly as a
script.  Bounds: rank 2 unless noted; universal properties are verified by the
oracle on test objects of rank 1.
"""

from __future__ import annotations

import json
import os
import random
import sys
import tempfile
import time
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

import pytest  # noqa: E402

from helpers import cospans, is_free_z6, nullspace_by_scan  # noqa: E402
from stabex.cli import main as cli_main  # noqa: E402
from stabex.constructions import ChainCategory, SpectrumCategory, equivalence_sweep  # noqa: E402
from stabex.exact import axiom_suite, check_E0, empty_class, split_class, stable_class  # noqa: E402
from stabex.instances import parse_instance  # noqa: E402
from stabex.karoubi import (  # noqa: E402
    KaroubiCategory,
    fully_faithful,
    idempotents_split,
    in_essential_image,
    transfer_semistable,
)
from stabex.limits import (  # noqa: E402
    CokernelCert,
    KernelCert,
    Square,
    kernel_lift,
    paste_pullback,
    pullback,
    verify_universal,
)
from stabex.stability import (  # noqa: E402
    certify_semistable_cokernel,
    compose_semistable,
    direct_sum_semistable,
    obscure_cokernel,
    replay_trace,
)

ORACLE = 1
GOLDEN = HERE / "golden" / "classify_zmod6_b1.jsonl"


def _z6():
    return parse_instance("zmod:6")


def _p2():
    return parse_instance("pairs:2")


def report(number: int, title: str, ok: bool, detail: str, seconds: float) -> str:
    return f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail} ({seconds:.1f}s)"


# -- 1 ------------------------------------------------------------------------------

def criterion_1():
    cat = _z6()
    cases = missing = failures = 0
    for d, h in cospans(cat, 2):
        cases += 1
        sq = pullback(cat, d, h)
        has_kernel = cat.kernel(cat.block_row(h, d)) is not None
        free = is_free_z6(nullspace_by_scan(cat.block_row(h, d)))
        if bool(sq) != has_kernel or has_kernel != free:
            failures += 1
            continue
        if not sq:
            missing += 1
        elif not verify_universal(sq, ORACLE):
            failures += 1
    return failures == 0, f"{cases} cospans, {missing} without pullback, {failures} failures"


# -- 2 ------------------------------------------------------------------------------

def paste_configurations(cat, bound):
    for d, h in cospans(cat, bound):
        right = pullback(cat, d, h)
        if not right:
            continue
        for A in cat.objects(bound):
            for i in cat.reps(A, d.dom, "right"):
                left = pullback(cat, i, right.g)
                if not left:
                    continue
                yield left, right
                Ap = left.apex
                for u in (cat.zero(Ap, Ap), cat.scale(2, cat.identity(Ap))):
                    yield Square(cat, left.d, left.h, cat.compose(left.g, u),
                                 cat.compose(left.d_prime, u)), right


def criterion_2(sample: int = 300, seed: int = 0):
    parts, bad = [], 0
    for cat in (_z6(), _p2()):
        exhaustive = list(paste_configurations(cat, 1))
        wide = list(paste_configurations(cat, 2))
        picked = random.Random(seed).sample(wide, min(sample, len(wide)))
        for left, right in exhaustive + picked:
            if not paste_pullback(left, right, ORACLE).holds:
                bad += 1
        lifts = 0
        for d, h in cospans(cat, 2):
            k = cat.kernel(d)
            sq = pullback(cat, d, h)
            if k is None or not sq:
                continue
            lifts += 1
            try:
                kernel_lift(KernelCert(cat, d, k), sq, ORACLE)
            except Exception:
                bad += 1
        parts.append(f"{cat.name}: {len(exhaustive)} pastings at rank 1, {len(picked)}/{len(wide)} "
                     f"sampled at rank 2, {lifts} kernel lifts")
    return bad == 0, "; ".join(parts) + f"; {bad} counterexamples"


# -- 3 ------------------------------------------------------------------------------

def _cokernel_reps(cat, bound, side):
    objs = cat.objects(bound)
    for B in objs:
        for C in objs:
            for d in cat.reps(B, C, side):
                if cat.is_cokernel(d):
                    yield d


def criterion_3():
    total = agree = 0
    for cat in (_z6(), _p2()):
        objs = cat.objects(2)
        for B in objs:
            for C in objs:
                ds = [d for d in cat.reps(B, C, "right") if cat.is_cokernel(d)]
                for D in objs:
                    for p in cat.reps(C, D, "left"):
                        if not cat.is_cokernel(p):
                            continue
                        for d in ds:
                            res = compose_semistable(cat, d, p, None, 2, ORACLE)
                            direct = certify_semistable_cokernel(cat, cat.compose(p, d), bound=2)
                            total += 1
                            agree += res.verdict.certified == direct.certified
        small = list(_cokernel_reps(cat, 1, "right"))
        for d in small:
            for d2 in small:
                res = direct_sum_semistable(cat, d, d2, None, 2, ORACLE)
                direct = certify_semistable_cokernel(cat, cat.diag(d, d2), bound=2)
                total += 1
                agree += res.verdict.certified == direct.certified
    return agree == total, f"{agree}/{total} constructive verdicts agree with direct certification"


# -- 4 ------------------------------------------------------------------------------

def criterion_4():
    cat = _z6()
    objs = cat.objects(2)
    cases = replay_failures = disagreements = steps = 0
    for B in objs:
        for C in objs:
            ds = cat.reps(B, C, "right")
            for D in objs:
                for p in cat.reps(C, D, "left"):
                    if cat.kernel(p) is None:
                        continue
                    for d in ds:
                        pd = cat.compose(p, d)
                        if not cat.is_cokernel(pd) or not certify_semistable_cokernel(cat, pd, bound=2).certified:
                            continue
                        cases += 1
                        v, trace = obscure_cokernel(cat, d, p, None, 2, "direct", ORACLE)
                        steps += len(trace.steps)
                        if replay_trace(trace, ORACLE):
                            replay_failures += 1
                        direct = certify_semistable_cokernel(cat, p, bound=2)
                        w, ktrace = obscure_cokernel(cat, d, p, None, 2, "karoubi", ORACLE)
                        if not (v.certified == w.certified == direct.certified):
                            disagreements += 1
                        if replay_trace(ktrace, ORACLE):
                            replay_failures += 1
    ok = cases > 0 and replay_failures == 0 and disagreements == 0
    return ok, (f"{cases} inputs, {steps} final squares replayed, {replay_failures} replay failures, "
                f"{disagreements} route disagreements")


# -- 5 ------------------------------------------------------------------------------

def criterion_5():
    K = KaroubiCategory(_z6())
    split_ok, n_idem = idempotents_split(K, 2, ORACLE)
    ff = fully_faithful(K, 2)
    outside = []
    for c in (3, 4):
        X = K.obj(1, K.base.mor([[c]]))
        outside.append(in_essential_image(K, X, 2) is None)
    base = K.base
    reports = [transfer_semistable(K, d, 2) for d in _cokernel_reps(base, 2, "iso")]
    agree = sum(r.agree for r in reports)
    ok = split_ok and ff and all(outside) and agree == len(reports)
    return ok, (f"{n_idem} idempotents split={split_ok}, fully faithful={ff}, "
                f"(R,3),(R,4) outside Im(H)={all(outside)}, transfer {agree}/{len(reports)}")


# -- 6 ------------------------------------------------------------------------------

def criterion_6():
    runs = [("zmod:6", 2), ("pairs:2", 2), ("karoubi:zmod:6", 1)]
    lines, ok = [], True
    for desc, bound in runs:
        for cls in (stable_class(bound), split_class()):
            rep = axiom_suite(parse_instance(desc), cls, bound, ORACLE)
            failed = [o.axiom for o in rep.outcomes if not o.passed]
            ok &= not failed
            cases = sum(o.cases for o in rep.outcomes)
            lines.append(f"{desc}@{bound} {cls.name.split('(')[0]}: "
                         f"{'ok' if not failed else 'failed ' + ','.join(failed)} ({cases} cases)")
    return ok, "; ".join(lines)


# -- 7 ------------------------------------------------------------------------------

def criterion_7():
    runs = [(ChainCategory, "zmod:2", 2), (SpectrumCategory, "zmod:2", 2),
            (ChainCategory, "zmod:6", 1), (SpectrumCategory, "zmod:6", 1)]
    lines, ok = [], True
    for kind, desc, bound in runs:
        rep = equivalence_sweep(kind(parse_instance(desc), 2), bound)
        ok &= rep.passed and rep.total > 0
        lines.append(f"{kind.kind} {desc}@{bound} {rep.agreeing}/{rep.total}")
    return ok, "; ".join(lines)


# -- 8 ------------------------------------------------------------------------------

def criterion_8():
    golden = GOLDEN.read_bytes()
    matches = runs = 0
    old = os.environ.get("STABEX_THREADS")
    devnull = open(os.devnull, "w")
    try:
        with tempfile.TemporaryDirectory() as tmp:
            for threads in ("1", "2", "4"):
                os.environ["STABEX_THREADS"] = threads
                for k in range(2):
                    out = Path(tmp) / f"t{threads}_{k}.jsonl"
                    saved = sys.stdout, sys.stderr
                    sys.stdout = sys.stderr = devnull
                    try:
                        code = cli_main(["classify", "--instance", "zmod:6", "--bound", "1", "--out", str(out)])
                    finally:
                        sys.stdout, sys.stderr = saved
                    runs += 1
                    matches += code == 0 and out.read_bytes() == golden
    finally:
        devnull.close()
        if old is None:
            os.environ.pop("STABEX_THREADS", None)
        else:
            os.environ["STABEX_THREADS"] = old
    n = len(golden.splitlines())
    return matches == runs, f"{matches}/{runs} runs byte-identical to the {n}-record golden corpus (threads 1, 2, 4)"


# -- 9 ------------------------------------------------------------------------------

def criterion_9():
    cat = _z6()
    checks = {}
    f = cat.mor([[1, 0]])
    k = cat.kernel(f)
    checks["true kernel accepted"] = bool(verify_universal(KernelCert(cat, f, k), ORACLE))
    checks["doubled kernel rejected"] = not verify_universal(KernelCert(cat, f, cat.block_row(k, k)), ORACLE)
    checks["zero kernel rejected"] = not verify_universal(KernelCert(cat, f, cat.zero(0, 2)), ORACLE)
    g = cat.mor([[1], [0]])
    checks["scaled cokernel rejected"] = not verify_universal(CokernelCert(cat, g, cat.scale(2, cat.cokernel(g))), ORACLE)
    sq = pullback(cat, cat.mor([[1, 1]]), cat.mor([[1]]))
    checks["true square accepted"] = bool(verify_universal(sq, ORACLE))
    checks["skewed square rejected"] = not verify_universal(
        Square(cat, sq.d, sq.h, sq.g, cat.scale(5, sq.d_prime)), ORACLE)
    checks["shrunk square rejected"] = not verify_universal(
        Square(cat, sq.d, sq.h, cat.scale(2, sq.g), cat.scale(2, sq.d_prime)), ORACLE)
    checks["empty class fails E0"] = not check_E0(cat, empty_class()).passed
    failed = [name for name, good in checks.items() if not good]
    return not failed, f"{len(checks) - len(failed)}/{len(checks)} controls behave" + (
        f" (failed: {', '.join(failed)})" if failed else "")


CRITERIA = [
    (1, "pullback exists iff kernel of [h d] exists; squares pass the oracle", criterion_1),
    (2, "pasting and kernel lifting", criterion_2),
    (3, "composition and direct sums agree with direct certification", criterion_3),
    (4, "obscure-axiom traces replay; completion route agrees", criterion_4),
    (5, "idempotent completion suite", criterion_5),
    (6, "exact-category axioms for stable and split classes", criterion_6),
    (7, "chain and spectrum stability is positionwise", criterion_7),
    (8, "classification is deterministic", criterion_8),
    (9, "negative controls", criterion_9),
]


def run_criterion(number, title, fn):
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as e:  # a crash is a failure of the criterion
        ok, detail = False, f"raised {type(e).__name__}: {e}"
    return ok, report(number, title, ok, detail, time.perf_counter() - start)


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, line = run_criterion(number, title, fn)
    with capsys.disabled():
        print("\n" + line, flush=True)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
