"""Command-line frontend.

JSON reports go to standard output, one-line summaries to standard error.
Exit status: 0 when every check passes, 1 when a check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .constructions import ChainCategory, SpectrumCategory, kernel_cokernel_pairs, positionwise_stable_equiv
from .core import Category
from .exact import axiom_suite, class_by_name
from .instances import DescriptorError, parse_instance
from .karoubi import (
    KaroubiCategory,
    fully_faithful,
    idempotents_split,
    in_essential_image,
    transfer_semistable,
)
from .stability import certify_stable_ses

SCHEMA = "stabex.report/1"
CORPUS_SCHEMA = "stabex.classify-record/1"


def thread_count() -> int:
    raw = os.environ.get("STABEX_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map(fn, items):
    """Order-preserving map over at most STABEX_THREADS worker threads."""
    n = thread_count()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _sample(items: list, args) -> list:
    if args.sample is None or args.sample >= len(items):
        return items
    rng = random.Random(args.seed)
    keep = sorted(rng.sample(range(len(items)), args.sample))
    return [items[k] for k in keep]


def _config(args) -> dict:
    return {"instance": args.instance, "bound": args.bound, "oracle_bound": args.oracle_bound,
            "class": args.cls, "degrees": args.degrees, "length": args.length,
            "sample": args.sample, "seed": args.seed}


# -- commands -----------------------------------------------------------------------

def classify_records(cat: Category, bound: int, args=None) -> list[dict]:
    pairs = list(kernel_cokernel_pairs(cat, bound, up_to_iso=False))
    if args is not None:
        pairs = _sample(pairs, args)

    def record(pair):
        i, d = pair
        res = certify_stable_ses(cat, i, d, bound, verify_pair=False)
        rec = {"schema": CORPUS_SCHEMA, "instance": cat.name, "bound": bound,
               "i": cat.describe_mor(i), "d": cat.describe_mor(d),
               "verdict": "Stable" if res.stable else "NotStable", "witness": None}
        if not res.stable:
            w = res.witness
            rec["witness"] = {"side": w.kind, "failure": w.outcome.failure,
                              "h": cat.describe_mor(w.outcome.witness)}
        return rec

    return _map(record, pairs)


def cmd_classify(args, cat):
    recs = classify_records(cat, args.bound, args)
    if args.out:
        with open(args.out, "w") as fh:
            for r in recs:
                fh.write(json.dumps(r, sort_keys=True) + "\n")
    stable = sum(r["verdict"] == "Stable" for r in recs)
    payload = {"pairs": len(recs), "stable": stable, "not_stable": len(recs) - stable, "records": recs}
    return payload, True, f"{len(recs)} kernel-cokernel pairs, {stable} stable"


def cmd_axioms(args, cat):
    cls = class_by_name(args.cls, args.bound)
    rep = axiom_suite(cat, cls, args.bound, args.oracle_bound)
    failed = [o.axiom for o in rep.outcomes if not o.passed]
    msg = "all axioms pass" if not failed else "failed: " + ", ".join(failed)
    return rep.to_json(), rep.passed, msg


def cmd_karoubi(args, cat):
    K = KaroubiCategory(cat)
    split_ok, n_idem = idempotents_split(K, args.bound, args.oracle_bound)
    ff = fully_faithful(K, args.bound)
    census = []
    for X in K.objects(args.bound, dedup=True):
        found = in_essential_image(K, X, args.bound)
        census.append({"object": K.describe_object(X), "in_image": found is not None,
                       "witness_base": None if found is None else cat.describe_object(found[0])})
    cokernels = [d for _, d in kernel_cokernel_pairs(cat, args.bound)]
    reports = _map(lambda d: transfer_semistable(K, d, args.bound), cokernels)
    agree = sum(r.agree for r in reports)
    payload = {"idempotents_checked": n_idem, "idempotent_complete": split_ok, "fully_faithful": ff,
               "census": census, "outside_image": [c["object"] for c in census if not c["in_image"]],
               "transfer": {"cokernels": len(reports), "agreeing": agree,
                            "rate": (agree / len(reports)) if reports else 1.0}}
    ok = split_ok and ff and agree == len(reports)
    return payload, ok, (f"{n_idem} idempotents split={split_ok}, fully faithful={ff}, "
                         f"transfer {agree}/{len(reports)}")


def _diagram(args, cat, dcat):
    pairs = _sample(list(kernel_cokernel_pairs(dcat, args.bound)), args)
    recs = _map(lambda p: positionwise_stable_equiv(dcat, p[0], p[1], args.bound), pairs)
    agree = sum(r.agree for r in recs)
    payload = {"truncation": f"positions 0..{dcat.length - 1}", "length": dcat.length,
               "pairs": len(recs), "agreeing": agree,
               "stable": sum(r.diagram_stable for r in recs),
               "records": [{"d": dcat.describe_mor(r.d), "diagram_stable": r.diagram_stable,
                            "positionwise": list(r.positions)} for r in recs]}
    return payload, agree == len(recs), f"{agree}/{len(recs)} sequences agree"


def cmd_chain(args, cat):
    return _diagram(args, cat, ChainCategory(cat, args.degrees))


def cmd_spectra(args, cat):
    return _diagram(args, cat, SpectrumCategory(cat, args.length))


COMMANDS = {"axioms": cmd_axioms, "classify": cmd_classify, "karoubi": cmd_karoubi,
            "chain": cmd_chain, "spectra": cmd_spectra}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stabex", description="Stable exact structures on finite additive categories.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--instance", required=True, help="zmod:<n>, pairs:<p>, capped:<p>:<cap> or karoubi:<desc>")
    ap.add_argument("--bound", type=int, default=2)
    ap.add_argument("--oracle-bound", type=int, default=1)
    ap.add_argument("--class", dest="cls", default="stable", choices=["split", "stable", "all-kcp", "empty"])
    ap.add_argument("--degrees", type=int, default=2)
    ap.add_argument("--length", type=int, default=2)
    ap.add_argument("--sample", type=int, default=None)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="classify: also write the records as JSON lines")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if min(args.bound, args.oracle_bound, args.degrees, args.length) < 0 or args.degrees < 1 or args.length < 1:
        ap.print_usage(sys.stderr)
        print("stabex: bounds must be non-negative and lengths positive", file=sys.stderr)
        return 2
    try:
        cat = parse_instance(args.instance)
    except (DescriptorError, ValueError) as e:
        print(f"stabex: bad instance descriptor: {e}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    payload, ok, msg = COMMANDS[args.command](args, cat)
    report = {"schema": SCHEMA, "version": __version__, "command": args.command,
              "config": _config(args), "passed": ok, "payload": payload}
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    print(f"stabex {args.command} {args.instance}: {msg} "
          f"[{'ok' if ok else 'FAIL'}, {time.perf_counter() - start:.2f}s]", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
