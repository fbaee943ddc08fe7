"""Conflation classes and bounded checks of Quillen's exact-category axioms.

A conflation class decides membership of kernel-cokernel pairs ``(i, d)``.
Deflations are cokernels whose pair lies in the class; inflations are kernels
whose pair lies in the class.  Every inflation-side check is the deflation-side
check run in the opposite category, where the class is viewed with the roles
of ``i`` and ``d`` exchanged.

Sweeps use orbit representatives: membership is invariant under isomorphism of
sequences, so composable pairs ``(d, p)`` may be replaced by ``(d a, b p)`` for
automorphisms ``a``, ``b`` and a deflation by ``b d a``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

from .core import Category, CategoryError, Mor, Opposite
from .limits import pullback
from .stability import (
    NotStable,
    certify_stable_ses,
    is_kernel_cokernel_pair,
    obscure_cokernel,
    replay_trace,
)

SCHEMA = "stabex.axioms/1"


class InputStable(CategoryError):
    """A maximality witness was requested for a stable sequence."""


@dataclass(frozen=True)
class ConflationClass:
    """A class of kernel-cokernel pairs; ``contains(cat, i, d)`` decides membership."""

    name: str
    contains: Callable[[Category, Mor, Mor], bool]
    dual_of: "ConflationClass | None" = field(default=None, repr=False, compare=False)

    def opposite(self) -> "ConflationClass":
        """The same class seen in the opposite category."""
        if self.dual_of is not None:
            return self.dual_of
        inner = self.contains

        def contains(cat, i, d):
            return inner(cat.opposite, Opposite.op(d), Opposite.op(i))

        return ConflationClass(self.name, contains, self)


def split_class() -> ConflationClass:
    return ConflationClass("split", lambda cat, i, d: cat.is_retraction(d))


def stable_class(bound: int) -> ConflationClass:
    def contains(cat, i, d):
        return certify_stable_ses(cat, i, d, bound, verify_pair=False).stable

    return ConflationClass(f"stable(bound={bound})", contains)


def all_kcp_class() -> ConflationClass:
    return ConflationClass("all-kcp", lambda cat, i, d: True)


def empty_class() -> ConflationClass:
    return ConflationClass("empty", lambda cat, i, d: False)


def class_by_name(name: str, bound: int) -> ConflationClass:
    table = {"split": split_class, "all-kcp": all_kcp_class, "empty": empty_class,
             "stable": lambda: stable_class(bound)}
    if name not in table:
        raise ValueError(f"unknown conflation class {name!r}")
    return table[name]()


def deflation_pair(cat: Category, d: Mor, cls: ConflationClass) -> tuple[Mor, Mor] | None:
    """``(ker d, d)`` when ``d`` is a deflation of ``cls``, else None."""
    if not cat.is_cokernel(d):
        return None
    k = cat.kernel(d)
    if k is None or not is_kernel_cokernel_pair(cat, k, d):
        return None
    return (k, d) if cls.contains(cat, k, d) else None


@dataclass(frozen=True)
class AxiomOutcome:
    axiom: str
    passed: bool
    cases: int
    counterexample: Any = None

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "passed": self.passed, "cases": self.cases,
                "counterexample": self.counterexample}


def _describe(cat: Category, **mors) -> dict:
    return {k: (cat.describe_mor(v) if isinstance(v, Mor) else v) for k, v in mors.items()}


def check_E0(cat: Category, cls: ConflationClass) -> AxiomOutcome:
    """``1_0`` is a deflation (and, read backwards, an inflation)."""
    Z = cat.zero_object()
    one = cat.identity(Z)
    ok = cls.contains(cat, one, one)
    return AxiomOutcome("E0", ok, 1, None if ok else "identity of the zero object is not a conflation")


def _check_E1(cat: Category, cls: ConflationClass, bound: int, name: str) -> AxiomOutcome:
    objs = cat.objects(bound)
    cases = 0
    for B in objs:
        for C in objs:
            ds = [d for d in cat.reps(B, C, "right") if deflation_pair(cat, d, cls)]
            if not ds:
                continue
            for D in objs:
                for p in cat.reps(C, D, "left"):
                    if not deflation_pair(cat, p, cls):
                        continue
                    for d in ds:
                        cases += 1
                        pd = cat.compose(p, d)
                        if not deflation_pair(cat, pd, cls):
                            return AxiomOutcome(name, False, cases, _describe(cat, d=d, p=p))
    return AxiomOutcome(name, True, cases)


def check_E1(cat, cls, bound):
    """Composites of deflations are deflations."""
    return _check_E1(cat, cls, bound, "E1")


def check_E1_inflations(cat, cls, bound):
    """Composites of inflations are inflations."""
    return _check_E1(cat.opposite, cls.opposite(), bound, "E1op")


def _check_E2(cat: Category, cls: ConflationClass, bound: int, name: str) -> AxiomOutcome:
    objs = cat.objects(bound)
    cases = 0
    for B in objs:
        for C in objs:
            for d in cat.reps(B, C, "iso"):
                if not deflation_pair(cat, d, cls):
                    continue
                for Cp in objs:
                    for h in cat.reps(Cp, C, "right"):
                        cases += 1
                        sq = pullback(cat, d, h)
                        if not sq:
                            return AxiomOutcome(name, False, cases,
                                                _describe(cat, d=d, h=h, failure="pullback missing"))
                        if not deflation_pair(cat, sq.d_prime, cls):
                            return AxiomOutcome(name, False, cases,
                                                _describe(cat, d=d, h=h, failure="pulled-back map not a deflation"))
    return AxiomOutcome(name, True, cases)


def check_E2(cat, cls, bound):
    """Pullbacks of deflations exist and are deflations."""
    return _check_E2(cat, cls, bound, "E2")


def check_E2op(cat, cls, bound):
    """Pushouts of inflations exist and are inflations."""
    return _check_E2(cat.opposite, cls.opposite(), bound, "E2op")


def _check_obscure(cat: Category, cls: ConflationClass, bound: int, name: str,
                   constructive: bool, oracle_bound: int | None) -> AxiomOutcome:
    """If ``p o d`` is a deflation and ``p`` has a kernel then ``p`` is a deflation.

    With ``constructive`` the semi-stability of ``p`` comes from ``obscure_cokernel``
    and its trace is replayed; class membership of ``(ker p, p)`` is then checked.
    """
    objs = cat.objects(bound)
    cases = 0
    for B in objs:
        for C in objs:
            ds = cat.reps(B, C, "right")
            for D in objs:
                for p in cat.reps(C, D, "left"):
                    if cat.kernel(p) is None:
                        continue
                    for d in ds:
                        pd = cat.compose(p, d)
                        if not deflation_pair(cat, pd, cls):
                            continue
                        cases += 1
                        if constructive:
                            v, trace = obscure_cokernel(cat, d, p, None, bound, "auto", oracle_bound)
                            bad = replay_trace(trace, oracle_bound)
                            if not v.certified or bad:
                                return AxiomOutcome(name, False, cases, _describe(
                                    cat, d=d, p=p, failure=v.summary(), trace=bad))
                        if not deflation_pair(cat, p, cls):
                            return AxiomOutcome(name, False, cases, _describe(cat, d=d, p=p))
    return AxiomOutcome(name, True, cases)


def check_obscure(cat, cls, bound, constructive=False, oracle_bound=None):
    return _check_obscure(cat, cls, bound, "obscure", constructive, oracle_bound)


def check_obscure_inflations(cat, cls, bound, constructive=False, oracle_bound=None):
    return _check_obscure(cat.opposite, cls.opposite(), bound, "obscure-op", constructive, oracle_bound)


@dataclass(frozen=True)
class AxiomReport:
    instance: str
    cls: str
    bound: int
    outcomes: tuple

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def outcome(self, axiom: str) -> AxiomOutcome:
        return next(o for o in self.outcomes if o.axiom == axiom)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "instance": self.instance, "class": self.cls, "bound": self.bound,
                "passed": self.passed, "axioms": [o.to_json() for o in self.outcomes]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def axiom_suite(cat: Category, cls: ConflationClass, bound: int,
                oracle_bound: int | None = None) -> AxiomReport:
    """E0, E1, E2, E2op, the inflation dual of E1, and both obscure directions.

    The obscure checks run the constructive route when the class is a stable class.
    """
    constructive = cls.name.startswith("stable")
    outs = [
        check_E0(cat, cls),
        check_E1(cat, cls, bound),
        check_E1_inflations(cat, cls, bound),
        check_E2(cat, cls, bound),
        check_E2op(cat, cls, bound),
        check_obscure(cat, cls, bound, constructive, oracle_bound),
        check_obscure_inflations(cat, cls, bound, constructive, oracle_bound),
    ]
    return AxiomReport(cat.name, cls.name, bound, tuple(outs))


@dataclass(frozen=True)
class MaximalityWitness:
    """A replayed obstruction: no exact structure can contain the input sequence."""

    axiom: str
    witness: Mor
    failure: str
    replayed: bool


def maximality_witness(cat: Category, i: Mor, d: Mor, bound: int) -> MaximalityWitness:
    """Replay the failing pullback (E2) or pushout (E2op) of a non-stable pair."""
    res = certify_stable_ses(cat, i, d, bound)
    if not isinstance(res, NotStable):
        raise InputStable("the sequence is stable")
    if not res.cokernel_verdict.certified:
        o = res.cokernel_verdict.outcome
        view, subj, axiom = cat, d, "E2"
    else:
        o = res.kernel_verdict.outcome
        view, subj, axiom = cat.opposite, cat.opposite.op(i), "E2op"
    h = o.witness if view is cat else Opposite.op(o.witness)
    sq = pullback(view, subj, h)
    replayed = (not sq) if o.failure.endswith("Missing") else (bool(sq) and not view.is_cokernel(sq.d_prime))
    return MaximalityWitness(axiom, o.witness, o.failure, replayed)
