"""Bounded certification of semi-stable cokernels and kernels.

A cokernel ``d: B -> C`` is semi-stable relative to an object class when its
pullback along every ``h: C' -> C`` with ``C'`` in the class exists and is again
a cokernel.  The search runs over one representative ``h`` per orbit of the
automorphism group of ``C'`` acting on the right (pulling back along ``h o a``
only reparametrizes the apex), which keeps the first failing witness intact.

The kernel side is the cokernel side in the opposite category.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    Category,
    CategoryError,
    ClassClosureViolation,
    Mor,
    ObjectClass,
    all_objects,
)
from .limits import KernelCert, Square, pullback, verify_universal


class SubjectNotCokernel(CategoryError):
    pass


class SubjectNotKernel(CategoryError):
    pass


class PreconditionFailed(CategoryError):
    pass


class KernelOfPMissing(CategoryError):
    pass


class RetractionUnsplittable(CategoryError):
    pass


class NotAKernelCokernelPair(CategoryError):
    pass


@dataclass(frozen=True)
class Certified:
    bound: int
    cls: str
    checked: int


@dataclass(frozen=True)
class Refuted:
    witness: Mor
    failure: str


@dataclass(frozen=True)
class SemiStableVerdict:
    kind: str
    subject: Mor
    outcome: Certified | Refuted

    @property
    def certified(self) -> bool:
        return isinstance(self.outcome, Certified)

    def summary(self) -> str:
        if self.certified:
            return "Certified"
        return f"Refuted({self.outcome.failure})"


_DUAL_FAILURE = {"PullbackMissing": "PushoutMissing", "NotACokernel": "NotAKernel"}


def _class(cat: Category, cls: ObjectClass | None) -> ObjectClass:
    return all_objects(cat) if cls is None else cls


def certify_semistable_cokernel(cat: Category, d: Mor, cls: ObjectClass | None = None,
                                bound: int = 2, check_closure: bool = False) -> SemiStableVerdict:
    """Sweep every ``h: C' -> cod(d)`` with ``C'`` in ``cls`` up to ``bound``.

    Refuted carries the first failing ``h`` in enumeration order.  With
    ``check_closure`` the apex of each pullback with both corners in the class
    must lie in the class, else ClassClosureViolation.
    """
    cls = _class(cat, cls)
    if not cat.is_cokernel(d):
        raise SubjectNotCokernel(f"{d!r} is not a cokernel")
    ck = ("ssc", cat.iso_key(d), bound, cls.name)
    hit = cat.cache.get(ck)
    if hit is not None and not check_closure:
        return SemiStableVerdict("cokernel", d, hit)
    checked = 0
    dom_in = check_closure and cls.contains(d.dom)
    for Cp in cls.members(bound):
        for h in cat.reps(Cp, d.cod, "right"):
            checked += 1
            sq = pullback(cat, d, h)
            if not sq:
                return SemiStableVerdict("cokernel", d, Refuted(h, "PullbackMissing"))
            if dom_in and not cls.contains(sq.apex):
                raise ClassClosureViolation(f"pullback apex {sq.apex!r} leaves {cls.name}")
            if not cat.is_cokernel(sq.d_prime):
                return SemiStableVerdict("cokernel", d, Refuted(h, "NotACokernel"))
    out = Certified(bound, cls.name, checked)
    cat.cache[ck] = out
    return SemiStableVerdict("cokernel", d, out)


def certify_semistable_kernel(cat: Category, i: Mor, cls: ObjectClass | None = None,
                              bound: int = 2, check_closure: bool = False) -> SemiStableVerdict:
    """Dual sweep over pushouts, run as the cokernel sweep in the opposite category."""
    op = cat.opposite
    if not cat.is_kernel(i):
        raise SubjectNotKernel(f"{i!r} is not a kernel")
    v = certify_semistable_cokernel(op, op.op(i), cls, bound, check_closure)
    if v.certified:
        return SemiStableVerdict("kernel", i, v.outcome)
    o = v.outcome
    return SemiStableVerdict("kernel", i, Refuted(op.op(o.witness), _DUAL_FAILURE[o.failure]))


# -- composition and direct sums ------------------------------------------------

@dataclass(frozen=True)
class CompositionResult:
    """Verdict for ``p o d`` built stage by stage from pullbacks of ``p`` then ``d``."""

    verdict: SemiStableVerdict
    kernel: Mor | None
    kernel_square: Square | None = None
    stages: tuple = field(default=(), repr=False)


def compose_semistable(cat: Category, d: Mor, p: Mor, cls: ObjectClass | None = None,
                       bound: int = 2, oracle_bound: int | None = None) -> CompositionResult:
    """Semi-stability of ``p o d`` from that of ``d: B -> C`` and ``p: C -> D``.

    The kernel ``g`` of ``p o d`` is the pullback leg of ``d`` along ``ker p``.
    For each ``gamma: G -> D`` the pullback of ``p o d`` is assembled from a
    pullback ``(beta, v)`` of ``p`` along ``gamma`` and a pullback ``(alpha, u)``
    of ``d`` along ``beta``; the composite ``v o u`` must be a cokernel.
    """
    cls = _class(cat, cls)
    if not cls.contains(d.cod):
        raise PreconditionFailed("the middle object is not in the class")
    for m in (d, p):
        if not certify_semistable_cokernel(cat, m, cls, bound).certified:
            raise PreconditionFailed(f"{m!r} is not certified semi-stable")
    pd = cat.compose(p, d)
    h = cat.kernel(p)
    sq = pullback(cat, d, h)
    if not sq:
        raise PreconditionFailed("pullback of d along ker p is missing")
    g = sq.g
    c = cat.cokernel(g)
    if c is None or not cat._same_quotient(c, pd):
        raise CategoryError("p o d is not the cokernel of the lifted kernel")
    stages = []
    checked = 0
    for G in cls.members(bound):
        for gamma in cat.reps(G, pd.cod, "right"):
            checked += 1
            first = pullback(cat, p, gamma)
            if not first:
                return CompositionResult(SemiStableVerdict("cokernel", pd, Refuted(gamma, "PullbackMissing")), g, sq)
            second = pullback(cat, d, first.g)
            if not second:
                return CompositionResult(SemiStableVerdict("cokernel", pd, Refuted(gamma, "PullbackMissing")), g, sq)
            vu = cat.compose(first.d_prime, second.d_prime)
            pasted = Square(cat, pd, gamma, second.g, vu)
            if not pasted.commutes():
                raise CategoryError("pasted square does not commute")  # pragma: no cover
            if oracle_bound is not None and not verify_universal(pasted, oracle_bound):
                raise CategoryError("pasted square fails the pullback oracle")
            if not cat.is_cokernel(vu):
                return CompositionResult(SemiStableVerdict("cokernel", pd, Refuted(gamma, "NotACokernel")), g, sq)
            stages.append((gamma, first, second))
    verdict = SemiStableVerdict("cokernel", pd, Certified(bound, cls.name, checked))
    return CompositionResult(verdict, g, sq, tuple(stages))


def direct_sum_semistable(cat: Category, d: Mor, d2: Mor, cls: ObjectClass | None = None,
                          bound: int = 2, oracle_bound: int | None = None) -> CompositionResult:
    """Semi-stability of ``diag(d, d2)`` as ``diag(1, d2) o diag(d, 1)``."""
    cls = _class(cat, cls)
    if not (cls.contains(d2.dom) and cls.contains(d.cod)):
        raise PreconditionFailed("direct sums need dom(d2) and cod(d) in the class")
    first = cat.diag(d, cat.identity(d2.dom))
    second = cat.diag(cat.identity(d.cod), d2)
    bp = cat.biproduct(d.cod, d2.dom)
    sq = Square(cat, d, bp.proj1, cat.biproduct(d.dom, d2.dom).proj1, first)
    if not sq.commutes():
        raise CategoryError("projection square does not commute")  # pragma: no cover
    if oracle_bound is not None and not verify_universal(sq, oracle_bound):
        raise CategoryError("projection square fails the pullback oracle")
    for m in (first, second):
        if not certify_semistable_cokernel(cat, m, cls, bound).certified:
            raise PreconditionFailed(f"summand map {m!r} is not certified")
    res = compose_semistable(cat, first, second, cls, bound, oracle_bound)
    if cat.compose(second, first) != cat.diag(d, d2):
        raise CategoryError("factorization of the direct sum is wrong")  # pragma: no cover
    return res


# -- the obscure axiom ------------------------------------------------------------

@dataclass(frozen=True)
class ObscureStep:
    """Per-witness data: the pullback ``Y`` of ``[p 0]`` along ``c``, the section
    ``delta`` of ``beta'``, the kernel ``i`` of ``beta'`` and the final square."""

    c: Mor
    y_square: Square
    alpha: Mor
    beta: Mor
    gamma: Mor
    delta: Mor
    i: Mor
    final: Square


@dataclass(frozen=True)
class ObscureTrace:
    cat: Category = field(repr=False, compare=False)
    d: Mor
    p: Mor
    h: Mor
    dh_square: Square
    chain: tuple
    steps: tuple
    route: str = "direct"


def weakly_idempotent_complete(cat: Category, bound: int) -> bool:
    """Every retraction between objects within ``bound`` has a kernel."""
    if getattr(cat, "idempotent_complete", False):
        return True
    ck = ("wic", bound)
    if ck not in cat.cache:
        ok = True
        objs = cat.objects(bound)
        for A in objs:
            for B in objs:
                for r in cat.reps(A, B, "iso"):
                    if cat.is_retraction(r) and cat.kernel(r) is None:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        cat.cache[ck] = ok
    return cat.cache[ck]


def obscure_cokernel(cat: Category, d: Mor, p: Mor, cls: ObjectClass | None = None,
                     bound: int = 2, route: str = "auto", oracle_bound: int | None = None):
    """Certify ``p`` given that ``p o d`` is a semi-stable cokernel and ``p`` has a kernel.

    Returns ``(verdict, trace)``.  The direct route needs weak idempotent
    completeness; the ``karoubi`` route runs the direct route on the images
    under the embedding into the idempotent completion, relative to its
    essential image, and maps the verdict back.
    """
    cls = _class(cat, cls)
    if route == "auto":
        route = "direct" if weakly_idempotent_complete(cat, bound) else "karoubi"
    if route == "karoubi":
        from .karoubi import KaroubiCategory, image_class
        K = KaroubiCategory(cat)
        if not cls.is_all:
            raise PreconditionFailed("the completion route certifies the absolute case only")
        v, trace = obscure_cokernel(K, K.embed(d), K.embed(p), image_class(K), bound, "direct", oracle_bound)
        if v.certified:
            out = Certified(bound, cls.name, v.outcome.checked)
        else:
            out = Refuted(K.unembed(v.outcome.witness), v.outcome.failure)
        return SemiStableVerdict("cokernel", p, out), ObscureTrace(K, d, p, trace.h, trace.dh_square,
                                                                     trace.chain, trace.steps, "karoubi")
    if route != "direct":
        raise ValueError(f"unknown route {route!r}")
    B, C, D = d.dom, d.cod, p.cod
    if not (cls.contains(B) and cls.contains(C)):
        raise PreconditionFailed("B and C must lie in the class")
    pd = cat.compose(p, d)
    if not certify_semistable_cokernel(cat, pd, cls, bound).certified:
        raise PreconditionFailed("p o d is not certified semi-stable")
    h = cat.kernel(p)
    if h is None:
        raise KernelOfPMissing(f"{p!r} has no kernel")
    Cp = h.dom
    bBC = cat.biproduct(B, Cp)
    dh = cat.block_row(d, h)
    dh_square = Square(cat, pd, p, bBC.proj1, dh)
    one_C, one_B, one_D = cat.identity(C), cat.identity(B), cat.identity(D)
    m1 = cat.block(one_C, cat.negate(d), cat.zero(C, B), one_B)
    m2 = cat.diag(one_C, pd)
    m3 = cat.block(one_C, cat.zero(D, C), p, one_D)
    m4 = cat.block_row(cat.zero(C, D), one_D)
    chain = (m1, m2, m3, m4)
    p0 = cat.block_row(p, cat.zero(B, D))
    bCB = cat.biproduct(C, B)
    steps = []
    verdict = None
    checked = 0
    for G in cls.members(bound):
        for c in cat.reps(G, D, "right"):
            checked += 1
            ysq = pullback(cat, p0, c)
            if not ysq:
                verdict = Refuted(c, "PullbackMissing")
                break
            alpha = cat.compose(bCB.proj1, ysq.g)
            beta = cat.compose(bCB.proj2, ysq.g)
            gamma = ysq.d_prime
            delta = ysq.mediate(cat.zero(B, G), bCB.inj2)
            if delta is None:
                raise CategoryError("no mediator for the cone ([0; 1], 0)")  # pragma: no cover
            i = cat.kernel(beta)
            if i is None:
                raise RetractionUnsplittable(f"beta' = {beta!r} is a retraction without a kernel")
            final = Square(cat, p, c, cat.compose(alpha, i), cat.compose(gamma, i))
            steps.append(ObscureStep(c, ysq, alpha, beta, gamma, delta, i, final))
            if not cat.is_cokernel(final.d_prime):
                verdict = Refuted(c, "NotACokernel")
                break
        if verdict is not None:
            break
    if verdict is None:
        verdict = Certified(bound, cls.name, checked)
    trace = ObscureTrace(cat, d, p, h, dh_square, chain, tuple(steps))
    return SemiStableVerdict("cokernel", p, verdict), trace


def replay_trace(trace: ObscureTrace, oracle_bound: int | None = None) -> list[str]:
    """Re-check every equation recorded in an ObscureTrace; returns the failures."""
    cat = trace.cat
    d, p, h = trace.d, trace.p, trace.h
    if trace.route == "karoubi":
        d, p = cat.embed(d), cat.embed(p)
    bad = []
    if not cat.is_zero(cat.compose(p, h)):
        bad.append("p o h != 0")
    if not trace.dh_square.commutes():
        bad.append("[d h] square does not commute")
    if not cat.is_cokernel(trace.dh_square.d_prime):
        bad.append("[d h] is not a cokernel")
    m1, m2, m3, m4 = trace.chain
    p0 = cat.block_row(p, cat.zero(d.dom, p.cod))
    if cat.compose(m4, m3, m2, m1) != p0:
        bad.append("four-factor chain does not compose to [p 0]")
    if not (cat.is_iso(m1) and cat.is_iso(m3)):
        bad.append("outer chain factors are not isomorphisms")
    if oracle_bound is not None and not verify_universal(trace.dh_square, oracle_bound):
        bad.append("[d h] square fails the pullback oracle")
    B = d.dom
    for k, s in enumerate(trace.steps):
        if not s.y_square.commutes():
            bad.append(f"step {k}: Y square does not commute")
        if cat.compose(s.beta, s.delta) != cat.identity(B):
            bad.append(f"step {k}: beta' delta != 1")
        if not cat.is_zero(cat.compose(s.gamma, s.delta)):
            bad.append(f"step {k}: gamma delta != 0")
        if not cat.is_zero(cat.compose(s.alpha, s.delta)):
            bad.append(f"step {k}: alpha' delta != 0")
        if not cat.is_zero(cat.compose(s.beta, s.i)):
            bad.append(f"step {k}: beta' i != 0")
        if not s.final.commutes():
            bad.append(f"step {k}: final square does not commute")
        if oracle_bound is not None and not verify_universal(s.final, oracle_bound):
            bad.append(f"step {k}: final square fails the pullback oracle")
        if not cat.is_cokernel(s.final.d_prime):
            bad.append(f"step {k}: gamma i is not a cokernel")
    return bad


def obscure_kernel(cat: Category, i: Mor, q: Mor, cls: ObjectClass | None = None,
                   bound: int = 2, route: str = "auto", oracle_bound: int | None = None):
    """Dual: ``i`` is certified given that ``i o q`` is a semi-stable kernel and ``i`` has a cokernel.

    Here ``q: A -> B`` and ``i: B -> C``, matching ``d`` and ``p`` in the opposite category.
    """
    op = cat.opposite
    v, trace = obscure_cokernel(op, op.op(i), op.op(q), cls, bound, route, oracle_bound)
    if v.certified:
        return SemiStableVerdict("kernel", q, v.outcome), trace
    o = v.outcome
    return SemiStableVerdict("kernel", q, Refuted(op.op(o.witness), _DUAL_FAILURE[o.failure])), trace


# -- stable short exact sequences -------------------------------------------------

@dataclass(frozen=True)
class StableSesCert:
    i: Mor
    d: Mor
    kernel_verdict: SemiStableVerdict
    cokernel_verdict: SemiStableVerdict
    stable: bool = True


@dataclass(frozen=True)
class NotStable:
    i: Mor
    d: Mor
    kernel_verdict: SemiStableVerdict
    cokernel_verdict: SemiStableVerdict
    stable: bool = False

    @property
    def witness(self) -> SemiStableVerdict:
        return self.cokernel_verdict if not self.cokernel_verdict.certified else self.kernel_verdict


def is_kernel_cokernel_pair(cat: Category, i: Mor, d: Mor) -> bool:
    if i.cod != d.dom or not cat.is_zero(cat.compose(d, i)):
        return False
    k, c = cat.kernel(d), cat.cokernel(i)
    return k is not None and c is not None and cat._same_sub(k, i) and cat._same_quotient(c, d)


def certify_stable_ses(cat: Category, i: Mor, d: Mor, bound: int = 2, verify_pair: bool = True,
                       cls: ObjectClass | None = None):
    """Both semi-stability verdicts for the kernel-cokernel pair ``(i, d)``."""
    if verify_pair and not is_kernel_cokernel_pair(cat, i, d):
        raise NotAKernelCokernelPair(f"({i!r}, {d!r}) is not a kernel-cokernel pair")
    kv = certify_semistable_kernel(cat, i, cls, bound)
    cv = certify_semistable_cokernel(cat, d, cls, bound)
    if kv.certified and cv.certified:
        return StableSesCert(i, d, kv, cv)
    return NotStable(i, d, kv, cv)


def kernel_cert(cat: Category, f: Mor) -> KernelCert | None:
    k = cat.kernel(f)
    return None if k is None else KernelCert(cat, f, k)
