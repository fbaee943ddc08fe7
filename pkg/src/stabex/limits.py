"""Kernels, cokernels, pullbacks and pushouts with mediators, plus the oracle.

Pullbacks are kernels of a block row: for a cospan ``d: B -> C``, ``h: C' -> C``
the kernel ``k: P -> C' (+) B`` of ``[h d]`` unpacks as ``k = [d'; -g]``, giving
the square ``d o g == h o d'``.  Pushouts are dual: for a span ``i: A -> B``,
``f: A -> A'`` the cokernel ``c`` of ``[f; i]`` gives ``i' = c o inj1`` and
``f' = -c o inj2`` with ``f' o i == i' o f``.

The oracle (``verify_universal``) never uses the mediators: it enumerates every
test cone with apex inside a bound and counts factorizations directly.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Any

from .core import Category, CategoryError, Mor, OracleBudgetExceeded

ORACLE_BUDGET = 3_000_000


class RepresentabilityDisagreement(CategoryError):
    """The instance decision rule and the bounded refutation disagree."""


@dataclass(frozen=True)
class NotRepresentable:
    """A (co)limit that does not exist; ``refuted`` counts candidates ruled out."""

    kind: str
    subject: tuple
    reason: str
    refute_bound: int | None = None
    refuted: int = 0

    def __bool__(self):
        return False


@dataclass(frozen=True)
class KernelCert:
    """``k: K -> B`` is a kernel of ``f: B -> C``."""

    cat: Category = field(repr=False, compare=False)
    f: Mor
    k: Mor

    @property
    def obj(self):
        return self.k.dom

    def mediate(self, t: Mor) -> Mor | None:
        """The ``u`` with ``k o u == t`` for a test map ``t`` killed by ``f``."""
        if not self.cat.is_zero(self.cat.compose(self.f, t)):
            return None
        return self.cat.lift(self.k, t)


@dataclass(frozen=True)
class CokernelCert:
    """``c: B -> Q`` is a cokernel of ``f: A -> B``."""

    cat: Category = field(repr=False, compare=False)
    f: Mor
    c: Mor

    @property
    def obj(self):
        return self.c.cod

    def mediate(self, t: Mor) -> Mor | None:
        if not self.cat.is_zero(self.cat.compose(t, self.f)):
            return None
        return self.cat.colift(self.c, t)


@dataclass(frozen=True)
class Square:
    """A commutative square over the cospan ``d: B -> C``, ``h: C' -> C``.

    The apex ``P`` carries ``g: P -> B`` and ``d_prime: P -> C'`` with
    ``d o g == h o d_prime``.
    """

    cat: Category = field(repr=False, compare=False)
    d: Mor
    h: Mor
    g: Mor
    d_prime: Mor

    @property
    def apex(self):
        return self.g.dom

    def commutes(self) -> bool:
        c = self.cat
        return c.compose(self.d, self.g) == c.compose(self.h, self.d_prime)

    def mediate(self, a: Mor, b: Mor) -> Mor | None:
        """The ``u`` with ``d' o u == a`` and ``g o u == b`` for a cone ``h a == d b``."""
        c = self.cat
        if c.compose(self.h, a) != c.compose(self.d, b):
            return None
        return c.lift_many([(self.d_prime, a), (self.g, b)])


@dataclass(frozen=True)
class PullbackSquare(Square):
    """A square produced by ``pullback``."""


@dataclass(frozen=True)
class CoSquare:
    """A commutative square under the span ``i: A -> B``, ``f: A -> A'``.

    ``i_prime: A' -> Q`` and ``f_prime: B -> Q`` satisfy ``f' o i == i' o f``.
    """

    cat: Category = field(repr=False, compare=False)
    i: Mor
    f: Mor
    i_prime: Mor
    f_prime: Mor

    @property
    def apex(self):
        return self.i_prime.cod

    def commutes(self) -> bool:
        c = self.cat
        return c.compose(self.f_prime, self.i) == c.compose(self.i_prime, self.f)

    def mediate(self, a: Mor, b: Mor) -> Mor | None:
        """The ``u`` with ``u o i' == a`` and ``u o f' == b`` for a cocone ``a f == b i``."""
        c = self.cat
        if c.compose(a, self.f) != c.compose(b, self.i):
            return None
        return c.colift_many([(self.i_prime, a), (self.f_prime, b)])

    def as_opposite(self) -> Square:
        op = self.cat.opposite
        return Square(op, op.op(self.i), op.op(self.f), op.op(self.f_prime), op.op(self.i_prime))


@dataclass(frozen=True)
class PushoutSquare(CoSquare):
    """A square produced by ``pushout``."""


# -- computation ------------------------------------------------------------

def kernel(cat: Category, f: Mor, refute_bound: int | None = None):
    """KernelCert for ``f`` or NotRepresentable.

    With ``refute_bound`` set, a negative decision is corroborated by showing that
    every candidate ``(K, k)`` with ``K`` inside the bound fails the oracle at that
    same bound; a candidate that passes raises RepresentabilityDisagreement.
    """
    k = cat.kernel(f)
    if k is not None:
        return KernelCert(cat, f, k)
    refuted = 0
    if refute_bound is not None:
        refuted = _refute_kernel(cat, f, refute_bound)
    return NotRepresentable("kernel", (f,), "decision rule: kernel not representable",
                            refute_bound, refuted)


def cokernel(cat: Category, f: Mor, refute_bound: int | None = None):
    c = cat.cokernel(f)
    if c is not None:
        return CokernelCert(cat, f, c)
    refuted = 0
    if refute_bound is not None:
        refuted = _refute_kernel(cat.opposite, cat.opposite.op(f), refute_bound)
    return NotRepresentable("cokernel", (f,), "decision rule: cokernel not representable",
                            refute_bound, refuted)


def _refute_kernel(cat: Category, f: Mor, bound: int) -> int:
    n = 0
    for K in cat.objects(bound):
        for k in cat.homs(K, f.dom):
            if not cat.is_zero(cat.compose(f, k)):
                continue
            res = verify_universal(KernelCert(cat, f, k), bound)
            if res.passed:
                raise RepresentabilityDisagreement(
                    f"{cat.name}: decision rule denies a kernel of {f!r} but {k!r} passes the oracle")
            n += 1
    return n


def pullback(cat: Category, d: Mor, h: Mor, refute_bound: int | None = None):
    """Pullback of ``d: B -> C`` along ``h: C' -> C`` or NotRepresentable."""
    if d.cod != h.cod:
        raise CategoryError("pullback needs a cospan")
    over = cat.pullback_override(d, h)
    if over is not NotImplemented:
        if over is None:
            return NotRepresentable("pullback", (d, h), "instance rule: apex not representable")
        g, dp = over
        return PullbackSquare(cat, d, h, g, dp)
    res = kernel(cat, cat.block_row(h, d), refute_bound)
    if not res:
        return NotRepresentable("pullback", (d, h), "kernel of [h d] not representable",
                                res.refute_bound, res.refuted)
    bp = cat.biproduct(h.dom, d.dom)
    k = res.k
    return PullbackSquare(cat, d, h, cat.negate(cat.compose(bp.proj2, k)), cat.compose(bp.proj1, k))


def pushout(cat: Category, i: Mor, f: Mor, refute_bound: int | None = None):
    """Pushout of ``i: A -> B`` along ``f: A -> A'`` or NotRepresentable."""
    if i.dom != f.dom:
        raise CategoryError("pushout needs a span")
    over = cat.pushout_override(i, f)
    if over is not NotImplemented:
        if over is None:
            return NotRepresentable("pushout", (i, f), "instance rule: apex not representable")
        ip, fp = over
        return PushoutSquare(cat, i, f, ip, fp)
    res = cokernel(cat, cat.block_col(f, i), refute_bound)
    if not res:
        return NotRepresentable("pushout", (i, f), "cokernel of [f; i] not representable",
                                res.refute_bound, res.refuted)
    bp = cat.biproduct(f.cod, i.cod)
    c = res.c
    return PushoutSquare(cat, i, f, cat.compose(c, bp.inj1), cat.negate(cat.compose(c, bp.inj2)))


# -- the oracle ---------------------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    passed: bool
    checked: int
    bound: int
    failure: str | None = None
    witness: Any = None

    def __bool__(self):
        return self.passed


def _budget(cat: Category, *sizes: int):
    total = 1
    for s in sizes:
        total *= max(s, 1)
    if total > ORACLE_BUDGET:
        raise OracleBudgetExceeded(f"{cat.name}: oracle would scan {total} cases")


def _check_kernel(cat: Category, f: Mor, k: Mor, bound: int) -> OracleResult:
    if k.cod != f.dom or not cat.is_zero(cat.compose(f, k)):
        return OracleResult(False, 0, bound, "not-a-cone", k)
    checked = 0
    for X in cat.objects(bound):
        _budget(cat, cat.hom_size(X, f.dom) + cat.hom_size(X, k.dom))
        hits = Counter(cat.compose(k, u) for u in cat.homs(X, k.dom))
        for t in cat.homs(X, f.dom):
            if not cat.is_zero(cat.compose(f, t)):
                continue
            checked += 1
            m = hits.get(t, 0)
            if m != 1:
                return OracleResult(False, checked, bound, "existence" if m == 0 else "uniqueness", t)
    return OracleResult(True, checked, bound)


def _check_square(cat: Category, sq: Square, bound: int) -> OracleResult:
    if not sq.commutes():
        return OracleResult(False, 0, bound, "not-commutative", sq)
    d, h, g, dp = sq.d, sq.h, sq.g, sq.d_prime
    checked = 0
    for X in cat.objects(bound):
        _budget(cat, cat.hom_size(X, h.dom) + cat.hom_size(X, d.dom) + cat.hom_size(X, sq.apex))
        by_image = defaultdict(list)
        for a in cat.homs(X, h.dom):
            by_image[cat.compose(h, a)].append(a)
        hits = Counter((cat.compose(dp, u), cat.compose(g, u)) for u in cat.homs(X, sq.apex))
        for b in cat.homs(X, d.dom):
            for a in by_image.get(cat.compose(d, b), ()):
                checked += 1
                m = hits.get((a, b), 0)
                if m != 1:
                    return OracleResult(False, checked, bound,
                                        "existence" if m == 0 else "uniqueness", (a, b))
    return OracleResult(True, checked, bound)


def verify_universal(cert, bound: int) -> OracleResult:
    """Check the universal property of a certificate against every test cone within ``bound``.

    Accepts KernelCert, CokernelCert, Square and CoSquare (and their subclasses).
    """
    if isinstance(cert, KernelCert):
        return _check_kernel(cert.cat, cert.f, cert.k, bound)
    if isinstance(cert, CokernelCert):
        op = cert.cat.opposite
        return _check_kernel(op, op.op(cert.f), op.op(cert.c), bound)
    if isinstance(cert, Square):
        return _check_square(cert.cat, cert, bound)
    if isinstance(cert, CoSquare):
        return _check_square(cert.cat.opposite, cert.as_opposite(), bound)
    raise TypeError(f"no oracle for {type(cert).__name__}")


# -- pasting and kernel lifting -------------------------------------------------

@dataclass(frozen=True)
class PasteVerdict:
    """Outcome of comparing the left square of a pasted diagram with the rectangle."""

    left: OracleResult
    rectangle: OracleResult
    right: OracleResult
    rectangle_square: Square
    mediators_agree: bool

    @property
    def agree(self) -> bool:
        return self.left.passed == self.rectangle.passed

    @property
    def holds(self) -> bool:
        return (not self.right.passed) or (self.agree and self.mediators_agree)


def rectangle(left: Square, right: Square) -> Square:
    """Outer rectangle of ``left`` (over ``i``, ``g``) pasted onto ``right`` (over ``d``, ``h``)."""
    c = left.cat
    if left.h != right.g or left.d.cod != right.d.dom:
        raise CategoryError("squares do not share the middle edge")
    return Square(c, c.compose(right.d, left.d), right.h, left.g, c.compose(right.d_prime, left.d_prime))


def paste_pullback(left: Square, right: Square, bound: int) -> PasteVerdict:
    """Decide the left square and the rectangle with the oracle and compare.

    ``left`` has cospan ``(i: A -> B, g: B' -> B)`` and apex ``A'`` with legs
    ``f: A' -> A`` and ``i': A' -> B'``; ``right`` is a square over ``(d, h)``
    whose apex is ``B'``.  When both the left square and the right square are
    pullbacks, rectangle mediators are also built in two stages (right then left)
    and compared against the direct rectangle mediators on every test cone.
    """
    if not left.commutes() or not right.commutes():
        raise CategoryError("non-commuting input")
    c = left.cat
    rect = rectangle(left, right)
    r_left = verify_universal(left, bound)
    r_rect = verify_universal(rect, bound)
    r_right = verify_universal(right, bound)
    agree = True
    if r_left.passed and r_right.passed:
        for X in c.objects(bound):
            for a in c.homs(X, left.d.dom):
                for cc in c.homs(X, right.h.dom):
                    if c.compose(rect.d, a) != c.compose(rect.h, cc):
                        continue
                    v = right.mediate(cc, c.compose(left.d, a))
                    u = left.mediate(v, a) if v is not None else None
                    w = rect.mediate(cc, a)
                    if u is None or u != w:
                        agree = False
                        break
    return PasteVerdict(r_left, r_rect, r_right, rect, agree)


def kernel_lift(kc: KernelCert, sq: Square, bound: int | None = None) -> KernelCert:
    """Lift ``i = ker d`` through a pullback of ``d`` to the kernel ``i'`` of ``d'``.

    ``i'`` is the square's mediator on the cone ``(0, i)``.  With ``bound`` set the
    result is checked by the oracle and a failure raises CategoryError.
    """
    c = sq.cat
    if kc.f != sq.d:
        raise CategoryError("kernel certificate is not for the square's edge")
    i = kc.k
    ip = sq.mediate(c.zero(i.dom, sq.h.dom), i)
    if ip is None:
        raise CategoryError("no mediator for the cone (0, i)")
    cert = KernelCert(c, sq.d_prime, ip)
    if bound is not None:
        res = verify_universal(cert, bound)
        if not res.passed:
            raise CategoryError(f"lifted kernel fails the oracle: {res.failure}")
    return cert
