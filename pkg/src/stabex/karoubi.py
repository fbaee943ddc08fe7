"""The idempotent completion of an instance and the embedding H.

Objects are pairs ``(A, p)`` with ``p`` idempotent; a morphism
``(A, p) -> (B, q)`` is a base morphism ``f`` with ``f == q f p``.  H sends ``A``
to ``(A, 1)`` and ``f`` to ``f``.  Payloads of completion morphisms are base
``Mor`` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from .core import Biproduct, Category, CategoryError, Mor, ObjectClass, ShapeMismatch
from .limits import KernelCert, Square, verify_universal
from .stability import SemiStableVerdict, certify_semistable_cokernel, Refuted


@dataclass(frozen=True)
class KaroubiObj:
    base: Hashable
    p: Mor

    def __repr__(self):
        return f"({self.base!r}, {self.p.data!r})"


class NotIdempotent(CategoryError):
    pass


class KaroubiCategory(Category):
    """Idempotent completion; it is idempotent complete by construction."""

    orbit_reduction = True
    idempotent_complete = True

    def __init__(self, base: Category):
        super().__init__()
        self.base = base
        self.modulus = base.modulus
        self.enumerable = base.enumerable
        self.name = f"karoubi:{base.name}"

    # the embedding
    def H(self, A) -> KaroubiObj:
        return KaroubiObj(A, self.base.identity(A))

    def embed(self, f: Mor) -> Mor:
        return Mor(self.H(f.dom), self.H(f.cod), f)

    def unembed(self, F: Mor) -> Mor:
        if not (self.in_image_strict(F.dom) and self.in_image_strict(F.cod)):
            raise CategoryError("morphism is not between H-images")
        return F.data

    def in_image_strict(self, X: KaroubiObj) -> bool:
        return X.p == self.base.identity(X.base)

    def obj(self, A, p: Mor) -> KaroubiObj:
        if self.base.compose(p, p) != p:
            raise NotIdempotent(f"{p!r} is not idempotent")
        return KaroubiObj(A, p)

    def mor(self, X: KaroubiObj, Y: KaroubiObj, f: Mor) -> Mor:
        if self.base.compose(Y.p, f, X.p) != f:
            raise ShapeMismatch("f != q f p")
        return Mor(X, Y, f)

    # additive structure
    def zero_object(self):
        Z = self.base.zero_object()
        return KaroubiObj(Z, self.base.identity(Z))

    def identity(self, X):
        return Mor(X, X, X.p)

    def zero(self, X, Y):
        return Mor(X, Y, self.base.zero(X.base, Y.base))

    def _compose(self, g, f):
        return self.base.compose(g.data, f.data)

    def _add(self, f, g):
        return self.base.add(f.data, g.data)

    def _scale(self, c, f):
        return self.base.scale(c, f.data)

    def biproduct(self, X, Y):
        b = self.base
        bp = b.biproduct(X.base, Y.base)
        S = KaroubiObj(bp.sum, b.diag(X.p, Y.p))
        return Biproduct(X, Y, S,
                         Mor(X, S, b.compose(bp.inj1, X.p)), Mor(Y, S, b.compose(bp.inj2, Y.p)),
                         Mor(S, X, b.compose(X.p, bp.proj1)), Mor(S, Y, b.compose(Y.p, bp.proj2)))

    # enumeration
    def idempotents(self, A) -> list[Mor]:
        b = self.base
        return [e for e in b.homs(A, A) if b.compose(e, e) == e]

    def objects(self, bound, dedup: bool = False):
        key = ("objects", bound, dedup)
        if key not in self.cache:
            out, seen = [], set()
            for A in self.base.objects(bound):
                for e in self.idempotents(A):
                    X = KaroubiObj(A, e)
                    if dedup:
                        k = self.image_key(X)
                        if k in seen:
                            continue
                        seen.add(k)
                    out.append(X)
            self.cache[key] = out
        return self.cache[key]

    def image_key(self, X: KaroubiObj):
        """Isomorphism invariant of an object, complete when the base provides one."""
        hook = getattr(self.base, "karoubi_image_key", None)
        return hook(X.base, X.p) if hook else X

    def homs(self, X, Y):
        key = ("homs", X, Y)
        if key not in self.cache:
            b = self.base
            self.cache[key] = [Mor(X, Y, f) for f in b.homs(X.base, Y.base)
                               if b.compose(Y.p, f, X.p) == f]
        return self.cache[key]

    def hom_size(self, X, Y):
        return len(self.homs(X, Y))

    def hom_basis(self, X, Y):
        b = self.base
        seen = {}
        for f in b.hom_basis(X.base, Y.base):
            g = b.compose(Y.p, f, X.p)
            if not b.is_zero(g):
                seen.setdefault(g, None)
        return [Mor(X, Y, g) for g in seen]

    def flatten(self, f):
        return self.base.flatten(f.data)

    # factorization reduces to the base followed by sandwiching
    def lift_many(self, pairs):
        X, K = pairs[0][1].dom, pairs[0][0].dom
        u = self.base.lift_many([(k.data, t.data) for k, t in pairs])
        return None if u is None else Mor(X, K, self.base.compose(K.p, u, X.p))

    def colift_many(self, pairs):
        C, Y = pairs[0][0].cod, pairs[0][1].cod
        u = self.base.colift_many([(c.data, t.data) for c, t in pairs])
        return None if u is None else Mor(C, Y, self.base.compose(Y.p, u, C.p))

    # kernels and cokernels
    def kernel(self, F):
        b, X, Y = self.base, F.dom, F.cod
        hook = getattr(b, "karoubi_kernel", None)
        if hook is not None:
            res = hook(F.data, X.p, Y.p)
            if res is None:
                return None
            k, e, j = res
            K = KaroubiObj(k, Mor(k, k, e))
            return Mor(K, X, Mor(k, X.base, j))
        one = b.identity(X.base)
        k = b.kernel(b.block_col(F.data, b.sub(one, X.p)))
        if k is None:
            return None
        K = KaroubiObj(k.dom, b.identity(k.dom))
        return Mor(K, X, k)

    def cokernel(self, F):
        b, X, Y = self.base, F.dom, F.cod
        hook = getattr(b, "karoubi_cokernel", None)
        if hook is not None:
            res = hook(F.data, X.p, Y.p)
            if res is None:
                return None
            k, e, j = res
            Q = KaroubiObj(k, Mor(k, k, e))
            return Mor(Y, Q, Mor(Y.base, k, j))
        one = b.identity(Y.base)
        c = b.cokernel(b.block_row(F.data, b.sub(one, Y.p)))
        if c is None:
            return None
        Q = KaroubiObj(c.cod, b.identity(c.cod))
        return Mor(Y, Q, c)

    def is_cokernel(self, d):
        hook = getattr(self.base, "karoubi_is_cokernel", None)
        if hook is not None:
            return hook(d.data, d.dom.p, d.cod.p)
        return super().is_cokernel(d)

    def is_kernel(self, i):
        hook = getattr(self.base, "karoubi_is_kernel", None)
        if hook is not None:
            return hook(i.data, i.dom.p, i.cod.p)
        return super().is_kernel(i)

    def describe_object(self, X):
        return {"base": self.base.describe_object(X.base), "idempotent": self.base.describe_mor(X.p)}

    def describe_mor(self, F):
        return {"dom": self.describe_object(F.dom), "cod": self.describe_object(F.cod),
                "base": self.base.describe_mor(F.data)}


def split_idempotent(K: KaroubiCategory, e: Mor) -> KernelCert:
    """Kernel of an idempotent ``e`` on ``(A, p)``: the object ``(A, p - e)`` with inclusion ``p - e``."""
    if e.dom != e.cod or K.compose(e, e) != e:
        raise NotIdempotent(f"{e!r} is not an idempotent endomorphism")
    X = e.dom
    pe = K.base.sub(X.p, e.data)
    obj = KaroubiObj(X.base, pe)
    return KernelCert(K, e, Mor(obj, X, pe))


def _size(A) -> int:
    return A if isinstance(A, int) else getattr(A, "dim", 0)


def in_essential_image(K: KaroubiCategory, X: KaroubiObj, bound: int | None = None):
    """``(B, f, g)`` with ``f: X -> H(B)`` and ``g: H(B) -> X`` mutually inverse, or None.

    Searches every base object ``B`` within ``bound`` (default: the size of
    ``X.base``) and every ``f``; the inverse candidate is solved from ``g f = p``.
    """
    if K.in_image_strict(X):
        one = K.identity(X)
        return X.base, one, one
    bound = _size(X.base) if bound is None else bound
    for B in K.base.objects(bound):
        HB = K.H(B)
        one_B = K.identity(HB)
        for f in K.homs(X, HB):
            g = K.colift(f, K.identity(X))
            if g is not None and K.compose(f, g) == one_B:
                return B, f, g
    return None


def image_class(K: KaroubiCategory) -> ObjectClass:
    """The essential image of H as an object class; members are the H(B)."""
    def contains(X):
        return in_essential_image(K, X) is not None

    def members(bound):
        return [K.H(B) for B in K.base.objects(bound)]

    return ObjectClass("Im(H)", contains, members)


# -- transfer across H --------------------------------------------------------------

class ImageSquare(Square):
    """The H-image of a base pullback; mediators are ``w o p`` from the base mediator ``w``."""

    def mediate(self, a, b):
        K = self.cat
        w = Square(K.base, self.d.data, self.h.data, self.g.data, self.d_prime.data).mediate(a.data, b.data)
        if w is None:
            return None
        return Mor(a.dom, self.apex, K.base.compose(w, a.dom.p))


def preserve_pullback(K: KaroubiCategory, sq: Square) -> ImageSquare:
    e = K.embed
    return ImageSquare(K, e(sq.d), e(sq.h), e(sq.g), e(sq.d_prime))


def reflect_pullback(K: KaroubiCategory, sq: Square, bound: int | None = None) -> Square | None:
    """A base square isomorphic to a completion square over H-images, or None.

    The apex must lie in the essential image; its iso to ``H(B')`` moves the legs.
    """
    found = in_essential_image(K, sq.apex, bound)
    if found is None:
        return None
    B, _, g_iso = found
    b = K.base
    return Square(b, K.unembed(sq.d), K.unembed(sq.h),
                  K.compose(sq.g, g_iso).data, K.compose(sq.d_prime, g_iso).data)


@dataclass(frozen=True)
class TransferReport:
    subject: Mor
    base_verdict: SemiStableVerdict
    completion_verdict: SemiStableVerdict

    @property
    def agree(self) -> bool:
        a, c = self.base_verdict, self.completion_verdict
        if a.certified != c.certified:
            return False
        if a.certified:
            return True
        return a.outcome.failure == c.outcome.failure


def transfer_semistable(K: KaroubiCategory, d: Mor, bound: int) -> TransferReport:
    """Absolute verdict for ``d`` against the Im(H)-relative verdict for ``H(d)``."""
    base_v = certify_semistable_cokernel(K.base, d, None, bound)
    comp_v = certify_semistable_cokernel(K, K.embed(d), image_class(K), bound)
    if not comp_v.certified:
        o = comp_v.outcome
        comp_v = SemiStableVerdict("cokernel", comp_v.subject, Refuted(K.unembed(o.witness), o.failure))
    return TransferReport(d, base_v, comp_v)


def fully_faithful(K: KaroubiCategory, bound: int) -> bool:
    """H induces bijections hom(A, B) -> hom(H A, H B) for all objects within bound."""
    b = K.base
    for A in b.objects(bound):
        for B in b.objects(bound):
            src = b.homs(A, B)
            tgt = K.homs(K.H(A), K.H(B))
            if len(set(src)) != len(src) or {K.embed(f) for f in src} != set(tgt):
                return False
    return True


def idempotents_split(K: KaroubiCategory, bound: int, oracle_bound: int) -> tuple[bool, int]:
    """Every idempotent endomorphism within bound has its kernel from split_idempotent (oracle-checked)."""
    n = 0
    for X in K.objects(bound):
        for e in K.homs(X, X):
            if K.compose(e, e) != e:
                continue
            n += 1
            if not verify_universal(split_idempotent(K, e), oracle_bound):
                return False, n
    return True, n
