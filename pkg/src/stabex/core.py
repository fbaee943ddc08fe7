"""Additive-category interface shared by every instance.

An instance is a finite Z/n-linear category: hom-sets are Z/n-modules with a
known generating set (``hom_basis``), and morphism payloads flatten to
coordinate vectors.  That is enough to solve any factorization problem
(``lift_many`` / ``colift_many``) by linear algebra, which is how every
mediator in the toolkit is computed.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

from .ring import Matrix, solver


class CategoryError(Exception):
    """Base class for toolkit errors."""


class ShapeMismatch(CategoryError, ValueError):
    pass


class NonEnumerable(CategoryError):
    pass


class ClassClosureViolation(CategoryError):
    pass


class OracleBudgetExceeded(CategoryError):
    pass


@dataclass(frozen=True, slots=True)
class Mor:
    """A morphism ``dom -> cod`` carrying an instance-specific payload."""

    dom: Hashable
    cod: Hashable
    data: Hashable

    def __repr__(self):
        return f"Mor({self.dom!r} -> {self.cod!r}: {self.data!r})"


@dataclass(frozen=True)
class Biproduct:
    left: Hashable
    right: Hashable
    sum: Hashable
    inj1: Mor
    inj2: Mor
    proj1: Mor
    proj2: Mor


class Category(ABC):
    """Abstract additive category with finite, enumerable hom-sets."""

    name: str = "category"
    modulus: int | None = None
    enumerable: bool = True
    additive: bool = True
    orbit_reduction: bool = False

    def __init__(self):
        self.cache: dict = {}
        self._opposite = None

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"

    # -- additive structure ------------------------------------------------
    @abstractmethod
    def zero_object(self) -> Hashable: ...

    @abstractmethod
    def identity(self, A) -> Mor: ...

    @abstractmethod
    def zero(self, A, B) -> Mor: ...

    @abstractmethod
    def _compose(self, g: Mor, f: Mor) -> Hashable:
        """Payload of ``g o f``; shapes already checked."""

    @abstractmethod
    def _add(self, f: Mor, g: Mor) -> Hashable: ...

    @abstractmethod
    def _scale(self, c: int, f: Mor) -> Hashable: ...

    @abstractmethod
    def biproduct(self, A, B) -> Biproduct: ...

    def compose(self, g: Mor, *fs: Mor) -> Mor:
        """``g o f1 o f2 o ...`` (rightmost applied first)."""
        out = g
        for f in fs:
            if f.cod != out.dom:
                raise ShapeMismatch(f"cannot compose {out!r} after {f!r}")
            out = Mor(f.dom, out.cod, self._compose(out, f))
        return out

    def add(self, f: Mor, *gs: Mor) -> Mor:
        out = f
        for g in gs:
            if (g.dom, g.cod) != (out.dom, out.cod):
                raise ShapeMismatch(f"cannot add {out!r} and {g!r}")
            out = Mor(f.dom, f.cod, self._add(out, g))
        return out

    def scale(self, c: int, f: Mor) -> Mor:
        return Mor(f.dom, f.cod, self._scale(c, f))

    def negate(self, f: Mor) -> Mor:
        return self.scale(-1, f)

    def sub(self, f: Mor, g: Mor) -> Mor:
        return self.add(f, self.negate(g))

    def is_zero(self, f: Mor) -> bool:
        return f == self.zero(f.dom, f.cod)

    def is_identity(self, f: Mor) -> bool:
        return f.dom == f.cod and f == self.identity(f.dom)

    def to_zero(self, A) -> Mor:
        return self.zero(A, self.zero_object())

    def from_zero(self, A) -> Mor:
        return self.zero(self.zero_object(), A)

    # -- block morphisms ---------------------------------------------------
    def block_row(self, f: Mor, g: Mor) -> Mor:
        """``[f g]: A (+) B -> C`` for ``f: A -> C`` and ``g: B -> C``."""
        if f.cod != g.cod:
            raise ShapeMismatch("block_row needs a common codomain")
        bp = self.biproduct(f.dom, g.dom)
        return self.add(self.compose(f, bp.proj1), self.compose(g, bp.proj2))

    def block_col(self, f: Mor, g: Mor) -> Mor:
        """``[f; g]: C -> A (+) B`` for ``f: C -> A`` and ``g: C -> B``."""
        if f.dom != g.dom:
            raise ShapeMismatch("block_col needs a common domain")
        bp = self.biproduct(f.cod, g.cod)
        return self.add(self.compose(bp.inj1, f), self.compose(bp.inj2, g))

    def diag(self, f: Mor, g: Mor) -> Mor:
        """``f (+) g: A (+) B -> A' (+) B'``."""
        src = self.biproduct(f.dom, g.dom)
        dst = self.biproduct(f.cod, g.cod)
        return self.add(self.compose(dst.inj1, f, src.proj1), self.compose(dst.inj2, g, src.proj2))

    def block(self, a: Mor, b: Mor, c: Mor, d: Mor) -> Mor:
        """The 2x2 block morphism ``[[a, b], [c, d]]``."""
        return self.block_col(self.block_row(a, b), self.block_row(c, d))

    # -- enumeration -------------------------------------------------------
    @abstractmethod
    def objects(self, bound: int) -> list: ...

    @abstractmethod
    def homs(self, A, B) -> list[Mor]: ...

    @abstractmethod
    def hom_basis(self, A, B) -> list[Mor]:
        """A generating set of hom(A, B) as a Z/n-module."""

    @abstractmethod
    def flatten(self, f: Mor) -> tuple[int, ...]:
        """Coordinates of ``f`` in a fixed ambient Z/n-module for hom(dom, cod)."""

    def hom_size(self, A, B) -> int:
        return len(self.homs(A, B))

    def _require_enumerable(self):
        if not self.enumerable:
            raise NonEnumerable(f"{self.name} has no bounded enumerators")

    # -- factorization -----------------------------------------------------
    def _combination(self, basis: Sequence[Mor], coeffs: Sequence[int], A, B) -> Mor:
        out = self.zero(A, B)
        for c, b in zip(coeffs, basis):
            if c:
                out = self.add(out, self.scale(c, b))
        return out

    def lift_many(self, pairs: Sequence[tuple[Mor, Mor]]) -> Mor | None:
        """Some ``u`` with ``k o u == t`` for every ``(k, t)`` in ``pairs``."""
        k0, t0 = pairs[0]
        X, K = t0.dom, k0.dom
        for k, t in pairs:
            if t.dom != X or k.dom != K or k.cod != t.cod:
                raise ShapeMismatch("inconsistent lifting problem")
        basis = self.hom_basis(X, K)
        return self._solve_combination(basis, X, K, [
            ([self.flatten(self.compose(k, b)) for b in basis], self.flatten(t)) for k, t in pairs])

    def colift_many(self, pairs: Sequence[tuple[Mor, Mor]]) -> Mor | None:
        """Some ``u`` with ``u o c == t`` for every ``(c, t)`` in ``pairs``."""
        c0, t0 = pairs[0]
        C, Y = c0.cod, t0.cod
        for c, t in pairs:
            if c.cod != C or t.cod != Y or c.dom != t.dom:
                raise ShapeMismatch("inconsistent extension problem")
        basis = self.hom_basis(C, Y)
        return self._solve_combination(basis, C, Y, [
            ([self.flatten(self.compose(b, c)) for b in basis], self.flatten(t)) for c, t in pairs])

    def _solve_combination(self, basis, A, B, blocks) -> Mor | None:
        rows: list[tuple[int, ...]] = []
        rhs: list[int] = []
        for images, target in blocks:
            rows.extend(zip(*images) if images else [() for _ in target])
            rhs.extend(target)
        if not basis:
            return self.zero(A, B) if not any(rhs) else None
        if not rows:
            return self.zero(A, B)
        M = Matrix(self.modulus, len(rows), len(basis), rows)
        x = solver(M).solve(rhs)
        if x is None:
            return None
        return self._combination(basis, x, A, B)

    def lift(self, k: Mor, t: Mor) -> Mor | None:
        return self.lift_many([(k, t)])

    def colift(self, c: Mor, t: Mor) -> Mor | None:
        return self.colift_many([(c, t)])

    def inverse(self, f: Mor) -> Mor | None:
        g = self.lift(f, self.identity(f.cod))
        if g is None or self.compose(g, f) != self.identity(f.dom):
            return None
        return g

    def is_iso(self, f: Mor) -> bool:
        return self.inverse(f) is not None

    def is_retraction(self, r: Mor) -> bool:
        return self.lift(r, self.identity(r.cod)) is not None

    def is_section(self, s: Mor) -> bool:
        return self.colift(s, self.identity(s.dom)) is not None

    # -- (co)limit decision rules -----------------------------------------
    @abstractmethod
    def kernel(self, f: Mor):
        """``Mor`` k with f o k = 0 and universal, or None if not representable."""

    @abstractmethod
    def cokernel(self, f: Mor):
        """``Mor`` c with c o f = 0 and universal, or None if not representable."""

    def is_cokernel(self, d: Mor) -> bool:
        k = self.kernel(d)
        if k is None:
            raise CategoryError(f"{self.name}: cannot decide whether {d!r} is a cokernel")
        c = self.cokernel(k)
        return c is not None and self._same_quotient(c, d)

    def is_kernel(self, i: Mor) -> bool:
        c = self.cokernel(i)
        if c is None:
            raise CategoryError(f"{self.name}: cannot decide whether {i!r} is a kernel")
        k = self.kernel(c)
        return k is not None and self._same_sub(k, i)

    def _same_quotient(self, c: Mor, d: Mor) -> bool:
        if c.dom != d.dom:
            return False
        u = self.colift(c, d)
        return u is not None and self.is_iso(u)

    def _same_sub(self, k: Mor, i: Mor) -> bool:
        if k.cod != i.cod:
            return False
        u = self.lift(k, i)
        return u is not None and self.is_iso(u)

    def pullback_override(self, d: Mor, h: Mor):
        """Instance-specific pullback as ``(g, d_prime)``; NotImplemented by default."""
        return NotImplemented

    def pushout_override(self, i: Mor, f: Mor):
        return NotImplemented

    # -- orbit keys for sweep reduction -----------------------------------
    def right_key(self, f: Mor) -> Hashable:
        """Equal keys imply ``f' = f o a`` for an automorphism ``a`` of the domain."""
        return f

    def left_key(self, f: Mor) -> Hashable:
        """Equal keys imply ``f' = b o f`` for an automorphism ``b`` of the codomain."""
        return f

    def iso_key(self, f: Mor) -> Hashable:
        """Equal keys imply ``f' = b o f o a`` for automorphisms ``a``, ``b``."""
        return f

    def reps(self, A, B, side: str | None = "right") -> list[Mor]:
        """First morphism of each orbit of hom(A, B), in enumeration order."""
        if side is None:
            return self.homs(A, B)
        ck = ("reps", side, A, B)
        if ck in self.cache:
            return self.cache[ck]
        if self.orbit_reduction:
            out = self._orbit_reps(A, B, side)
        else:
            key = {"right": self.right_key, "left": self.left_key, "iso": self.iso_key}[side]
            seen = {}
            for f in self.homs(A, B):
                seen.setdefault(key(f), f)
            out = list(seen.values())
        self.cache[ck] = out
        return out

    def automorphisms(self, A) -> list[Mor]:
        ck = ("aut", A)
        if ck not in self.cache:
            self.cache[ck] = [f for f in self.homs(A, A) if self.is_iso(f)]
        return self.cache[ck]

    def aut_generators(self, A) -> list[Mor]:
        """A small generating set of the automorphism group, chosen greedily."""
        ck = ("autgen", A)
        if ck not in self.cache:
            one = self.identity(A)
            group, gens = {one}, []
            for a in self.automorphisms(A):
                if a in group:
                    continue
                gens.append(a)
                frontier = list(group)
                while frontier:
                    nxt = []
                    for x in frontier:
                        for g in gens:
                            y = self.compose(x, g)
                            if y not in group:
                                group.add(y)
                                nxt.append(y)
                    frontier = nxt
            self.cache[ck] = gens
        return self.cache[ck]

    def _orbit_reps(self, A, B, side: str) -> list[Mor]:
        """First member of each automorphism orbit, found by closing under generators."""
        right = self.aut_generators(A) if side in ("right", "iso") else []
        left = self.aut_generators(B) if side in ("left", "iso") else []
        seen, out = set(), []
        for f in self.homs(A, B):
            if f in seen:
                continue
            out.append(f)
            seen.add(f)
            frontier = [f]
            while frontier:
                nxt = []
                for x in frontier:
                    for y in [self.compose(x, a) for a in right] + [self.compose(b, x) for b in left]:
                        if y not in seen:
                            seen.add(y)
                            nxt.append(y)
                frontier = nxt
        return out

    # -- descriptor / payload serialization -------------------------------
    def describe_object(self, A) -> Any:
        return A

    def describe_mor(self, f: Mor) -> Any:
        return {"dom": self.describe_object(f.dom), "cod": self.describe_object(f.cod),
                "data": _plain(f.data)}

    @property
    def opposite(self) -> "Opposite":
        if self._opposite is None:
            self._opposite = Opposite(self)
        return self._opposite


def _plain(x):
    if isinstance(x, Matrix):
        return [list(r) for r in x.data]
    if isinstance(x, Mor):
        return _plain(x.data)
    if isinstance(x, tuple):
        return [_plain(y) for y in x]
    return x


def enumerate_module(cat: Category, basis: Sequence[Mor], A, B) -> list[Mor]:
    """All Z/n-combinations of ``basis`` (deduplicated, deterministic order)."""
    seen = {}
    zero = cat.zero(A, B)
    seen[zero] = None
    for coeffs in itertools.product(range(cat.modulus), repeat=len(basis)):
        f = cat._combination(basis, coeffs, A, B)
        seen.setdefault(f, None)
    return list(seen)


@dataclass(frozen=True)
class ObjectClass:
    """A class of objects containing 0, closed under isomorphism.

    ``members(bound)`` lists representatives of every member up to isomorphism
    within the bound; ``contains`` is the membership predicate.
    """

    name: str
    contains: Callable[[Any], bool]
    members: Callable[[int], list]
    is_all: bool = False

    def __repr__(self):
        return f"ObjectClass({self.name})"


def all_objects(cat: Category) -> ObjectClass:
    return ObjectClass("all", lambda X: True, cat.objects, is_all=True)


class Opposite(Category):
    """The opposite category; payloads are shared, endpoints swapped."""

    def __init__(self, base: Category):
        super().__init__()
        self.base = base
        self.name = f"op({base.name})"
        self.modulus = base.modulus
        self.enumerable = base.enumerable
        self.additive = base.additive
        self.idempotent_complete = getattr(base, "idempotent_complete", False)
        self.orbit_reduction = base.orbit_reduction
        self._opposite = base

    @staticmethod
    def op(f: Mor) -> Mor:
        return Mor(f.cod, f.dom, f.data)

    unop = op

    def zero_object(self):
        return self.base.zero_object()

    def identity(self, A):
        return self.op(self.base.identity(A))

    def zero(self, A, B):
        return self.op(self.base.zero(B, A))

    def _compose(self, g, f):
        return self.base.compose(self.unop(f), self.unop(g)).data

    def _add(self, f, g):
        return self.base.add(self.unop(f), self.unop(g)).data

    def _scale(self, c, f):
        return self.base.scale(c, self.unop(f)).data

    def biproduct(self, A, B):
        bp = self.base.biproduct(A, B)
        return Biproduct(A, B, bp.sum, self.op(bp.proj1), self.op(bp.proj2),
                         self.op(bp.inj1), self.op(bp.inj2))

    def objects(self, bound):
        return self.base.objects(bound)

    def homs(self, A, B):
        return [self.op(f) for f in self.base.homs(B, A)]

    def hom_basis(self, A, B):
        return [self.op(f) for f in self.base.hom_basis(B, A)]

    def hom_size(self, A, B):
        return self.base.hom_size(B, A)

    def flatten(self, f):
        return self.base.flatten(self.unop(f))

    def lift_many(self, pairs):
        u = self.base.colift_many([(self.unop(k), self.unop(t)) for k, t in pairs])
        return None if u is None else self.op(u)

    def colift_many(self, pairs):
        u = self.base.lift_many([(self.unop(c), self.unop(t)) for c, t in pairs])
        return None if u is None else self.op(u)

    def kernel(self, f):
        c = self.base.cokernel(self.unop(f))
        return None if c is None else self.op(c)

    def cokernel(self, f):
        k = self.base.kernel(self.unop(f))
        return None if k is None else self.op(k)

    def is_cokernel(self, d):
        return self.base.is_kernel(self.unop(d))

    def is_kernel(self, i):
        return self.base.is_cokernel(self.unop(i))

    def pullback_override(self, d, h):
        res = self.base.pushout_override(self.unop(d), self.unop(h))
        if res is NotImplemented or res is None:
            return res
        i_, f_ = res
        return self.op(f_), self.op(i_)

    def pushout_override(self, i, f):
        res = self.base.pullback_override(self.unop(i), self.unop(f))
        if res is NotImplemented or res is None:
            return res
        g, d_ = res
        return self.op(d_), self.op(g)

    def right_key(self, f):
        return ("op", self.base.left_key(self.unop(f)))

    def left_key(self, f):
        return ("op", self.base.right_key(self.unop(f)))

    def iso_key(self, f):
        return ("op", self.base.iso_key(self.unop(f)))

    def describe_object(self, A):
        return self.base.describe_object(A)

    def describe_mor(self, f):
        return self.base.describe_mor(self.unop(f))
