"""Truncated chain complexes and projective spectra over an instance.

Both are diagrams on a finite line of positions ``0 .. N-1``:

* chain complexes carry differentials ``X^k -> X^(k+1)`` with consecutive
  composites zero (degrees go up);
* projective spectra carry bonds ``X_(k+1) -> X_k``; the general bond
  ``X_m -> X_n`` for ``n <= m`` is the composite of consecutive ones and
  ``X_n^n`` is the identity.

Morphisms are families of base morphisms commuting with the arrows.  Kernels,
cokernels and the cokernel test are computed position by position: evaluation
at a position has adjoints on both sides, so it preserves and reflects them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import Biproduct, Category, CategoryError, Mor, ShapeMismatch
from .ring import Matrix, solver
from .stability import certify_stable_ses, is_kernel_cokernel_pair


@dataclass(frozen=True)
class DiagramObj:
    """Objects at each position plus the consecutive structure maps."""

    objs: tuple
    arrows: tuple

    def __repr__(self):
        return f"Diagram({list(self.objs)}, {[a.data for a in self.arrows]})"


class DiagramCategory(Category):
    """Shared machinery; subclasses fix the arrow direction and relations."""

    kind = "diagram"
    orbit_reduction = True

    def __init__(self, base: Category, length: int):
        super().__init__()
        if length < 1:
            raise ValueError("length must be at least 1")
        self.base = base
        self.length = length
        self.modulus = base.modulus
        self.name = f"{self.kind}[{length}]:{base.name}"

    # arrow k runs from position src(k) to position tgt(k)
    def src(self, k: int) -> int:
        raise NotImplementedError

    def tgt(self, k: int) -> int:
        raise NotImplementedError

    def relations_hold(self, arrows: tuple) -> bool:
        return True

    def make(self, objs, arrows=None) -> DiagramObj:
        b = self.base
        objs = tuple(objs)
        if len(objs) != self.length:
            raise ShapeMismatch(f"expected {self.length} positions")
        if arrows is None:
            arrows = tuple(b.zero(objs[self.src(k)], objs[self.tgt(k)]) for k in range(self.length - 1))
        arrows = tuple(arrows)
        for k, a in enumerate(arrows):
            if (a.dom, a.cod) != (objs[self.src(k)], objs[self.tgt(k)]):
                raise ShapeMismatch(f"arrow {k} has the wrong endpoints")
        if not self.relations_hold(arrows):
            raise CategoryError("structure maps violate the defining relations")
        return DiagramObj(objs, arrows)

    def is_morphism(self, X: DiagramObj, Y: DiagramObj, fs) -> bool:
        b = self.base
        return all(b.compose(Y.arrows[k], fs[self.src(k)]) == b.compose(fs[self.tgt(k)], X.arrows[k])
                   for k in range(self.length - 1))

    def mor(self, X: DiagramObj, Y: DiagramObj, fs) -> Mor:
        fs = tuple(fs)
        if not self.is_morphism(X, Y, fs):
            raise ShapeMismatch("family does not commute with the structure maps")
        return Mor(X, Y, fs)

    # additive structure
    def zero_object(self):
        return self.make([self.base.zero_object()] * self.length)

    def identity(self, X):
        return Mor(X, X, tuple(self.base.identity(A) for A in X.objs))

    def zero(self, X, Y):
        return Mor(X, Y, tuple(self.base.zero(A, B) for A, B in zip(X.objs, Y.objs)))

    def _compose(self, g, f):
        return tuple(self.base.compose(a, b) for a, b in zip(g.data, f.data))

    def _add(self, f, g):
        return tuple(self.base.add(a, b) for a, b in zip(f.data, g.data))

    def _scale(self, c, f):
        return tuple(self.base.scale(c, a) for a in f.data)

    def biproduct(self, X, Y):
        b = self.base
        bps = [b.biproduct(A, B) for A, B in zip(X.objs, Y.objs)]
        S = DiagramObj(tuple(bp.sum for bp in bps),
                       tuple(b.diag(x, y) for x, y in zip(X.arrows, Y.arrows)))
        pick = lambda name: tuple(getattr(bp, name) for bp in bps)
        return Biproduct(X, Y, S, Mor(X, S, pick("inj1")), Mor(Y, S, pick("inj2")),
                         Mor(S, X, pick("proj1")), Mor(S, Y, pick("proj2")))

    # enumeration
    def objects(self, bound):
        key = ("objects", bound)
        if key not in self.cache:
            b = self.base
            out = []
            for objs in itertools.product(b.objects(bound), repeat=self.length):
                choices = [b.homs(objs[self.src(k)], objs[self.tgt(k)]) for k in range(self.length - 1)]
                for arrows in itertools.product(*choices):
                    if self.relations_hold(arrows):
                        out.append(DiagramObj(objs, tuple(arrows)))
            self.cache[key] = out
        return self.cache[key]

    def homs(self, X, Y):
        key = ("homs", X, Y)
        if key not in self.cache:
            b = self.base
            self.cache[key] = [Mor(X, Y, fs) for fs in
                               itertools.product(*[b.homs(A, B) for A, B in zip(X.objs, Y.objs)])
                               if self.is_morphism(X, Y, fs)]
        return self.cache[key]

    def hom_size(self, X, Y):
        return len(self.homs(X, Y))

    def hom_basis(self, X, Y):
        """Generators of the solution module of the commutation constraints."""
        key = ("basis", X, Y)
        if key in self.cache:
            return self.cache[key]
        b = self.base
        local = [b.hom_basis(A, B) for A, B in zip(X.objs, Y.objs)]
        slots = [(n, e) for n, basis in enumerate(local) for e in basis]
        zeros = tuple(b.zero(A, B) for A, B in zip(X.objs, Y.objs))

        def family(coeffs):
            fs = list(zeros)
            for c, (n, e) in zip(coeffs, slots):
                if c:
                    fs[n] = b.add(fs[n], b.scale(c, e))
            return tuple(fs)

        def defect(fs):
            out = []
            for k in range(self.length - 1):
                lhs = b.compose(Y.arrows[k], fs[self.src(k)])
                rhs = b.compose(fs[self.tgt(k)], X.arrows[k])
                out.extend(b.flatten(b.sub(lhs, rhs)))
            return out

        if not slots:
            out = []
        else:
            cols = [defect(family([1 if j == i else 0 for j in range(len(slots))])) for i in range(len(slots))]
            if cols and cols[0]:
                M = Matrix(self.modulus, len(cols[0]), len(slots), list(zip(*cols)))
                gens = solver(M).nullspace
            else:
                gens = [tuple(1 if j == i else 0 for j in range(len(slots))) for i in range(len(slots))]
            out = [Mor(X, Y, family(g)) for g in gens]
        self.cache[key] = out
        return out

    def flatten(self, f):
        return tuple(x for a in f.data for x in self.base.flatten(a))

    # kernels and cokernels, position by position
    def kernel(self, f):
        b = self.base
        ks = [b.kernel(a) for a in f.data]
        if any(k is None for k in ks):
            return None
        X = f.dom
        arrows = []
        for k in range(self.length - 1):
            s, t = self.src(k), self.tgt(k)
            a = b.lift(ks[t], b.compose(X.arrows[k], ks[s]))
            if a is None:
                raise CategoryError("structure map does not restrict to the kernel")  # pragma: no cover
            arrows.append(a)
        K = DiagramObj(tuple(k.dom for k in ks), tuple(arrows))
        return Mor(K, X, tuple(ks))

    def cokernel(self, f):
        b = self.base
        cs = [b.cokernel(a) for a in f.data]
        if any(c is None for c in cs):
            return None
        Y = f.cod
        arrows = []
        for k in range(self.length - 1):
            s, t = self.src(k), self.tgt(k)
            a = b.colift(cs[s], b.compose(cs[t], Y.arrows[k]))
            if a is None:
                raise CategoryError("structure map does not descend to the cokernel")  # pragma: no cover
            arrows.append(a)
        Q = DiagramObj(tuple(c.cod for c in cs), tuple(arrows))
        return Mor(Y, Q, tuple(cs))

    def is_cokernel(self, d):
        return all(self.base.is_cokernel(a) for a in d.data)

    def is_kernel(self, i):
        return all(self.base.is_kernel(a) for a in i.data)

    def at(self, f: Mor, n: int) -> Mor:
        """The component of ``f`` at position ``n``."""
        return f.data[n]

    def describe_object(self, X):
        b = self.base
        return {"objects": [b.describe_object(A) for A in X.objs],
                "arrows": [b.describe_mor(a) for a in X.arrows]}

    def describe_mor(self, f):
        return {"dom": self.describe_object(f.dom), "cod": self.describe_object(f.cod),
                "components": [self.base.describe_mor(a) for a in f.data]}


class ChainCategory(DiagramCategory):
    """Cochain-oriented complexes ``X^0 -> X^1 -> ... -> X^(N-1)``."""

    kind = "chain"

    def src(self, k):
        return k

    def tgt(self, k):
        return k + 1

    def relations_hold(self, arrows):
        b = self.base
        return all(b.is_zero(b.compose(arrows[k + 1], arrows[k])) for k in range(len(arrows) - 1))

    def concentrated(self, X, n: int) -> DiagramObj:
        """``X`` in degree ``n`` and zero elsewhere."""
        if not 0 <= n < self.length:
            raise IndexError(f"degree {n} outside 0..{self.length - 1}")
        Z = self.base.zero_object()
        return self.make([X if k == n else Z for k in range(self.length)])

    def concentrated_map(self, alpha: Mor, n: int, C: DiagramObj) -> Mor:
        """The chain map from ``alpha`` concentrated in degree ``n`` into ``C``, zero elsewhere."""
        X = self.concentrated(alpha.dom, n)
        b = self.base
        fs = tuple(alpha if k == n else b.zero(X.objs[k], C.objs[k]) for k in range(self.length))
        return self.mor(X, C, fs)


class SpectrumCategory(DiagramCategory):
    """Truncated projective spectra ``X_0 <- X_1 <- ... <- X_(L-1)``."""

    kind = "spectra"

    def src(self, k):
        return k + 1

    def tgt(self, k):
        return k

    def bond(self, X: DiagramObj, m: int, n: int) -> Mor:
        """``X_m^n: X_m -> X_n`` for ``n <= m``; the identity when ``n == m``."""
        if n > m:
            raise ValueError("bonds run from higher to lower index")
        b = self.base
        out = b.identity(X.objs[m])
        for k in range(m - 1, n - 1, -1):
            out = b.compose(X.arrows[k], out)
        return out

    def coherent(self, X: DiagramObj) -> bool:
        """``X_n^k o X_m^n == X_m^k`` for all ``k <= n <= m``."""
        b = self.base
        L = self.length
        return all(b.compose(self.bond(X, n, k), self.bond(X, m, n)) == self.bond(X, m, k)
                   for m in range(L) for n in range(m + 1) for k in range(n + 1))

    def constant(self, A) -> DiagramObj:
        one = self.base.identity(A)
        return self.make([A] * self.length, [one] * (self.length - 1))

    def constant_map(self, f: Mor) -> Mor:
        return self.mor(self.constant(f.dom), self.constant(f.cod), [f] * self.length)


@dataclass(frozen=True)
class EquivalenceRecord:
    i: Mor
    d: Mor
    diagram_stable: bool
    positionwise_stable: bool
    positions: tuple

    @property
    def agree(self) -> bool:
        return self.diagram_stable == self.positionwise_stable


def positionwise_stable_equiv(cat: DiagramCategory, i: Mor, d: Mor, bound: int) -> EquivalenceRecord:
    """Stability in the diagram category against stability at every position."""
    whole = certify_stable_ses(cat, i, d, bound).stable
    per = tuple(certify_stable_ses(cat.base, a, c, bound).stable for a, c in zip(i.data, d.data))
    return EquivalenceRecord(i, d, whole, all(per), per)


degreewise_stable_equiv = positionwise_stable_equiv
levelwise_stable_equiv = positionwise_stable_equiv


def kernel_cokernel_pairs(cat: Category, bound: int, up_to_iso: bool = True):
    """Pairs ``(ker d, d)`` with ``d`` a cokernel between objects within bound.

    With ``up_to_iso`` only the first ``d`` of each isomorphism class of arrows is kept.
    """
    objs = cat.objects(bound)
    for B in objs:
        for C in objs:
            for d in cat.reps(B, C, "iso" if up_to_iso else None):
                if not cat.is_cokernel(d):
                    continue
                k = cat.kernel(d)
                if k is not None and is_kernel_cokernel_pair(cat, k, d):
                    yield k, d


@dataclass(frozen=True)
class EquivalenceReport:
    instance: str
    length: int
    bound: int
    records: tuple

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def agreeing(self) -> int:
        return sum(r.agree for r in self.records)

    @property
    def passed(self) -> bool:
        return self.agreeing == self.total

    def to_json(self) -> dict:
        return {"instance": self.instance, "length": self.length, "bound": self.bound,
                "truncation": f"positions 0..{self.length - 1}",
                "pairs": self.total, "agreeing": self.agreeing,
                "stable": sum(r.diagram_stable for r in self.records), "passed": self.passed}


def equivalence_sweep(cat: DiagramCategory, bound: int) -> EquivalenceReport:
    recs = tuple(positionwise_stable_equiv(cat, i, d, bound) for i, d in kernel_cokernel_pairs(cat, bound))
    return EquivalenceReport(cat.base.name, cat.length, bound, recs)
