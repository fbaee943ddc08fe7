"""Concrete additive categories: free modules over Z/n and subspace pairs over F_p.

Both are presented skeletally with canonical payloads, so morphism equality is
payload equality.  A morphism ``R^a -> R^b`` is a ``b x a`` matrix acting on
column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Biproduct, Category, CategoryError, Mor, NonEnumerable, ShapeMismatch
from .ring import (
    Matrix,
    free_basis,
    howell_form,
    row_module_invariants,
    smith_key,
    solve_matrix,
    solver,
)

HOM_CACHE_LIMIT = 5000


class FreeModuleCategory(Category):
    """Finitely generated free modules over Z/n; objects are ranks.

    The categorical kernel of ``f`` exists iff the module-theoretic kernel is
    free, and dually for cokernels (computed through the transpose duality).
    """

    def __init__(self, n: int):
        super().__init__()
        if n < 2:
            raise ValueError("modulus must be at least 2")
        self.modulus = n
        self.name = f"zmod:{n}"

    # additive structure
    def zero_object(self):
        return 0

    def identity(self, A):
        return Mor(A, A, Matrix.identity(self.modulus, A))

    def zero(self, A, B):
        return Mor(A, B, Matrix.zero(self.modulus, B, A))

    def scalar(self, A, c):
        return Mor(A, A, Matrix.scalar(self.modulus, A, c))

    def mor(self, rows, dom=None, cod=None) -> Mor:
        """Build a morphism from a row list; ``dom``/``cod`` disambiguate empty shapes."""
        rows = [list(r) for r in rows]
        cod = len(rows) if cod is None else cod
        if dom is None:
            dom = len(rows[0]) if rows else 0
        return Mor(dom, cod, Matrix(self.modulus, cod, dom, rows))

    def _compose(self, g, f):
        return g.data @ f.data

    def _add(self, f, g):
        return f.data + g.data

    def _scale(self, c, f):
        return f.data.scale(c)

    def biproduct(self, A, B):
        n = self.modulus
        S = A + B
        I = Matrix.identity(n, S)
        p1 = I.submatrix(0, A, 0, S)
        p2 = I.submatrix(A, S, 0, S)
        return Biproduct(A, B, S, Mor(A, S, p1.T), Mor(B, S, p2.T), Mor(S, A, p1), Mor(S, B, p2))

    def block_row(self, f, g):
        if f.cod != g.cod:
            raise ShapeMismatch("block_row needs a common codomain")
        return Mor(f.dom + g.dom, f.cod, f.data.hstack(g.data))

    def block_col(self, f, g):
        if f.dom != g.dom:
            raise ShapeMismatch("block_col needs a common domain")
        return Mor(f.dom, f.cod + g.cod, f.data.vstack(g.data))

    def diag(self, f, g):
        n = self.modulus
        top = f.data.hstack(Matrix.zero(n, f.cod, g.dom))
        bot = Matrix.zero(n, g.cod, f.dom).hstack(g.data)
        return Mor(f.dom + g.dom, f.cod + g.cod, top.vstack(bot))

    # enumeration
    def objects(self, bound):
        return list(range(bound + 1))

    def hom_size(self, A, B):
        return self.modulus ** (A * B)

    def homs(self, A, B):
        key = ("homs", A, B)
        if key in self.cache:
            return self.cache[key]
        out = [Mor(A, B, M) for M in Matrix.all(self.modulus, B, A)]
        if len(out) <= HOM_CACHE_LIMIT:
            self.cache[key] = out
        return out

    def hom_basis(self, A, B):
        n = self.modulus
        out = []
        for i in range(B):
            for j in range(A):
                out.append(Mor(A, B, Matrix(n, B, A, [[1 if (r, c) == (i, j) else 0 for c in range(A)]
                                                      for r in range(B)])))
        return out

    def flatten(self, f):
        return f.data.flat()

    # factorization by direct matrix solving
    def lift_many(self, pairs):
        X, K = pairs[0][1].dom, pairs[0][0].dom
        Ks = Ts = None
        for k, t in pairs:
            if t.dom != X or k.dom != K or k.cod != t.cod:
                raise ShapeMismatch("inconsistent lifting problem")
            Ks = k.data if Ks is None else Ks.vstack(k.data)
            Ts = t.data if Ts is None else Ts.vstack(t.data)
        U = solve_matrix(Ks, Ts)
        return None if U is None else Mor(X, K, U)

    def colift_many(self, pairs):
        C, Y = pairs[0][0].cod, pairs[0][1].cod
        Cs = Ts = None
        for c, t in pairs:
            if c.cod != C or t.cod != Y or c.dom != t.dom:
                raise ShapeMismatch("inconsistent extension problem")
            Cs = c.data.T if Cs is None else Cs.vstack(c.data.T)
            Ts = t.data.T if Ts is None else Ts.vstack(t.data.T)
        U = solve_matrix(Cs, Ts)
        return None if U is None else Mor(C, Y, U.T)

    # kernels and cokernels
    def _free_nullspace(self, M: Matrix) -> Matrix | None:
        """Basis columns of ``{x : M x = 0}`` when that module is free."""
        gens = solver(M).nullspace
        G = Matrix(self.modulus, len(gens), M.cols, gens)
        B = free_basis(G)
        return None if B is None else B.T

    def kernel(self, f):
        K = self._free_nullspace(f.data)
        return None if K is None else Mor(K.cols, f.dom, K)

    def cokernel(self, f):
        K = self._free_nullspace(f.data.T)
        return None if K is None else Mor(f.cod, K.cols, K.T)

    def is_cokernel(self, d):
        return howell_form(d.data.T).module_size() == self.modulus ** d.cod

    def is_kernel(self, i):
        return not solver(i.data).nullspace

    def module_kernel_invariants(self, f) -> list[int]:
        """Cyclic annihilators of the module-theoretic kernel of ``f``."""
        gens = solver(f.data).nullspace
        return row_module_invariants(Matrix(self.modulus, len(gens), f.dom, gens))

    # orbit keys
    def right_key(self, f):
        return ("col", f.dom, f.cod, howell_form(f.data.T).matrix.data)

    def left_key(self, f):
        return ("row", f.dom, f.cod, howell_form(f.data).matrix.data)

    def iso_key(self, f):
        return ("smith", f.dom, f.cod, smith_key(f.data))

    # hooks used by the idempotent completion
    def karoubi_kernel(self, f: Mor, p: Mor, q: Mor):
        """Kernel of ``f: (A,p) -> (B,q)`` in the completion as ``(K, e, inclusion)``."""
        n, a = self.modulus, f.dom
        stacked = f.data.vstack(Matrix.identity(n, a) - p.data)
        gens = solver(stacked).nullspace
        G = Matrix(n, len(gens), a, gens)
        B = free_basis(G)
        if B is not None:
            r = B.rows
            return r, Matrix.identity(n, r), B.T
        Gm = G.T
        k = Gm.cols
        images, flats = [], []
        for i in range(k):
            for j in range(a):
                E = Matrix(n, k, a, [[1 if (r, c) == (i, j) else 0 for c in range(a)] for r in range(k)])
                images.append((Gm @ E @ Gm).flat())
        M = Matrix(n, a * k, k * a, list(zip(*images)))
        s = solver(M).solve(Gm.flat())
        if s is None:
            return None
        S = Matrix(n, k, a, [s[i * a:(i + 1) * a] for i in range(k)])
        e = S @ Gm
        return k, e, Gm @ e

    def karoubi_cokernel(self, f: Mor, p: Mor, q: Mor):
        res = self.karoubi_kernel(Mor(f.cod, f.dom, f.data.T), Mor(q.dom, q.cod, q.data.T),
                                  Mor(p.dom, p.cod, p.data.T))
        if res is None:
            return None
        k, e, j = res
        return k, e.T, j.T

    def karoubi_is_cokernel(self, f: Mor, p: Mor, q: Mor) -> bool:
        return howell_form(f.data.T).matrix == howell_form(q.data.T).matrix

    def karoubi_is_kernel(self, f: Mor, p: Mor, q: Mor) -> bool:
        return howell_form(f.data.T).module_size() == howell_form(p.data.T).module_size()

    def karoubi_image_key(self, A, p: Mor):
        return tuple(sorted(row_module_invariants(p.data.T)))

    def describe_mor(self, f):
        return {"dom": f.dom, "cod": f.cod, "matrix": [list(r) for r in f.data.data]}


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


@dataclass(frozen=True)
class PairObj:
    """An ambient space F_p^dim with a subspace spanned by the rows of ``basis``."""

    dim: int
    basis: Matrix

    @property
    def sub_dim(self) -> int:
        return self.basis.rows

    def __repr__(self):
        return f"Pair({self.dim}, {[list(r) for r in self.basis.data]})"


class PairCategory(Category):
    """Pairs (V, W) with W a subspace of V; morphisms map W into W'.

    Preabelian but not abelian: ``(F_p, 0) -> (F_p, F_p)`` is monic and epic
    without being invertible.
    """

    orbit_reduction = True

    def __init__(self, p: int):
        super().__init__()
        if not is_prime(p):
            raise ValueError(f"pairs instance needs a prime, got {p}")
        self.modulus = p
        self.name = f"pairs:{p}"

    def pair(self, dim: int, rows=()) -> PairObj:
        B = Matrix(self.modulus, len(rows), dim, rows)
        return PairObj(dim, howell_form(B).matrix)

    def _annihilator(self, X: PairObj) -> Matrix:
        """Rows spanning the functionals vanishing on the subspace of ``X``."""
        gens = solver(X.basis).nullspace if X.basis.rows else tuple(
            tuple(1 if i == j else 0 for j in range(X.dim)) for i in range(X.dim))
        return Matrix(self.modulus, len(gens), X.dim, gens)

    def is_morphism(self, F: Matrix, X: PairObj, Y: PairObj) -> bool:
        if F.shape != (Y.dim, X.dim):
            return False
        if X.sub_dim == 0:
            return True
        return (self._annihilator(Y) @ F @ X.basis.T).is_zero()

    def mor(self, X: PairObj, Y: PairObj, rows) -> Mor:
        F = Matrix(self.modulus, Y.dim, X.dim, rows)
        if not self.is_morphism(F, X, Y):
            raise ShapeMismatch(f"{F!r} does not map {X!r} into {Y!r}")
        return Mor(X, Y, F)

    def zero_object(self):
        return PairObj(0, Matrix.zero(self.modulus, 0, 0))

    def identity(self, A):
        return Mor(A, A, Matrix.identity(self.modulus, A.dim))

    def zero(self, A, B):
        return Mor(A, B, Matrix.zero(self.modulus, B.dim, A.dim))

    def _compose(self, g, f):
        return g.data @ f.data

    def _add(self, f, g):
        return f.data + g.data

    def _scale(self, c, f):
        return f.data.scale(c)

    def biproduct(self, A, B):
        n = self.modulus
        S_dim = A.dim + B.dim
        rows = [r + (0,) * B.dim for r in A.basis.data] + [(0,) * A.dim + r for r in B.basis.data]
        S = self.pair(S_dim, rows)
        I = Matrix.identity(n, S_dim)
        p1 = I.submatrix(0, A.dim, 0, S_dim)
        p2 = I.submatrix(A.dim, S_dim, 0, S_dim)
        return Biproduct(A, B, S, Mor(A, S, p1.T), Mor(B, S, p2.T), Mor(S, A, p1), Mor(S, B, p2))

    def objects(self, bound):
        key = ("objects", bound)
        if key not in self.cache:
            out = []
            for v in range(bound + 1):
                seen = {}
                for k in range(v + 1):
                    for M in Matrix.all(self.modulus, k, v):
                        H = howell_form(M).matrix
                        if H.rows == k:
                            seen.setdefault(H, None)
                out.extend(PairObj(v, H) for H in sorted(seen, key=lambda H: (H.rows, H.data)))
            self.cache[key] = out
        return self.cache[key]

    def homs(self, A, B):
        key = ("homs", A, B)
        if key not in self.cache:
            self.cache[key] = [Mor(A, B, F) for F in Matrix.all(self.modulus, B.dim, A.dim)
                               if self.is_morphism(F, A, B)]
        return self.cache[key]

    def hom_size(self, A, B):
        return len(self.homs(A, B))

    def hom_basis(self, A, B):
        key = ("basis", A, B)
        if key in self.cache:
            return self.cache[key]
        n = self.modulus
        elems = [Matrix(n, B.dim, A.dim, [[1 if (r, c) == (i, j) else 0 for c in range(A.dim)]
                                          for r in range(B.dim)])
                 for i in range(B.dim) for j in range(A.dim)]
        L = self._annihilator(B)
        if not elems:
            out = []
        elif A.sub_dim == 0 or L.rows == 0:
            out = [Mor(A, B, E) for E in elems]
        else:
            cols = [(L @ E @ A.basis.T).flat() for E in elems]
            M = Matrix(n, len(cols[0]), len(elems), list(zip(*cols)))
            out = []
            for vec in solver(M).nullspace:
                F = Matrix.zero(n, B.dim, A.dim)
                for c, E in zip(vec, elems):
                    if c:
                        F = F + E.scale(c)
                out.append(Mor(A, B, F))
        self.cache[key] = out
        return out

    def flatten(self, f):
        return f.data.flat()

    def _sub_coords(self, K: Matrix, vectors: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
        """Coordinates w.r.t. the independent columns of ``K`` of vectors in its span."""
        s = solver(K)
        out = []
        for v in vectors:
            x = s.solve(v)
            if x is None:
                raise CategoryError("vector outside the kernel span")  # pragma: no cover
            out.append(x)
        return out

    def kernel(self, f):
        n = self.modulus
        X, F = f.dom, f.data
        gens = solver(F).nullspace
        K = free_basis(Matrix(n, len(gens), X.dim, gens)).T
        if X.sub_dim:
            ys = solver(F @ X.basis.T).nullspace
            vecs = [(X.basis.T @ Matrix(n, len(y), 1, [[c] for c in y])).column(0) for y in ys]
        else:
            vecs = []
        obj = self.pair(K.cols, self._sub_coords(K, vecs) if K.cols else [])
        return Mor(obj, X, K)

    def cokernel(self, f):
        n = self.modulus
        Y, F = f.cod, f.data
        gens = solver(F.T).nullspace
        C = free_basis(Matrix(n, len(gens), Y.dim, gens))
        rows = [r for r in (C @ Y.basis.T).T.data] if Y.sub_dim and C.rows else []
        obj = self.pair(C.rows, rows)
        return Mor(Y, obj, C)

    def is_cokernel(self, d):
        D = d.data
        if howell_form(D.T).module_size() != self.modulus ** d.cod.dim:
            return False
        if d.dom.sub_dim == 0:
            return d.cod.sub_dim == 0
        return howell_form((D @ d.dom.basis.T).T).matrix == d.cod.basis

    def is_kernel(self, i):
        if solver(i.data).nullspace:
            return False
        L = self._annihilator(i.cod)
        if L.rows == 0:
            return i.dom.sub_dim == i.dom.dim
        pre = len(solver(L @ i.data).nullspace)
        return pre == i.dom.sub_dim

    def describe_object(self, A):
        return {"dim": A.dim, "sub": [list(r) for r in A.basis.data]}

    def describe_mor(self, f):
        return {"dom": self.describe_object(f.dom), "cod": self.describe_object(f.cod),
                "matrix": [list(r) for r in f.data.data]}


class CappedCategory(FreeModuleCategory):
    """Free modules over F_p of rank at most ``cap`` (a full, non-additive subcategory).

    Limits are those of the ambient category when their apex fits under the cap
    and are missing otherwise; this produces genuinely non-semi-stable cokernels.
    """

    additive = False

    def __init__(self, p: int, cap: int):
        if not is_prime(p):
            raise ValueError("capped instance needs a prime modulus")
        super().__init__(p)
        self.cap = cap
        self.name = f"capped:{p}:{cap}"
        self._ambient = FreeModuleCategory(p)

    def objects(self, bound):
        return list(range(min(bound, self.cap) + 1))

    def biproduct(self, A, B):
        if A + B > self.cap:
            raise ShapeMismatch(f"biproduct {A}+{B} exceeds cap {self.cap}")
        return super().biproduct(A, B)

    def kernel(self, f):
        k = super().kernel(f)
        return k if k is not None and k.dom <= self.cap else None

    def cokernel(self, f):
        c = super().cokernel(f)
        return c if c is not None and c.cod <= self.cap else None

    def pullback_override(self, d, h):
        from .limits import pullback
        sq = pullback(self._ambient, d, h)
        if sq is None or sq.apex > self.cap:
            return None
        return sq.g, sq.d_prime

    def pushout_override(self, i, f):
        from .limits import pushout
        sq = pushout(self._ambient, i, f)
        if sq is None or sq.apex > self.cap:
            return None
        return sq.i_prime, sq.f_prime


class IntegerCategory(Category):
    """Free abelian groups of finite rank; kernels only, not enumerable."""

    enumerable = False
    name = "zz"

    def zero_object(self):
        return 0

    def identity(self, A):
        return Mor(A, A, tuple(tuple(int(i == j) for j in range(A)) for i in range(A)))

    def zero(self, A, B):
        return Mor(A, B, tuple((0,) * A for _ in range(B)))

    def mor(self, rows, dom=None) -> Mor:
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        return Mor(len(rows[0]) if rows else (dom or 0), len(rows), rows)

    def _compose(self, g, f):
        cols = list(zip(*f.data)) if f.data else [()] * f.dom
        return tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in g.data)

    def _add(self, f, g):
        return tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(f.data, g.data))

    def _scale(self, c, f):
        return tuple(tuple(c * a for a in r) for r in f.data)

    def biproduct(self, A, B):
        S = A + B
        I = self.identity(S).data
        p1 = tuple(I[:A])
        p2 = tuple(I[A:])
        t = lambda M, rows, cols: tuple(tuple(M[j][i] for j in range(cols)) for i in range(rows))
        return Biproduct(A, B, S, Mor(A, S, t(p1, S, A)), Mor(B, S, t(p2, S, B)),
                         Mor(S, A, p1), Mor(S, B, p2))

    def objects(self, bound):
        raise NonEnumerable("the integer instance is not enumerable")

    def homs(self, A, B):
        raise NonEnumerable("the integer instance is not enumerable")

    def hom_basis(self, A, B):
        raise NonEnumerable("the integer instance is not enumerable")

    def flatten(self, f):
        return tuple(x for r in f.data for x in r)

    def kernel(self, f):
        """Saturated kernel lattice by unimodular column reduction of ``[F; I]``."""
        rows, cols = f.cod, f.dom
        A = [list(r) for r in f.data] + [[int(i == j) for j in range(cols)] for i in range(cols)]
        c0 = 0
        for r in range(rows):
            piv = None
            for c in range(c0, cols):
                if A[r][c] == 0:
                    continue
                if piv is None:
                    piv = c
                    continue
                a, b = A[r][piv], A[r][c]
                g, s, t = _xgcd(a, b)
                u, v = -b // g, a // g
                for row in A:
                    x, y = row[piv], row[c]
                    row[piv], row[c] = s * x + t * y, u * x + v * y
            if piv is not None:
                for row in A:
                    row[c0], row[piv] = row[piv], row[c0]
                c0 += 1
        basis = [tuple(A[rows + i][c] for i in range(cols)) for c in range(c0, cols)]
        return Mor(len(basis), cols, tuple(tuple(b[i] for b in basis) for i in range(cols)))

    def cokernel(self, f):
        raise CategoryError("the integer instance supports kernels only")

    def lift_many(self, pairs):
        raise CategoryError("the integer instance supports kernels only")


def _xgcd(a, b):
    from .ring import xgcd
    g, s, t = xgcd(a, b)
    if g < 0:
        g, s, t = -g, -s, -t
    return g, s, t


class DescriptorError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _parse_int(text: str, pos: int, what: str) -> int:
    if not text:
        raise DescriptorError(f"missing {what}", pos)
    if not text.isdigit():
        raise DescriptorError(f"expected an integer {what}, got {text!r}", pos)
    return int(text)


def parse_instance(desc: str) -> Category:
    """Parse ``zmod:<n>``, ``pairs:<p>``, ``capped:<p>:<cap>`` or ``karoubi:<desc>``."""
    head, sep, rest = desc.partition(":")
    if not sep:
        raise DescriptorError(f"expected '<kind>:<args>', got {desc!r}", len(desc))
    pos = len(head) + 1
    if head == "zmod":
        n = _parse_int(rest, pos, "modulus")
        if n < 2:
            raise DescriptorError("modulus must be at least 2", pos)
        return FreeModuleCategory(n)
    if head == "pairs":
        p = _parse_int(rest, pos, "prime")
        if not is_prime(p):
            raise DescriptorError(f"{p} is not prime", pos)
        return PairCategory(p)
    if head == "capped":
        a, sep2, b = rest.partition(":")
        p = _parse_int(a, pos, "prime")
        if not is_prime(p):
            raise DescriptorError(f"{p} is not prime", pos)
        if not sep2:
            raise DescriptorError("missing ':<cap>'", pos + len(a))
        return CappedCategory(p, _parse_int(b, pos + len(a) + 1, "cap"))
    if head == "karoubi":
        from .karoubi import KaroubiCategory
        try:
            return KaroubiCategory(parse_instance(rest))
        except DescriptorError as e:
            raise DescriptorError(str(e).rsplit(" (at", 1)[0], pos + e.position) from None
    raise DescriptorError(f"unknown instance kind {head!r}", 0)
