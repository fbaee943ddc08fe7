"""Exact linear algebra over Z/n.

Matrices are immutable and row-major.  Normal forms are computed directly over
the residue ring with unimodular gcd-based row operations (Howell's
construction), never by lifting to the integers, so they remain canonical when
Z/n has zero divisors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterable, Iterator, Sequence


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) over the integers."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


def gcdex(a: int, b: int, n: int) -> tuple[int, int, int, int, int]:
    """Unimodular 2x2 transform clearing ``b`` against ``a`` modulo ``n``.

    Returns ``(g, s, t, u, v)`` with ``s*a + t*b = g`` and ``u*a + v*b = 0``
    (mod n), where ``[[s, t], [u, v]]`` has determinant 1.
    """
    g, s, t = xgcd(a, b)
    if g == 0:
        return 0, 1, 0, 0, 1
    return g % n, s % n, t % n, (-b // g) % n, (a // g) % n


def unit_normalizer(a: int, n: int) -> int:
    """A unit ``u`` of Z/n with ``u*a = gcd(a, n)`` (mod n)."""
    a %= n
    if a == 0:
        return 1
    g = gcd(a, n)
    m = n // g
    u0 = pow(a // g, -1, m) if m > 1 else 0
    for k in range(g):
        u = u0 + k * m
        if gcd(u, n) == 1:
            return u % n
    raise ArithmeticError(f"no unit normalizer for {a} mod {n}")  # pragma: no cover


def prime_powers(n: int) -> list[int]:
    """Prime-power factors of ``n`` in increasing prime order."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append(q)
        p += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def crt_idempotents(n: int) -> tuple[tuple[int, int], ...]:
    """Pairs ``(q, e)``: ``e`` is 1 modulo the prime power ``q`` and 0 modulo n/q."""
    out = []
    for q in prime_powers(n):
        m = n // q
        out.append((q, (m * pow(m % q, -1, q)) % n if q > 1 else 0))
    return tuple(out)


def invariant_factors(orders: Iterable[int]) -> list[int]:
    """Invariant factors e1 | e2 | ... of a direct sum of cyclic groups Z/m."""
    by_prime: dict[int, list[int]] = {}
    for m in orders:
        for q in prime_powers(m):
            p = next(d for d in range(2, q + 1) if q % d == 0)
            by_prime.setdefault(p, []).append(q)
    if not by_prime:
        return []
    length = max(len(v) for v in by_prime.values())
    factors = [1] * length
    for qs in by_prime.values():
        qs.sort(reverse=True)
        for i, q in enumerate(qs):
            factors[length - 1 - i] *= q
    return factors


class Matrix:
    """Immutable matrix over Z/n.  A morphism R^cols -> R^rows acts on columns."""

    __slots__ = ("n", "rows", "cols", "data", "_hash")

    def __init__(self, n: int, rows: int, cols: int, data: Sequence[Sequence[int]]):
        if n < 2:
            raise ValueError("modulus must be at least 2")
        data = tuple(tuple(x % n for x in row) for row in data)
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(f"entries do not match shape {rows}x{cols}")
        self._set(n, rows, cols, data)

    def _set(self, n, rows, cols, data):
        self.n = n
        self.rows = rows
        self.cols = cols
        self.data = data
        self._hash = None

    @classmethod
    def _raw(cls, n: int, rows: int, cols: int, data: tuple) -> "Matrix":
        m = object.__new__(cls)
        m._set(n, rows, cols, data)
        return m

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[Sequence[int]], cols: int | None = None) -> "Matrix":
        rows = list(rows)
        if cols is None:
            if not rows:
                raise ValueError("column count required for an empty row list")
            cols = len(rows[0])
        return cls(n, len(rows), cols, rows)

    @classmethod
    def zero(cls, n: int, rows: int, cols: int) -> "Matrix":
        return cls._raw(n, rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int, size: int) -> "Matrix":
        return cls._raw(n, size, size, tuple(
            tuple(1 if i == j else 0 for j in range(size)) for i in range(size)))

    @classmethod
    def scalar(cls, n: int, size: int, c: int) -> "Matrix":
        c %= n
        return cls._raw(n, size, size, tuple(
            tuple(c if i == j else 0 for j in range(size)) for i in range(size)))

    @classmethod
    def all(cls, n: int, rows: int, cols: int) -> Iterator["Matrix"]:
        """Every rows x cols matrix, in lexicographic order of row-major entries."""
        for flat in itertools.product(range(n), repeat=rows * cols):
            yield cls._raw(n, rows, cols, tuple(
                flat[i * cols:(i + 1) * cols] for i in range(rows)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def flat(self) -> tuple[int, ...]:
        return tuple(x for row in self.data for x in row)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.n, self.rows, self.cols, self.data) == (other.n, other.rows, other.cols, other.data)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.rows, self.cols, self.data))
        return self._hash

    def __repr__(self):
        return f"Matrix({self.n}, {[list(r) for r in self.data]}, {self.rows}x{self.cols})"

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def _check_same(self, other: "Matrix"):
        if self.n != other.n or self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        n = self.n
        return Matrix._raw(n, self.rows, self.cols, tuple(
            tuple((x + y) % n for x, y in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        n = self.n
        return Matrix._raw(n, self.rows, self.cols, tuple(
            tuple((x - y) % n for x, y in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, c: int) -> "Matrix":
        n = self.n
        c %= n
        return Matrix._raw(n, self.rows, self.cols, tuple(
            tuple((c * x) % n for x in r) for r in self.data))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.n != other.n or self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        n = self.n
        if other.cols == 0 or self.rows == 0:
            return Matrix.zero(n, self.rows, other.cols)
        cols = tuple(zip(*other.data)) if other.rows else ((),) * other.cols
        return Matrix._raw(n, self.rows, other.cols, tuple(
            tuple(sum(a * b for a, b in zip(r, c)) % n for c in cols) for r in self.data))

    def transpose(self) -> "Matrix":
        if self.rows == 0:
            return Matrix.zero(self.n, self.cols, 0)
        return Matrix._raw(self.n, self.cols, self.rows, tuple(zip(*self.data)))

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.data)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.n != other.n or self.rows != other.rows:
            raise ValueError("row counts differ")
        return Matrix._raw(self.n, self.rows, self.cols + other.cols,
                           tuple(r + s for r, s in zip(self.data, other.data)))

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.n != other.n or self.cols != other.cols:
            raise ValueError("column counts differ")
        return Matrix._raw(self.n, self.rows + other.rows, self.cols, self.data + other.data)

    @staticmethod
    def block(blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        rows = None
        for brow in blocks:
            r = brow[0]
            for b in brow[1:]:
                r = r.hstack(b)
            rows = r if rows is None else rows.vstack(r)
        return rows

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix._raw(self.n, r1 - r0, c1 - c0,
                           tuple(row[c0:c1] for row in self.data[r0:r1]))

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.data)


def _axpy(n, a, x, b, y):
    return [(a * u + b * v) % n for u, v in zip(x, y)]


@dataclass(frozen=True)
class HowellForm:
    """Howell normal form ``matrix = transform @ source``.

    ``pivots`` lists (column, pivot) for each row; every pivot is a divisor of n
    and entries above a pivot are reduced below it.
    """

    matrix: Matrix
    transform: Matrix
    pivots: tuple[tuple[int, int], ...]

    def module_size(self) -> int:
        size = 1
        for _, p in self.pivots:
            size *= self.matrix.n // p
        return size

    def reduce(self, vec: Sequence[int]) -> tuple[list[int], list[int]]:
        """Reduce ``vec`` by the rows; returns (remainder, coefficients)."""
        n = self.matrix.n
        v = [x % n for x in vec]
        coeffs = [0] * self.matrix.rows
        for idx, ((c, p), row) in enumerate(zip(self.pivots, self.matrix.data)):
            q = v[c] // p
            if q:
                v = [(x - q * y) % n for x, y in zip(v, row)]
                coeffs[idx] = q
        return v, coeffs

    def contains(self, vec: Sequence[int]) -> bool:
        rem, _ = self.reduce(vec)
        return not any(rem)


@lru_cache(maxsize=200_000)
def howell_form(M: Matrix) -> HowellForm:
    """Canonical Howell form of the row module of ``M``."""
    n, m, k = M.n, M.rows, M.cols
    pending = []
    for i, row in enumerate(M.data):
        if any(row):
            comb = [0] * m
            comb[i] = 1
            pending.append((list(row), comb))
    out: list[tuple[int, list[int], list[int]]] = []
    for col in range(k):
        piv = None
        rest = []
        for vec, comb in pending:
            a = vec[col]
            if a == 0:
                rest.append((vec, comb))
                continue
            if piv is None:
                piv = (vec, comb)
                continue
            pv, pc = piv
            _, s, t, u, w = gcdex(pv[col], a, n)
            piv = (_axpy(n, s, pv, t, vec), _axpy(n, s, pc, t, comb))
            nv = _axpy(n, u, pv, w, vec)
            if any(nv):
                rest.append((nv, _axpy(n, u, pc, w, comb)))
        if piv is None:
            continue
        u = unit_normalizer(piv[0][col], n)
        pv = [(u * x) % n for x in piv[0]]
        pc = [(u * x) % n for x in piv[1]]
        p = pv[col]
        s = n // p
        ann = [(s * x) % n for x in pv]
        if any(ann):
            rest.append((ann, [(s * x) % n for x in pc]))
        out.append((col, pv, pc))
        pending = rest
    for j in range(len(out)):
        cj, vj, tj = out[j]
        pj = vj[cj]
        for i in range(j):
            ci, vi, ti = out[i]
            q = vi[cj] // pj
            if q:
                out[i] = (ci, _axpy(n, 1, vi, -q, vj), _axpy(n, 1, ti, -q, tj))
    H = Matrix._raw(n, len(out), k, tuple(tuple(v) for _, v, _ in out))
    T = Matrix._raw(n, len(out), m, tuple(tuple(t) for _, _, t in out))
    return HowellForm(H, T, tuple((c, v[c]) for c, v, _ in out))


def same_row_module(A: Matrix, B: Matrix) -> bool:
    return A.cols == B.cols and howell_form(A).matrix == howell_form(B).matrix


class LinearSolver:
    """Solves ``M x = b`` for a fixed matrix ``M`` and exposes its nullspace."""

    def __init__(self, M: Matrix):
        self.M = M
        n, r, c = M.n, M.rows, M.cols
        aug = Matrix._raw(n, c, r + c, tuple(
            tuple(M.data[i][j] for i in range(r)) + tuple(1 if k == j else 0 for k in range(c))
            for j in range(c)))
        self._howell = howell_form(aug)
        self._r = r
        split = len(self._howell.pivots)
        for idx, (col, _) in enumerate(self._howell.pivots):
            if col >= r:
                split = idx
                break
        self._split = split
        self.nullspace: tuple[tuple[int, ...], ...] = tuple(
            row[r:] for row in self._howell.matrix.data[split:])

    def solve(self, b: Sequence[int]) -> tuple[int, ...] | None:
        n, r = self.M.n, self._r
        if len(b) != r:
            raise ValueError(f"right-hand side has length {len(b)}, expected {r}")
        v = [x % n for x in b] + [0] * self.M.cols
        H = self._howell
        for (c, p), row in zip(H.pivots[:self._split], H.matrix.data[:self._split]):
            q = v[c] // p
            if q:
                v = [(x - q * y) % n for x, y in zip(v, row)]
        if any(v[:r]):
            return None
        return tuple((-x) % n for x in v[r:])

    def nullspace_matrix(self) -> Matrix:
        """Generators of the nullspace as the columns of a matrix."""
        return Matrix._raw(self.M.n, len(self.nullspace), self.M.cols, self.nullspace).transpose()


@lru_cache(maxsize=200_000)
def solver(M: Matrix) -> LinearSolver:
    return LinearSolver(M)


@dataclass(frozen=True)
class Solution:
    solution: tuple[int, ...] | None
    nullspace: tuple[tuple[int, ...], ...]


def solve_linear(M: Matrix, b: Sequence[int]) -> Solution:
    """One solution of ``M x = b`` (or None) and generators of ``{x : M x = 0}``."""
    s = solver(M)
    return Solution(s.solve(b), s.nullspace)


def solve_matrix(M: Matrix, T: Matrix) -> Matrix | None:
    """Some ``X`` with ``M @ X == T``, or None."""
    if T.rows != M.rows:
        raise ValueError("row counts differ")
    s = solver(M)
    cols = []
    for j in range(T.cols):
        x = s.solve(T.column(j))
        if x is None:
            return None
        cols.append(x)
    return Matrix._raw(M.n, len(cols), M.cols, tuple(cols)).transpose() if cols else Matrix.zero(M.n, M.cols, 0)


@lru_cache(maxsize=None)
def _eliminator(a: int, b: int, n: int) -> tuple[int, int, int, int, int]:
    """Like ``gcdex`` but a plain elimination ``b - q a`` whenever ``a`` already divides ``b``."""
    for q in range(n):
        if (a * q - b) % n == 0:
            return a, 1, 0, (-q) % n, 1
    return gcdex(a, b, n)


def diagonalize(M: Matrix) -> tuple[Matrix, list[int], Matrix]:
    """Return ``(U, diag, V)`` with ``U @ M @ V`` diagonal with entries ``diag``.

    ``U`` and ``V`` are invertible; each diagonal entry is normalized to
    ``gcd(entry, n)`` (0 stays 0).
    """
    n, r, c = M.n, M.rows, M.cols
    A = [list(row) for row in M.data]
    U = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    V = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def col_op(X, j, k, s, t, u, v):
        for row in X:
            a, b = row[j], row[k]
            row[j], row[k] = (s * a + t * b) % n, (u * a + v * b) % n

    diag = []
    for t in range(min(r, c)):
        spot = next(((i, j) for i in range(t, r) for j in range(t, c) if A[i][j]), None)
        if spot is None:
            break
        i, j = spot
        A[t], A[i] = A[i], A[t]
        U[t], U[i] = U[i], U[t]
        for X in (A, V):
            for row in X:
                row[t], row[j] = row[j], row[t]
        while True:
            for i in range(t + 1, r):
                if A[i][t]:
                    _, s, tt, u, v = _eliminator(A[t][t], A[i][t], n)
                    A[t], A[i] = _axpy(n, s, A[t], tt, A[i]), _axpy(n, u, A[t], v, A[i])
                    U[t], U[i] = _axpy(n, s, U[t], tt, U[i]), _axpy(n, u, U[t], v, U[i])
            for j in range(t + 1, c):
                if A[t][j]:
                    _, s, tt, u, v = _eliminator(A[t][t], A[t][j], n)
                    col_op(A, t, j, s, tt, u, v)
                    col_op(V, t, j, s, tt, u, v)
            if not any(A[i][t] for i in range(t + 1, r)):
                break
        unit = unit_normalizer(A[t][t], n)
        A[t] = [(unit * x) % n for x in A[t]]
        U[t] = [(unit * x) % n for x in U[t]]
        diag.append(A[t][t])
    diag += [0] * (min(r, c) - len(diag))
    return (Matrix._raw(n, r, r, tuple(map(tuple, U))), diag,
            Matrix._raw(n, c, c, tuple(map(tuple, V))))


def inverse(M: Matrix) -> Matrix | None:
    if M.rows != M.cols:
        return None
    X = solve_matrix(M, Matrix.identity(M.n, M.rows))
    if X is None or X @ M != Matrix.identity(M.n, M.rows):
        return None
    return X


def module_invariants(P: Matrix) -> list[int]:
    """Cyclic annihilators of the module ``R^cols / rowspace(P)`` over R = Z/n.

    Each entry ``a`` stands for a factor ``R/(a)``; ``0`` is a free factor.
    Trivial factors are omitted, so a free module of rank r gives ``[0] * r``.
    """
    n = P.n
    _, diag, _ = diagonalize(P) if P.rows and P.cols else (None, [], None)
    orders = [gcd(d, n) if d else n for d in diag]
    orders += [n] * (P.cols - len(diag))
    return [e % n for e in invariant_factors(orders)]


def row_module_invariants(G: Matrix) -> list[int]:
    """Cyclic annihilators of the submodule spanned by the rows of ``G``."""
    n = G.n
    if G.rows == 0 or G.cols == 0:
        return []
    _, diag, _ = diagonalize(G)
    orders = [n // gcd(d, n) if d else 1 for d in diag]
    return [e % n for e in invariant_factors(orders)]


def free_basis(G: Matrix) -> Matrix | None:
    """A basis (as rows) of the row module of ``G`` if that module is free."""
    n, k = G.n, G.cols
    if G.rows == 0 or G.is_zero():
        return Matrix.zero(n, 0, k)
    _, diag, V = diagonalize(G)
    W = inverse(V)
    local = []
    rank = None
    for q, e in crt_idempotents(n):
        units = []
        for i, d in enumerate(diag):
            g = gcd(d, q)
            if g == 1:
                units.append(i)
            elif g != q:
                return None
        if rank is None:
            rank = len(units)
        elif rank != len(units):
            return None
        local.append((e, units))
    rows = []
    for j in range(rank or 0):
        vec = [0] * k
        for e, units in local:
            w = W.data[units[j]]
            vec = [(x + e * y) % n for x, y in zip(vec, w)]
        rows.append(tuple(vec))
    return Matrix._raw(n, len(rows), k, tuple(rows))


def smith_key(M: Matrix) -> tuple:
    """Complete invariant of ``M`` under ``M -> P M Q`` with P, Q invertible."""
    n = M.n
    if M.rows == 0 or M.cols == 0:
        return (M.rows, M.cols)
    _, diag, _ = diagonalize(M)
    return (M.rows, M.cols) + tuple(
        tuple(sorted(gcd(d, q) for d in diag)) for q, _ in crt_idempotents(n))
