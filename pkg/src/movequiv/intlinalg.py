"""Exact integer linear algebra.

Everything here works over arbitrary-precision Python ints: Smith and
Hermite normal forms with unimodular transforms, cokernel/kernel data of
integer matrices, exact solvability of linear systems over the integers,
and block-triangular structure indexed by a partial order.

Empty matrices (zero rows or zero columns) are first class: an ``m x 0``
matrix has cokernel ``Z^m`` and trivial kernel, a ``0 x n`` matrix has
trivial cokernel and kernel ``Z^n``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix with explicit shape (rows may be zero)."""

    rows: int
    cols: int
    data: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimension")
        if len(self.data) != self.rows:
            raise ValueError("row count mismatch")
        for row in self.data:
            if len(row) != self.cols:
                raise ValueError("column count mismatch")
            for e in row:
                if not isinstance(e, int):
                    raise ValueError("matrix entries must be ints")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [tuple(int(e) for e in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return IntMatrix(len(rows), cols, tuple(rows))

    @staticmethod
    def zeros(m: int, n: int) -> "IntMatrix":
        return IntMatrix(m, n, tuple(tuple(0 for _ in range(n)) for _ in range(m)))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def tolist(self):
        return [list(r) for r in self.data]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.data[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(-e for e in r) for r in self.data))

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        rows = []
        for i in range(self.rows):
            ri = self.data[i]
            rows.append(tuple(sum(ri[k] * other.data[k][j] for k in range(self.cols))
                              for j in range(other.cols)))
        return IntMatrix(self.rows, other.cols, tuple(rows))

    def mul_vector(self, v: Sequence[int]) -> tuple:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(self.data[i][j] * v[j] for j in range(self.cols))
                     for i in range(self.rows))

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> "IntMatrix":
        row_idx = list(row_idx)
        col_idx = list(col_idx)
        return IntMatrix(len(row_idx), len(col_idx),
                         tuple(tuple(self.data[i][j] for j in col_idx) for i in row_idx))

    def is_zero(self) -> bool:
        return all(e == 0 for r in self.data for e in r)

    def entry_gcd(self) -> int:
        """gcd of all entries; 0 for the zero (or empty) matrix."""
        g = 0
        for r in self.data:
            for e in r:
                g = gcd(g, e)
        return g


# ---------------------------------------------------------------------------
# Elementary row/column operations on mutable list-of-list matrices.  All
# normal-form routines below work on such scratch copies and record their
# operations in accompanying transform matrices.


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _negate_row(m, i):
    m[i] = [-e for e in m[i]]


def _add_row(m, i, j, q):
    """row_i += q * row_j"""
    m[i] = [a + q * b for a, b in zip(m[i], m[j])]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _negate_col(m, j):
    for row in m:
        row[j] = -row[j]


def _add_col(m, i, j, q):
    """col_i += q * col_j"""
    for row in m:
        row[i] += q * row[j]


def smith_normal_form(a: IntMatrix):
    """Diagonalize ``a`` as U * a * V = D.

    U and V are unimodular; D is diagonal with nonnegative entries
    d_1 | d_2 | ... .  Pivots are chosen as the smallest nonzero absolute
    value, ties broken by (row, col) index, so the transforms are
    deterministic.
    """
    m, n = a.rows, a.cols
    d = a.tolist()
    u = IntMatrix.identity(m).tolist()
    v = IntMatrix.identity(n).tolist()
    t = 0
    while True:
        # locate the smallest nonzero pivot in the trailing block
        piv = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                e = d[i][j]
                if e != 0 and (best is None or abs(e) < best):
                    best, piv = abs(e), (i, j)
        if piv is None:
            break
        pi, pj = piv
        if pi != t:
            _swap_rows(d, t, pi)
            _swap_rows(u, t, pi)
        if pj != t:
            _swap_cols(d, t, pj)
            _swap_cols(v, t, pj)
        while True:
            if d[t][t] < 0:
                _negate_row(d, t)
                _negate_row(u, t)
            p = d[t][t]
            for i in range(t + 1, m):
                if d[i][t]:
                    q = d[i][t] // p
                    _add_row(d, i, t, -q)
                    _add_row(u, i, t, -q)
            dirty = [i for i in range(t + 1, m) if d[i][t]]
            if dirty:
                # remainder is a strictly smaller pivot
                _swap_rows(d, t, dirty[0])
                _swap_rows(u, t, dirty[0])
                continue
            for j in range(t + 1, n):
                if d[t][j]:
                    q = d[t][j] // p
                    _add_col(d, j, t, -q)
                    _add_col(v, j, t, -q)
            dirty = [j for j in range(t + 1, n) if d[t][j]]
            if dirty:
                _swap_cols(d, t, dirty[0])
                _swap_cols(v, t, dirty[0])
                continue
            # enforce divisibility of the remaining block by the pivot
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if d[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            _add_row(d, t, bad, 1)
            _add_row(u, t, bad, 1)
        t += 1
    return (IntMatrix.from_rows(u, m), IntMatrix.from_rows(d, n), IntMatrix.from_rows(v, n))


def invariant_factors(a: IntMatrix) -> tuple:
    """Nonzero diagonal of the Smith form, without transform bookkeeping."""
    d = a.tolist()
    m, n = a.rows, a.cols
    factors = []
    t = 0
    while True:
        piv = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                e = d[i][j]
                if e != 0 and (best is None or abs(e) < best):
                    best, piv = abs(e), (i, j)
        if piv is None:
            break
        pi, pj = piv
        _swap_rows(d, t, pi)
        _swap_cols(d, t, pj)
        while True:
            if d[t][t] < 0:
                _negate_row(d, t)
            p = d[t][t]
            for i in range(t + 1, m):
                if d[i][t]:
                    _add_row(d, i, t, -(d[i][t] // p))
            dirty = [i for i in range(t + 1, m) if d[i][t]]
            if dirty:
                _swap_rows(d, t, dirty[0])
                continue
            for j in range(t + 1, n):
                if d[t][j]:
                    _add_col(d, j, t, -(d[t][j] // p))
            dirty = [j for j in range(t + 1, n) if d[t][j]]
            if dirty:
                _swap_cols(d, t, dirty[0])
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if d[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            _add_row(d, t, bad, 1)
        factors.append(d[t][t])
        t += 1
    return tuple(factors)


def rank(a: IntMatrix) -> int:
    return len(invariant_factors(a))


def det(a: IntMatrix) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    if a.rows != a.cols:
        raise ValueError("determinant of a non-square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = a.tolist()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            _swap_rows(m, k, swap)
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def hermite_normal_form(a: IntMatrix):
    """Row-style Hermite normal form: returns (H, U) with H = U * a.

    U is unimodular; H is in row echelon form with positive pivots and
    entries above each pivot reduced into [0, pivot).
    """
    m, n = a.rows, a.cols
    h = a.tolist()
    u = IntMatrix.identity(m).tolist()
    r = 0
    for j in range(n):
        if r == m:
            break
        # gcd-eliminate column j below row r
        while True:
            live = [i for i in range(r, m) if h[i][j]]
            if not live:
                break
            piv = min(live, key=lambda i: (abs(h[i][j]), i))
            if piv != r:
                _swap_rows(h, r, piv)
                _swap_rows(u, r, piv)
            if h[r][j] < 0:
                _negate_row(h, r)
                _negate_row(u, r)
            done = True
            for i in range(r + 1, m):
                if h[i][j]:
                    q = h[i][j] // h[r][j]
                    _add_row(h, i, r, -q)
                    _add_row(u, i, r, -q)
                    if h[i][j]:
                        done = False
            if done:
                break
        if r < m and h[r][j]:
            for i in range(r):
                q = h[i][j] // h[r][j]
                if q:
                    _add_row(h, i, r, -q)
                    _add_row(u, i, r, -q)
            r += 1
    return IntMatrix.from_rows(h, n), IntMatrix.from_rows(u, m)


@dataclass(frozen=True)
class AbelianGroupInvariants:
    """Canonical form of a finitely generated abelian group.

    ``torsion`` is the divisibility chain d_1 | d_2 | ... with every
    d_i >= 2; ``free_rank`` is the rank of the free part.
    """

    torsion: tuple
    free_rank: int

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion coefficients must form a divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise ValueError("torsion coefficients must be >= 2")
        if self.free_rank < 0:
            raise ValueError("negative free rank")

    def torsion_order(self) -> int:
        order = 1
        for d in self.torsion:
            order *= d
        return order

    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append("Z^%d" % self.free_rank)
        parts.extend("Z/%d" % d for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def cokernel(a: IntMatrix) -> AbelianGroupInvariants:
    """Invariants of Z^m / (a * Z^n)."""
    factors = invariant_factors(a)
    return AbelianGroupInvariants(tuple(d for d in factors if d != 1), a.rows - len(factors))


def kernel_rank(a: IntMatrix) -> int:
    """Rank of the (free) kernel of a: Z^n -> Z^m."""
    return a.cols - rank(a)


@dataclass(frozen=True)
class IntegerSolution:
    """One solution of A x = b plus a basis of the homogeneous lattice."""

    particular: tuple
    basis: tuple


def solve_integer(a: IntMatrix, b: Sequence[int]) -> Optional[IntegerSolution]:
    """Decide A x = b over the integers.

    Returns None when no integer solution exists, otherwise a particular
    solution together with a lattice basis of solutions of A x = 0.  Works
    through the column Hermite form A Q = H with Q unimodular.
    """
    if len(b) != a.rows:
        raise ValueError("right-hand side length mismatch")
    ht, ut = hermite_normal_form(a.transpose())
    h = ht.transpose()          # h = a * q, column echelon
    q = ut.transpose()
    m, n = a.rows, a.cols
    pivots = []                 # (pivot_row, col)
    for j in range(n):
        row = next((i for i in range(m) if h.data[i][j]), None)
        if row is not None:
            pivots.append((row, j))
    y = [0] * n
    residual = list(b)
    for row, j in pivots:
        # rows above this pivot must already be matched: columns to the
        # right have pivots strictly below, so they cannot fix them
        for i in range(row):
            if residual[i]:
                return None
        if residual[row] % h.data[row][j]:
            return None
        y[j] = residual[row] // h.data[row][j]
        for i in range(m):
            residual[i] -= h.data[i][j] * y[j]
    if any(residual):
        return None
    particular = q.mul_vector(y)
    free_cols = sorted(set(range(n)) - {j for _, j in pivots})
    basis = tuple(tuple(q.data[i][j] for i in range(n)) for j in free_cols)
    return IntegerSolution(tuple(particular), basis)


# ---------------------------------------------------------------------------
# Block structure over a partial order


@dataclass(frozen=True)
class BlockStructure:
    """Partial order on {0..N-1} plus row/column multiindices.

    ``leq[i][j]`` means block i precedes block j; the order must refine
    the index order (i precedes j only if i <= j), so block matrices are
    upper triangular in the plain matrix sense.
    """

    leq: tuple
    row_sizes: tuple
    col_sizes: tuple

    def __post_init__(self):
        n = len(self.leq)
        if len(self.row_sizes) != n or len(self.col_sizes) != n:
            raise ValueError("multiindex length mismatch")
        for i in range(n):
            if not self.leq[i][i]:
                raise ValueError("order must be reflexive")
            for j in range(n):
                if self.leq[i][j]:
                    if i > j:
                        raise ValueError("order must refine the index order")
                    for k in range(n):
                        if self.leq[j][k] and not self.leq[i][k]:
                            raise ValueError("order must be transitive")

    @property
    def size(self) -> int:
        return len(self.leq)

    @staticmethod
    def linear(sizes_rows: Sequence[int], sizes_cols: Optional[Sequence[int]] = None) -> "BlockStructure":
        n = len(sizes_rows)
        if sizes_cols is None:
            sizes_cols = sizes_rows
        leq = tuple(tuple(i <= j for j in range(n)) for i in range(n))
        return BlockStructure(leq, tuple(sizes_rows), tuple(sizes_cols))

    def row_offset(self, i: int) -> int:
        return sum(self.row_sizes[:i])

    def col_offset(self, i: int) -> int:
        return sum(self.col_sizes[:i])

    def row_range(self, i: int) -> range:
        o = self.row_offset(i)
        return range(o, o + self.row_sizes[i])

    def col_range(self, i: int) -> range:
        o = self.col_offset(i)
        return range(o, o + self.col_sizes[i])

    def block(self, a: IntMatrix, i: int, j: int) -> IntMatrix:
        return a.submatrix(self.row_range(i), self.col_range(j))

    def block_set(self, a: IntMatrix, s: Iterable[int]) -> IntMatrix:
        s = sorted(s)
        rows = [i for k in s for i in self.row_range(k)]
        cols = [j for k in s for j in self.col_range(k)]
        return a.submatrix(rows, cols)

    def strict_pairs(self):
        n = self.size
        return [(i, j) for i in range(n) for j in range(n) if i != j and self.leq[i][j]]

    def predecessors(self, i: int):
        """Blocks strictly preceding block i."""
        return frozenset(j for j in range(self.size) if j != i and self.leq[j][i])

    def respects(self, a: IntMatrix) -> bool:
        """Block pattern test: nonzero block (i, j) forces i to precede j."""
        if a.rows != sum(self.row_sizes) or a.cols != sum(self.col_sizes):
            raise ValueError("matrix shape does not match the multiindices")
        for i in range(self.size):
            for j in range(self.size):
                if not self.leq[i][j] and not self.block(a, i, j).is_zero():
                    return False
        return True

    def to_json_dict(self):
        return {
            "poset_edges": [[i, j] for (i, j) in self.strict_pairs()],
            "m": list(self.row_sizes),
            "n": list(self.col_sizes),
        }

    @staticmethod
    def from_json_dict(d) -> "BlockStructure":
        m = tuple(int(x) for x in d["m"])
        n = tuple(int(x) for x in d["n"])
        size = len(m)
        leq = [[i == j for j in range(size)] for i in range(size)]
        for i, j in d["poset_edges"]:
            leq[i][j] = True
        # transitive closure, in case only covering edges were given
        for k in range(size):
            for i in range(size):
                if leq[i][k]:
                    for j in range(size):
                        if leq[k][j]:
                            leq[i][j] = True
        return BlockStructure(tuple(tuple(r) for r in leq), m, n)


def iota_r(a: IntMatrix, blocks: BlockStructure, r: Sequence[int]):
    """Enlarge each diagonal block by an identity corner.

    Block (i, i) grows by an r_i x r_i identity in its lower right corner;
    off-diagonal blocks are padded with zeros.  Returns the enlarged matrix
    together with its block structure.  The embedding is functorial:
    applying r then r' equals applying r + r'.
    """
    r = tuple(int(x) for x in r)
    if len(r) != blocks.size or any(x < 0 for x in r):
        raise ValueError("padding multiindex must be nonnegative of matching length")
    new_rows = tuple(m + x for m, x in zip(blocks.row_sizes, r))
    new_cols = tuple(n + x for n, x in zip(blocks.col_sizes, r))
    out = [[0] * sum(new_cols) for _ in range(sum(new_rows))]
    row_off = [sum(new_rows[:i]) for i in range(blocks.size)]
    col_off = [sum(new_cols[:i]) for i in range(blocks.size)]
    for i in range(blocks.size):
        for j in range(blocks.size):
            blk = blocks.block(a, i, j)
            for bi, row in enumerate(blk.data):
                for bj, e in enumerate(row):
                    out[row_off[i] + bi][col_off[j] + bj] = e
        for k in range(r[i]):
            out[row_off[i] + blocks.row_sizes[i] + k][col_off[i] + blocks.col_sizes[i] + k] = 1
    return (IntMatrix.from_rows(out, sum(new_cols)),
            BlockStructure(blocks.leq, new_rows, new_cols))


@dataclass(frozen=True)
class KWebInvariants:
    """Group-isomorphism-class data extracted from a block matrix.

    For every downward-closed index built from a block i (its strict
    predecessors r_i, the predecessors with i itself s_i, and the singleton
    {i}) we record the cokernel invariants of the corresponding principal
    submatrix; for every block with predecessors we record the kernel rank
    of the diagonal block.  Connecting maps are not stored, so equality of
    two of these is a sound refutation filter but not a proof of
    equivalence.
    """

    cok: tuple       # ((kind, i, AbelianGroupInvariants), ...)
    ker_ranks: tuple  # ((i, rank), ...)


def kweb_invariants(a: IntMatrix, blocks: BlockStructure) -> KWebInvariants:
    if not blocks.respects(a):
        raise ValueError("matrix violates the block pattern")
    cok = []
    kers = []
    for i in range(blocks.size):
        preds = blocks.predecessors(i)
        if preds:
            cok.append(("r", i, cokernel(blocks.block_set(a, preds))))
            kers.append((i, kernel_rank(blocks.block(a, i, i))))
        cok.append(("s", i, cokernel(blocks.block_set(a, preds | {i}))))
        cok.append(("one", i, cokernel(blocks.block(a, i, i))))
    return KWebInvariants(tuple(cok), tuple(kers))


def matrix_to_json(a: IntMatrix):
    return a.tolist()


def matrix_from_json(obj) -> IntMatrix:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return IntMatrix.from_rows([[int(e) for e in row] for row in obj])
