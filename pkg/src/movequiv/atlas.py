"""Atlas of simple graphs: enumeration up to isomorphism and the coarse
equivalence partitions.

Simple graphs on m vertices are encoded as (m*m)-bit masks, bit i*m+j
meaning an edge i -> j; canonical form is the minimum mask over all vertex
permutations.  The inner partition is the union-find closure of the
one-step elementary equivalences (legal row/column additions, source
deletions and collapses through simple graphs of bounded size); the outer
partition groups graphs by their invariant key (whole-matrix cokernel plus
the K-tempered component poset).  Class counts are reported for the graphs
with exactly the maximal vertex count.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .equivalence import (RELATION_CE, RELATION_ME, RELATION_STABLE, UNKNOWN, YES,
                          decide, outer_equivalent)
from .graphs import Graph, b_bullet
from .intlinalg import cokernel
from .moves import MoveError, legal_col_add, legal_row_add, move_col, move_s
from .structure import k_temperature, poset_key


# -- bitmask encoding --------------------------------------------------------


def graph_to_bits(g: Graph) -> int:
    bits = 0
    for i in range(g.n):
        for j in range(g.n):
            if g.adj[i][j]:
                bits |= 1 << (i * g.n + j)
    return bits


def bits_to_graph(bits: int, m: int) -> Graph:
    return Graph(m, tuple(tuple((bits >> (i * m + j)) & 1 for j in range(m))
                          for i in range(m)))


class _CanonTables:
    """Byte-split lookup tables: one canonicalization per permutation."""

    def __init__(self, m: int):
        self.m = m
        nbits = m * m
        self.nbytes = (nbits + 7) // 8
        self.tables = []
        for perm in itertools.permutations(range(m)):
            # relabeled bit (a, b) reads source bit (perm[a], perm[b])
            target_of_source = {}
            for a in range(m):
                for b in range(m):
                    target_of_source[perm[a] * m + perm[b]] = a * m + b
            per_byte = []
            for byte_index in range(self.nbytes):
                table = [0] * 256
                for value in range(256):
                    acc = 0
                    for bit in range(8):
                        if value >> bit & 1:
                            s = byte_index * 8 + bit
                            if s in target_of_source:
                                acc |= 1 << target_of_source[s]
                    table[value] = acc
                per_byte.append(table)
            self.tables.append(per_byte)

    def canonical(self, bits: int) -> int:
        best = None
        nbytes = self.nbytes
        for per_byte in self.tables:
            acc = 0
            rest = bits
            for byte_index in range(nbytes):
                acc |= per_byte[byte_index][rest & 255]
                rest >>= 8
            if best is None or acc < best:
                best = acc
        return best


_TABLE_CACHE: Dict[int, _CanonTables] = {}


def _tables(m: int) -> _CanonTables:
    if m not in _TABLE_CACHE:
        _TABLE_CACHE[m] = _CanonTables(m)
    return _TABLE_CACHE[m]


def canonical_bits(bits: int, m: int) -> int:
    return _tables(m).canonical(bits)


def enumerate_simple_graphs(m: int) -> List[int]:
    """Canonical representatives (as bitmasks) of all simple graphs on
    exactly m vertices, ascending."""
    if m >= 5:
        return _enumerate_numpy(m)
    tab = _tables(m)
    out = []
    for bits in range(1 << (m * m)):
        if tab.canonical(bits) == bits:
            out.append(bits)
    return out


def _enumerate_numpy(m: int) -> List[int]:
    import numpy as np

    nbits = m * m
    if nbits > 25:
        raise ValueError("enumeration beyond 5 vertices is not supported")
    x = np.arange(1 << nbits, dtype=np.uint32)
    canon = x.copy()
    y = np.empty_like(x)
    for perm in itertools.permutations(range(m)):
        if perm == tuple(range(m)):
            continue
        y[:] = 0
        for a in range(m):
            for b in range(m):
                s = perm[a] * m + perm[b]
                t = a * m + b
                y |= ((x >> np.uint32(s)) & np.uint32(1)) << np.uint32(t)
        np.minimum(canon, y, out=canon)
    reps = np.nonzero(canon == x)[0]
    return [int(v) for v in reps]


# -- inner (move-closure) partition ------------------------------------------


class UnionFind:
    def __init__(self):
        self.parent: Dict[tuple, tuple] = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _key(g: Graph) -> tuple:
    return (g.n, canonical_bits(graph_to_bits(g), g.n))


def elementary_neighbors(g: Graph) -> List[tuple]:
    """Canonical keys of all graphs one elementary step from g."""
    out = []
    for u in range(g.n):
        for v in range(g.n):
            if u == v:
                continue
            for op in (legal_row_add, legal_col_add):
                try:
                    h = op(g, u, v)
                except MoveError:
                    continue
                if h.is_simple():
                    out.append(_key(h))
    if g.n > 1:
        for w in range(g.n):
            if g.is_source(w) and g.is_regular(w):
                out.append(_key(move_s(g, w)))
            if g.is_regular(w) and not g.has_loop(w):
                h = move_col(g, w)
                if h.is_simple():
                    out.append(_key(h))
    return out


@dataclass(frozen=True)
class AtlasReport:
    M: int
    relation: str
    graph_count: int
    class_count: int
    class_sizes: tuple
    representatives: tuple      # one bitmask per class, exactly-M graphs
    seconds: float


def partition_inner(M: int, long: bool = False) -> AtlasReport:
    """Union-find closure of the elementary equivalences over all simple
    graphs with at most M vertices; class counts restricted to the graphs
    with exactly M vertices."""
    if M > 4 and not long:
        raise ValueError("vertex counts above 4 require the long-run flag")
    start = time.monotonic()
    reps = {m: enumerate_simple_graphs(m) for m in range(1, M + 1)}
    uf = UnionFind()
    for m in range(1, M + 1):
        for bits in reps[m]:
            uf.add((m, bits))
    for m in range(1, M + 1):
        for bits in reps[m]:
            g = bits_to_graph(bits, m)
            here = (m, bits)
            for other in elementary_neighbors(g):
                uf.add(other)
                uf.union(here, other)
    classes: Dict[tuple, List[int]] = {}
    for bits in reps[M]:
        classes.setdefault(uf.find((M, bits)), []).append(bits)
    sizes = tuple(sorted((len(v) for v in classes.values()), reverse=True))
    chosen = tuple(sorted(min(v) for v in classes.values()))
    return AtlasReport(M, "inner", len(reps[M]), len(classes), sizes, chosen,
                       time.monotonic() - start)


# -- outer (invariant) partition ---------------------------------------------


def outer_key(g: Graph) -> tuple:
    ck = cokernel(b_bullet(g).transpose())
    return (ck.torsion, ck.free_rank, poset_key(k_temperature(g)))


def _outer_key_of_bits(args) -> tuple:
    bits, m = args
    return outer_key(bits_to_graph(bits, m))


def partition_outer(M: int, long: bool = False, workers: int = 1) -> AtlasReport:
    if M > 4 and not long:
        raise ValueError("vertex counts above 4 require the long-run flag")
    start = time.monotonic()
    reps = enumerate_simple_graphs(M)
    if workers > 1:
        from multiprocessing import Pool

        with Pool(workers) as pool:
            keys = pool.map(_outer_key_of_bits, [(bits, M) for bits in reps], chunksize=512)
    else:
        keys = [outer_key(bits_to_graph(bits, M)) for bits in reps]
    classes: Dict[tuple, List[int]] = {}
    for bits, key in zip(reps, keys):
        classes.setdefault(key, []).append(bits)
    sizes = tuple(sorted((len(v) for v in classes.values()), reverse=True))
    chosen = tuple(sorted(min(v) for v in classes.values()))
    return AtlasReport(M, "outer", len(reps), len(classes), sizes, chosen,
                       time.monotonic() - start)


def table_rows(max_m: int, long: bool = False) -> List[dict]:
    """Rows of the summary table: graph, inner-class and outer-class counts
    per vertex count."""
    rows = []
    for m in range(1, max_m + 1):
        inner = partition_inner(m, long=long)
        outer = partition_outer(m, long=long)
        rows.append({"M": m, "graphs": inner.graph_count,
                     "inner_classes": inner.class_count,
                     "outer_classes": outer.class_count})
    return rows


def table_csv(rows: List[dict]) -> str:
    out = ["M,graphs,inner_classes,outer_classes"]
    for r in rows:
        out.append("%d,%d,%d,%d" % (r["M"], r["graphs"], r["inner_classes"], r["outer_classes"]))
    return "\n".join(out) + "\n"


# -- full classification of the 4-vertex atlas --------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    M: int
    graph_count: int
    inner_classes: int
    outer_classes: int
    me_classes: int
    ce_classes: int
    stable_classes: int
    undecided_pairs: tuple
    seconds: float


def full_classification(M: int = 4, long: bool = False) -> ClassificationReport:
    """Partition the exactly-M-vertex simple graphs into move-equivalence,
    splice-extended, and stable-isomorphism classes.

    Starts from the inner (move-closure) partition, groups its classes by
    the outer invariant, and resolves each split outer class with the
    exact decision pipeline; the stable count additionally applies the
    special-case lookup merges.
    """
    start = time.monotonic()
    if M > 4 and not long:
        raise ValueError("vertex counts above 4 require the long-run flag")
    reps = {m: enumerate_simple_graphs(m) for m in range(1, M + 1)}
    uf = UnionFind()
    for m in range(1, M + 1):
        for bits in reps[m]:
            uf.add((m, bits))
    for m in range(1, M + 1):
        for bits in reps[m]:
            g = bits_to_graph(bits, m)
            for other in elementary_neighbors(g):
                uf.add(other)
                uf.union((m, bits), other)

    inner_of: Dict[tuple, List[int]] = {}
    for bits in reps[M]:
        inner_of.setdefault(uf.find((M, bits)), []).append(bits)
    inner_reps = sorted(min(v) for v in inner_of.values())

    outer_groups: Dict[tuple, List[int]] = {}
    for bits in inner_reps:
        outer_groups.setdefault(outer_key(bits_to_graph(bits, M)), []).append(bits)

    me_uf, ce_uf, st_uf = UnionFind(), UnionFind(), UnionFind()
    for bits in inner_reps:
        for u in (me_uf, ce_uf, st_uf):
            u.add((M, bits))
    undecided = []
    for group in outer_groups.values():
        if len(group) < 2:
            continue
        for a, b in itertools.combinations(group, 2):
            ga, gb = bits_to_graph(a, M), bits_to_graph(b, M)
            verdicts = {rel: decide(ga, gb, rel) for rel in
                        (RELATION_ME, RELATION_CE, RELATION_STABLE)}
            for rel, u in ((RELATION_ME, me_uf), (RELATION_CE, ce_uf), (RELATION_STABLE, st_uf)):
                v = verdicts[rel]
                if v.verdict == YES:
                    u.union((M, a), (M, b))
                elif v.verdict == UNKNOWN:
                    undecided.append((rel, a, b, v.rule))

    def count(u: UnionFind) -> int:
        return len({u.find((M, bits)) for bits in inner_reps})

    return ClassificationReport(
        M=M,
        graph_count=len(reps[M]),
        inner_classes=len(inner_reps),
        outer_classes=len(outer_groups),
        me_classes=count(me_uf),
        ce_classes=count(ce_uf),
        stable_classes=count(st_uf),
        undecided_pairs=tuple(undecided),
        seconds=time.monotonic() - start,
    )
