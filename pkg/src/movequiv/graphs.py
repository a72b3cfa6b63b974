"""Finite directed multigraphs and their vertex/cycle structure.

A graph is stored as an n x n adjacency matrix of nonnegative edge counts,
entry (u, v) counting edges u -> v.  Infinite emitters are rejected at
construction, so on finite graphs the singular vertices are exactly the
sinks.  Vertex relabelings are distinct values; isomorphism is decided via
a canonical form (lexicographically minimal adjacency matrix over all
vertex permutations).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from .intlinalg import IntMatrix

CANONICAL_FORM_BOUND = 8

RETURN_NONE = "none"
RETURN_UNIQUE = "unique"
RETURN_MULTIPLE = "multiple"


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("graph needs at least one vertex")
        if len(self.adj) != self.n:
            raise ValueError("adjacency matrix must have n rows")
        for row in self.adj:
            if len(row) != self.n:
                raise ValueError("adjacency matrix must be square")
            for e in row:
                if not isinstance(e, int) or isinstance(e, bool) or e < 0:
                    raise ValueError("edge counts must be nonnegative integers")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]]) -> "Graph":
        return Graph(len(rows), tuple(tuple(int(e) for e in row) for row in rows))

    def out_degree(self, v: int) -> int:
        return sum(self.adj[v])

    def in_degree(self, v: int) -> int:
        return sum(self.adj[u][v] for u in range(self.n))

    def is_sink(self, v: int) -> bool:
        return self.out_degree(v) == 0

    def is_source(self, v: int) -> bool:
        return self.in_degree(v) == 0

    def is_regular(self, v: int) -> bool:
        # finite graphs: regular means "emits at least one edge"
        return not self.is_sink(v)

    def has_loop(self, v: int) -> bool:
        return self.adj[v][v] > 0

    def is_simple(self) -> bool:
        return all(e <= 1 for row in self.adj for e in row)

    def edge_count(self) -> int:
        return sum(sum(row) for row in self.adj)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Relabel with vertex i of the result = vertex perm[i] of self."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("not a permutation")
        return Graph(self.n, tuple(tuple(self.adj[perm[i]][perm[j]] for j in range(self.n))
                                   for i in range(self.n)))

    def delete_vertices(self, drop: Iterable[int]) -> "Graph":
        drop = set(drop)
        keep = [v for v in range(self.n) if v not in drop]
        if not keep:
            raise ValueError("cannot delete every vertex")
        return Graph(len(keep), tuple(tuple(self.adj[u][v] for v in keep) for u in keep))

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        lines = [str(self.n)]
        lines.extend(" ".join(str(e) for e in row) for row in self.adj)
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "Graph":
        lines = [ln for ln in text.splitlines()]
        idx = 0
        while idx < len(lines) and not lines[idx].strip():
            idx += 1
        if idx == len(lines):
            raise GraphParseError(1, "empty input")
        try:
            n = int(lines[idx].strip())
        except ValueError:
            raise GraphParseError(idx + 1, "expected the vertex count") from None
        if n <= 0:
            raise GraphParseError(idx + 1, "vertex count must be positive")
        rows = []
        for k in range(n):
            if idx + 1 + k >= len(lines):
                raise GraphParseError(idx + 2 + k, "missing adjacency row")
            parts = lines[idx + 1 + k].split()
            if len(parts) != n:
                raise GraphParseError(idx + 2 + k, "expected %d entries" % n)
            row = []
            for p in parts:
                try:
                    e = int(p)
                except ValueError:
                    raise GraphParseError(idx + 2 + k,
                                          "bad edge count %r (infinite emitters are not supported)" % p) from None
                if e < 0:
                    raise GraphParseError(idx + 2 + k, "negative edge count")
                row.append(e)
            rows.append(row)
        return Graph.from_rows(rows)

    def to_json_dict(self):
        return {"n": self.n, "adj": [list(r) for r in self.adj]}

    @staticmethod
    def from_json_dict(d) -> "Graph":
        if isinstance(d, str):
            d = json.loads(d)
        g = Graph.from_rows(d["adj"])
        if g.n != int(d["n"]):
            raise ValueError("inconsistent vertex count in JSON graph")
        return g


class GraphParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__("line %d: %s" % (line, message))
        self.line = line


def load_graph(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return Graph.from_json_dict(json.loads(text))
    return Graph.from_text(text)


# ---------------------------------------------------------------------------
# Matrices attached to a graph


def a_matrix(g: Graph) -> IntMatrix:
    return IntMatrix.from_rows(g.adj)


def b_matrix(g: Graph) -> IntMatrix:
    """Adjacency matrix minus the identity."""
    return IntMatrix.from_rows([[g.adj[u][v] - (1 if u == v else 0) for v in range(g.n)]
                                for u in range(g.n)])


def b_bullet(g: Graph) -> IntMatrix:
    """b_matrix with the rows of singular (sink) vertices removed."""
    rows = [[g.adj[u][v] - (1 if u == v else 0) for v in range(g.n)]
            for u in range(g.n) if g.is_regular(u)]
    return IntMatrix.from_rows(rows, cols=g.n)


# ---------------------------------------------------------------------------
# Reachability and cycle structure


def reachability(g: Graph) -> tuple:
    """Reflexive-transitive closure: entry (u, v) iff a path u -> v exists."""
    n = g.n
    reach = [[g.adj[u][v] > 0 or u == v for v in range(n)] for u in range(n)]
    for k in range(n):
        rk = reach[k]
        for u in range(n):
            if reach[u][k]:
                ru = reach[u]
                for v in range(n):
                    if rk[v]:
                        ru[v] = True
    return tuple(tuple(r) for r in reach)


def strongly_connected_components(g: Graph) -> List[tuple]:
    """Tarjan's algorithm (iterative); components in a deterministic order
    sorted by smallest member."""
    n = g.n
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack: List[int] = []
    counter = itertools.count()
    out: List[tuple] = []
    succ = [[v for v in range(n) if g.adj[u][v] > 0] for u in range(n)]

    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = next(counter)
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for i in range(pi, len(succ[v])):
                w = succ[v][i]
                if index[w] is None:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(tuple(sorted(comp)))
    return sorted(out)


def cycle_vertices(g: Graph) -> frozenset:
    """Vertices lying on some cycle (equivalently, based at one)."""
    on_cycle = set()
    for comp in strongly_connected_components(g):
        if len(comp) > 1:
            on_cycle.update(comp)
        else:
            v = comp[0]
            if g.has_loop(v):
                on_cycle.add(v)
    return frozenset(on_cycle)


def return_path_class(g: Graph, v: int) -> str:
    """Classify the return paths based at v: none, unique, or multiple.

    A vertex on a cycle supports exactly one return path precisely when
    its strongly connected component is a single cycle, i.e. has as many
    internal edges as vertices.
    """
    comp = next(c for c in strongly_connected_components(g) if v in c)
    if len(comp) == 1 and not g.has_loop(v):
        return RETURN_NONE
    internal = sum(g.adj[u][w] for u in comp for w in comp)
    return RETURN_UNIQUE if internal == len(comp) else RETURN_MULTIPLE


@dataclass(frozen=True)
class VertexClass:
    kind: str                 # "regular" or "sink"
    source: bool
    transition_state: bool
    return_paths: str         # none / unique / multiple


def classify_vertices(g: Graph) -> List[VertexClass]:
    on_cycle = cycle_vertices(g)
    out = []
    for v in range(g.n):
        regular = g.is_regular(v)
        out.append(VertexClass(
            kind="regular" if regular else "sink",
            source=g.is_source(v),
            transition_state=regular and v not in on_cycle,
            return_paths=return_path_class(g, v),
        ))
    return out


# ---------------------------------------------------------------------------
# Graph-level conditions


def condition_K(g: Graph) -> bool:
    """No vertex supports exactly one return path."""
    return all(return_path_class(g, v) != RETURN_UNIQUE for v in range(g.n))


def condition_L(g: Graph) -> bool:
    """Every cycle has an exit.

    A cycle without an exit is a strongly connected component forming a
    single cycle whose vertices all have total out-degree one.
    """
    for comp in strongly_connected_components(g):
        internal = sum(g.adj[u][w] for u in comp for w in comp)
        if internal != len(comp):
            continue
        if internal == 0:
            continue  # singleton without a loop: no cycle here
        if all(g.out_degree(v) == 1 for v in comp):
            return False
    return True


def condition_H(g: Graph) -> bool:
    """Direct graph-level check of the interpolating condition.

    For every regular vertex v with a unique return path whose cycle has
    an exit there must be a vertex w outside v's cycle, singular or itself
    supporting a unique return path, reachable from v, such that no path
    from v to w meets a vertex with two distinct return paths.  (Witnesses
    on v's own cycle are excluded; otherwise the condition would not be
    invariant under collapsing a cyclic component to a loop.)
    """
    classes = [return_path_class(g, v) for v in range(g.n)]
    reach = reachability(g)
    hot = [v for v in range(g.n) if classes[v] == RETURN_MULTIPLE]
    # reachability avoiding vertices with multiple return paths
    n = g.n
    good_reach = [[u == v for v in range(n)] for u in range(n)]
    for u in range(n):
        if u in hot:
            continue
        for v in range(n):
            if v not in hot and g.adj[u][v] > 0:
                good_reach[u][v] = True
    for k in range(n):
        if k in hot:
            continue
        for u in range(n):
            if good_reach[u][k]:
                for v in range(n):
                    if good_reach[k][v]:
                        good_reach[u][v] = True

    for v in range(g.n):
        if not g.is_regular(v) or classes[v] != RETURN_UNIQUE:
            continue
        comp = next(c for c in strongly_connected_components(g) if v in c)
        if all(g.out_degree(u) == 1 for u in comp):
            continue  # the unique return path has no exit
        ok = False
        for w in range(g.n):
            if w == v or w in comp:
                continue
            if classes[w] == RETURN_MULTIPLE:
                continue
            if not (g.is_sink(w) or classes[w] == RETURN_UNIQUE):
                continue
            if not good_reach[v][w]:
                continue
            # every path from v to w must avoid multiple-return vertices
            if any(reach[v][b] and reach[b][w] for b in hot):
                continue
            ok = True
            break
        if not ok:
            return False
    return True


# ---------------------------------------------------------------------------
# Canonical forms


class CanonicalFormBoundError(ValueError):
    pass


@lru_cache(maxsize=200000)
def canonical_form(g: Graph, bound: int = CANONICAL_FORM_BOUND) -> Graph:
    """Lexicographically minimal relabeling of g.

    Two graphs are isomorphic iff their canonical forms coincide.  Full
    permutation scan; refuse vertex counts above ``bound``.
    """
    if g.n > bound:
        raise CanonicalFormBoundError(
            "canonical form limited to %d vertices (got %d)" % (bound, g.n))
    best = None
    for perm in itertools.permutations(range(g.n)):
        cand = tuple(tuple(g.adj[perm[i]][perm[j]] for j in range(g.n)) for i in range(g.n))
        if best is None or cand < best:
            best = cand
    return Graph(g.n, best)


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.edge_count() != h.edge_count():
        return False
    return canonical_form(g) == canonical_form(h)
