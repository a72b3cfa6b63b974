"""Elementary moves on graphs, derived row/column additions, plugging and
unplugging of sinks, and reduction of a pair of graphs to a common
standard block form.

All moves operate on edge counts; moves that partition concrete edge sets
(outsplit, insplit) take integer-vector partitions of the multiplicities.
Every transformation returns a fresh graph, and a sequence of MoveSpec
values replayed with :func:`apply_all` reproduces results bit-exactly,
which is how equivalence witnesses are recorded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .graphs import (Graph, RETURN_MULTIPLE, b_bullet, b_matrix, reachability,
                     return_path_class, strongly_connected_components)
from .intlinalg import BlockStructure, IntMatrix, invariant_factors
from .structure import TemperedPoset, block_vertex_order, gamma, temperature, tempered_isos


class MoveError(ValueError):
    """A move precondition failed; the message names the violated clause."""


@dataclass(frozen=True)
class MoveSpec:
    """One move, identified by kind plus its parameters.

    kinds: S(v), R(v), Rinv(x, y, k), O(v, parts), I(v, parts), C(v),
    Col(v), RowAdd(u, v, sign), ColAdd(u, v, sign), Plug(), Unplug(),
    Permute(perm).  Permute records the relabelings that moves compose
    with, so witness lists replay exactly.
    """

    kind: str
    args: tuple = ()

    def to_json_dict(self):
        def enc(x):
            if isinstance(x, tuple):
                return [enc(e) for e in x]
            return x
        return {"kind": self.kind, "args": [enc(a) for a in self.args]}

    @staticmethod
    def from_json_dict(d) -> "MoveSpec":
        def dec(x):
            if isinstance(x, list):
                return tuple(dec(e) for e in x)
            return x
        return MoveSpec(d["kind"], tuple(dec(a) for a in d.get("args", [])))


def moves_to_json(specs: Sequence[MoveSpec]) -> str:
    return json.dumps([s.to_json_dict() for s in specs], indent=2)


def moves_from_json(text: str) -> List[MoveSpec]:
    return [MoveSpec.from_json_dict(d) for d in json.loads(text)]


# ---------------------------------------------------------------------------
# Individual moves


def _check_vertex(g: Graph, v: int):
    if not 0 <= v < g.n:
        raise MoveError("vertex %d out of range" % v)


def move_s(g: Graph, w: int) -> Graph:
    """Remove a regular source."""
    _check_vertex(g, w)
    if not g.is_source(w):
        raise MoveError("move S: vertex %d is not a source" % w)
    if not g.is_regular(w):
        raise MoveError("move S: vertex %d is not regular" % w)
    return g.delete_vertices([w])


def move_r(g: Graph, w: int) -> Graph:
    """Reduce at a regular vertex with a single out-edge and a single
    in-neighbour."""
    _check_vertex(g, w)
    if not g.is_regular(w):
        raise MoveError("move R: vertex %d is not regular" % w)
    if g.out_degree(w) != 1:
        raise MoveError("move R: s^-1(w) is not a single edge at vertex %d" % w)
    y = next(v for v in range(g.n) if g.adj[w][v] > 0)
    if y == w:
        raise MoveError("move R: r(f) != w fails (the out-edge of %d is a loop)" % w)
    senders = [u for u in range(g.n) if g.adj[u][w] > 0]
    if len(senders) != 1:
        raise MoveError("move R: s(r^-1(w)) is not a single vertex at vertex %d" % w)
    x = senders[0]
    adj = [list(row) for row in g.adj]
    adj[x][y] += adj[x][w]
    keep = [v for v in range(g.n) if v != w]
    return Graph.from_rows([[adj[u][v] for v in keep] for u in keep])


def move_r_inverse(g: Graph, x: int, y: int, k: int = 1) -> Graph:
    """Reverse reduction: reroute k parallel edges x -> y through a fresh
    vertex (appended last).  With x == y this splits a loop."""
    _check_vertex(g, x)
    _check_vertex(g, y)
    if k < 1 or g.adj[x][y] < k:
        raise MoveError("reverse R: vertex %d does not emit %d edges to %d" % (x, k, y))
    n = g.n
    adj = [list(row) + [0] for row in g.adj]
    adj.append([0] * (n + 1))
    adj[x][y] -= k
    adj[x][n] = k
    adj[n][y] = 1
    return Graph.from_rows(adj)


def _check_partition(total: Sequence[int], parts: Sequence[Sequence[int]], what: str):
    if len(parts) < 1:
        raise MoveError("move %s: partition needs at least one part" % what)
    n = len(total)
    for p in parts:
        if len(p) != n:
            raise MoveError("move %s: partition vector length mismatch" % what)
        if any(e < 0 for e in p):
            raise MoveError("move %s: partition counts must be nonnegative" % what)
        if sum(p) == 0:
            raise MoveError("move %s: empty partition part" % what)
    for j in range(n):
        if sum(p[j] for p in parts) != total[j]:
            raise MoveError("move %s: partition does not sum to the edge counts" % what)


def move_o(g: Graph, w: int, parts: Sequence[Sequence[int]]) -> Graph:
    """Outsplit at a non-sink: partition the out-edges of w.  Part 1 keeps
    the index of w; the other parts are appended last, in order."""
    _check_vertex(g, w)
    if g.is_sink(w):
        raise MoveError("move O: vertex %d is a sink" % w)
    _check_partition(g.adj[w], parts, "O")
    p = len(parts)
    n = g.n
    m = n + p - 1
    idx = list(range(n))            # old vertex -> new index (w = part 1)
    part_idx = [w] + [n + i for i in range(p - 1)]
    adj = [[0] * m for _ in range(m)]
    for u in range(n):
        for v in range(n):
            if u == w or v == w:
                continue
            adj[idx[u]][idx[v]] = g.adj[u][v]
    for u in range(n):
        if u == w:
            continue
        for i in range(p):
            adj[idx[u]][part_idx[i]] = g.adj[u][w]
        # out-edges of each part
    for j in range(p):
        for v in range(n):
            if v == w:
                continue
            adj[part_idx[j]][idx[v]] = parts[j][v]
        for i in range(p):
            adj[part_idx[j]][part_idx[i]] = parts[j][w]
    return Graph.from_rows(adj)


def move_i(g: Graph, w: int, parts: Sequence[Sequence[int]]) -> Graph:
    """Insplit at a regular non-source: partition the in-edges of w."""
    _check_vertex(g, w)
    if not g.is_regular(w):
        raise MoveError("move I: vertex %d is not regular" % w)
    if g.is_source(w):
        raise MoveError("move I: vertex %d is a source" % w)
    incoming = [g.adj[u][w] for u in range(g.n)]
    _check_partition(incoming, parts, "I")
    p = len(parts)
    n = g.n
    m = n + p - 1
    idx = list(range(n))
    part_idx = [w] + [n + i for i in range(p - 1)]
    adj = [[0] * m for _ in range(m)]
    for u in range(n):
        for v in range(n):
            if u == w or v == w:
                continue
            adj[idx[u]][idx[v]] = g.adj[u][v]
    for u in range(n):
        if u == w:
            continue
        for j in range(p):
            adj[idx[u]][part_idx[j]] = parts[j][u]
    for i in range(p):
        for v in range(n):
            if v == w:
                continue
            adj[part_idx[i]][idx[v]] = g.adj[w][v]
        for j in range(p):
            adj[part_idx[i]][part_idx[j]] = parts[j][w]
    return Graph.from_rows(adj)


def move_c(g: Graph, v: int) -> Graph:
    """Cuntz splice at a vertex supporting at least two return paths: two
    new vertices are attached with the six standard edges."""
    _check_vertex(g, v)
    if not g.is_regular(v):
        raise MoveError("move C: vertex %d is not regular" % v)
    if return_path_class(g, v) != RETURN_MULTIPLE:
        raise MoveError("move C: vertex %d does not support two distinct return paths" % v)
    n = g.n
    adj = [list(row) + [0, 0] for row in g.adj]
    adj.append([0] * (n + 2))
    adj.append([0] * (n + 2))
    u1, u2 = n, n + 1
    adj[v][u1] += 1
    adj[u1][v] += 1
    adj[u1][u1] += 1
    adj[u1][u2] += 1
    adj[u2][u1] += 1
    adj[u2][u2] += 1
    return Graph.from_rows(adj)


def move_col(g: Graph, v: int) -> Graph:
    """Collapse a regular vertex without a loop: delete it and compose
    every in-edge with every out-edge."""
    _check_vertex(g, v)
    if not g.is_regular(v):
        raise MoveError("move Col: vertex %d is not regular" % v)
    if g.has_loop(v):
        raise MoveError("move Col: vertex %d supports a loop" % v)
    adj = [list(row) for row in g.adj]
    for u in range(g.n):
        if u == v or adj[u][v] == 0:
            continue
        for y in range(g.n):
            if y == v:
                continue
            adj[u][y] += adj[u][v] * adj[v][y]
    keep = [u for u in range(g.n) if u != v]
    return Graph.from_rows([[adj[u][y] for y in keep] for u in keep])


def _path_exists(g: Graph, u: int, v: int) -> bool:
    return reachability(g)[u][v]


def _row_add_legal(g: Graph, u: int, v: int) -> Optional[str]:
    """Clause check for adding row v into row u of the B-matrix."""
    if u == v:
        return "u and v must be distinct"
    if not _path_exists(g, u, v):
        return "no path from u to v"
    if not g.is_regular(v):
        return "v is not regular"
    if not (g.has_loop(v) or g.adj[u][v] > 0):
        return "v supports no loop and there is no edge from u to v"
    if not g.is_regular(u):
        return "u is not regular (its row is not part of the reduced matrix)"
    return None


def _col_add_legal(g: Graph, u: int, v: int) -> Optional[str]:
    """Clause check for adding column u into column v of the B-matrix."""
    if u == v:
        return "u and v must be distinct"
    if not _path_exists(g, u, v):
        return "no path from u to v"
    if not (g.has_loop(u) or (g.adj[u][v] > 0 and g.out_degree(u) >= 2)):
        return "u supports no loop, and lacks an edge to v together with a second edge"
    return None


def _apply_row_add(g: Graph, u: int, v: int, sign: int) -> Graph:
    adj = [list(row) for row in g.adj]
    for j in range(g.n):
        adj[u][j] += sign * (g.adj[v][j] - (1 if v == j else 0))
    if any(e < 0 for row in adj for e in row):
        raise MoveError("row operation would produce a negative edge count")
    return Graph.from_rows(adj)


def _apply_col_add(g: Graph, u: int, v: int, sign: int) -> Graph:
    adj = [list(row) for row in g.adj]
    for i in range(g.n):
        adj[i][v] += sign * (g.adj[i][u] - (1 if i == u else 0))
    if any(e < 0 for row in adj for e in row):
        raise MoveError("column operation would produce a negative edge count")
    return Graph.from_rows(adj)


def legal_row_add(g: Graph, u: int, v: int, sign: int = 1) -> Graph:
    """Add (sign=+1) or subtract (sign=-1) row v into row u of the reduced
    B-matrix; subtraction requires the undoing addition to be legal in the
    resulting graph."""
    _check_vertex(g, u)
    _check_vertex(g, v)
    if sign not in (1, -1):
        raise MoveError("sign must be +1 or -1")
    if sign == 1:
        reason = _row_add_legal(g, u, v)
        if reason:
            raise MoveError("row addition (%d += %d) illegal: %s" % (u, v, reason))
        return _apply_row_add(g, u, v, 1)
    result = _apply_row_add(g, u, v, -1)
    reason = _row_add_legal(result, u, v)
    if reason:
        raise MoveError("row subtraction (%d -= %d) illegal: undoing addition fails: %s"
                        % (u, v, reason))
    return result


def legal_col_add(g: Graph, u: int, v: int, sign: int = 1) -> Graph:
    """Add (sign=+1) or subtract (sign=-1) column u into column v of the
    B-matrix, with the same subtraction convention as legal_row_add."""
    _check_vertex(g, u)
    _check_vertex(g, v)
    if sign not in (1, -1):
        raise MoveError("sign must be +1 or -1")
    if sign == 1:
        reason = _col_add_legal(g, u, v)
        if reason:
            raise MoveError("column addition (%d into %d) illegal: %s" % (u, v, reason))
        return _apply_col_add(g, u, v, 1)
    result = _apply_col_add(g, u, v, -1)
    reason = _col_add_legal(result, u, v)
    if reason:
        raise MoveError("column subtraction (%d from %d) illegal: undoing addition fails: %s"
                        % (u, v, reason))
    return result


def plug(g: Graph) -> Graph:
    """Add a loop at every sink."""
    adj = [list(row) for row in g.adj]
    for v in range(g.n):
        if g.is_sink(v):
            adj[v][v] = 1
    return Graph.from_rows(adj)


def unplug(g: Graph) -> Graph:
    """Remove the loop at every vertex whose only out-edge is a loop.

    Requires that every vertex-simple cycle without an exit is a loop
    (true after cyclic components are collapsed to singletons)."""
    for comp in strongly_connected_components(g):
        internal = sum(g.adj[u][v] for u in comp for v in comp)
        if internal == len(comp) and internal > 0 and len(comp) > 1 \
                and all(g.out_degree(v) == 1 for v in comp):
            raise MoveError("unplug: a vertex-simple cycle without exit is not a loop "
                            "(component %s)" % (comp,))
    adj = [list(row) for row in g.adj]
    for v in range(g.n):
        if g.adj[v][v] == 1 and g.out_degree(v) == 1:
            adj[v][v] = 0
    return Graph.from_rows(adj)


def apply(g: Graph, spec: MoveSpec) -> Graph:
    if spec.kind == "S":
        return move_s(g, *spec.args)
    if spec.kind == "R":
        return move_r(g, *spec.args)
    if spec.kind == "Rinv":
        return move_r_inverse(g, *spec.args)
    if spec.kind == "O":
        return move_o(g, spec.args[0], spec.args[1])
    if spec.kind == "I":
        return move_i(g, spec.args[0], spec.args[1])
    if spec.kind == "C":
        return move_c(g, *spec.args)
    if spec.kind == "Col":
        return move_col(g, *spec.args)
    if spec.kind == "RowAdd":
        u, v, sign = spec.args
        return legal_row_add(g, u, v, sign)
    if spec.kind == "ColAdd":
        u, v, sign = spec.args
        return legal_col_add(g, u, v, sign)
    if spec.kind == "Plug":
        return plug(g)
    if spec.kind == "Unplug":
        return unplug(g)
    if spec.kind == "Permute":
        return g.relabel(list(spec.args[0]))
    raise MoveError("unknown move kind %r" % spec.kind)


def apply_all(g: Graph, specs: Sequence[MoveSpec]) -> Graph:
    for spec in specs:
        g = apply(g, spec)
    return g


# ---------------------------------------------------------------------------
# Standard form for a pair of graphs


@dataclass(frozen=True)
class StandardFormPair:
    """Aligned singleton-collapsed forms of two graphs.

    Both graphs share one block structure (vertex i = block i): no
    transition states, cyclic components and sinks are singletons, the
    expanding components of matched blocks have equal sizes, and the
    temperature sequences agree.  The move lists witness move equivalence
    of each output with its input and replay bit-exactly.
    """

    left: Graph
    right: Graph
    blocks: BlockStructure
    tau: tuple
    left_moves: tuple
    right_moves: tuple

    def bullet_blocks(self) -> BlockStructure:
        rows = tuple(0 if t == -1 else s for t, s in zip(self.tau, self.blocks.row_sizes))
        return BlockStructure(self.blocks.leq, rows, self.blocks.col_sizes)


def _singleton_reduction(g: Graph):
    """Collapse transition states, cyclic components, and every collapsible
    vertex inside expanding components."""
    moves: List[MoveSpec] = []
    while True:
        p = gamma(g)
        target = None
        if p.transition_states:
            target = p.transition_states[0]
        else:
            for comp in p.components:
                if len(comp) > 1:
                    v = next((v for v in comp if not g.has_loop(v)), None)
                    if v is not None:
                        target = v
                        break
        if target is None:
            return g, moves
        spec = MoveSpec("Col", (target,))
        g = apply(g, spec)
        moves.append(spec)


def _expand_component(g: Graph, comp_index: int, extra: int, keep_loops: bool):
    """Grow a component by ``extra`` vertices with reverse reductions.

    With keep_loops, each new vertex is immediately given a loop and the
    split loop is restored by legal additions, preserving the
    every-vertex-supports-a-loop property needed for positivization."""
    moves: List[MoveSpec] = []
    for _ in range(extra):
        comp = gamma(g).components[comp_index]
        if keep_loops:
            x = next(v for v in comp if g.has_loop(v))
            w = g.n
            seq = [MoveSpec("Rinv", (x, x, 1)),
                   MoveSpec("RowAdd", (w, x, 1)),
                   MoveSpec("ColAdd", (w, x, 1))]
        else:
            x, y = min((u, v) for u in comp for v in comp if g.adj[u][v] > 0)
            seq = [MoveSpec("Rinv", (x, y, 1))]
        for spec in seq:
            g = apply(g, spec)
            moves.append(spec)
    return g, moves


def _snf_ones(block: IntMatrix) -> int:
    return sum(1 for d in invariant_factors(block) if d == 1)


def _block_of(p, v: int) -> int:
    return next(i for i, comp in enumerate(p.components) if v in comp)


def _positivize(g: Graph, tau):
    """Legal additions making every diagonal block of an expanding
    component and every strictly-upper off-diagonal block entrywise
    positive in the B-matrix.  Assumes every vertex of each expanding
    component already supports a loop."""
    moves: List[MoveSpec] = []
    cap = 10 * g.n * g.n

    def b(gr, u, v):
        return gr.adj[u][v] - (1 if u == v else 0)

    p = gamma(g)
    # diagonal blocks of expanding components
    for i, comp in enumerate(p.components):
        if tau[i] != 1:
            continue
        steps = 0
        while True:
            bad = [(u, v) for u in comp for v in comp if b(g, u, v) < 1]
            if not bad:
                break
            u, v = bad[0]
            y = next(y for y in comp if y != u and b(g, y, v) >= 1)
            spec = MoveSpec("RowAdd", (u, y, 1))
            g = apply(g, spec)
            moves.append(spec)
            steps += 1
            if steps > cap:
                raise MoveError("positivization did not stabilize on a diagonal block")
    # off-diagonal blocks, in index order
    reach = reachability(g)
    p = gamma(g)
    for i in range(p.size):
        for j in range(p.size):
            if i == j or not p.geq[i][j]:
                continue
            steps = 0
            while True:
                bad = [(v, x) for v in p.components[i] for x in p.components[j]
                       if b(g, v, x) < 1]
                if not bad:
                    break
                v, x = bad[0]
                u = next(u for u in range(g.n)
                         if u != v and u != x and g.adj[v][u] > 0 and reach[u][x]
                         and g.has_loop(u))
                spec = MoveSpec("ColAdd", (u, x, 1))
                g = apply(g, spec)
                moves.append(spec)
                reach = reachability(g)
                steps += 1
                if steps > cap:
                    raise MoveError("positivization did not stabilize on an off-diagonal block")
    return g, moves


def standard_form_candidates(gE: Graph, gF: Graph, positive: bool = False) -> List[StandardFormPair]:
    """Aligned standard forms, one per tempered isomorphism of the reduced
    component posets; empty when the tempered posets do not match.

    With positive=True, expanding components are additionally grown to
    size >= 3 with at least two ones in the Smith form of the diagonal
    block, and all block entries that may be nonzero are made positive.
    """
    eR, e_moves = _singleton_reduction(gE)
    fR, f_moves = _singleton_reduction(gF)
    tE, tF = temperature(eR), temperature(fR)
    out = []
    for h in tempered_isos(tE, tF):
        out.append(_aligned_pair(eR, list(e_moves), fR, list(f_moves), tE, tF, h, positive))
    return out


def standard_form_pair(gE: Graph, gF: Graph, positive: bool = False) -> Optional[StandardFormPair]:
    """First aligned standard form, or None when the tempered posets of
    the two graphs are not isomorphic."""
    cands = standard_form_candidates(gE, gF, positive=positive)
    return cands[0] if cands else None


def _aligned_pair(eR, e_moves, fR, f_moves, tE, tF, h, positive) -> StandardFormPair:
    size = tE.poset.size
    for i in range(size):
        se = len(gamma(eR).components[i])
        sf = len(gamma(fR).components[h[i]])
        target = max(se, sf)
        if positive and tE.tau[i] == 1:
            target = max(target, 3)
        if target > se:
            eR, mv = _expand_component(eR, i, target - se, keep_loops=positive)
            e_moves.extend(mv)
        if target > sf:
            fR, mv = _expand_component(fR, h[i], target - sf, keep_loops=positive)
            f_moves.extend(mv)
        if positive and tE.tau[i] == 1:
            for _ in range(4):
                be = b_matrix(eR)
                bf = b_matrix(fR)
                ce = gamma(eR).components[i]
                cf = gamma(fR).components[h[i]]
                oe = _snf_ones(be.submatrix(ce, ce))
                of = _snf_ones(bf.submatrix(cf, cf))
                if oe >= 2 and of >= 2:
                    break
                eR, mv = _expand_component(eR, i, 1, keep_loops=True)
                e_moves.extend(mv)
                fR, mv = _expand_component(fR, h[i], 1, keep_loops=True)
                f_moves.extend(mv)
            else:
                raise MoveError("could not reach two Smith-form ones in an expanding block")

    pE, pF = gamma(eR), gamma(fR)
    perm_e = block_vertex_order(pE)
    perm_f = [v for i in range(size) for v in pF.components[h[i]]]
    spec_e = MoveSpec("Permute", (tuple(perm_e),))
    spec_f = MoveSpec("Permute", (tuple(perm_f),))
    eS = apply(eR, spec_e)
    fS = apply(fR, spec_f)
    e_moves.append(spec_e)
    f_moves.append(spec_f)

    tau = tuple(tE.tau)
    if positive:
        eS, mv = _positivize(eS, tau)
        e_moves.extend(mv)
        fS, mv = _positivize(fS, tau)
        f_moves.extend(mv)

    sizes = tuple(len(c) for c in pE.components)
    leq = tuple(tuple(bool(pE.geq[i][j]) for j in range(size)) for i in range(size))
    blocks = BlockStructure(leq, sizes, sizes)
    pair = StandardFormPair(eS, fS, blocks, tau, tuple(e_moves), tuple(f_moves))
    if not pair.bullet_blocks().respects(b_bullet(eS)):
        raise MoveError("standard form violates its block pattern (left)")
    if not pair.bullet_blocks().respects(b_bullet(fS)):
        raise MoveError("standard form violates its block pattern (right)")
    return pair


def positive_block_form_holds(a_bullet: IntMatrix, blocks: BlockStructure) -> bool:
    """Machine check of the positive standard block shape: strictly-upper
    blocks positive; zero-row blocks are single columns; single-row blocks
    are 1x1 and zero; larger diagonal blocks are positive, at least 3x3,
    with two ones in their Smith form."""
    if not blocks.respects(a_bullet):
        return False
    for i, j in blocks.strict_pairs():
        blk = blocks.block(a_bullet, i, j)
        if blk.rows and blk.cols and any(e <= 0 for row in blk.data for e in row):
            return False
    for i in range(blocks.size):
        m_i, n_i = blocks.row_sizes[i], blocks.col_sizes[i]
        blk = blocks.block(a_bullet, i, i)
        if m_i == 0 and n_i != 1:
            return False
        if m_i == 1:
            if n_i != 1 or not blk.is_zero():
                return False
        if m_i > 1:
            if n_i < 3 or m_i < 3:
                return False
            if any(e <= 0 for row in blk.data for e in row):
                return False
            if _snf_ones(blk) < 2:
                return False
    return True
