"""Component poset of a finite graph, temperatures, and tempered isomorphisms.

The components of a graph are its strongly connected components that
support a cycle together with singletons for the sinks; the remaining
vertices (regular, off-cycle) are the transition states.  Components are
ordered by reachability and listed predecessor-first (topological order of
the component DAG, ties broken by smallest member vertex), which realizes
the block-index convention used throughout: block i precedes block j
exactly when component i reaches component j.

The temperature of a component is sgn(internal edge count - vertex count),
distinguishing sink (-1), cyclic (0) and expanding (+1) components; the
K-refined variant attaches the cokernel invariants of the transposed
diagonal block at every +1 component.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .graphs import Graph, cycle_vertices, reachability, strongly_connected_components
from .intlinalg import AbelianGroupInvariants, IntMatrix, cokernel


@dataclass(frozen=True)
class ComponentPoset:
    components: tuple          # tuple of vertex tuples, predecessor-first
    transition_states: tuple
    geq: tuple                 # geq[i][j]: component i reaches component j
    edge_counts: tuple         # edges inside each component

    @property
    def size(self) -> int:
        return len(self.components)

    def successors(self, i: int) -> frozenset:
        return frozenset(j for j in range(self.size) if j != i and self.geq[i][j])

    def immediate_successors(self, i: int) -> frozenset:
        succ = self.successors(i)
        return frozenset(j for j in succ
                         if not any(k in succ and self.geq[k][j] and k != j for k in succ))


@dataclass(frozen=True)
class TemperedPoset:
    poset: ComponentPoset
    tau: tuple                 # temperature per component, in {-1, 0, 1}


@dataclass(frozen=True)
class KTempered:
    poset: ComponentPoset
    tau: tuple
    groups: tuple              # AbelianGroupInvariants at tau=1 components, else None


def gamma(g: Graph) -> ComponentPoset:
    on_cycle = cycle_vertices(g)
    comps = []
    for scc in strongly_connected_components(g):
        if len(scc) > 1 or g.has_loop(scc[0]):
            comps.append(scc)
        elif g.is_sink(scc[0]):
            comps.append(scc)
    transition = tuple(v for v in range(g.n)
                       if g.is_regular(v) and v not in on_cycle)

    reach = reachability(g)
    raw_geq = [[reach[a[0]][b[0]] for b in comps] for a in comps]

    # deterministic linear extension: predecessors first, ties by smallest vertex
    order: List[int] = []
    remaining = set(range(len(comps)))
    while remaining:
        ready = [i for i in remaining
                 if not any(j != i and raw_geq[j][i] for j in remaining)]
        pick = min(ready, key=lambda i: comps[i][0])
        order.append(pick)
        remaining.remove(pick)

    comps_sorted = tuple(comps[i] for i in order)
    geq = tuple(tuple(raw_geq[order[a]][order[b]] for b in range(len(order)))
                for a in range(len(order)))
    edge_counts = tuple(sum(g.adj[u][v] for u in c for v in c) for c in comps_sorted)
    return ComponentPoset(comps_sorted, transition, geq, edge_counts)


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


def temperature(g: Graph) -> TemperedPoset:
    p = gamma(g)
    tau = tuple(_sgn(p.edge_counts[i] - len(p.components[i])) for i in range(p.size))
    return TemperedPoset(p, tau)


def component_k_group(g: Graph, comp: Sequence[int]) -> AbelianGroupInvariants:
    """Cokernel invariants of the transposed diagonal block of a component.

    Paths leaving a strongly connected component never return, so the
    block is insensitive to everything outside the component.
    """
    comp = list(comp)
    block = IntMatrix.from_rows([[g.adj[u][v] - (1 if u == v else 0) for v in comp]
                                 for u in comp])
    return cokernel(block.transpose())


def k_temperature(g: Graph) -> KTempered:
    t = temperature(g)
    groups = tuple(component_k_group(g, t.poset.components[i]) if t.tau[i] == 1 else None
                   for i in range(t.poset.size))
    return KTempered(t.poset, t.tau, groups)


def condition_H_poset(t: TemperedPoset) -> bool:
    """Poset-level form of the interpolating condition: every temperature-0
    component either has no successor or has an immediate successor of
    temperature <= 0."""
    for i in range(t.poset.size):
        if t.tau[i] != 0:
            continue
        succ = t.poset.successors(i)
        if not succ:
            continue
        if not any(t.tau[j] <= 0 for j in t.poset.immediate_successors(i)):
            return False
    return True


def _labels(obj) -> tuple:
    """Comparison labels per component: temperature, refined by the group
    invariants when they are carried."""
    if isinstance(obj, KTempered):
        return tuple(("grp", obj.groups[i].torsion, obj.groups[i].free_rank)
                     if obj.tau[i] == 1 else ("tau", obj.tau[i])
                     for i in range(obj.poset.size))
    return tuple(("tau", t) for t in obj.tau)


def tempered_isos(a, b) -> List[tuple]:
    """All order isomorphisms between two (K-)tempered component posets.

    Arguments may be TemperedPoset or KTempered values (pass KTempered on
    both sides to additionally require isomorphic groups at temperature-1
    components).  An isomorphism is returned as a tuple h with component i
    of the first poset matched to component h[i] of the second.
    """
    pa, pb = a.poset, b.poset
    if pa.size != pb.size:
        return []
    la, lb = _labels(a), _labels(b)
    if sorted(la) != sorted(lb):
        return []
    out = []
    size = pa.size
    candidates = [[j for j in range(size) if lb[j] == la[i]] for i in range(size)]

    def extend(i, used, himg):
        if i == size:
            out.append(tuple(himg))
            return
        for j in candidates[i]:
            if j in used:
                continue
            ok = True
            for k in range(i):
                if pa.geq[i][k] != pb.geq[j][himg[k]] or pa.geq[k][i] != pb.geq[himg[k]][j]:
                    ok = False
                    break
            if ok:
                himg.append(j)
                extend(i + 1, used | {j}, himg)
                himg.pop()

    extend(0, frozenset(), [])
    return out


def hasse(g_or_poset) -> List[Tuple[int, int]]:
    """Immediate-successor edges of the component order (transitive
    reduction), as pairs of component indices."""
    p = gamma(g_or_poset) if isinstance(g_or_poset, Graph) else g_or_poset
    if isinstance(p, (TemperedPoset, KTempered)):
        p = p.poset
    edges = []
    for i in range(p.size):
        for j in sorted(p.immediate_successors(i)):
            edges.append((i, j))
    return edges


def poset_key(kt) -> tuple:
    """Canonical key of a (K-)tempered poset: equal keys iff a tempered
    isomorphism exists.  Minimizes the (order matrix, labels) encoding over
    all relabelings of the components."""
    p = kt.poset
    labels = _labels(kt)
    size = p.size
    best = None
    for perm in itertools.permutations(range(size)):
        enc_order = tuple(p.geq[perm[i]][perm[j]] for i in range(size) for j in range(size))
        enc_labels = tuple(labels[perm[i]] for i in range(size))
        cand = (enc_order, enc_labels)
        if best is None or cand < best:
            best = cand
    return (size,) + best


_TAU_COLOR = {-1: "lightblue", 0: "gray", 1: "salmon"}


def dot_export(g: Graph) -> str:
    """Hasse diagram of the component order as DOT, colored by temperature
    and labeled with the group invariants at temperature-1 components."""
    kt = k_temperature(g)
    p = kt.poset
    lines = ["digraph components {", "  rankdir=TB;"]
    for i in range(p.size):
        label = "{%s}" % ",".join(str(v) for v in p.components[i])
        if kt.tau[i] == 1:
            label += "\\ntau=1, K0=%s" % kt.groups[i]
        else:
            label += "\\ntau=%d" % kt.tau[i]
        lines.append('  c%d [label="%s", style=filled, fillcolor=%s];'
                     % (i, label, _TAU_COLOR[kt.tau[i]]))
    for i, j in hasse(p):
        lines.append("  c%d -> c%d;" % (i, j))
    lines.append("}")
    return "\n".join(lines) + "\n"


def block_vertex_order(p: ComponentPoset) -> List[int]:
    """Vertex order realizing the block structure: components in order,
    vertices ascending inside each.  Requires no transition states."""
    if p.transition_states:
        raise ValueError("block order undefined while transition states remain")
    return [v for comp in p.components for v in comp]
