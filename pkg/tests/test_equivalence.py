import itertools
import random

import pytest

from movequiv.atlas import partition_inner, partition_outer
from movequiv.equivalence import (NO, UNKNOWN, YES, Verdict, bowen_franks, decide,
                                  decide_glp_signed, decide_irreducible, decide_slp_unit,
                                  elementary_equivalent, outer_equivalent,
                                  triangular_feasibility, verify_glp_witness)
from movequiv.graphs import Graph, b_bullet, b_matrix
from movequiv.intlinalg import BlockStructure, IntMatrix, cokernel
from movequiv.moves import move_c
from conftest import (TOWER_A_LEFT, TOWER_A_RIGHT, TOWER_B_LEFT, TOWER_B_RIGHT,
                      TOWER_C_LEFT, TOWER_C_RIGHT)

OBSTRUCTED_LEFT = IntMatrix.from_rows([[0, 1, 2], [0, 1, 1], [0, 0, 0]])
OBSTRUCTED_RIGHT = IntMatrix.from_rows([[0, 1, 0], [0, 1, 1], [0, 0, 0]])
CHAIN3 = BlockStructure.linear([1, 1, 1])


def test_slp_unit_basics():
    v = decide_slp_unit(OBSTRUCTED_LEFT, OBSTRUCTED_RIGHT, CHAIN3)
    assert v.verdict == NO
    assert "SL_P" in v.distinguisher[0]
    same = decide_slp_unit(OBSTRUCTED_LEFT, OBSTRUCTED_LEFT, CHAIN3)
    assert same.verdict == YES
    u, vv = same.witness
    assert u * OBSTRUCTED_LEFT * vv == OBSTRUCTED_LEFT


def test_slp_unit_constructed_instances():
    rng = random.Random(6)
    for _ in range(40):
        be = IntMatrix.from_rows([[rng.randint(0, 3) if j >= i else 0 for j in range(3)]
                                  for i in range(3)])
        x = [rng.randint(-2, 2) for _ in range(3)]
        u0 = IntMatrix.from_rows([[1, x[0], x[1]], [0, 1, x[2]], [0, 0, 1]])
        y = [rng.randint(-2, 2) for _ in range(3)]
        w0inv = IntMatrix.from_rows([[1, y[0], y[1]], [0, 1, y[2]], [0, 0, 1]])
        bf = u0 * be * w0inv
        got = decide_slp_unit(be, bf, CHAIN3)
        assert got.verdict == YES
        u, v = got.witness
        assert u * be * v == bf


def brute_slp(be, bf, lim=3):
    """Box oracle: U be == bf W for unit-diagonal upper-triangular U, W with
    off-diagonal entries in [-lim, lim], via set intersection of products."""
    rng = range(-lim, lim + 1)

    def products(mat, side):
        mat = mat.tolist()
        out = set()
        for x in itertools.product(rng, repeat=3):
            t = ((1, x[0], x[1]), (0, 1, x[2]), (0, 0, 1))
            if side == "left":
                prod = tuple(tuple(sum(t[i][k] * mat[k][j] for k in range(3))
                                   for j in range(3)) for i in range(3))
            else:
                prod = tuple(tuple(sum(mat[i][k] * t[k][j] for k in range(3))
                                   for j in range(3)) for i in range(3))
            out.add(prod)
        return out

    return bool(products(be, "left") & products(bf, "right"))


def test_slp_unit_against_bounded_oracle():
    # oracle yes implies decide yes; decide no implies oracle no
    rng = random.Random(424242)
    trials = 0
    for _ in range(200):
        def upper():
            return IntMatrix.from_rows([[rng.randint(0, 2) if j >= i else 0
                                         for j in range(3)] for i in range(3)])
        be, bf = upper(), upper()
        mine = decide_slp_unit(be, bf, CHAIN3).verdict == YES
        oracle = brute_slp(be, bf)
        if oracle:
            assert mine
        if not mine:
            assert not oracle
        trials += 1
    assert trials == 200


def test_glp_signed_and_witness():
    v = decide_glp_signed(OBSTRUCTED_LEFT, OBSTRUCTED_RIGHT, CHAIN3, (0, 1, 0), mode="ce")
    assert v.verdict == NO
    v = decide_glp_signed(OBSTRUCTED_LEFT, OBSTRUCTED_RIGHT, CHAIN3, (0, 1, 0), mode="fk")
    assert v.verdict == YES
    u, vv = v.witness
    assert verify_glp_witness(OBSTRUCTED_LEFT, OBSTRUCTED_RIGHT, CHAIN3, u, vv)
    # the published witness pair passes verification
    u = IntMatrix.from_rows([[-1, 2, 0], [0, 1, 0], [0, 0, 1]])
    assert verify_glp_witness(OBSTRUCTED_LEFT, OBSTRUCTED_RIGHT, CHAIN3, u,
                              IntMatrix.identity(3))
    ident = decide_glp_signed(OBSTRUCTED_LEFT, OBSTRUCTED_LEFT, CHAIN3, (0, 1, 0))
    assert ident.verdict == YES


def test_decide_irreducible():
    two = Graph.from_rows([[2]])
    spliced = move_c(two, 0)
    assert decide_irreducible(two, spliced, "me").verdict == NO
    assert decide_irreducible(two, spliced, "ce").verdict == YES
    assert decide_irreducible(two, two, "me").verdict == YES
    with pytest.raises(ValueError):
        decide_irreducible(Graph.from_rows([[1]]), two)


def test_decide_pipeline_on_towers(tower_pairs):
    aL, aR = tower_pairs["a"]
    bL, bR = tower_pairs["b"]
    assert decide(aL, aR, "ce").verdict == YES
    assert decide(aL, aR, "me").verdict == YES
    assert decide(bL, bR, "ce").verdict == NO
    assert decide(bL, bR, "me").verdict == NO
    assert decide(bL, bR, "stable").verdict == YES
    assert decide(bL, bR, "stable").rule == "special-case-lookup"
    # four-vertex variants: same verdicts after collapsing the extra level
    cL, cR = tower_pairs["c"]
    assert decide(cL, cR, "ce").verdict == NO
    assert decide(cL, cL, "ce").verdict == YES


def test_decide_rejects_mismatched_invariants():
    sink = Graph.from_rows([[0]])
    loop = Graph.from_rows([[1]])
    v = decide(sink, loop, "me")
    assert v.verdict == NO and v.rule == "tempered-poset"
    two = Graph.from_rows([[2]])
    three = Graph.from_rows([[3]])
    assert decide(two, three, "ce").verdict == NO


def test_decide_bounded_search_and_unknown():
    g = Graph.from_rows([[1, 1, 0], [1, 1, 1], [0, 0, 0]])
    h = g.relabel([1, 0, 2])
    found = decide(g, h, "me", bound=1, budget=20000)
    assert found.verdict == YES and found.rule == "bounded-search-witness"
    out = decide(g, h, "me", bound=0, budget=1)
    assert out.verdict == UNKNOWN


def test_outer_equivalent():
    # a graph and a relabeling are outer equivalent
    rng = random.Random(13)
    for _ in range(20):
        n = rng.randint(1, 4)
        g = Graph.from_rows([[rng.choice((0, 1, 1, 2)) for _ in range(n)] for _ in range(n)])
        perm = list(range(n))
        rng.shuffle(perm)
        assert outer_equivalent(g, g.relabel(perm))
    # the two-vertex expanding graphs with trivial groups collapse together
    assert outer_equivalent(Graph.from_rows([[1, 1], [1, 0]]),
                            Graph.from_rows([[1, 1], [1, 1]]))
    assert not outer_equivalent(Graph.from_rows([[0]]), Graph.from_rows([[1]]))


def test_elementary_equivalent():
    assert elementary_equivalent(Graph.from_rows([[0, 1], [0, 0]]),
                                 Graph.from_rows([[0]]), 4)
    g = Graph.from_rows([[1, 1], [0, 1]])
    assert elementary_equivalent(g, g.relabel([1, 0]), 4)
    with pytest.raises(ValueError):
        elementary_equivalent(Graph.from_rows([[2]]), Graph.from_rows([[2]]), 4)


def test_elementary_implies_outer():
    # soundness (one-step moves preserve the outer invariant), exhaustive at
    # two vertices, sampled at three
    from movequiv.atlas import bits_to_graph, enumerate_simple_graphs, elementary_neighbors
    for m in (1, 2, 3):
        for bits in enumerate_simple_graphs(m):
            g = bits_to_graph(bits, m)
            for (k, nb) in elementary_neighbors(g):
                h = bits_to_graph(nb, k)
                assert outer_equivalent(g, h)
                assert cokernel(b_bullet(g).transpose()) == cokernel(b_bullet(h).transpose())


def test_small_atlas_counts():
    assert (partition_inner(1).graph_count, partition_inner(1).class_count) == (2, 2)
    assert (partition_inner(2).graph_count, partition_inner(2).class_count) == (10, 8)
    assert (partition_outer(2).graph_count, partition_outer(2).class_count) == (10, 8)
    inner3 = partition_inner(3)
    outer3 = partition_outer(3)
    assert (inner3.graph_count, inner3.class_count) == (104, 35)
    assert outer3.class_count == 35
    # outer classes are unions of inner classes
    assert inner3.class_count >= outer3.class_count


def test_verdict_shapes():
    v = Verdict(YES, "rule")
    assert v.exit_code() == 0
    assert Verdict(NO, "r").exit_code() == 1
    assert Verdict(UNKNOWN, "r").exit_code() == 2
    d = decide_slp_unit(OBSTRUCTED_LEFT, OBSTRUCTED_RIGHT, CHAIN3).to_json_dict()
    assert d["verdict"] == "no" and "distinguisher" in d
