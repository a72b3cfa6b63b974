import itertools
import random

import pytest

from movequiv.graphs import Graph, b_bullet, b_matrix
from movequiv.intlinalg import cokernel
from movequiv.moves import (MoveError, MoveSpec, apply, apply_all, legal_col_add,
                            legal_row_add, move_c, move_col, move_i, move_o, move_r,
                            move_r_inverse, move_s, moves_from_json, moves_to_json,
                            plug, positive_block_form_holds, standard_form_candidates,
                            standard_form_pair, unplug)
from movequiv.structure import k_temperature, poset_key, tempered_isos, temperature
from conftest import TOWER_B_LEFT, TOWER_B_RIGHT


def test_cuntz_splice():
    got = move_c(Graph.from_rows([[2]]), 0)
    assert [list(r) for r in got.adj] == [[2, 1, 0], [1, 1, 1], [0, 1, 1]]
    with pytest.raises(MoveError) as err:
        move_c(Graph.from_rows([[1]]), 0)
    assert "return paths" in str(err.value)


def test_collapse_and_source_removal():
    g = Graph.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert move_col(g, 1) == Graph.from_rows([[0, 1], [0, 0]])
    g = Graph.from_rows([[0, 1], [0, 0]])
    assert move_s(g, 0) == Graph.from_rows([[0]])
    with pytest.raises(MoveError):
        move_s(g, 1)  # a sink is not a regular source


def test_reduction_and_inverse():
    # a chain u -> w -> y with two parallel edges into w reduces to two
    # edges u -> y
    g = Graph.from_rows([[0, 2, 0], [0, 0, 1], [0, 0, 1]])
    red = move_r(g, 1)
    assert red == Graph.from_rows([[0, 2], [0, 1]])
    with pytest.raises(MoveError) as err:
        move_r(Graph.from_rows([[1, 1], [1, 0]]), 0)
    assert "r(f) != w" in str(err.value) or "single edge" in str(err.value)
    # splitting an edge and reducing at the new vertex is the identity
    h = Graph.from_rows([[1, 2], [1, 1]])
    split = move_r_inverse(h, 0, 1, 1)
    assert split.n == 3
    assert move_r(split, 2) == h


def test_outsplit_respects_counts():
    g = Graph.from_rows([[1, 2], [1, 0]])
    # split the out-edges of vertex 0: loop in one part, double edge in the other
    parts = ((1, 0), (0, 2))
    got = move_o(g, 0, parts)
    assert got.n == 3
    # every former in-edge of 0 is duplicated to both parts
    assert got.adj[1][0] == 1 and got.adj[1][2] == 1
    # part out-edges as prescribed, loops fan out to both parts
    assert got.adj[0][1] == 0 and got.adj[2][1] == 2
    assert got.adj[0][0] == 1 and got.adj[0][2] == 1
    with pytest.raises(MoveError):
        move_o(g, 0, ((1, 0), (0, 1)))
    with pytest.raises(MoveError):
        move_o(Graph.from_rows([[0, 1], [0, 0]]), 1, ((0, 0),))


def test_insplit_respects_counts():
    g = Graph.from_rows([[1, 2], [1, 0]])
    # split the in-edges of vertex 0 (one loop, one edge from 1)
    parts = ((1, 0), (0, 1))
    got = move_i(g, 0, parts)
    assert got.n == 3
    # both copies emit what 0 emitted
    assert got.adj[0][1] == 2 and got.adj[2][1] == 2
    # in-edges split by the partition: loop to part 1, edge from 1 to part 2
    assert got.adj[0][0] == 1 and got.adj[0][2] == 0
    assert got.adj[1][0] == 0 and got.adj[1][2] == 1
    with pytest.raises(MoveError):
        move_i(g, 1, ((1, 0), (0, 1)))  # does not sum to the in-edge counts
    with pytest.raises(MoveError):
        move_i(Graph.from_rows([[0, 1], [0, 0]]), 1, ((1, 0),))  # sink


def test_legal_additions():
    # column addition where u carries a loop adds B(u, u) to the entry
    g = Graph.from_rows([[2, 1], [0, 1]])
    got = legal_col_add(g, 0, 1)
    assert b_matrix(got).data[0][1] == b_matrix(g).data[0][1] + b_matrix(g).data[0][0]
    with pytest.raises(MoveError):
        legal_col_add(Graph.from_rows([[0, 1], [0, 0]]), 1, 0)  # sink, no path
    # subtraction is accepted exactly when the undoing addition is legal
    back = legal_col_add(got, 0, 1, sign=-1)
    assert back == g
    # row addition example
    g = Graph.from_rows([[0, 1], [0, 2]])
    got = legal_row_add(g, 0, 1)
    assert b_matrix(got).data[0][1] == b_matrix(g).data[0][1] + b_matrix(g).data[1][1]
    again = legal_row_add(got, 0, 1, sign=-1)
    assert again == g


def test_plug_unplug():
    assert plug(Graph.from_rows([[0]])) == Graph.from_rows([[1]])
    assert unplug(Graph.from_rows([[1]])) == Graph.from_rows([[0]])
    # plugging after unplugging does not generally return the start
    g = Graph.from_rows([[1, 1], [0, 1]])
    assert plug(unplug(g)) == g  # here both loops have exits except the last
    with pytest.raises(MoveError):
        unplug(Graph.from_rows([[0, 1], [1, 0]]))  # 2-cycle without exit
    # a collapsed 2-cycle becomes a loop and can then be unplugged
    squashed = move_col(Graph.from_rows([[0, 1], [1, 0]]), 1)
    assert unplug(squashed) == Graph.from_rows([[0]])


def test_standard_form_obstructed_pair():
    sf = standard_form_pair(TOWER_B_LEFT, TOWER_B_RIGHT)
    mats = {tuple(map(tuple, b_matrix(sf.left).data)),
            tuple(map(tuple, b_matrix(sf.right).data))}
    assert mats == {((0, 1, 2), (0, 1, 1), (0, 0, 0)),
                    ((0, 1, 0), (0, 1, 1), (0, 0, 0))}
    assert sf.tau == (0, 1, 0)
    assert apply_all(TOWER_B_LEFT, sf.left_moves) == sf.left
    assert apply_all(TOWER_B_RIGHT, sf.right_moves) == sf.right


def test_standard_form_trivial_and_failure():
    loop = Graph.from_rows([[1]])
    sf = standard_form_pair(loop, loop)
    assert sf.left == loop and sf.right == loop
    assert standard_form_pair(loop, Graph.from_rows([[0]])) is None
    assert standard_form_pair(loop, Graph.from_rows([[2]])) is None


def test_standard_form_positive_mode():
    rng = random.Random(77)
    checked = 0
    for _ in range(40):
        n = rng.randint(1, 4)
        g = Graph.from_rows([[rng.choice((0, 0, 1, 2)) for _ in range(n)] for _ in range(n)])
        perm = list(range(n))
        rng.shuffle(perm)
        h = g.relabel(perm)
        sf = standard_form_pair(g, h, positive=True)
        assert sf is not None
        assert positive_block_form_holds(b_bullet(sf.left), sf.bullet_blocks())
        assert positive_block_form_holds(b_bullet(sf.right), sf.bullet_blocks())
        assert apply_all(g, sf.left_moves) == sf.left
        assert apply_all(h, sf.right_moves) == sf.right
        checked += 1
    assert checked == 40


def test_standard_form_alignment_count():
    # two expanding components with equal groups: two alignments
    anti = Graph.from_rows([[2, 0], [0, 2]])
    assert len(standard_form_candidates(anti, anti)) == 2


def enumerate_legal_moves(g):
    """All single moves applicable to g (a bounded assortment of partitions
    for the splittings)."""
    out = []
    for v in range(g.n):
        for builder, kind in ((move_s, "S"), (move_col, "Col"), (move_c, "C")):
            try:
                out.append(builder(g, v))
            except MoveError:
                pass
        try:
            out.append(move_r(g, v))
        except MoveError:
            pass
        # reverse reduction along the first available edge
        for y in range(g.n):
            if g.adj[v][y] > 0:
                out.append(move_r_inverse(g, v, y, 1))
                break
    for u in range(g.n):
        for v in range(g.n):
            if u == v:
                continue
            for op in (legal_row_add, legal_col_add):
                for sign in (1, -1):
                    try:
                        out.append(op(g, u, v, sign))
                    except MoveError:
                        pass
    # two-part splittings: separate the first out/in edge from the rest
    for v in range(g.n):
        row = list(g.adj[v])
        if sum(row) >= 2:
            first = next(i for i, e in enumerate(row) if e)
            a = [0] * g.n
            a[first] = 1
            b = row[:]
            b[first] -= 1
            if sum(b):
                try:
                    out.append(move_o(g, v, (tuple(a), tuple(b))))
                except MoveError:
                    pass
        col = [g.adj[u][v] for u in range(g.n)]
        if sum(col) >= 2 and g.is_regular(v):
            first = next(i for i, e in enumerate(col) if e)
            a = [0] * g.n
            a[first] = 1
            b = col[:]
            b[first] -= 1
            if sum(b):
                try:
                    out.append(move_i(g, v, (tuple(a), tuple(b))))
                except MoveError:
                    pass
    return out


def test_move_invariance_sample():
    # every legal move preserves the tempered poset class and the cokernel
    # of the transposed reduced B-matrix
    rng = random.Random(2024)
    graphs = 0
    for _ in range(40):
        n = rng.randint(1, 6)
        g = Graph.from_rows([[rng.choice((0, 0, 0, 1, 1, 2)) for _ in range(n)]
                             for _ in range(n)])
        key = poset_key(k_temperature(g))
        cok = cokernel(b_bullet(g).transpose())
        for h in enumerate_legal_moves(g):
            assert poset_key(k_temperature(h)) == key
            assert cokernel(b_bullet(h).transpose()) == cok
        graphs += 1
    assert graphs == 40


def test_movespec_json_roundtrip():
    specs = [MoveSpec("Col", (1,)), MoveSpec("O", (0, ((1, 0), (0, 2)))),
             MoveSpec("Permute", ((2, 0, 1),))]
    again = moves_from_json(moves_to_json(specs))
    assert again == specs
    g = Graph.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert apply(g, specs[0]) == move_col(g, 1)
