import random

from movequiv.graphs import Graph, condition_H
from movequiv.intlinalg import AbelianGroupInvariants
from movequiv.structure import (condition_H_poset, dot_export, gamma, hasse,
                                k_temperature, poset_key, temperature, tempered_isos)
from conftest import TOWER_A_LEFT


def test_gamma_tower():
    p = gamma(TOWER_A_LEFT)
    assert p.components == ((0,), (1,), (2,))
    assert p.transition_states == ()
    assert all(p.geq[i][j] == (i <= j) for i in range(3) for j in range(3))


def test_gamma_transition_state():
    p = gamma(Graph.from_rows([[0, 1], [0, 0]]))
    assert p.components == ((1,),)
    assert p.transition_states == (0,)


def diamond_graph():
    # components {0} and {1} both feed {2}, which feeds the sink {3}
    return Graph.from_rows([
        [1, 0, 1, 0],
        [0, 1, 1, 0],
        [0, 0, 1, 1],
        [0, 0, 0, 0],
    ])


def test_gamma_diamond_and_hasse():
    p = gamma(diamond_graph())
    assert p.size == 4
    assert hasse(p) == [(0, 2), (1, 2), (2, 3)]
    # chain and antichain shapes
    assert len(hasse(TOWER_A_LEFT)) == 2
    assert hasse(Graph.from_rows([[1, 0], [0, 1]])) == []


def test_temperature_values():
    assert temperature(Graph.from_rows([[2]])).tau == (1,)
    assert temperature(Graph.from_rows([[1]])).tau == (0,)
    assert temperature(Graph.from_rows([[0]])).tau == (-1,)
    kt = k_temperature(Graph.from_rows([[2]]))
    assert kt.groups[0] == AbelianGroupInvariants((), 0)
    kt = k_temperature(Graph.from_rows([[1]]))
    assert kt.groups[0] is None


def test_tempered_isos_counts():
    chain = TOWER_A_LEFT  # linear order, tau = (1, 0, 0)
    assert len(tempered_isos(temperature(chain), temperature(chain))) == 1
    anti = Graph.from_rows([[2, 0], [0, 2]])
    assert len(tempered_isos(k_temperature(anti), k_temperature(anti))) == 2
    mixed = Graph.from_rows([[2, 0], [0, 1]])
    assert tempered_isos(temperature(mixed), temperature(anti)) == []


def test_gamma_equivariance():
    rng = random.Random(8)
    for _ in range(60):
        n = rng.randint(1, 6)
        g = Graph.from_rows([[rng.choice((0, 0, 1, 2)) for _ in range(n)] for _ in range(n)])
        perm = list(range(n))
        rng.shuffle(perm)
        h = g.relabel(perm)
        pg, ph = gamma(g), gamma(h)
        # relabeled components match as sets of relabeled vertices
        inv = {perm[i]: i for i in range(n)}
        mapped = sorted(tuple(sorted(inv[v] for v in comp)) for comp in pg.components)
        assert mapped == sorted(ph.components)
        assert sorted(inv[v] for v in pg.transition_states) == sorted(ph.transition_states)
        # every vertex is in exactly one component or a transition state
        covered = [v for comp in pg.components for v in comp] + list(pg.transition_states)
        assert sorted(covered) == list(range(n))


def test_condition_h_cross_check_small():
    rng = random.Random(21)
    for _ in range(300):
        n = rng.randint(1, 5)
        g = Graph.from_rows([[rng.choice((0, 0, 1, 2)) for _ in range(n)] for _ in range(n)])
        assert condition_H(g) == condition_H_poset(temperature(g))


def test_poset_key_is_isomorphism_invariant():
    rng = random.Random(31)
    for _ in range(80):
        n = rng.randint(1, 5)
        g = Graph.from_rows([[rng.choice((0, 0, 1, 2)) for _ in range(n)] for _ in range(n)])
        perm = list(range(n))
        rng.shuffle(perm)
        assert poset_key(k_temperature(g)) == poset_key(k_temperature(g.relabel(perm)))
    a = poset_key(k_temperature(Graph.from_rows([[2]])))
    b = poset_key(k_temperature(Graph.from_rows([[3]])))
    assert a != b  # different K-groups at an expanding component


def test_dot_export():
    out = dot_export(TOWER_A_LEFT)
    assert out.startswith("digraph")
    assert "salmon" in out and "gray" in out
    assert "c0 -> c1" in out
