import pytest

from movequiv.graphs import Graph


# The six three- and four-vertex reference graphs used across the suite:
# two pairs of towers of loop vertices under an expanding top or middle
# component, and the four-vertex variants with an extra cold level.

TOWER_A_LEFT = Graph.from_rows([[2, 1, 0], [0, 1, 1], [0, 0, 1]])
TOWER_A_RIGHT = Graph.from_rows([[2, 2, 1], [0, 1, 1], [0, 0, 1]])

TOWER_B_LEFT = Graph.from_rows([[1, 1, 0], [0, 2, 1], [0, 0, 1]])
TOWER_B_RIGHT = Graph.from_rows([[1, 1, 2], [0, 2, 1], [0, 0, 1]])

TOWER_C_LEFT = Graph.from_rows([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 2, 1], [0, 0, 0, 1]])
TOWER_C_RIGHT = Graph.from_rows([[1, 1, 0, 0], [0, 1, 1, 2], [0, 0, 2, 1], [0, 0, 0, 1]])


@pytest.fixture
def tower_pairs():
    return {
        "a": (TOWER_A_LEFT, TOWER_A_RIGHT),
        "b": (TOWER_B_LEFT, TOWER_B_RIGHT),
        "c": (TOWER_C_LEFT, TOWER_C_RIGHT),
    }
