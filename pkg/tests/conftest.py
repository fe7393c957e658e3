from fractions import Fraction

import pytest

import config
from graphkin import KinematicPoint, cycle_graph
from relations import generic_points


@pytest.fixture
def box():
    return cycle_graph(4, name="box")


@pytest.fixture
def box_point():
    """A generic Euclidean box point with distinct masses and invariants."""
    s = {
        (1, 1): 3,
        (2, 2): 5,
        (3, 3): 7,
        (4, 4): 11,
        (1, 2): Fraction(-1, 3),
        (1, 3): Fraction(-1, 2),
        (1, 4): Fraction(-1, 5),
        (2, 3): Fraction(-2, 7),
        (2, 4): Fraction(-1, 4),
        (3, 4): Fraction(-3, 8),
    }
    msq = {"e1": 1, "e2": 2, "e3": Fraction(3, 2), "e4": Fraction(5, 3)}
    return KinematicPoint(s=s, msq=msq)


@pytest.fixture
def box_points(box):
    """Five generic Euclidean box points drawn with the default seed."""
    return generic_points(box, 5, seed=config.common.DEFAULT_SEED)


@pytest.fixture
def triangle_points():
    def draw(g, count=5):
        return generic_points(g, count, seed=config.common.DEFAULT_SEED)

    return draw
