from fractions import Fraction

import pytest

from intervalmdp import Imdp, Pa


@pytest.fixture
def two_vertex_imdp() -> Imdp:
    """Three states; the root's uncertainty set has exactly two extreme
    points, (1/10, 9/10) and (1/5, 4/5)."""
    return Imdp.build(
        states=["t", "u", "v"],
        initial="t",
        actions=["a"],
        atomic_props=["root", "left", "right"],
        labels={"t": ["root"], "u": ["left"], "v": ["right"]},
        intervals={
            ("t", "a", "u"): ("1/10", "3/10"),
            ("t", "a", "v"): ("4/5", "1"),
            ("u", "a", "u"): (1, 1),
            ("v", "a", "v"): (1, 1),
        },
    )


@pytest.fixture
def three_dist_pa() -> Pa:
    """Four states; the root enables three distributions whose hull is a
    strict subset of its bounding box, so folding this PA is lossy."""
    return Pa.build(
        states=["t", "x", "y", "z"],
        initial="t",
        atomic_props=["root", "lx", "ly", "lz"],
        labels={"t": ["root"], "x": ["lx"], "y": ["ly"], "z": ["lz"]},
        transitions=[
            ("t", {"x": "7/10", "y": "1/5", "z": "1/10"}),
            ("t", {"x": "1/2", "y": "2/5", "z": "1/10"}),
            ("t", {"y": "3/5", "z": "2/5"}),
            ("x", {"x": 1}),
            ("y", {"y": 1}),
            ("z", {"z": 1}),
        ],
    )


@pytest.fixture
def traffic_pa() -> Pa:
    """Seven states, each labelled by its own name; the root randomizes
    over three lights."""
    states = ["s", "r", "y", "g", "red", "yellow", "green"]
    return Pa.build(
        states=states,
        initial="s",
        atomic_props=states,
        labels={name: [name] for name in states},
        transitions=[
            ("s", {"r": "3/10", "y": "1/10", "g": "3/5"}),
            ("r", {"red": 1}),
            ("r", {"s": 1}),
            ("y", {"yellow": 1}),
            ("g", {"green": 1}),
            ("g", {"s": 1}),
            ("red", {"red": 1}),
            ("yellow", {"yellow": 1}),
            ("green", {"green": 1}),
        ],
    )


@pytest.fixture
def spurious_point(three_dist_pa) -> dict:
    """The classic spurious distribution for `three_dist_pa`: inside the
    folded box, outside the hull of the three target distributions."""
    ids = {n: three_dist_pa.state_id(n) for n in ("x", "y", "z")}
    return {
        ids["x"]: Fraction(2, 5),
        ids["y"]: Fraction(1, 5),
        ids["z"]: Fraction(2, 5),
    }
