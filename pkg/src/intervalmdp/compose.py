"""Parallel composition: synchronous products and interleaving.

Products restrict to states reachable from the joint initial state; the
full cartesian state set would contain junk states without any enabled
behaviour.  Joint states are named "(left,right)" from the component names
and get fresh dense ids.  Interleaving tags actions with a reserved
middle-dot suffix so the two components' action sets stay disjoint.
"""

from __future__ import annotations

from .model import (
    Distribution,
    Imdp,
    Interval,
    ModelError,
    Pa,
    product_dist,
    require_valid,
)
from .transform import fold, unfold

LEFT_TAG = "·L"
RIGHT_TAG = "·R"


def _pair_name(n1: str, n2: str) -> str:
    return f"({n1},{n2})"


def pa_sync_product(a1: Pa, a2: Pa) -> Pa:
    """Synchronous product of probabilistic automata.

    Both components move in every step; joint transitions are the pairwise
    products of the components' target distributions, labels are unioned.
    """
    if not (isinstance(a1, Pa) and isinstance(a2, Pa)):
        raise ModelError("synchronous product expects two probabilistic automata")
    require_valid(a1)
    require_valid(a2)
    start = (a1.initial, a2.initial)
    reachable = {start}
    frontier = [start]
    while frontier:
        s1, s2 = frontier.pop()
        for d1 in a1.targets(s1):
            for d2 in a2.targets(s2):
                for t1 in d1.support:
                    for t2 in d2.support:
                        pair = (t1, t2)
                        if pair not in reachable:
                            reachable.add(pair)
                            frontier.append(pair)
    pairs = sorted(reachable)
    ids = {pair: i for i, pair in enumerate(pairs)}
    names = tuple(
        _pair_name(a1.state_names[p1], a2.state_names[p2]) for p1, p2 in pairs
    )
    labels = tuple(a1.labels[p1] | a2.labels[p2] for p1, p2 in pairs)
    trans: set[tuple[int, Distribution]] = set()
    for (s1, s2), sid in ids.items():
        for d1 in a1.targets(s1):
            for d2 in a2.targets(s2):
                joint = product_dist(d1, d2)
                remapped = Distribution.of(
                    {ids[pair]: mass for pair, mass in joint.items()}
                )
                trans.add((sid, remapped))
    return Pa(
        state_names=names,
        initial=ids[start],
        atomic_props=a1.atomic_props | a2.atomic_props,
        labels=labels,
        transitions=frozenset(trans),
    )


def imdp_sync_product(m1: Imdp, m2: Imdp) -> Imdp:
    """Synchronous product of interval MDPs: fold the synchronous product
    of the two unfoldings."""
    return fold(pa_sync_product(unfold(m1), unfold(m2)))


def imdp_interleaved_product(ml: Imdp, mr: Imdp) -> Imdp:
    """Interleaved composition: exactly one component moves per step.

    A move of the left component under action a is tagged "a·L" and keeps
    the right component frozen in place (and symmetrically for the right);
    cross moves carry the zero interval, i.e. are absent.
    """
    if not (isinstance(ml, Imdp) and isinstance(mr, Imdp)):
        raise ModelError("interleaved composition expects two interval MDPs")
    require_valid(ml)
    require_valid(mr)
    start = (ml.initial, mr.initial)
    reachable = {start}
    frontier = [start]
    while frontier:
        sl, sr = frontier.pop()
        for a in ml.enabled(sl):
            for tl in ml.row(sl, a):
                pair = (tl, sr)
                if pair not in reachable:
                    reachable.add(pair)
                    frontier.append(pair)
        for a in mr.enabled(sr):
            for tr in mr.row(sr, a):
                pair = (sl, tr)
                if pair not in reachable:
                    reachable.add(pair)
                    frontier.append(pair)
    pairs = sorted(reachable)
    ids = {pair: i for i, pair in enumerate(pairs)}
    names = tuple(
        _pair_name(ml.state_names[pl], mr.state_names[pr]) for pl, pr in pairs
    )
    labels = tuple(ml.labels[pl] | mr.labels[pr] for pl, pr in pairs)
    actions = tuple(
        [a + LEFT_TAG for a in ml.actions] + [a + RIGHT_TAG for a in mr.actions]
    )
    trans: list[tuple[int, str, int, Interval]] = []
    for (sl, sr), sid in ids.items():
        moved = False
        for a in ml.enabled(sl):
            for tl, iv in ml.row(sl, a).items():
                trans.append((sid, a + LEFT_TAG, ids[(tl, sr)], iv))
                moved = True
        for a in mr.enabled(sr):
            for tr, iv in mr.row(sr, a).items():
                trans.append((sid, a + RIGHT_TAG, ids[(sl, tr)], iv))
                moved = True
        if not moved:  # pragma: no cover - impossible for valid inputs
            raise ModelError(f"product state {names[sid]!r} has no enabled action")
    return Imdp(
        state_names=names,
        initial=ids[start],
        actions=actions,
        atomic_props=ml.atomic_props | mr.atomic_props,
        labels=labels,
        transitions=tuple(trans),
    )


def marginal(d: Distribution, side: int) -> Distribution:
    """Marginal of a distribution over key pairs (side 0 = left, 1 = right)."""
    acc: dict = {}
    for pair, mass in d.items():
        acc[pair[side]] = acc.get(pair[side], 0) + mass
    return Distribution.of(acc)
