"""Unfolding and folding between interval MDPs and probabilistic automata.

Unfolding replaces every uncertainty set by its extreme points as explicit
transitions; folding replaces every state's transition hull by its
coordinate-wise interval projections.  Folding over-approximates: the
resulting interval polytope may contain spurious distributions outside the
original hull, and `spurious_witness` searches for one.
"""

from __future__ import annotations

from .geometry import IntervalPolytope, VPolytope, contains, project, vertices
from .model import Distribution, Imdp, ModelError, Pa, require_valid

FOLD_ACTION = "f"


def uncertainty_polytope(m: Imdp, s: int, a: str) -> IntervalPolytope:
    """The polytope of feasible successor distributions for (s, a)."""
    row = m.row(s, a)
    if not row:
        raise ModelError(
            f"action {a!r} is not enabled at state {m.state_names[s]!r}"
        )
    return IntervalPolytope.of(dict(row))


def unfold(m: Imdp) -> Pa:
    """Interval MDP to probabilistic automaton, one transition per extreme
    point of each enabled uncertainty set; duplicates across actions merge."""
    if not isinstance(m, Imdp):
        raise ModelError("unfold expects an interval MDP")
    require_valid(m)
    trans: set[tuple[int, Distribution]] = set()
    for s in range(m.n_states):
        for a in m.enabled(s):
            for vertex in vertices(uncertainty_polytope(m, s, a)):
                trans.add((s, vertex))
    return Pa(
        state_names=m.state_names,
        initial=m.initial,
        atomic_props=m.atomic_props,
        labels=m.labels,
        transitions=frozenset(trans),
    )


def _folded_bounds(targets: tuple[Distribution, ...]) -> dict[int, "object"]:
    support = sorted({t for d in targets for t in d.support})
    hull = VPolytope.of(support, targets)
    return {t: project(hull, t) for t in support}


def fold(a: Pa) -> Imdp:
    """Probabilistic automaton to interval MDP under the single action "f".

    Every state must enable at least one transition, otherwise the result
    could not satisfy the enabled-action requirement on interval MDPs.
    """
    if not isinstance(a, Pa):
        raise ModelError("fold expects a probabilistic automaton")
    require_valid(a)
    intervals = {}
    for s in range(a.n_states):
        targets = a.targets(s)
        if not targets:
            raise ModelError(
                f"state {a.state_names[s]!r} has no outgoing transitions; "
                "folding would leave it without an enabled action"
            )
        for t, iv in _folded_bounds(targets).items():
            intervals[(s, FOLD_ACTION, t)] = iv
    trans = tuple((s, act, t, iv) for (s, act, t), iv in intervals.items())
    return Imdp(
        state_names=a.state_names,
        initial=a.initial,
        actions=(FOLD_ACTION,),
        atomic_props=a.atomic_props,
        labels=a.labels,
        transitions=trans,
    )


def spurious_witness(a: Pa) -> tuple[int, Distribution] | None:
    """A distribution feasible after folding but outside the original hull.

    Searches the vertices of each state's folded polytope: if the folded
    set strictly exceeds the hull, one of its vertices lies outside, so the
    search is complete.  Returns (state id, distribution) or None when
    folding is exact for every state.
    """
    require_valid(a)
    for s in range(a.n_states):
        targets = a.targets(s)
        if not targets:
            continue
        bounds = _folded_bounds(targets)
        folded = IntervalPolytope.of(bounds)
        hull = VPolytope.of(folded.dims, targets)
        for vertex in vertices(folded):
            if not contains(hull, vertex).inside:
                return s, vertex
    return None


# The operation is the executable face of the general incompleteness of
# folding: unfold(fold(a)) need not reproduce a.
demonstrate_incompleteness = spurious_witness
