"""Probabilistic bisimulation: deciders, partition refinement, quotients.

State equivalence reduces to equality of class-level polytopes: for a PA
the hull of the class-projected target distributions, for an interval MDP
the hull of the union of per-action block-sum polytopes.  The coarsest
bisimulation is computed by partition refinement starting from the label
partition; model-level checks run on the disjoint union and compare the two
initial states, never a merged one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .geometry import (
    IntervalPolytope,
    SeparatingHyperplane,
    VPolytope,
    contains,
    hull_equal,
    hull_subset_witness,
    vpoly_equal,
)
from .model import (
    Distribution,
    Imdp,
    Interval,
    ModelError,
    Pa,
    Partition,
    class_project,
    disjoint_union,
)

ZERO = Fraction(0)
ONE = Fraction(1)


def pa_class_polytope(a: Pa, s: int, p: Partition) -> VPolytope:
    """Hull of the class projections of s's target distributions.

    An empty generator set is allowed and represents a state without
    transitions.
    """
    dims = tuple(range(len(p)))
    return VPolytope.of(dims, tuple(class_project(d, p) for d in a.targets(s)))


def imdp_class_polytopes(
    m: Imdp, s: int, p: Partition
) -> tuple[IntervalPolytope, ...]:
    """One block-sum polytope per enabled action of s.

    Block bounds are the sums of the interval bounds over the block's
    states, clipped into [0, 1].  Non-emptiness is inherited from the
    state-level uncertainty sets; the constructor re-checks it anyway.
    """
    enabled = m.enabled(s)
    if not enabled:
        raise ModelError(f"state {m.state_names[s]!r} has no enabled action")
    dims = tuple(range(len(p)))
    out = []
    for a in enabled:
        lo = [ZERO] * len(dims)
        hi = [ZERO] * len(dims)
        for t, iv in m.row(s, a).items():
            c = p.block_index(t)
            lo[c] += iv.lo
            hi[c] += iv.hi
        bounded_lo = tuple(min(v, ONE) for v in lo)
        bounded_hi = tuple(min(v, ONE) for v in hi)
        out.append(IntervalPolytope(dims, bounded_lo, bounded_hi))
    return tuple(out)


def pa_states_equivalent(a: Pa, s: int, t: int, p: Partition) -> bool:
    """Equal labels and equal class polytopes under p."""
    if s == t:
        return True
    return a.labels[s] == a.labels[t] and vpoly_equal(
        pa_class_polytope(a, s, p), pa_class_polytope(a, t, p)
    )


def imdp_states_equivalent(m: Imdp, s: int, t: int, p: Partition) -> bool:
    """Equal labels and equal hulls of the per-action block-sum polytopes."""
    if s == t:
        return True
    return m.labels[s] == m.labels[t] and hull_equal(
        imdp_class_polytopes(m, s, p), imdp_class_polytopes(m, t, p)
    )


def _class_family(model: Imdp | Pa, s: int, p: Partition):
    if isinstance(model, Pa):
        return pa_class_polytope(model, s, p)
    return imdp_class_polytopes(model, s, p)


def _families_equal(model: Imdp | Pa, fam1, fam2) -> bool:
    if isinstance(model, Pa):
        return vpoly_equal(fam1, fam2)
    return hull_equal(fam1, fam2)


def refine(model: Imdp | Pa, initial: Partition | None = None) -> Partition:
    """Coarsest bisimulation refining the label partition (and `initial`).

    Each pass splits every block into maximal groups of pairwise equivalent
    states, testing against group representatives only; polytope equality
    is transitive, so representative chaining is sound.  The fixpoint does
    not depend on state enumeration order.
    """
    p = Partition.from_labels(model)
    if initial is not None:
        if initial.universe != frozenset(range(model.n_states)):
            raise ModelError("initial partition does not cover the state set")
        p = p.meet(initial)
    while True:
        changed = False
        families: dict[int, object] = {}
        new_blocks: list[frozenset[int]] = []
        for block in p.blocks:
            if len(block) == 1:
                new_blocks.append(block)
                continue
            groups: list[tuple[object, list[int]]] = []
            for s in sorted(block):
                fam = families.get(s)
                if fam is None:
                    fam = _class_family(model, s, p)
                    families[s] = fam
                for rep_fam, members in groups:
                    if _families_equal(model, rep_fam, fam):
                        members.append(s)
                        break
                else:
                    groups.append((fam, [s]))
            if len(groups) > 1:
                changed = True
            new_blocks.extend(frozenset(members) for _, members in groups)
        if not changed:
            return p
        p = Partition.of(new_blocks)


def is_bisimulation(model: Imdp | Pa, p: Partition) -> bool:
    """Whether p is a probabilistic bisimulation on the model."""
    if p.universe != frozenset(range(model.n_states)):
        return False
    for block in p.blocks:
        members = sorted(block)
        rep = members[0]
        for s in members[1:]:
            if model.labels[rep] != model.labels[s]:
                return False
        rep_fam = _class_family(model, rep, p)
        for s in members[1:]:
            if not _families_equal(model, rep_fam, _class_family(model, s, p)):
                return False
    return True


@dataclass(frozen=True)
class BisimWitness:
    """Evidence that two states are not bisimilar.

    reason "labels": the labellings differ.  reason "polytope": `state`
    can reach `distribution` over the final partition's blocks while
    `other` cannot; `hyperplane` separates it from the other side's hull.
    """

    reason: str
    state: int
    other: int
    distribution: Distribution | None = None
    hyperplane: SeparatingHyperplane | None = None


@dataclass(frozen=True)
class BisimResult:
    bisimilar: bool
    union: Imdp | Pa
    partition: Partition
    initial_pair: tuple[int, int]
    witness: BisimWitness | None


def _pa_side_witness(a: Pa, p: Partition, s: int, t: int) -> BisimWitness | None:
    hull_s = pa_class_polytope(a, s, p)
    hull_t = pa_class_polytope(a, t, p)
    for gen in hull_s.generators:
        if not hull_t.generators:
            return BisimWitness("polytope", s, t, gen, None)
        result = contains(hull_t, gen)
        if not result.inside:
            assert isinstance(result.certificate, SeparatingHyperplane)
            return BisimWitness("polytope", s, t, gen, result.certificate)
    return None


def _imdp_side_witness(
    m: Imdp, p: Partition, s: int, t: int
) -> BisimWitness | None:
    found = hull_subset_witness(
        imdp_class_polytopes(m, s, p), imdp_class_polytopes(m, t, p)
    )
    if found is None:
        return None
    dist, plane = found
    return BisimWitness("polytope", s, t, dist, plane)


def _extract_witness(
    union: Imdp | Pa, p: Partition, s1: int, s2: int
) -> BisimWitness:
    if union.labels[s1] != union.labels[s2]:
        return BisimWitness("labels", s1, s2)
    side = _pa_side_witness if isinstance(union, Pa) else _imdp_side_witness
    witness = side(union, p, s1, s2) or side(union, p, s2, s1)
    # The final partition separates the pair, so one direction must fail.
    assert witness is not None
    return witness


def compare(m1: Imdp | Pa, m2: Imdp | Pa) -> BisimResult:
    """Full bisimilarity check on the disjoint union, with witness."""
    union, map1, map2 = disjoint_union(m1, m2)
    p = refine(union)
    i1, i2 = map1[m1.initial], map2[m2.initial]
    bisimilar = p.same_block(i1, i2)
    witness = None if bisimilar else _extract_witness(union, p, i1, i2)
    return BisimResult(bisimilar, union, p, (i1, i2), witness)


def bisim_pa(a1: Pa, a2: Pa) -> bool:
    if not (isinstance(a1, Pa) and isinstance(a2, Pa)):
        raise ModelError("bisim_pa expects two probabilistic automata")
    return compare(a1, a2).bisimilar


def bisim_imdp(m1: Imdp, m2: Imdp) -> bool:
    if not (isinstance(m1, Imdp) and isinstance(m2, Imdp)):
        raise ModelError("bisim_imdp expects two interval MDPs")
    return compare(m1, m2).bisimilar


def _quotient_pa(a: Pa, p: Partition) -> Pa:
    reps = [min(block) for block in p.blocks]
    names = tuple(a.state_names[r] for r in reps)
    labels = tuple(a.labels[r] for r in reps)
    trans = {
        (p.block_index(s), class_project(d, p)) for s, d in a.transitions
    }
    return Pa(
        state_names=names,
        initial=p.block_index(a.initial),
        atomic_props=a.atomic_props,
        labels=labels,
        transitions=frozenset(trans),
    )


def _quotient_imdp(m: Imdp, p: Partition) -> Imdp:
    reps = [min(block) for block in p.blocks]
    names = tuple(m.state_names[r] for r in reps)
    labels = tuple(m.labels[r] for r in reps)
    trans = []
    for block_id, rep in enumerate(reps):
        for a in m.enabled(rep):
            lo: dict[int, Fraction] = {}
            hi: dict[int, Fraction] = {}
            for t, iv in m.row(rep, a).items():
                c = p.block_index(t)
                lo[c] = lo.get(c, ZERO) + iv.lo
                hi[c] = hi.get(c, ZERO) + iv.hi
            for c in lo:
                iv = Interval(min(lo[c], ONE), min(hi[c], ONE))
                if not iv.is_zero:
                    trans.append((block_id, a, c, iv))
    return Imdp(
        state_names=names,
        initial=p.block_index(m.initial),
        actions=m.actions,
        atomic_props=m.atomic_props,
        labels=labels,
        transitions=tuple(trans),
    )


def quotient(model: Imdp | Pa, p: Partition) -> Imdp | Pa:
    """Quotient by a verified bisimulation; bisimilar to the input.

    PA: one state per block, transitions are the class-projected originals.
    IMDP: one state per block, per-action rows are the representative's
    block-summed interval bounds (the block-sum polytopes themselves), so
    the quotient's class-level behaviour matches the input's exactly.
    Folding the quotiented unfolding instead would re-box the cross-action
    hull and add spurious behaviour.
    """
    if not is_bisimulation(model, p):
        raise ModelError("partition is not a bisimulation on this model")
    if isinstance(model, Pa):
        return _quotient_pa(model, p)
    return _quotient_imdp(model, p)


def minimize(model: Imdp | Pa) -> tuple[Imdp | Pa, Partition]:
    """Quotient by the coarsest bisimulation; returns (model, partition)."""
    p = refine(model)
    return quotient(model, p), p
