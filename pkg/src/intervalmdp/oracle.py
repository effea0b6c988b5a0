"""Independent references and seeded generators for property testing.

Everything here is deliberately naive: candidate enumeration plus
leave-one-out hull membership for extreme points, greatest-fixpoint pair
removal for bisimilarity, greedy linear optimization for certificate
checking.  The oracles cap instance sizes and fail loudly above the cap;
they exist to disagree with the production algorithms, not to scale.
Generators emit small-denominator rationals so LP pivoting in the sweeps
stays fast, and are deterministic per seed.
"""

from __future__ import annotations

import itertools
import os
import random
from fractions import Fraction
from typing import Mapping, Sequence

from .geometry import (
    InsideCertificate,
    IntervalPolytope,
    SeparatingHyperplane,
    VPolytope,
    contains,
    contains_union,
    hull_equal,
    vertices,
)
from .model import (
    Distribution,
    Imdp,
    Interval,
    ModelError,
    Pa,
    Partition,
    class_project,
)
from .transform import uncertainty_polytope

ZERO = Fraction(0)
ONE = Fraction(1)

ORACLE_CAP_ENV = "IMDP_ORACLE_MAX_STATES"
_AP_POOL = ("p", "q")
_ACTION_POOL = ("a", "b", "c", "d")


def _oracle_cap() -> int:
    return int(os.environ.get(ORACLE_CAP_ENV, "6"))


# ---------------------------------------------------------------------------
# random models


def _random_point(rng: random.Random, size: int) -> tuple[int, list[int]]:
    """Integer masses over `size` bins summing to a small denominator."""
    q = rng.randint(1, 12)
    counts = [0] * size
    for _ in range(q):
        counts[rng.randrange(size)] += 1
    return q, counts


def _random_row(
    rng: random.Random, n_states: int
) -> dict[int, tuple[Fraction, Fraction]]:
    """Interval bounds widened around a sampled feasible point, so the
    uncertainty set is non-empty by construction."""
    size = rng.randint(1, min(3, n_states))
    targets = rng.sample(range(n_states), size)
    q, counts = _random_point(rng, size)
    row = {}
    for t, k in zip(targets, counts):
        lo = max(ZERO, Fraction(k - rng.randint(0, 2), q))
        hi = min(ONE, Fraction(k + rng.randint(0, 2), q))
        if hi > 0:
            row[t] = (lo, hi)
    return row


def gen_random_imdp(seed: int, max_states: int = 4, max_actions: int = 2) -> Imdp:
    """Seeded random interval MDP; always passes `validate`."""
    if max_states < 1 or max_actions < 1:
        raise ModelError("generator bounds must be at least 1")
    rng = random.Random(f"imdp:{seed}")
    n = rng.randint(1, max_states)
    names = tuple(f"s{i}" for i in range(n))
    actions = _ACTION_POOL[: rng.randint(1, max_actions)]
    labels = {
        name: [ap for ap in _AP_POOL if rng.random() < 0.5] for name in names
    }
    intervals = {}
    for s in range(n):
        for a in rng.sample(actions, rng.randint(1, len(actions))):
            for t, bounds in _random_row(rng, n).items():
                intervals[(names[s], a, names[t])] = bounds
    return Imdp.build(
        states=names,
        initial=names[0],
        actions=actions,
        atomic_props=_AP_POOL,
        labels=labels,
        intervals=intervals,
    )


def gen_random_pa(seed: int, max_states: int = 4, max_transitions: int = 3) -> Pa:
    """Seeded random PA; every state enables at least one transition so the
    result stays foldable."""
    if max_states < 1 or max_transitions < 1:
        raise ModelError("generator bounds must be at least 1")
    rng = random.Random(f"pa:{seed}")
    n = rng.randint(1, max_states)
    names = tuple(f"s{i}" for i in range(n))
    labels = {
        name: [ap for ap in _AP_POOL if rng.random() < 0.5] for name in names
    }
    transitions = []
    for s in range(n):
        for _ in range(rng.randint(1, max_transitions)):
            size = rng.randint(1, min(3, n))
            targets = rng.sample(range(n), size)
            q, counts = _random_point(rng, size)
            dist = {
                names[t]: Fraction(k, q) for t, k in zip(targets, counts) if k
            }
            transitions.append((names[s], dist))
    return Pa.build(
        states=names,
        initial=names[0],
        atomic_props=_AP_POOL,
        labels=labels,
        transitions=transitions,
    )


def gen_random_interval_polytope(seed: int, max_dims: int = 5) -> IntervalPolytope:
    """Seeded random non-empty interval polytope over indices 0..k-1."""
    rng = random.Random(f"poly:{seed}")
    k = rng.randint(1, max_dims)
    q, counts = _random_point(rng, k)
    lo = tuple(max(ZERO, Fraction(c - rng.randint(0, 2), q)) for c in counts)
    hi = tuple(min(ONE, Fraction(c + rng.randint(0, 2), q)) for c in counts)
    return IntervalPolytope(tuple(range(k)), lo, hi)


def gen_random_distribution(seed: int, keys: Sequence[int]) -> Distribution:
    rng = random.Random(f"dist:{seed}")
    q, counts = _random_point(rng, len(keys))
    return Distribution.of(
        {k: Fraction(c, q) for k, c in zip(keys, counts) if c}
    )


# ---------------------------------------------------------------------------
# bisimilarity-preserving transformations


def rename_states(model: Imdp | Pa, seed: int) -> Imdp | Pa:
    """Permute state order and freshen names; the result is isomorphic."""
    rng = random.Random(f"rename:{seed}")
    n = model.n_states
    order = list(range(n))
    rng.shuffle(order)  # order[k] = old id placed at new position k
    new_of_old = {old: new for new, old in enumerate(order)}
    names = tuple(f"{model.state_names[old]}r" for old in order)
    labels = tuple(model.labels[old] for old in order)
    if isinstance(model, Imdp):
        trans = tuple(
            (new_of_old[s], a, new_of_old[t], iv)
            for s, a, t, iv in model.transitions
        )
        return Imdp(
            state_names=names,
            initial=new_of_old[model.initial],
            actions=model.actions,
            atomic_props=model.atomic_props,
            labels=labels,
            transitions=trans,
        )
    trans_pa = frozenset(
        (
            new_of_old[s],
            Distribution.of({new_of_old[t]: m for t, m in d.items()}),
        )
        for s, d in model.transitions
    )
    return Pa(
        state_names=names,
        initial=new_of_old[model.initial],
        atomic_props=model.atomic_props,
        labels=labels,
        transitions=trans_pa,
    )


def duplicate_state(model: Imdp | Pa, seed: int) -> Imdp | Pa:
    """Add an equivalent copy of one state.

    The copy keeps the original's label and outgoing row; incoming mass is
    halved between the two copies, which leaves every class-level polytope
    unchanged (copying the incoming bounds verbatim would double the
    reachable block mass and break equivalence).
    """
    rng = random.Random(f"dup:{seed}")
    star = rng.randrange(model.n_states)
    copy_id = model.n_states
    fresh = model.state_names[star] + "+"
    while fresh in model.state_names:
        fresh += "+"
    names = model.state_names + (fresh,)
    labels = model.labels + (model.labels[star],)
    if isinstance(model, Imdp):
        split: dict[tuple[int, str], dict[int, Interval]] = {}
        for s, a, t, iv in model.transitions:
            row = split.setdefault((s, a), {})
            if t == star:
                half = Interval(iv.lo / 2, iv.hi / 2)
                row[star] = half
                row[copy_id] = half
            else:
                row[t] = iv
        rows = dict(split)
        for (s, a), row in list(rows.items()):
            if s == star:
                rows[(copy_id, a)] = dict(row)
        trans = tuple(
            (s, a, t, iv) for (s, a), row in rows.items() for t, iv in row.items()
        )
        return Imdp(
            state_names=names,
            initial=model.initial,
            actions=model.actions,
            atomic_props=model.atomic_props,
            labels=labels,
            transitions=trans,
        )

    def split_dist(d: Distribution) -> Distribution:
        mass = dict(d.items())
        if star in mass:
            half = mass[star] / 2
            mass[star] = half
            mass[copy_id] = half
        return Distribution.of(mass)

    trans_pa = set()
    for s, d in model.transitions:
        trans_pa.add((s, split_dist(d)))
        if s == star:
            trans_pa.add((copy_id, split_dist(d)))
    return Pa(
        state_names=names,
        initial=model.initial,
        atomic_props=model.atomic_props,
        labels=labels,
        transitions=frozenset(trans_pa),
    )


def split_action(m: Imdp, seed: int) -> Imdp:
    """Add an action whose uncertainty set is a vertex of an existing one.

    The new point polytope sits inside the old hull, so the union of the
    class-level hulls is unchanged for every partition; this is re-checked
    with `hull_equal` before the model is emitted.
    """
    rng = random.Random(f"split:{seed}")
    enabled_pairs = sorted({(s, a) for s, a, _, _ in m.transitions})
    s, a = enabled_pairs[rng.randrange(len(enabled_pairs))]
    poly = uncertainty_polytope(m, s, a)
    verts = vertices(poly)
    point = verts[rng.randrange(len(verts))]
    fresh = a
    while fresh in m.actions:
        fresh += "+"
    trans = list(m.transitions)
    for t, mass in point.items():
        trans.append((s, fresh, t, Interval(mass, mass)))
    out = Imdp(
        state_names=m.state_names,
        initial=m.initial,
        actions=m.actions + (fresh,),
        atomic_props=m.atomic_props,
        labels=m.labels,
        transitions=tuple(trans),
    )
    point_mass = tuple(point.mass(d) for d in poly.dims)
    point_poly = IntervalPolytope(poly.dims, point_mass, point_mass)
    assert hull_equal([poly], [poly, point_poly])
    return out


def add_redundant_transition(a: Pa, seed: int) -> Pa:
    """Add the midpoint of two existing targets of some state; combined
    transitions close under convexity, so behaviour is unchanged."""
    rng = random.Random(f"mid:{seed}")
    sources = sorted({s for s, _ in a.transitions if len(a.targets(s)) >= 2})
    if not sources:
        return a
    s = sources[rng.randrange(len(sources))]
    d1, d2 = rng.sample(list(a.targets(s)), 2)
    mass: dict = {}
    for key, m in itertools.chain(d1.items(), d2.items()):
        mass[key] = mass.get(key, ZERO) + m / 2
    mid = Distribution.of(mass)
    return Pa(
        state_names=a.state_names,
        initial=a.initial,
        atomic_props=a.atomic_props,
        labels=a.labels,
        transitions=a.transitions | {(s, mid)},
    )


def gen_bisimilar_pair(seed: int, base: Imdp) -> tuple[Imdp, Imdp]:
    """(base, transformed) with transformed bisimilar to base by construction."""
    rng = random.Random(f"pair:{seed}")
    ops = (rename_states, duplicate_state, split_action)
    out: Imdp = base
    for _ in range(rng.randint(1, 2)):
        op = ops[rng.randrange(len(ops))]
        out = op(out, rng.getrandbits(32))
    return base, out


def gen_bisimilar_pa_pair(seed: int, base: Pa) -> tuple[Pa, Pa]:
    """PA counterpart of `gen_bisimilar_pair`."""
    rng = random.Random(f"papair:{seed}")
    ops = (rename_states, duplicate_state, add_redundant_transition)
    out: Pa = base
    for _ in range(rng.randint(1, 2)):
        op = ops[rng.randrange(len(ops))]
        out = op(out, rng.getrandbits(32))
    return base, out


# ---------------------------------------------------------------------------
# naive greatest-fixpoint bisimulation


def _label_partition(model: Imdp | Pa) -> Partition:
    groups: dict[frozenset[str], set[int]] = {}
    for s in range(model.n_states):
        groups.setdefault(model.labels[s], set()).add(s)
    return Partition.of(groups.values())


def _block_polytopes(m: Imdp, s: int, p: Partition) -> tuple[IntervalPolytope, ...]:
    dims = tuple(range(len(p)))
    out = []
    for a in m.enabled(s):
        lo = [ZERO] * len(dims)
        hi = [ZERO] * len(dims)
        for t, iv in m.row(s, a).items():
            c = p.block_index(t)
            lo[c] += iv.lo
            hi[c] += iv.hi
        out.append(
            IntervalPolytope(
                dims,
                tuple(min(v, ONE) for v in lo),
                tuple(min(v, ONE) for v in hi),
            )
        )
    return tuple(out)


def _pa_step_matches(a: Pa, s: int, t: int, p: Partition) -> bool:
    own = a.targets(s)
    if not own:
        return True
    others = a.targets(t)
    if not others:
        return False
    hull = VPolytope.of(
        tuple(range(len(p))), tuple(class_project(d, p) for d in others)
    )
    return all(contains(hull, class_project(d, p)).inside for d in own)


def _imdp_step_matches(m: Imdp, s: int, t: int, p: Partition) -> bool:
    family = _block_polytopes(m, t, p)
    for poly in _block_polytopes(m, s, p):
        for v in vertices(poly):
            if not contains_union(family, v).inside:
                return False
    return True


def naive_bisim(model: Imdp | Pa, max_states: int | None = None) -> Partition:
    """Greatest fixpoint of the bisimulation step condition, pair by pair.

    Starts from the full label-respecting relation and removes every pair
    whose one-step behaviour is unmatched under the current relation, using
    exact hull membership for the matching.  Intended as a reference for
    `refine`; refuses models above the size cap (IMDP_ORACLE_MAX_STATES,
    default 6).
    """
    cap = _oracle_cap() if max_states is None else max_states
    if model.n_states > cap:
        raise ModelError(
            f"oracle size cap exceeded: {model.n_states} states > {cap}"
        )
    step = _pa_step_matches if isinstance(model, Pa) else _imdp_step_matches
    p = _label_partition(model)
    while True:
        new_blocks: list[set[int]] = []
        for block in p.blocks:
            members = sorted(block)
            # Surviving pairs within the block, then connected components.
            adjacency: dict[int, set[int]] = {s: {s} for s in members}
            for s, t in itertools.combinations(members, 2):
                if step(model, s, t, p) and step(model, t, s, p):
                    adjacency[s].add(t)
                    adjacency[t].add(s)
            remaining = set(members)
            while remaining:
                seed_state = min(remaining)
                component = {seed_state}
                frontier = [seed_state]
                while frontier:
                    u = frontier.pop()
                    for v in adjacency[u]:
                        if v in remaining and v not in component:
                            component.add(v)
                            frontier.append(v)
                remaining -= component
                new_blocks.append(component)
        candidate = Partition.of(new_blocks)
        if candidate == p:
            return p
        p = candidate


# ---------------------------------------------------------------------------
# certificate re-checking


def linear_maximum(
    p: IntervalPolytope, coeffs: Mapping[int, Fraction]
) -> Fraction:
    """Exact max of a linear functional over an interval polytope.

    Greedy: start at the lower bounds and spend the remaining mass on
    coordinates in decreasing coefficient order.
    """
    values = list(p.lo)
    budget = ONE - sum(p.lo)
    order = sorted(
        range(len(p.dims)), key=lambda i: coeffs.get(p.dims[i], ZERO), reverse=True
    )
    for i in order:
        if budget == 0:
            break
        room = p.hi[i] - p.lo[i]
        add = room if room < budget else budget
        values[i] += add
        budget -= add
    return sum(
        coeffs.get(d, ZERO) * v for d, v in zip(p.dims, values)
    )


def verify_certificate(
    cert: InsideCertificate | SeparatingHyperplane,
    query: Distribution,
    target: VPolytope | Sequence[IntervalPolytope],
) -> bool:
    """Re-check a membership certificate from scratch, without any LP.

    Inside: weights are nonnegative, sum to one, the weighted points
    rebuild the query exactly, and every point belongs to the target
    (a generator, or componentwise inside some member polytope).
    Outside: the hyperplane bounds the whole target (checked at generators,
    or by greedy linear maximization per member) and strictly cuts off the
    query.  Raises on structurally malformed certificates.
    """
    if isinstance(cert, InsideCertificate):
        total = ZERO
        acc: dict = {}
        for point, weight in cert.weights:
            if not isinstance(point, Distribution):
                raise ModelError("malformed certificate: point is not a distribution")
            if weight < 0:
                return False
            total += weight
            for key, mass in point.items():
                acc[key] = acc.get(key, ZERO) + weight * mass
        if total != ONE:
            return False
        if {k: v for k, v in acc.items() if v != 0} != dict(query.items()):
            return False
        if isinstance(target, VPolytope):
            return all(point in target._gen_set for point, _ in cert.weights)
        members = tuple(target)
        for point, _ in cert.weights:
            if not any(_inside_box(p, point) for p in members):
                return False
        return True
    if isinstance(cert, SeparatingHyperplane):
        if isinstance(target, VPolytope):
            if cert.dims != target.dims:
                raise ModelError("malformed certificate: index set mismatch")
            if any(cert.value(g) > cert.offset for g in target.generators):
                return False
            return cert.value(query) > cert.offset
        members = tuple(target)
        coeffs = dict(zip(cert.dims, cert.normal))
        for p in members:
            if p.dims != cert.dims:
                raise ModelError("malformed certificate: index set mismatch")
            if linear_maximum(p, coeffs) > cert.offset:
                return False
        return cert.value(query) > cert.offset
    raise ModelError(f"malformed certificate: {cert!r}")


def _inside_box(p: IntervalPolytope, x: Distribution) -> bool:
    pos = {d: i for i, d in enumerate(p.dims)}
    if any(k not in pos for k in x.support):
        return False
    return all(
        p.lo[i] <= x.mass(d) <= p.hi[i] for i, d in enumerate(p.dims)
    )


def brute_force_vertices(p: IntervalPolytope) -> tuple[Distribution, ...]:
    """Reference extreme-point enumeration: all bound patterns plus
    one-free-coordinate completions, feasibility-filtered, then with
    convex-redundant points removed by leave-one-out hull membership."""
    n = len(p.dims)
    per_coord = [sorted({p.lo[i], p.hi[i]}) for i in range(n)]
    candidates: set[tuple[Fraction, ...]] = set()
    for assign in itertools.product(*per_coord):
        if sum(assign) == ONE:
            candidates.add(tuple(assign))
    for i in range(n):
        rest = per_coord[:i] + per_coord[i + 1 :]
        for assign in itertools.product(*rest):
            xi = ONE - sum(assign)
            if p.lo[i] <= xi <= p.hi[i]:
                candidates.add(assign[:i] + (xi,) + assign[i:])
    dists = sorted(
        (
            Distribution.of({d: v for d, v in zip(p.dims, c) if v != 0})
            for c in candidates
        ),
        key=lambda d: d.entries,
    )
    keep = []
    for idx, d in enumerate(dists):
        others = dists[:idx] + dists[idx + 1 :]
        if not others or not contains(VPolytope.of(p.dims, others), d).inside:
            keep.append(d)
    return tuple(keep)
