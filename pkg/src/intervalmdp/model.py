"""Core data model: interval MDPs, action-agnostic probabilistic automata,
exact distributions and state partitions.

All numeric data are exact rationals (`fractions.Fraction`); floats are
rejected at the boundary so that every equality question asked by the
geometry and bisimulation layers stays exact.  State ids are dense integers
internally; each model carries a `state_names` table mapping them back to
the opaque strings used in the interchange format.  All types are immutable
values and every operation is a pure function, so models can be shared
freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class ModelError(ValueError):
    """Raised for malformed models, distributions, partitions or intervals."""


def to_rational(value: int | str | Fraction) -> Fraction:
    """Convert to an exact rational.

    Accepts ints, Fractions and strings in "p/q" or decimal form
    ("0.3" becomes 3/10 exactly).  Floats are refused: they would silently
    poison the exact kernel.
    """
    if isinstance(value, bool):
        raise ModelError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ModelError(
            f"refusing float {value!r}; pass a Fraction or a string like '3/10'"
        )
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"not a rational: {value!r}") from exc
    raise ModelError(f"not a rational: {value!r}")


@dataclass(frozen=True)
class Interval:
    """Closed rational subinterval of [0, 1]."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        lo = to_rational(self.lo)
        hi = to_rational(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo > hi:
            raise ModelError(f"invalid interval: lo {lo} > hi {hi}")
        if lo < ZERO or hi > ONE:
            raise ModelError(f"interval [{lo}, {hi}] not within [0, 1]")

    @property
    def is_zero(self) -> bool:
        return self.hi == ZERO

    def contains_value(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def __repr__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


ZERO_INTERVAL = Interval(ZERO, ZERO)


@dataclass(frozen=True)
class Distribution:
    """Exact probability mass over finitely many keys.

    Canonical form: entries sorted by key, zero masses dropped, masses sum
    to exactly 1.  Equality and hashing therefore ignore zero entries.
    Keys are internal state ids (ints); product construction transiently
    uses pairs before they are renamed to dense ids.
    """

    entries: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        cleaned = []
        total = ZERO
        for key, mass in self.entries:
            mass = to_rational(mass)
            if mass < 0:
                raise ModelError(f"negative mass {mass} on key {key!r}")
            total += mass
            if mass > 0:
                cleaned.append((key, mass))
        if total != ONE:
            raise ModelError(f"masses sum to {total}, expected exactly 1")
        cleaned.sort(key=lambda kv: kv[0])
        for (k1, _), (k2, _) in zip(cleaned, cleaned[1:]):
            if k1 == k2:
                raise ModelError(f"duplicate key {k1!r} in distribution")
        object.__setattr__(self, "entries", tuple(cleaned))

    @classmethod
    def of(cls, mapping: Mapping[int, Fraction | int | str]) -> "Distribution":
        return cls(tuple(mapping.items()))

    @cached_property
    def _map(self) -> dict[int, Fraction]:
        return dict(self.entries)

    def mass(self, key) -> Fraction:
        return self._map.get(key, ZERO)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.entries)

    def items(self) -> tuple[tuple[int, Fraction], ...]:
        return self.entries

    def __repr__(self) -> str:
        body = ", ".join(f"{k!r}: {m}" for k, m in self.entries)
        return "{" + body + "}"


def dirac(key) -> Distribution:
    """Point mass on a single key."""
    return Distribution(((key, ONE),))


def product_dist(d1: Distribution, d2: Distribution) -> Distribution:
    """Product distribution over key pairs: mass (x, y) = d1(x) * d2(y)."""
    return Distribution(
        tuple(((k1, k2), m1 * m2) for k1, m1 in d1.entries for k2, m2 in d2.entries)
    )


def convex_combine(
    weights: Sequence[Fraction | int | str], dists: Sequence[Distribution]
) -> Distribution:
    """Convex combination of distributions; weights must be >= 0 and sum to 1."""
    if len(weights) != len(dists):
        raise ModelError("weights and distributions differ in length")
    ws = [to_rational(w) for w in weights]
    for w in ws:
        if w < 0:
            raise ModelError(f"negative weight {w}")
    if sum(ws) != ONE:
        raise ModelError(f"weights sum to {sum(ws)}, expected exactly 1")
    acc: dict = {}
    for w, d in zip(ws, dists):
        if w == 0:
            continue
        for key, mass in d.entries:
            acc[key] = acc.get(key, ZERO) + w * mass
    return Distribution.of(acc)


@dataclass(frozen=True)
class Partition:
    """Disjoint non-empty blocks of state ids; block ids are positional.

    Canonical order: blocks sorted by their minimum element, so block
    indices are stable for a fixed state universe.
    """

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        raw = tuple(frozenset(b) for b in self.blocks)
        if any(not block for block in raw):
            raise ModelError("empty block in partition")
        blocks = tuple(sorted(raw, key=min))
        seen: set[int] = set()
        for block in blocks:
            if seen & block:
                raise ModelError("overlapping blocks in partition")
            seen |= block
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        return cls(tuple(frozenset(b) for b in blocks))

    @classmethod
    def singletons(cls, states: Iterable[int]) -> "Partition":
        return cls.of([s] for s in states)

    @classmethod
    def from_labels(cls, model: "Imdp | Pa") -> "Partition":
        """Coarsest partition in which equally-labelled states share a block."""
        groups: dict[frozenset[str], set[int]] = {}
        for s in range(len(model.state_names)):
            groups.setdefault(model.labels[s], set()).add(s)
        return cls.of(groups.values())

    @cached_property
    def _block_of(self) -> dict[int, int]:
        table: dict[int, int] = {}
        for idx, block in enumerate(self.blocks):
            for s in block:
                table[s] = idx
        return table

    @property
    def universe(self) -> frozenset[int]:
        return frozenset(self._block_of)

    def block_index(self, state: int) -> int:
        try:
            return self._block_of[state]
        except KeyError:
            raise ModelError(f"state {state!r} not covered by partition") from None

    def same_block(self, s: int, t: int) -> bool:
        return self.block_index(s) == self.block_index(t)

    def meet(self, other: "Partition") -> "Partition":
        """Coarsest common refinement (blockwise intersections)."""
        blocks = []
        for b1 in self.blocks:
            for b2 in other.blocks:
                common = b1 & b2
                if common:
                    blocks.append(common)
        return Partition.of(blocks)

    def __len__(self) -> int:
        return len(self.blocks)


def class_project(d: Distribution, p: Partition) -> Distribution:
    """Push a distribution onto partition blocks: mass(C) = sum over C."""
    acc: dict[int, Fraction] = {}
    for key, mass in d.entries:
        idx = p.block_index(key)
        acc[idx] = acc.get(idx, ZERO) + mass
    return Distribution.of(acc)


def lift_equiv(d1: Distribution, d2: Distribution, p: Partition) -> bool:
    """True iff d1 and d2 assign equal mass to every block of p."""
    per_block: dict[int, Fraction] = {}
    for key, mass in d1.entries:
        idx = p.block_index(key)
        per_block[idx] = per_block.get(idx, ZERO) + mass
    for key, mass in d2.entries:
        idx = p.block_index(key)
        per_block[idx] = per_block.get(idx, ZERO) - mass
    return all(v == 0 for v in per_block.values())


def _check_states(names: Sequence[str]) -> None:
    if not names:
        raise ModelError("model needs at least one state")
    if len(set(names)) != len(names):
        raise ModelError("duplicate state names")


def _check_labels(
    labels: Sequence[frozenset[str]], names: Sequence[str], ap: frozenset[str]
) -> None:
    if len(labels) != len(names):
        raise ModelError("labels must cover exactly the state set")
    for name, props in zip(names, labels):
        extra = props - ap
        if extra:
            raise ModelError(f"state {name!r} labelled with unknown props {sorted(extra)}")


@dataclass(frozen=True)
class Imdp:
    """Interval Markov decision process.

    `transitions` is the sparse interval transition function as a canonical
    sorted tuple of (source, action, target, interval); absent entries mean
    the zero interval [0, 0] and explicit zero intervals are dropped.
    """

    state_names: tuple[str, ...]
    initial: int
    actions: tuple[str, ...]
    atomic_props: frozenset[str]
    labels: tuple[frozenset[str], ...]
    transitions: tuple[tuple[int, str, int, Interval], ...]

    kind = "imdp"

    def __post_init__(self) -> None:
        _check_states(self.state_names)
        n = len(self.state_names)
        if not (0 <= self.initial < n):
            raise ModelError(f"initial state id {self.initial} out of range")
        if len(set(self.actions)) != len(self.actions):
            raise ModelError("duplicate action names")
        _check_labels(self.labels, self.state_names, self.atomic_props)
        actions = set(self.actions)
        cleaned = []
        seen = set()
        for s, a, t, iv in self.transitions:
            if not (0 <= s < n and 0 <= t < n):
                raise ModelError(f"transition ({s},{a!r},{t}) has out-of-range state")
            if a not in actions:
                raise ModelError(f"transition uses unknown action {a!r}")
            if not isinstance(iv, Interval):
                iv = Interval(*iv)
            if (s, a, t) in seen:
                raise ModelError(f"duplicate transition entry ({s},{a!r},{t})")
            seen.add((s, a, t))
            if not iv.is_zero:
                cleaned.append((s, a, t, iv))
        cleaned.sort(key=lambda e: (e[0], e[1], e[2]))
        object.__setattr__(self, "transitions", tuple(cleaned))

    @classmethod
    def build(
        cls,
        states: Sequence[str],
        initial: str,
        actions: Sequence[str],
        atomic_props: Iterable[str],
        labels: Mapping[str, Iterable[str]],
        intervals: Mapping[tuple[str, str, str], tuple | Interval],
    ) -> "Imdp":
        """Construct from state names; the ergonomic front door for tests and IO."""
        _check_states(states)
        ids = {name: i for i, name in enumerate(states)}
        if initial not in ids:
            raise ModelError(f"initial state {initial!r} not among states")
        label_row = tuple(frozenset(labels.get(name, ())) for name in states)
        trans = []
        for (s, a, t), iv in intervals.items():
            for name in (s, t):
                if name not in ids:
                    raise ModelError(f"transition references unknown state {name!r}")
            if not isinstance(iv, Interval):
                iv = Interval(to_rational(iv[0]), to_rational(iv[1]))
            trans.append((ids[s], a, ids[t], iv))
        return cls(
            state_names=tuple(states),
            initial=ids[initial],
            actions=tuple(actions),
            atomic_props=frozenset(atomic_props),
            labels=label_row,
            transitions=tuple(trans),
        )

    @cached_property
    def _rows(self) -> dict[tuple[int, str], dict[int, Interval]]:
        rows: dict[tuple[int, str], dict[int, Interval]] = {}
        for s, a, t, iv in self.transitions:
            rows.setdefault((s, a), {})[t] = iv
        return rows

    @cached_property
    def _ids(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.state_names)}

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    def state_id(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise ModelError(f"unknown state {name!r}") from None

    def interval(self, s: int, a: str, t: int) -> Interval:
        return self._rows.get((s, a), {}).get(t, ZERO_INTERVAL)

    def row(self, s: int, a: str) -> Mapping[int, Interval]:
        return self._rows.get((s, a), {})

    def enabled(self, s: int) -> tuple[str, ...]:
        """Actions with at least one non-zero interval from state s."""
        if not (0 <= s < self.n_states):
            raise ModelError(f"unknown state id {s}")
        return tuple(a for a in self.actions if self._rows.get((s, a)))


@dataclass(frozen=True)
class Pa:
    """Action-agnostic probabilistic automaton.

    Transitions are a set of (source, target distribution) pairs; set
    semantics deduplicates structurally equal transitions.
    """

    state_names: tuple[str, ...]
    initial: int
    atomic_props: frozenset[str]
    labels: tuple[frozenset[str], ...]
    transitions: frozenset[tuple[int, Distribution]]

    kind = "pa"

    def __post_init__(self) -> None:
        _check_states(self.state_names)
        n = len(self.state_names)
        if not (0 <= self.initial < n):
            raise ModelError(f"initial state id {self.initial} out of range")
        _check_labels(self.labels, self.state_names, self.atomic_props)
        trans = frozenset(self.transitions)
        for s, dist in trans:
            if not (0 <= s < n):
                raise ModelError(f"transition from out-of-range state {s}")
            for t in dist.support:
                if not (isinstance(t, int) and 0 <= t < n):
                    raise ModelError(f"distribution target {t!r} out of range")
        object.__setattr__(self, "transitions", trans)

    @classmethod
    def build(
        cls,
        states: Sequence[str],
        initial: str,
        atomic_props: Iterable[str],
        labels: Mapping[str, Iterable[str]],
        transitions: Iterable[tuple[str, Mapping[str, Fraction | int | str]]],
    ) -> "Pa":
        _check_states(states)
        ids = {name: i for i, name in enumerate(states)}
        if initial not in ids:
            raise ModelError(f"initial state {initial!r} not among states")
        label_row = tuple(frozenset(labels.get(name, ())) for name in states)
        trans = set()
        for src, mapping in transitions:
            if src not in ids:
                raise ModelError(f"transition from unknown state {src!r}")
            for t in mapping:
                if t not in ids:
                    raise ModelError(f"distribution target {t!r} unknown")
            dist = Distribution.of({ids[t]: m for t, m in mapping.items()})
            trans.add((ids[src], dist))
        return cls(
            state_names=tuple(states),
            initial=ids[initial],
            atomic_props=frozenset(atomic_props),
            labels=label_row,
            transitions=frozenset(trans),
        )

    @cached_property
    def _ids(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.state_names)}

    @cached_property
    def _by_source(self) -> dict[int, tuple[Distribution, ...]]:
        rows: dict[int, list[Distribution]] = {}
        for s, dist in self.transitions:
            rows.setdefault(s, []).append(dist)
        return {s: tuple(sorted(ds, key=lambda d: d.entries)) for s, ds in rows.items()}

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    def state_id(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise ModelError(f"unknown state {name!r}") from None

    def targets(self, s: int) -> tuple[Distribution, ...]:
        """Target distributions enabled from s, in canonical order."""
        if not (0 <= s < self.n_states):
            raise ModelError(f"unknown state id {s}")
        return self._by_source.get(s, ())


def validate(model: Imdp | Pa) -> list[str]:
    """Check semantic invariants; returns violations as data, not failures.

    Structural well-formedness (id ranges, interval bounds, mass sums) is
    already enforced at construction time.  The checks here are the ones a
    structurally sound model can still fail: every state must enable some
    action, and every enabled uncertainty set must be non-empty.
    """
    violations: list[str] = []
    if isinstance(model, Pa):
        return violations
    for s in range(model.n_states):
        name = model.state_names[s]
        enabled = model.enabled(s)
        if not enabled:
            violations.append(f"no enabled action at state {name!r}")
            continue
        for a in enabled:
            row = model.row(s, a)
            lo_sum = sum((iv.lo for iv in row.values()), ZERO)
            hi_sum = sum((iv.hi for iv in row.values()), ZERO)
            if lo_sum > ONE:
                violations.append(
                    f"empty uncertainty set at state {name!r} action {a!r}: "
                    f"lower bounds sum to {lo_sum} > 1"
                )
            elif hi_sum < ONE:
                violations.append(
                    f"empty uncertainty set at state {name!r} action {a!r}: "
                    f"upper bounds sum to {hi_sum} < 1"
                )
    return violations


def require_valid(model: Imdp | Pa) -> None:
    violations = validate(model)
    if violations:
        raise ModelError("; ".join(violations))


def _fresh_names(names: Sequence[str], tag: str) -> tuple[str, ...]:
    return tuple(f"{name}@{tag}" for name in names)


def disjoint_union(
    m1: "Imdp | Pa", m2: "Imdp | Pa"
) -> tuple["Imdp | Pa", dict[int, int], dict[int, int]]:
    """Disjoint union of two models of the same kind.

    States are renamed apart ("@1"/"@2" suffixes); the returned maps send
    each input's state ids to ids of the union.  The union's initial state
    is the first model's (model-level bisimilarity compares the two mapped
    initials, it never uses a merged initial).
    """
    if type(m1) is not type(m2):
        raise ModelError("disjoint union needs two models of the same kind")
    names = _fresh_names(m1.state_names, "1") + _fresh_names(m2.state_names, "2")
    offset = m1.n_states
    map1 = {i: i for i in range(m1.n_states)}
    map2 = {i: offset + i for i in range(m2.n_states)}
    labels = tuple(m1.labels) + tuple(m2.labels)
    ap = m1.atomic_props | m2.atomic_props
    if isinstance(m1, Imdp):
        actions = tuple(sorted(set(m1.actions) | set(m2.actions)))
        trans = [(map1[s], a, map1[t], iv) for s, a, t, iv in m1.transitions]
        trans += [(map2[s], a, map2[t], iv) for s, a, t, iv in m2.transitions]
        union: Imdp | Pa = Imdp(
            state_names=names,
            initial=map1[m1.initial],
            actions=actions,
            atomic_props=ap,
            labels=labels,
            transitions=tuple(trans),
        )
    else:
        trans_pa = {
            (map1[s], Distribution.of({map1[t]: m for t, m in d.items()}))
            for s, d in m1.transitions
        }
        trans_pa |= {
            (map2[s], Distribution.of({map2[t]: m for t, m in d.items()}))
            for s, d in m2.transitions
        }
        union = Pa(
            state_names=names,
            initial=map1[m1.initial],
            atomic_props=ap,
            labels=labels,
            transitions=frozenset(trans_pa),
        )
    return union, map1, map2
