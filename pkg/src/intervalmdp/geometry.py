"""Exact polytope kernel for probability distributions.

Two representations share one index set convention:

* `IntervalPolytope` denotes {x : lo <= x <= hi, sum(x) = 1}, the feasible
  distributions under per-coordinate interval bounds.
* `VPolytope` denotes the convex hull of finitely many distributions.

Vertex enumeration exploits the structure of box-and-simplex polytopes: a
vertex has at most one coordinate strictly between its bounds, so scanning
bound patterns with one free coordinate is exact and complete.  Hull
membership is decided by exact rational LP feasibility; every answer comes
with a certificate (convex weights inside, a separating hyperplane outside)
that re-checks with plain arithmetic.  There is no floating point and no
epsilon anywhere in this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .model import Distribution, Interval, ModelError, to_rational
from .simplex import feasible_point

ZERO = Fraction(0)
ONE = Fraction(1)


class EmptyPolytopeError(ModelError):
    """Interval bounds that cannot carry any distribution."""


@dataclass(frozen=True)
class IntervalPolytope:
    """Box-and-simplex polytope over an explicit index set.

    Construction rejects empty polytopes (sum of lower bounds above 1 or
    sum of upper bounds below 1), mirroring the non-emptiness required of
    uncertainty sets.
    """

    dims: tuple[int, ...]
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(set(self.dims)) != len(self.dims):
            raise ModelError("duplicate indices in polytope dimensions")
        if not (len(self.dims) == len(self.lo) == len(self.hi)):
            raise ModelError("dims, lo and hi must have equal length")
        lo = tuple(to_rational(v) for v in self.lo)
        hi = tuple(to_rational(v) for v in self.hi)
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        for d, l, h in zip(self.dims, lo, hi):
            if not (ZERO <= l <= h <= ONE):
                raise ModelError(f"bad bounds [{l}, {h}] at index {d!r}")
        if sum(lo) > ONE:
            raise EmptyPolytopeError(f"lower bounds sum to {sum(lo)} > 1")
        if sum(hi) < ONE:
            raise EmptyPolytopeError(f"upper bounds sum to {sum(hi)} < 1")

    @classmethod
    def of(
        cls, bounds: dict[int, Interval] | dict[int, tuple]
    ) -> "IntervalPolytope":
        dims = tuple(sorted(bounds))
        ivs = []
        for d in dims:
            iv = bounds[d]
            if not isinstance(iv, Interval):
                iv = Interval(*iv)
            ivs.append(iv)
        return cls(dims, tuple(iv.lo for iv in ivs), tuple(iv.hi for iv in ivs))

    def bound(self, index) -> Interval:
        return Interval(self.lo[self._pos[index]], self.hi[self._pos[index]])

    @cached_property
    def _pos(self) -> dict[int, int]:
        return {d: i for i, d in enumerate(self.dims)}

    def member(self, x: Distribution) -> bool:
        """Componentwise membership check (sum-to-one holds by typing)."""
        if any(k not in self._pos for k in x.support):
            return False
        return all(
            self.lo[i] <= x.mass(d) <= self.hi[i] for i, d in enumerate(self.dims)
        )

    def tightened(self) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        """Per-coordinate projections of the polytope.

        The box of these bounds intersected with the simplex equals the
        polytope itself, so two polytopes over one index set are equal
        exactly when their tightened bounds agree.
        """
        lo_sum = sum(self.lo)
        hi_sum = sum(self.hi)
        t_lo = tuple(
            max(l, ONE - (hi_sum - h)) for l, h in zip(self.lo, self.hi)
        )
        t_hi = tuple(
            min(h, ONE - (lo_sum - l)) for l, h in zip(self.lo, self.hi)
        )
        return t_lo, t_hi


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of a deduplicated, canonically ordered generator set."""

    dims: tuple[int, ...]
    generators: tuple[Distribution, ...]

    def __post_init__(self) -> None:
        dimset = set(self.dims)
        if len(dimset) != len(self.dims):
            raise ModelError("duplicate indices in polytope dimensions")
        for g in self.generators:
            if any(k not in dimset for k in g.support):
                raise ModelError(f"generator {g!r} is not over the index set")
        canon = tuple(sorted(set(self.generators), key=lambda d: d.entries))
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "generators", canon)

    @classmethod
    def of(cls, dims: Iterable[int], dists: Iterable[Distribution]) -> "VPolytope":
        return cls(tuple(dims), tuple(dists))

    @cached_property
    def _gen_set(self) -> frozenset[Distribution]:
        return frozenset(self.generators)


@dataclass(frozen=True)
class InsideCertificate:
    """Convex-combination witness: weighted points reconstruct the query."""

    weights: tuple[tuple[Distribution, Fraction], ...]


@dataclass(frozen=True)
class SeparatingHyperplane:
    """Outside witness: normal.g <= offset for all hull points, normal.query > offset."""

    dims: tuple[int, ...]
    normal: tuple[Fraction, ...]
    offset: Fraction

    def value(self, x: Distribution) -> Fraction:
        pos = {d: i for i, d in enumerate(self.dims)}
        total = ZERO
        for k, mass in x.items():
            total += self.normal[pos[k]] * mass
        return total


MembershipCertificate = InsideCertificate | SeparatingHyperplane


@dataclass(frozen=True)
class MembershipResult:
    inside: bool
    certificate: MembershipCertificate


def _make_dist(dims: Sequence[int], values: Sequence[Fraction]) -> Distribution:
    return Distribution.of({d: v for d, v in zip(dims, values) if v != 0})


@lru_cache(maxsize=8192)
def vertices(p: IntervalPolytope) -> tuple[Distribution, ...]:
    """Extreme points of an interval polytope, deduplicated.

    Every vertex pins all coordinates but at most one to a bound, so it is
    found by fixing bound patterns on all free coordinates except one and
    solving the mass constraint for the remainder.  Coordinates with
    lo == hi contribute a single choice, which keeps the scan proportional
    to the genuinely free coordinates (worst case k * 2^(k-1) candidates).
    """
    n = len(p.dims)
    base = list(p.lo)
    fixed_sum = ZERO
    free: list[int] = []
    for i in range(n):
        if p.lo[i] == p.hi[i]:
            fixed_sum += p.lo[i]
        else:
            free.append(i)
    if not free:
        return (_make_dist(p.dims, base),)
    found: set[tuple[Fraction, ...]] = set()
    for slot, i in enumerate(free):
        others = free[:slot] + free[slot + 1 :]
        for bits in itertools.product((False, True), repeat=len(others)):
            point = list(base)
            total = fixed_sum
            for j, at_hi in zip(others, bits):
                if at_hi:
                    point[j] = p.hi[j]
                total += point[j]
            xi = ONE - total
            if p.lo[i] <= xi <= p.hi[i]:
                point[i] = xi
                found.add(tuple(point))
    dists = [_make_dist(p.dims, point) for point in found]
    dists.sort(key=lambda d: d.entries)
    return tuple(dists)


def contains(v: VPolytope, x: Distribution) -> MembershipResult:
    """Exact hull membership for a V-polytope, with certificate.

    Inside answers carry convex weights over the generators that rebuild x
    exactly; outside answers carry a separating hyperplane obtained from the
    Farkas certificate of the infeasible weight system.
    """
    if not v.generators:
        raise ModelError("membership query against an empty generator set")
    pos = {d: i for i, d in enumerate(v.dims)}
    if any(k not in pos for k in x.support):
        raise ModelError("query distribution is not over the polytope's index set")
    if x in v._gen_set:
        return MembershipResult(True, InsideCertificate(((x, ONE),)))
    k = len(v.generators)
    rows = [[g.mass(d) for g in v.generators] for d in v.dims]
    rows.append([ONE] * k)
    rhs = [x.mass(d) for d in v.dims] + [ONE]
    sol, farkas = feasible_point(rows, rhs)
    if sol is not None:
        weights = tuple(
            (g, w) for g, w in zip(v.generators, sol) if w != 0
        )
        assert _recombines(weights, x)
        return MembershipResult(True, InsideCertificate(weights))
    normal = tuple(farkas[:-1])
    offset = -farkas[-1]
    plane = SeparatingHyperplane(v.dims, normal, offset)
    assert all(plane.value(g) <= offset for g in v.generators)
    assert plane.value(x) > offset
    return MembershipResult(False, plane)


def _recombines(
    weights: Sequence[tuple[Distribution, Fraction]], x: Distribution
) -> bool:
    total = sum((w for _, w in weights), ZERO)
    if total != ONE or any(w < 0 for _, w in weights):
        return False
    acc: dict = {}
    for point, w in weights:
        for key, mass in point.items():
            acc[key] = acc.get(key, ZERO) + w * mass
    return {k: v for k, v in acc.items() if v != 0} == dict(x.items())


def _coordinate_plane(
    dims: tuple[int, ...], coord: int, sign: int, offset: Fraction
) -> SeparatingHyperplane:
    normal = [ZERO] * len(dims)
    normal[coord] = Fraction(sign)
    return SeparatingHyperplane(dims, tuple(normal), offset)


def contains_union(
    ps: Sequence[IntervalPolytope], x: Distribution
) -> MembershipResult:
    """Membership of x in the convex hull of a union of interval polytopes.

    Cheap exact screens run first: componentwise membership in any single
    member settles inside, and a violated coordinate of the union's
    bounding box settles outside.  The remaining cases go through one
    lifted LP with per-member weights and scaled points, whose Farkas
    certificate converts to a separating hyperplane.
    """
    ps = tuple(ps)
    if not ps:
        raise ModelError("membership query against an empty polytope list")
    dims = ps[0].dims
    for p in ps[1:]:
        if p.dims != dims:
            raise ModelError("polytopes in a union must share the index set")
    pos = {d: i for i, d in enumerate(dims)}
    if any(k not in pos for k in x.support):
        raise ModelError("query distribution is not over the polytopes' index set")

    for p in ps:
        if p.member(x):
            return MembershipResult(True, InsideCertificate(((x, ONE),)))
    for c, d in enumerate(dims):
        xm = x.mass(d)
        box_hi = max(p.hi[c] for p in ps)
        if xm > box_hi:
            return MembershipResult(False, _coordinate_plane(dims, c, 1, box_hi))
        box_lo = min(p.lo[c] for p in ps)
        if xm < box_lo:
            return MembershipResult(False, _coordinate_plane(dims, c, -1, -box_lo))
    # A single member is fully resolved by the screens above.
    return _lifted_membership(ps, x)


def _lifted_membership(
    ps: tuple[IntervalPolytope, ...], x: Distribution
) -> MembershipResult:
    dims = ps[0].dims
    keep = [
        c
        for c in range(len(dims))
        if x.mass(dims[c]) != 0 or any(p.hi[c] > 0 for p in ps)
    ]
    n = len(keep)
    m = len(ps)
    stride = 1 + 3 * n
    width = m * stride

    def lam(a: int) -> int:
        return a * stride

    def zvar(a: int, c: int) -> int:
        return a * stride + 1 + c

    def slack_lo(a: int, c: int) -> int:
        return a * stride + 1 + n + c

    def slack_hi(a: int, c: int) -> int:
        return a * stride + 1 + 2 * n + c

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for a, p in enumerate(ps):
        for c, ci in enumerate(keep):
            row = [ZERO] * width
            row[zvar(a, c)] = ONE
            row[lam(a)] = -p.lo[ci]
            row[slack_lo(a, c)] = -ONE
            rows.append(row)
            rhs.append(ZERO)
        for c, ci in enumerate(keep):
            row = [ZERO] * width
            row[lam(a)] = p.hi[ci]
            row[zvar(a, c)] = -ONE
            row[slack_hi(a, c)] = -ONE
            rows.append(row)
            rhs.append(ZERO)
        row = [ZERO] * width
        for c in range(n):
            row[zvar(a, c)] = ONE
        row[lam(a)] = -ONE
        rows.append(row)
        rhs.append(ZERO)
    mass_row = len(rows)
    row = [ZERO] * width
    for a in range(m):
        row[lam(a)] = ONE
    rows.append(row)
    rhs.append(ONE)
    coord_rows = len(rows)
    for c, ci in enumerate(keep):
        row = [ZERO] * width
        for a in range(m):
            row[zvar(a, c)] = ONE
        rows.append(row)
        rhs.append(x.mass(dims[ci]))

    sol, farkas = feasible_point(rows, rhs)
    if sol is not None:
        weights = []
        for a, p in enumerate(ps):
            la = sol[lam(a)]
            if la == 0:
                continue
            point = _make_dist(
                tuple(dims[ci] for ci in keep),
                tuple(sol[zvar(a, c)] / la for c in range(n)),
            )
            assert p.member(point)
            weights.append((point, la))
        cert = InsideCertificate(tuple(weights))
        assert _recombines(cert.weights, x)
        return MembershipResult(True, cert)
    normal = [ZERO] * len(dims)
    for c, ci in enumerate(keep):
        normal[ci] = farkas[coord_rows + c]
    plane = SeparatingHyperplane(dims, tuple(normal), -farkas[mass_row])
    assert plane.value(x) > plane.offset
    return MembershipResult(False, plane)


def hull_equal(
    a: Sequence[IntervalPolytope], b: Sequence[IntervalPolytope]
) -> bool:
    """Equality of the hulls of two unions of interval polytopes.

    Decided by mutual inclusion: every vertex of every member on one side
    must lie in the other side's hull.  The one-vs-one case reduces to
    comparing tightened bounds, since a box-and-simplex polytope is exactly
    the box of its projections intersected with the simplex.
    """
    a = tuple(a)
    b = tuple(b)
    if not a or not b:
        raise ModelError("hull comparison needs non-empty polytope families")
    dims = a[0].dims
    for p in itertools.chain(a, b):
        if p.dims != dims:
            raise ModelError("hull comparison needs a shared index set")
    if len(a) == 1 and len(b) == 1:
        return a[0].tightened() == b[0].tightened()
    return hull_subset_witness(a, b) is None and hull_subset_witness(b, a) is None


def hull_subset_witness(
    a: Sequence[IntervalPolytope], b: Sequence[IntervalPolytope]
) -> tuple[Distribution, SeparatingHyperplane] | None:
    """None if hull(a) is included in hull(b); otherwise a vertex of hull(a)
    outside hull(b) together with the separating hyperplane."""
    for p in a:
        for v in vertices(p):
            result = contains_union(b, v)
            if not result.inside:
                assert isinstance(result.certificate, SeparatingHyperplane)
                return v, result.certificate
    return None


def vpoly_equal(v1: VPolytope, v2: VPolytope) -> bool:
    """Hull equality of V-polytopes via mutual generator membership."""
    if v1.dims != v2.dims:
        raise ModelError("hull comparison needs a shared index set")
    if not v1.generators or not v2.generators:
        return not v1.generators and not v2.generators
    for g in v1.generators:
        if g not in v2._gen_set and not contains(v2, g).inside:
            return False
    for g in v2.generators:
        if g not in v1._gen_set and not contains(v1, g).inside:
            return False
    return True


def project(v: VPolytope, index: int) -> Interval:
    """Coordinate projection of a V-polytope; attained at generators."""
    if not v.generators:
        raise ModelError("projection of an empty polytope")
    if index not in set(v.dims):
        raise ModelError(f"index {index!r} outside the polytope's index set")
    values = [g.mass(index) for g in v.generators]
    return Interval(min(values), max(values))
