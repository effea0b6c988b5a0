from fractions import Fraction

import pytest

from intervalmdp import (
    Distribution,
    EmptyPolytopeError,
    InsideCertificate,
    Interval,
    IntervalPolytope,
    ModelError,
    SeparatingHyperplane,
    VPolytope,
    contains,
    contains_union,
    dirac,
    hull_equal,
    project,
    vertices,
    vpoly_equal,
)
from intervalmdp.oracle import (
    brute_force_vertices,
    gen_random_interval_polytope,
    verify_certificate,
)

F = Fraction


def _poly(bounds):
    return IntervalPolytope.of({k: Interval(*v) for k, v in bounds.items()})


@pytest.fixture
def three_dist_hull():
    gens = (
        Distribution.of({0: F(7, 10), 1: F(1, 5), 2: F(1, 10)}),
        Distribution.of({0: F(1, 2), 1: F(2, 5), 2: F(1, 10)}),
        Distribution.of({1: F(3, 5), 2: F(2, 5)}),
    )
    return VPolytope.of((0, 1, 2), gens)


@pytest.fixture
def folded_box():
    return _poly({0: (0, "7/10"), 1: ("1/5", "3/5"), 2: ("1/10", "2/5")})


class TestIntervalPolytope:
    def test_empty_lower_rejected(self):
        with pytest.raises(EmptyPolytopeError):
            _poly({0: ("0.6", "0.7"), 1: ("0.6", "0.7")})

    def test_empty_upper_rejected(self):
        with pytest.raises(EmptyPolytopeError):
            _poly({0: (0, "0.3"), 1: (0, "0.3")})

    def test_membership(self, folded_box):
        assert folded_box.member(Distribution.of({0: F(2, 5), 1: F(1, 5), 2: F(2, 5)}))
        assert not folded_box.member(dirac(0))


class TestVertices:
    def test_two_vertex_golden(self):
        p = _poly({0: ("1/10", "3/10"), 1: ("4/5", 1)})
        assert set(vertices(p)) == {
            Distribution.of({0: F(1, 10), 1: F(9, 10)}),
            Distribution.of({0: F(1, 5), 1: F(4, 5)}),
        }

    def test_point_polytope(self):
        d = Distribution.of({0: F(1, 3), 1: F(2, 3)})
        p = _poly({0: ("1/3", "1/3"), 1: ("2/3", "2/3")})
        assert vertices(p) == (d,)

    def test_full_simplex(self):
        p = _poly({0: (0, 1), 1: (0, 1), 2: (0, 1)})
        assert set(vertices(p)) == {dirac(0), dirac(1), dirac(2)}

    def test_outputs_feasible_and_extreme(self):
        for seed in range(40):
            p = gen_random_interval_polytope(seed)
            verts = vertices(p)
            assert verts
            for v in verts:
                assert p.member(v)
            if len(verts) > 1:
                for i, v in enumerate(verts):
                    rest = verts[:i] + verts[i + 1 :]
                    assert not contains(VPolytope.of(p.dims, rest), v).inside

    def test_agrees_with_brute_force(self):
        for seed in range(60):
            p = gen_random_interval_polytope(seed)
            assert set(vertices(p)) == set(brute_force_vertices(p))


class TestContains:
    def test_generator_is_inside_with_unit_weight(self, three_dist_hull):
        g = three_dist_hull.generators[0]
        result = contains(three_dist_hull, g)
        assert result.inside
        assert result.certificate.weights == ((g, F(1)),)

    def test_midpoint_inside(self):
        g1 = Distribution.of({0: F(1, 2), 1: F(1, 2)})
        g2 = dirac(0)
        hull = VPolytope.of((0, 1), (g1, g2))
        mid = Distribution.of({0: F(3, 4), 1: F(1, 4)})
        result = contains(hull, mid)
        assert result.inside
        assert dict(result.certificate.weights) == {g1: F(1, 2), g2: F(1, 2)}

    def test_spurious_point_outside_with_certificate(self, three_dist_hull):
        query = Distribution.of({0: F(2, 5), 1: F(1, 5), 2: F(2, 5)})
        result = contains(three_dist_hull, query)
        assert not result.inside
        plane = result.certificate
        assert isinstance(plane, SeparatingHyperplane)
        for g in three_dist_hull.generators:
            assert plane.value(g) <= plane.offset
        assert plane.value(query) > plane.offset
        assert verify_certificate(plane, query, three_dist_hull)

    def test_empty_generator_set_rejected(self):
        with pytest.raises(ModelError):
            contains(VPolytope.of((0,), ()), dirac(0))

    def test_query_off_index_set_rejected(self, three_dist_hull):
        with pytest.raises(ModelError):
            contains(three_dist_hull, dirac(9))


class TestContainsUnion:
    def test_single_polytope_componentwise(self, folded_box):
        inside = Distribution.of({0: F(2, 5), 1: F(1, 5), 2: F(2, 5)})
        assert contains_union([folded_box], inside).inside
        outside = Distribution.of({0: F(9, 10), 2: F(1, 10)})
        result = contains_union([folded_box], outside)
        assert not result.inside
        assert verify_certificate(result.certificate, outside, [folded_box])

    def test_vertex_of_member_inside(self):
        p1 = _poly({0: (0, "1/2"), 1: ("1/2", 1)})
        p2 = _poly({0: ("1/2", 1), 1: (0, "1/2")})
        for p in (p1, p2):
            for v in vertices(p):
                assert contains_union([p1, p2], v).inside

    def test_midpoint_of_two_point_polytopes(self):
        p1 = _poly({0: (1, 1)})
        p2 = _poly({1: (1, 1)})
        # shared index set
        p1 = IntervalPolytope((0, 1), (F(1), F(0)), (F(1), F(0)))
        p2 = IntervalPolytope((0, 1), (F(0), F(1)), (F(0), F(1)))
        mid = Distribution.of({0: F(1, 2), 1: F(1, 2)})
        result = contains_union([p1, p2], mid)
        assert result.inside
        assert verify_certificate(result.certificate, mid, [p1, p2])

    def test_gap_point_outside_union_hull(self):
        # two points on the simplex edge; a third coordinate breaks collinearity
        p1 = IntervalPolytope((0, 1, 2), (F(1), F(0), F(0)), (F(1), F(0), F(0)))
        p2 = IntervalPolytope((0, 1, 2), (F(0), F(1), F(0)), (F(0), F(1), F(0)))
        off = Distribution.of({0: F(1, 2), 2: F(1, 2)})
        result = contains_union([p1, p2], off)
        assert not result.inside
        assert verify_certificate(result.certificate, off, [p1, p2])

    def test_mixture_requires_lp(self):
        # point belongs to the hull of the union but to neither member
        p1 = IntervalPolytope((0, 1, 2), (F(1, 2), F(1, 2), F(0)), (F(1, 2), F(1, 2), F(0)))
        p2 = IntervalPolytope((0, 1, 2), (F(1, 2), F(0), F(1, 2)), (F(1, 2), F(0), F(1, 2)))
        mix = Distribution.of({0: F(1, 2), 1: F(1, 4), 2: F(1, 4)})
        result = contains_union([p1, p2], mix)
        assert result.inside
        assert verify_certificate(result.certificate, mix, [p1, p2])

    def test_empty_family_rejected(self):
        with pytest.raises(ModelError):
            contains_union([], dirac(0))


class TestHullEqual:
    def test_reflexive(self, folded_box):
        assert hull_equal([folded_box], [folded_box])

    def test_simplex_equals_its_corners(self):
        simplex = _poly({0: (0, 1), 1: (0, 1), 2: (0, 1)})
        corners = [
            IntervalPolytope((0, 1, 2), tuple(F(int(i == j)) for j in range(3)),
                             tuple(F(int(i == j)) for j in range(3)))
            for i in range(3)
        ]
        assert hull_equal([simplex], corners)
        assert hull_equal(corners, [simplex])

    def test_folded_box_differs_from_hull(self, three_dist_hull, folded_box):
        # box as family of its vertices' point polytopes vs the true hull family
        point_family = [
            IntervalPolytope(
                (0, 1, 2),
                tuple(g.mass(d) for d in (0, 1, 2)),
                tuple(g.mass(d) for d in (0, 1, 2)),
            )
            for g in three_dist_hull.generators
        ]
        assert not hull_equal([folded_box], point_family)

    def test_symmetry_and_transitivity_spot(self):
        pool = [
            gen_random_interval_polytope(s, max_dims=4)
            for s in range(40)
        ]
        pool = [p for p in pool if len(p.dims) == 3][:6]
        fams = [pool[:2], pool[2:4], pool[4:6]]
        pairs = {}
        for i, a in enumerate(fams):
            for j, b in enumerate(fams):
                pairs[(i, j)] = hull_equal(a, b)
        for i in range(len(fams)):
            assert pairs[(i, i)]
            for j in range(len(fams)):
                assert pairs[(i, j)] == pairs[(j, i)]
                for k in range(len(fams)):
                    if pairs[(i, j)] and pairs[(j, k)]:
                        assert pairs[(i, k)]


class TestVPolyEqual:
    def test_identical(self, three_dist_hull):
        assert vpoly_equal(three_dist_hull, three_dist_hull)

    def test_redundant_generator(self):
        g1 = dirac(0)
        g2 = dirac(1)
        mid = Distribution.of({0: F(1, 2), 1: F(1, 2)})
        assert vpoly_equal(
            VPolytope.of((0, 1), (g1, g2, mid)), VPolytope.of((0, 1), (g1, g2))
        )

    def test_folded_vertices_differ_from_hull(self, three_dist_hull, folded_box):
        assert not vpoly_equal(
            three_dist_hull, VPolytope.of((0, 1, 2), vertices(folded_box))
        )

    def test_empty_cases(self):
        empty = VPolytope.of((0,), ())
        assert vpoly_equal(empty, empty)
        assert not vpoly_equal(empty, VPolytope.of((0,), (dirac(0),)))


class TestProject:
    def test_three_dist_projections(self, three_dist_hull):
        assert project(three_dist_hull, 0) == Interval(0, "7/10")
        assert project(three_dist_hull, 1) == Interval("1/5", "3/5")
        assert project(three_dist_hull, 2) == Interval("1/10", "2/5")

    def test_point_polytope_degenerate(self):
        v = VPolytope.of((0, 1), (Distribution.of({0: F(1, 3), 1: F(2, 3)}),))
        assert project(v, 0) == Interval("1/3", "1/3")

    def test_projection_matches_tightened_bounds(self):
        for seed in range(50):
            p = gen_random_interval_polytope(seed, max_dims=4)
            hull = VPolytope.of(p.dims, vertices(p))
            lo_sum, hi_sum = sum(p.lo), sum(p.hi)
            for i, d in enumerate(p.dims):
                expect_lo = max(p.lo[i], 1 - (hi_sum - p.hi[i]))
                expect_hi = min(p.hi[i], 1 - (lo_sum - p.lo[i]))
                assert project(hull, d) == Interval(expect_lo, expect_hi)


class TestCertificates:
    def test_inside_certificates_recombine(self):
        for seed in range(30):
            p = gen_random_interval_polytope(seed, max_dims=4)
            verts = vertices(p)
            hull = VPolytope.of(p.dims, verts)
            weights = [F(1, len(verts))] * len(verts)
            mix: dict = {}
            for w, g in zip(weights, verts):
                for k, m in g.items():
                    mix[k] = mix.get(k, F(0)) + w * m
            query = Distribution.of(mix)
            result = contains(hull, query)
            assert result.inside
            assert verify_certificate(result.certificate, query, hull)

    def test_tampered_inside_certificate_fails(self):
        g1, g2 = dirac(0), dirac(1)
        hull = VPolytope.of((0, 1), (g1, g2))
        bad = InsideCertificate(((g1, F(1)),))
        query = Distribution.of({0: F(1, 2), 1: F(1, 2)})
        assert not verify_certificate(bad, query, hull)

    def test_tampered_hyperplane_fails(self):
        hull = VPolytope.of((0, 1), (dirac(0),))
        plane = SeparatingHyperplane((0, 1), (F(1), F(0)), F(2))
        assert not verify_certificate(plane, dirac(1), hull)
