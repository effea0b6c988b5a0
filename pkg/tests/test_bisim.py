from fractions import Fraction

import pytest

from intervalmdp import (
    Distribution,
    Imdp,
    Interval,
    ModelError,
    Pa,
    Partition,
    VPolytope,
    bisim_imdp,
    bisim_pa,
    compare,
    imdp_class_polytopes,
    imdp_states_equivalent,
    is_bisimulation,
    minimize,
    pa_class_polytope,
    pa_states_equivalent,
    quotient,
    refine,
)
from intervalmdp.bisim import BisimWitness
from intervalmdp.model import disjoint_union
from intervalmdp.oracle import (
    duplicate_state,
    gen_random_imdp,
    rename_states,
    split_action,
)

F = Fraction


def _label_partition(model):
    return Partition.from_labels(model)


class TestClassPolytopes:
    def test_traffic_root_two_dirac_generators(self, traffic_pa):
        pa = traffic_pa
        p = _label_partition(pa)
        r = pa.state_id("r")
        poly = pa_class_polytope(pa, r, p)
        red_block = p.block_index(pa.state_id("red"))
        s_block = p.block_index(pa.state_id("s"))
        assert set(poly.generators) == {
            Distribution.of({red_block: F(1)}),
            Distribution.of({s_block: F(1)}),
        }

    def test_single_transition_single_generator(self, traffic_pa):
        pa = traffic_pa
        p = _label_partition(pa)
        y = pa.state_id("y")
        assert len(pa_class_polytope(pa, y, p).generators) == 1

    def test_three_dist_generators_dedup(self, three_dist_pa):
        pa = three_dist_pa
        ids = {n: pa.state_id(n) for n in ("t", "x", "y", "z")}
        p = Partition.of([[ids["t"]], [ids["x"], ids["y"]], [ids["z"]]])
        poly = pa_class_polytope(pa, ids["t"], p)
        bxy = p.block_index(ids["x"])
        bz = p.block_index(ids["z"])
        assert set(poly.generators) == {
            Distribution.of({bxy: F(9, 10), bz: F(1, 10)}),
            Distribution.of({bxy: F(3, 5), bz: F(2, 5)}),
        }

    def test_imdp_blocks_of_singletons_recover_uncertainty(self, two_vertex_imdp):
        m = two_vertex_imdp
        ids = {n: m.state_id(n) for n in ("t", "u", "v")}
        p = Partition.of([[ids["t"]], [ids["u"]], [ids["v"]]])
        [poly] = imdp_class_polytopes(m, ids["t"], p)
        bu, bv = p.block_index(ids["u"]), p.block_index(ids["v"])
        assert poly.bound(bu) == Interval("1/10", "3/10")
        assert poly.bound(bv) == Interval("4/5", 1)

    def test_imdp_merged_block_clips_at_one(self, two_vertex_imdp):
        m = two_vertex_imdp
        ids = {n: m.state_id(n) for n in ("t", "u", "v")}
        p = Partition.of([[ids["t"]], [ids["u"], ids["v"]]])
        [poly] = imdp_class_polytopes(m, ids["t"], p)
        buv = p.block_index(ids["u"])
        assert poly.bound(buv) == Interval("9/10", 1)

    def test_disabled_state_rejected(self):
        m = Imdp.build(
            states=["s", "dead"],
            initial="s",
            actions=["a"],
            atomic_props=[],
            labels={},
            intervals={("s", "a", "s"): (1, 1)},
        )
        with pytest.raises(ModelError):
            imdp_class_polytopes(m, m.state_id("dead"), Partition.of([[0], [1]]))


class TestStateEquivalence:
    def test_reflexive(self, traffic_pa):
        p = _label_partition(traffic_pa)
        r = traffic_pa.state_id("r")
        assert pa_states_equivalent(traffic_pa, r, r, p)

    def test_labels_distinguish(self, traffic_pa):
        p = _label_partition(traffic_pa)
        r, y = traffic_pa.state_id("r"), traffic_pa.state_id("y")
        assert not pa_states_equivalent(traffic_pa, r, y, p)

    def test_combined_transitions_close_under_convexity(self):
        # state with targets {d1, d2} vs state with {d1, mid, d2}
        pa = Pa.build(
            states=["s", "t", "x", "y"],
            initial="s",
            atomic_props=["leaf"],
            labels={"x": ["leaf"], "y": ["leaf"]},
            transitions=[
                ("s", {"x": 1}),
                ("s", {"y": 1}),
                ("t", {"x": 1}),
                ("t", {"x": "1/2", "y": "1/2"}),
                ("t", {"y": 1}),
                ("x", {"x": 1}),
                ("y", {"y": 1}),
            ],
        )
        p = _label_partition(pa)
        assert pa_states_equivalent(pa, pa.state_id("s"), pa.state_id("t"), p)

    def test_action_split_keeps_imdp_states_equivalent(self, two_vertex_imdp):
        m2 = split_action(two_vertex_imdp, seed=5)
        union, map1, map2 = disjoint_union(two_vertex_imdp, m2)
        p = refine(union)
        t1 = map1[two_vertex_imdp.state_id("t")]
        t2 = map2[m2.state_id("t")]
        assert imdp_states_equivalent(union, t1, t2, p)

    def test_different_reachable_mass_ranges_differ(self, two_vertex_imdp):
        m = two_vertex_imdp
        narrowed = Imdp.build(
            states=["t", "u", "v"],
            initial="t",
            actions=["a"],
            atomic_props=["root", "left", "right"],
            labels={"t": ["root"], "u": ["left"], "v": ["right"]},
            intervals={
                ("t", "a", "u"): ("1/10", "3/10"),
                ("t", "a", "v"): ("7/10", 1),
                ("u", "a", "u"): (1, 1),
                ("v", "a", "v"): (1, 1),
            },
        )
        union, map1, map2 = disjoint_union(m, narrowed)
        p = refine(union)
        assert not imdp_states_equivalent(
            union, map1[m.state_id("t")], map2[narrowed.state_id("t")], p
        )


class TestRefine:
    def test_distinct_labels_give_identity(self, traffic_pa):
        p = refine(traffic_pa)
        assert all(len(b) == 1 for b in p.blocks)

    def test_union_with_copy_pairs_states(self, two_vertex_imdp):
        copy = rename_states(two_vertex_imdp, seed=3)
        union, map1, map2 = disjoint_union(two_vertex_imdp, copy)
        p = refine(union)
        for s in range(two_vertex_imdp.n_states):
            twin = copy.state_id(two_vertex_imdp.state_names[s] + "r")
            assert p.same_block(map1[s], map2[twin])

    def test_refines_label_partition(self, three_dist_pa):
        p = refine(three_dist_pa)
        labels = _label_partition(three_dist_pa)
        for block in p.blocks:
            reps = {labels.block_index(s) for s in block}
            assert len(reps) == 1

    def test_idempotent(self, two_vertex_imdp):
        m = two_vertex_imdp
        p = refine(m)
        assert refine(m, p) == p

    def test_order_insensitive(self, two_vertex_imdp):
        m = two_vertex_imdp
        permuted = Imdp.build(
            states=["v", "t", "u"],
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
        blocks_m = {
            frozenset(m.state_names[s] for s in b) for b in refine(m).blocks
        }
        blocks_p = {
            frozenset(permuted.state_names[s] for s in b)
            for b in refine(permuted).blocks
        }
        assert blocks_m == blocks_p

    def test_initial_partition_constrains(self, two_vertex_imdp):
        m = two_vertex_imdp
        split_uv = Partition.of([[0], [1], [2]])
        assert refine(m, split_uv) == refine(m).meet(split_uv)

    def test_initial_partition_must_cover(self, two_vertex_imdp):
        with pytest.raises(ModelError):
            refine(two_vertex_imdp, Partition.of([[0]]))


class TestModelChecks:
    def test_model_vs_itself(self, two_vertex_imdp, traffic_pa):
        assert bisim_imdp(two_vertex_imdp, two_vertex_imdp)
        assert bisim_pa(traffic_pa, traffic_pa)

    def test_model_vs_renamed_copy(self, two_vertex_imdp, traffic_pa):
        assert bisim_imdp(two_vertex_imdp, rename_states(two_vertex_imdp, 11))
        assert bisim_pa(traffic_pa, rename_states(traffic_pa, 11))

    def test_model_vs_duplicate(self, two_vertex_imdp, traffic_pa):
        assert bisim_imdp(two_vertex_imdp, duplicate_state(two_vertex_imdp, 7))
        assert bisim_pa(traffic_pa, duplicate_state(traffic_pa, 7))

    def test_hull_perturbation_detected_with_witness(self, two_vertex_imdp):
        m = two_vertex_imdp
        perturbed = Imdp.build(
            states=["t", "u", "v"],
            initial="t",
            actions=["a"],
            atomic_props=["root", "left", "right"],
            labels={"t": ["root"], "u": ["left"], "v": ["right"]},
            intervals={
                ("t", "a", "u"): ("1/10", "3/10"),
                ("t", "a", "v"): ("7/10", 1),  # widens reachable u-mass to 3/10
                ("u", "a", "u"): (1, 1),
                ("v", "a", "v"): (1, 1),
            },
        )
        result = compare(m, perturbed)
        assert not result.bisimilar
        witness = result.witness
        assert isinstance(witness, BisimWitness)
        assert witness.reason == "polytope"
        assert witness.hyperplane is not None
        # re-check the separation against the other side's class polytopes
        from intervalmdp.oracle import verify_certificate

        other_family = imdp_class_polytopes(
            result.union, witness.other, result.partition
        )
        assert verify_certificate(
            witness.hyperplane, witness.distribution, other_family
        )

    def test_label_mismatch_witness(self):
        left = Imdp.build(
            states=["s"], initial="s", actions=["a"], atomic_props=["p"],
            labels={"s": ["p"]}, intervals={("s", "a", "s"): (1, 1)},
        )
        right = Imdp.build(
            states=["s"], initial="s", actions=["a"], atomic_props=["p"],
            labels={}, intervals={("s", "a", "s"): (1, 1)},
        )
        result = compare(left, right)
        assert not result.bisimilar
        assert result.witness.reason == "labels"


class TestQuotient:
    def test_pa_identity_partition_isomorphic(self, traffic_pa):
        pa = traffic_pa
        q = quotient(pa, Partition.singletons(range(pa.n_states)))
        assert q.n_states == pa.n_states
        assert len(q.transitions) == len(pa.transitions)
        assert bisim_pa(pa, q)

    def test_imdp_identity_partition_isomorphic(self, two_vertex_imdp):
        m = two_vertex_imdp
        q = quotient(m, Partition.singletons(range(m.n_states)))
        assert q.state_names == m.state_names
        assert q.transitions == m.transitions

    def test_duplicate_recovered(self, two_vertex_imdp):
        m = two_vertex_imdp
        doubled = duplicate_state(m, seed=1)
        q, partition = minimize(doubled)
        assert q.n_states == m.n_states
        assert bisim_imdp(q, m)

    def test_quotient_bisimilar_to_original(self):
        for seed in range(12):
            m = gen_random_imdp(seed, max_states=4, max_actions=2)
            q, p = minimize(m)
            assert bisim_imdp(m, q)
            assert q.n_states == len(p)

    def test_rejects_non_bisimulation(self, two_vertex_imdp):
        m = two_vertex_imdp
        bogus = Partition.of([set(range(m.n_states))])
        with pytest.raises(ModelError, match="not a bisimulation"):
            quotient(m, bogus)

    def test_is_bisimulation(self, two_vertex_imdp):
        m = two_vertex_imdp
        assert is_bisimulation(m, refine(m))
        assert not is_bisimulation(m, Partition.of([set(range(m.n_states))]))
