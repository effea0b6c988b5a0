"""Toolkit for interval Markov decision processes and action-agnostic
probabilistic automata: exact-arithmetic models, unfolding/folding between
the two, synchronous and interleaved composition, and probabilistic
bisimulation (decision, witnesses, quotients)."""

from .bisim import (
    BisimResult,
    BisimWitness,
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
from .compose import imdp_interleaved_product, imdp_sync_product, pa_sync_product
from .geometry import (
    EmptyPolytopeError,
    InsideCertificate,
    IntervalPolytope,
    MembershipResult,
    SeparatingHyperplane,
    VPolytope,
    contains,
    contains_union,
    hull_equal,
    project,
    vertices,
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
    convex_combine,
    dirac,
    disjoint_union,
    lift_equiv,
    product_dist,
    to_rational,
    validate,
)
from .serialize import parse_model, serialize_model, to_dot
from .transform import fold, spurious_witness, uncertainty_polytope, unfold

__version__ = "0.1.0"

__all__ = [
    "BisimResult",
    "BisimWitness",
    "Distribution",
    "EmptyPolytopeError",
    "Imdp",
    "InsideCertificate",
    "Interval",
    "IntervalPolytope",
    "MembershipResult",
    "ModelError",
    "Pa",
    "Partition",
    "SeparatingHyperplane",
    "VPolytope",
    "bisim_imdp",
    "bisim_pa",
    "class_project",
    "compare",
    "contains",
    "contains_union",
    "convex_combine",
    "dirac",
    "disjoint_union",
    "fold",
    "hull_equal",
    "imdp_class_polytopes",
    "imdp_interleaved_product",
    "imdp_states_equivalent",
    "imdp_sync_product",
    "is_bisimulation",
    "lift_equiv",
    "minimize",
    "pa_class_polytope",
    "pa_states_equivalent",
    "pa_sync_product",
    "parse_model",
    "product_dist",
    "project",
    "quotient",
    "refine",
    "serialize_model",
    "spurious_witness",
    "to_dot",
    "to_rational",
    "uncertainty_polytope",
    "unfold",
    "validate",
    "vertices",
    "vpoly_equal",
]
