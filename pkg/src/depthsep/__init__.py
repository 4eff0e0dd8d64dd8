"""Exact piecewise-polynomial calculus for layered gate networks.

Everything in this package computes over rationals and algebraic reals --
no floating point enters any semantic path.  Submodules build on each other
roughly in this order: exact arithmetic, interval partitions, piecewise
polynomials, gate encodings, networks, the hard-instance constructions, the
separation certificates, and counting / capacity bounds.
"""

from __future__ import annotations

from .exact import (
    AlgebraicReal,
    IntegralEnclosure,
    MPoly,
    Point,
    Poly,
    Rat,
    count_roots_open,
    integrate_abs,
    interpolate,
    isolate_roots,
    point_cmp,
    point_sign_of,
    poly_at_algebraic,
    rat,
    rat_str,
    resultant,
    simplest_in,
)
from .constructions import (
    ShapeIndex,
    TriangleCert,
    closed_form_fk,
    compose_nets,
    hard_network,
    iterate,
    repeat_signal,
    shape_index,
    triangle_check,
    triangle_min,
    triangle_quad,
    triangle_relu,
)
from .gates import (
    BoostedTrees,
    Leaf,
    SaGate,
    SaProfile,
    SaTerm,
    Split,
    bdt_eval,
    dt_eval,
    encode_bdt,
    encode_dt,
    encode_max,
    encode_min,
    encode_poly_activation,
    encode_relu,
    gate_eval,
    gate_from_json,
    gate_to_json,
    input_names,
)
from .network import (
    CrossingBound,
    LineMap,
    NetProfile,
    NetworkGraph,
    Node,
    compile_net,
    crossing_bound,
    crossing_bound_bdt,
    crossing_bound_dt,
    net_eval,
    parse_net,
    profile,
    restrict_line,
    serialize_net,
)
from .partition import Interval, Partition, join_adjacent, locate, refine
from .piecewise import (
    CrossingReport,
    PiecewisePoly,
    classifier,
    crossing_number,
    disagreement,
    l1_distance,
    merge_equal,
    pwp_apply_sa_gate,
    pwp_compose_poly,
    pwp_eval,
    pwp_linear,
)
from .separation import (
    CandidateSpec,
    NuSample,
    PolyReport,
    SeparationReport,
    candidate_pwp,
    candidate_search,
    class_check,
    discrete_errors,
    enumerate_candidates,
    nu_points,
    poly_separation_check,
    report_csv,
    tent_l1_lower,
    tent_target,
    verify_separation,
)
from .capacity import (
    CapacityQuery,
    GrowthBound,
    LabelExperiment,
    e_enclosure,
    free_param_names,
    growth_bound,
    ln_enclosure,
    min_samples,
    random_label_bound,
    random_label_experiment,
    region_count_bound,
    sqrt_enclosure,
    vc_bound,
)

__all__ = [
    "AlgebraicReal",
    "IntegralEnclosure",
    "MPoly",
    "Point",
    "Poly",
    "Rat",
    "count_roots_open",
    "integrate_abs",
    "interpolate",
    "isolate_roots",
    "point_cmp",
    "point_sign_of",
    "poly_at_algebraic",
    "rat",
    "rat_str",
    "resultant",
    "simplest_in",
    "ShapeIndex",
    "TriangleCert",
    "closed_form_fk",
    "compose_nets",
    "hard_network",
    "iterate",
    "repeat_signal",
    "shape_index",
    "triangle_check",
    "triangle_min",
    "triangle_quad",
    "triangle_relu",
    "Interval",
    "Partition",
    "join_adjacent",
    "locate",
    "refine",
    "BoostedTrees",
    "Leaf",
    "SaGate",
    "SaProfile",
    "SaTerm",
    "Split",
    "bdt_eval",
    "dt_eval",
    "encode_bdt",
    "encode_dt",
    "encode_max",
    "encode_min",
    "encode_poly_activation",
    "encode_relu",
    "gate_eval",
    "gate_from_json",
    "gate_to_json",
    "input_names",
    "CrossingBound",
    "LineMap",
    "NetProfile",
    "NetworkGraph",
    "Node",
    "compile_net",
    "crossing_bound",
    "crossing_bound_bdt",
    "crossing_bound_dt",
    "net_eval",
    "parse_net",
    "profile",
    "restrict_line",
    "serialize_net",
    "CrossingReport",
    "PiecewisePoly",
    "classifier",
    "crossing_number",
    "disagreement",
    "l1_distance",
    "merge_equal",
    "pwp_apply_sa_gate",
    "pwp_compose_poly",
    "pwp_eval",
    "pwp_linear",
    "CandidateSpec",
    "NuSample",
    "PolyReport",
    "SeparationReport",
    "candidate_pwp",
    "candidate_search",
    "class_check",
    "discrete_errors",
    "enumerate_candidates",
    "nu_points",
    "poly_separation_check",
    "report_csv",
    "tent_l1_lower",
    "tent_target",
    "verify_separation",
    "CapacityQuery",
    "GrowthBound",
    "LabelExperiment",
    "e_enclosure",
    "free_param_names",
    "growth_bound",
    "ln_enclosure",
    "min_samples",
    "random_label_bound",
    "random_label_experiment",
    "region_count_bound",
    "sqrt_enclosure",
    "vc_bound",
]

__version__ = "0.1.0"
