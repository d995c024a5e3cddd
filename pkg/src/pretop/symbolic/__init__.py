"""Exact analysis of infinite spaces given by parametric vicinity rules."""

from .analysis import (
    DefFilterBase,
    EndClass,
    ParametricAnswer,
    cl_theta,
    end_converges,
    ends,
    sym_adh,
    sym_compact_at,
    sym_hausdorff,
    sym_inh,
    sym_is_compact,
    sym_regularize,
    sym_restrict,
    sym_separated,
    vicinity_core,
)
from .exprs import SymDefSet, SymExpr, SymInterval, SymIntervalSet, sym_grid, sym_ray
from .maps import (
    AffineAxis,
    StrandMap,
    SymbolicMap,
    build_sym_map,
    image_end,
    sym_f_sharp,
    sym_identity,
    sym_image,
    sym_is_continuous,
)
from .space import (
    PointPattern,
    SymbolicPretop,
    VicinityRule,
    build_symbolic,
    builtin,
    truncate,
)

__all__ = [
    "AffineAxis",
    "DefFilterBase",
    "EndClass",
    "ParametricAnswer",
    "PointPattern",
    "StrandMap",
    "SymDefSet",
    "SymExpr",
    "SymInterval",
    "SymIntervalSet",
    "SymbolicMap",
    "SymbolicPretop",
    "VicinityRule",
    "build_sym_map",
    "build_symbolic",
    "builtin",
    "cl_theta",
    "end_converges",
    "ends",
    "image_end",
    "sym_adh",
    "sym_compact_at",
    "sym_f_sharp",
    "sym_grid",
    "sym_hausdorff",
    "sym_identity",
    "sym_image",
    "sym_inh",
    "sym_is_compact",
    "sym_is_continuous",
    "sym_ray",
    "sym_regularize",
    "sym_restrict",
    "sym_separated",
    "truncate",
    "vicinity_core",
]
