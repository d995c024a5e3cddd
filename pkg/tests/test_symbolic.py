"""Symbolic spaces: the rule engine must agree with brute force on every
finite snapshot wide enough to be faithful, and the worked grid space
must reproduce its known closures, ends and compactness splits."""

import pytest

from pretop.defsets import DefSet, GroundSchema, Point
from pretop.errors import (
    PatternGap,
    PatternOverlap,
    SelfMembershipViolation,
    UnknownBuiltin,
    WindowTooSmall,
)
from pretop.intervals import INF, AxisDomain, IntervalSet
from pretop.model import eval_set, parse_set_expr, set_literal
from pretop.symbolic import (
    DefFilterBase,
    PointPattern,
    SymbolicPretop,
    VicinityRule,
    build_symbolic,
    builtin,
    cl_theta,
    end_converges,
    ends,
    sym_adh,
    sym_compact_at,
    sym_hausdorff,
    sym_inh,
    sym_is_compact,
    sym_ray,
    sym_regularize,
    sym_restrict,
    sym_separated,
    vicinity_core,
)
from pretop.symbolic.exprs import var
from pretop.symbolic.space import box_points, truncate


def _set(x: SymbolicPretop, text: str) -> DefSet:
    return eval_set(parse_set_expr(text), x)


# -- builtins -----------------------------------------------------------------


def test_builtin_cache_and_keys():
    assert builtin("urysohn") is builtin("urysohn")
    assert builtin("discrete_ray(2)").schema.rays[1][0] == "R2"
    with pytest.raises(UnknownBuiltin):
        builtin("moebius")


def test_urysohn_shape():
    x = builtin("urysohn")
    assert x.schema.atoms == ("pinf", "minf")
    assert [e.describe() for e in ends(x)] == [
        "G(p,+)",
        "G(p,-)",
        "G(+,p)",
        "G(+,+)",
        "G(+,-)",
    ]
    # rows start at 1, columns are two-sided: a 2-window sees 2 + 2*5 points
    assert len(box_points(x, 2)) == 12


def test_truncate_window_floor():
    x = builtin("urysohn")
    with pytest.raises(WindowTooSmall):
        truncate(x, x.bound + 1)


def test_truncate_kernels_are_clipped_templates():
    # kernels evaluate the template at k=window, then clip to the box:
    # a zero-column point keeps only itself since its tails start past w
    x = builtin("urysohn")
    w = 4
    fin = truncate(x, w)
    pts = box_points(x, w)
    i = pts.index(Point.grid("G", 2, 0))
    assert fin.vicinity[i] == 1 << i
    j = pts.index(Point.grid("G", 2, 1))
    assert fin.vicinity[j] == 1 << j  # off-column points are isolated
    a = pts.index(Point.atom("pinf"))
    assert fin.names(fin.vicinity[a]) == ("pinf",)  # rows > w are outside too


# -- adherence and theta closure ------------------------------------------------


def test_adh_inh_duality_on_samples():
    x = builtin("urysohn")
    for text in ("grid(G; cols=1..)", "grid(G; cols=0) | atom(pinf)", "empty"):
        s = _set(x, text)
        assert sym_inh(x, s) == x.carrier_set - sym_adh(x, x.carrier_set - s)


def test_theta_closure_of_right_half():
    x = builtin("urysohn")
    b = _set(x, "grid(G; cols=1..)")
    assert cl_theta(x, b, 1) == _set(x, "grid(G; cols=0..) | atom(pinf)")
    assert cl_theta(x, b, 2) == _set(x, "grid(G; cols=0..) | atom(pinf) | atom(minf)")
    assert cl_theta(x, b, 3) == cl_theta(x, b, 2)  # stabilizes


def test_plain_adh_of_right_half_is_smaller():
    x = builtin("urysohn")
    b = _set(x, "grid(G; cols=1..)")
    assert sym_adh(x, b) == _set(x, "grid(G; cols=0..) | atom(pinf)")


def test_vicinity_core_of_pole():
    x = builtin("urysohn")
    assert set_literal(vicinity_core(x, Point.atom("pinf"))) == "atom(pinf)"


# -- ends ---------------------------------------------------------------------


def test_row_tails_converge_to_their_zero_point():
    x = builtin("urysohn")
    right = next(e for e in ends(x) if e.describe() == "G(p,+)")
    ans = end_converges(x, right)
    assert ans.at(3) == _set(x, "grid(G; rows=3; cols=0)")


def test_column_tails_split_by_side():
    x = builtin("urysohn")
    up = next(e for e in ends(x) if e.describe() == "G(+,p)")
    ans = end_converges(x, up)
    assert ans.at(2) == _set(x, "atom(pinf)")
    assert ans.at(-1) == _set(x, "atom(minf)")
    assert ans.at(0).is_empty()  # the zero column escapes, hence no compactness


def test_corner_ends_converge_uniformly():
    x = builtin("urysohn")
    corner = next(e for e in ends(x) if e.describe() == "G(+,+)")
    assert end_converges(x, corner).at() == _set(x, "atom(pinf)")


# -- compactness splits ----------------------------------------------------------


def test_urysohn_compactness_split():
    x = builtin("urysohn")
    v = sym_is_compact(x)
    assert not v.ok
    assert v.witness.describe() == "G(+,0)"
    assert sym_is_compact(sym_regularize(x)).ok


def test_hausdorff_lost_by_regularization():
    x = builtin("urysohn")
    assert sym_hausdorff(x).ok
    assert not sym_hausdorff(sym_regularize(x)).ok


def test_zero_column_is_compact_inside_theta_but_not_alone():
    x = builtin("urysohn")
    a = _set(x, "grid(G; cols=0) | atom(pinf)")
    f = DefFilterBase.principal(a)
    assert sym_compact_at(sym_regularize(x), f, a).ok
    assert not sym_compact_at(x, f, a).ok
    sub = sym_regularize(sym_restrict(x, a))
    v = sym_is_compact(sub)
    assert not v.ok and v.witness.describe() == "G(+,0)"


def test_discrete_ray_not_compact_until_extended():
    r = builtin("discrete_ray(1)")
    v = sym_is_compact(r)
    assert not v.ok and v.witness.describe() == "R1(+)"
    assert sym_hausdorff(r).ok


def test_separation_parameters():
    x = builtin("urysohn")
    assert sym_separated(x, _set(x, "atom(pinf)"), _set(x, "atom(minf)")) == 0
    # the zero column reaches both poles at every parameter
    assert sym_separated(x, _set(x, "grid(G; cols=0)"), _set(x, "atom(pinf) | atom(minf)")) is None


# -- engine versus brute force ---------------------------------------------------


@pytest.mark.parametrize(
    "key,literal",
    [
        ("urysohn", "grid(G; cols=1..)"),
        ("urysohn", "grid(G; cols=0)"),
        ("urysohn", "grid(G; rows=1..2) | atom(minf)"),
        ("half_grid", "grid(G; cols=0)"),
        ("discrete_ray(2)", "ray(R1; 3..) | ray(R2; 0..1)"),
    ],
)
def test_sym_adh_matches_snapshot(key, literal):
    x = builtin(key)
    s = _set(x, literal)
    w = 2 * x.bound + 8
    fin = truncate(x, w)
    pts = box_points(x, w)
    mask = sum(1 << i for i, p in enumerate(pts) if p in s)
    adh = sym_adh(x, s)
    box = _box(x, w)
    for i, p in enumerate(pts):
        if not x.vicinity(p, w).subset_of(box):
            continue  # kernel clipped by the window; snapshot lies here
        assert bool(fin.adh(mask) >> i & 1) == (p in adh), p.describe()


def _box(x: SymbolicPretop, w: int) -> DefSet:
    schema = x.schema
    d = DefSet.build(
        schema,
        atoms=schema.atoms,
        ray_parts={n: IntervalSet.from_pairs(ax, [(None, w)]) for n, ax in schema.rays},
        grid_rects={
            n: [
                (
                    IntervalSet.from_pairs(rax, [(-w, w)]),
                    IntervalSet.from_pairs(cax, [(-w, w)]),
                )
            ]
            for n, rax, cax in schema.grids
        },
    )
    return d & x.carrier_set


# -- custom spaces and validation ---------------------------------------------------


def _ray_schema() -> GroundSchema:
    return GroundSchema(rays=(("R", AxisDomain("nat", 0)),))


def test_build_symbolic_accepts_tail_space():
    schema = _ray_schema()
    rules = (
        VicinityRule(
            PointPattern.ray("R"),
            sym_ray(schema, "R", (var("n"), INF)),
        ),
    )
    x = build_symbolic(schema, rules, label="tails")
    assert sym_adh(x, _set(x, "ray(R; 5)")) == _set(x, "ray(R; ..5)")


def test_build_symbolic_rejects_gap():
    schema = _ray_schema()
    rules = (
        VicinityRule(
            PointPattern.ray("R", IntervalSet.from_pairs(AxisDomain("nat", 0), [(1, None)])),
            sym_ray(schema, "R", (var("n"), var("n"))),
        ),
    )
    with pytest.raises(PatternGap):
        build_symbolic(schema, rules)


def test_build_symbolic_rejects_overlap():
    schema = _ray_schema()
    axis = AxisDomain("nat", 0)
    rules = (
        VicinityRule(
            PointPattern.ray("R"),
            sym_ray(schema, "R", (var("n"), var("n"))),
        ),
        VicinityRule(
            PointPattern.ray("R", IntervalSet.from_pairs(axis, [(2, 4)])),
            sym_ray(schema, "R", (var("n"), var("n"))),
        ),
    )
    with pytest.raises(PatternOverlap):
        build_symbolic(schema, rules)


def test_build_symbolic_rejects_missing_self():
    schema = _ray_schema()
    rules = (
        VicinityRule(
            PointPattern.ray("R"),
            sym_ray(schema, "R", (var("n") + 1, INF)),
        ),
    )
    with pytest.raises(SelfMembershipViolation):
        build_symbolic(schema, rules)


def test_build_symbolic_rejects_growing_template():
    from pretop.errors import NonMonotoneRule

    schema = _ray_schema()
    rules = (
        VicinityRule(
            PointPattern.ray("R"),
            sym_ray(schema, "R", (var("n"), var("n")), (0, var("k"))),
        ),
    )
    with pytest.raises(NonMonotoneRule):
        build_symbolic(schema, rules)
