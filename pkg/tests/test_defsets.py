"""Definable sets: the oracle samples concrete points (rectangle corners
plus a fringe, and far representatives for infinite directions) and
compares set algebra pointwise."""

from hypothesis import given, settings, strategies as st
import pytest

from pretop.defsets import DefSet, GroundSchema, Point
from pretop.errors import SchemaMismatch, UnknownPoint
from pretop.intervals import INTEGERS, NATURALS0, NATURALS1, IntervalSet

SCHEMA = GroundSchema(
    atoms=("pinf", "minf"),
    rays=(("R", NATURALS0),),
    grids=(("G", NATURALS1, INTEGERS),),
)


def ray(lo, hi=None):
    return IntervalSet.from_pairs(NATURALS0, [(lo, hi)])


def rows(lo, hi=None):
    return IntervalSet.from_pairs(NATURALS1, [(lo, hi)])


def cols(lo, hi):
    return IntervalSet.from_pairs(INTEGERS, [(lo, hi)])


@st.composite
def def_sets(draw):
    atoms = draw(st.sets(st.sampled_from(["pinf", "minf"])))
    ray_pairs = []
    for _ in range(draw(st.integers(0, 2))):
        lo = draw(st.integers(0, 12))
        hi = draw(st.one_of(st.none(), st.integers(lo, 14)))
        ray_pairs.append((lo, hi))
    rects = []
    for _ in range(draw(st.integers(0, 3))):
        rlo = draw(st.integers(1, 8))
        rhi = draw(st.one_of(st.none(), st.integers(rlo, 9)))
        clo = draw(st.one_of(st.none(), st.integers(-8, 8)))
        chi = draw(st.one_of(st.none(), st.integers(clo if clo is not None else -8, 9)))
        rects.append(
            (
                IntervalSet.from_pairs(NATURALS1, [(rlo, rhi)]),
                IntervalSet.from_pairs(INTEGERS, [(clo, chi)]),
            )
        )
    return DefSet.build(
        SCHEMA,
        atoms=atoms,
        ray_parts={"R": IntervalSet.from_pairs(NATURALS0, ray_pairs)},
        grid_rects={"G": rects},
    )


def probe_points(*sets):
    pts = set()
    for s in sets:
        pts.update(s.iter_sample_points())
        pts.update((~s).iter_sample_points())
    return pts


# -- construction -------------------------------------------------------------


def test_duplicate_strand_names_rejected():
    with pytest.raises(SchemaMismatch):
        GroundSchema(atoms=("a",), rays=(("a", NATURALS0),))


def test_unknown_atom_rejected():
    with pytest.raises(UnknownPoint):
        DefSet.build(SCHEMA, atoms=["nope"])


def test_unknown_point_rejected():
    with pytest.raises(UnknownPoint):
        Point.grid("X", 1, 1).validate(SCHEMA)
    with pytest.raises(UnknownPoint):
        Point.grid("G", 0, 1).validate(SCHEMA)  # row 0 below the 1-based axis


def test_membership():
    s = DefSet.build(
        SCHEMA,
        atoms=["pinf"],
        grid_rects={"G": [(rows(2, 4), cols(0, 0))]},
    )
    assert Point.atom("pinf") in s
    assert Point.atom("minf") not in s
    assert Point.grid("G", 3, 0) in s
    assert Point.grid("G", 3, 1) not in s
    assert Point.ray("R", 0) not in s


# -- canonical grid form -------------------------------------------------------


def test_overlapping_rectangles_merge():
    a = DefSet.build(SCHEMA, grid_rects={"G": [(rows(1, 5), cols(0, 3)), (rows(3, 8), cols(0, 3))]})
    b = DefSet.build(SCHEMA, grid_rects={"G": [(rows(1, 8), cols(0, 3))]})
    assert a == b
    assert len(a.grid_part("G")) == 1


def test_row_groups_disjoint_and_distinct():
    s = DefSet.build(
        SCHEMA,
        grid_rects={"G": [(rows(1, 6), cols(0, 0)), (rows(4, None), cols(2, 2))]},
    )
    groups = s.grid_part("G")
    seen_cols = set()
    for i, (r1, c1) in enumerate(groups):
        assert c1 not in seen_cols
        seen_cols.add(c1)
        for r2, _ in groups[i + 1:]:
            assert not r1.meets(r2)
    # rows 4..6 carry both columns
    assert Point.grid("G", 5, 0) in s and Point.grid("G", 5, 2) in s
    assert Point.grid("G", 7, 0) not in s and Point.grid("G", 7, 2) in s


def test_empty_rectangles_dropped():
    s = DefSet.build(SCHEMA, grid_rects={"G": [(IntervalSet.empty(NATURALS1), cols(0, 1))]})
    assert s.is_empty()


@given(def_sets(), def_sets())
@settings(max_examples=60)
def test_canonical_equality_is_semantic(a, b):
    same_probe = all((p in a) == (p in b) for p in probe_points(a, b))
    assert (a == b) == same_probe


# -- algebra -------------------------------------------------------------------


@given(def_sets(), def_sets())
@settings(max_examples=60)
def test_boolean_ops_pointwise(a, b):
    union, inter, diff, comp = a | b, a & b, a - b, ~a
    for p in probe_points(a, b):
        ina, inb = p in a, p in b
        assert (p in union) == (ina or inb)
        assert (p in inter) == (ina and inb)
        assert (p in diff) == (ina and not inb)
        assert (p in comp) == (not ina)


@given(def_sets())
@settings(max_examples=60)
def test_complement_laws(a):
    assert ~~a == a
    assert (a | ~a) == DefSet.full(SCHEMA)
    assert (a & ~a).is_empty()


def test_complement_rectangle_identity():
    # (S x T)^c = S^c x full | S x T^c, here checked through the algebra
    s = DefSet.build(SCHEMA, grid_rects={"G": [(rows(2, 5), cols(-1, 3))]})
    comp = ~s
    assert Point.grid("G", 1, 0) in comp
    assert Point.grid("G", 3, 4) in comp
    assert Point.grid("G", 3, 2) not in comp
    assert Point.atom("pinf") in comp


def test_schema_mismatch():
    other = GroundSchema(atoms=("x",))
    with pytest.raises(SchemaMismatch):
        DefSet.full(SCHEMA) & DefSet.full(other)


# -- queries ---------------------------------------------------------------------


def test_cardinality_finite_grid():
    s = DefSet.build(SCHEMA, grid_rects={"G": [(rows(1, 4), cols(-2, 2))]})
    assert s.is_finite() and s.cardinality() == 20


def test_cardinality_with_all_strands():
    s = DefSet.build(
        SCHEMA,
        atoms=["pinf"],
        ray_parts={"R": ray(0, 3)},
        grid_rects={"G": [(rows(1, 2), cols(5, 6))]},
    )
    assert s.cardinality() == 1 + 4 + 4


def test_infinite_not_finite():
    assert not DefSet.build(SCHEMA, ray_parts={"R": ray(5, None)}).is_finite()


def test_meets():
    a = DefSet.build(SCHEMA, grid_rects={"G": [(rows(1, None), cols(1, None))]})
    b = DefSet.build(SCHEMA, grid_rects={"G": [(rows(3, 3), cols(-5, 1))]})
    c = DefSet.build(SCHEMA, grid_rects={"G": [(rows(3, 3), cols(-5, -1))]})
    assert a.meets(b) and not a.meets(c)


def test_describe_mentions_each_strand():
    s = DefSet.build(
        SCHEMA,
        atoms=["minf"],
        ray_parts={"R": ray(2, None)},
        grid_rects={"G": [(rows(1, None), cols(0, 0))]},
    )
    d = s.describe()
    assert "atom(minf)" in d and "ray(R; 2..)" in d and "grid(G;" in d
