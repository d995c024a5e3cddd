"""Finite engine.  Expected values were computed by hand from the
vicinity tables (adh A = points whose kernel meets A, inh its dual) and
frozen here; the equivalence properties are checked exhaustively on all
64 three-point spaces."""

import itertools

import pytest

from pretop.errors import (
    AxiomViolation,
    EmptyKernel,
    EmptySubspace,
    InvalidTopology,
    PointSetMismatch,
    SizeLimit,
)
from pretop.finite import (
    FinitePretop,
    FiniteTopology,
    PrincipalFilter,
    compact_at,
    coarser_leq,
    count_hausdorff,
    enumerate_pretops,
    enumerate_topologies,
    is_cover,
    is_cover_compact,
    is_hausdorff,
    is_regular,
    is_topological,
    topology_from_pretop,
    validate_space,
)


def masked(space, *names):
    return space.mask(names)


# -- construction -----------------------------------------------------------


def test_axiom_violation():
    with pytest.raises(AxiomViolation):
        validate_space(("1", "2"), {"1": ["2"], "2": ["2"]})


def test_empty_kernel():
    with pytest.raises(EmptyKernel):
        PrincipalFilter(0)


def test_unknown_point_name(q3):
    with pytest.raises(PointSetMismatch):
        q3.mask(["4"])


# -- adherence / inherence, frozen values -----------------------------------


def test_adh_q3(q3):
    assert q3.names(q3.adh(masked(q3, "3"))) == ("2", "3")
    assert q3.names(q3.adh(q3.adh(masked(q3, "3")))) == ("1", "2", "3")


def test_inh_q3(q3):
    assert q3.names(q3.inh(masked(q3, "1", "2"))) == ("1",)
    assert q3.names(q3.inh(masked(q3, "2", "3"))) == ("2", "3")


def test_adh_filter(q3, p3):
    assert q3.names(q3.adh_filter(PrincipalFilter(masked(q3, "2")))) == ("1", "2")
    assert p3.names(p3.adh_filter(PrincipalFilter(masked(p3, "b")))) == ("a", "b", "c")


def test_adh_empty_is_empty(q3):
    assert q3.adh(0) == 0


def test_converges(q3):
    f = PrincipalFilter(masked(q3, "2"))
    assert q3.converges(f, q3.index("1"))
    assert not q3.converges(f, q3.index("3"))


def exhaustive_spaces(n=3):
    return list(enumerate_pretops(n))


def test_adh_axioms_exhaustive():
    for sp in exhaustive_spaces():
        for a in sp.subsets():
            adh = sp.adh(a)
            assert adh & a == a  # expansive
            for b in sp.subsets():
                assert sp.adh(a | b) == adh | sp.adh(b)  # additive


def test_adh_inh_duality_exhaustive():
    for sp in exhaustive_spaces():
        for a in sp.subsets():
            assert sp.inh(a) == sp.full & ~sp.adh(sp.full & ~a)


# -- separation and classification --------------------------------------------


def test_hausdorff(d2, q3):
    assert is_hausdorff(d2).ok
    v = is_hausdorff(q3)
    assert not v.ok and v.witness == ("1", "2")


def test_hausdorff_collapse_count():
    # a Hausdorff finite pretopology is discrete, so exactly one per size
    assert count_hausdorff(2) == 1
    assert count_hausdorff(3) == 1


def test_enumeration_counts():
    assert len(exhaustive_spaces(2)) == 4
    assert len(exhaustive_spaces(3)) == 64
    with pytest.raises(SizeLimit):
        list(enumerate_pretops(6))


def test_enumeration_deterministic():
    a = [sp.vicinity for sp in enumerate_pretops(3)]
    b = [sp.vicinity for sp in enumerate_pretops(3)]
    assert a == b and a[0] == (1, 2, 4)


def test_topological(p3, q3):
    assert is_topological(p3).ok
    v = is_topological(q3)
    assert not v.ok and v.witness == ("3",)


def test_regular(d2, q3, p3):
    assert is_regular(d2).ok
    assert is_regular(q3).witness == "2"
    assert is_regular(p3).witness == "a"


def test_coarser_leq(q3):
    discrete = validate_space(("1", "2", "3"), {"1": ["1"], "2": ["2"], "3": ["3"]})
    assert coarser_leq(q3, discrete).ok  # discrete is finest
    assert not coarser_leq(discrete, q3).ok
    with pytest.raises(PointSetMismatch):
        coarser_leq(q3, validate_space(("a",), {"a": ["a"]}))


# -- covers and compactness ------------------------------------------------------


def test_is_cover(q3):
    fam = [masked(q3, "1", "2"), masked(q3, "2", "3")]
    assert is_cover(q3, fam).ok
    v = is_cover(q3, [masked(q3, "1", "2")])
    assert not v.ok and v.witness == "2"  # M(2)={2,3} has no superset in the family


def test_compact_at_methods_agree_exhaustive():
    for sp in exhaustive_spaces():
        for k in sp.kernels():
            f = PrincipalFilter(k)
            for a in sp.kernels():
                assert (
                    compact_at(sp, f, a, "filter").ok
                    == compact_at(sp, f, a, "cover").ok
                )


def test_compact_at_example(q3):
    f = PrincipalFilter(masked(q3, "3"))
    assert compact_at(q3, f, masked(q3, "2", "3"), "filter").ok
    v = compact_at(q3, f, masked(q3, "1"), "filter")
    assert not v.ok and v.witness == ("3",)


def test_compact_at_empty_set_rejected(q3):
    with pytest.raises(EmptySubspace):
        compact_at(q3, PrincipalFilter(1), 0)


def test_cover_compact_methods_agree_exhaustive():
    methods = ("cover", "filter-refines", "vicinity-separation")
    for sp in exhaustive_spaces():
        for a in sp.kernels():
            verdicts = [is_cover_compact(sp, a, m).ok for m in methods]
            assert verdicts[0] == verdicts[1] == verdicts[2]
            assert verdicts[0]  # every subset of a finite space is cover-compact


# -- restriction -------------------------------------------------------------------


def test_restrict(q3):
    sub = q3.restrict(masked(q3, "1", "2"))
    assert sub.points == ("1", "2")
    assert sub.vicinity == (sub.mask(["1", "2"]), sub.mask(["2"]))
    with pytest.raises(EmptySubspace):
        q3.restrict(0)


def test_restrict_adh_consistent(q3):
    sub = q3.restrict(masked(q3, "2", "3"))
    assert sub.names(sub.adh(sub.mask(["3"]))) == ("2", "3")


# -- topologies ----------------------------------------------------------------------


def test_topology_from_p3(p3):
    topo = topology_from_pretop(p3)
    opens = {p3.names(u) for u in topo.opens}
    assert opens == {(), ("b",), ("a", "b"), ("b", "c"), ("a", "b", "c")}
    assert topo.to_pretop() == p3


def test_topology_from_q3_rejected(q3):
    with pytest.raises(InvalidTopology):
        topology_from_pretop(q3)


def test_invalid_topology():
    with pytest.raises(InvalidTopology):
        FiniteTopology(("a", "b"), frozenset({0b01, 0b11})).validate()
    with pytest.raises(InvalidTopology):
        FiniteTopology(("a", "b", "c"), frozenset({0, 0b001, 0b010, 0b111})).validate()


def test_topology_count_three_points():
    # labeled topologies on 3 points
    assert sum(1 for _ in enumerate_topologies(3)) == 29


def test_topology_atoms(p3):
    topo = topology_from_pretop(p3)
    assert [topo.points[i] for u in topo.atoms() for i in range(3) if u >> i & 1] == ["b"]


def test_closure(p3):
    topo = topology_from_pretop(p3)
    assert p3.names(topo.closure(p3.mask(["a", "b"]))) == ("a", "b", "c")


# -- filter-form compactness matches cover form on every space+filter pair ----------


def test_compact_at_two_point_spaces():
    for sp in enumerate_pretops(2):
        for k in sp.kernels():
            for a in sp.kernels():
                f = PrincipalFilter(k)
                assert compact_at(sp, f, a, "filter").ok == compact_at(sp, f, a, "cover").ok


def test_choice_cover_reduction_is_faithful(q3):
    # a failing choice cover must really be a cover
    v = compact_at(q3, PrincipalFilter(masked(q3, "3")), masked(q3, "1"), "cover")
    assert not v.ok
    fam = [q3.mask(names) for names in v.witness]
    assert is_cover(q3, fam, at=masked(q3, "1")).ok
