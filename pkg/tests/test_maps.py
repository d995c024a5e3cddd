"""Map analysis: filters across maps, continuity, perfect maps, f#.

Frozen expectations are derived by hand from the vicinity tables in
conftest; the agreement batteries let the independent routes check one
another.
"""

import pytest
from hypothesis import given, strategies as st

from pretop.errors import EmptyPreimage, PointSetMismatch
from pretop.finite import (
    FinitePretop,
    FiniteTopology,
    PrincipalFilter,
    compact_at,
    enumerate_pretops,
)
from pretop.maps import (
    CONTINUITY_METHODS,
    PERFECT_METHODS,
    SpaceMap,
    compose,
    enumerate_maps,
    f_sharp,
    fiber_inside,
    image_filter,
    is_continuous,
    is_perfect,
    is_strongly_irreducible,
    is_theta_continuous,
    is_w_theta_continuous,
    perfect_conditions,
    preimage_filter,
)
from pretop.regularize import partial_regularization

D3 = FinitePretop(("1", "2", "3"), (1, 2, 4))
P1 = FinitePretop(("p",), (1,))


@st.composite
def spaces3(draw):
    extras = draw(st.tuples(st.integers(0, 7), st.integers(0, 7), st.integers(0, 7)))
    return FinitePretop(("1", "2", "3"), tuple((1 << i) | e for i, e in enumerate(extras)))


graphs3 = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))


# -- construction ------------------------------------------------------------


def test_from_table_requires_every_point(d2, s2):
    with pytest.raises(PointSetMismatch):
        SpaceMap.from_table(d2, s2, {"1": "a"})
    with pytest.raises(PointSetMismatch):
        SpaceMap.from_table(d2, s2, {"1": "a", "2": "zz"})
    with pytest.raises(PointSetMismatch):
        SpaceMap(d2, s2, (0, 5))


def test_constructors_and_apply(q3, d2, s2):
    ident = SpaceMap.identity(q3)
    assert ident("2") == "2"
    const = SpaceMap.constant(q3, P1, "p")
    assert const("3") == "p"
    f = SpaceMap.from_table(d2, s2, {"1": "a", "2": "b"})
    assert f("1") == "a" and f("2") == "b"
    assert f.is_surjective()
    assert not SpaceMap.constant(d2, s2, "a").is_surjective()


# -- filters across a map ------------------------------------------------------


def test_image_and_preimage_filters(q3, d2, s2):
    const = SpaceMap.constant(q3, P1, "p")
    assert image_filter(const, PrincipalFilter(q3.mask(["1"]))).kernel == P1.mask(["p"])
    f = SpaceMap.from_table(d2, s2, {"1": "a", "2": "b"})
    assert preimage_filter(f, PrincipalFilter(s2.mask(["a"]))).kernel == d2.mask(["1"])
    ident = SpaceMap.identity(q3)
    for k in q3.kernels():
        assert image_filter(ident, PrincipalFilter(k)).kernel == k


def test_preimage_off_the_range_raises(d2, s2):
    g = SpaceMap.constant(d2, s2, "a")
    with pytest.raises(EmptyPreimage):
        preimage_filter(g, PrincipalFilter(s2.mask(["b"])))


# -- continuity ------------------------------------------------------------------


def test_identity_is_continuous_every_route(q3):
    ident = SpaceMap.identity(q3)
    for method in CONTINUITY_METHODS:
        assert is_continuous(ident, method).ok


def test_identity_from_regularization_breaks(q3):
    # M_r(2) = X, so no rpi-vicinity of 2 maps into the pi-vicinity {2,3}
    f = SpaceMap(partial_regularization(q3), q3, (0, 1, 2))
    v = is_continuous(f, "vicinity")
    assert not v.ok
    assert v.witness == ("2", ("2", "3"))
    for method in CONTINUITY_METHODS:
        assert not is_continuous(f, method).ok


def test_discrete_source_always_continuous(q3, s2):
    for target in (q3, s2):
        src = D3 if target is q3 else FinitePretop(("1", "2"), (1, 2))
        for f in enumerate_maps(src, target):
            assert is_continuous(f, "limit").ok


def test_coarsening_identity_is_continuous(q3):
    f = SpaceMap(q3, partial_regularization(q3), (0, 1, 2))
    assert is_continuous(f, "adh-set").ok


def test_five_routes_agree_exhaustively_small():
    ones = list(enumerate_pretops(1))
    twos = list(enumerate_pretops(2))
    for src in ones + twos:
        for tgt in ones + twos:
            for f in enumerate_maps(src, tgt):
                verdicts = [is_continuous(f, m).ok for m in CONTINUITY_METHODS]
                assert len(set(verdicts)) == 1


@given(spaces3(), spaces3(), graphs3)
def test_five_routes_agree_sampled(src, tgt, graph):
    f = SpaceMap(src, tgt, graph)
    verdicts = [is_continuous(f, m).ok for m in CONTINUITY_METHODS]
    assert len(set(verdicts)) == 1


# -- theta and weak-theta continuity ---------------------------------------------


def test_theta_between_discrete_topologies():
    disc = FiniteTopology(("1", "2"), frozenset([0, 1, 2, 3]))
    for table in ({"1": "1", "2": "2"}, {"1": "2", "2": "2"}):
        assert is_theta_continuous(disc, disc, table).ok


def test_theta_into_discrete_breaks(p3_topology):
    # theta kernels of the source are all of X, a discrete target refuses
    disc = FiniteTopology(("a", "b", "c"), frozenset(range(8)))
    ident = {"a": "a", "b": "b", "c": "c"}
    assert not is_theta_continuous(p3_topology, disc, ident).ok
    assert is_theta_continuous(disc, p3_topology, ident).ok


def test_w_theta_identity(q3):
    assert is_w_theta_continuous(SpaceMap.identity(q3)).ok
    f = SpaceMap(partial_regularization(q3), q3, (0, 1, 2))
    assert not is_continuous(f, "vicinity").ok  # the plain direction fails
    assert is_w_theta_continuous(f).ok  # source and regularized target coincide


def test_continuous_implies_w_theta_exhaustive():
    twos = list(enumerate_pretops(2))
    for src in twos:
        for tgt in twos:
            for f in enumerate_maps(src, tgt):
                if is_continuous(f, "vicinity").ok:
                    assert is_w_theta_continuous(f).ok


@given(spaces3(), spaces3(), graphs3)
def test_continuous_implies_w_theta_sampled(src, tgt, graph):
    f = SpaceMap(src, tgt, graph)
    if is_continuous(f, "vicinity").ok:
        assert is_w_theta_continuous(f).ok


# -- perfect maps -----------------------------------------------------------------


def test_bijection_to_coarser_not_perfect(d2, s2):
    f = SpaceMap.from_table(d2, s2, {"1": "a", "2": "b"})
    assert is_continuous(f, "vicinity").ok
    for method in PERFECT_METHODS:
        assert not is_perfect(f, method).ok
    # the breaking filter: up{a} converges to b, preimage up{1}, fiber {2}
    assert not compact_at(d2, PrincipalFilter(d2.mask(["1"])), d2.mask(["2"]), "filter").ok


def test_constant_map_is_perfect(q3):
    const = SpaceMap.constant(q3, P1, "p")
    for method in PERFECT_METHODS:
        assert is_perfect(const, method).ok


def test_discrete_bijection_is_perfect(d2):
    f = SpaceMap.identity(d2)
    for method in PERFECT_METHODS:
        assert is_perfect(f, method).ok


def test_perfect_conditions_reported_separately(d2, s2):
    rep = perfect_conditions(SpaceMap.from_table(d2, s2, {"1": "a", "2": "b"}))
    # adh {a} = {a,b} in the target outgrows the image of adh {1} = {1}
    assert not rep.adh_onto.ok
    assert rep.adh_onto.witness == (("1",), "b")
    # finite fibers are always cover-compact: a cover holds a vicinity
    # superset per point, and their union's inherence absorbs the fiber
    assert rep.fibers_cover_compact.ok
    assert not rep.ok


def test_definition_vs_adh_inequality_exhaustive_small():
    ones = list(enumerate_pretops(1))
    twos = list(enumerate_pretops(2))
    for src in ones + twos:
        for tgt in ones + twos:
            for f in enumerate_maps(src, tgt):
                a = is_perfect(f, "definition").ok
                b = is_perfect(f, "adh-inequality").ok
                assert a == b
                if is_continuous(f, "vicinity").ok:
                    assert a == is_perfect(f, "a-and-b").ok


@given(spaces3(), spaces3(), graphs3)
def test_perfect_routes_agree_sampled(src, tgt, graph):
    f = SpaceMap(src, tgt, graph)
    a = is_perfect(f, "definition").ok
    assert a == is_perfect(f, "adh-inequality").ok
    if is_continuous(f, "vicinity").ok:
        assert a == is_perfect(f, "a-and-b").ok


# -- f# ---------------------------------------------------------------------------


def fibered_map():
    src = D3
    tgt = FinitePretop(("p", "q"), (1, 2))
    return SpaceMap.from_table(src, tgt, {"1": "p", "2": "p", "3": "q"})


def test_f_sharp_values():
    f = fibered_map()
    assert f.target.names(f_sharp(f, f.source.mask(["1", "2"]))) == ("p",)
    assert f_sharp(f, f.source.full) == f.target.full
    assert f_sharp(f, f.source.mask(["1"])) == 0


def test_f_sharp_adjunction_exhaustive():
    f = fibered_map()
    for a in f.source.subsets():
        assert f.preimage_mask(f_sharp(f, a)) & ~a == 0
    for b in f.target.subsets():
        assert b & ~f_sharp(f, f.preimage_mask(b)) == 0


@given(spaces3(), spaces3(), graphs3, st.integers(0, 7), st.integers(0, 7))
def test_f_sharp_adjunction_sampled(src, tgt, graph, a, b):
    f = SpaceMap(src, tgt, graph)
    assert f.preimage_mask(f_sharp(f, a)) & ~a == 0
    assert b & ~f_sharp(f, f.preimage_mask(b)) == 0


# -- strong irreducibility ----------------------------------------------------------


def test_identity_strongly_irreducible(q3):
    assert is_strongly_irreducible(SpaceMap.identity(q3)).ok


def test_two_fibers_from_discrete_not_irreducible():
    f = fibered_map()
    v = is_strongly_irreducible(f)
    assert not v.ok
    u_names, v_names = v.witness
    meet = f.source.mask(u_names) & f.source.mask(v_names)
    assert meet and not fiber_inside(f, meet)
    # another violating pair: {1,2} and {2,3} overlap in {2}, no fiber fits
    assert not fiber_inside(f, f.source.mask(["2"]))


def test_constant_map_not_irreducible(q3):
    const = SpaceMap.constant(q3, P1, "p")
    v = is_strongly_irreducible(const)
    assert not v.ok
    # the pair {1,2}, {2,3} has inherences {1} and {2,3}, meets in {2}
    u, w = q3.mask(["1", "2"]), q3.mask(["2", "3"])
    assert q3.inh(u) and q3.inh(w)
    assert not fiber_inside(const, u & w)


# -- composition --------------------------------------------------------------------


def test_compose_table_and_mismatch(q3, d2):
    f = SpaceMap.constant(d2, q3, "2")
    g = SpaceMap.constant(q3, P1, "p")
    assert compose(g, f).graph == (0, 0)
    with pytest.raises(PointSetMismatch):
        compose(f, f)


@given(spaces3(), spaces3(), spaces3(), graphs3, graphs3)
def test_composition_preserves_continuity(sp1, sp2, sp3, g1, g2):
    f = SpaceMap(sp1, sp2, g1)
    g = SpaceMap(sp2, sp3, g2)
    if is_continuous(f, "vicinity").ok and is_continuous(g, "vicinity").ok:
        assert is_continuous(compose(g, f), "vicinity").ok
