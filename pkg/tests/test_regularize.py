"""Regularization and towers.  The tower-level oracle enumerates members
from the definition (keep a member when its inherence is again a member)
and the closed-form kernels must match it on every space and kernel."""

import pytest

from pretop.finite import (
    PrincipalFilter,
    enumerate_pretops,
    enumerate_topologies,
    topology_from_pretop,
    validate_space,
)
from pretop.regularize import (
    PHC_METHODS,
    adh_cover_subfamily,
    filter_tower,
    hset_check,
    is_quasi_phc,
    partial_regularization,
    phc_report,
    theta_of_topology,
    tower_lemmas_check,
    tower_level_members,
)


def test_partial_regularization_q3(q3):
    reg = partial_regularization(q3)
    assert reg.names(reg.vicinity[0]) == ("1", "2")
    assert reg.names(reg.vicinity[1]) == ("1", "2", "3")
    assert reg.names(reg.vicinity[2]) == ("2", "3")


def test_partial_regularization_p3(p3):
    reg = partial_regularization(p3)
    assert all(m == reg.full for m in reg.vicinity)


def test_regularization_coarsens():
    from pretop.finite import coarser_leq

    for sp in enumerate_pretops(3):
        assert coarser_leq(partial_regularization(sp), sp).ok


def test_tower_q3(q3):
    f = PrincipalFilter(q3.mask(["1"]))
    tower = filter_tower(q3, f)
    assert [q3.names(k) for k in tower.kernels] == [("1",), ("1", "2"), ("1", "2", "3")]
    assert tower.stabilizes_at == 2
    assert not tower.is_open
    assert not tower.is_inherent  # inh {1} is empty


def test_tower_against_member_enumeration():
    for sp in enumerate_pretops(3):
        for k in sp.kernels():
            tower = filter_tower(sp, PrincipalFilter(k))
            for level in range(4):
                members = tower_level_members(sp, PrincipalFilter(k), level)
                expected = {m for m in sp.subsets() if tower.level(level) & ~m == 0}
                assert members == expected, (sp.vicinity, k, level)


def test_open_filter_fixed_by_tower(p3):
    # kernel {b} is pretopologically open in p3
    f = PrincipalFilter(p3.mask(["b"]))
    tower = filter_tower(p3, f)
    assert tower.is_open and tower.limit == p3.mask(["b"])


def test_tower_lemmas_exhaustive():
    for sp in enumerate_pretops(3):
        for k in sp.kernels():
            rep = tower_lemmas_check(sp, PrincipalFilter(k))
            assert rep.level_identity, (sp.vicinity, k)
            assert rep.open_identity, (sp.vicinity, k)


def test_tower_limit_is_largest_open_refinement():
    # the stabilized kernel is the smallest open kernel above the filter;
    # its filter is the largest pretopologically open filter inside it
    for sp in enumerate_pretops(3):
        for k in sp.kernels():
            lim = filter_tower(sp, PrincipalFilter(k)).limit
            assert filter_tower(sp, PrincipalFilter(lim)).is_open
            assert k & ~lim == 0
            for other in sp.kernels():
                if k & ~other == 0 and filter_tower(sp, PrincipalFilter(other)).is_open:
                    assert lim & ~other == 0


# -- theta of a topology -------------------------------------------------------


def test_theta_p3(p3):
    forms = theta_of_topology(topology_from_pretop(p3))
    assert forms.plain == p3
    assert forms.theta.names(forms.theta.vicinity[0]) == ("a", "b", "c")


def test_theta_indiscrete():
    topo = topology_from_pretop(
        validate_space(("a", "b"), {"a": ["a", "b"], "b": ["a", "b"]})
    )
    forms = theta_of_topology(topo)
    assert forms.theta == forms.plain


def test_theta_coarsens_exhaustive():
    from pretop.finite import coarser_leq

    for topo in enumerate_topologies(3):
        forms = theta_of_topology(topo)
        assert coarser_leq(forms.theta, forms.plain).ok


# -- quasi-PHC ---------------------------------------------------------------------


def test_quasi_phc_methods_agree_exhaustive():
    for sp in enumerate_pretops(3):
        verdicts = [is_quasi_phc(sp, m).ok for m in PHC_METHODS]
        assert all(verdicts) or not any(verdicts)
        assert all(verdicts)  # finite spaces are compact


def test_phc_report(q3, d2):
    rep = phc_report(q3)
    assert rep.quasi and not rep.hausdorff and not rep.phc
    rep = phc_report(d2)
    assert rep.quasi and rep.hausdorff and rep.phc


def test_adh_cover_subfamily(q3):
    fam = [q3.mask(["1", "2"]), q3.mask(["2", "3"]), q3.mask(["3"])]
    sub = adh_cover_subfamily(q3, fam)
    assert sub == (q3.mask(["2", "3"]),)  # adh {2,3} is everything
    assert adh_cover_subfamily(q3, [q3.mask(["1"])]) is None  # adh {1} = {1}


# -- H-set checks -------------------------------------------------------------------


def test_hset_p3(p3):
    topo = topology_from_pretop(p3)
    at = p3.mask(["c"])
    for method in ("open-filter", "open-ultrafilter", "theta-adh"):
        assert hset_check(topo, at, method).ok
    # the unique minimal open {b} misses {c}, so the ultrafilter clause is vacuous
    assert topo.atoms() == [p3.mask(["b"])]


def test_hset_methods_agree_exhaustive():
    for topo in enumerate_topologies(3):
        for at in range(1, topo.full + 1):
            verdicts = [
                hset_check(topo, at, m).ok
                for m in ("open-filter", "open-ultrafilter", "theta-adh")
            ]
            assert verdicts == [True, True, True]


def test_hset_empty_rejected(p3):
    from pretop.errors import EmptySubspace

    with pytest.raises(EmptySubspace):
        hset_check(topology_from_pretop(p3), 0)
