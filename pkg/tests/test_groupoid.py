import pytest

from pathgroupoids import groupoid as gp
from pathgroupoids import pspace as ps
from pathgroupoids.catalog import grid, lambda_tg, squares_graph
from pathgroupoids.degree import Degree

B22 = Degree((2, 2))


@pytest.fixture(scope="module")
def tg():
    return lambda_tg(2)


@pytest.fixture(scope="module")
def u_filter(tg):
    return ps.make_filter(tg, [tg.unit(tg.vertex("u"))])


def test_make_element_example(tg, u_filter):
    g = gp.make_element(tg.morphism("beta[1]"), tg.morphism("alpha[1]"), u_filter)
    assert g.q == (1, -1)
    assert {str(m) for m in g.x.elements} == {"t", "beta[1]"}
    assert {str(m) for m in g.y.elements} == {"w", "alpha[1]"}


def test_make_element_unit(tg, u_filter):
    g = gp.make_element(tg.unit(u_filter.range), tg.unit(u_filter.range), u_filter)
    assert g == gp.unit_element(u_filter) and g.is_unit()


def test_make_element_rejects_ps_escape(tg):
    w = ps.make_filter(tg, [tg.unit(tg.vertex("w"))])
    lam = tg.morphism("lambda")
    with pytest.raises(gp.SpanRejectedError, match="leaves the path space"):
        gp.make_element(lam, lam, w)


def test_compose_examples(tg, u_filter):
    g = gp.make_element(tg.morphism("beta[1]"), tg.morphism("alpha[1]"), u_filter)
    h = gp.make_element(tg.morphism("alpha[1]"), tg.unit(tg.vertex("u")), u_filter)
    gh = gp.compose_elements(g, h)
    assert gh.q == (1, 0) and gh.y == u_filter and gh.x == g.x
    gp.verify_certificate(gh)
    # inverse and unit laws
    assert gp.compose_elements(g, gp.invert(g)) == gp.unit_element(g.x)
    assert gp.compose_elements(gp.unit_element(g.x), g) == g


def test_compose_requires_matching_middle(tg, u_filter):
    g = gp.make_element(tg.morphism("beta[1]"), tg.morphism("alpha[1]"), u_filter)
    with pytest.raises(gp.GroupoidError):
        gp.compose_elements(g, g)


def test_invert_examples(tg, u_filter):
    g = gp.make_element(tg.morphism("beta[1]"), tg.morphism("alpha[1]"), u_filter)
    gi = gp.invert(g)
    assert gi.q == (-1, 1) and gi.x == g.y and gi.y == g.x
    assert gp.invert(gi) == g
    r, s = gp.element_structure(g)
    assert r == gp.unit_element(g.x) and s == gp.unit_element(g.y)
    assert gp.element_structure(r)[0] == r


def test_span_roundtrip(tg, u_filter):
    g = gp.make_element(tg.morphism("beta[1]"), tg.morphism("alpha[1]"), u_filter)
    mu, nu, z = gp.span_of(g)
    assert (str(mu), str(nu)) == ("beta[1]", "alpha[1]") and z == u_filter
    assert gp.make_element(mu, nu, z) == g


def test_basic_set_membership_examples(tg, u_filter):
    g = gp.make_element(tg.morphism("beta[1]"), tg.morphism("alpha[1]"), u_filter)
    b = gp.BasicGroupoidSet(tg.morphism("beta[1]"), tg.morphism("alpha[1]"))
    assert gp.basic_set_membership(g, b)
    b_excl = gp.BasicGroupoidSet(
        tg.morphism("beta[1]"), tg.morphism("alpha[1]"), J=(tg.morphism("beta[1]"),)
    )
    assert not gp.basic_set_membership(g, b_excl)
    mb1 = tg.morphism("mu.beta[1]")
    unit = gp.unit_element(ps.principal(mb1))
    assert gp.basic_set_membership(unit, gp.BasicGroupoidSet(mb1, mb1))


def test_basic_set_parameters_need_fa(tg):
    with pytest.raises(gp.GroupoidError, match="FA"):
        gp.BasicGroupoidSet(tg.morphism("lambda"), tg.morphism("lambda"))


def test_bpg_membership(tg, u_filter):
    unit_u = gp.unit_element(u_filter)
    member, exact = gp.bpg_membership(unit_u, B22)
    assert member and not exact
    # principal filters of the square composites sit in the boundary too
    pf = ps.principal(tg.morphism("mu.beta[1]"))
    assert gp.bpg_membership(gp.unit_element(pf), B22)[0]
    # maximality makes the one-edge filters boundary points as well: their
    # sole extensions are themselves, so the inclusion scan keeps them
    down_beta = ps.principal(tg.morphism("beta[1]"))
    assert gp.bpg_membership(gp.unit_element(down_beta), B22)[0]


def test_enumerate_pg_is_deduplicated(tg):
    elements = gp.enumerate_pg(tg, B22)
    assert len(elements) == len(set(elements))
    assert all(g.is_unit() == (g.x == g.y and g.q == (0, 0)) for g in elements)
    units = [g for g in elements if g.is_unit()]
    assert len(units) == len(ps.ps_filters(tg, B22).filters)


@pytest.mark.parametrize("maker", [lambda: lambda_tg(2), lambda: squares_graph()])
def test_axiom_suite(maker):
    g = maker()
    rep = gp.axiom_suite(g, B22)
    assert rep["ok"], rep["counterexamples"]
    assert rep["composable_pairs"] > 0 and rep["associativity_triples"] > 0


def test_axiom_suite_single_unit_groupoid():
    from pathgroupoids.kgraph import load_presentation

    g = load_presentation("vertices: v")
    rep = gp.axiom_suite(g, Degree((1,)))
    assert rep["ok"] and rep["elements"] == 1


@pytest.mark.parametrize("maker", [lambda: lambda_tg(2), lambda: grid(2)])
def test_invariance(maker):
    g = maker()
    rep = gp.invariance_check(g, B22)
    assert rep["ok"] and rep["verdict"] == "pass", rep


def test_invariance_truncation_is_flagged_not_failed():
    from pathgroupoids.catalog import cycle

    rep = gp.invariance_check(cycle(3), Degree((3,)))
    # the at-bound boundary scan is inexact; mismatches there are
    # boundary cases, not counterexamples
    assert rep["ok"] and rep["verdict"] == "unknown_at_bound"
    assert rep["boundary_cases"] and not rep["bps_exact"]


def test_unit_space(tg):
    assert gp.unit_space_check(tg, B22)["ok"]
    assert gp.unit_space_check(squares_graph(), B22)["ok"]


def test_separation(tg):
    elements = gp.enumerate_pg(tg, B22)
    g, h = elements[0], elements[-1]
    bg, bh = gp.separating_sets(g, h)
    assert gp.basic_set_membership(g, bg) and gp.basic_set_membership(h, bh)
    assert not gp.basic_set_membership(g, bh) and not gp.basic_set_membership(h, bg)
    with pytest.raises(gp.GroupoidError):
        gp.separating_sets(g, g)


def test_separation_exhaustive_on_same_q_pairs(tg):
    """The include/exclude construction, exercised in both orientations:
    the returned sets must match the argument order."""
    import itertools

    elements = gp.enumerate_pg(tg, B22)
    by_q = {}
    for e in elements:
        by_q.setdefault(e.q, []).append(e)
    for group in by_q.values():
        for a, b in itertools.combinations(group, 2):
            ba, bb = gp.separating_sets(a, b)
            assert gp.basic_set_membership(a, ba) and gp.basic_set_membership(b, bb)
            assert not gp.basic_set_membership(a, bb)
            assert not gp.basic_set_membership(b, ba)


def test_hausdorff_ample_evidence(tg):
    rep = gp.hausdorff_ample_evidence(tg, B22, sample=30)
    assert rep["ok"]
    flags = set(rep["unit_basic_set_compactness"].values())
    assert flags == {"ConsistentWithCompact"}
    rep_sq = gp.hausdorff_ample_evidence(squares_graph(), B22, sample=30)
    assert rep_sq["ok"]
    assert set(rep_sq["unit_basic_set_compactness"].values()) == {"Compact"}


def test_refinement(tg):
    assert gp.refinement_check(tg, B22)["ok"]
    assert gp.refinement_check(squares_graph(), B22, sample=20)["ok"]
