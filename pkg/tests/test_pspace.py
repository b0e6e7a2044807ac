import itertools

import pytest

from pathgroupoids import pspace as ps
from pathgroupoids.alignment import Verdict
from pathgroupoids.catalog import (
    MorphismFamily,
    cycle,
    finite_examples,
    grid,
    lambda_tg,
    lambda_yee,
    line,
)
from pathgroupoids.degree import Degree
from pathgroupoids.kgraph import load_presentation

B22 = Degree((2, 2))


@pytest.fixture(scope="module")
def tg():
    return lambda_tg(2)


@pytest.fixture(scope="module")
def tg3():
    return lambda_tg(3)


# -- filters -------------------------------------------------------------


def test_is_filter_examples(tg):
    bad = ps.ExplicitSubset(
        tg, [tg.unit(tg.vertex("v")), tg.morphism("lambda"), tg.morphism("mu")]
    )
    ok, reason = ps.is_filter(bad)
    assert not ok and "directed" in reason

    good = ps.principal(tg.morphism("mu.beta[1]"))
    assert ps.is_filter(good) == (True, None)
    assert ps.is_filter(ps.ExplicitSubset(tg, [tg.unit(tg.vertex("v"))]))[0]


def test_principal_examples(tg):
    pf = ps.principal(tg.morphism("mu.beta[1]"))
    assert sorted(str(m) for m in pf.elements) == ["lambda", "lambda.alpha[1]", "mu", "v"]
    assert str(pf.range) == "v"
    assert {str(m) for m in ps.principal(tg.unit(tg.vertex("v"))).elements} == {"v"}
    assert sorted(str(m) for m in ps.principal(tg.morphism("alpha[1]")).elements) == [
        "alpha[1]", "w"
    ]


def brute_filters(graph):
    """Powerset oracle: every subset tested against the filter axioms
    directly (tiny graphs only)."""
    morphs = graph.all_morphisms()
    out = []
    for r in range(1, len(morphs) + 1):
        for combo in itertools.combinations(morphs, r):
            candidate = set(combo)
            if not all(set(graph.prefixes(m)) <= candidate for m in candidate):
                continue
            if not all(
                any(graph.prefix_leq(a, c) and graph.prefix_leq(b, c) for c in candidate)
                for a in candidate
                for b in candidate
            ):
                continue
            out.append(frozenset(candidate))
    return set(out)


def test_filter_enumeration_matches_powerset_oracle():
    for g in (line(2), grid(1)):
        enumerated = {x.elements for x in ps.enumerate_filters(g, Degree((2,) * g.rank)).filters}
        assert enumerated == brute_filters(g)


def test_ultrafilters_match_powerset_oracle():
    for g in (line(2), grid(1)):
        brute = brute_filters(g)
        brute_max = {x for x in brute if not any(x < y for y in brute)}
        got = {x.elements for x in ps.ultrafilters(g, Degree((2,) * g.rank)).filters}
        assert got == brute_max


def test_enumerate_filters_tg_counts():
    for cutoff in (2, 5):
        g = lambda_tg(cutoff)
        res = ps.enumerate_filters(g, B22)
        assert len(res.filters) == 6 + 3 * cutoff
        assert not res.exact


def test_filters_one_vertex_graph():
    g = load_presentation("vertices: v")
    res = ps.enumerate_filters(g, Degree((1,)))
    assert [str(x) for x in res.filters] == ["{v}"] and res.exact
    assert [str(x) for x in ps.ultrafilters(g, Degree((1,))).filters] == ["{v}"]
    assert [str(x) for x in ps.bps_enumerate(g, Degree((1,))).filters] == ["{v}"]


def test_ultrafilters_tg_inclusion_scan(tg):
    """Independent oracle: maximality re-derived by scanning all pairs of
    enumerated filters for strict inclusions."""
    all_f = ps.enumerate_filters(tg, B22).filters
    expected = {
        x.elements
        for x in all_f
        if not any(x.elements < y.elements for y in all_f)
    }
    got = {x.elements for x in ps.ultrafilters(tg, B22).filters}
    assert got == expected
    # concretely: {u} plus every maximal principal filter; {t}, {v}, {w}
    # and the one-edge filters below the square composites drop out
    names = sorted(str(ps.Filter(tg, e)) for e in got)
    assert names == [
        "{t, beta[1]}", "{t, beta[2]}", "{u}",
        "{v, mu, lambda, lambda.alpha[1]}", "{v, mu, lambda, lambda.alpha[2]}",
        "{w, alpha[1]}", "{w, alpha[2]}",
    ]


def test_grid_ultrafilters_are_the_corner_sourced_filters():
    gr = grid(2)
    ultra = ps.ultrafilters(gr, B22)
    assert ultra.exact and len(ultra.filters) == 9
    for x in ultra.filters:
        top = max(x.elements, key=lambda m: m.degree.total)
        assert str(top.source) == "g[2,2]"


# -- cylinders -----------------------------------------------------------


def test_cylinder_serialisation(tg):
    cyl = ps.Cylinder((tg.morphism("lambda"),), (tg.morphism("mu"), tg.unit(tg.vertex("t"))))
    assert cyl.to_json() == {"in": ["lambda"], "out": ["mu", "t"]}


def test_cylinder_membership(tg):
    pf = ps.principal(tg.morphism("mu.beta[1]"))
    z_lambda = ps.cylinder(tg.morphism("lambda"))
    assert ps.cylinder_membership(pf, z_lambda)
    w = ps.make_filter(tg, [tg.unit(tg.vertex("w"))])
    avoid_w = ps.Cylinder((), (tg.unit(tg.vertex("w")),))
    assert not ps.cylinder_membership(w, avoid_w)
    whole = ps.Cylinder((), ())
    assert all(ps.cylinder_membership(x, whole) for x in ps.enumerate_filters(tg, B22).filters)


# -- limits ----------------------------------------------------------------


def _family(graph, description):
    return next(
        f for f in graph.annotations.filter_families if f.description == description
    )


def test_pointwise_limit_of_alpha_family(tg3):
    seq = ps.DescribedSequence.principal_family(tg3, _family(tg3, "alpha[n]"))
    res = ps.pointwise_limit(seq, ps.default_probe(tg3, B22, seq))
    assert res.outcome is ps.LimitOutcome.CONVERGES and res.complete
    assert {str(m) for m in res.limit.elements} == {"w"}
    assert res.decisions["alpha[1]"] == "out"


def test_pointwise_limit_of_square_family(tg3):
    seq = ps.DescribedSequence.principal_family(tg3, _family(tg3, "lambda.alpha[n]"))
    res = ps.pointwise_limit(seq, ps.default_probe(tg3, B22, seq))
    assert {str(m) for m in res.limit.elements} == {"v", "lambda", "mu"}
    ok, why = res.limit_is_filter()
    assert not ok and "directed" in why


def test_pointwise_limit_constant(tg3):
    x = ps.principal(tg3.morphism("beta[1]"))
    seq = ps.DescribedSequence.constant_seq(x)
    res = ps.pointwise_limit(seq, ps.default_probe(tg3, B22, seq))
    assert res.limit.elements == x.elements and res.complete


def test_pointwise_limit_ignores_finite_prefix(tg3):
    fam = _family(tg3, "alpha[n]")
    junk = ps.ExplicitSubset(tg3, [tg3.unit(tg3.vertex("u"))])
    seq = ps.DescribedSequence(tg3, family=fam, prefix=(junk, junk))
    res = ps.pointwise_limit(seq, ps.default_probe(tg3, B22, seq))
    assert {str(m) for m in res.limit.elements} == {"w"}
    assert len(seq.terms()) == len(seq.tail_terms()) + 2


def test_pointwise_limit_increasing_family():
    g = cycle(3)
    fam = g.annotations.filter_families[0]
    seq = ps.DescribedSequence.principal_family(g, fam)
    res = ps.pointwise_limit(seq, ps.default_probe(g, Degree((3,)), seq))
    assert res.outcome is ps.LimitOutcome.CONVERGES
    assert not res.complete  # the union keeps growing past the bound
    assert ps.is_filter(res.limit)[0]


def test_pointwise_limit_flags_oscillation(tg3):
    # a family declared disjoint whose terms actually repeat: membership
    # support of mu.beta[1] is neither a single index nor everything
    fam = MorphismFamily(
        "oscillating",
        (1, 2, 3, 4),
        lambda n: tg3.morphism(f"mu.beta[{n}]" if n % 2 else "mu.beta[1]"),
    )
    seq = ps.DescribedSequence.principal_family(tg3, fam)
    res = ps.pointwise_limit(seq, ps.default_probe(tg3, B22, seq))
    assert res.outcome is ps.LimitOutcome.DIVERGENT
    assert "oscillating" in res.decisions.values()


def test_convergence_decisions_match_raw_membership(tg3):
    assert ps.check_convergence_decisions(tg3, B22)["ok"]
    assert ps.check_convergence_decisions(lambda_yee(2), Degree((1, 1)))["ok"]


def test_profiled_subset_contract(tg3):
    alpha = tg3.morphism("alpha[1]")
    view = ps.ProfiledSubset(
        tg3,
        "prefixes of alpha[1]",
        contains=lambda m: tg3.prefix_leq(m, alpha),
        enumerate_members=lambda bound: [m for m in tg3.prefixes(alpha)],
        finite=True,
    )
    assert view.contains(tg3.unit(tg3.vertex("w")))
    assert ps.is_filter(view, bound=B22)[0]
    lying = ps.ProfiledSubset(
        tg3, "liar", contains=lambda m: False, enumerate_members=lambda b: [alpha]
    )
    with pytest.raises(ps.SubsetError):
        lying.enumerate_members(B22)


# -- path space -------------------------------------------------------------


def test_ps_membership_examples(tg):
    w = ps.make_filter(tg, [tg.unit(tg.vertex("w"))])
    assert ps.ps_membership(w)[0] is Verdict.TRUE
    down_lambda = ps.principal(tg.morphism("lambda"))
    assert ps.ps_membership(down_lambda)[0] is Verdict.FALSE
    pf = ps.principal(tg.morphism("mu.beta[1]"))
    verdict, record = ps.ps_membership(pf)
    assert verdict is Verdict.TRUE
    # the strengthened form: every element owns an FA extension inside
    assert set(record["witnesses"]) == {str(m) for m in pf.elements}


def test_ps_excludes_exactly_three(tg):
    all_f = ps.enumerate_filters(tg, B22).filters
    excluded = sorted(str(x) for x in all_f if not ps.in_ps(x))
    assert excluded == ["{v, lambda}", "{v, mu}", "{v}"]


def test_bps_tg_is_ultrafilters_plus_vertex_limits(tg3):
    """Inclusion scan plus declared-family limits, re-derived here."""
    ultra = [x for x in ps.ultrafilters(tg3, B22).filters if ps.in_ps(x)]
    expected = {x.elements for x in ultra}
    for name, limit in (("beta[n]", "t"), ("alpha[n]", "w")):
        seq = ps.DescribedSequence.principal_family(tg3, _family(tg3, name))
        res = ps.pointwise_limit(seq, ps.default_probe(tg3, B22, seq))
        assert ps.is_filter(res.limit)[0]
        expected.add(res.limit.elements)
        assert {str(m) for m in res.limit.elements} == {limit}
    got = {x.elements for x in ps.bps_enumerate(tg3, B22).filters}
    assert got == expected
    # which here is the whole enumerated path space
    assert got == {x.elements for x in ps.ps_filters(tg3, B22).filters}


def test_bps_finite_graphs_are_the_ultrafilters():
    for g in finite_examples():
        bound = Degree((2, 2)) if g.rank == 2 else Degree((3,))
        bps = ps.bps_enumerate(g, bound)
        assert bps.exact
        assert {x.elements for x in bps.filters} == {
            x.elements for x in ps.ultrafilters(g, bound).filters
        }


def test_ps_equals_filters_on_finite_graphs():
    for g in finite_examples():
        bound = Degree((2, 2)) if g.rank == 2 else Degree((3,))
        assert ps.check_filters_equal_ps(g, bound)["ok"]


# -- compactness probes -------------------------------------------------------


def test_probe_lambda_non_compact(tg3):
    ev = ps.compactness_probe(tg3.morphism("lambda"), B22)
    assert ev.kind == "NonCompact"
    assert sorted(ev.limit) == ["lambda", "mu", "v"]
    assert "directed" in ev.reason


def test_probe_w_consistent(tg3):
    ev = ps.compactness_probe(tg3.unit(tg3.vertex("w")), B22)
    assert ev.kind == "ConsistentWithCompact"
    assert "{w}" in ev.limit


def test_probe_finite_graphs_compact():
    for g in finite_examples():
        bound = Degree((2, 2)) if g.rank == 2 else Degree((3,))
        for m in g.all_morphisms():
            assert ps.compactness_probe(m, bound).kind == "Compact"


def test_probe_rejects_supplied_family_outside_cylinder(tg3):
    # the beta-family filters do not contain w, so supplying them as
    # evidence for Z(w) is an input error
    seq = ps.DescribedSequence.principal_family(tg3, _family(tg3, "beta[n]"))
    with pytest.raises(ps.SubsetError):
        ps.compactness_probe(tg3.unit(tg3.vertex("w")), B22, families=[seq])


def test_probe_yee():
    y = lambda_yee(3)
    ev = ps.compactness_probe(y.morphism("lambda"), Degree((1, 1)))
    assert ev.kind == "NonCompact"
    assert sorted(ev.limit) == ["lambda", "mu[1]", "v"]
    ev_w = ps.compactness_probe(y.unit(y.vertex("w")), Degree((1, 1)))
    assert ev_w.kind == "ConsistentWithCompact"
    # the vertex whose neighbourhoods fail to be compact
    ev_v = ps.compactness_probe(y.unit(y.vertex("v")), Degree((1, 1)))
    assert ev_v.kind == "NonCompact"
    ev_mu = ps.compactness_probe(y.morphism("mu[2]"), Degree((1, 1)))
    assert ev_mu.kind == "NonCompact" and sorted(ev_mu.limit) == ["lambda", "mu[2]", "v"]


# -- topology suites ----------------------------------------------------------


def test_basis_property(tg):
    assert ps.check_basis_property(tg, B22)["ok"]
    assert ps.check_basis_property(grid(1), Degree((1, 1)))["ok"]


def test_ps_open(tg3):
    rep = ps.check_ps_open(tg3, B22)
    assert rep["ok"] and rep["ps_size"] == 3 + 3 * 3
    assert ps.check_ps_open(lambda_yee(2), Degree((1, 1)))["ok"]


def test_every_enumerated_filter_passes_is_filter(tg3):
    graphs = [tg3, lambda_yee(2)] + finite_examples()
    for g in graphs:
        bound = Degree((2, 2)) if g.rank == 2 else Degree((3,))
        for x in ps.enumerate_filters(g, bound).filters:
            assert ps.is_filter(x) == (True, None)
        for m in g.enumerate_morphisms(bound).morphisms:
            assert ps.is_filter(ps.principal(m)) == (True, None)


def test_ps_characterisations_agree(tg3):
    assert ps.check_ps_characterisations_agree(tg3, B22)["ok"]
    assert ps.check_ps_characterisations_agree(lambda_yee(2), Degree((1, 1)))["ok"]
    for g in finite_examples():
        bound = Degree((2, 2)) if g.rank == 2 else Degree((3,))
        assert ps.check_ps_characterisations_agree(g, bound)["ok"]
