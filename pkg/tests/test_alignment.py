import itertools

import pytest

from pathgroupoids import alignment as al
from pathgroupoids.alignment import MceKind, Verdict
from pathgroupoids.catalog import finite_examples, grid, lambda_tg, lambda_tg_infinity, lambda_yee
from pathgroupoids.degree import Degree
from pathgroupoids.kgraph import load_presentation

B22 = Degree((2, 2))


@pytest.fixture(scope="module")
def tg():
    return lambda_tg(3)


def test_mce_examples(tg):
    lam, mu = tg.morphism("lambda"), tg.morphism("mu")
    res = al.mce(lam, mu)
    assert res.kind is MceKind.DECLARED_INFINITE
    assert [str(m) for m in res.elements] == [f"lambda.alpha[{n}]" for n in (1, 2, 3)]

    a1 = tg.morphism("alpha[1]")
    res = al.mce(a1, a1)
    assert res.kind is MceKind.EXACT_FINITE and list(res.elements) == [a1]

    res = al.mce(a1, tg.morphism("beta[1]"))  # different ranges
    assert res.kind is MceKind.EXACT_FINITE and res.elements == ()


def test_fa_at_pair_examples(tg):
    assert al.fa_at_pair(tg.morphism("lambda"), tg.morphism("mu")).value is Verdict.FALSE
    v = al.fa_at_pair(tg.morphism("beta[1]"), tg.morphism("beta[2]"))
    assert v.value is Verdict.TRUE and v.record["mce_size"] == 0


def test_fa_at_examples(tg):
    w = al.fa_at(tg.unit(tg.vertex("w")), B22)
    assert w.value is Verdict.TRUE and w.record["unknown"] == 0
    lam = al.fa_at(tg.morphism("lambda"), B22)
    assert lam.value is Verdict.FALSE
    assert tuple(str(m) for m in lam.witness) == ("lambda", "mu")


def test_fa_set_tg(tg):
    out = al.fa_set(tg, B22)
    excluded = sorted(str(m) for m, v in out if v.value is not Verdict.TRUE)
    assert excluded == ["lambda", "mu", "v"]
    assert all(v.value in (Verdict.TRUE, Verdict.FALSE) for _, v in out)


def test_fa_set_yee():
    y = lambda_yee(3)
    out = al.fa_set(y, Degree((1, 1)))
    excluded = sorted(str(m) for m, v in out if v.value is not Verdict.TRUE)
    assert excluded == ["lambda", "mu[1]", "mu[2]", "mu[3]", "v"]


def test_fa_set_tg_infinity_all_false_with_reverifying_witnesses():
    g = lambda_tg_infinity(2, 3)
    out = al.fa_set(g, B22)
    assert out and all(v.value is Verdict.FALSE for _, v in out)
    for m, v in out:
        wmu, wnu = v.witness
        assert g.prefix_leq(m, wmu)
        assert al.mce(wmu, wnu).kind is MceKind.DECLARED_INFINITE


def test_user_presentation_gets_honest_unknowns():
    doc = """
vertices: t u v w
edges:
  lambda 1 w -> v
  mu     2 t -> v
  beta[n]  1 u -> t
  alpha[n] 2 u -> w
squares:
  mu.beta[n] = lambda.alpha[n]
"""
    g = load_presentation(doc, cutoff=3)  # no annotations attached
    v = al.fa_at(g.morphism("lambda"), B22)
    assert v.value is Verdict.UNKNOWN_AT_BOUND


def test_finite_graphs_are_true_everywhere():
    for g in finite_examples():
        bound = Degree((2, 2)) if g.rank == 2 else Degree((3,))
        assert all(v.value is Verdict.TRUE for _, v in al.fa_set(g, bound))


# -- brute-force oracle for exact MCEs ---------------------------------------


def test_exact_mce_matches_ideal_intersection_on_finite_graphs():
    """mu.Lambda cap nu.Lambda equals the union of the ideals of the
    computed common extensions, by exhaustive scan."""
    for g in finite_examples():
        morphs = g.all_morphisms()
        for mu, nu in itertools.product(morphs, morphs):
            res = al.mce(mu, nu)
            assert res.kind is MceKind.EXACT_FINITE
            lhs = al.brute_ideal_intersection(g, mu, nu)
            rhs = al.brute_union_of_ideals(g, res.elements)
            assert lhs == rhs, (str(mu), str(nu))


def test_mce_elements_have_lub_degree(tg):
    for a in ("lambda", "mu", "beta[1]", "alpha[2]"):
        for b in ("lambda", "mu", "beta[1]"):
            ma, mb = tg.morphism(a), tg.morphism(b)
            res = al.mce(ma, mb)
            for el in res.elements:
                assert el.degree == ma.degree.lub(mb.degree)
                assert tg.prefix_leq(ma, el) and tg.prefix_leq(mb, el)


# -- structure of the finitely aligned part ----------------------------------


def test_fa_structure_tg(tg):
    rep = al.check_fa_structure(tg, B22)
    assert rep["ok"]
    # the range map escapes FA exactly at the square composites
    assert "lambda.alpha[1]" in rep["range_counterexamples"]


def test_fa_structure_yee_and_finite():
    rep = al.check_fa_structure(lambda_yee(3), Degree((1, 1)))
    assert rep["ok"]
    for g in finite_examples():
        bound = Degree((2, 2)) if g.rank == 2 else Degree((3,))
        rep = al.check_fa_structure(g, bound)
        assert rep["ok"]
        assert rep["range_counterexamples"] == []


def test_constellation(tg):
    assert al.validate_constellation(tg, B22)["ok"]
    rep = al.validate_constellation(lambda_tg_infinity(2, 2), B22)
    assert rep["ok"] and rep["vacuous"]
    assert al.validate_constellation(grid(2), B22)["ok"]


def test_relative_category_of_paths(tg):
    rep = al.validate_relative_cop(tg, B22)
    assert rep["ok"]
    # FAr(tg) adds exactly the vertex v back
    in_far = al.far_predicate(tg, B22)
    members = {str(m) for m in tg.enumerate_morphisms(B22).morphisms if in_far(m)}
    universe = {str(m) for m in tg.enumerate_morphisms(B22).morphisms}
    assert universe - members == {"lambda", "mu"}
    # ... but is not itself a 2-graph: the degree-(1,0) prefix of the
    # square composite escapes
    assert not rep["is_k_graph"]
    gaps = {(g["element"], tuple(g["degree"])) for g in rep["factorisation_gaps"]}
    assert ("lambda.alpha[1]", (1, 0)) in gaps


def test_relative_cop_finite_graphs():
    for g in finite_examples():
        bound = Degree((2, 2)) if g.rank == 2 else Degree((3,))
        rep = al.validate_relative_cop(g, bound)
        assert rep["ok"] and rep["is_k_graph"]


def test_relative_cop_yee():
    rep = al.validate_relative_cop(lambda_yee(2), Degree((1, 1)))
    assert rep["ok"]
