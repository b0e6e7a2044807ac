"""Shift maps and the partial semigroup action of the degree monoid on
the path space.

The left shift removes a prefix from a filter, the right shift glues one
on; acting by a degree m shifts off the unique degree-m element of the
filter.  The action is only applied to certified path-space points: an
unknown path-space verdict propagates as a flag, never as a silent
answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .alignment import Verdict, is_fa
from .degree import Degree
from .kgraph import FactorizationError, KGraph, KGraphError, Morphism
from .pspace import (
    Cylinder,
    DescribedSequence,
    Filter,
    FilterList,
    LimitOutcome,
    cylinder,
    declared_sequences,
    default_probe,
    enumerate_filters,
    in_ps,
    pointwise_limit,
    ps_filters,
    ps_membership,
    ultrafilters,
)


class ShiftDomainError(KGraphError):
    pass


class NotInPathSpaceError(KGraphError):
    pass


def shift_off(lam: Morphism, x: Filter) -> Filter:
    """The left shift: {mu : lam.mu in x}.  Requires lam in x."""
    graph = x.graph
    if not x.contains(lam):
        raise ShiftDomainError(f"{lam} is not in the filter {x}")
    out = []
    for kappa in x.elements:
        if not graph.prefix_leq(lam, kappa):
            continue
        try:
            prefix, tail = graph.factorize(kappa, lam.degree)
            if prefix == lam:
                out.append(tail)
        except FactorizationError:
            for tail in graph.fiber(lam.source, kappa.degree.sub(lam.degree)).elements:
                if graph.compose(lam, tail) == kappa:
                    out.append(tail)
    return Filter(graph, out)


def shift_on(lam: Morphism, x: Filter) -> Filter:
    """The right shift: everything below lam.mu for mu in x.  Requires
    s(lam) = r(x); need not preserve the path space."""
    graph = x.graph
    if lam.source != x.range:
        raise ShiftDomainError(f"s({lam}) = {lam.source} but r(x) = {x.range}")
    out: set[Morphism] = set()
    for mu in x.elements:
        out.update(graph.prefixes(graph.compose(lam, mu)))
    return Filter(graph, out)


def degree_witness(x: Filter, m: Degree) -> Optional[Morphism]:
    """The unique element of x of degree m, if any (d is injective on
    filters)."""
    hits = [k for k in x.elements if k.degree == m]
    if len(hits) > 1:
        raise KGraphError(f"degree map not injective on {x}")
    return hits[0] if hits else None


@dataclass
class DomainAnswer:
    member: bool
    witness: Optional[Morphism] = None
    open_witness: Optional[Cylinder] = None


def domain_membership(x: Filter, m: Degree) -> DomainAnswer:
    """(x, m) lies in the action domain iff x holds an element of degree
    m; the witness's cylinder is the openness certificate Z(x(e,m))
    contained in D_m."""
    w = degree_witness(x, m)
    if w is None:
        return DomainAnswer(False)
    return DomainAnswer(True, w, cylinder(w, space="PS"))


@dataclass
class ActionValue:
    filter: Filter
    ps_verdict: Verdict


def act_flagged(x: Filter, m: Degree) -> ActionValue:
    verdict, _ = ps_membership(x)
    if verdict is Verdict.FALSE:
        raise NotInPathSpaceError(f"{x} is not in the path space")
    w = degree_witness(x, m)
    if w is None:
        raise ShiftDomainError(f"{x} has no element of degree {m}")
    return ActionValue(shift_off(w, x), verdict)


def act(x: Filter, m: Degree) -> Filter:
    """T(x, m) for certified path-space points."""
    return act_flagged(x, m).filter


def directed_witness(m: Degree, n: Degree, x: Filter) -> tuple[Degree, Morphism]:
    """For x in D_m and D_n, produce l = lub(m, n) and the element of x
    showing x in D_l (directedness of the filter supplies it)."""
    graph = x.graph
    wm, wn = degree_witness(x, m), degree_witness(x, n)
    if wm is None or wn is None:
        raise ShiftDomainError(f"{x} is not in both domains D{m}, D{n}")
    l = m.lub(n)
    for kappa in sorted(x.elements, key=Morphism.sort_key):
        if graph.prefix_leq(wm, kappa) and graph.prefix_leq(wn, kappa):
            prefix, _ = graph.factorize(kappa, l)
            if not x.contains(prefix):
                raise KGraphError(f"filter {x} is not hereditary at {prefix}")
            return l, prefix
    raise ShiftDomainError(f"no directedness witness for {wm}, {wn} in {x}")


# -- exhaustive checks -------------------------------------------------------


def _filters_and_morphisms(graph: KGraph, bound: Degree):
    return enumerate_filters(graph, bound).filters, graph.enumerate_morphisms(bound).morphisms


def check_roundtrips(graph: KGraph, bound: Degree) -> dict:
    """shift_on(lam, shift_off(lam, x)) = x for lam in x, and the other
    way around when s(lam) = r(x)."""
    filters, morphs = _filters_and_morphisms(graph, bound)
    bad, checked = [], 0
    for x in filters:
        for lam in sorted(x.elements, key=Morphism.sort_key):
            checked += 1
            if shift_on(lam, shift_off(lam, x)) != x:
                bad.append(("on.off", str(lam), str(x)))
        for lam in morphs:
            if lam.source != x.range:
                continue
            checked += 1
            if shift_off(lam, shift_on(lam, x)) != x:
                bad.append(("off.on", str(lam), str(x)))
    return {"ok": not bad, "checked": checked, "counterexamples": bad[:5]}


def check_cocycle(graph: KGraph, bound: Degree) -> dict:
    """shift_off(mu, shift_off(lam, x)) = shift_off(lam.mu, x) when
    lam.mu in x, and dually for right shifts."""
    filters, morphs = _filters_and_morphisms(graph, bound)
    bad, checked = [], 0
    for lam in morphs:
        for mu in morphs:
            if lam.source != mu.range:
                continue
            comp = graph.compose(lam, mu)
            for x in filters:
                if x.contains(comp):
                    checked += 1
                    if shift_off(mu, shift_off(lam, x)) != shift_off(comp, x):
                        bad.append(("left", str(lam), str(mu), str(x)))
                if mu.source == x.range:
                    checked += 1
                    if shift_on(lam, shift_on(mu, x)) != shift_on(comp, x):
                        bad.append(("right", str(lam), str(mu), str(x)))
    return {"ok": not bad, "checked": checked, "counterexamples": bad[:5]}


def check_ultrafilter_preservation(graph: KGraph, bound: Degree) -> dict:
    """Shifts of enumerated ultrafilters stay maximal, re-verified by an
    inclusion scan against the full enumeration."""
    ultra = set(ultrafilters(graph, bound).filters)
    filters, morphs = _filters_and_morphisms(graph, bound)

    def still_maximal(y: Filter) -> bool:
        return not any(y.elements < z.elements for z in filters)

    bad, checked = [], 0
    for x in ultra:
        for lam in sorted(x.elements, key=Morphism.sort_key):
            checked += 1
            if not still_maximal(shift_off(lam, x)):
                bad.append(("off", str(lam), str(x)))
        for lam in morphs:
            if lam.source == x.range:
                checked += 1
                if not still_maximal(shift_on(lam, x)):
                    bad.append(("on", str(lam), str(x)))
    return {"ok": not bad, "checked": checked, "counterexamples": bad[:5]}


def check_ps_preservation(graph: KGraph, bound: Degree) -> dict:
    """Left shifts preserve the path space; right shifts are only checked
    for the counterexamples they produce."""
    ps = ps_filters(graph, bound).filters
    bad, checked = [], 0
    right_escapes = []
    morphs = graph.enumerate_morphisms(bound).morphisms
    for x in ps:
        for lam in sorted(x.elements, key=Morphism.sort_key):
            checked += 1
            if not in_ps(shift_off(lam, x)):
                bad.append((str(lam), str(x)))
        for lam in morphs:
            if lam.source == x.range and not in_ps(shift_on(lam, x)):
                right_escapes.append((str(lam), str(x), str(shift_on(lam, x))))
    return {
        "ok": not bad,
        "checked": checked,
        "counterexamples": bad[:5],
        "right_shift_escapes": sorted(right_escapes)[:10],
    }


def check_action_axioms(graph: KGraph, bound: Degree) -> dict:
    """(S1), (S2) and directedness witnesses over every enumerated action
    point."""
    ps = ps_filters(graph, bound).filters
    degrees = bound.downset()
    bad, checked = [], 0
    for x in ps:
        checked += 1
        if act(x, Degree.zero(graph.rank)) != x:
            bad.append(("S1", str(x)))
    for x in ps:
        for m in degrees:
            for n in degrees:
                try:
                    total = m.add(n)
                except Exception:
                    continue
                in_total = degree_witness(x, total) is not None
                in_m = degree_witness(x, m) is not None
                in_step = in_m and degree_witness(act(x, m), n) is not None
                checked += 1
                if in_total != in_step:
                    bad.append(("S2-domain", str(x), str(m), str(n)))
                    continue
                if in_total and act(act(x, m), n) != act(x, total):
                    bad.append(("S2-value", str(x), str(m), str(n)))
    for x in ps:
        for m in degrees:
            for n in degrees:
                if degree_witness(x, m) is not None and degree_witness(x, n) is not None:
                    checked += 1
                    l, witness = directed_witness(m, n, x)
                    if l != m.lub(n) or witness.degree != l or not x.contains(witness):
                        bad.append(("directed", str(x), str(m), str(n)))
    return {"ok": not bad, "checked": checked, "counterexamples": bad[:5]}


def check_codomain_open(graph: KGraph, bound: Degree) -> dict:
    """For each acted point T(x, m), a witness mu' in FA with
    Z(mu') inside C_m, verified over the enumerated path space."""
    ps = ps_filters(graph, bound).filters
    degrees = [p for p in bound.downset() if not p.is_zero()]
    bad, checked = [], 0
    for x in ps:
        for m in degrees:
            mu = degree_witness(x, m)
            if mu is None:
                continue
            checked += 1
            mu_primes = [
                k
                for k in x.elements
                if graph.prefix_leq(mu, k) and is_fa(k) is Verdict.TRUE
            ]
            if not mu_primes:
                bad.append((str(x), str(m), "no FA extension of the witness"))
                continue
            ext = sorted(mu_primes, key=Morphism.sort_key)[0]
            try:
                _, mu_prime = graph.factorize(ext, m)
            except FactorizationError:
                bad.append((str(x), str(m), "witness does not factor"))
                continue
            for y in ps:
                if not y.contains(mu_prime):
                    continue
                back = shift_on(mu, y)
                if not in_ps(back) or act(back, m) != y:
                    bad.append((str(x), str(m), f"Z({mu_prime}) escapes C_{m}"))
                    break
    return {"ok": not bad, "checked": checked, "counterexamples": bad[:5]}


def check_local_homeo_witness(graph: KGraph, bound: Degree) -> dict:
    """For each x in D_m, the pair Z(mu.mu'), Z(mu') on which the action
    restricts to a certified bijection (the shift by mu)."""
    ps = ps_filters(graph, bound).filters
    degrees = [p for p in bound.downset() if not p.is_zero()]
    bad, checked = [], 0
    for x in ps:
        for m in degrees:
            mu = degree_witness(x, m)
            if mu is None:
                continue
            fa_exts = [
                k for k in x.elements if graph.prefix_leq(mu, k) and is_fa(k) is Verdict.TRUE
            ]
            if not fa_exts:
                bad.append((str(x), str(m), "no FA extension"))
                continue
            mumu = sorted(fa_exts, key=Morphism.sort_key)[0]
            _, mu_prime = graph.factorize(mumu, m)
            checked += 1
            dom = [y for y in ps if y.contains(mumu)]
            images = [shift_off(mu, y) for y in dom]
            if len(set(images)) != len(dom):
                bad.append((str(x), str(m), "shift not injective on Z"))
            if any(not img.contains(mu_prime) or not in_ps(img) for img in images):
                bad.append((str(x), str(m), "image leaves Z(mu')"))
            for img in images:
                if shift_on(mu, img) not in dom:
                    bad.append((str(x), str(m), "inverse leaves the chart"))
                    break
    return {"ok": not bad, "checked": checked, "counterexamples": bad[:5]}


def check_shift_continuity(graph: KGraph, bound: Degree) -> dict:
    """Left shifts commute with limits of the declared families whose
    limits are filters; right shifts along lam record the comparison
    between the shifted limit and the limit of the shifted family."""
    results: dict = {"left": [], "right": [], "ok": True}
    for seq in declared_sequences(graph):
        probe = default_probe(graph, bound, seq)
        res = pointwise_limit(seq, probe)
        if res.outcome is not LimitOutcome.CONVERGES or not res.complete:
            continue
        lim_ok, _ = res.limit_is_filter()
        terms = seq.terms()
        if lim_ok:
            lim = Filter(graph, res.limit.elements)
            common = set.intersection(*[set(t.elements) for t in terms]) & set(lim.elements)
            for lam in sorted(common, key=Morphism.sort_key):
                shifted = [shift_off(lam, Filter(graph, t.elements)) for t in terms]
                fam_like = _limit_of(graph, shifted, bound)
                agrees = fam_like == set(shift_off(lam, lim).elements)
                results["left"].append(
                    {"family": seq.description, "prefix": str(lam), "commutes": agrees}
                )
                results["ok"] = results["ok"] and agrees
            # right shifts along every composable lam: compare, no claim
            for lam in graph.enumerate_morphisms(bound).morphisms:
                if lam.source != lim.range or lam.is_unit():
                    continue
                shifted = [shift_on(lam, Filter(graph, t.elements)) for t in terms]
                fam_lim = _limit_of(graph, shifted, bound)
                image = set(shift_on(lam, lim).elements)
                results["right"].append(
                    {
                        "family": seq.description,
                        "prefix": str(lam),
                        "limit_of_images": sorted(str(m) for m in fam_lim),
                        "image_of_limit": sorted(str(m) for m in image),
                        "continuous_here": fam_lim == image,
                    }
                )
    return results


def _limit_of(graph: KGraph, term_filters: list[Filter], bound: Degree) -> set[Morphism]:
    """Pointwise limit of an explicit list of filters, disjoint-family
    style: the stable intersection."""
    return set.intersection(*[set(t.elements) for t in term_filters])
