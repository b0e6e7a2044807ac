"""The path groupoid: the semidirect product of the shift action on the
path space, with certificate-carrying elements.

An element is a triple (x, q, y) with q in Z^k; its certificate is a
pair (m, n) of degrees with q = m - n, x in D_m, y in D_n and
T(x, m) = T(y, n).  Certificates re-verify on demand, and every element
round-trips through the span form (mu, nu, z) with x = sigma^mu z and
y = sigma^nu z.  Element equality ignores certificates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .alignment import Verdict, is_fa
from .degree import Degree
from .kgraph import KGraph, KGraphError, Morphism
from .pspace import (
    Filter,
    bps_enumerate,
    cylinder_membership,
    cylinder,
    declared_sequences,
    default_probe,
    in_ps,
    pointwise_limit,
    LimitOutcome,
    is_filter,
    ps_filters,
)
from .action import (
    NotInPathSpaceError,
    act,
    degree_witness,
    directed_witness,
    shift_off,
    shift_on,
)


class GroupoidError(KGraphError):
    pass


class SpanRejectedError(GroupoidError):
    """The span would leave the path space (right shifts need not stay)."""


class GroupoidElement:
    """A triple (x, q, y) with a re-verifiable certificate."""

    __slots__ = ("x", "q", "y", "cert", "span", "_hash")

    def __init__(self, x: Filter, q: tuple[int, ...], y: Filter, cert, span=None):
        self.x = x
        self.q = q
        self.y = y
        self.cert = cert  # (m, n) with q = m - n
        self.span = span  # (mu, nu, z) with x = shift_on(mu, z), y = shift_on(nu, z)
        self._hash = hash((x, q, y))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupoidElement)
            and self.x == other.x
            and self.q == other.q
            and self.y == other.y
        )

    def __hash__(self) -> int:
        return self._hash

    def is_unit(self) -> bool:
        return self.x == self.y and all(c == 0 for c in self.q)

    def sort_key(self):
        return (self.x.sort_key(), self.q, self.y.sort_key())

    def __str__(self) -> str:
        return f"({self.x}, {list(self.q)}, {self.y})"


def unit_element(x: Filter) -> GroupoidElement:
    zero = Degree.zero(x.graph.rank)
    return GroupoidElement(x, zero.minus(zero), x, (zero, zero))


def make_element(mu: Morphism, nu: Morphism, z: Filter) -> GroupoidElement:
    """Build the element with span (mu, nu, z); rejects spans whose
    shifted filters leave the path space."""
    graph = z.graph
    if mu.source != nu.source or mu.source != z.range:
        raise GroupoidError(
            f"span mismatch: s({mu}) = {mu.source}, s({nu}) = {nu.source}, r(z) = {z.range}"
        )
    if not in_ps(z):
        raise SpanRejectedError(f"base filter {z} is not a certified path-space point")
    x, y = shift_on(mu, z), shift_on(nu, z)
    for lam, shifted in ((mu, x), (nu, y)):
        if not in_ps(shifted):
            raise SpanRejectedError(
                f"shift_on({lam}, {z}) = {shifted} leaves the path space; "
                "right shifts need not preserve it"
            )
    g = GroupoidElement(
        x, mu.degree.minus(nu.degree), y, (mu.degree, nu.degree), span=(mu, nu, z)
    )
    verify_certificate(g)
    return g


def verify_certificate(g: GroupoidElement) -> None:
    m, n = g.cert
    if m.minus(n) != g.q:
        raise GroupoidError(f"certificate degrees {m}, {n} do not give q = {g.q}")
    if degree_witness(g.x, m) is None or degree_witness(g.y, n) is None:
        raise GroupoidError("certificate witnesses are missing from the filters")
    if act(g.x, m) != act(g.y, n):
        raise GroupoidError(f"T(x, {m}) != T(y, {n}) for {g}")


def span_of(g: GroupoidElement) -> tuple[Morphism, Morphism, Filter]:
    """Derive (mu, nu, z) from the certificate and re-verify it."""
    m, n = g.cert
    mu = degree_witness(g.x, m)
    nu = degree_witness(g.y, n)
    z = act(g.x, m)
    if shift_on(mu, z) != g.x or shift_on(nu, z) != g.y:
        raise GroupoidError(f"span of {g} does not reproduce its sides")
    return mu, nu, z


def invert(g: GroupoidElement) -> GroupoidElement:
    m, n = g.cert
    return GroupoidElement(g.y, tuple(-c for c in g.q), g.x, (n, m))


def element_structure(g: GroupoidElement) -> tuple[GroupoidElement, GroupoidElement]:
    """(range unit, source unit) = (g g^-1, g^-1 g)."""
    return unit_element(g.x), unit_element(g.y)


def compose_elements(g: GroupoidElement, h: GroupoidElement) -> GroupoidElement:
    """(x, q, y)(y, r, z) = (x, q + r, z), with a fresh certificate found
    through the directedness of the shared filter."""
    if g.y != h.x:
        raise GroupoidError(f"elements not composable: {g} then {h}")
    m1, n1 = g.cert
    m2, n2 = h.cert
    l, _ = directed_witness(n1, m2, g.y)
    a, b = l.sub(n1), l.sub(m2)
    cert = (m1.add(a), n2.add(b))
    q = tuple(qa + qb for qa, qb in zip(g.q, h.q))
    out = GroupoidElement(g.x, q, h.y, cert)
    verify_certificate(out)
    return out


# -- enumeration ------------------------------------------------------------


def enumerate_pg(graph: KGraph, bound: Degree) -> list[GroupoidElement]:
    """All elements with spans drawn from the bounded enumeration whose
    sides stay inside the enumerated filter fragment, deduped on
    (x, q, y).  The restriction keeps the fragment closed under
    composition and inversion."""
    out: dict[GroupoidElement, GroupoidElement] = {}
    morphs = graph.enumerate_morphisms(bound).morphisms
    known = set(ps_filters(graph, bound).filters)
    for z in sorted(known, key=Filter.sort_key):
        sources = [m for m in morphs if m.source == z.range]
        for mu, nu in itertools.product(sources, sources):
            try:
                g = make_element(mu, nu, z)
            except SpanRejectedError:
                continue
            if g.x in known and g.y in known:
                out.setdefault(g, g)
    return sorted(out.values(), key=GroupoidElement.sort_key)


# -- basic sets --------------------------------------------------------------


@dataclass(frozen=True)
class BasicGroupoidSet:
    """Z(mu \\ J; nu \\ K) with mu, nu carrying FA verdicts True."""

    mu: Morphism
    nu: Morphism
    J: tuple[Morphism, ...] = ()
    K: tuple[Morphism, ...] = ()

    def __post_init__(self):
        for m in (self.mu, self.nu):
            if is_fa(m) is not Verdict.TRUE:
                raise GroupoidError(f"basic set parameter {m} lacks an FA certificate")

    def __str__(self) -> str:
        j = ",".join(str(m) for m in self.J)
        k = ",".join(str(m) for m in self.K)
        return f"Z({self.mu}\\{{{j}}}; {self.nu}\\{{{k}}})"


def basic_set_membership(g: GroupoidElement, b: BasicGroupoidSet) -> bool:
    if not (g.x.contains(b.mu) and not any(g.x.contains(j) for j in b.J)):
        return False
    if not (g.y.contains(b.nu) and not any(g.y.contains(k) for k in b.K)):
        return False
    if g.q != b.mu.degree.minus(b.nu.degree):
        return False
    return act(g.x, b.mu.degree) == act(g.y, b.nu.degree)


def paired_fa_witnesses(
    g: GroupoidElement,
    above_x: Iterable[Morphism] = (),
    above_y: Iterable[Morphism] = (),
) -> tuple[Morphism, Morphism]:
    """A pair mu in g.x, nu in g.y with both in FA, d(mu) - d(nu) = q and
    matching shifts, with mu above `above_x` and nu above `above_y`.

    Both sides are the certificate witnesses extended by one common tail
    inside the shared shifted filter, as in the basis-refinement proof.
    """
    graph = g.x.graph
    m, n = g.cert
    wx, wy = degree_witness(g.x, m), degree_witness(g.y, n)
    w = act(g.x, m)

    def tail_after(base: Morphism, kappa: Morphism, flt: Filter) -> Optional[Morphism]:
        if not graph.prefix_leq(base, kappa):
            return None
        for tau in w.elements:
            if graph.compose(base, tau) == kappa:
                return tau
        return None

    # tails forced by the "above" constraints
    needed: list[Morphism] = []
    for side, base, targets in (("x", wx, above_x), ("y", wy, above_y)):
        flt = g.x if side == "x" else g.y
        for t in targets:
            ext = next(
                (
                    k
                    for k in sorted(flt.elements, key=Morphism.sort_key)
                    if graph.prefix_leq(base, k) and graph.prefix_leq(t, k)
                ),
                None,
            )
            if ext is None:
                raise GroupoidError(f"{t} has no common extension with the witness in {flt}")
            tau = tail_after(base, ext, w)
            if tau is None:
                raise GroupoidError(f"tail extraction failed for {ext}")
            needed.append(tau)

    for tau in sorted(w.elements, key=Morphism.sort_key):
        if not all(graph.prefix_leq(t, tau) for t in needed):
            continue
        mu = graph.compose(wx, tau)
        nu = graph.compose(wy, tau)
        if is_fa(mu) is Verdict.TRUE and is_fa(nu) is Verdict.TRUE:
            return mu, nu
    raise GroupoidError(f"no paired FA witnesses found for {g}")


def enclosing_basic(
    g: GroupoidElement,
    above_x: Iterable[Morphism] = (),
    above_y: Iterable[Morphism] = (),
    J: Iterable[Morphism] = (),
    K: Iterable[Morphism] = (),
) -> BasicGroupoidSet:
    mu, nu = paired_fa_witnesses(g, above_x, above_y)
    b = BasicGroupoidSet(mu, nu, tuple(J), tuple(K))
    if not basic_set_membership(g, b):
        raise GroupoidError(f"constructed basic set {b} misses {g}")
    return b


# -- boundary-path groupoid ---------------------------------------------------


def bpg_membership(g: GroupoidElement, bound: Degree) -> tuple[bool, bool]:
    """(member, exact): both sides lie in the enumerated boundary-path
    space; the second component is that enumeration's exactness flag."""
    bps = bps_enumerate(g.x.graph, bound)
    member = g.x in set(bps.filters) and g.y in set(bps.filters)
    return member, bps.exact


def invariance_check(graph: KGraph, bound: Degree) -> dict:
    """BPS as an invariant unit-space subset: sources in BPS force ranges
    in BPS over all enumerated elements; closedness against the declared
    limit families.

    When the boundary enumeration is not exact, raw mismatches at the
    bound are reported as boundary cases rather than definite
    violations (the truncated scan can certify points that the true
    boundary does not contain)."""
    bps_res = bps_enumerate(graph, bound)
    bps = set(bps_res.filters)
    bad = [
        g
        for g in enumerate_pg(graph, bound)
        if g.y in bps and g.x not in bps
    ]
    closed_bad = []
    for seq in declared_sequences(graph):
        terms = [Filter(graph, t.elements) for t in seq.terms()]
        if not all(t in bps for t in terms):
            continue
        res = pointwise_limit(seq, default_probe(graph, bound, seq))
        if res.outcome is not LimitOutcome.CONVERGES or not res.complete:
            continue
        ok, _ = is_filter(res.limit)
        if ok:
            lim = Filter(graph, res.limit.elements)
            if in_ps(lim) and lim not in bps:
                closed_bad.append(seq.description)
    raw = [str(g) for g in bad[:5]] + closed_bad[:5]
    if not raw:
        verdict = "pass"
    elif bps_res.exact:
        verdict = "violations"
    else:
        verdict = "unknown_at_bound"
    return {
        "ok": verdict != "violations",
        "verdict": verdict,
        "bps_exact": bps_res.exact,
        "bps_size": len(bps),
        "invariance_violations": [str(g) for g in bad[:5]] if verdict == "violations" else [],
        "boundary_cases": raw if verdict == "unknown_at_bound" else [],
        "closure_violations": closed_bad[:5] if verdict == "violations" else [],
    }


# -- axiom suite --------------------------------------------------------------


def axiom_suite(graph: KGraph, bound: Degree) -> dict:
    """Groupoid axioms over every enumerated element: coherence of
    composability, associativity, inverse and unit laws, plus span
    round-trips and certificate re-verification."""
    elements = enumerate_pg(graph, bound)
    bad: list = []
    for g in elements:
        verify_certificate(g)
        mu, nu, z = span_of(g)
        if make_element(mu, nu, z) != g:
            bad.append(("span-roundtrip", str(g)))
        gi = invert(g)
        verify_certificate(gi)
        if invert(gi) != g:
            bad.append(("involution", str(g)))
        if compose_elements(g, gi) != unit_element(g.x):
            bad.append(("g.g^-1", str(g)))
        if compose_elements(gi, g) != unit_element(g.y):
            bad.append(("g^-1.g", str(g)))
        r_unit, s_unit = element_structure(g)
        if compose_elements(r_unit, g) != g or compose_elements(g, s_unit) != g:
            bad.append(("unit law", str(g)))

    by_x: dict[Filter, list[GroupoidElement]] = {}
    for g in elements:
        by_x.setdefault(g.x, []).append(g)
    pairs = [(g, h) for g in elements for h in by_x.get(g.y, [])]
    coherence = sum(
        1 for g in elements for h in elements if (g.y == h.x) != _coherent(g, h)
    )
    if coherence:
        bad.append(("coherence", coherence))

    comp_cache: dict[tuple[GroupoidElement, GroupoidElement], GroupoidElement] = {}

    def comp(g, h):
        key = (g, h)
        if key not in comp_cache:
            comp_cache[key] = compose_elements(g, h)
        return comp_cache[key]

    assoc_checked = 0
    for g, h in pairs:
        gh = comp(g, h)
        for k in by_x.get(h.y, []):
            assoc_checked += 1
            if comp(gh, k) != comp(g, comp(h, k)):
                bad.append(("associativity", str(g), str(h), str(k)))
    return {
        "ok": not bad,
        "elements": len(elements),
        "composable_pairs": len(pairs),
        "associativity_triples": assoc_checked,
        "counterexamples": [str(b) for b in bad[:5]],
    }


def _coherent(g: GroupoidElement, h: GroupoidElement) -> bool:
    return element_structure(g)[1] == element_structure(h)[0]


# -- topology evidence ---------------------------------------------------------


def separating_sets(
    g: GroupoidElement, h: GroupoidElement
) -> tuple[BasicGroupoidSet, BasicGroupoidSet]:
    """Disjoint basic sets around two distinct elements.

    Distinct q's separate through the degree data of any enclosing sets;
    otherwise some morphism lies in one side's filter and not the other's
    and becomes an include/exclude pair.
    """
    if g == h:
        raise GroupoidError("cannot separate an element from itself")
    if g.q != h.q:
        return enclosing_basic(g), enclosing_basic(h)
    for attr in ("x", "y"):
        fg, fh = getattr(g, attr), getattr(h, attr)
        if fg == fh:
            continue
        diff = sorted(fg.elements ^ fh.elements, key=Morphism.sort_key)
        kappa = diff[0]
        inner, outer, swapped = (g, h, False) if fg.contains(kappa) else (h, g, True)
        # kappa sits in inner's side and not in outer's
        if attr == "x":
            pair = (enclosing_basic(inner, above_x=[kappa]), enclosing_basic(outer, J=[kappa]))
        else:
            pair = (enclosing_basic(inner, above_y=[kappa]), enclosing_basic(outer, K=[kappa]))
        return (pair[1], pair[0]) if swapped else pair
    raise GroupoidError(f"{g} and {h} are equal as triples")


def hausdorff_ample_evidence(graph: KGraph, bound: Degree, sample: int = 60) -> dict:
    """Separation of distinct enumerated elements by provably disjoint
    basic sets (q-mismatch or an include/exclude pair), plus compactness
    flags on the basic unit sets from the escape-family prober."""
    from .pspace import compactness_probe  # local import to avoid a cycle at load

    elements = enumerate_pg(graph, bound)
    pairs = list(itertools.combinations(elements, 2))
    step = max(1, len(pairs) // sample)
    bad, checked = [], 0
    for g, h in pairs[::step]:
        checked += 1
        bg, bh = separating_sets(g, h)
        if basic_set_membership(g, bh) or basic_set_membership(h, bg):
            bad.append((str(g), str(h)))
            continue
        for e in elements:
            if basic_set_membership(e, bg) and basic_set_membership(e, bh):
                bad.append((str(g), str(h), f"intersect at {e}"))
                break
    unit_flags = {}
    for m in graph.enumerate_morphisms(bound).morphisms:
        if is_fa(m) is Verdict.TRUE:
            unit_flags[str(m)] = compactness_probe(m, bound).kind
    return {
        "ok": not bad,
        "separations_checked": checked,
        "counterexamples": [str(b) for b in bad[:5]],
        "unit_basic_set_compactness": unit_flags,
    }


def refinement_check(graph: KGraph, bound: Degree, sample: int = 40) -> dict:
    """Basis property: an element inside two basic sets owns a third
    basic set inside the intersection, built by extending both witness
    pairs through directedness."""
    elements = enumerate_pg(graph, bound)
    bad, checked = [], 0
    step = max(1, len(elements) // sample)
    for g in elements[::step]:
        b1 = enclosing_basic(g)
        b2 = enclosing_basic(g, J=_small_exclusion(graph, g, side="x"), K=())
        checked += 1
        try:
            b3 = enclosing_basic(
                g,
                above_x=[b1.mu, b2.mu],
                above_y=[b1.nu, b2.nu],
                J=b1.J + b2.J,
                K=b1.K + b2.K,
            )
        except GroupoidError as exc:
            bad.append((str(g), str(exc)))
            continue
        for e in elements:
            if basic_set_membership(e, b3) and not (
                basic_set_membership(e, b1) and basic_set_membership(e, b2)
            ):
                bad.append((str(g), f"refinement leaks at {e}"))
                break
    return {"ok": not bad, "checked": checked, "counterexamples": [str(b) for b in bad[:3]]}


def _small_exclusion(graph: KGraph, g: GroupoidElement, side: str) -> tuple:
    """A morphism absent from the chosen side's filter, as an exclusion."""
    flt = g.x if side == "x" else g.y
    for m in graph.enumerate_morphisms(Degree((1,) * graph.rank)).morphisms:
        if not flt.contains(m):
            return (m,)
    return ()


def unit_space_check(graph: KGraph, bound: Degree) -> dict:
    """x -> (x, 0, x) is a bijection onto the enumerated units and
    respects basic-set membership."""
    elements = enumerate_pg(graph, bound)
    units = [g for g in elements if g.is_unit()]
    ps = ps_filters(graph, bound).filters
    images = [unit_element(x) for x in ps]
    ok = sorted(map(str, units)) == sorted(map(str, images))
    mismatches = []
    for x in ps:
        u = unit_element(x)
        for m in sorted(x.elements, key=Morphism.sort_key):
            if is_fa(m) is not Verdict.TRUE:
                continue
            b = BasicGroupoidSet(m, m)
            if basic_set_membership(u, b) != (x.contains(m)):
                mismatches.append((str(x), str(m)))
    return {
        "ok": ok and not mismatches,
        "units": len(units),
        "ps_points": len(ps),
        "counterexamples": [str(t) for t in mismatches[:3]],
    }
