"""Filters, cylinder sets, pointwise limits, and the path spaces.

Filters play the role of paths.  Everything here is computed on explicit
finite filters (all catalog phenomena live on finite filters and
N-indexed families of them); lazily profiled subsets exist for limits
that have no finite description, and carry an honesty flag instead of a
claim of completeness.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .alignment import Verdict, is_fa
from .catalog import MorphismFamily
from .degree import Degree
from .kgraph import KGraph, Morphism


class SubsetError(ValueError):
    pass


class ExplicitSubset:
    """A finite subset of Lambda, the workhorse view."""

    __slots__ = ("graph", "elements")

    def __init__(self, graph: KGraph, elements: Iterable[Morphism]):
        self.graph = graph
        self.elements = frozenset(elements)

    def contains(self, m: Morphism) -> bool:
        return m in self.elements

    def __iter__(self):
        return iter(sorted(self.elements, key=Morphism.sort_key))

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExplicitSubset)
            and self.graph is other.graph
            and self.elements == other.elements
        )

    def __hash__(self) -> int:
        return hash((id(self.graph), self.elements))

    def __str__(self) -> str:
        return "{" + ", ".join(str(m) for m in self) + "}"


class ProfiledSubset:
    """A lazily described subset: membership predicate plus an enumerator
    that only ever yields members.  `finite` records the declared
    cardinality, not an inference."""

    __slots__ = ("graph", "description", "_contains", "_enumerate", "finite")

    def __init__(self, graph, description, contains, enumerate_members, finite=False):
        self.graph = graph
        self.description = description
        self._contains = contains
        self._enumerate = enumerate_members
        self.finite = finite

    def contains(self, m: Morphism) -> bool:
        return self._contains(m)

    def enumerate_members(self, bound: Degree) -> list[Morphism]:
        out = [m for m in self._enumerate(bound)]
        bad = [m for m in out if not self.contains(m)]
        if bad:
            raise SubsetError(f"profiled enumerator yielded non-members: {bad[:3]}")
        return sorted(set(out), key=Morphism.sort_key)

    def __str__(self) -> str:
        return f"<profiled {self.description}>"


class Filter(ExplicitSubset):
    """An explicit finite filter; use :func:`make_filter` to validate."""

    @property
    def range(self):
        for m in self.elements:
            if m.is_unit():
                return m.range
        raise SubsetError("filter has no vertex")

    def sort_key(self):
        return (str(self.range), tuple(sorted(str(m) for m in self.elements)))


def is_filter(view, bound: Degree | None = None) -> tuple[bool, Optional[str]]:
    """Filter axioms with a counterexample message on failure.

    Exact for explicit subsets; profiled subsets are checked on their
    enumerated fragment below `bound`.
    """
    if isinstance(view, ProfiledSubset):
        if bound is None:
            raise SubsetError("profiled subsets need a bound to check")
        elements = view.enumerate_members(bound)
        graph = view.graph
        fragment = True
    else:
        elements = sorted(view.elements, key=Morphism.sort_key)
        graph = view.graph
        fragment = False
    if not elements:
        return False, "empty"
    units = [m for m in elements if m.is_unit()]
    if len(units) != 1:
        return False, f"contains {len(units)} vertices, expected exactly one"
    element_set = set(elements)
    for m in elements:
        if not fragment:
            for p in graph.prefixes(m):
                if p not in element_set:
                    return False, f"not hereditary: {p} below {m} is missing"
    for a, b in itertools.combinations(elements, 2):
        if not any(
            graph.prefix_leq(a, c) and graph.prefix_leq(b, c) for c in elements
        ):
            return False, f"not directed: no common extension of {a} and {b}"
    degrees = [m.degree.coords for m in elements]
    if len(set(degrees)) != len(degrees):
        return False, "degree map is not injective"
    return True, None


def make_filter(graph: KGraph, elements: Iterable[Morphism]) -> Filter:
    x = Filter(graph, elements)
    ok, reason = is_filter(x)
    if not ok:
        raise SubsetError(f"not a filter: {reason}")
    return x


def principal(lam: Morphism) -> Filter:
    """The principal filter of all prefixes of lam (finite: degrees below
    d(lam) are finitely many and factorisation is unique per degree)."""
    graph = lam.graph
    cache = getattr(graph, "_principal_cache", None)
    if cache is None:
        cache = graph._principal_cache = {}
    hit = cache.get(lam)
    if hit is None:
        hit = Filter(graph, graph.prefixes(lam))
        cache[lam] = hit
    return hit


@dataclass
class FilterList:
    filters: list[Filter]
    exact: bool


def enumerate_filters(graph: KGraph, bound: Degree) -> FilterList:
    """All filters over the bounded enumeration.

    Finite graphs are exact: a finite directed hereditary set has a
    maximum, so every filter is principal.  Infinite graphs yield the
    principal filters of enumerated morphisms plus declared non-principal
    families (none of the catalog graphs has any), flagged Truncated.
    """
    if graph.is_finite:
        seen = {principal(m) for m in graph.all_morphisms()}
        return FilterList(sorted(seen, key=Filter.sort_key), True)
    seen = {principal(m) for m in graph.enumerate_morphisms(bound).morphisms}
    return FilterList(sorted(seen, key=Filter.sort_key), False)


def ultrafilters(graph: KGraph, bound: Degree) -> FilterList:
    """Filters maximal among the enumerated ones; exact on finite graphs."""
    all_f = enumerate_filters(graph, bound)
    out = [
        x
        for x in all_f.filters
        if not any(y is not x and x.elements < y.elements for y in all_f.filters)
    ]
    return FilterList(sorted(out, key=Filter.sort_key), all_f.exact)


# -- cylinders -------------------------------------------------------------


@dataclass(frozen=True)
class Cylinder:
    """Z(K1 \\ K2): subsets containing K1 and avoiding K2."""

    include: tuple[Morphism, ...]
    exclude: tuple[Morphism, ...] = ()
    space: str = "F"

    def __str__(self) -> str:
        inc = ",".join(str(m) for m in self.include)
        exc = ",".join(str(m) for m in self.exclude)
        return f"Z({inc}\\{{{exc}}})"

    def to_json(self) -> dict:
        return {
            "in": sorted(str(m) for m in self.include),
            "out": sorted(str(m) for m in self.exclude),
        }


def cylinder(m: Morphism, exclude: Iterable[Morphism] = (), space: str = "F") -> Cylinder:
    return Cylinder((m,), tuple(exclude), space)


def cylinder_membership(view, cyl: Cylinder) -> bool:
    return all(view.contains(m) for m in cyl.include) and not any(
        view.contains(m) for m in cyl.exclude
    )


# -- described sequences and pointwise limits ------------------------------


@dataclass(frozen=True)
class DescribedSequence:
    """A sequence of subsets given by a finite irregular prefix plus a
    tail rule: either constant or the principal filters of a morphism
    family.  Limits depend on the tail only."""

    graph: KGraph
    constant: Optional[ExplicitSubset] = None
    family: Optional[MorphismFamily] = None
    prefix: tuple[ExplicitSubset, ...] = ()

    @staticmethod
    def constant_seq(view: ExplicitSubset) -> "DescribedSequence":
        return DescribedSequence(view.graph, constant=view)

    @staticmethod
    def principal_family(graph: KGraph, fam: MorphismFamily) -> "DescribedSequence":
        return DescribedSequence(graph, family=fam)

    @property
    def description(self) -> str:
        head = f"{len(self.prefix)} prefix terms, " if self.prefix else ""
        if self.constant is not None:
            return f"{head}constant {self.constant}"
        return f"{head}principal({self.family.description})"

    def tail_terms(self) -> list[ExplicitSubset]:
        if self.constant is not None:
            return [self.constant]
        return [principal(m) for m in self.family.members()]

    def terms(self) -> list[ExplicitSubset]:
        return list(self.prefix) + self.tail_terms()


class LimitOutcome(enum.Enum):
    CONVERGES = "converges"
    DIVERGENT = "divergent"


@dataclass
class LimitResult:
    outcome: LimitOutcome
    limit: Optional[ExplicitSubset]
    complete: bool
    decisions: dict

    def limit_is_filter(self) -> tuple[bool, Optional[str]]:
        if self.limit is None:
            return False, "no limit"
        return is_filter(self.limit)


def pointwise_limit(seq: DescribedSequence, probe: Iterable[Morphism]) -> LimitResult:
    """Decide eventual membership per probe element under the tail rule.

    For a disjoint principal family the terms share exactly their common
    part, so the limit is the intersection of the materialised terms and
    the computation is complete.  For an increasing family the limit is
    the union, reported as its bounded fragment with complete=False.
    """
    probe = sorted(set(probe), key=Morphism.sort_key)
    if seq.constant is not None:
        decisions = {
            str(m): "in" if seq.constant.contains(m) else "out" for m in probe
        }
        return LimitResult(LimitOutcome.CONVERGES, seq.constant, True, decisions)

    fam = seq.family
    terms = seq.tail_terms()
    n_terms = len(terms)
    decisions: dict[str, str] = {}
    divergent = False
    complete = True

    if fam.flavor == "disjoint":
        limit_elems = frozenset.intersection(*[t.elements for t in terms])
        for m in probe:
            support = sum(1 for t in terms if t.contains(m))
            if support == n_terms:
                decisions[str(m)] = "in"
            elif support <= 1:
                decisions[str(m)] = "out"
            else:
                decisions[str(m)] = "oscillating"
                divergent = True
        for m in limit_elems:
            decisions.setdefault(str(m), "in")
    elif fam.flavor == "increasing":
        last = terms[-1]
        limit_elems = last.elements
        complete = False
        for m in probe:
            if last.contains(m):
                decisions[str(m)] = "in"
            elif m.degree.leq(fam.member(fam.indices[-1]).degree):
                decisions[str(m)] = "out"
            else:
                decisions[str(m)] = "undecided"
    else:
        raise SubsetError(f"unknown family flavor {fam.flavor!r}")

    if divergent:
        return LimitResult(LimitOutcome.DIVERGENT, None, complete, decisions)
    return LimitResult(
        LimitOutcome.CONVERGES, ExplicitSubset(seq.graph, limit_elems), complete, decisions
    )


def default_probe(graph: KGraph, bound: Degree, seq: DescribedSequence) -> list[Morphism]:
    """All morphisms of degree <= bound plus everything named by the
    sequence; enough to decide filterhood of the limit at the bound."""
    probe = set(graph.enumerate_morphisms(bound).morphisms)
    for t in seq.terms():
        probe.update(t.elements)
    return sorted(probe, key=Morphism.sort_key)


# -- path space and boundary-path space ------------------------------------


def ps_membership(x: Filter) -> tuple[Verdict, dict]:
    """Does x meet FA(Lambda)?  Certified through the stronger form: every
    element of x should admit an FA extension inside x."""
    cache = getattr(x.graph, "_ps_cache", None)
    if cache is None:
        cache = x.graph._ps_cache = {}
    hit = cache.get(x)
    if hit is not None:
        return hit
    out = _ps_membership_uncached(x)
    cache[x] = out
    return out


def _ps_membership_uncached(x: Filter) -> tuple[Verdict, dict]:
    verdicts = {m: is_fa(m) for m in x.elements}
    record: dict = {}
    if any(v is Verdict.TRUE for v in verdicts.values()):
        witnesses = {}
        for lam in x.elements:
            ext = [
                m
                for m in x.elements
                if verdicts[m] is Verdict.TRUE and x.graph.prefix_leq(lam, m)
            ]
            if not ext:
                # contradicts the strengthened characterisation; surface it
                return Verdict.FALSE, {"inconsistent_at": str(lam)}
            witnesses[str(lam)] = str(sorted(ext, key=Morphism.sort_key)[0])
        record["witnesses"] = witnesses
        return Verdict.TRUE, record
    if all(v is Verdict.FALSE for v in verdicts.values()):
        return Verdict.FALSE, record
    return Verdict.UNKNOWN_AT_BOUND, record


def in_ps(x: Filter) -> bool:
    return ps_membership(x)[0] is Verdict.TRUE


def ps_filters(graph: KGraph, bound: Degree) -> FilterList:
    all_f = enumerate_filters(graph, bound)
    return FilterList([x for x in all_f.filters if in_ps(x)], all_f.exact)


def declared_sequences(graph: KGraph) -> list[DescribedSequence]:
    ann = graph.annotations
    if ann is None:
        return []
    return [DescribedSequence.principal_family(graph, fam) for fam in ann.filter_families]


def bps_enumerate(graph: KGraph, bound: Degree) -> FilterList:
    """Ultrafilters meeting PS plus the declared-family limits that land
    in PS.  Exact for finite graphs, where the filter space is discrete
    and the closure adds nothing."""
    ultra = ultrafilters(graph, bound)
    out = {x for x in ultra.filters if in_ps(x)}
    exact = ultra.exact
    for seq in declared_sequences(graph):
        if not all(in_ps(Filter(graph, t.elements)) for t in seq.terms()):
            # sequence does not live in PS; its limit is irrelevant here
            continue
        res = pointwise_limit(seq, default_probe(graph, bound, seq))
        if res.outcome is not LimitOutcome.CONVERGES:
            continue
        if not res.complete:
            exact = False
            continue
        ok, _ = is_filter(res.limit)
        if ok:
            x = Filter(graph, res.limit.elements)
            if in_ps(x):
                out.add(x)
    return FilterList(sorted(out, key=Filter.sort_key), exact)


# -- compactness probes -----------------------------------------------------


@dataclass
class CompactEvidence:
    kind: str  # Compact | NonCompact | ConsistentWithCompact | UnknownAtBound
    family: Optional[str] = None
    limit: Optional[list[str]] = None
    reason: str = ""


def compactness_probe(
    lam: Morphism,
    bound: Degree,
    families: Optional[list[DescribedSequence]] = None,
) -> CompactEvidence:
    """Executable evidence for the compactness characterisation of Z(lam).

    Finite graphs: exact (finite subspaces are compact).  For lam outside
    FA, an escape certificate: a described sequence inside Z(lam) whose
    pointwise limit (shared by every subsequence, the tails being
    principal families) is not a filter, so no subsequence converges in
    the space.  For annotated lam in FA, every supplied family must have
    a convergent subsequence with a filter limit.
    """
    graph = lam.graph
    if graph.is_finite:
        return CompactEvidence("Compact", reason="finite subspace")
    verdict = is_fa(lam)
    ann = graph.annotations
    if verdict is Verdict.FALSE:
        fam = ann.escape_family(lam) if ann is not None else None
        if fam is None:
            return CompactEvidence("UnknownAtBound", reason="no escape family declared")
        seq = DescribedSequence.principal_family(graph, fam)
        for t in seq.terms():
            if not t.contains(lam):
                raise SubsetError(f"escape family {fam.description} leaves Z({lam})")
        res = pointwise_limit(seq, default_probe(graph, bound, seq))
        ok, why = res.limit_is_filter()
        if res.outcome is LimitOutcome.CONVERGES and not ok:
            return CompactEvidence(
                "NonCompact",
                family=seq.description,
                limit=[str(m) for m in res.limit],
                reason=f"limit is not a filter: {why}",
            )
        return CompactEvidence("UnknownAtBound", reason="escape family did not certify")
    if verdict is Verdict.TRUE:
        supplied = families is not None
        seqs = families if supplied else declared_sequences(graph)
        used, limits = [], []
        for seq in seqs:
            if not all(t.contains(lam) for t in seq.terms()):
                if supplied:
                    raise SubsetError(
                        f"supplied family {seq.description} has terms outside Z({lam})"
                    )
                continue
            res = pointwise_limit(seq, default_probe(graph, bound, seq))
            ok, why = res.limit_is_filter()
            if res.outcome is not LimitOutcome.CONVERGES or not ok or not res.limit.contains(lam):
                return CompactEvidence(
                    "UnknownAtBound",
                    family=seq.description,
                    reason=f"family in Z({lam}) has no filter limit in Z({lam}): {why}",
                )
            used.append(seq.description)
            limits.append(str(res.limit))
        return CompactEvidence(
            "ConsistentWithCompact",
            family="; ".join(used) or None,
            limit=limits or None,
            reason="every declared family in the cylinder converges inside it",
        )
    return CompactEvidence("UnknownAtBound", reason="FA membership unknown at bound")


# -- property suites --------------------------------------------------------


def check_ps_characterisations_agree(graph: KGraph, bound: Degree) -> dict:
    """The defining predicate (x meets FA) and the strengthened one
    (every element of x extends into x cap FA) agree on every enumerated
    filter."""
    bad, checked = [], 0
    for x in enumerate_filters(graph, bound).filters:
        checked += 1
        meets_fa = any(is_fa(m) is Verdict.TRUE for m in x.elements)
        strengthened = all(
            any(
                is_fa(k) is Verdict.TRUE and x.graph.prefix_leq(m, k)
                for k in x.elements
            )
            for m in x.elements
        )
        if meets_fa != strengthened:
            bad.append(str(x))
        if (ps_membership(x)[0] is Verdict.TRUE) != meets_fa:
            bad.append(f"verdict disagrees at {x}")
    return {"ok": not bad, "checked": checked, "counterexamples": bad[:3]}


def check_basis_property(graph: KGraph, bound: Degree, sample: int = 40) -> dict:
    """Basis check on the filter space: every filter inside Z(K1\\K2)
    with K1 nonempty sits inside some Z(mu\\K2) contained in it."""
    filters = enumerate_filters(graph, bound).filters
    morphs = graph.enumerate_morphisms(bound).morphisms
    singles = [(m,) for m in morphs]
    pairs = list(itertools.combinations(morphs, 2))
    k1s = singles + pairs
    k2s = [()] + singles
    bad, checked = [], 0
    rng = _det_rng(sample)
    for K1 in k1s:
        for K2 in k2s:
            for x in filters:
                if not all(x.contains(m) for m in K1) or any(x.contains(m) for m in K2):
                    continue
                checked += 1
                mu = _upper_bound_in(x, K1)
                if mu is None:
                    bad.append((K1, K2, x, "no directed upper bound"))
                    continue
                if any(q not in set(graph.prefixes(mu)) for q in K1):
                    bad.append((K1, K2, x, "K1 not below mu"))
                if rng() < 0.05:  # pointwise containment spot-check
                    for y in filters:
                        if y.contains(mu) and not any(y.contains(m) for m in K2):
                            if not all(y.contains(m) for m in K1):
                                bad.append((K1, K2, y, "containment fails"))
    return {"ok": not bad, "checked": checked, "counterexamples": [str(b[:3]) for b in bad[:3]]}


def _upper_bound_in(x: Filter, K1) -> Optional[Morphism]:
    for mu in sorted(x.elements, key=Morphism.sort_key):
        if all(x.graph.prefix_leq(q, mu) for q in K1):
            return mu
    return None


def _det_rng(seed: int):
    state = [seed * 2654435761 % 2**32]

    def nxt() -> float:
        state[0] = (1103515245 * state[0] + 12345) % 2**31
        return state[0] / 2**31

    return nxt


def check_ps_open(graph: KGraph, bound: Degree) -> dict:
    """PS is open in F(Lambda): each x in PS owns a basic set Z(mu) with
    mu in FA that stays inside PS, verified over the enumeration."""
    all_f = enumerate_filters(graph, bound).filters
    ps = [x for x in all_f if in_ps(x)]
    bad = []
    for x in ps:
        mus = [m for m in x.elements if is_fa(m) is Verdict.TRUE]
        if not mus:
            bad.append((x, "no FA witness"))
            continue
        mu = sorted(mus, key=Morphism.sort_key)[0]
        for y in all_f:
            if y.contains(mu) and not in_ps(y):
                bad.append((x, f"Z({mu}) leaves PS at {y}"))
    return {"ok": not bad, "ps_size": len(ps), "counterexamples": [str(b) for b in bad[:3]]}


def check_filters_equal_ps(graph: KGraph, bound: Degree) -> dict:
    """In the finitely aligned case every filter is a path."""
    all_f = enumerate_filters(graph, bound).filters
    bad = [x for x in all_f if not in_ps(x)]
    return {"ok": not bad, "filters": len(all_f), "counterexamples": [str(x) for x in bad[:3]]}


def check_convergence_decisions(graph: KGraph, bound: Degree) -> dict:
    """Limit decisions match raw eventual membership on every declared
    family: in iff eventually inside, out iff eventually outside.

    The oracle recomputes per-term membership from scratch and reads the
    support pattern.  An element appearing only in the very last
    materialised term is undecidable at the bound and skipped.
    """
    bad, checked, skipped = [], 0, 0
    for seq in declared_sequences(graph):
        probe = default_probe(graph, bound, seq)
        res = pointwise_limit(seq, probe)
        if res.outcome is not LimitOutcome.CONVERGES:
            bad.append((seq.description, "did not converge"))
            continue
        terms = seq.tail_terms()
        n = len(terms)
        for m in probe:
            support = [i for i, t in enumerate(terms) if t.contains(m)]
            decision = res.decisions.get(str(m), "out")
            is_suffix = bool(support) and support == list(range(support[0], n))
            checked += 1
            if support == [n - 1]:
                skipped += 1  # boundary of the materialisation
            elif support and is_suffix:
                if decision != "in":
                    bad.append((seq.description, str(m), "eventually inside, not claimed in"))
            elif not support:
                if decision not in ("out", "undecided"):
                    bad.append((seq.description, str(m), "eventually outside, not claimed out"))
            elif support[-1] < n - 1:
                if decision != "out":
                    bad.append((seq.description, str(m), "eventually outside, not claimed out"))
            else:
                bad.append((seq.description, str(m), "oscillating support"))
    return {
        "ok": not bad,
        "checked": checked,
        "boundary_skipped": skipped,
        "counterexamples": [str(b) for b in bad[:3]],
    }
