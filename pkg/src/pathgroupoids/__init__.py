"""Higher-rank graphs, their finitely aligned parts, filter path spaces,
shift-map actions and path groupoids, computed by bounded enumeration.
"""

from .degree import Degree, DegreeMonoid, NkMonoid
from .kgraph import (
    ComposabilityError,
    FactorizationError,
    KGraph,
    KGraphError,
    Morphism,
    Name,
    PresentationError,
    load_presentation,
)
from .alignment import FaVerdict, MceKind, MceResult, Verdict, fa_at, fa_set, is_fa, mce
from .pspace import (
    Cylinder,
    DescribedSequence,
    ExplicitSubset,
    Filter,
    ProfiledSubset,
    bps_enumerate,
    compactness_probe,
    cylinder_membership,
    enumerate_filters,
    is_filter,
    make_filter,
    pointwise_limit,
    principal,
    ps_membership,
    ultrafilters,
)
from .action import act, directed_witness, domain_membership, shift_off, shift_on
from .groupoid import (
    BasicGroupoidSet,
    GroupoidElement,
    basic_set_membership,
    compose_elements,
    enumerate_pg,
    invert,
    make_element,
    unit_element,
)
from .spielberg import (
    EHatSet,
    SpielbergTriple,
    UnsupportedDomainError,
    e_hat_membership,
    iso_check,
    phi,
    relative_filter_space,
    sp_compose,
    triple_equiv,
)
from . import catalog

__all__ = [
    "Degree", "DegreeMonoid", "NkMonoid",
    "KGraph", "Morphism", "Name", "load_presentation",
    "KGraphError", "PresentationError", "ComposabilityError", "FactorizationError",
    "Verdict", "MceKind", "MceResult", "FaVerdict", "mce", "fa_at", "fa_set", "is_fa",
    "Filter", "ExplicitSubset", "ProfiledSubset", "Cylinder", "DescribedSequence",
    "is_filter", "make_filter", "principal", "enumerate_filters", "ultrafilters",
    "cylinder_membership", "pointwise_limit", "ps_membership", "bps_enumerate",
    "compactness_probe",
    "shift_off", "shift_on", "act", "domain_membership", "directed_witness",
    "GroupoidElement", "BasicGroupoidSet", "make_element", "unit_element",
    "compose_elements", "invert", "basic_set_membership", "enumerate_pg",
    "EHatSet", "SpielbergTriple", "e_hat_membership", "triple_equiv", "sp_compose",
    "phi", "iso_check", "relative_filter_space", "UnsupportedDomainError",
    "catalog",
]
