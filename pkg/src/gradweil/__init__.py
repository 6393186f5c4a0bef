"""Exact Chern-Weil calculus for Lie algebroids over polynomial charts."""

from .algebroid import Algebroid, AxiomReport, Chart, Subframe, tangent_algebroid
from .chernweil import (
    CharacterForm,
    CohomologyBasis,
    ExactnessResult,
    MasseyReport,
    ScaledClass,
    anchor_pullback_character,
    ce_cohomology,
    class_status,
    default_bound,
    invariant_poly_f,
    invariant_polys,
    is_exact,
    massey_triple,
    pontryagin_class,
    sigma_character,
    total_pontryagin,
    transgression,
)
from .connections import (
    ConnectionUpToHomotopy,
    LinearConnection,
    cuth_difference,
    extend_connection,
    induced_hom_connection,
    restrict_connection,
    two_term_connection,
)
from .constructions import (
    adjoint_rep,
    atiyah_form,
    basic_connections,
    basic_curvature,
    bott_report,
    check_morphism,
    double_rep,
    graded_bott_report,
    iis_check,
    iis_default_extension,
    iis_obstruction,
    morphism_rep,
    report_passed,
    square_zero_check,
)
from .forms import (
    Form,
    GradedBundle,
    GradedElement,
    TotalForm,
    graded_commutator,
    gtr,
    hat_roundtrip,
    ideal_membership,
    render_form,
    tr,
    wedge_apply,
)
from .ring import Poly, Rational

__version__ = "0.1.0"

__all__ = [
    "Algebroid",
    "AxiomReport",
    "Chart",
    "CharacterForm",
    "CohomologyBasis",
    "ConnectionUpToHomotopy",
    "ExactnessResult",
    "Form",
    "GradedBundle",
    "GradedElement",
    "LinearConnection",
    "MasseyReport",
    "Poly",
    "Rational",
    "ScaledClass",
    "Subframe",
    "TotalForm",
    "adjoint_rep",
    "anchor_pullback_character",
    "atiyah_form",
    "basic_connections",
    "basic_curvature",
    "bott_report",
    "ce_cohomology",
    "check_morphism",
    "class_status",
    "cuth_difference",
    "default_bound",
    "double_rep",
    "extend_connection",
    "graded_bott_report",
    "graded_commutator",
    "gtr",
    "hat_roundtrip",
    "ideal_membership",
    "iis_check",
    "iis_default_extension",
    "iis_obstruction",
    "induced_hom_connection",
    "invariant_poly_f",
    "invariant_polys",
    "is_exact",
    "massey_triple",
    "morphism_rep",
    "pontryagin_class",
    "render_form",
    "report_passed",
    "restrict_connection",
    "sigma_character",
    "square_zero_check",
    "tangent_algebroid",
    "total_pontryagin",
    "tr",
    "transgression",
    "two_term_connection",
    "wedge_apply",
    "__version__",
]
