"""Irreducible SL(2,C) classes, Reidemeister torsion and torsion polynomials
for 1/n Dehn surgery on the figure-eight knot."""

from .config import RunConfig
from .numkernel import Poly, RootFindingError, poly_roots, resultant_t, working_precision
from .report import EnumerationReport, NumericalFailure, run_pipeline
from .repvariety import (
    Branch,
    Classification,
    DomainError,
    RepClass,
    RepPoint,
    SurgerySpec,
    classify,
    dedup_classes,
    enumerate_solutions,
    f_of,
    longitude_closed_form,
    word_matrix,
)
from .torsion import (
    CassonReport,
    SingularTorsionError,
    TorsionPolynomial,
    casson,
    sigma,
    sigma_for,
    sigma_symmetry_check,
    tau,
    torsion_spectrum,
)

__all__ = [
    "Branch",
    "CassonReport",
    "Classification",
    "DomainError",
    "EnumerationReport",
    "NumericalFailure",
    "Poly",
    "RepClass",
    "RepPoint",
    "RootFindingError",
    "RunConfig",
    "SingularTorsionError",
    "SurgerySpec",
    "TorsionPolynomial",
    "casson",
    "classify",
    "dedup_classes",
    "enumerate_solutions",
    "f_of",
    "longitude_closed_form",
    "poly_roots",
    "resultant_t",
    "run_pipeline",
    "sigma",
    "sigma_for",
    "sigma_symmetry_check",
    "tau",
    "torsion_spectrum",
    "word_matrix",
]
