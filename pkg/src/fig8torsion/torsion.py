"""Reidemeister torsion per class, the torsion polynomial and Casson counts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .numkernel import CxScalar, Poly, RoundingFailure, cx, round_to_rational, working_precision
from .repvariety import Classification, RepClass, SurgerySpec, dedup_classes, enumerate_solutions

SINGULAR_TOL = 1e-12
ZERO_TOL = 1e-10


class SingularTorsionError(ArithmeticError):
    """u = 0 or u^2 = 5: the closed formula has no finite value there."""


def tau(u, singular_tol: float = SINGULAR_TOL) -> CxScalar:
    """Torsion of M_n at a class with meridian trace u: 2(u-1) / (u^2 (u^2-5))."""
    u = cx(u)
    u2 = u * u
    if abs(u) < singular_tol or abs(u2 - 5) < singular_tol:
        raise SingularTorsionError(f"torsion formula is singular at u = {mpmath.nstr(u, 15)}")
    return 2 * (u - 1) / (u2 * (u2 - 5))


@dataclass(frozen=True)
class TorsionValue:
    value: CxScalar | None
    acyclic: bool
    class_ref: RepClass
    reason: str = ""


def torsion_spectrum(
    classes: Sequence[RepClass],
    *,
    zero_tol: float = ZERO_TOL,
    singular_tol: float = SINGULAR_TOL,
) -> list[TorsionValue]:
    """Torsion of every class; classes with zero or undefined torsion are kept but not acyclic."""
    specs = {c.members[0].spec for c in classes if c.members}
    if len(specs) > 1:
        raise ValueError("classes from several surgeries")
    out = []
    for c in classes:
        try:
            value = tau(c.u, singular_tol)
        except SingularTorsionError as exc:
            out.append(TorsionValue(None, False, c, str(exc)))
            continue
        if abs(value) <= zero_tol:
            out.append(TorsionValue(value, False, c, "torsion vanishes"))
        else:
            out.append(TorsionValue(value, True, c))
    return out


@dataclass(frozen=True)
class TorsionPolynomial:
    n: int
    complex_coeffs: Poly
    rounded_coeffs: tuple
    rounding_residual: float
    degree: int

    @property
    def exact(self) -> bool:
        return all(not isinstance(c, RoundingFailure) for c in self.rounded_coeffs)

    def rational_coeffs(self) -> list[Fraction]:
        if not self.exact:
            raise ValueError(f"sigma_{self.n} has coefficients that failed rational rounding")
        return list(self.rounded_coeffs)


def sigma(
    n: int,
    spectrum: Sequence[TorsionValue],
    tol: float = 1e-6,
    *,
    max_denominator: int = 1,
) -> TorsionPolynomial:
    """Monic product of (t - tau) over acyclic classes, rounded to rationals.

    Imaginary parts below ``tol`` relative to the real part are dropped
    before rounding.  An empty spectrum gives the constant polynomial 1.
    """
    values = [tv.value for tv in spectrum if tv.acyclic]
    if not values:
        return TorsionPolynomial(n, Poly([cx(1)]), (Fraction(1),), 0.0, 0)
    p = Poly.from_roots([cx(v) for v in values])
    cleaned = []
    for c in p.coeffs:
        if abs(c.imag) <= tol * max(1, abs(c.real)):
            c = mpmath.mpc(c.real, 0)
        cleaned.append(c)
    p = Poly(cleaned)
    rounded = []
    worst = mpmath.mpf(0)
    for c in p.coeffs:
        r = round_to_rational(c, tol, max_denominator)
        if isinstance(r, RoundingFailure):
            worst = max(worst, r.residual)
        else:
            scale = max(1, abs(c.real))
            worst = max(worst, abs(c - cx(r)) / scale)
        rounded.append(r)
    return TorsionPolynomial(n, p, tuple(rounded), float(worst), len(values))


@dataclass(frozen=True)
class CassonReport:
    n: int
    lambda_: int
    lambda_sl2c: int
    observed_su2_classes: int
    observed_total_classes: int
    observed_sl2r_classes: int
    consistent: bool


def casson_values(n: int) -> tuple[int, int]:
    """(Casson invariant, SL(2,C) Casson invariant) of the 1/n surgery."""
    SurgerySpec(n)
    return -n, 4 * n - 1


def casson(n: int, classes: Sequence[RepClass]) -> CassonReport:
    lam, lam_c = casson_values(n)
    su2 = sum(c.classification is Classification.SU2 for c in classes)
    sl2r = sum(c.classification is Classification.SL2R for c in classes)
    total = len(classes)
    consistent = su2 == 2 * abs(lam) and total == abs(lam_c)
    return CassonReport(n, lam, lam_c, su2, total, sl2r, consistent)


def sigma_for(n: int, *, precision: int = 128, tol: float = 1e-6) -> TorsionPolynomial:
    """Enumerate classes for 1/n surgery and build sigma_n; sigma_0 = 1 by convention."""
    if n == 0:
        return TorsionPolynomial(0, Poly([cx(1)]), (Fraction(1),), 0.0, 0)
    with working_precision(precision):
        classes = dedup_classes(enumerate_solutions(SurgerySpec(n)))
        return sigma(n, torsion_spectrum(classes), tol)


def sigma_symmetry_check(n_pos: int, *, precision: int = 128, tol: float = 1e-6) -> bool:
    """Compare rounded coefficients of sigma_n and sigma_-n."""
    if n_pos < 1:
        raise ValueError("n_pos must be >= 1")
    a = sigma_for(n_pos, precision=precision, tol=tol)
    b = sigma_for(-n_pos, precision=precision, tol=tol)
    return a.exact and b.exact and a.rounded_coeffs == b.rounded_coeffs
