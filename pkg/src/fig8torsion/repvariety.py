"""SL(2,C) representations of 1/n surgeries on the figure-eight knot.

Generators are normalised to

    X = [[s, 1], [0, 1/s]],    Y = [[s, 0], [-t, 1/s]],

the knot-group relator ``wx = yw`` with ``w = x y^-1 x^-1 y`` collapses to
the single equation ``f(s, t) = t^2 + (5 - u^2)(t + 1) = 0`` where
``u = s + 1/s``, and the surgery relation ``x l^n = 1`` with longitude
``l = w^-1 w~``, ``w~ = x^-1 y x y^-1``, is imposed through the upper
triangular matrix ``D = X - L^-n``.

Words are strings over ``x, y`` with upper case letters for inverses, so the
longitude is ``"YxyXXyxY"``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import mpmath

from .numkernel import (
    CxScalar,
    LaurentPoly,
    Poly,
    STPoly,
    cx,
    poly_gcd,
    poly_roots,
    resultant_t,
    working_precision,
)

log = logging.getLogger(__name__)

WORD_W = "xYXy"
WORD_W_TILDE = "XyxY"
WORD_LONGITUDE = "YxyX" + "XyxY"  # w^-1 w~
WORD_RELATOR_LHS = WORD_W + "x"
WORD_RELATOR_RHS = "y" + WORD_W

DEGENERATE_EIGENVALUE_TOL = 1e-20


class DomainError(ValueError):
    """Parameter outside the domain of the parametrisation (s = 0, n = 0)."""


class Branch(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS else -1


class Classification(str, enum.Enum):
    SU2 = "SU2"
    SL2R = "SL2R"
    COMPLEX = "complex"


@dataclass(frozen=True)
class SurgerySpec:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n == 0:
            raise DomainError(f"surgery coefficient 1/n needs a nonzero integer n, got {self.n!r}")


# ---------------------------------------------------------------------------
# 2x2 matrices


@dataclass(frozen=True)
class Mat2:
    a11: CxScalar
    a12: CxScalar
    a21: CxScalar
    a22: CxScalar

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(cx(1), cx(0), cx(0), cx(1))

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )

    def __sub__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)

    def det(self) -> CxScalar:
        return self.a11 * self.a22 - self.a12 * self.a21

    def trace(self) -> CxScalar:
        return self.a11 + self.a22

    def inv(self) -> "Mat2":
        d = self.det()
        return Mat2(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)

    def norm_inf(self) -> mpmath.mpf:
        return max(abs(self.a11), abs(self.a12), abs(self.a21), abs(self.a22))

    def entries(self) -> tuple:
        return (self.a11, self.a12, self.a21, self.a22)

    def conj_transpose(self) -> "Mat2":
        c = mpmath.conj
        return Mat2(c(self.a11), c(self.a21), c(self.a12), c(self.a22))


def _check_s(s) -> CxScalar:
    s = cx(s)
    if s == 0:
        raise DomainError("s must be nonzero")
    return s


def generators(s, t) -> dict[str, Mat2]:
    s = _check_s(s)
    t = cx(t)
    X = Mat2(s, cx(1), cx(0), 1 / s)
    Y = Mat2(s, cx(0), -t, 1 / s)
    return {"x": X, "y": Y, "X": X.inv(), "Y": Y.inv()}


def word_matrix(word: str, s, t) -> Mat2:
    """Left-to-right product of generator matrices for an explicit ``t``."""
    if not word:
        raise ValueError("word must be nonempty")
    gens = generators(s, t)
    out = gens[word[0]]
    for letter in word[1:]:
        out = out @ gens[letter]
    return out


# ---------------------------------------------------------------------------
# the defining equation and its branches


def f_of(s, t) -> CxScalar:
    """f(s,t) = 3 - 1/s^2 - s^2 + 3t - t/s^2 - s^2 t + t^2."""
    s = _check_s(s)
    t = cx(t)
    s2 = s * s
    return 3 - 1 / s2 - s2 + 3 * t - t / s2 - s2 * t + t * t


def discriminant(s) -> CxScalar:
    """The octic 1 - 2s^2 - s^4 - 2s^6 + s^8 under the square root of t_+-."""
    s2 = cx(s) ** 2
    return 1 + s2 * (-2 + s2 * (-1 + s2 * (-2 + s2)))


def t_branch(s, b: Branch) -> CxScalar:
    s = _check_s(s)
    s2 = s * s
    root = mpmath.sqrt(discriminant(s))
    return (1 - 3 * s2 + s2 * s2 + b.sign * root) / (2 * s2)


def build_word(s, b: Branch, word: str) -> Mat2:
    """Matrix of ``word`` at the point ``(s, t_b(s))`` of the character variety."""
    return word_matrix(word, s, t_branch(s, b))


def longitude_closed_form(s, b: Branch) -> Mat2:
    """Closed-form entries of the longitude matrix on branch ``b``.

    With ``q = sqrt(1 - 2s^2 - s^4 - 2s^6 + s^8)`` and
    ``A = -1 + 1/(2s^4) - 1/(2s^2) - s^2/2 + s^4/2`` the diagonal is
    ``A +- (q/2 - q/(2s^4))`` and ``L12 = +-(q/s^3 + q/s)``.
    """
    s = _check_s(s)
    q = mpmath.sqrt(discriminant(s))
    s2 = s * s
    s4 = s2 * s2
    a = -1 + 1 / (2 * s4) - 1 / (2 * s2) - s2 / 2 + s4 / 2
    e = b.sign
    diag = q / 2 - q / (2 * s4)
    return Mat2(a + e * diag, e * (q / (s2 * s) + q / s), cx(0), a - e * diag)


# ---------------------------------------------------------------------------
# surgery relation


def upper_triangular_power(m: Mat2, k: int) -> Mat2:
    """``m**k`` for upper triangular ``m`` with unit determinant (any integer k)."""
    lam, off = m.a11, m.a12
    if k < 0:
        lam, off, k = m.a22, -m.a12, -k
    lam_inv = 1 / lam
    if abs(lam - lam_inv) < DEGENERATE_EIGENVALUE_TOL:
        scale = k * lam ** (k - 1)
    else:
        scale = (lam**k - lam_inv**k) / (lam - lam_inv)
    return Mat2(lam**k, off * scale, cx(0), lam_inv**k)


def surgery_matrix(spec: SurgerySpec, s, b: Branch, t=None) -> Mat2:
    """D = X - L^-n.  ``t`` defaults to the branch value ``t_b(s)``."""
    s = _check_s(s)
    if t is None:
        t = t_branch(s, b)
    L = word_matrix(WORD_LONGITUDE, s, t)
    X = generators(s, t)["x"]
    return X - upper_triangular_power(L, -spec.n)


def surgery_system(spec: SurgerySpec, s, b: Branch, t=None) -> tuple[CxScalar, CxScalar]:
    D = surgery_matrix(spec, s, b, t)
    return D.a11, D.a12


def real_parameter_intervals() -> list["Interval"]:
    """Real s with nonnegative discriminant, i.e. both t-branches real."""
    five = mpmath.sqrt(5)
    hi = mpmath.sqrt((3 + five) / 2)
    lo = mpmath.sqrt((3 - five) / 2)
    inf = mpmath.inf
    return [
        Interval(-inf, -hi, False, True),
        Interval(-lo, mpmath.mpf(0), True, False),
        Interval(mpmath.mpf(0), lo, False, True),
        Interval(hi, inf, True, False),
    ]


@dataclass(frozen=True)
class Interval:
    lo: mpmath.mpf
    hi: mpmath.mpf
    lo_closed: bool
    hi_closed: bool

    def __contains__(self, x) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return bool(above and below)


# ---------------------------------------------------------------------------
# exact polynomial forms over Z[s, 1/s][t] / (f)


def f_poly() -> STPoly:
    """f as a polynomial in t: t^2 + c t + c with c = 3 - s^2 - s^-2."""
    c = LaurentPoly({0: 3, 2: -1, -2: -1})
    return STPoly([c, c, 1])


def _ring_generators() -> dict[str, tuple]:
    s = STPoly.s()
    si = STPoly.s(-1)
    t = STPoly.t()
    zero, one = STPoly([0]), STPoly([1])
    return {
        "x": (s, one, zero, si),
        "X": (si, -one, zero, s),
        "y": (s, zero, -t, si),
        "Y": (si, zero, t, s),
    }


def _ring_mul(a, b, f):
    return tuple(
        (x1 * y1 + x2 * y2).rem_monic(f)
        for x1, x2, y1, y2 in (
            (a[0], a[1], b[0], b[2]),
            (a[0], a[1], b[1], b[3]),
            (a[2], a[3], b[0], b[2]),
            (a[2], a[3], b[1], b[3]),
        )
    )


@lru_cache(maxsize=None)
def symbolic_word(word: str) -> tuple:
    """Entries of a word matrix as exact elements of Z[s^+-1][t]/(f)."""
    f = f_poly()
    gens = _ring_generators()
    out = gens[word[0]]
    for letter in word[1:]:
        out = _ring_mul(out, gens[letter], f)
    return out


@dataclass(frozen=True, eq=False)
class SurgeryEquations:
    """Exact surgery equations reduced modulo f, and their elimination in s."""

    n: int
    d11: STPoly
    d12: STPoly
    res11: Poly
    res12: Poly
    eliminant: Poly


@lru_cache(maxsize=None)
def surgery_equations(n: int) -> SurgeryEquations:
    """Build D11, D12 over Z[s^+-1][t]/(f) and eliminate t by resultants."""
    SurgerySpec(n)
    f = f_poly()
    L = symbolic_word(WORD_LONGITUDE)
    # D = X - M^k with M = L^-1 (n > 0) or L (n < 0), k = |n|
    if n > 0:
        m = (L[3], -L[1], STPoly([0]), L[0])
    else:
        m = L
    k = abs(n)
    power = m
    for _ in range(k - 1):
        power = _ring_mul(power, m, f)
    d11 = (STPoly.s() - power[0]).rem_monic(f)
    d12 = (STPoly([1]) - power[1]).rem_monic(f)
    r11 = resultant_t(f, d11)
    r12 = resultant_t(f, d12)
    g = poly_gcd(r11, r12)
    while g.coeffs[0] == 0:  # s = 0 is excluded
        g = Poly(g.coeffs[1:])
    return SurgeryEquations(n, d11, d12, r11, r12, g)


# ---------------------------------------------------------------------------
# solutions and classes


@dataclass(frozen=True)
class Residuals:
    f: mpmath.mpf
    relator: mpmath.mpf
    surgery: mpmath.mpf
    d11: mpmath.mpf
    d12: mpmath.mpf
    d22: mpmath.mpf

    def worst(self) -> mpmath.mpf:
        return max(self.f, self.relator, self.surgery, self.d11, self.d12, self.d22)


@dataclass(frozen=True)
class RepPoint:
    spec: SurgerySpec
    s: CxScalar
    branch: Branch
    t: CxScalar
    residuals: Residuals
    flagged: bool = False

    @property
    def u(self) -> CxScalar:
        return self.s + 1 / self.s

    @property
    def kappa(self) -> CxScalar:
        return 2 - self.t


@dataclass(frozen=True)
class RepClass:
    u: CxScalar
    kappa: CxScalar
    members: tuple
    classification: Classification
    conjugate_index: int | None = None
    ambiguous: bool = False

    @property
    def spec(self) -> SurgerySpec:
        return self.members[0].spec

    @property
    def representative(self) -> RepPoint:
        return self.members[0]

    @property
    def s(self) -> CxScalar:
        return self.representative.s

    @property
    def t(self) -> CxScalar:
        return self.representative.t


def point_residuals(spec: SurgerySpec, s, t) -> Residuals:
    # Local import keeps the oracle's brute-force checks independent of this module's closed forms.
    from .oracle.verifiers import brute_force_relator_check, brute_force_surgery_check

    D = surgery_matrix(spec, s, Branch.PLUS, t)
    return Residuals(
        f=abs(f_of(s, t)),
        relator=brute_force_relator_check(s, t),
        surgery=brute_force_surgery_check(spec, s, t),
        d11=abs(D.a11),
        d12=abs(D.a12),
        d22=abs(D.a22),
    )


def _newton_polish(eqs: SurgeryEquations, s, t, iters: int = 8):
    """Two-variable Newton on (f, D11) in (s, t)."""
    f = f_poly()
    g = eqs.d11
    fs, ft, gs, gt = f.diff_s(), f.diff_t(), g.diff_s(), g.diff_t()
    best = (s, t)
    best_res = abs(f(s, t)) + abs(g(s, t))
    for _ in range(iters):
        F, G = f(s, t), g(s, t)
        a, bb, c, d = fs(s, t), ft(s, t), gs(s, t), gt(s, t)
        det = a * d - bb * c
        if det == 0:
            break
        s = s - (d * F - bb * G) / det
        t = t - (a * G - c * F) / det
        res = abs(f(s, t)) + abs(g(s, t))
        if res < best_res:
            best, best_res = (s, t), res
        else:
            break
    return best


def _branch_of(s, t) -> tuple[Branch, mpmath.mpf]:
    dist = {b: abs(t_branch(s, b) - t) for b in Branch}
    b = min(dist, key=dist.get)
    return b, dist[b]


def enumerate_solutions(
    spec: SurgerySpec,
    *,
    tol_residual: float = 1e-9,
    precision: int | None = None,
) -> list[RepPoint]:
    """All solutions (s, t) of f = D11 = D12 = 0 with s != 0.

    Every root of the eliminant produces at least one point; a root whose
    best branch still fails the residual threshold is returned with
    ``flagged=True`` rather than dropped.
    """
    with working_precision(precision):
        eqs = surgery_equations(spec.n)
        if eqs.eliminant.degree < 1:
            log.error("n=%d: eliminant is constant, no solutions", spec.n)
            return []
        roots = poly_roots(eqs.eliminant)
        branch_tol = mpmath.mpf(tol_residual) ** 0.5
        points = []
        for s0 in roots:
            candidates = []
            for b in Branch:
                s1, t1 = _newton_polish(eqs, s0, t_branch(s0, b))
                res = point_residuals(spec, s1, t1)
                b1, gap = _branch_of(s1, t1)
                candidates.append((res.worst(), b1, gap, s1, t1, res))
            candidates.sort(key=lambda c: c[0])
            # polishing from the wrong branch may wander to another root
            near = branch_tol * max(1, abs(s0))
            accepted = [c for c in candidates if c[0] < tol_residual and c[2] < branch_tol and abs(c[3] - s0) < near]
            # both branches can polish onto the same point; keep distinct t only
            uniq = []
            for c in accepted:
                if all(abs(c[4] - o[4]) > branch_tol or abs(c[3] - o[3]) > branch_tol for o in uniq):
                    uniq.append(c)
            if not uniq:
                worst, b1, _, s1, t1, res = candidates[0]
                log.warning("n=%d: root s=%s fails residual threshold (%s)", spec.n, mpmath.nstr(s1, 8), mpmath.nstr(worst, 3))
                points.append(RepPoint(spec, s1, b1, t1, res, flagged=True))
                continue
            for _, b1, _, s1, t1, res in uniq:
                points.append(RepPoint(spec, s1, b1, t1, res))
        if not points:
            log.error("n=%d: enumeration produced no points", spec.n)
        return points


def canonical_point(p: RepPoint, tol: float = 1e-9) -> RepPoint:
    """Move ``s`` into ``|s| <= 1`` (``im s >= 0`` on the unit circle), same class."""
    s = p.s
    # (s, t) and (1/s, t) have the same trace coordinates; on |s| = 1, 1/s = conj(s)
    if abs(abs(s) - 1) < tol:
        if s.imag < 0:
            s = 1 / s
    elif abs(s) > 1:
        s = 1 / s
    if s == p.s:
        return p
    b, _ = _branch_of(s, p.t)
    return RepPoint(p.spec, s, b, p.t, p.residuals, p.flagged)


def _close(a, b, tol) -> bool:
    return abs(a - b) <= tol * max(1, abs(a), abs(b))


def dedup_classes(points: Sequence[RepPoint], *, tol: float = 1e-9, classify_tol: float = 1e-7) -> list[RepClass]:
    """Group points by trace coordinates ``(u, 2 - t)``.

    Members are canonicalised (``|s| <= 1``) and the member with the
    smallest worst residual becomes the representative.  Classes are sorted
    in table order: SU(2) by real u, then complex and real classes by u.
    """
    if not points:
        return []
    specs = {p.spec for p in points}
    if len(specs) != 1:
        raise ValueError(f"points from several surgeries: {sorted(sp.n for sp in specs)}")
    groups: list[list[RepPoint]] = []
    for p in points:
        q = canonical_point(p, classify_tol)
        for g in groups:
            if _close(g[0].u, q.u, tol) and _close(g[0].kappa, q.kappa, tol):
                g.append(q)
                break
        else:
            groups.append([q])
    raw = []
    for g in groups:
        g.sort(key=lambda p: (p.flagged, p.residuals.worst()))
        rep = g[0]
        raw.append((rep.u, rep.kappa, tuple(g)))
    provisional = [RepClass(u, k, m, Classification.COMPLEX) for u, k, m in raw]
    labelled = []
    for c in provisional:
        label, ambiguous = classify(c, classify_tol, report_ambiguity=True)
        labelled.append(RepClass(c.u, c.kappa, c.members, label, None, ambiguous))
    order = {Classification.SU2: 0, Classification.COMPLEX: 1, Classification.SL2R: 2}

    def key(c: RepClass):
        return (order[c.classification], float(c.u.real), float(c.u.imag))

    labelled.sort(key=key)
    out = []
    for i, c in enumerate(labelled):
        partner = None
        if c.classification is Classification.COMPLEX:
            for j, o in enumerate(labelled):
                if j != i and _close(o.u, mpmath.conj(c.u), tol) and _close(o.kappa, mpmath.conj(c.kappa), tol):
                    partner = j
                    break
        out.append(RepClass(c.u, c.kappa, c.members, c.classification, partner, c.ambiguous))
    return out


def classify(cls: RepClass, tol: float = 1e-7, *, report_ambiguity: bool = False):
    """SU2 / SL2R / complex label from the canonical ``(s, t)`` of a class."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    s, t, u = cls.s, cls.t, cls.u
    su2 = abs(abs(s) - 1) < tol and abs(t.imag) < tol and abs(u.imag) < tol and abs(u.real) < 2
    sl2r = abs(s.imag) < tol and abs(t.imag) < tol
    ambiguous = su2 and sl2r
    if ambiguous:
        log.warning("class u=%s passes both SU2 and SL2R tests; labelled SU2", mpmath.nstr(u, 8))
    label = Classification.SU2 if su2 else Classification.SL2R if sl2r else Classification.COMPLEX
    return (label, ambiguous) if report_ambiguity else label


def invariant_hermitian_form(X: Mat2, Y: Mat2):
    """Hermitian H with ``A^* H A = H`` for A in {X, Y}, or None if none exists.

    Solves the real linear system for ``H = [[a, b + ic], [b - ic, d]]`` by SVD
    and returns the null vector as a 2x2 mpmath matrix.
    """
    import numpy as np

    basis = [
        np.array([[1, 0], [0, 0]], dtype=complex),
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, 1j], [-1j, 0]], dtype=complex),
        np.array([[0, 0], [0, 1]], dtype=complex),
    ]
    rows = []
    for A in (X, Y):
        a = np.array([[complex(A.a11), complex(A.a12)], [complex(A.a21), complex(A.a22)]])
        cols = [(a.conj().T @ h @ a - h).ravel() for h in basis]
        m = np.stack(cols, axis=1)
        rows.append(m.real)
        rows.append(m.imag)
    system = np.vstack(rows)
    _, sv, vt = np.linalg.svd(system)
    if sv[-1] > 1e-8 * max(1.0, sv[0]):
        return None
    v = vt[-1]
    h = sum(c * b for c, b in zip(v, basis))
    if h[0, 0].real < 0:
        h = -h
    return h


def is_unitarizable(cls: RepClass) -> bool:
    """True if {X, Y} preserve a positive definite Hermitian form."""
    import numpy as np

    gens = generators(cls.s, cls.t)
    h = invariant_hermitian_form(gens["x"], gens["y"])
    if h is None:
        return False
    return bool(np.all(np.linalg.eigvalsh(h) > 1e-10))
