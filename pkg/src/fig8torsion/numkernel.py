"""Extended-precision numeric substrate.

Scalars are ``mpmath.mpc`` values; their precision is whatever the ambient
mpmath context is set to (use :func:`working_precision`).  Polynomial
containers are generic over the coefficient type so the same code carries
exact integer/``Fraction`` arithmetic (elimination) and multiprecision
complex arithmetic (root finding, torsion polynomials).
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Sequence, TypeAlias

import mpmath
from mpmath import mp

CxScalar: TypeAlias = mpmath.mpc
Number: TypeAlias = Any  # int | Fraction | mpf | mpc

DEFAULT_PRECISION = 128


@contextlib.contextmanager
def working_precision(bits: int | None) -> Iterator[int]:
    """Run a block at ``bits`` of mantissa precision (``None`` keeps current)."""
    if bits is None:
        yield mp.prec
        return
    if bits < 53:
        raise ValueError(f"precision must be at least 53 bits, got {bits}")
    with mp.workprec(bits):
        yield bits


def cx(value: Number) -> CxScalar:
    """Coerce ints, Fractions, floats and mpmath numbers to ``mpc``."""
    if isinstance(value, Fraction):
        return mpmath.mpc(mpmath.mpf(value.numerator) / value.denominator)
    return mpmath.mpc(value)


def _is_exact(value: Number) -> bool:
    return isinstance(value, (int, Fraction))


def _exact_zero(value: Number) -> bool:
    return value == 0


def _normalize_exact(value: Number) -> Number:
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    """Exact rational value of a finite binary float."""
    if not mpmath.isfinite(x):
        raise ValueError(f"non-finite value {x}")
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    man = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(man << int(exp))
    return Fraction(man, 1 << int(-exp))


class RootFindingError(RuntimeError):
    """Simultaneous iteration failed to converge; carries the best iterate."""

    def __init__(self, message: str, best: list, residuals: list):
        super().__init__(message)
        self.best = best
        self.residuals = residuals


# ---------------------------------------------------------------------------
# univariate polynomials


@dataclass(frozen=True)
class Poly:
    """Dense univariate polynomial, ``coeffs[k]`` multiplies ``z**k``.

    The zero polynomial is stored as ``(0,)`` with degree 0.
    """

    coeffs: tuple

    def __init__(self, coeffs: Iterable[Number]):
        cs = [_normalize_exact(c) for c in coeffs]
        while len(cs) > 1 and _exact_zero(cs[-1]):
            cs.pop()
        if not cs:
            cs = [0]
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and _exact_zero(self.coeffs[0])

    @property
    def leading(self) -> Number:
        return self.coeffs[-1]

    @classmethod
    def monomial(cls, k: int, c: Number = 1) -> "Poly":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Sequence[Number]) -> "Poly":
        """Monic polynomial with the given roots, multiplied out as a balanced tree."""
        if not roots:
            return cls([1])
        factors = [cls([-r, 1]) for r in roots]
        while len(factors) > 1:
            paired = [factors[i] * factors[i + 1] for i in range(0, len(factors) - 1, 2)]
            if len(factors) % 2:
                paired.append(factors[-1])
            factors = paired
        return factors[0]

    def __call__(self, z: Number) -> Number:
        return eval_poly(self, z)

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly | Number") -> "Poly":
        if not isinstance(other, Poly):
            return Poly(c * other for c in self.coeffs)
        if self.is_zero or other.is_zero:
            return Poly([0])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if _exact_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def derivative(self) -> "Poly":
        return Poly(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def map(self, fn) -> "Poly":
        return Poly(fn(c) for c in self.coeffs)

    def to_mp(self) -> "Poly":
        return self.map(cx)

    def norm_inf(self) -> Any:
        return max(abs(c) for c in self.coeffs)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Long division.  Exact inputs are divided over Q."""
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        exact = all(_is_exact(c) for c in self.coeffs + other.coeffs)
        rem = [Fraction(c) if exact else c for c in self.coeffs]
        lead = Fraction(other.leading) if exact else other.leading
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly([0]), self
        quot = [0] * (dq + 1)
        for k in range(dq, -1, -1):
            q = rem[k + other.degree] / lead
            quot[k] = q
            if _exact_zero(q):
                continue
            for j, b in enumerate(other.coeffs):
                rem[k + j] -= q * b
        return Poly(quot), Poly(rem[: other.degree] or [0])

    def primitive(self) -> "Poly":
        """Integer content-free multiple with positive leading coefficient."""
        cs = [Fraction(c) for c in self.coeffs]
        den = math.lcm(*(c.denominator for c in cs))
        ints = [int(c * den) for c in cs]
        g = math.gcd(*ints) or 1
        sign = -1 if ints[-1] < 0 else 1
        return Poly(sign * (c // g) for c in ints)

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)!r})"


def eval_poly(p: Poly, z: Number) -> Number:
    """Horner evaluation; exact for exact inputs, else at working precision."""
    acc: Number = 0
    for c in reversed(p.coeffs):
        acc = acc * z + c
    if _is_exact(acc) and _is_exact(z):
        return acc
    return cx(acc)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Greatest common divisor of two exact polynomials, primitive over Z."""
    a, b = Poly(Fraction(c) for c in a.coeffs), Poly(Fraction(c) for c in b.coeffs)
    while not b.is_zero:
        _, r = a.divmod(b)
        a, b = b, (r.primitive() if not r.is_zero else r)
    return a.primitive()


# ---------------------------------------------------------------------------
# root finding


def _horner_with_derivative(coeffs: Sequence[CxScalar], z: CxScalar):
    p = coeffs[-1]
    dp = mpmath.mpc(0)
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _residual_bound(abs_coeffs: Sequence[mpmath.mpf], z: CxScalar, slack: int) -> mpmath.mpf:
    """Rounding-error scale for evaluating p at z: slack * eps * sum |a_k| |z|^k."""
    r = abs(z)
    acc = mpmath.mpf(0)
    for c in reversed(abs_coeffs):
        acc = acc * r + c
    return slack * mp.eps * acc


def poly_roots(p: Poly, polish_iters: int = 3, *, max_iter: int = 1000) -> list[CxScalar]:
    """All roots of ``p`` with multiplicity.

    Aberth-Ehrlich simultaneous iteration (Gauss-Seidel sweep) followed by
    ``polish_iters`` Newton steps against the original polynomial.  Raises
    :class:`RootFindingError` if some root never reaches the rounding-error
    residual bound.
    """
    if p.is_zero or p.degree < 1:
        raise ValueError("poly_roots needs a nonzero polynomial of degree >= 1")
    coeffs = [cx(c) for c in p.coeffs]
    nzero = 0
    while coeffs[nzero] == 0:
        nzero += 1
    work = coeffs[nzero:]
    d = len(work) - 1
    roots = [mpmath.mpc(0)] * nzero
    if d == 0:
        return roots

    lead = work[-1]
    work = [c / lead for c in work]
    abs_work = [abs(c) for c in work]
    slack = 8 * (d + 1)

    radius = abs(work[0]) ** (mpmath.mpf(1) / d)
    z = [radius * mpmath.expjpi(mpmath.mpf(2 * k) / d + mpmath.mpf("0.27")) for k in range(d)]
    done = [False] * d
    for _ in range(max_iter):
        for i in range(d):
            if done[i]:
                continue
            pv, dpv = _horner_with_derivative(work, z[i])
            if abs(pv) <= _residual_bound(abs_work, z[i], slack):
                done[i] = True
                continue
            if dpv == 0:
                z[i] += radius * mp.eps ** (mpmath.mpf(1) / 4)
                continue
            ratio = pv / dpv
            s = mpmath.fsum((1 / (z[i] - z[j]) for j in range(d) if j != i and z[i] != z[j]))
            denom = 1 - ratio * s
            z[i] -= ratio / denom if denom != 0 else ratio
        if all(done):
            break
    z = [_newton_polish(coeffs, zi, polish_iters) for zi in z]

    abs_coeffs = [abs(c) for c in coeffs]
    residuals = [abs(eval_poly(p.to_mp(), zi)) for zi in z]
    bounds = [_residual_bound(abs_coeffs, zi, 4 * slack) for zi in z]
    bad = [i for i in range(d) if residuals[i] > bounds[i]]
    if bad:
        raise RootFindingError(
            f"{len(bad)} of {d} roots did not converge within {max_iter} iterations",
            best=roots + z,
            residuals=residuals,
        )
    return roots + z


def _newton_polish(coeffs: Sequence[CxScalar], z: CxScalar, iters: int) -> CxScalar:
    best, best_res = z, abs(_horner_with_derivative(coeffs, z)[0])
    for _ in range(iters):
        pv, dpv = _horner_with_derivative(coeffs, best)
        if dpv == 0 or pv == 0:
            break
        cand = best - pv / dpv
        res = abs(_horner_with_derivative(coeffs, cand)[0])
        if res >= best_res:
            break
        best, best_res = cand, res
    return best


# ---------------------------------------------------------------------------
# rational reconstruction


@dataclass(frozen=True)
class RoundingFailure:
    value: CxScalar
    residual: Any

    def __bool__(self) -> bool:
        return False


def round_to_rational(c: Number, tol: float, max_denominator: int = 1) -> Fraction | RoundingFailure:
    """Snap a numerically real value to a nearby rational.

    Succeeds when the imaginary part and the distance to the best rational
    with denominator ``<= max_denominator`` are both at most
    ``tol * max(1, |re c|)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    z = cx(c)
    scale = max(mpmath.mpf(1), abs(z.real))
    if abs(z.imag) > tol * scale:
        return RoundingFailure(z, abs(z.imag) / scale)
    exact = mpf_to_fraction(z.real)
    q = exact.limit_denominator(max_denominator)
    residual = abs(z.real - cx(q).real) / scale
    if residual > tol:
        return RoundingFailure(z, residual)
    return q


# ---------------------------------------------------------------------------
# Laurent polynomials in s


@dataclass(frozen=True, eq=False)
class LaurentPoly:
    """Finite sum ``sum c_k s**k`` with integer (possibly negative) exponents."""

    coeffs: Mapping[int, Number] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(k): _normalize_exact(v) for k, v in self.coeffs.items() if not _exact_zero(v)}
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def const(cls, c: Number) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def mono(cls, k: int, c: Number = 1) -> "LaurentPoly":
        return cls({k: c})

    @classmethod
    def from_poly(cls, p: Poly, shift: int = 0) -> "LaurentPoly":
        return cls({k + shift: c for k, c in enumerate(p.coeffs)})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def min_exp(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    @property
    def max_exp(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other)
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __add__(self, other: "LaurentPoly | Number") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "LaurentPoly | Number") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(other)
        return self + (-other)

    def __rsub__(self, other: Number) -> "LaurentPoly":
        return LaurentPoly.const(other) - self

    def __mul__(self, other: "LaurentPoly | Number") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return LaurentPoly({k: v * other for k, v in self.coeffs.items()})
        out: dict[int, Number] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                out[i + j] = out.get(i + j, 0) + a * b
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative powers are only defined for monomials; use shift()")
        out, base = LaurentPoly.const(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``s**k``."""
        return LaurentPoly({e + k: v for e, v in self.coeffs.items()})

    def __call__(self, s: Number) -> Number:
        if self.is_zero:
            return cx(0)
        p, shift = self.to_poly()
        return eval_poly(p, s) * cx(s) ** shift

    def derivative(self) -> "LaurentPoly":
        return LaurentPoly({k - 1: k * v for k, v in self.coeffs.items() if k != 0})

    def to_poly(self) -> tuple[Poly, int]:
        """``(P, m)`` with ``self = s**m * P(s)`` and ``P(0) != 0``."""
        if self.is_zero:
            return Poly([0]), 0
        lo, hi = self.min_exp, self.max_exp
        return Poly(self.coeffs.get(k, 0) for k in range(lo, hi + 1)), lo

    def cleared(self) -> Poly:
        """Ordinary polynomial obtained by multiplying through by the minimal power of s."""
        return self.to_poly()[0]

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        a, ea = self.to_poly()
        b, eb = other.to_poly()
        if other.is_zero:
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if self.is_zero:
            return LaurentPoly()
        q, r = a.divmod(b)
        if not r.is_zero:
            exact = all(_is_exact(c) for c in r.coeffs)
            if exact or max(abs(c) for c in r.coeffs) > mp.eps ** 0.5 * a.norm_inf():
                raise ArithmeticError("Laurent division is not exact")
        return LaurentPoly.from_poly(q, ea - eb)

    def __repr__(self) -> str:
        terms = " + ".join(f"{v}*s^{k}" for k, v in sorted(self.coeffs.items()))
        return f"LaurentPoly({terms or 0})"


# ---------------------------------------------------------------------------
# polynomials in t over Laurent polynomials in s


@dataclass(frozen=True, eq=False)
class STPoly:
    """Polynomial in ``t`` whose coefficients are :class:`LaurentPoly` in ``s``."""

    coeffs: tuple

    def __init__(self, coeffs: Iterable[LaurentPoly | Number]):
        cs = [c if isinstance(c, LaurentPoly) else LaurentPoly.const(c) for c in coeffs]
        while len(cs) > 1 and cs[-1].is_zero:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs) or (LaurentPoly(),))

    @classmethod
    def t(cls) -> "STPoly":
        return cls([0, 1])

    @classmethod
    def s(cls, k: int = 1) -> "STPoly":
        return cls([LaurentPoly.mono(k)])

    @property
    def degree_t(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0].is_zero

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, STPoly):
            other = STPoly([other])
        return len(self.coeffs) == len(other.coeffs) and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __add__(self, other: "STPoly | LaurentPoly | Number") -> "STPoly":
        if not isinstance(other, STPoly):
            other = STPoly([other])
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        zero = LaurentPoly()
        return STPoly((a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero) for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "STPoly":
        return STPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "STPoly":
        if not isinstance(other, STPoly):
            other = STPoly([other])
        return self + (-other)

    def __rsub__(self, other) -> "STPoly":
        return STPoly([other]) - self

    def __mul__(self, other) -> "STPoly":
        if not isinstance(other, STPoly):
            other = STPoly([other])
        out = [LaurentPoly() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return STPoly(out)

    __rmul__ = __mul__

    def rem_monic(self, modulus: "STPoly") -> "STPoly":
        """Remainder modulo a polynomial that is monic in t."""
        if modulus.coeffs[-1] != LaurentPoly.const(1):
            raise ValueError("modulus must be monic in t")
        m = modulus.degree_t
        cs = list(self.coeffs)
        for k in range(len(cs) - 1, m - 1, -1):
            q = cs[k]
            if q.is_zero:
                continue
            for j, b in enumerate(modulus.coeffs):
                cs[k - m + j] = cs[k - m + j] - q * b
        return STPoly(cs[:m] if len(cs) > m else cs)

    def __call__(self, s: Number, t: Number) -> CxScalar:
        acc = cx(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c(s)
        return acc

    def diff_s(self) -> "STPoly":
        return STPoly(c.derivative() for c in self.coeffs)

    def diff_t(self) -> "STPoly":
        return STPoly(k * c for k, c in enumerate(self.coeffs) if k > 0) if self.degree_t > 0 else STPoly([0])


# ---------------------------------------------------------------------------
# resultants


def sylvester_matrix(a: STPoly, b: STPoly) -> list[list[LaurentPoly]]:
    """Sylvester matrix of a and b with respect to t (rows of a first)."""
    m, n = a.degree_t, b.degree_t
    size = m + n
    zero = LaurentPoly()
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(a.coeffs)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(b.coeffs)):
            row[i + k] = c
        rows.append(row)
    return rows


def bareiss_det(matrix: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """Fraction-free (Bareiss) determinant over the Laurent ring."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return LaurentPoly.const(1)
    sign = 1
    prev = LaurentPoly.const(1)
    for k in range(n - 1):
        if a[k][k].is_zero:
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero), None)
            if swap is None:
                return LaurentPoly()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).exact_div(prev)
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def resultant_t_laurent(a: STPoly, b: STPoly) -> LaurentPoly:
    m, n = a.degree_t, b.degree_t
    if m == 0 and n == 0:
        raise ValueError("resultant_t needs at least one input of positive degree in t")
    if a.is_zero or b.is_zero:
        return LaurentPoly()
    if m == 0:
        return a.coeffs[0] ** n
    if n == 0:
        return b.coeffs[0] ** m
    return bareiss_det(sylvester_matrix(a, b))


def resultant_t(a: STPoly, b: STPoly) -> Poly:
    """Res_t(a, b) as an ordinary polynomial in s (Laurent powers cleared)."""
    return resultant_t_laurent(a, b).cleared()
