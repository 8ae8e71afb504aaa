"""Brute-force residual checks built from explicit 2x2 products.

Nothing here uses the collapsed equation f(s,t), the closed-form longitude
or the eigenvalue power formula, so these checks stay independent of the
code paths they validate.
"""

from __future__ import annotations

import mpmath

from ..numkernel import cx


def _mul(a, b):
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


def _inv(a):
    det = a[0] * a[3] - a[1] * a[2]
    return (a[3] / det, -a[1] / det, -a[2] / det, a[0] / det)


def _gens(s, t):
    s, t = cx(s), cx(t)
    if s == 0:
        raise ValueError("s must be nonzero")
    X = (s, cx(1), cx(0), 1 / s)
    Y = (s, cx(0), -t, 1 / s)
    return X, Y, _inv(X), _inv(Y)


def _norm(a):
    return max(abs(e) for e in a)


def brute_force_relator_check(s, t) -> mpmath.mpf:
    """||W X - Y W||_inf with W = X Y^-1 X^-1 Y."""
    X, Y, Xi, Yi = _gens(s, t)
    W = _mul(_mul(_mul(X, Yi), Xi), Y)
    R = tuple(p - q for p, q in zip(_mul(W, X), _mul(Y, W)))
    return _norm(R)


def longitude_by_products(s, t):
    X, Y, Xi, Yi = _gens(s, t)
    W = _mul(_mul(_mul(X, Yi), Xi), Y)
    Wt = _mul(_mul(_mul(Xi, Y), X), Yi)
    return _mul(_inv(W), Wt)


def brute_force_surgery_check(spec, s, t, *, meridian=None, longitude=None) -> mpmath.mpf:
    """||X L^n - I||_inf with L^n formed by |n| repeated multiplications.

    ``meridian`` and ``longitude`` override the matrices (entry tuples
    ``(a11, a12, a21, a22)``), which lets the check be exercised on its own.
    """
    n = spec.n if hasattr(spec, "n") else int(spec)
    if n == 0:
        raise ValueError("n must be nonzero")
    X = meridian if meridian is not None else _gens(s, t)[0]
    L = longitude if longitude is not None else longitude_by_products(s, t)
    step = L if n > 0 else _inv(L)
    acc = (cx(1), cx(0), cx(0), cx(1))
    for _ in range(abs(n)):
        acc = _mul(acc, step)
    R = _mul(X, acc)
    return _norm((R[0] - 1, R[1], R[2], R[3] - 1))
