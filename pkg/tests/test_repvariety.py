import random

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fig8torsion.numkernel import working_precision
from fig8torsion.oracle.verifiers import brute_force_relator_check, longitude_by_products
from fig8torsion.repvariety import (
    WORD_LONGITUDE,
    Branch,
    Classification,
    DomainError,
    SurgerySpec,
    build_word,
    canonical_point,
    classify,
    dedup_classes,
    discriminant,
    enumerate_solutions,
    f_of,
    generators,
    is_unitarizable,
    longitude_closed_form,
    real_parameter_intervals,
    surgery_equations,
    surgery_matrix,
    t_branch,
    upper_triangular_power,
    word_matrix,
)

coords = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def _s(re, im):
    return mpmath.mpc(re, im)


@pytest.mark.parametrize("n", [0, 1.5])
def test_surgery_spec_rejects_bad_n(n):
    with pytest.raises(DomainError):
        SurgerySpec(n)


def test_zero_s_is_outside_the_domain():
    with pytest.raises(DomainError):
        generators(0, 1)
    with pytest.raises(DomainError):
        f_of(0, 1)


@given(coords, coords)
@settings(max_examples=60, deadline=None)
def test_branches_solve_f_and_the_relator(re, im):
    s = _s(re, im)
    assume(abs(s) > 0.2)
    with working_precision(128):
        for b in Branch:
            t = t_branch(s, b)
            assert abs(f_of(s, t)) < 1e-25 * max(1, abs(t) ** 2)
            assert brute_force_relator_check(s, t) < 1e-20 * max(1, abs(s) ** 8, abs(s) ** -8)


def test_relator_fails_off_the_variety():
    assert brute_force_relator_check(2, 0) > 0.1


@given(coords, coords)
@settings(max_examples=60, deadline=None)
def test_word_matrices_have_unit_determinant(re, im):
    s = _s(re, im)
    assume(abs(s) > 0.2)
    with working_precision(128):
        for b in Branch:
            for word in ("x", "Y", "xYXy", "XyxY", WORD_LONGITUDE):
                assert abs(build_word(s, b, word).det() - 1) < 1e-25


def test_longitude_is_upper_triangular_and_commutes_with_meridian():
    with working_precision(128):
        s = mpmath.mpc("0.3", "0.8")
        for b in Branch:
            L = build_word(s, b, WORD_LONGITUDE)
            X = build_word(s, b, "x")
            assert abs(L.a21) < 1e-25
            assert (L @ X - X @ L).norm_inf() < 1e-25


def test_printed_longitude_expansion_is_not_peripheral():
    # X^-1 Y X Y^-1 X^-1 Y X Y^-1 is not triangular on the variety, unlike w^-1 w~
    with working_precision(128):
        L = build_word(mpmath.mpc("0.3", "0.8"), Branch.PLUS, "XyxYXyxY")
        assert abs(L.a21) > 1e-3


def test_closed_form_longitude_matches_word_products():
    rng = random.Random(20240601)
    worst = 0.0
    with working_precision(128):
        for _ in range(1000):
            s = mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))
            if abs(s) < 0.2:
                continue
            for b in Branch:
                closed = longitude_closed_form(s, b)
                words = build_word(s, b, WORD_LONGITUDE)
                scale = max(1, words.norm_inf())
                worst = max(worst, float((closed - words).norm_inf() / scale))
    assert worst < 1e-10


def test_longitude_oracle_agrees_with_word_evaluation():
    with working_precision(128):
        s = mpmath.mpc("-0.7", "0.45")
        t = t_branch(s, Branch.MINUS)
        a = longitude_by_products(s, t)
        b = word_matrix(WORD_LONGITUDE, s, t).entries()
        assert max(abs(x - y) for x, y in zip(a, b)) < 1e-25


@given(coords, coords)
@settings(max_examples=60, deadline=None)
def test_longitude_trace_is_branch_independent(re, im):
    s = _s(re, im)
    assume(abs(s) > 0.2)
    with working_precision(128):
        a = longitude_closed_form(s, Branch.PLUS).trace()
        b = longitude_closed_form(s, Branch.MINUS).trace()
        assert abs(a - b) <= 1e-12 * max(1, abs(a))


@given(st.integers(min_value=-6, max_value=6))
def test_upper_triangular_power_matches_repeated_products(k):
    with working_precision(128):
        L = longitude_closed_form(mpmath.mpc("0.4", "0.6"), Branch.PLUS)
        ref = L if k >= 0 else L.inv()
        acc = type(L).identity()
        for _ in range(abs(k)):
            acc = acc @ ref
        got = upper_triangular_power(L, k)
        assert (got - acc).norm_inf() < 1e-20 * max(1, acc.norm_inf())


def test_upper_triangular_power_at_parabolic_limit():
    with working_precision(128):
        m = type(longitude_closed_form(2, Branch.PLUS))(mpmath.mpc(1), mpmath.mpc(3), mpmath.mpc(0), mpmath.mpc(1))
        p = upper_triangular_power(m, 5)
        assert p.a12 == 15 and p.a11 == 1


def test_real_parameter_intervals_cover_nonnegative_discriminant():
    ivs = real_parameter_intervals()
    with working_precision(128):
        for x in [mpmath.mpf(k) / 37 for k in range(-150, 151) if k]:
            inside = any(x in iv for iv in ivs)
            assert inside == (discriminant(x).real >= 0)


@pytest.mark.parametrize("n", [1, 2, 3, -1, -2])
def test_eliminant_degree_and_d12_is_implied(n):
    eqs = surgery_equations(n)
    assert eqs.eliminant.degree == 8 * abs(n) - 2
    with working_precision(128):
        for p in enumerate_solutions(SurgerySpec(n)):
            assert abs(eqs.d12(p.s, p.t)) < 1e-20


def test_surgery_matrix_vanishes_at_accepted_points():
    with working_precision(128):
        spec = SurgerySpec(2)
        for p in enumerate_solutions(spec):
            D = surgery_matrix(spec, p.s, p.branch, p.t)
            assert D.norm_inf() < 1e-20


@pytest.mark.parametrize("n", [1, 2, 3, -1])
def test_enumeration_counts(n):
    with working_precision(128):
        pts = enumerate_solutions(SurgerySpec(n))
        classes = dedup_classes(pts)
    assert not any(p.flagged for p in pts)
    assert len(classes) == 4 * abs(n) - 1
    assert sum(c.classification is Classification.SU2 for c in classes) == 2 * abs(n)
    assert sum(c.classification is Classification.SL2R for c in classes) == 1


def test_dedup_pairs_s_with_its_inverse():
    with working_precision(128):
        pts = enumerate_solutions(SurgerySpec(2))
        classes = dedup_classes(pts)
    assert len(pts) == 2 * len(classes)
    for c in classes:
        assert len(c.members) == 2
        a, b = c.members
        assert abs(a.s - b.s) < 1e-20 or abs(a.s * b.s - 1) < 1e-20 or abs(a.s - mpmath.conj(b.s)) < 1e-20
        assert abs(c.s) <= 1 + 1e-12


def test_canonical_point_preserves_class():
    with working_precision(128):
        p = enumerate_solutions(SurgerySpec(1))[0]
        q = canonical_point(p)
        assert abs(q.u - p.u) < 1e-25 and abs(q.kappa - p.kappa) < 1e-25
        assert abs(q.s) <= 1 + 1e-12


def test_conjugate_index_links_complex_pairs():
    with working_precision(128):
        classes = dedup_classes(enumerate_solutions(SurgerySpec(3)))
    for i, c in enumerate(classes):
        if c.classification is Classification.COMPLEX:
            j = c.conjugate_index
            assert j is not None and classes[j].conjugate_index == i
            assert abs(classes[j].u - mpmath.conj(c.u)) < 1e-15  # clustered roots lose about half the digits
        else:
            assert c.conjugate_index is None


def test_su2_label_agrees_with_invariant_hermitian_form():
    with working_precision(128):
        classes = dedup_classes(enumerate_solutions(SurgerySpec(2)))
    for c in classes:
        assert is_unitarizable(c) == (c.classification is Classification.SU2)


def test_classify_rejects_bad_tolerance():
    with working_precision(128):
        c = dedup_classes(enumerate_solutions(SurgerySpec(1)))[0]
    with pytest.raises(ValueError):
        classify(c, 0)
