from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from frobtrace.cyclotomic import CyclotomicInt
from frobtrace.gf import make_character, make_extension, make_field
from frobtrace.moduli import sample_closed_family
from frobtrace.polyring import FactorTuple, X, poly_eval
from frobtrace.trace import (
    FamilyError,
    IntegrityError,
    affine_char_sum,
    character_sum_total,
    closed_family,
    frobenius_trace,
    genus,
    infinity_value,
    point_count_extension,
    power_sums_to_coefficients,
    projective_char_sum,
    zeta_from_counts,
)

F7 = make_field(7)
CHI = make_character(F7, 3)
ONE = (1,)


def naive_points(field, F, alpha, p, n):
    """#C(F_{q^n}) by counting y with y^p = alpha F(x) over all (x, y), plus points at infinity."""
    big, emb = make_extension(field, n)
    coeffs = [[emb[c] for c in f] for f in F.factors]
    a = emb[alpha]
    pth = [big.pow(y, p) for y in range(big.q)]
    fibre = {v: pth.count(v) for v in set(pth)}
    affine = 0
    for x in range(big.q):
        v = a
        for i, f in enumerate(coeffs, start=1):
            fx = 0
            for c in reversed(f):
                fx = big.add(big.mul(fx, x), c)
            v = big.mul(v, big.pow(fx, i))
        affine += fibre.get(v, 0)
    if F.total_degree % p == 0:
        inf = fibre.get(a, 0)
    else:
        inf = 1
    return affine + inf


def test_affine_examples():
    const = FactorTuple((ONE, ONE))
    assert affine_char_sum(F7, const, CHI) == 7
    assert affine_char_sum(F7, FactorTuple((X, ONE)), CHI) == 0
    F = FactorTuple(((1, 0, 1), ONE))
    counts = [0, 0, 0]
    for x in range(7):
        e = CHI((x * x + 1) % 7)
        if e is not None:
            counts[e] += 1
    assert affine_char_sum(F7, F, CHI) == CyclotomicInt.from_exponent_counts(3, counts)


def test_rank_mismatch():
    with pytest.raises(ValueError):
        affine_char_sum(F7, FactorTuple((X,)), CHI)


def test_infinity_examples():
    full = FactorTuple(((3, 0, 1), (1, 1)))  # degrees (2, 1), deg F = 4
    target = (2, 2)
    F = FactorTuple(((1, 0, 1), (2, 0, 1)))  # (2, 2): deg F = 6
    assert infinity_value(F7, F, target) == 1
    assert infinity_value(F7, F, target, 3) == 3
    assert infinity_value(F7, full, target) == 0
    with pytest.raises(FamilyError):
        infinity_value(F7, FactorTuple((X, X)), target)


def test_projective_relations():
    target = (2, 2)
    F = FactorTuple(((1, 0, 1), (2, 0, 1)))
    assert projective_char_sum(F7, F, 1, CHI, target) == affine_char_sum(F7, F, CHI) + 1
    drop = FactorTuple(((3, 0, 1), (1, 1)))
    assert projective_char_sum(F7, drop, 1, CHI, target) == affine_char_sum(F7, drop, CHI)
    assert frobenius_trace(F7, F, 1, CHI, target) == -projective_char_sum(F7, F, 1, CHI, target)


def test_closed_family():
    assert closed_family((4, 1)) == [(4, 1), (3, 1), (4, 0)]
    assert closed_family((3, 0)) == [(3, 0), (2, 0)]


def test_genus_examples():
    assert genus(3, (4, 1)) == 3
    assert genus(3, (3, 1)) == 3
    assert genus(2, (5,)) == 2
    assert genus(5, (2, 1, 0, 1)) == 6
    assert genus(3, (1, 0)) == 0


@pytest.mark.parametrize("seed", range(5))
def test_twist_and_conjugation_laws(seed):
    rng = np.random.default_rng(seed)
    target = (4, 1)
    for F, alpha in sample_closed_family(F7, target, 20, rng):
        S1 = projective_char_sum(F7, F, 1, CHI, target)
        for a in range(1, 7):
            assert projective_char_sum(F7, F, a, CHI, target) == S1.rotate(CHI(a))
        T = frobenius_trace(F7, F, alpha, CHI, target)
        assert frobenius_trace(F7, F, alpha, CHI.conjugate(), target) == T.conjugate()
        total = T + T.conjugate()
        N = point_count_extension(F7, F, alpha, 3, 1)
        assert CyclotomicInt.from_int(3, N) == 8 - total


def test_y3_equals_x():
    F = FactorTuple((X, ONE))
    # affine: 3 solutions over each of the 2 nonzero cubes, 1 over x = 0
    big_aff = sum(1 for x in range(7) for y in range(7) if pow(y, 3, 7) == x)
    assert big_aff == 7
    # projective model of Y^3 = X has one point at infinity
    assert point_count_extension(F7, F, 1, 3, 1) == 8


def test_cubing_bijective_extension():
    F5 = make_field(5)
    F = FactorTuple(((1, 1), ONE))
    for n in (1, 3):
        assert point_count_extension(F5, F, 2, 3, n) == 5**n + 1


@pytest.mark.parametrize("factors,alpha,p", [
    (((1, 2, 0, 1),), 1, 2),
    (((1, 0, 0, 0, 0, 1),), 3, 2),
    (((0, 1), (1, 1)), 2, 3),
    (((6, 0, 1), (2, 1)), 5, 3),
])
def test_point_counts_naive(factors, alpha, p):
    F = FactorTuple(factors)
    for n in (1, 2):
        assert point_count_extension(F7, F, alpha, p, n) == naive_points(F7, F, alpha, p, n)


def test_point_counts_over_f4():
    F4 = make_field(2, 2)
    F = FactorTuple(((1, 1), (2, 1)))
    for n in (1, 2):
        assert point_count_extension(F4, F, 3, 3, n) == naive_points(F4, F, 3, 3, n)


def test_hyperelliptic_zeta():
    F = FactorTuple(((1, 0, 0, 0, 0, 1),))
    counts = [point_count_extension(F7, F, 1, 2, n) for n in range(1, 5)]
    assert counts == [8, 50, 344, 2598]
    z = zeta_from_counts(counts, 7, 2)
    assert z.P_coeffs == (1, 0, 0, 0, 49)
    assert z.max_weil_deviation < 1e-9
    assert z.trace == 0


def test_genus_zero_zeta():
    z = zeta_from_counts([], 7, 0)
    assert z.P_coeffs == (1,)
    assert point_count_extension(F7, FactorTuple((X, ONE)), 1, 3, 2) == 49 + 1


def test_functional_equation_violation():
    with pytest.raises(IntegrityError):
        zeta_from_counts([8, 50, 344, 2599], 7, 2)


def test_newton_identities():
    # roots 1, 2, 3: prod (1 - a T) = 1 - 6T + 11T^2 - 6T^3
    s = [sum(a**k for a in (1, 2, 3)) for k in range(1, 4)]
    assert power_sums_to_coefficients(s) == [1, -6, 11, -6]


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=5))
def test_newton_roundtrip(roots):
    s = [sum(a**k for a in roots) for k in range(1, len(roots) + 1)]
    coeffs = power_sums_to_coefficients(s)
    poly = [1]
    for a in roots:
        poly = [x - a * y for x, y in itertools.zip_longest(poly + [0], [0] + poly, fillvalue=0)]
    assert coeffs == poly


@pytest.mark.parametrize("seed", range(3))
def test_trigonal_zeta_trace(seed):
    rng = np.random.default_rng(100 + seed)
    target = (2, 2)
    for F, alpha in sample_closed_family(F7, target, 3, rng):
        g = 2
        counts = [point_count_extension(F7, F, alpha, 3, n) for n in range(1, 2 * g + 1)]
        z = zeta_from_counts(counts, 7, g)
        S = projective_char_sum(F7, F, alpha, CHI, target)
        assert CyclotomicInt.from_int(3, z.trace) == -(S + S.conjugate())
        assert z.max_weil_deviation < 1e-9
        assert character_sum_total(F7, F, alpha, CHI, target) == counts[0] - 8


def test_hyperelliptic_sign_under_quadratic_twist():
    chi2 = make_character(F7, 2)
    F = FactorTuple(((1, 2, 0, 0, 1),))
    target = (4,)
    nonsquare = next(a for a in range(1, 7) if chi2(a) == 1)
    s = projective_char_sum(F7, F, 1, chi2, target)
    assert projective_char_sum(F7, F, nonsquare, chi2, target) == -s


def test_value_at_infinity_used_in_counts():
    # Y^3 = 2 (X^3 + 1): leading coefficient 2 is not a cube in F_7, so no point at infinity
    F = FactorTuple(((1, 0, 0, 1), ONE))
    assert CHI(2) != 0
    affine = sum(1 for x in range(7) for y in range(7) if pow(y, 3, 7) == 2 * (x**3 + 1) % 7)
    assert point_count_extension(F7, F, 2, 3, 1) == affine
    assert poly_eval(F7, (1, 0, 0, 1), 3) == 0
