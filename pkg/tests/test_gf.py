from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from frobtrace.cyclotomic import CyclotomicInt
from frobtrace.gf import (
    CharacterOrderError,
    FieldError,
    char_eval,
    field_of_size,
    make_character,
    make_extension,
    make_field,
)

SIZES = [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2), (2, 3), (13, 1)]


def _poly_mulmod(a, b, mod, p):
    """Naive product of digit lists modulo a monic polynomial (independent oracle)."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    n = len(mod) - 1
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * mod[i]) % p
    return (prod + [0] * n)[:n]


def _digits(x, p, n):
    return [(x // p**i) % p for i in range(n)]


def test_prime_field_generator():
    F = make_field(7)
    assert F.q == 7
    assert F.generator == 3
    # brute force: 3 is the smallest primitive root mod 7
    for g in range(2, 3):
        assert len({pow(g, k, 7) for k in range(6)}) < 6


def test_f4_modulus():
    F = make_field(2, 2)
    assert F.q == 4
    # X^2 + X + 1 is the only irreducible quadratic over F_2
    candidates = [(a, b) for a in range(2) for b in range(2)]
    irreducible = [(a, b) for a, b in candidates if all((x * x + b * x + a) % 2 for x in range(2))]
    assert irreducible == [(1, 1)]
    assert tuple(F.modulus) == (1, 1, 1)


def test_f5_unit_group():
    F = make_field(5)
    assert F.order == 4


def test_non_prime_characteristic_rejected():
    with pytest.raises(ValueError):
        make_field(4)
    with pytest.raises(ValueError):
        field_of_size(6)


@pytest.mark.parametrize("ch,e", SIZES)
def test_generator_order(ch, e):
    F = make_field(ch, e)
    q = F.q
    seen = {F.pow(F.generator, k) for k in range(q - 1)}
    assert seen == set(range(1, q))
    assert F.pow(F.generator, q - 1) == 1


@pytest.mark.parametrize("ch,e", SIZES)
def test_log_exp_roundtrip(ch, e):
    F = make_field(ch, e)
    for x in range(1, F.q):
        assert F.exp(F.log(x)) == x
    with pytest.raises(FieldError):
        F.log(0)


@pytest.mark.parametrize("ch,e", [(2, 2), (3, 2), (2, 3)])
def test_extension_arithmetic_matches_naive(ch, e):
    F = make_field(ch, e)
    mod = list(F.modulus)
    for x, y in itertools.product(range(F.q), repeat=2):
        dx, dy = _digits(x, ch, e), _digits(y, ch, e)
        s = sum(((a + b) % ch) * ch**i for i, (a, b) in enumerate(zip(dx, dy)))
        assert F.add(x, y) == s
        m = _poly_mulmod(dx, dy, mod, ch)
        assert F.mul(x, y) == sum(c * ch**i for i, c in enumerate(m))


@pytest.mark.parametrize("ch,e", SIZES)
def test_vector_ops_match_scalar(ch, e):
    F = make_field(ch, e)
    a = np.repeat(np.arange(F.q), F.q)
    b = np.tile(np.arange(F.q), F.q)
    assert F.add_vec(a, b).tolist() == [F.add(int(x), int(y)) for x, y in zip(a, b)]
    assert F.mul_vec(a, b).tolist() == [F.mul(int(x), int(y)) for x, y in zip(a, b)]


@given(st.sampled_from(SIZES), st.data())
def test_field_axioms(size, data):
    F = make_field(*size)
    x, y, z = (data.draw(st.integers(0, F.q - 1)) for _ in range(3))
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    assert F.add(x, F.neg(x)) == 0
    assert F.sub(F.add(x, y), y) == x
    if x:
        assert F.mul(x, F.inv(x)) == 1
        assert F.div(F.mul(x, y), x) == y


@pytest.mark.parametrize("ch,e,deg", [(7, 1, 2), (2, 2, 2), (5, 1, 3), (3, 1, 2)])
def test_extension_embedding_is_ring_map(ch, e, deg):
    F = make_field(ch, e)
    big, emb = make_extension(F, deg)
    assert big.q == F.q**deg
    assert len(set(emb)) == F.q
    for x, y in itertools.product(range(F.q), repeat=2):
        assert emb[F.add(x, y)] == big.add(emb[x], emb[y])
        assert emb[F.mul(x, y)] == big.mul(emb[x], emb[y])


def test_character_examples():
    F = make_field(7)
    chi = make_character(F, 3)
    classes = [sum(1 for x in range(1, 7) if chi(x) == k) for k in range(3)]
    assert classes == [2, 2, 2]
    assert char_eval(chi, 1) == 0
    assert char_eval(chi, 0) is None
    g = F.generator
    assert char_eval(chi, g) == 1
    assert char_eval(chi, F.mul(g, g)) == 2
    quad = make_character(F, 2)
    squares = {x * x % 7 for x in range(1, 7)}
    assert squares == {1, 2, 4}
    assert {x for x in range(1, 7) if quad(x) == 0} == squares


def test_character_order_must_divide():
    with pytest.raises(CharacterOrderError):
        make_character(make_field(5), 3)
    with pytest.raises(CharacterOrderError):
        make_character(make_field(2, 2), 2)


@pytest.mark.parametrize("q,n", [(7, 3), (7, 2), (7, 6), (4, 3), (13, 3), (13, 4), (9, 4), (5, 2)])
def test_character_invariants(q, n):
    F = field_of_size(q)
    chi = make_character(F, n)
    for x, y in itertools.product(range(1, q), repeat=2):
        assert chi(F.mul(x, y)) == (chi(x) + chi(y)) % n
    for x in range(1, q):
        assert chi(F.pow(x, n)) == 0
    counts = [0] * n
    for x in range(q):
        if chi(x) is not None:
            counts[chi(x)] += 1
    # each exponent class has (q-1)/n elements, so the full sum vanishes
    assert counts == [(q - 1) // n] * n
    if n in (2, 3):
        assert CyclotomicInt.from_exponent_counts(n, counts) == 0
    conj = chi.conjugate()
    assert all(conj(x) == (-chi(x)) % n for x in range(1, q))
    assert chi.power(n) == make_character(F, n).power(0)
