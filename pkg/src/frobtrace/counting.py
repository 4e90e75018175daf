"""Closed-form counts, asymptotic main terms and the Euler constants K, L_{r-1}.

Counts and probabilities are exact integers or Fractions.  The Euler
products are kept as exact per-degree factor lists; their numerical value
is produced with mpmath together with a rational tail bound, since the
exact rational partial products have exponents in the billions.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

import mpmath

from ._validation import check_nonneg, check_prime, prime_power
from .gf import CharacterOrderError, FieldSpec, field_of_size
from .polyring import Poly, count_irreducibles, degree, irreducible_factors


def _field(q_or_field) -> FieldSpec:
    if isinstance(q_or_field, FieldSpec):
        return q_or_field
    return field_of_size(q_or_field)


def zeta_q_at(q: int, s: int) -> Fraction:
    """zeta_q(s) = (1 - q^(1-s))^(-1) for integer s >= 2."""
    if s == 1:
        raise ZeroDivisionError("zeta_q has a pole at s = 1")
    if s < 1:
        raise ValueError("only s >= 2 is supported")
    return 1 / (1 - Fraction(1, q ** (s - 1)))


# -- exact counts -------------------------------------------------------------


def exact_count_squarefree(q: int, d: int) -> int:
    check_nonneg(d, "d")
    return q**d if d < 2 else q**d - q ** (d - 1)


def exact_count_squarefree_nonmonic(q: int, d: int) -> int:
    return (q - 1) * exact_count_squarefree(q, d)


def exact_count_monic_prescribed(q: int, d: int, ell: int) -> int:
    """Monic degree-d polynomials taking ell prescribed values at ell distinct points."""
    check_nonneg(ell, "ell")
    if ell > d or ell > q:
        raise ValueError(f"need ell <= min(d, q), got ell={ell}, d={d}, q={q}")
    return q ** (d - ell)


def exact_count_coprime_prescribed(q, d: int, U: Poly, ell: int, points=()) -> int:
    """Monic degree-d F coprime to U with ell prescribed nonzero values.

    The closed form is q^(d-ell) * prod_{P | U} (1 - q^(-deg P)).  Its
    derivation applies the interpolation count in degree d - deg D for
    every squarefree D | U, so it is an identity once d >= ell + deg rad(U).
    ``points``, if given, are checked to avoid the roots of U.
    """
    fld = _field(q)
    qq = fld.q
    check_nonneg(ell, "ell")
    if ell > min(d, qq):
        raise ValueError(f"need ell <= min(d, q), got ell={ell}")
    from .polyring import poly_eval

    for x in points:
        if poly_eval(fld, U, x) == 0:
            raise ValueError(f"prescribed point {x} is a root of U")
    value = Fraction(qq ** (d - ell))
    for P in irreducible_factors(fld, U):
        value *= 1 - Fraction(1, qq ** degree(P))
    if value.denominator != 1:  # pragma: no cover - d too small for the identity
        raise ValueError("closed form is not integral; d is below the exact range")
    return int(value)


# -- Euler products -------------------------------------------------------------


@dataclass(frozen=True)
class EulerProduct:
    """Truncated prod over monic irreducibles P with deg P <= trunc_degree.

    ``factors`` lists (degree n, base, exponent): the product of
    base ** exponent over the list is the partial product.  The infinite
    product lies in [value * exp(-tail), value].
    """

    name: str
    q: int
    trunc_degree: int
    factors: tuple
    tail: Fraction

    def value(self, dps: int = 40) -> mpmath.mpf:
        with mpmath.workdps(dps):
            acc = mpmath.mpf(0)
            for _, base, e in self.factors:
                acc += e * mpmath.log(mpmath.mpf(base.numerator) / base.denominator)
            return +mpmath.exp(acc)

    def __float__(self) -> float:
        return float(self.value())

    def bounds(self, dps: int = 40) -> tuple:
        """(lower, upper) bounds on the infinite product."""
        with mpmath.workdps(dps):
            v = self.value(dps)
            lower = v * mpmath.exp(-mpmath.mpf(self.tail.numerator) / self.tail.denominator)
            return lower, v

    def exact_partial(self, max_exponent: int = 10**5) -> Fraction:
        """The partial product as a Fraction; only for small truncations."""
        if sum(e for _, _, e in self.factors) > max_exponent:
            raise OverflowError("exact partial product too large; use value()")
        acc = Fraction(1)
        for _, base, e in self.factors:
            acc *= base**e
        return acc


def _tail_bound(q: int, N: int, c: Fraction) -> Fraction:
    # sum over deg P > N of -log(1 - x_P) with x_P <= c/|P|^2 and at most
    # q^n/n irreducibles of degree n; -log(1-x) <= x/(1-x)
    x_max = c / Fraction(q) ** (2 * (N + 1))
    if x_max >= 1:
        raise ValueError("truncation too short for a tail bound")
    geometric = Fraction(1, (N + 1) * q ** (N + 1)) / (1 - Fraction(1, q))
    return c / (1 - x_max) * geometric


def euler_constant_L(q: int, r: int, trunc_degree: int = 12) -> EulerProduct:
    """L_{r-1} = prod_{j=1}^{r-1} prod_P (1 - j/((|P|+1)(|P|+j)))."""
    if r < 2:
        raise ValueError("r must be >= 2")
    if trunc_degree < 1:
        raise ValueError("trunc_degree must be >= 1")
    prime_power(q)
    factors = []
    for n in range(1, trunc_degree + 1):
        Q = q**n
        cnt = count_irreducibles(q, n)
        for j in range(1, r):
            factors.append((n, 1 - Fraction(j, (Q + 1) * (Q + j)), cnt))
    c = Fraction(r * (r - 1), 2)
    return EulerProduct(f"L_{r - 1}", q, trunc_degree, tuple(factors), _tail_bound(q, trunc_degree, c))


def euler_constant_K(q: int, trunc_degree: int = 12) -> EulerProduct:
    """K = prod_P (1 - 1/(|P|+1)^2)."""
    if trunc_degree < 1:
        raise ValueError("trunc_degree must be >= 1")
    prime_power(q)
    factors = tuple(
        (n, 1 - Fraction(1, (q**n + 1) ** 2), count_irreducibles(q, n))
        for n in range(1, trunc_degree + 1)
    )
    return EulerProduct("K", q, trunc_degree, factors, _tail_bound(q, trunc_degree, Fraction(1)))


# -- main terms -------------------------------------------------------------------


@dataclass(frozen=True)
class MainTermPrediction:
    """rational_part (times the Euler constant, if any) is the main term.

    ``error_exponents`` are the q-exponents inside the O(.) of the cited
    statement, evaluated at the given parameters with epsilon = 0.
    ``probability`` is the ratio form (count / family size) when the
    statement has one.
    """

    rational_part: Fraction
    error_exponents: tuple
    statement_id: str
    euler_factor: EulerProduct | None = None
    probability: Fraction | None = None
    notes: tuple = dc_field(default=())

    @property
    def main_term(self):
        if self.euler_factor is None:
            return self.rational_part
        return self.euler_factor.value() * (
            mpmath.mpf(self.rational_part.numerator) / self.rational_part.denominator
        )

    def ratio(self, count) -> float:
        """count / main term."""
        main = self.main_term
        if isinstance(main, Fraction):
            return float(Fraction(count) / main)
        return float(mpmath.mpf(count) / main)

    def relative_error(self, count) -> float:
        return abs(self.ratio(count) - 1)


def main_term_squarefree_prescribed(q: int, d: int, ell: int, m: int) -> MainTermPrediction:
    """Square-free monic F with ell nonzero values and m zeros prescribed."""
    check_nonneg(ell, "ell")
    check_nonneg(m, "m")
    if ell + m > q:
        raise ValueError("ell + m must be at most q")
    iq = Fraction(1, q)
    prob = (1 - iq) ** m * iq ** (m + ell) / (1 - iq**2) ** (m + ell)
    main = prob * Fraction(q) ** d / zeta_q_at(q, 2)
    return MainTermPrediction(
        main, (Fraction(3 * m + 2 * ell - d, 2),), "squarefree-prescribed", probability=prob
    )


def main_term_squarefree_k_roots(q: int, d: int, k: int) -> MainTermPrediction:
    """Square-free monic F of degree d with exactly k roots in F_q."""
    if not 0 <= k <= q:
        raise ValueError("need 0 <= k <= q")
    main = math.comb(q, k) * Fraction(q) ** (d - k) / (zeta_q_at(q, 2) * (1 + Fraction(1, q)) ** q)
    return MainTermPrediction(main, (Fraction(k + 2 * q - d, 2),), "squarefree-k-roots")


def main_term_SdU(q, d: int, U: Poly, ell: int) -> MainTermPrediction:
    """Square-free monic F coprime to U with ell nonzero values prescribed."""
    fld = _field(q)
    qq = fld.q
    if not 0 <= ell <= qq:
        raise ValueError("need 0 <= ell <= q")
    iq = Fraction(1, qq)
    main = Fraction(qq) ** (d - ell) / (zeta_q_at(qq, 2) * (1 - iq**2) ** ell)
    for P in irreducible_factors(fld, U):
        main /= 1 + Fraction(1, qq ** degree(P))
    # the error is absolute, O(q^(d/2)); relative to the main term it is q^(ell - d/2)
    return MainTermPrediction(main, (Fraction(2 * ell - d, 2),), "squarefree-coprime-prescribed")


def main_term_component_prescribed(q: int, degrees, ell: int, m: int = 0,
                                   trunc_degree: int = 12) -> MainTermPrediction:
    """|{F in F_(d_1..d_r) : ell nonzero values and m zeros prescribed}|.

    For r = 2 the Euler factor is K; in general it is L_{r-1}.
    """
    degrees = tuple(degrees)
    r = len(degrees)
    if r < 2:
        raise ValueError("need at least two factor degrees")
    if ell + m > q:
        raise ValueError("ell + m must be at most q")
    prob = Fraction(r, q + r) ** m * Fraction(q, (q + r) * (q - 1)) ** ell
    main = prob * Fraction(q) ** sum(degrees) / zeta_q_at(q, 2) ** r
    euler = euler_constant_K(q, trunc_degree) if r == 2 else euler_constant_L(q, r, trunc_degree)
    d1, rest = degrees[0], degrees[1:]
    errs = tuple(Fraction(-d + m) for d in rest) + (Fraction(-(d1 - m), 2) + ell + m,)
    return MainTermPrediction(main, errs, "component-prescribed", euler_factor=euler, probability=prob)


def main_term_char_prescribed(q: int, p: int, degrees, m: int,
                              trunc_degree: int = 12) -> MainTermPrediction:
    """Tuples whose chi_p values at all q points form one pattern with m zeros."""
    check_prime(p)
    degrees = tuple(degrees)
    if (q - 1) % p:
        raise CharacterOrderError(f"q={q} is not 1 mod {p}")
    if not 0 <= m <= q:
        raise ValueError("need 0 <= m <= q")
    if len(degrees) != p - 1:
        raise ValueError(f"need {p - 1} factor degrees for p={p}")
    prob = Fraction(p - 1, q + p - 1) ** m * Fraction(q, p * (q + p - 1)) ** (q - m)
    main = prob * Fraction(q) ** sum(degrees) / zeta_q_at(q, 2) ** (p - 1)
    euler = euler_constant_K(q, trunc_degree) if p == 3 else euler_constant_L(q, p - 1, trunc_degree)
    d1, rest = degrees[0], degrees[1:]
    errs = tuple(Fraction(m - d) for d in rest) + (Fraction(-(d1 - m), 2) + q,)
    return MainTermPrediction(main, errs, "character-pattern", euler_factor=euler, probability=prob)


def pattern_probability_total(q: int, p: int) -> Fraction:
    """Sum of the pattern probabilities over all (p+1)^q patterns (equals 1)."""
    return sum(
        math.comb(q, m) * p ** (q - m) * main_term_char_prescribed(q, p, (1,) * (p - 1), m).probability
        for m in range(q + 1)
    )


# -- residue tuples ------------------------------------------------------------


def residue_tuple_count(q: int, p: int) -> int:
    """Number of (p-1)-tuples of nonzero residues mod (X-t)^2, at most one divisible by X-t."""
    check_prime(p)
    return q ** (p - 2) * (q - 1) ** (p - 1) * (q + p - 1)


def _residues(field: FieldSpec):
    # a + b (X - t) with (a, b) != (0, 0); only a = value at t matters
    return [(a, b) for a in field.elements() for b in field.elements() if (a, b) != (0, 0)]


def _tuple_value(field: FieldSpec, tup) -> int | None:
    zeros = sum(1 for a, _ in tup if a == 0)
    if zeros > 1:
        return None
    if zeros == 1:
        return 0
    v = 1
    for i, (a, _) in enumerate(tup, start=1):
        v = field.mul(v, field.pow(a, i))
    return v


def residue_value_distribution(field: FieldSpec, p: int, t: int = 0, *,
                               method: str = "auto") -> Counter:
    """Counter value -> number of admissible residue tuples with F(t) = value.

    ``method="enumerate"`` walks all (q^2-1)^(p-1) tuples; ``"convolve"``
    folds one slot at a time over the exhaustive per-slot residue list,
    tracking (number of slots divisible by X-t, value at t).
    """
    check_prime(p)
    if not 0 <= t < field.q:
        raise ValueError("t must be an element of the field")
    res = _residues(field)
    if method == "auto":
        method = "enumerate" if len(res) ** (p - 1) <= 10**6 else "convolve"
    if method == "enumerate":
        out: Counter = Counter()
        for tup in itertools.product(res, repeat=p - 1):
            v = _tuple_value(field, tup)
            if v is not None:
                out[v] += 1
        return out
    if method != "convolve":
        raise ValueError(f"unknown method {method!r}")
    # state: (zeros so far, product of a_i^i over nonzero a_i)
    state: Counter = Counter({(0, 1): 1})
    for i in range(1, p):
        nxt: Counter = Counter()
        for (z, v), w in state.items():
            for a, _ in res:
                if a == 0:
                    if z == 0:
                        nxt[(1, v)] += w
                else:
                    nxt[(z, field.mul(v, field.pow(a, i)))] += w
        state = nxt
    out = Counter()
    for (z, v), w in state.items():
        out[0 if z else v] += w
    return out


def brute_residue_tuple_count(field: FieldSpec, p: int, t: int = 0, *, method: str = "auto") -> int:
    return sum(residue_value_distribution(field, p, t, method=method).values())


@lru_cache(maxsize=None)
def residue_value_probabilities(q: int, p: int) -> tuple:
    """(P(value = 0), P(value = a) for each fixed nonzero a)."""
    return Fraction(p - 1, q + p - 1), Fraction(q, (q - 1) * (q + p - 1))
