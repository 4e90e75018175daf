"""The i.i.d. model for traces: each X_i is 0 with probability
(p-1)/(q+p-1) and each p-th root of unity with probability q/(p(q+p-1)).

Everything here is exact: distributions are histograms over
:class:`CyclotomicInt` with Fraction masses, and moments are rationals.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ._validation import check_nonneg, check_prime, prime_power
from .cyclotomic import CyclotomicInt


@dataclass(frozen=True)
class RVModel:
    q: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        prime_power(self.q)

    @property
    def prob_zero(self) -> Fraction:
        return Fraction(self.p - 1, self.q + self.p - 1)

    @property
    def prob_root(self) -> Fraction:
        return Fraction(self.q, self.p * (self.q + self.p - 1))

    def single_law(self) -> Histogram:
        entries = {CyclotomicInt.zero(self.p): self.prob_zero}
        for k in range(self.p):
            entries[CyclotomicInt.root(self.p, k)] = self.prob_root
        return Histogram(self.p, entries, n_vars=1)

    def moment_single(self, b: int, c: int) -> Fraction:
        """E[X^b conj(X)^c] for one variable."""
        if b == 0 and c == 0:
            return Fraction(1)
        if (b - c) % self.p:
            return Fraction(0)
        return self.p * self.prob_root


def model_new(q: int, p: int) -> RVModel:
    return RVModel(q, p)


class Histogram:
    """Map from CyclotomicInt to a non-negative mass (int or Fraction)."""

    def __init__(self, p: int, entries=None, n_vars: int | None = None):
        self.p = p
        self.entries = {k: v for k, v in (entries or {}).items() if v}
        self.n_vars = n_vars

    def __repr__(self) -> str:
        return f"Histogram(p={self.p}, support={len(self.entries)}, total={self.total()})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Histogram)
            and self.p == other.p
            and self.entries == other.entries
        )

    def __getitem__(self, key: CyclotomicInt):
        return self.entries.get(key, 0)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        """Entries sorted by coordinates, for deterministic output."""
        return sorted(self.entries.items(), key=lambda kv: kv[0].coeffs)

    def total(self):
        return sum(self.entries.values(), 0)

    def normalized(self) -> Histogram:
        t = self.total()
        if t == 0:
            raise ValueError("cannot normalize an empty histogram")
        return Histogram(
            self.p, {k: Fraction(v) / t for k, v in self.entries.items()}, self.n_vars
        )

    def is_normalized(self) -> bool:
        return self.total() == 1

    def rotate(self, k: int = 1) -> Histogram:
        return Histogram(self.p, {s.rotate(k): v for s, v in self.entries.items()}, self.n_vars)

    def conjugate(self) -> Histogram:
        return Histogram(self.p, {s.conjugate(): v for s, v in self.entries.items()}, self.n_vars)

    def merge(self, other: Histogram) -> Histogram:
        out = defaultdict(int, self.entries)
        for k, v in other.entries.items():
            out[k] += v
        return Histogram(self.p, out, self.n_vars)

    def expectation(self, j: int, k: int) -> CyclotomicInt:
        """E[s^j conj(s)^k] under the normalized histogram, exact in Q(zeta_p)."""
        t = self.total()
        acc = CyclotomicInt.zero(self.p)
        for s, v in self.entries.items():
            acc = acc + (s**j * s.conjugate() ** k) * Fraction(v)
        return acc * (Fraction(1) / t)


def _convolve_weights(weights: dict, step: dict, p: int) -> dict:
    out: dict = defaultdict(int)
    for key, w in weights.items():
        for sk, sw in step.items():
            nk = tuple(a + b for a, b in zip(key, sk))
            out[nk] += w * sw
    return out


@lru_cache(maxsize=64)
def _sum_weights(q: int, p: int, n: int) -> tuple:
    # integer weights: zero -> p(p-1), each root -> q, over p(q+p-1) per variable
    step = {CyclotomicInt.zero(p).coeffs: p * (p - 1)}
    for k in range(p):
        step[CyclotomicInt.root(p, k).coeffs] = q
    weights = {CyclotomicInt.zero(p).coeffs: 1}
    for _ in range(n):
        weights = _convolve_weights(weights, step, p)
    return tuple(sorted(weights.items()))


def sum_distribution(model: RVModel, n: int) -> Histogram:
    """Exact law of X_1 + ... + X_n by n-fold convolution."""
    check_nonneg(n, "n")
    denom = (model.p * (model.q + model.p - 1)) ** n
    entries = {
        CyclotomicInt(model.p, key): Fraction(w, denom)
        for key, w in _sum_weights(model.q, model.p, n)
    }
    return Histogram(model.p, entries, n_vars=n)


@dataclass(frozen=True)
class ScaledMoment:
    """raw * n^(-power/2), with raw = E[S^j conj(S)^k] kept exact."""

    raw: CyclotomicInt
    n: int
    power: int

    def exact(self) -> CyclotomicInt:
        if self.power % 2:
            raise ValueError("odd total order: the value carries a sqrt(n) factor")
        return self.raw * Fraction(1, self.n ** (self.power // 2))

    def __complex__(self) -> complex:
        return complex(self.raw) / self.n ** (self.power / 2)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.raw.coeffs)


@lru_cache(maxsize=None)
def _expansion_moment(q: int, p: int, n: int, j: int, k: int) -> Fraction:
    if n == 0:
        return Fraction(1) if j == 0 and k == 0 else Fraction(0)
    model = RVModel(q, p)
    total = Fraction(0)
    for b in range(j + 1):
        for c in range(k + 1):
            m = model.moment_single(b, c)
            if m:
                total += (
                    math.comb(j, b) * math.comb(k, c) * m
                    * _expansion_moment(q, p, n - 1, j - b, k - c)
                )
    return total


def model_mixed_moment(model: RVModel, n: int, j: int, k: int, *, via: str = "expansion") -> ScaledMoment:
    """E[(S/sqrt n)^j (conj S/sqrt n)^k] for S = X_1 + ... + X_n.

    ``via="expansion"`` uses the binomial expansion over independent
    variables; ``via="histogram"`` integrates against :func:`sum_distribution`.
    """
    check_nonneg(j, "j")
    check_nonneg(k, "k")
    if via == "expansion":
        raw = CyclotomicInt.from_int(model.p, _expansion_moment(model.q, model.p, n, j, k))
    elif via == "histogram":
        raw = sum_distribution(model, n).expectation(j, k)
    else:
        raise ValueError(f"unknown moment route {via!r}")
    return ScaledMoment(raw, max(n, 1), j + k)


def gaussian_mixed_moment(j: int, k: int) -> int:
    """E[Z^j conj(Z)^k] for a standard complex Gaussian."""
    return math.factorial(k) if j == k else 0
