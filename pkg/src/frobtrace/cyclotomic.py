"""Exact elements of Z[zeta_p] (and Q(zeta_p)) in the reduced basis
1, zeta, ..., zeta^(p-2).

For p = 3 this is Z[omega] with omega^2 = -1 - omega; for p = 2 it is
just Z.  Coefficients are ints for lattice points; expectations over
histograms produce Fraction coefficients through the same class.
"""

from __future__ import annotations

import cmath
from fractions import Fraction


class CyclotomicInt:
    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs=()):
        coeffs = tuple(coeffs)
        n = max(p - 1, 1)
        if len(coeffs) == p and p > 1:
            # unreduced: use 1 + zeta + ... + zeta^(p-1) = 0
            top = coeffs[-1]
            coeffs = tuple(c - top for c in coeffs[:-1]) if p > 2 else (coeffs[0] - top,)
        if len(coeffs) < n:
            coeffs = coeffs + (0,) * (n - len(coeffs))
        if len(coeffs) != n:
            raise ValueError(f"expected {n} coefficients for p={p}, got {len(coeffs)}")
        self.p = p
        self.coeffs = coeffs

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> CyclotomicInt:
        return cls(p)

    @classmethod
    def from_int(cls, p: int, n) -> CyclotomicInt:
        return cls(p, (n,))

    @classmethod
    def root(cls, p: int, k: int) -> CyclotomicInt:
        """zeta_p ** k."""
        counts = [0] * p
        counts[k % p] = 1
        return cls.from_exponent_counts(p, counts)

    @classmethod
    def from_exponent_counts(cls, p: int, counts) -> CyclotomicInt:
        """sum(counts[k] * zeta^k for k in range(p))."""
        counts = tuple(counts)
        if p == 2:
            return cls(2, (counts[0] - counts[1],))
        return cls(p, counts)

    # -- ring structure -----------------------------------------------------

    def _full(self) -> list:
        """Length-p vector (last entry 0) in Z[x]/(x^p - 1)."""
        if self.p == 2:
            return [self.coeffs[0], 0]
        return list(self.coeffs) + [0]

    def _check(self, other) -> CyclotomicInt:
        if isinstance(other, CyclotomicInt):
            if other.p != self.p:
                raise ValueError("mixing different cyclotomic rings")
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicInt.from_int(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return CyclotomicInt(self.p, (a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicInt(self.p, (-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicInt(self.p, (a * other for a in self.coeffs))
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.p
        a, b = self._full(), other._full()
        out = [0] * p
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % p] += x * y
        return CyclotomicInt.from_exponent_counts(p, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        acc = CyclotomicInt.from_int(self.p, 1)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def rotate(self, k: int) -> CyclotomicInt:
        """self * zeta^k."""
        p = self.p
        a = self._full()
        out = [0] * p
        for i, x in enumerate(a):
            out[(i + k) % p] = x
        return CyclotomicInt.from_exponent_counts(p, out)

    def conjugate(self) -> CyclotomicInt:
        p = self.p
        a = self._full()
        out = [0] * p
        for i, x in enumerate(a):
            out[(-i) % p] = x
        return CyclotomicInt.from_exponent_counts(p, out)

    def norm2(self) -> CyclotomicInt:
        """self * conj(self), an element of the real subfield."""
        return self * self.conjugate()

    # -- comparisons and conversions -------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CyclotomicInt.from_int(self.p, other)
        if not isinstance(other, CyclotomicInt):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def __lt__(self, other: CyclotomicInt) -> bool:
        return self.coeffs < other.coeffs

    def __repr__(self) -> str:
        return f"CyclotomicInt(p={self.p}, {self.coeffs})"

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self.coeffs[0])

    def __complex__(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.p)
        return sum(complex(float(c)) * z**i for i, c in enumerate(self.coeffs))

    def __abs__(self) -> float:
        return abs(complex(self))
