"""Small argument checks shared by the public entry points."""

from __future__ import annotations

from fractions import Fraction


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` in increasing order."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q = ell**e``; raise if ``q`` is not a prime power."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    ps = prime_factors(q)
    if len(ps) != 1:
        raise ValueError(f"{q} is not a prime power")
    ell, e = ps[0], 0
    while q > 1:
        q //= ell
        e += 1
    return ell, e


def check_prime(p: int, name: str = "p") -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{name}={p!r} must be a prime")
    return p


def check_nonneg(n: int, name: str) -> int:
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"{name}={n!r} must be a non-negative integer")
    return n


def check_degrees(degrees) -> tuple[int, ...]:
    degrees = tuple(degrees)
    if not degrees:
        raise ValueError("degree tuple must be non-empty")
    for d in degrees:
        check_nonneg(d, "degree")
    return degrees


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
