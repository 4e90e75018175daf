"""Dense polynomials over F_q and enumerators for the families
F_d (square-free monic) and F_(d_1,...,d_r) (tuples of pairwise coprime
square-free monic factors standing for F_1 F_2^2 ... F_r^r).

A polynomial is a tuple of field elements, constant term first, with no
trailing zeros; ``()`` is the zero polynomial.  Monic polynomials of
degree d are also addressed by an integer index sum(c_i q^i, i < d), so
increasing index is lexicographic order on (c_{d-1}, ..., c_0).

Two enumeration paths exist: generator streams that yield polynomials or
:class:`FactorTuple` objects one at a time, and numpy block enumerators
used by the histogram code.  The streams are the reference; tests check
the blocks against them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from ._validation import check_degrees, check_nonneg, prime_factors
from .gf import FieldSpec

Poly = tuple

ZERO: Poly = ()
ONE: Poly = (1,)
X: Poly = (0, 1)


# -- arithmetic ------------------------------------------------------------


def _trim(c: list[int]) -> Poly:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def degree(f: Poly) -> int:
    """Degree, with -1 for the zero polynomial."""
    return len(f) - 1


def poly_add(field: FieldSpec, f: Poly, g: Poly) -> Poly:
    n = max(len(f), len(g))
    out = [
        field.add(f[i] if i < len(f) else 0, g[i] if i < len(g) else 0) for i in range(n)
    ]
    return _trim(out)


def poly_neg(field: FieldSpec, f: Poly) -> Poly:
    return tuple(field.neg(c) for c in f)


def poly_sub(field: FieldSpec, f: Poly, g: Poly) -> Poly:
    return poly_add(field, f, poly_neg(field, g))


def poly_scale(field: FieldSpec, f: Poly, a: int) -> Poly:
    if a == 0:
        return ZERO
    return tuple(field.mul(a, c) for c in f)


def poly_mul(field: FieldSpec, f: Poly, g: Poly) -> Poly:
    if not f or not g:
        return ZERO
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            if b:
                out[i + j] = field.add(out[i + j], field.mul(a, b))
    return _trim(out)


def poly_pow(field: FieldSpec, f: Poly, e: int) -> Poly:
    acc = ONE
    for _ in range(e):
        acc = poly_mul(field, acc, f)
    return acc


def poly_divmod(field: FieldSpec, f: Poly, g: Poly) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(f)
    dg = len(g) - 1
    inv = field.inv(g[-1])
    quot = [0] * max(len(f) - dg, 0)
    while len(r) - 1 >= dg and r:
        c = field.mul(r[-1], inv)
        shift = len(r) - 1 - dg
        quot[shift] = c
        for i, gc in enumerate(g):
            r[shift + i] = field.sub(r[shift + i], field.mul(c, gc))
        while r and r[-1] == 0:
            r.pop()
    return _trim(quot), tuple(r)


def poly_mod(field: FieldSpec, f: Poly, g: Poly) -> Poly:
    return poly_divmod(field, f, g)[1]


def poly_monic(field: FieldSpec, f: Poly) -> Poly:
    if not f:
        return ZERO
    return poly_scale(field, f, field.inv(f[-1]))


def poly_gcd(field: FieldSpec, f: Poly, g: Poly) -> Poly:
    """Monic gcd; raises when both arguments are zero."""
    if not f and not g:
        raise ValueError("gcd(0, 0) is undefined")
    while g:
        f, g = g, poly_mod(field, f, g)
    return poly_monic(field, f)


def poly_deriv(field: FieldSpec, f: Poly) -> Poly:
    return _trim([field.mul(field.from_int(i), f[i]) for i in range(1, len(f))])


def poly_eval(field: FieldSpec, f: Poly, x: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = field.add(field.mul(acc, x), c)
    return acc


def poly_powmod(field: FieldSpec, f: Poly, e: int, m: Poly) -> Poly:
    acc, base = ONE, poly_mod(field, f, m)
    while e:
        if e & 1:
            acc = poly_mod(field, poly_mul(field, acc, base), m)
        base = poly_mod(field, poly_mul(field, base, base), m)
        e >>= 1
    return acc


def is_squarefree(field: FieldSpec, f: Poly) -> bool:
    if not f:
        raise ValueError("square-freeness of the zero polynomial is undefined")
    if len(f) <= 2:
        return True
    df = poly_deriv(field, f)
    if not df:
        # f is a p-th power of a non-constant polynomial
        return False
    return len(poly_gcd(field, f, df)) == 1


def is_irreducible(field: FieldSpec, f: Poly) -> bool:
    """Irreducibility of a non-constant polynomial via gcd(f, X^(q^k) - X)."""
    n = degree(f)
    if n < 1:
        return False
    f = poly_monic(field, f)
    power = X
    for _ in range(n // 2):
        power = poly_powmod(field, power, field.q, f)
        if len(poly_gcd(field, f, poly_sub(field, power, X))) != 1:
            return False
    return True


# -- indexing of monic polynomials ------------------------------------------


def monic_from_index(field: FieldSpec, d: int, index: int) -> Poly:
    q = field.q
    c = []
    for _ in range(d):
        index, r = divmod(index, q)
        c.append(r)
    return tuple(c) + (1,)


def monic_index(field: FieldSpec, f: Poly) -> int:
    idx = 0
    for c in reversed(f[:-1]):
        idx = idx * field.q + c
    return idx


# -- family members ---------------------------------------------------------


@dataclass(frozen=True)
class FactorTuple:
    """(F_1, ..., F_r) standing for F = F_1 F_2^2 ... F_r^r."""

    factors: tuple

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(degree(f) for f in self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def total_degree(self) -> int:
        return sum(i * d for i, d in enumerate(self.degrees, start=1))

    def expanded(self, field: FieldSpec) -> Poly:
        out = ONE
        for i, f in enumerate(self.factors, start=1):
            out = poly_mul(field, out, poly_pow(field, f, i))
        return out

    def evaluate(self, field: FieldSpec, x: int) -> int:
        out = 1
        for i, f in enumerate(self.factors, start=1):
            v = poly_eval(field, f, x)
            if v == 0:
                return 0
            out = field.mul(out, field.pow(v, i))
        return out

    def is_valid(self, field: FieldSpec) -> bool:
        fs = self.factors
        if any(not f or f[-1] != 1 or not is_squarefree(field, f) for f in fs):
            return False
        return all(
            len(poly_gcd(field, a, b)) == 1 for a, b in itertools.combinations(fs, 2)
        )


# -- streams -----------------------------------------------------------------


def enumerate_monic(field: FieldSpec, d: int):
    """All q^d monic polynomials of degree d, in index order."""
    check_nonneg(d, "d")
    for idx in range(field.q**d):
        yield monic_from_index(field, d, idx)


def enumerate_squarefree(field: FieldSpec, d: int):
    for f in enumerate_monic(field, d):
        if is_squarefree(field, f):
            yield f


def _prefix_matches(f: Poly, prefix) -> bool:
    d = degree(f)
    return all(f[d - 1 - i] == c for i, c in enumerate(prefix))


def enumerate_factor_tuples(field: FieldSpec, degrees, prefix=()):
    """Stream of FactorTuples with the given factor degrees.

    ``prefix`` restricts F_1 to polynomials whose top non-leading
    coefficients (X^(d_1-1) downward) equal the given values; the shards
    from :func:`prefix_shards` partition the full stream.
    """
    degrees = check_degrees(degrees)
    prefix = tuple(prefix)
    if len(prefix) > degrees[0]:
        raise ValueError("prefix longer than deg F_1")
    pools = [list(enumerate_squarefree(field, d)) for d in degrees]
    pools[0] = [f for f in pools[0] if _prefix_matches(f, prefix)]
    for combo in itertools.product(*pools):
        if all(len(poly_gcd(field, a, b)) == 1 for a, b in itertools.combinations(combo, 2)):
            yield FactorTuple(combo)


def prefix_shards(field: FieldSpec, degrees, length: int) -> list[tuple[int, ...]]:
    """Coefficient prefixes of F_1 splitting a family into disjoint shards."""
    length = min(length, check_degrees(degrees)[0])
    return list(itertools.product(range(field.q), repeat=length))


def _mobius(n: int) -> int:
    ps = prime_factors(n)
    for p in ps:
        if n % (p * p) == 0:
            return 0
    return -1 if len(ps) % 2 else 1


def count_irreducibles(q: int, n: int) -> int:
    """Number of monic irreducibles of degree n over F_q (necklace formula)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = sum(_mobius(d) * q ** (n // d) for d in range(1, n + 1) if n % d == 0)
    return total // n


def enumerate_irreducibles(field: FieldSpec, max_degree: int):
    """Monic irreducibles of degree 1..max_degree, by (degree, index)."""
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    for d in range(1, max_degree + 1):
        for f in enumerate_monic(field, d):
            if is_irreducible(field, f):
                yield f


def irreducible_factors(field: FieldSpec, f: Poly) -> list[Poly]:
    """Distinct monic irreducible divisors of a nonzero polynomial."""
    if not f:
        raise ValueError("zero polynomial has no factorisation")
    f = poly_monic(field, f)
    out = []
    for d in range(1, degree(f) + 1):
        if degree(f) < d:
            break
        for P in enumerate_monic(field, d):
            if degree(f) < d:
                break
            if not is_irreducible(field, P):
                continue
            quot, rem = poly_divmod(field, f, P)
            if rem:
                continue
            out.append(P)
            while not rem:
                f = quot
                quot, rem = poly_divmod(field, f, P)
    return out


# -- numpy block enumeration ------------------------------------------------


def monic_array(field: FieldSpec, d: int) -> np.ndarray:
    """Non-leading coefficients of all monic degree-d polys, shape (q^d, d)."""
    q = field.q
    idx = np.arange(q**d, dtype=np.int64)
    out = np.empty((q**d, d), dtype=np.int64)
    for i in range(d):
        out[:, i] = idx % q
        idx //= q
    return out


def eval_array(field: FieldSpec, coeffs: np.ndarray, points=None) -> np.ndarray:
    """Values of the monic polys with rows ``coeffs`` at ``points`` (default all of F_q)."""
    add, mul = field.add_table, field.mul_table
    pts = np.arange(field.q) if points is None else np.asarray(points, dtype=np.int64)
    n, d = coeffs.shape
    vals = np.ones((n, len(pts)), dtype=np.int64)
    for i in range(d - 1, -1, -1):
        vals = add[mul[vals, pts[None, :]], coeffs[:, i : i + 1]]
    return vals


def product_index(field: FieldSpec, coeffs: np.ndarray, g: Poly) -> np.ndarray:
    """Indices of (row poly) * g for monic g; rows are monic with ``coeffs``."""
    add, mul = field.add_table, field.mul_table
    n, da = coeffs.shape
    dg = degree(g)
    D = da + dg
    full = np.concatenate([coeffs, np.ones((n, 1), dtype=np.int64)], axis=1)
    out = np.zeros((n, D + 1), dtype=np.int64)
    for i, gi in enumerate(g):
        if gi == 0:
            continue
        out[:, i : i + da + 1] = add[out[:, i : i + da + 1], mul[gi, full]]
    weights = field.q ** np.arange(D, dtype=np.int64)
    return out[:, :D] @ weights


@lru_cache(maxsize=32)
def _squarefree_mask(field: FieldSpec, d: int) -> np.ndarray:
    q = field.q
    mask = np.ones(q**d, dtype=bool)
    if d < 2:
        return mask
    for P in enumerate_irreducibles(field, d // 2):
        P2 = poly_mul(field, P, P)
        rest = d - degree(P2)
        mask[product_index(field, monic_array(field, rest), P2)] = False
    mask.flags.writeable = False
    return mask


def squarefree_mask(field: FieldSpec, d: int) -> np.ndarray:
    """Boolean array over monic indices of degree d: True iff square-free."""
    return _squarefree_mask(field, check_nonneg(d, "d"))


@lru_cache(maxsize=32)
def _squarefree_coeffs(field: FieldSpec, d: int) -> np.ndarray:
    arr = monic_array(field, d)[squarefree_mask(field, d)]
    arr.flags.writeable = False
    return arr


def squarefree_coeffs(field: FieldSpec, d: int, prefix=()) -> np.ndarray:
    """Non-leading coefficient rows of F_d, optionally restricted by a top prefix."""
    arr = _squarefree_coeffs(field, d)
    for i, c in enumerate(prefix):
        arr = arr[arr[:, d - 1 - i] == c]
    return arr


def _row_poly(row) -> Poly:
    return tuple(int(c) for c in row) + (1,)


def family_size(field: FieldSpec, degrees) -> int:
    """|F_(d_1,...,d_r)| by block enumeration."""
    return sum(len(block) for block in iter_family_blocks(field, degrees))


def iter_family_blocks(field: FieldSpec, degrees, prefix=(), points=None, chunk: int = 1 << 18):
    """Yield int arrays L of shape (N, len(points)) with L[n, i] = log F(x_i),
    or -1 where F(x_i) = 0, over every member F of F_(d_1,...,d_r) whose F_1
    carries ``prefix``.

    The member F_1 runs over the rows of a block; the higher factors are
    fixed per block.
    """
    degrees = check_degrees(degrees)
    q1 = field.q - 1
    log = field.log_array
    pts = np.arange(field.q) if points is None else np.asarray(points, dtype=np.int64)
    d1, rest = degrees[0], degrees[1:]
    D = sum(degrees)
    sf_total = squarefree_mask(field, D) if rest else None
    f1_all = squarefree_coeffs(field, d1, prefix)

    pools = [[_row_poly(r) for r in squarefree_coeffs(field, d)] for d in rest]
    for combo in itertools.product(*pools):
        # G = F_2 ... F_r must itself be square-free (pairwise coprime factors)
        G = reduce(lambda a, b: poly_mul(field, a, b), combo, ONE)
        if combo and not is_squarefree(field, G):
            continue
        # log of F_2(x)^2 ... F_r(x)^r at each point, -1 if some factor vanishes
        tail = np.zeros(len(pts), dtype=np.int64)
        for i, f in enumerate(combo, start=2):
            v = np.array([poly_eval(field, f, int(x)) for x in pts])
            lv = log[v]
            tail = np.where((tail < 0) | (lv < 0), -1, (tail + i * lv) % q1)
        for start in range(0, len(f1_all), chunk):
            f1 = f1_all[start : start + chunk]
            if combo:
                f1 = f1[sf_total[product_index(field, f1, G)]]
            if not len(f1):
                continue
            l1 = log[eval_array(field, f1, pts)]
            L = np.where((l1 < 0) | (tail[None, :] < 0), -1, (l1 + tail[None, :]) % q1)
            yield L
