"""Character-sum traces of Y^p = F(X), point counts over extensions, and
recovery of the zeta numerator P_C(T) from point counts.

Conventions: for F = alpha * F_1 F_2^2 ... F_r^r and a target component
(d_1, ..., d_r), the value of F at infinity is alpha when the factor
degrees equal the target (deg F = 0 mod p) and 0 for the degree-dropped
members of the closed family.  The trace on the chi-part of H^1 is minus
the projective character sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .cyclotomic import CyclotomicInt
from .gf import FieldSpec, MultCharacter, make_extension
from .polyring import FactorTuple

WEIL_TOLERANCE = 1e-9
# largest extension field used for point counting
MAX_EXTENSION_SIZE = 1 << 21


class FamilyError(ValueError):
    """A polynomial tuple does not belong to the requested closed family."""


class IntegrityError(RuntimeError):
    """Recovered zeta data violates the functional equation."""


def _check_rank(F: FactorTuple, chi: MultCharacter):
    if chi.order != F.rank + 1:
        raise ValueError(
            f"character order {chi.order} does not match a rank-{F.rank} factor tuple"
        )


def _exponent_counts(field: FieldSpec, F: FactorTuple, chi: MultCharacter) -> list[int]:
    p = chi.order
    counts = [0] * p
    for x in field.elements():
        e = chi(F.evaluate(field, x))
        if e is not None:
            counts[e] += 1
    return counts


def affine_char_sum(field: FieldSpec, F: FactorTuple, chi: MultCharacter) -> CyclotomicInt:
    """sum over x in F_q of chi(F(x))."""
    _check_rank(F, chi)
    return CyclotomicInt.from_exponent_counts(chi.order, _exponent_counts(field, F, chi))


def _dropped_variants(target) -> list[tuple[int, ...]]:
    out = []
    for i, d in enumerate(target):
        if d > 0:
            out.append(tuple(target[:i]) + (d - 1,) + tuple(target[i + 1 :]))
    return out


def closed_family(target) -> list[tuple[int, ...]]:
    """Degree tuples making up F_[d]: the target and its one-step drops."""
    target = tuple(target)
    return [target] + _dropped_variants(target)


def infinity_value(field: FieldSpec, F: FactorTuple, target, alpha: int = 1) -> int:
    """Value of alpha*F at the point at infinity for the closed family of ``target``."""
    target = tuple(target)
    p = len(target) + 1
    if F.degrees == target:
        return alpha if F.total_degree % p == 0 else 0
    if F.degrees in _dropped_variants(target):
        return 0
    raise FamilyError(f"degrees {F.degrees} are not in the closed family of {target}")


def projective_char_sum(field: FieldSpec, F: FactorTuple, alpha: int, chi: MultCharacter,
                        target) -> CyclotomicInt:
    """sum over x in P^1(F_q) of chi((alpha F)(x))."""
    if alpha == 0:
        raise ValueError("scale must be nonzero")
    inf = infinity_value(field, F, target, alpha)
    s = affine_char_sum(field, F, chi).rotate(chi(alpha))
    e = chi(inf)
    if e is not None:
        s = s + CyclotomicInt.root(chi.order, e)
    return s


def frobenius_trace(field: FieldSpec, F: FactorTuple, alpha: int, chi: MultCharacter,
                    target) -> CyclotomicInt:
    """Trace of Frobenius on the chi-isotypic part of H^1."""
    return -projective_char_sum(field, F, alpha, chi, target)


def genus(p: int, degrees) -> int:
    """Genus of Y^p = F_1 F_2^2 ... from its factor degrees."""
    degrees = tuple(degrees)
    total = sum(i * d for i, d in enumerate(degrees, start=1))
    R = sum(degrees) + (0 if total % p == 0 else 1)
    g2 = (p - 1) * (R - 2)
    if g2 < 0:
        return 0
    return g2 // 2


def point_count_extension(field: FieldSpec, F: FactorTuple, alpha: int, p: int, n: int) -> int:
    """#C(F_{q^n}) for the smooth projective model of Y^p = alpha * F(X)."""
    if field.q**n > MAX_EXTENSION_SIZE:
        raise MemoryError(f"F_{{{field.q}^{n}}} exceeds the extension budget")
    big, emb = make_extension(field, n)
    emb = np.array(emb, dtype=np.int64)
    xs = np.arange(big.q, dtype=np.int64)
    Q1 = big.q - 1
    log = big.log_array

    # log of F(x) accumulated factor by factor; -1 marks a zero value
    acc = np.full(big.q, log[emb[alpha]], dtype=np.int64)
    for i, f in enumerate(F.factors, start=1):
        v = np.full(big.q, emb[f[-1]], dtype=np.int64)
        for c in reversed(f[:-1]):
            v = big.add_vec(big.mul_vec(v, xs), emb[c])
        lv = log[v]
        acc = np.where((acc < 0) | (lv < 0), -1, (acc + i * lv) % Q1)

    def fibre(logs):
        # number of y with y^p = value, given log(value) (or -1 for 0)
        if Q1 % p:
            return np.ones_like(logs)
        return np.where(logs < 0, 1, np.where(logs % p == 0, p, 0))

    affine = int(fibre(acc).sum())
    if F.total_degree % p == 0:
        at_inf = int(fibre(np.array([log[emb[alpha]]]))[0])
    else:
        at_inf = 1
    return affine + at_inf


@dataclass
class ZetaData:
    genus: int
    q: int
    point_counts: tuple
    P_coeffs: tuple
    roots: tuple
    max_weil_deviation: float

    @property
    def trace(self) -> int:
        """Tr(Frob) = sum of the reciprocal roots = -a_1."""
        return -self.P_coeffs[1] if self.genus else 0


def power_sums_to_coefficients(power_sums) -> list[int]:
    """Coefficients of prod(1 - alpha_j T) from s_k = sum alpha_j^k (Newton)."""
    e = [Fraction(1)]
    for k in range(1, len(power_sums) + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * power_sums[i - 1]
        e.append(acc / k)
    coeffs = []
    for k, ek in enumerate(e):
        if ek.denominator != 1:
            raise IntegrityError(f"non-integral elementary symmetric function e_{k}={ek}")
        coeffs.append((-1) ** k * int(ek))
    return coeffs


def zeta_from_counts(counts, q: int, g: int) -> ZetaData:
    """Numerator P_C(T) of the zeta function from N_1, ..., N_2g."""
    counts = tuple(int(c) for c in counts)
    if len(counts) != 2 * g:
        raise ValueError(f"need {2 * g} point counts for genus {g}, got {len(counts)}")
    s = [q**n + 1 - N for n, N in enumerate(counts, start=1)]
    a = power_sums_to_coefficients(s)
    for i in range(g + 1):
        if a[2 * g - i] != q ** (g - i) * a[i]:
            raise IntegrityError(
                f"functional equation fails at a_{2 * g - i}={a[2 * g - i]} vs q^{g - i}*a_{i}"
            )
    if g == 0:
        return ZetaData(0, q, counts, (1,), (), 0.0)
    with mpmath.workdps(60):
        roots = mpmath.polyroots(list(reversed(a)), maxsteps=400, extraprec=200)
        alphas = [1 / r for r in roots]
        sq = mpmath.sqrt(q)
        dev = max(abs(abs(x) - sq) for x in alphas)
        alphas = tuple(complex(x) for x in alphas)
        dev = float(dev)
    return ZetaData(g, q, counts, tuple(a), alphas, dev)


def character_sum_total(field: FieldSpec, F: FactorTuple, alpha: int, chi: MultCharacter,
                        target) -> CyclotomicInt:
    """sum_{j=1}^{p-1} of the projective sums for chi^j; equals #C(F_q) - q - 1."""
    p = chi.order
    total = CyclotomicInt.zero(p)
    for j in range(1, p):
        total = total + projective_char_sum(field, F, alpha, chi.power(j), target)
    return total
