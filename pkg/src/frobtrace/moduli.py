"""Moduli components, weighted counts and empirical trace statistics.

Histograms of projective character sums over the closed family F^_[d]
are built from monic enumerations only: for a monic member F and a scalar
alpha, S^(alpha F) = chi(alpha) S^(F), so each monic value s contributes
(q-1)/p copies to every rotation s * zeta^k.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from ._validation import check_nonneg, check_prime
from .cyclotomic import CyclotomicInt
from .gf import CharacterOrderError, FieldSpec, MultCharacter, make_character
from .polyring import iter_family_blocks, prefix_shards
from .rvmodel import Histogram, RVModel, ScaledMoment, model_mixed_moment, sum_distribution
from .trace import closed_family

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured evaluation budget."""


# -- components ---------------------------------------------------------------


def genus_of(degrees, p: int) -> tuple[int, int]:
    """(R, g) for Y^p = F_1 F_2^2 ... with the given factor degrees."""
    check_prime(p)
    degrees = tuple(degrees)
    for d in degrees:
        check_nonneg(d, "degree")
    total = sum(i * d for i, d in enumerate(degrees, start=1))
    R = sum(degrees) + (0 if total % p == 0 else 1)
    return R, max((p - 1) * (R - 2), 0) // 2


@dataclass(frozen=True)
class ComponentIndex:
    p: int
    degrees: tuple

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "degrees", tuple(self.degrees))
        if self.p == 2:
            if len(self.degrees) != 1:
                raise ValueError("hyperelliptic components have a single degree")
        else:
            if len(self.degrees) != self.p - 1:
                raise ValueError(f"need {self.p - 1} factor degrees for p={self.p}")
            if sum(i * d for i, d in enumerate(self.degrees, start=1)) % self.p:
                raise ValueError(f"{self.degrees} has deg F not divisible by {self.p}")
            if self.p == 3 and self.degrees[0] < self.degrees[1]:
                # (d_1, d_2) and (d_2, d_1) index the same component
                object.__setattr__(self, "degrees", self.degrees[::-1])

    @property
    def genus(self) -> int:
        return genus_of(self.degrees, self.p)[1]

    @property
    def target(self) -> tuple:
        """Degree tuple whose closed family gives the component."""
        if self.p == 2 and self.degrees[0] % 2:
            return (self.degrees[0] + 1,)
        return self.degrees

    @property
    def signature(self) -> tuple[int, int]:
        return signature_of(self)

    def advisories(self) -> list[str]:
        g = self.genus
        if self.p == 3 and g < 5:
            return [f"g={g} < 5: the automorphism count q(q^2-1) is only proved for g >= 5"]
        if self.p > 3 and g <= (self.p - 1) ** 2:
            return [f"g={g} <= (p-1)^2: below the range of the general-p statements"]
        return []


def components_for_genus(g: int, p: int) -> list[ComponentIndex]:
    check_nonneg(g, "g")
    check_prime(p)
    if p == 2:
        return [ComponentIndex(2, (2 * g + 1,)), ComponentIndex(2, (2 * g + 2,))]
    if (2 * g) % (p - 1):
        return []
    total = 2 * g // (p - 1) + 2
    out = set()

    def compositions(n, parts):
        if parts == 1:
            yield (n,)
            return
        for first in range(n + 1):
            for rest in compositions(n - first, parts - 1):
                yield (first,) + rest

    for degs in compositions(total, p - 1):
        if sum(i * d for i, d in enumerate(degs, start=1)) % p == 0:
            out.add(ComponentIndex(p, degs))
    return sorted(out, key=lambda c: tuple(-d for d in c.degrees))


def signature_of(component: ComponentIndex) -> tuple[int, int]:
    if component.p != 3:
        raise ValueError("signatures are defined for trigonal components")
    d1, d2 = component.degrees
    return (2 * d1 + d2 - 3) // 3, (d1 + 2 * d2 - 3) // 3


def component_from_signature(r: int, s: int) -> ComponentIndex:
    return ComponentIndex(3, (2 * r - s + 1, 2 * s - r + 1))


# -- enumeration ------------------------------------------------------------------


def _as_component(component, p: int | None = None) -> ComponentIndex:
    if isinstance(component, ComponentIndex):
        return component
    degrees = tuple(component)
    return ComponentIndex(p if p is not None else len(degrees) + 1, degrees)


def _evaluations(field: FieldSpec, degrees) -> int:
    size = 1
    for d in degrees:
        size *= field.q**d
    return size * field.q


def _monic_sum_counts(args) -> dict:
    """Counter: reduced coordinates of S(F) -> number of monic members."""
    field, degrees, prefix, p, twist = args
    q = field.q
    base = 2 * q + 1
    n = max(p - 1, 1)
    weights = base ** np.arange(n, dtype=np.int64)
    out: Counter = Counter()
    for L in iter_family_blocks(field, degrees, prefix):
        e = np.where(L < 0, -1, (twist * L) % p)
        counts = [(e == k).sum(axis=1) for k in range(p)]
        if p == 2:
            coords = [counts[0] - counts[1]]
        else:
            coords = [counts[k] - counts[p - 1] for k in range(p - 1)]
        key = sum((c + q) * w for c, w in zip(coords, weights))
        keys, mult = np.unique(key, return_counts=True)
        for kk, m in zip(keys.tolist(), mult.tolist()):
            out[kk] += m
    result = {}
    for kk, m in out.items():
        coords = []
        for _ in range(n):
            coords.append(kk % base - q)
            kk //= base
        result[tuple(coords)] = m
    return result


def monic_sum_counts(field: FieldSpec, degrees, p: int, twist: int = 1, *,
                     workers: int = 1, shard_length: int = 1,
                     budget: int | None = DEFAULT_BUDGET) -> Counter:
    """Distribution of affine sums S(F) over monic F in F_(degrees), as a Counter
    keyed by CyclotomicInt.

    The work is split into F_1-prefix shards; shard results are merged by
    exact integer addition, so the outcome does not depend on ``workers``.
    """
    degrees = tuple(degrees)
    if budget is not None and _evaluations(field, degrees) > budget:
        raise BudgetExceeded(
            f"F_{degrees} over F_{field.q} needs ~{_evaluations(field, degrees):.3g} evaluations"
        )
    shards = prefix_shards(field, degrees, shard_length)
    tasks = [(field, degrees, prefix, p, twist) for prefix in shards]
    if workers <= 1 or len(tasks) == 1:
        parts = [_monic_sum_counts(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_monic_sum_counts, tasks))
    merged: Counter = Counter()
    for part in parts:
        for key, m in part.items():
            merged[CyclotomicInt(p, key)] += m
    return merged


def character_pattern_counts(field: FieldSpec, degrees, p: int, twist: int = 1) -> Counter:
    """Counter: (chi(F(x)) for x in F_q) -> number of monic members of F_(degrees).

    Each pattern entry is None where F(x) = 0 and the exponent k of
    chi(F(x)) = zeta^k otherwise.
    """
    q = field.q
    if (q - 1) % p:
        raise CharacterOrderError(f"q={q} is not 1 mod {p}")
    weights = (p + 1) ** np.arange(q, dtype=np.int64)
    out: Counter = Counter()
    for L in iter_family_blocks(field, degrees):
        # digit p codes a zero value
        digits = np.where(L < 0, p, (twist * L) % p)
        keys, mult = np.unique(digits @ weights, return_counts=True)
        for kk, m in zip(keys.tolist(), mult.tolist()):
            out[kk] += m
    result: Counter = Counter()
    for kk, m in out.items():
        pattern = []
        for _ in range(q):
            digit = kk % (p + 1)
            pattern.append(None if digit == p else digit)
            kk //= p + 1
        result[tuple(pattern)] = m
    return result


def pattern_tv(counts: Counter, q: int, p: int) -> Fraction:
    """TV distance between observed character patterns and the product law
    P(zero) = (p-1)/(q+p-1), P(zeta^k) = q/(p(q+p-1)) at each point."""
    total = sum(counts.values())
    p_zero = Fraction(p - 1, q + p - 1)
    p_root = Fraction(q, p * (q + p - 1))
    seen = Fraction(0)
    dist = Fraction(0)
    for pattern, m in counts.items():
        zeros = sum(1 for v in pattern if v is None)
        prob = p_zero**zeros * p_root ** (q - zeros)
        seen += prob
        dist += abs(Fraction(m, total) - prob)
    # unobserved patterns contribute their whole model mass
    return (dist + 1 - seen) / 2


# -- reports -----------------------------------------------------------------------


def tv_distance(h1: Histogram, h2: Histogram) -> Fraction:
    """Total variation distance between two normalized histograms."""
    if not (h1.is_normalized() and h2.is_normalized()):
        raise ValueError("tv_distance needs normalized histograms")
    keys = set(h1.entries) | set(h2.entries)
    return sum((abs(Fraction(h1[k]) - Fraction(h2[k])) for k in keys), Fraction(0)) / 2


def per_bin_deviation(empirical: Histogram, predicted: Histogram, threshold: Fraction) -> Fraction:
    """max |emp(s)/pred(s) - 1| over bins with predicted mass >= threshold."""
    emp = empirical.normalized()
    worst = Fraction(0)
    for s, m in predicted.entries.items():
        if m >= threshold:
            worst = max(worst, abs(Fraction(emp[s]) / m - 1))
    return worst


@dataclass
class EmpiricalReport:
    kind: str
    q: int
    p: int
    component: tuple
    histogram: Histogram
    prediction: Histogram
    n_vars: int
    family_sizes: dict
    weighted_size: Fraction | None = None
    advisories: list = dc_field(default_factory=list)

    @property
    def total(self) -> int:
        return self.histogram.total()

    @property
    def tv(self) -> Fraction:
        return tv_distance(self.histogram.normalized(), self.prediction)

    @property
    def max_bin_deviation(self) -> Fraction:
        threshold = Fraction(1, 2 * (self.p + 1) ** self.q)
        return per_bin_deviation(self.histogram, self.prediction, threshold)

    def moment(self, j: int, k: int) -> ScaledMoment:
        """M_{j,k}: E[s^j conj(s)^k] / n^((j+k)/2) over the histogram."""
        return ScaledMoment(self.histogram.expectation(j, k), self.n_vars, j + k)

    def predicted_moment(self, j: int, k: int) -> ScaledMoment:
        return model_mixed_moment(RVModel(self.q, self.p), self.n_vars, j, k)


def _character(field: FieldSpec, p: int, chi: MultCharacter | None) -> MultCharacter:
    if chi is None:
        return make_character(field, p)
    if chi.order != p or chi.field is not field:
        raise CharacterOrderError(f"character of order {chi.order} does not fit p={p}")
    return chi


def projective_histogram(field: FieldSpec, target, p: int, chi: MultCharacter | None = None,
                         **kw) -> tuple[Histogram, dict]:
    """Histogram of S^ over F^_[target] (all nonzero scalings) and the family sizes."""
    chi = _character(field, p, chi)
    q = field.q
    copies = (q - 1) // p
    hist: Counter = Counter()
    sizes = {}
    one = CyclotomicInt.from_int(p, 1)
    for i, degs in enumerate(closed_family(target)):
        counts = monic_sum_counts(field, degs, p, chi.twist, **kw)
        sizes[degs] = sum(counts.values())
        full = i == 0 and sum(j * d for j, d in enumerate(degs, start=1)) % p == 0
        for s, m in counts.items():
            if full:
                s = s + one
            for k in range(p):
                hist[s.rotate(k)] += m * copies
    return Histogram(p, hist), sizes


def empirical_trace_distribution(field: FieldSpec, component, chi: MultCharacter | None = None,
                                 **kw) -> EmpiricalReport:
    """S^ over the closed family of a component, against sum_distribution(q+1)."""
    comp = _as_component(component)
    p = comp.p
    if (field.q - 1) % p:
        raise CharacterOrderError(f"q={field.q} is not 1 mod {p}")
    hist, sizes = projective_histogram(field, comp.target, p, chi, **kw)
    q = field.q
    return EmpiricalReport(
        kind="projective",
        q=q,
        p=p,
        component=comp.degrees,
        histogram=hist,
        prediction=sum_distribution(RVModel(q, p), q + 1),
        n_vars=q + 1,
        family_sizes={str(k): v for k, v in sizes.items()},
        weighted_size=Fraction((q - 1) * sum(sizes.values()), q * (q * q - 1)),
        advisories=comp.advisories(),
    )


def affine_trace_distribution(field: FieldSpec, degrees, chi: MultCharacter | None = None,
                              **kw) -> EmpiricalReport:
    """S over monic F_(degrees), against sum_distribution(q)."""
    degrees = tuple(degrees)
    p = len(degrees) + 1
    chi = _character(field, p, chi)
    counts = monic_sum_counts(field, degrees, p, chi.twist, **kw)
    q = field.q
    return EmpiricalReport(
        kind="affine",
        q=q,
        p=p,
        component=degrees,
        histogram=Histogram(p, counts),
        prediction=sum_distribution(RVModel(q, p), q),
        n_vars=q,
        family_sizes={str(degrees): sum(counts.values())},
    )


def hyperelliptic_trace_distribution(field: FieldSpec, g: int, **kw) -> EmpiricalReport:
    """S^_2 over F^_{2g+1} and F^_{2g+2}, against sum_distribution(q+1) for p = 2."""
    check_nonneg(g, "g")
    if field.characteristic == 2:
        raise ValueError("Y^2 = F(X) needs odd characteristic")
    report = empirical_trace_distribution(field, ComponentIndex(2, (2 * g + 2,)), **kw)
    report.kind = "hyperelliptic"
    return report


def weighted_component_size(field: FieldSpec, component) -> Fraction:
    """|F^_[d]| / (q (q^2 - 1)) from exact monic family counts."""
    from .polyring import family_size

    comp = _as_component(component)
    q = field.q
    total = sum(family_size(field, degs) for degs in closed_family(comp.target))
    return Fraction((q - 1) * total, q * (q * q - 1))


def empirical_mixed_moment(field: FieldSpec, component, j: int, k: int, **kw) -> ScaledMoment:
    return empirical_trace_distribution(field, component, **kw).moment(j, k)


def relative_moment_error(report: EmpiricalReport, j: int, k: int) -> float:
    """|M_{j,k}(empirical) / M_{j,k}(model) - 1|."""
    emp = complex(report.moment(j, k))
    pred = complex(report.predicted_moment(j, k))
    return abs(emp / pred - 1)


def sample_closed_family(field: FieldSpec, target, count: int, rng) -> list:
    """``count`` random (F, alpha) pairs from F^_[target], by rejection sampling.

    Each draw picks a degree variant with probability proportional to q^(sum d),
    then uniform monic factors, rejecting tuples that are not square-free and
    pairwise coprime.
    """
    from .polyring import FactorTuple

    q = field.q
    variants = [v for v in closed_family(tuple(target)) if min(v, default=0) >= 0]
    weights = np.array([float(q ** sum(v)) for v in variants])
    weights /= weights.sum()
    out = []
    while len(out) < count:
        v = variants[int(rng.choice(len(variants), p=weights))]
        factors = tuple(
            tuple(int(c) for c in rng.integers(0, q, size=d)) + (1,) for d in v
        )
        F = FactorTuple(factors)
        if F.is_valid(field):
            out.append((F, int(rng.integers(1, q))))
    return out
