"""Experiment drivers behind the command line: each returns a :class:`Report`.

Brute-force oracles used by ``verify-exact`` live here as well; they are
deliberately naive (numpy evaluation over every monic polynomial) so that
they share no logic with the closed forms they check.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from . import counting as C
from ._validation import check_prime
from .cyclotomic import CyclotomicInt
from .gf import FieldSpec, make_character, make_extension, make_field
from .moduli import (
    BudgetExceeded,
    ComponentIndex,
    components_for_genus,
    affine_trace_distribution,
    empirical_trace_distribution,
    hyperelliptic_trace_distribution,
    sample_closed_family,
)
from .polyring import (
    X,
    enumerate_factor_tuples,
    enumerate_irreducibles,
    eval_array,
    family_size,
    iter_family_blocks,
    monic_array,
    poly_mul,
    poly_sub,
    squarefree_mask,
)
from .report import MOMENT_HEADER, Report, histogram_header, histogram_rows
from .rvmodel import RVModel, gaussian_mixed_moment, model_mixed_moment, sum_distribution
from .trace import (
    WEIL_TOLERANCE,
    character_sum_total,
    frobenius_trace,
    point_count_extension,
    projective_char_sum,
    zeta_from_counts,
)

MODES = (
    "verify-exact",
    "verify-asymptotic",
    "distribution",
    "moments",
    "constants",
    "zeta-check",
    "rv-model",
    "heuristic",
)
CHARACTER_MODES = {"distribution", "moments"}


@dataclass
class ExperimentConfig:
    mode: str = "verify-exact"
    characteristic: int = 7
    ext_degree: int = 1
    p: int = 3
    degrees: tuple = ()
    genus: int | None = None
    jk: tuple = ()
    trunc: int = 12
    workers: int = 1
    budget: int = 10**8
    samples: int = 20
    seed: int = 0
    n: int | None = None
    affine: bool = False
    out: str | None = None
    format: str = "json"

    @property
    def q(self) -> int:
        return self.characteristic**self.ext_degree

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        check_prime(self.characteristic, "characteristic")
        check_prime(self.p)
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.mode in CHARACTER_MODES and (self.q - 1) % self.p:
            raise ValueError(f"q={self.q} is not 1 mod p={self.p}; no order-{self.p} character")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")

    def echo(self) -> dict:
        """Config fields that determine the results (not workers or paths)."""
        d = asdict(self)
        for key in ("workers", "out", "format"):
            d.pop(key)
        d["degrees"] = list(self.degrees)
        d["jk"] = [list(x) for x in self.jk]
        return d


def run(config: ExperimentConfig) -> Report:
    config.validate()
    report = Report(mode=config.mode, config=config.echo(), version=__version__)
    driver = {
        "verify-exact": verify_exact,
        "verify-asymptotic": verify_asymptotic,
        "distribution": distribution,
        "moments": moments,
        "constants": constants,
        "zeta-check": zeta_check,
        "rv-model": rv_model,
        "heuristic": heuristic,
    }[config.mode]
    try:
        driver(config, report)
    except BudgetExceeded as exc:
        report.complete = False
        report.add("budget", note=str(exc))
    return report


def _field(cfg: ExperimentConfig) -> FieldSpec:
    return make_field(cfg.characteristic, cfg.ext_degree)


def _default_degrees(cfg: ExperimentConfig) -> tuple:
    if cfg.degrees:
        return tuple(cfg.degrees)
    if cfg.p == 2:
        g = 2 if cfg.genus is None else cfg.genus
        return (2 * g + 2,)
    return {3: (4, 2)}.get(cfg.p, (1,) * (cfg.p - 1))


def _largest_component(bound, p: int):
    """The component with the largest degree sum below ``bound`` (coordinatewise)."""
    best = None
    for degrees in itertools.product(*(range(b + 1) for b in bound)):
        if sum(degrees) < 2 or sum(i * d for i, d in enumerate(degrees, start=1)) % p:
            continue
        if best is None or (sum(degrees), degrees) > (sum(best), best):
            best = degrees
    return best


def _summary(x) -> str:
    return f"{float(x):.10g}"


# -- brute-force oracles ---------------------------------------------------------


def brute_squarefree_count(field: FieldSpec, d: int) -> int:
    """Monic square-free count by testing every monic polynomial for a square factor.

    A monic f is non-square-free iff P^2 | f for a monic irreducible P; the
    test evaluates f and f' at the roots of P in an extension field.
    """
    if d < 2:
        return field.q**d
    coeffs = monic_array(field, d)
    ok = np.ones(len(coeffs), dtype=bool)
    for k in range(1, d // 2 + 1):
        big, emb = make_extension(field, k)
        emb = np.array(emb)
        # a root of some degree-k irreducible: any element of F_{q^k} of exact degree k
        root_vals = _roots_of_exact_degree(field, k, big)
        full = np.concatenate([coeffs, np.ones((len(coeffs), 1), dtype=np.int64)], axis=1)
        for r in root_vals:
            v = _horner_big(big, emb[full], r)
            dv = _horner_big(big, emb[_deriv_rows(field, full)], r)
            ok &= ~((v == 0) & (dv == 0))
    return int(ok.sum())


def _roots_of_exact_degree(field: FieldSpec, k: int, big: FieldSpec) -> list:
    """One element of F_{q^k} per Frobenius orbit of size exactly k."""
    out = []
    seen = set()
    q = field.q
    for x in range(big.q):
        if x in seen:
            continue
        orbit = [x]
        y = big.pow(x, q)
        while y != x:
            orbit.append(y)
            y = big.pow(y, q)
        seen.update(orbit)
        if len(orbit) == k:
            out.append(x)
    return out


def _horner_big(big: FieldSpec, rows: np.ndarray, x: int) -> np.ndarray:
    acc = rows[:, -1].copy()
    for i in range(rows.shape[1] - 2, -1, -1):
        acc = big.add_vec(big.mul_vec(acc, np.int64(x)), rows[:, i])
    return acc


def _deriv_rows(field: FieldSpec, full: np.ndarray) -> np.ndarray:
    # coefficients of f' for each row of f (lowest first, same width)
    q = field.q
    out = np.zeros_like(full)
    for i in range(1, full.shape[1]):
        mult = i % field.characteristic
        acc = np.zeros(len(full), dtype=np.int64)
        for _ in range(mult):
            acc = field.add_table[acc, full[:, i]] if q <= 2048 else field.add_vec(acc, full[:, i])
        out[:, i - 1] = acc
    return out


def brute_prescribed_counts(field: FieldSpec, d: int, ell: int) -> set:
    """Set of counts |{F monic deg d : F(x_i) = a_i}| over all ell-subsets and values."""
    vals = eval_array(field, monic_array(field, d))
    q = field.q
    counts = set()
    for pts in itertools.combinations(range(q), ell):
        if ell == 0:
            counts.add(len(vals))
            continue
        key = np.zeros(len(vals), dtype=np.int64)
        for x in pts:
            key = key * q + vals[:, x]
        counts.update(np.bincount(key, minlength=q**ell).tolist())
    return counts


def brute_coprime_prescribed(field: FieldSpec, d: int, U, ell: int) -> set:
    """Counts of monic F coprime to U with F(x_i) = a_i (a_i != 0, x_i not roots of U)."""
    from .polyring import irreducible_factors, poly_eval

    coeffs = monic_array(field, d)
    full = np.concatenate([coeffs, np.ones((len(coeffs), 1), dtype=np.int64)], axis=1)
    coprime = np.ones(len(coeffs), dtype=bool)
    for P in irreducible_factors(field, U):
        k = len(P) - 1
        big, emb = make_extension(field, k)
        emb = np.array(emb)
        # P | F iff F vanishes at one root of P
        r = next(x for x in range(big.q) if _eval_in(big, emb, P, x) == 0)
        coprime &= _horner_big(big, emb[full], r) != 0
    vals = eval_array(field, coeffs)
    q = field.q
    good_pts = [x for x in range(q) if poly_eval(field, U, x) != 0]
    counts = set()
    for pts in itertools.combinations(good_pts, ell):
        for a in itertools.product(range(1, q), repeat=ell):
            mask = coprime.copy()
            for x, v in zip(pts, a):
                mask &= vals[:, x] == v
            counts.add(int(mask.sum()))
    return counts


def _eval_in(big: FieldSpec, emb, P, x: int) -> int:
    acc = 0
    for c in reversed(P):
        acc = big.add(big.mul(acc, x), int(emb[c]))
    return acc


# -- drivers -----------------------------------------------------------------------


def _exact(report: Report, statement: str, formula, brute, **extra) -> None:
    report.add(statement, formula=formula, brute=brute, **extra, **{"pass": formula == brute})


def verify_exact(cfg: ExperimentConfig, report: Report) -> None:
    fld = _field(cfg)
    q, p = fld.q, cfg.p
    dmax = max(d for d in range(1, 7) if q**d <= 2 * 10**5)

    for d in range(dmax + 1):
        _exact(report, f"squarefree count d={d}", C.exact_count_squarefree(q, d),
               brute_squarefree_count(fld, d))
        nonmonic = (q - 1) * int(squarefree_mask(fld, d).sum())
        _exact(report, f"non-monic squarefree count d={d}",
               C.exact_count_squarefree_nonmonic(q, d), nonmonic)
    for d in range(1, dmax + 1):
        for ell in range(0, min(d, q, 2) + 1):
            got = brute_prescribed_counts(fld, d, ell)
            want = C.exact_count_monic_prescribed(q, d, ell)
            _exact(report, f"prescribed values d={d} ell={ell}", [want], sorted(got))

    X1 = poly_sub(fld, X, (1,))
    quad = next(f for f in enumerate_irreducibles(fld, 2) if len(f) == 3)
    for name, U in (("X", X), ("X(X-1)", poly_mul(fld, X, X1)), ("quadratic", quad)):
        radical_deg = len(U) - 1
        for ell in range(3):
            for d in range(max(ell + radical_deg, 1), dmax + 1):
                got = brute_coprime_prescribed(fld, d, U, ell)
                want = C.exact_count_coprime_prescribed(fld, d, U, ell)
                _exact(report, f"coprime prescribed U={name} d={d} ell={ell}", [want], sorted(got))

    # factor tuples: stream against block enumeration, for every degree tuple <= the bound
    bound = _default_degrees(cfg)
    for degrees in itertools.product(*(range(b + 1) for b in bound)):
        if q ** sum(degrees) <= 10**5:
            stream = sum(1 for _ in enumerate_factor_tuples(fld, degrees))
            _exact(report, f"family size {degrees}", stream, family_size(fld, degrees))
    degrees = _largest_component(bound, p)

    # residue tuples at one point
    dist = C.residue_value_distribution(fld, p, 0)
    _exact(report, "residue tuple count", C.residue_tuple_count(q, p), sum(dist.values()))
    total = sum(dist.values())
    p0, pa = C.residue_value_probabilities(q, p)
    probs = {Fraction(v, total) for k, v in dist.items() if k}
    _exact(report, "residue value probabilities", [p0, pa], [Fraction(dist[0], total), *sorted(probs)])

    # random variable model
    model = RVModel(q, p)
    _exact(report, "model mass n=q+1", Fraction(1), sum_distribution(model, q + 1).total())
    for j, k in itertools.product(range(4), repeat=2):
        a = model_mixed_moment(model, q + 1, j, k).raw
        b = model_mixed_moment(model, q + 1, j, k, via="histogram").raw
        _exact(report, f"model moment paths ({j},{k})", a, b)

    _exact(report, "L_1 factors equal K factors",
           C.euler_constant_K(q, cfg.trunc).factors, C.euler_constant_L(q, 2, cfg.trunc).factors)

    if (q - 1) % p == 0 and degrees is not None:
        _exact(report, "pattern probabilities sum", Fraction(1), C.pattern_probability_total(q, p))
        _verify_traces(cfg, fld, degrees, report)
    else:
        report.add("character checks", note=f"skipped: q={q} is not 1 mod {p}")


def _verify_traces(cfg: ExperimentConfig, fld: FieldSpec, degrees, report: Report) -> None:
    q, p = fld.q, cfg.p
    chi = make_character(fld, p)
    comp = ComponentIndex(p, degrees)
    rep = empirical_trace_distribution(fld, comp, workers=cfg.workers, budget=cfg.budget)
    sizes = sum(rep.family_sizes.values())
    _exact(report, f"histogram mass {comp.degrees}", (q - 1) * sizes, rep.total)
    _exact(report, "rotation invariance", True, rep.histogram.rotate(1) == rep.histogram)
    for j, k in itertools.product(range(7), repeat=2):
        if j + k <= 6 and (j - k) % p:
            _exact(report, f"M_({j},{k}) vanishes", True, rep.moment(j, k).is_zero())

    rng = np.random.default_rng(cfg.seed)
    for F, alpha in sample_closed_family(fld, comp.target, cfg.samples, rng):
        S1 = projective_char_sum(fld, F, 1, chi, comp.target)
        Sa = projective_char_sum(fld, F, alpha, chi, comp.target)
        ok_twist = Sa == S1.rotate(chi(alpha))
        T = frobenius_trace(fld, F, alpha, chi, comp.target)
        Tbar = frobenius_trace(fld, F, alpha, chi.conjugate(), comp.target)
        ok_conj = Tbar == T.conjugate()
        N1 = point_count_extension(fld, F, alpha, p, 1)
        ok_count = CyclotomicInt.from_int(p, N1) == q + 1 + character_sum_total(fld, F, alpha, chi, comp.target)
        report.add(
            f"trace identities {F.factors} alpha={alpha}",
            **{"pass": bool(ok_twist and ok_conj and ok_count)},
        )


def verify_asymptotic(cfg: ExperimentConfig, report: Report) -> None:
    fld = _field(cfg)
    q = fld.q
    ladders = {
        "family size": [(2, 1), (4, 1), (6, 2)],
        "one prescribed value": [(3, 2), (5, 2), (7, 2)],
    }
    for name, ladder in ladders.items():
        series = []
        for degrees in ladder:
            if q ** sum(degrees) > cfg.budget:
                report.complete = False
                break
            ell = 0 if name == "family size" else 1
            mt = C.main_term_component_prescribed(q, degrees, ell, trunc_degree=cfg.trunc)
            # F(0) = 1 has log 0; rows of a block are family members
            blocks = list(iter_family_blocks(fld, degrees, points=[0]))
            if ell == 0:
                count = sum(len(L) for L in blocks)
            else:
                count = sum(int((L[:, 0] == 0).sum()) for L in blocks)
            series.append({"degrees": list(degrees), "count": count,
                           "ratio": _summary(mt.ratio(count))})
        errs = [abs(float(s["ratio"]) - 1) for s in series]
        report.add(f"main term trend: {name}", series=series,
                   monotone=all(a > b for a, b in zip(errs, errs[1:])))

    for k in range(3):
        series = []
        for d in (4, 6):
            if q**d > cfg.budget:
                break
            vals = eval_array(fld, monic_array(fld, d))
            sf = squarefree_mask(fld, d)
            count = int((sf & ((vals == 0).sum(axis=1) == k)).sum())
            mt = C.main_term_squarefree_k_roots(q, d, k)
            series.append({"d": d, "count": count, "main_term": mt.main_term,
                           "ratio": _summary(mt.ratio(count))})
        report.add(f"squarefree with {k} roots", series=series)


def _component_report(cfg: ExperimentConfig, fld: FieldSpec):
    kw = {"workers": cfg.workers, "budget": cfg.budget}
    if cfg.p == 2:
        g = cfg.genus if cfg.genus is not None else (_default_degrees(cfg)[0] - 1) // 2
        return hyperelliptic_trace_distribution(fld, g, **kw)
    degrees = _default_degrees(cfg)
    if cfg.affine:
        return affine_trace_distribution(fld, degrees, **kw)
    return empirical_trace_distribution(fld, ComponentIndex(cfg.p, degrees), **kw)


def distribution(cfg: ExperimentConfig, report: Report) -> None:
    fld = _field(cfg)
    rep = _component_report(cfg, fld)
    p = rep.p
    report.tables["histogram"] = {"header": histogram_header(p), "rows": histogram_rows(rep.histogram, p)}
    report.tables["prediction"] = {"header": histogram_header(p), "rows": histogram_rows(rep.prediction, p)}
    report.add("family", kind=rep.kind, component=list(rep.component), family_sizes=rep.family_sizes,
               total=rep.total, weighted_size=rep.weighted_size, advisories=rep.advisories)
    sizes = sum(rep.family_sizes.values())
    expected = sizes if rep.kind == "affine" else (fld.q - 1) * sizes
    _exact(report, "histogram mass equals family size", expected, rep.total)
    if rep.kind != "affine":
        _exact(report, "rotation invariance", True, rep.histogram.rotate(1) == rep.histogram)
    tv = rep.tv
    report.add("total variation", value=tv, summary=_summary(tv))
    dev = rep.max_bin_deviation
    report.add("max per-bin deviation", value=dev, summary=_summary(dev))


def moments(cfg: ExperimentConfig, report: Report) -> None:
    fld = _field(cfg)
    rep = _component_report(cfg, fld)
    pairs = cfg.jk or tuple((j, k) for j in range(4) for k in range(4))
    rows = []
    for j, k in pairs:
        emp = rep.moment(j, k)
        pred = rep.predicted_moment(j, k)
        half = (j + k) // 2
        scale = Fraction(1, rep.n_vars**half)
        c = [Fraction(x) * scale for x in emp.raw.coeffs] + [Fraction(0)]
        pv = Fraction(pred.raw.coeffs[0]) * scale
        rows.append([j, k, (j + k) % 2, c[0].numerator, c[0].denominator,
                     c[1].numerator, c[1].denominator, pv.numerator, pv.denominator,
                     gaussian_mixed_moment(j, k), _summary(abs(complex(emp)))])
        if (j - k) % rep.p:
            _exact(report, f"M_({j},{k}) vanishes", True, emp.is_zero())
        elif rep.kind == "hyperelliptic" and (j + k) % 2:
            _exact(report, f"odd moment ({j},{k}) vanishes", True, emp.is_zero())
    report.tables["moments"] = {"header": MOMENT_HEADER, "rows": rows}


def constants(cfg: ExperimentConfig, report: Report) -> None:
    q = cfg.q
    r = max(cfg.p - 1, 2)
    rows = []
    for name, make in (("K", lambda N: C.euler_constant_K(q, N)),
                       (f"L_{r - 1}", lambda N: C.euler_constant_L(q, r, N))):
        values = []
        for N in range(1, cfg.trunc + 1):
            ep = make(N)
            lo, hi = ep.bounds(30)
            values.append(hi)
            rows.append([name, N, _fmt_mp(hi), _fmt_mp(lo), ep.tail.numerator, ep.tail.denominator])
        _exact(report, f"{name} truncations decrease", True,
               all(a > b for a, b in zip(values, values[1:])))
    if r == 2:
        _exact(report, "L_1 factors equal K factors",
               C.euler_constant_K(q, cfg.trunc).factors, C.euler_constant_L(q, 2, cfg.trunc).factors)
    report.tables["constants"] = {
        "header": ["name", "trunc", "value", "lower_bound", "tail_num", "tail_den"],
        "rows": rows,
    }


def _fmt_mp(x) -> str:
    import mpmath

    return mpmath.nstr(x, 25)


def zeta_check(cfg: ExperimentConfig, report: Report) -> None:
    fld = _field(cfg)
    q, p = fld.q, cfg.p
    if p > 2 and (q - 1) % p:
        raise ValueError(f"q={q} is not 1 mod {p}")
    chi = make_character(fld, p)
    rng = np.random.default_rng(cfg.seed)
    genera = [cfg.genus] if cfg.genus is not None else [1, 2, 3]
    for g in genera:
        comps = components_for_genus(g, p)
        targets = sorted({c.target for c in comps})
        for target in targets:
            for F, alpha in sample_closed_family(fld, target, cfg.samples, rng):
                report.results.append(zeta_record(fld, F, alpha, p, chi, target))


def zeta_record(fld: FieldSpec, F, alpha: int, p: int, chi, target) -> dict:
    from .moduli import genus_of

    g = genus_of(target, p)[1]
    counts = [point_count_extension(fld, F, alpha, p, n) for n in range(1, 2 * g + 1)]
    z = zeta_from_counts(counts, fld.q, g)
    s1 = fld.q + 1 - counts[0] if counts else 0
    total = character_sum_total(fld, F, alpha, chi, target)
    return {
        "statement": f"zeta {list(map(list, F.factors))} alpha={alpha}",
        "genus": g,
        "P_coeffs": list(z.P_coeffs),
        "weil_deviation": f"{z.max_weil_deviation:.3e}",
        "pass": bool(z.max_weil_deviation < WEIL_TOLERANCE and CyclotomicInt.from_int(p, -s1) == total),
    }


def rv_model(cfg: ExperimentConfig, report: Report) -> None:
    model = RVModel(cfg.q, cfg.p)
    n = cfg.n if cfg.n is not None else cfg.q + 1
    hist = sum_distribution(model, n)
    report.tables["distribution"] = {"header": histogram_header(cfg.p), "rows": histogram_rows(hist, cfg.p)}
    _exact(report, f"mass n={n}", Fraction(1), hist.total())
    _exact(report, "rotation invariance", True, hist.rotate(1) == hist)
    for k in range(1, 4):
        m = model_mixed_moment(model, n, k, k)
        report.add(f"moment ({k},{k})", value=m.exact().to_fraction(),
                   gaussian=gaussian_mixed_moment(k, k), summary=_summary(complex(m).real))


def heuristic(cfg: ExperimentConfig, report: Report) -> None:
    fld = _field(cfg)
    q, p = fld.q, cfg.p
    for t in (range(q) if q <= 8 else (0,)):
        dist = C.residue_value_distribution(fld, p, t)
        total = sum(dist.values())
        _exact(report, f"residue tuple count t={t}", C.residue_tuple_count(q, p), total)
        p0, pa = C.residue_value_probabilities(q, p)
        _exact(report, f"P(value=0) t={t}", p0, Fraction(dist[0], total))
        _exact(report, f"P(value=a) t={t}", [pa] * (q - 1),
               [Fraction(dist[a], total) for a in range(1, q)])
