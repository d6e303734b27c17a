"""Elimination of Hecke character candidates against point counts.

The candidates of a given infinity type whose conductor divides the maximal
modulus are filtered prime by prime: a candidate survives p only if the power
sums of its Euler factor equal the traces obtained by counting points.  A case
is proved when exactly one Galois orbit survives and re-checks cleanly at every
compared prime.
"""

import json
import time
from dataclasses import dataclass, field, replace

import mpmath
from sympy import primerange

from .counting import (algebraic_part_factor, count_surface, curve_euler_factor, curve_trace,
                       exterior_square, load_curve, load_surface, poly_divexact, poly_mul,
                       power_sums, surface_bad_primes, EulerFactor)
from .hecke import (DEFAULT_PRECISION, TYPE_A, TYPE_PSI_PRIME, TYPE_X, enumerate_hecke,
                    euler_factor_Q, eval_at_prime, trace_from_character)
from .numfield.field import load_field
from .numfield.ideal import cubic_subfield_split, split_prime
from .resring import DEFAULT_NORM_BUDGET

TABLE_PRIMES = {1: 17, 2: 13, 3: 37, 4: 29}
SURFACE_CASES = (1, 2, 3)
CURVE_CASES = (1, 2, 3, 4)
PROVED = "proved-match"
VERIFIED = "verified"


@dataclass(frozen=True)
class PrimePlan:
    """Levels m compared at a good prime p: m = 1 up to bound, m = 2 and m = 3 up to smaller bounds."""

    bound: int
    m2_bound: int
    m3_bound: int

    def levels(self, p):
        if p > self.bound:
            return ()
        return tuple(m for m, b in ((1, self.bound), (2, self.m2_bound), (3, self.m3_bound)) if p <= b)

    def capped(self, bound):
        return PrimePlan(bound, min(self.m2_bound, bound), min(self.m3_bound, bound))


SURFACE_PLAN = PrimePlan(200, 60, 20)
CURVE_PLAN = PrimePlan(200, 200, 60)


@dataclass(frozen=True)
class Config:
    surface_plan: PrimePlan = SURFACE_PLAN
    curve_plan: PrimePlan = CURVE_PLAN
    part_c_bound: int = 60
    part_c_extension: int = 200
    sigma_primes: int = 50
    precision: int = DEFAULT_PRECISION
    budget: int = DEFAULT_NORM_BUDGET
    field_data: str = None
    orbit_limit: int = 10000

    def with_prime_bound(self, bound):
        return replace(self, surface_plan=self.surface_plan.capped(bound),
                       curve_plan=self.curve_plan.capped(bound), part_c_bound=min(self.part_c_bound, bound),
                       part_c_extension=min(self.part_c_extension, bound))

    def field(self, i):
        return load_field(i, self.field_data)


DEFAULT_CONFIG = Config()


@dataclass
class PrimeRecord:
    p: int
    counted: dict
    survivors: int
    predicted: dict = None

    @property
    def verdict(self):
        if self.predicted is None:
            return "pending"
        return "ok" if self.predicted == self.counted else "mismatch"

    def to_record(self):
        return {
            "p": self.p,
            "counted": {str(m): str(t) for m, t in sorted(self.counted.items())},
            "predicted": None if self.predicted is None
            else {str(m): str(t) for m, t in sorted(self.predicted.items())},
            "survivors": self.survivors,
            "verdict": self.verdict,
        }


@dataclass
class MatchReport:
    case: int
    target: str
    field_id: int
    infinity_type: tuple
    bad_primes: tuple
    modulus_norm: int
    initial_count: int
    final_count: int = 0
    orbits: list = field(default_factory=list)
    log: list = field(default_factory=list)
    table_prime: int = None
    euler_factor: EulerFactor = None
    verdict: str = "inconclusive"
    certification: str = "geometry"
    notes: list = field(default_factory=list)
    decomposition: list = field(default_factory=list)
    slot: "MatchReport" = None
    seconds: float = 0.0

    @property
    def character(self):
        return self.orbits[0][0] if len(self.orbits) == 1 else None

    @property
    def conductor_norm(self):
        psi = self.character
        return psi.conductor().norm if psi is not None else None

    @property
    def mismatches(self):
        return [r.p for r in self.log if r.verdict == "mismatch"]

    def to_record(self):
        rec = {
            "case": self.case,
            "target": self.target,
            "field": self.field_id,
            "infinity_type": [list(p) for p in self.infinity_type],
            "bad_primes": list(self.bad_primes),
            "modulus_norm": str(self.modulus_norm),
            "candidates_before": self.initial_count,
            "candidates_after": self.final_count,
            "orbits": len(self.orbits),
            "orbit_size": len(self.orbits[0]) if len(self.orbits) == 1 else None,
            "conductor_norm": None if self.conductor_norm is None else str(self.conductor_norm),
            "character": self.character.to_record() if self.character is not None else None,
            "table_prime": self.table_prime,
            "euler_factor": self.euler_factor.to_record() if self.euler_factor else None,
            "verdict": self.verdict,
            "certification": self.certification,
            "notes": list(self.notes),
            "log": [r.to_record() for r in self.log],
        }
        if self.decomposition:
            rec["decomposition"] = [d.to_record() for d in self.decomposition]
        if self.slot is not None:
            rec["slot"] = self.slot.to_record()
        return rec


@dataclass
class DecompositionRecord:
    """Lambda^2 L_p(H^1(A)) against algebraic part, psi_X slot and psi' at one prime."""

    p: int
    algebraic: tuple
    slot: tuple
    psi_prime: tuple
    exact: bool
    source: str = "counts"

    @property
    def degrees(self):
        return (len(self.algebraic) - 1, len(self.slot) - 1, len(self.psi_prime) - 1)

    def to_record(self):
        return {"p": self.p, "degrees": list(self.degrees), "exact": self.exact, "source": self.source,
                "psi_prime": [str(c) for c in self.psi_prime]}


# --------------------------------------------------------------- utilities


def _good_primes(bound, bad):
    return [p for p in primerange(3, bound + 1) if p not in bad]


def _orbit_or_none(cs, config, report):
    report.final_count = cs.count()
    if report.final_count > config.orbit_limit:
        report.notes.append(f"{report.final_count} candidates remain; orbits not materialised")
        return
    report.orbits = cs.orbits(config.orbit_limit)


def _conclude(report, traces_at):
    """Re-check every compared prime against the surviving orbit and set the verdict."""
    n = len(report.orbits)
    if n == 0:
        report.verdict = "no-survivors" if report.final_count == 0 else "inconclusive"
        return report
    if n > 1:
        report.verdict = "inconclusive"
        report.notes.append(f"{n} Galois orbits survive")
        return report
    psi = report.character
    for rec in report.log:
        rec.predicted = {m: trace_from_character(psi, rec.p, m) for m in rec.counted}
    tp = report.table_prime
    if tp is not None:
        report.euler_factor = euler_factor_Q(psi, tp)
        counted = traces_at(tp)
        expect = report.euler_factor.power_sums(max(counted)) if counted else []
        if any(expect[m - 1] != t for m, t in counted.items()):
            report.notes.append(f"table prime {tp} disagrees with the counted traces")
            report.verdict = "inconclusive"
            return report
    report.verdict = PROVED if not report.mismatches else "inconclusive"
    return report


def _eliminate(cs, primes, traces_at, report):
    for p in primes:
        counted = traces_at(p)
        if not counted:
            continue
        n = cs.filter_traces(p, counted)
        report.log.append(PrimeRecord(p, counted, n))


_CACHE = {}


def clear_cache():
    _CACHE.clear()


def _cached(key, fn):
    if key not in _CACHE:
        _CACHE[key] = fn()
    return _CACHE[key]


# ----------------------------------------------------------------- matches


def surface_traces(S, p, plan):
    return {m: count_surface(S, p, m).S for m in plan.levels(p)}


def curve_traces(C, p, plan):
    return {m: curve_trace(C, p, m) for m in plan.levels(p)}


def match_surface(i, config=DEFAULT_CONFIG):
    """Eliminate psi_X candidates for X_i with the point counts of X_i."""
    if i not in SURFACE_CASES:
        raise ValueError(f"no surface X_{i}")
    return _cached(("surface", i, config), lambda: _match_surface(i, config))


def _match_surface(i, config):
    t0 = time.perf_counter()
    S = load_surface(i)
    K = config.field(S.field_id)
    bad = surface_bad_primes(S)
    cs = enumerate_hecke(K, TYPE_X, bad, budget=config.budget)
    report = MatchReport(i, "X", K.id, TYPE_X, tuple(sorted(bad)), cs.modulus.norm, cs.initial_count,
                         table_prime=TABLE_PRIMES[i])
    plan = config.surface_plan

    def traces_at(p):
        return surface_traces(S, p, plan if plan.levels(p) else PrimePlan(p, p, 0))

    _eliminate(cs, _good_primes(plan.bound, bad), traces_at, report)
    _orbit_or_none(cs, config, report)
    _conclude(report, traces_at)
    report.seconds = time.perf_counter() - t0
    return report


def match_curve(i, config=DEFAULT_CONFIG):
    """Eliminate psi_A candidates for Jac(C_i) with the point counts of C_i."""
    if i not in CURVE_CASES:
        raise ValueError(f"no curve C_{i}")
    return _cached(("curve", i, config), lambda: _match_curve(i, config))


def _match_curve(i, config):
    t0 = time.perf_counter()
    C = load_curve(i)
    K = config.field(C.field_id)
    bad = C.bad_primes
    cs = enumerate_hecke(K, TYPE_A, bad, budget=config.budget)
    report = MatchReport(i, "A", K.id, TYPE_A, tuple(sorted(bad)), cs.modulus.norm, cs.initial_count,
                         table_prime=TABLE_PRIMES[i])
    plan = config.curve_plan

    def traces_at(p):
        return curve_traces(C, p, plan if plan.levels(p) else PrimePlan(p, p, 0))

    _eliminate(cs, _good_primes(plan.bound, bad), traces_at, report)
    _orbit_or_none(cs, config, report)
    _conclude(report, traces_at)
    report.seconds = time.perf_counter() - t0
    return report


# ------------------------------------------------------------------ part (c)


def exterior_quotient(C, K, p, psi_a=None):
    """(Lambda^2 L_p(H^1), algebraic part, Lambda^2 / algebraic part), all exact.

    L_p(H^1) comes from the point counts of C, or from the matched psi_A when given.
    """
    LA = curve_euler_factor(C, p) if psi_a is None else euler_factor_Q(psi_a, p)
    E2 = exterior_square(LA)
    alg = algebraic_part_factor(cubic_subfield_split(K, p), p)
    Q = poly_divexact(E2.coeffs, alg.coeffs)
    if Q is None:
        raise ArithmeticError(f"algebraic part does not divide the exterior square at p = {p}")
    return E2, alg, Q


def verify_part_c(i, config=DEFAULT_CONFIG):
    """Identify psi' from Lambda^2 H^1(A_i) after removing the algebraic part and the psi_X slot."""
    if i not in CURVE_CASES:
        raise ValueError(f"no curve C_{i}")
    return _cached(("part_c", i, config), lambda: _verify_part_c(i, config))


def _verify_part_c(i, config):
    t0 = time.perf_counter()
    C = load_curve(i)
    K = config.field(C.field_id)
    curve = match_curve(i, config)
    bad = set(C.bad_primes)
    surface = None
    if i in SURFACE_CASES:
        surface = match_surface(i, config)
        bad |= set(surface.bad_primes)
    cs = enumerate_hecke(K, TYPE_PSI_PRIME, C.bad_primes, budget=config.budget)
    report = MatchReport(i, "psi-prime", K.id, TYPE_PSI_PRIME, tuple(sorted(C.bad_primes)),
                         cs.modulus.norm, cs.initial_count, table_prime=TABLE_PRIMES[i])
    if curve.verdict != PROVED or (surface is not None and surface.verdict != PROVED):
        report.notes.append("prerequisite match not proved")
        return report
    # counts up to part_c_bound; beyond it L_p(H^1) is taken from the proved psi_A
    primes = _good_primes(max(config.part_c_bound, config.part_c_extension), bad)
    quotients = {p: exterior_quotient(C, K, p, None if p <= config.part_c_bound else curve.character)
                 for p in primes}

    slot_psi = None
    if surface is not None:
        slot_psi = surface.character
    else:
        # no surface: find the weight-2 slot character from the quotient alone
        xs = enumerate_hecke(K, TYPE_X, C.bad_primes, budget=config.budget)
        slot = MatchReport(i, "X-slot", K.id, TYPE_X, tuple(sorted(C.bad_primes)), xs.modulus.norm,
                           xs.initial_count, table_prime=TABLE_PRIMES[i], certification="enumeration")
        for p in primes:
            n = xs.filter(xs.divisor_predicate(p, quotients[p][2]))
            slot.log.append(PrimeRecord(p, {}, n))
        _orbit_or_none(xs, config, slot)
        if len(slot.orbits) == 1:
            slot_psi = slot.character
            slot.euler_factor = euler_factor_Q(slot_psi, TABLE_PRIMES[i])
            slot.verdict = PROVED
        else:
            slot.verdict = "inconclusive"
        slot.notes.append("no surface known; the slot character is fixed by the exterior square alone")
        report.slot = slot
        report.certification = "enumeration"
        if slot_psi is None:
            report.notes.append("psi_X slot not identified")
            return report

    def derived(p):
        Q = quotients[p][2]
        L = poly_divexact(Q, euler_factor_Q(slot_psi, p).coeffs)
        if L is None:
            raise ArithmeticError(f"psi_X slot does not divide the quotient at p = {p}")
        return L

    for p in primes:
        L = derived(p)
        counted = dict(zip((1, 2, 3), power_sums(L, 3)))
        n = cs.filter_traces(p, counted)
        report.log.append(PrimeRecord(p, counted, n))
    _orbit_or_none(cs, config, report)
    tp = TABLE_PRIMES[i]
    if len(report.orbits) == 1:
        psi = report.character
        for p in primes:
            E2, alg, _ = quotients[p]
            LX = euler_factor_Q(slot_psi, p).coeffs
            LP = euler_factor_Q(psi, p).coeffs
            exact = poly_mul(poly_mul(alg.coeffs, LX), LP) == E2.coeffs
            source = "counts" if p <= config.part_c_bound else "psi_A"
            report.decomposition.append(DecompositionRecord(p, alg.coeffs, LX, LP, exact, source))
    _conclude(report, lambda p: dict(zip((1, 2, 3), power_sums(derived(p), 3))) if p in quotients else {})
    if report.verdict == PROVED and not all(d.exact for d in report.decomposition):
        report.verdict = "inconclusive"
        report.notes.append("exterior square does not decompose at some prime")
    if report.euler_factor is None and report.character is not None:
        report.euler_factor = euler_factor_Q(report.character, tp)
    report.seconds = time.perf_counter() - t0
    return report


# ---------------------------------------------------------- sigma relation


@dataclass
class SigmaReport:
    case: int
    primes: list = field(default_factory=list)
    assignment: tuple = None
    x_member: int = None
    a_member: int = None
    max_residual: str = None
    exact: bool = False
    precision: int = DEFAULT_PRECISION
    tried: list = field(default_factory=list)
    verdict: str = "failed"
    seconds: float = 0.0

    def to_record(self):
        return {
            "case": self.case,
            "degree_one_primes": len(self.primes),
            "rational_primes": sorted({p for p, _ in self.primes}),
            "assignment": None if self.assignment is None else [f"sigma^{k}" for k in self.assignment],
            "psi_X_member": self.x_member,
            "psi_A_member": self.a_member,
            "precision": self.precision,
            "max_residual": self.max_residual,
            "exact_in_K": self.exact,
            "tried": [list(t) for t in self.tried],
            "verdict": self.verdict,
        }


def degree_one_primes(K, count, bad):
    """At least count primes of residue degree 1, whole rational primes at a time, avoiding bad."""
    out, p = [], 2
    while len(out) < count:
        p = int(next(iter(primerange(p + 1, 2 * p + 100))))
        if p in bad:
            continue
        Ps = split_prime(K, p)
        if all(P.f == 1 and P.e == 1 for P in Ps):
            out.extend(Ps)
    return out


def verify_sigma_relation(i, config=DEFAULT_CONFIG):
    """psi_X(P) = psi_A(s1 P) psi_A(s2 P) on degree-1 primes, for s1, s2 the elements of order 3."""
    if i not in SURFACE_CASES:
        raise ValueError("the sigma relation needs a surface")
    return _cached(("sigma", i, config), lambda: _verify_sigma(i, config))


def _verify_sigma(i, config):
    t0 = time.perf_counter()
    X, A = match_surface(i, config), match_curve(i, config)
    report = SigmaReport(i, precision=config.precision)
    if X.verdict != PROVED or A.verdict != PROVED:
        return report
    K = config.field(i)
    bad = set(X.bad_primes) | set(A.bad_primes)
    primes = degree_one_primes(K, config.sigma_primes, bad)
    report.primes = [(P.p, P.index) for P in primes]
    psi_x = X.orbits[0][0]
    for a, psi_a in enumerate(A.orbits[0]):
        for s1, s2 in ((2, 4), (4, 2)):
            report.tried.append((0, a, s1, s2))
            exact = all(psi_x.value(P) == psi_a.value(P.galois(s1)) * psi_a.value(P.galois(s2))
                        for P in primes)
            if not exact:
                continue
            worst = mpmath.mpf(0)
            with mpmath.workdps(config.precision):
                for P in primes:
                    vx = eval_at_prime(psi_x, P, config.precision)[0]
                    v1 = eval_at_prime(psi_a, P.galois(s1), config.precision)[0]
                    v2 = eval_at_prime(psi_a, P.galois(s2), config.precision)[0]
                    worst = max(worst, abs(vx - v1 * v2))
                ok = worst < mpmath.mpf(10) ** -30
                res = mpmath.nstr(worst, 5)
            if ok:
                report.assignment, report.x_member, report.a_member = (s1, s2), 0, a
                report.max_residual, report.exact, report.verdict = res, True, VERIFIED
                report.seconds = time.perf_counter() - t0
                return report
    report.seconds = time.perf_counter() - t0
    return report


# ------------------------------------------------------------------ report


@dataclass(frozen=True)
class Scope:
    surfaces: tuple = SURFACE_CASES
    curves: tuple = CURVE_CASES
    part_c: tuple = CURVE_CASES
    sigma: tuple = SURFACE_CASES

    @classmethod
    def for_cases(cls, cases, only=None):
        cases = tuple(sorted(set(cases)))
        s = tuple(c for c in cases if c in SURFACE_CASES)
        if only == "surface":
            return cls(s, (), (), ())
        if only == "curve":
            return cls((), cases, cases, ())
        return cls(s, cases, cases, s)


FULL_SCOPE = Scope()


def format_poly(coeffs):
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "" if k == 0 else ("T" if k == 1 else f"T^{k}")
        mag = abs(c)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        terms.append((c < 0, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] else "") + terms[0][1]
    for neg, body in terms[1:]:
        out += (" - " if neg else " + ") + body
    return out


def _table(title, rows):
    head = f"{'i':>2} | {'cond':>9} | {'p':>3} | L_p(T)"
    lines = [title, head, "-" * len(head)]
    for i, cond, p, poly, note in rows:
        line = f"{i:>2} | {cond:>9} | {p:>3} | {poly}"
        if note:
            line += f"   [{note}]"
        lines.append(line)
    return "\n".join(lines)


def _row(i, rep, note=""):
    if rep is None or rep.euler_factor is None:
        return (i, "-", TABLE_PRIMES[i], "not identified", note or (rep.verdict if rep else ""))
    return (i, str(rep.conductor_norm), rep.table_prime, format_poly(rep.euler_factor.coeffs), note)


def build_report(scope=FULL_SCOPE, config=DEFAULT_CONFIG):
    """(record, text): the structured report and the rendered tables."""
    surfaces = {i: match_surface(i, config) for i in scope.surfaces}
    curves = {i: match_curve(i, config) for i in scope.curves}
    part_c = {i: verify_part_c(i, config) for i in scope.part_c}
    sigma = {i: verify_sigma_relation(i, config) for i in scope.sigma}
    record = {
        "format_version": 1,
        "config": {
            "surface_plan": [config.surface_plan.bound, config.surface_plan.m2_bound, config.surface_plan.m3_bound],
            "curve_plan": [config.curve_plan.bound, config.curve_plan.m2_bound, config.curve_plan.m3_bound],
            "part_c_bound": config.part_c_bound,
            "part_c_extension": config.part_c_extension,
            "sigma_primes": config.sigma_primes,
            "precision": config.precision,
            "budget": str(config.budget),
            "value_field": "K",
        },
        "surfaces": [surfaces[i].to_record() for i in sorted(surfaces)],
        "curves": [curves[i].to_record() for i in sorted(curves)],
        "part_c": [part_c[i].to_record() for i in sorted(part_c)],
        "sigma": [sigma[i].to_record() for i in sorted(sigma)],
        "uniqueness": "within the enumerated space: conductor exponents bounded per prime, "
                      "character orders dividing w_K",
    }
    x_rows = []
    for i in sorted(set(scope.surfaces) | set(scope.part_c)):
        if i in surfaces:
            x_rows.append(_row(i, surfaces[i]))
        elif i in part_c:
            slot = part_c[i].slot
            x_rows.append(_row(i, slot, "no surface known; enumeration-certified"))
    a_rows = [_row(i, curves[i]) for i in sorted(curves)]
    c_rows = [_row(i, part_c[i]) for i in sorted(part_c)]
    parts = []
    if x_rows:
        parts.append(_table("psi_X: conductor norm and Euler factor at the table prime", x_rows))
    if a_rows:
        parts.append(_table("psi_A: conductor norm and Euler factor at the table prime", a_rows))
    if c_rows:
        parts.append(_table("psi': conductor norm and Euler factor at the table prime", c_rows))
    verdicts = []
    for kind, reps in (("surface", surfaces), ("curve", curves), ("verify-c", part_c), ("verify-sigma", sigma)):
        for i in sorted(reps):
            verdicts.append(f"{kind} {i}: {reps[i].verdict}")
    parts.append("verdicts\n" + "\n".join(verdicts))
    return record, "\n\n".join(parts) + "\n"


def all_verdicts(record):
    out = []
    for key in ("surfaces", "curves", "part_c", "sigma"):
        out.extend(r["verdict"] for r in record[key])
    return out


def emit_report(scope=FULL_SCOPE, config=DEFAULT_CONFIG, out=None):
    """Write the JSON report to out and the rendered tables next to it; returns (json text, tables)."""
    record, text = build_report(scope, config)
    data = json.dumps(record, indent=2, sort_keys=True) + "\n"
    if out is not None:
        with open(out, "w") as fh:
            fh.write(data)
        with open(_text_path(out), "w") as fh:
            fh.write(text)
    return data, text


def _text_path(out):
    return out[:-5] + ".txt" if out.endswith(".json") else out + ".txt"
