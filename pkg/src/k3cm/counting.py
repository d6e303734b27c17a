"""Point counts on the six-line double planes X_i and the genus-3 curves C_i,
and the Euler-factor algebra built on them.

Surface convention: N = q^2 + q + 1 + S + q * nodes, where S is the
quadratic-character sum of the branch sextic over P^2(F_q) and each rational
node contributes an extra q from its exceptional curve.  S is the
transcendental trace and q * (1 + nodes) the Neron-Severi trace.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import mpmath
import numpy as np
import sympy
import yaml

from .ffarith import (FFElement, factor_poly_mod_p, ff_context, fq_add,
                      fq_all_elements, fq_mul, fq_quadratic_character, fq_scale)
from .intlinalg import charpoly

# --------------------------------------------------------------------- errors


class BadPrimeError(ValueError):
    """The prime is bad for the variety (or is 2)."""


class BudgetExceeded(RuntimeError):
    """The requested count exceeds the configured work budget."""


class WeilBoundError(ArithmeticError):
    """Traces or coefficients are incompatible with the Weil bounds."""


# ---------------------------------------------------------------------- specs


@dataclass(frozen=True)
class SurfaceSpec:
    """w^2 = x y z g(x, y, z) with g a cubic; g maps (i, j, k) -> coefficient."""

    id: int
    g: tuple
    field_id: int
    picard_number: int = 16

    @property
    def g_dict(self):
        return dict(self.g)

    @property
    def sextic(self):
        """f = x y z g as a monomial dict."""
        return {(i + 1, j + 1, k + 1): c for (i, j, k), c in self.g}


@dataclass(frozen=True)
class CurveSpec:
    """y^2 = f(x) with f of degree 7, coefficients low-first."""

    id: int
    f: tuple
    field_id: int

    @property
    def discriminant(self):
        x = sympy.Symbol("x")
        return int(sympy.discriminant(sympy.Poly(list(reversed(self.f)), x)))

    @property
    def bad_primes(self):
        return frozenset({2} | set(sympy.factorint(abs(self.discriminant))))


def _read_varieties(path=None):
    if path is None:
        text = resources.files("k3cm.data").joinpath("varieties.yaml").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    data = yaml.safe_load(text)
    if data.get("format_version") != 1:
        raise ValueError("unsupported varieties file version")
    return data


@lru_cache(maxsize=None)
def load_surface(i, path=None):
    for s in _read_varieties(path)["surfaces"]:
        if s["id"] == i:
            g = tuple(sorted(((int(a), int(b), int(c)), int(coef)) for coef, a, b, c in s["g"]))
            spec = SurfaceSpec(i, g, int(s["field"]), int(s.get("picard_number", 16)))
            _check_surface(spec)
            return spec
    raise KeyError(f"no surface {i}")


@lru_cache(maxsize=None)
def load_curve(i, path=None):
    for c in _read_varieties(path)["curves"]:
        if c["id"] == i:
            spec = CurveSpec(i, tuple(int(v) for v in c["f"]), int(c["field"]))
            if len(spec.f) != 8 or spec.f[7] == 0:
                raise ValueError(f"curve {i}: degree must be 7")
            if any(spec.f[k] for k in range(0, 8, 2)):
                raise ValueError(f"curve {i}: polynomial must be odd")
            if spec.discriminant == 0:
                raise ValueError(f"curve {i}: singular")
            return spec
    raise KeyError(f"no curve {i}")


def _check_surface(spec):
    if any(a + b + c != 3 for (a, b, c), _ in spec.g):
        raise ValueError(f"surface {spec.id}: g must be a ternary cubic")
    if triangle_invariant(spec.g_dict) == 0:
        raise ValueError(f"surface {spec.id}: g is not a product of three independent lines")


# ------------------------------------------------------- ternary polynomials


def _pmul(f, g):
    out = {}
    for (a, b, c), u in f.items():
        for (d, e, h), v in g.items():
            k = (a + d, b + e, c + h)
            out[k] = out.get(k, 0) + u * v
    return {k: v for k, v in out.items() if v}


def _padd(f, g, s=1):
    out = dict(f)
    for k, v in g.items():
        out[k] = out.get(k, 0) + s * v
    return {k: v for k, v in out.items() if v}


def _pderiv(f, var):
    out = {}
    for mon, c in f.items():
        if mon[var]:
            m = list(mon)
            m[var] -= 1
            out[tuple(m)] = out.get(tuple(m), 0) + c * mon[var]
    return {k: v for k, v in out.items() if v}


def triangle_invariant(g):
    """lambda with Hess(g) = 2 lambda g, or 0 if no such constant exists.

    For g = l1 l2 l3, lambda = det(l1, l2, l3)^2: it vanishes exactly when
    the three lines are concurrent or two coincide.
    """
    H = [[_pderiv(_pderiv(g, i), j) for j in range(3)] for i in range(3)]
    det = {}
    for perm, sign in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                       ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        term = _pmul(_pmul(H[0][perm[0]], H[1][perm[1]]), H[2][perm[2]])
        det = _padd(det, term, sign)
    lam = None
    for mon in set(det) | set(g):
        num, den = det.get(mon, 0), 2 * g.get(mon, 0)
        if den == 0:
            if num:
                return 0
            continue
        r = Fraction(num, den)
        if lam is None:
            lam = r
        elif r != lam:
            return 0
    if lam is None or lam.denominator != 1:
        return 0
    return int(lam)


def _binary_disc(a, b, c, d):
    """Discriminant of a u^3 + b u^2 v + c u v^2 + d v^3."""
    return b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d + 18 * a * b * c * d


def _restrictions(g):
    """Binary cubics g|_{z=0}, g|_{y=0}, g|_{x=0} as (a, b, c, d)."""
    def coeff(i, j, k):
        return g.get((i, j, k), 0)
    return [
        (coeff(3, 0, 0), coeff(2, 1, 0), coeff(1, 2, 0), coeff(0, 3, 0)),
        (coeff(3, 0, 0), coeff(2, 0, 1), coeff(1, 0, 2), coeff(0, 0, 3)),
        (coeff(0, 3, 0), coeff(0, 2, 1), coeff(0, 1, 2), coeff(0, 0, 3)),
    ]


def bad_prime_invariant(spec):
    """A nonzero integer divisible by every bad prime of the line arrangement.

    6 * (g at the three vertices) * (discriminants of g on the three
    coordinate lines) * det(l1, l2, l3)^2.
    """
    g = spec.g_dict
    D = 6 * g.get((3, 0, 0), 0) * g.get((0, 3, 0), 0) * g.get((0, 0, 3), 0)
    for r in _restrictions(g):
        D *= _binary_disc(*r)
    D *= triangle_invariant(g)
    return D


def _roots_in(ctx, poly):
    """Roots in F_q of an F_p polynomial (low-first), by vectorised evaluation."""
    E = fq_all_elements(ctx)
    acc = np.zeros_like(E)
    for c in reversed(poly):
        acc = fq_mul(ctx, acc, E)
        acc[0] = (acc[0] + c) % ctx.p
    idx = np.nonzero(~acc.any(axis=0))[0]
    return [ctx.element_from_index(int(n)) for n in idx]


def _eval3(g, P):
    x, y, z = P
    ctx = x.ctx
    acc = ctx(0)
    for (i, j, k), c in g.items():
        acc = acc + ctx(c) * x ** i * y ** j * z ** k
    return acc


def reduction_is_good(spec, p):
    """Direct check that x y z g mod p is six distinct lines, no three concurrent.

    The lines of g are found explicitly over the field of definition
    F_{p^k} (k read off the factorisation of g on z = 0) by joining their
    traces on z = 0 and on x = 0.
    """
    if p == 2:
        return False
    g = {mon: c % p for mon, c in spec.g_dict.items() if c % p}
    for v in ((3, 0, 0), (0, 3, 0), (0, 0, 3)):
        if v not in g:
            return False  # a line of g through a vertex (or g = 0)
    for a, b, c, d in _restrictions(g):
        # univariate in u with v = 1, degree exactly 3 since a != 0
        facs = factor_poly_mod_p([d % p, c % p, b % p, a % p], p)
        if any(e > 1 for _, e in facs):
            return False
    k = math.lcm(*[len(f) - 1 for f, _ in factor_poly_mod_p(
        [g.get((0, 3, 0), 0), g.get((1, 2, 0), 0), g.get((2, 1, 0), 0), g.get((3, 0, 0), 0)], p)])
    ctx = ff_context(p, k)
    zero, one = ctx(0), ctx(1)
    # traces on z = 0: (r : 1 : 0); on x = 0: (0 : s : 1)
    r_roots = _roots_in(ctx, [g.get((0, 3, 0), 0), g.get((1, 2, 0), 0), g.get((2, 1, 0), 0), g.get((3, 0, 0), 0)])
    s_roots = _roots_in(ctx, [g.get((0, 0, 3), 0), g.get((0, 1, 2), 0), g.get((0, 2, 1), 0), g.get((0, 3, 0), 0)])
    if len(r_roots) != 3 or len(s_roots) != 3:
        return False
    lines = []
    for r in r_roots:
        P = (r, one, zero)
        hits = []
        for s in s_roots:
            Q = (zero, s, one)
            pts = [P, Q, tuple(a + b for a, b in zip(P, Q)), tuple(a - b for a, b in zip(P, Q))]
            if all(_eval3(g, pt).is_zero() for pt in pts):
                hits.append(Q)
        if len(hits) != 1:
            return False
        Q = hits[0]
        lines.append((P[1] * Q[2] - P[2] * Q[1], P[2] * Q[0] - P[0] * Q[2], P[0] * Q[1] - P[1] * Q[0]))
    (a1, b1, c1), (a2, b2, c2), (a3, b3, c3) = lines
    det = a1 * (b2 * c3 - b3 * c2) - b1 * (a2 * c3 - a3 * c2) + c1 * (a2 * b3 - a3 * b2)
    return not det.is_zero()


def surface_bad_primes(spec):
    """{2} together with the odd primes where the six lines degenerate.

    Candidates are the prime divisors of ``bad_prime_invariant``; each is
    confirmed by ``reduction_is_good``.
    """
    D = bad_prime_invariant(spec)
    if D == 0:
        raise ValueError("degenerate arrangement over Q")
    bad = {2}
    for p in sympy.factorint(abs(D)):
        if p != 2 and not reduction_is_good(spec, p):
            bad.add(p)
    return frozenset(bad)


# ------------------------------------------------------------------- budget

DEFAULT_BUDGET = {1: 500, 2: 500, 3: 25}


def _check_budget(p, m, budget):
    if m < 1 or m > 3:
        raise BudgetExceeded(f"extension degree {m} outside 1..3")
    if budget is None:
        if p > DEFAULT_BUDGET[m]:
            raise BudgetExceeded(f"p = {p} with m = {m} exceeds the default budget")
    elif (p ** m) ** 2 > budget:
        raise BudgetExceeded(f"q^2 = {(p ** m) ** 2} exceeds the budget {budget}")


# ----------------------------------------------------------------- counting


def _scalar_matrices(ctx):
    """M[t] = matrix of multiplication by x^t on F_q (columns are images of x^j)."""
    m = ctx.m
    out = np.zeros((m, m, m), dtype=np.int64)
    for t in range(m):
        for j in range(m):
            e = FFElement.lift(ctx, [0] * (t + j) + [1])
            out[t, :, j] = e.coeffs
    return out


def _index_weights(ctx):
    return np.array([ctx.p ** k for k in range(ctx.m)], dtype=np.int64)


def _eval_univariate(ctx, coeffs, E):
    """sum_k coeffs[k] E^k for integer coeffs, E an (m, n) array."""
    acc = np.zeros_like(E)
    for c in reversed(coeffs):
        acc = fq_mul(ctx, acc, E)
        acc[0] = (acc[0] + c) % ctx.p
    return acc


def count_curve(spec, p, m=1, budget=None):
    """Number of points on the smooth model of y^2 = f(x) over F_{p^m}.

    One point at infinity (odd degree); t_m = q + 1 - N.
    """
    if p == 2 or p in spec.bad_primes:
        raise BadPrimeError(f"p = {p} is bad for C_{spec.id}")
    if m < 1 or m > 3:
        raise BudgetExceeded(f"extension degree {m} outside 1..3")
    ctx = ff_context(p, m)
    E = fq_all_elements(ctx)
    chi = fq_quadratic_character(ctx, _eval_univariate(ctx, list(spec.f), E))
    return 1 + ctx.q + int(chi.sum())


def curve_trace(spec, p, m=1):
    q = p ** m
    return q + 1 - count_curve(spec, p, m)


@dataclass(frozen=True)
class SurfaceCount:
    p: int
    m: int
    S: int
    nodes: int
    N: int

    @property
    def q(self):
        return self.p ** self.m

    @property
    def ns_trace(self):
        return self.q * (1 + self.nodes)

    def record(self):
        return {"p": self.p, "m": self.m, "S": self.S, "nodes": self.nodes, "N": self.N, "t": self.S}


def _eval_ternary(ctx, poly, X, Y, Z):
    """Evaluate a ternary integer polynomial at points given as (m, n) arrays."""
    deg = max(max(mon) for mon in poly)
    powers = []
    for V in (X, Y, Z):
        pw = [np.zeros_like(V)]
        pw[0][0] = 1
        for _ in range(deg):
            pw.append(fq_mul(ctx, pw[-1], V))
        powers.append(pw)
    acc = np.zeros_like(X)
    for (i, j, k), c in poly.items():
        term = fq_mul(ctx, fq_mul(ctx, powers[0][i], powers[1][j]), powers[2][k])
        acc = fq_add(ctx, acc, fq_scale(ctx, c, term))
    return acc


def count_surface(spec, p, m=1, budget=None, chunk=None):
    """(S, nodes, N) for the double plane w^2 = x y z g over F_{p^m}."""
    if p == 2 or p in _surface_bad(spec):
        raise BadPrimeError(f"p = {p} is bad for X_{spec.id}")
    _check_budget(p, m, budget)
    ctx = ff_context(p, m)
    q = ctx.q
    E = fq_all_elements(ctx)
    chi = fq_quadratic_character(ctx, E)
    w = _index_weights(ctx)
    Mx = _scalar_matrices(ctx)
    g = spec.g_dict
    # g(x, y, 1) = sum_i x^i P_i(y)
    P = []
    for i in range(4):
        coeffs = [0] * 4
        for (a, b, _), c in g.items():
            if a == i:
                coeffs[b] = c % p
        P.append(_eval_univariate(ctx, coeffs, E))
    # stacked multiplication matrices: Mall[y] = [M_{P_0(y)} | ... | M_{P_3(y)}]
    Mall = np.concatenate([np.einsum("ty,tab->yab", Pi, Mx) % p for Pi in P], axis=2)
    Xpow = [np.zeros_like(E)]
    Xpow[0][0] = 1
    for _ in range(3):
        Xpow.append(fq_mul(ctx, Xpow[-1], E))
    Xstack = np.concatenate(Xpow, axis=0)  # (4m, q)
    if chunk is None:
        chunk = max(1, min(q, (1 << 22) // (q * ctx.m)))
    S = 0
    zeros = []
    for y0 in range(0, q, chunk):
        ys = slice(y0, min(q, y0 + chunk))
        B = Mall[ys]
        vals = (B.reshape(-1, 4 * ctx.m) @ Xstack) % p
        vals = vals.reshape(B.shape[0], ctx.m, q)
        idx = np.einsum("bmq,m->bq", vals, w)
        S += int((chi[idx] @ chi * chi[ys]).sum())
        zy, zx = np.nonzero(idx == 0)
        if zy.size:
            zeros.append(np.stack([zx, zy + y0]))
    nodes = _count_nodes(ctx, spec, E, zeros)
    N = q * q + q + 1 + S + q * nodes
    return SurfaceCount(p, m, S, nodes, N)


def _count_nodes(ctx, spec, E, g_zeros):
    """Rational points where f and its three partials vanish.

    Candidates: the chart z = 1 points on x = 0, y = 0 or g = 0, the line
    z = 0 and the point (1 : 0 : 0).
    """
    q = ctx.q
    ar = np.arange(q)
    xs = [ar, np.zeros(q, dtype=np.int64)]
    ys = [np.zeros(q, dtype=np.int64), ar]
    for zz in g_zeros:
        xs.append(zz[0])
        ys.append(zz[1])
    xi = np.concatenate(xs)
    yi = np.concatenate(ys)
    pts = np.unique(np.stack([xi, yi]), axis=1)
    X, Y = E[:, pts[0]], E[:, pts[1]]
    Z = np.zeros_like(X)
    Z[0] = 1
    # z = 0: (x : 1 : 0) and (1 : 0 : 0)
    X = np.concatenate([X, E, np.eye(ctx.m, 1, dtype=np.int64)], axis=1)
    Y1 = np.zeros_like(E)
    Y1[0] = 1
    Y = np.concatenate([Y, Y1, np.zeros((ctx.m, 1), dtype=np.int64)], axis=1)
    Z = np.concatenate([Z, np.zeros((ctx.m, q + 1), dtype=np.int64)], axis=1)
    f = spec.sextic
    ok = ~_eval_ternary(ctx, f, X, Y, Z).any(axis=0)
    for v in range(3):
        ok &= ~_eval_ternary(ctx, _pderiv(f, v), X, Y, Z).any(axis=0)
    return int(ok.sum())


@lru_cache(maxsize=None)
def _surface_bad(spec):
    return surface_bad_primes(spec)


# ------------------------------------------------------------ Euler factors


@dataclass(frozen=True)
class EulerFactor:
    """1 + c_1 T + ... + c_d T^d at p, of motivic weight w."""

    p: int
    weight: int
    coeffs: tuple
    sign: int = None

    def __post_init__(self):
        c = tuple(int(v) for v in self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        if c[0] != 1:
            raise ValueError("Euler factors have constant term 1")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __mul__(self, other):
        if self.p != other.p:
            raise ValueError("different primes")
        return EulerFactor(self.p, max(self.weight, other.weight), poly_mul(self.coeffs, other.coeffs))

    def power_sums(self, n):
        """s_1..s_n with s_k = sum of the k-th powers of the reciprocal roots."""
        return power_sums(self.coeffs, n)

    def reciprocal_roots(self, dps=50):
        # x^d P(1/x) has the reciprocal roots as roots; split off repeated
        # roots exactly first, polyroots stalls on them
        x = sympy.Symbol("x")
        rev = sympy.Poly(list(self.coeffs), x)  # coefficient list read highest power first
        out = []
        with mpmath.workdps(dps):
            for fac, mult in rev.sqf_list()[1]:
                if fac.degree() == 0:
                    continue
                cs = [int(c) for c in fac.all_coeffs()]
                roots = [mpmath.mpf(-cs[1]) / cs[0]] if len(cs) == 2 else \
                    mpmath.polyroots(cs, maxsteps=400, extraprec=4 * dps)
                out.extend(roots * mult)
        return out

    def check_weil(self, dps=50, tol=1e-20):
        """All reciprocal roots have absolute value p^(w/2)."""
        if self.degree == 0:
            return True
        with mpmath.workdps(dps):
            target = mpmath.mpf(self.p) ** (mpmath.mpf(self.weight) / 2)
            for r in self.reciprocal_roots(dps):
                if abs(abs(r) / target - 1) > tol:
                    return False
        return True

    def functional_sign(self):
        """s with c_{d-k} = s p^{w(d-2k)/2} c_k for all k, or None."""
        d, p, w = self.degree, self.p, self.weight
        for s in (1, -1):
            ok = True
            for k in range(d + 1):
                e2 = w * (d - 2 * k)
                if e2 % 2:
                    return None
                lhs = self.coeffs[d - k]
                rhs = Fraction(p) ** (e2 // 2) * self.coeffs[k] * s
                if lhs != rhs:
                    ok = False
                    break
            if ok:
                return s
        return None

    def to_record(self):
        return {"p": self.p, "weight": self.weight, "coefficients": [str(c) for c in self.coeffs]}


@dataclass(frozen=True)
class TraceData:
    p: int
    traces: tuple  # ((m, t_m), ...)
    channel: str
    weight: int = field(default=None)

    def __post_init__(self):
        if self.channel not in ("transcendental-K3", "curve-H1"):
            raise ValueError(f"unknown channel {self.channel}")
        w = self.weight if self.weight is not None else (2 if self.channel == "transcendental-K3" else 1)
        object.__setattr__(self, "weight", w)
        for m, t in self.traces:
            if abs(t) > 6 * math.isqrt(self.p ** (m * w)) + 6:
                raise WeilBoundError(f"|t_{m}| = {abs(t)} exceeds 6 p^({m}w/2)")

    def as_dict(self):
        return dict(self.traces)


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u:
            for j, v in enumerate(b):
                out[i + j] += u * v
    return tuple(out)


def poly_divexact(a, b):
    """a / b for integer polynomials with b(0) = +-1; None if not exact."""
    a, b = list(a), list(b)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    while len(b) > 1 and b[-1] == 0:
        b.pop()
    if b[0] not in (1, -1):
        raise ValueError("divisor must have unit constant term")
    n = len(a) - len(b)
    if n < 0:
        return None
    rem = a[:]
    quo = [0] * (n + 1)
    for k in range(n + 1):
        c = rem[k] * b[0]
        quo[k] = c
        if c:
            for j, v in enumerate(b):
                rem[k + j] -= c * v
    if any(rem):
        return None
    return tuple(quo)


def power_sums(coeffs, n):
    """Newton: for prod (1 - a_i T) = sum c_k T^k, s_k = sum a_i^k."""
    c = list(coeffs) + [0] * max(0, n + 1 - len(coeffs))
    s = []
    for k in range(1, n + 1):
        v = -k * c[k] - sum(c[i] * s[k - i - 1] for i in range(1, k))
        s.append(v)
    return s


def coeffs_from_power_sums(s, d):
    """Inverse Newton: c_1..c_d from s_1..s_d (exact rationals, then checked integral)."""
    c = [Fraction(1)]
    for k in range(1, d + 1):
        v = -(Fraction(s[k - 1]) + sum(c[i] * s[k - i - 1] for i in range(1, k))) / k
        c.append(v)
    return c


def weil_from_traces(traces, degree=6, weight=None, sign=1):
    """The degree-6 polynomial fixed by t_1, t_2, t_3 and the functional equation.

    c_{6-k} = sign * p^{w(3-k)} c_k; sign = -1 forces c_3 = 0.  With
    sign=None both signs are tried and exactly one must pass the Weil check.
    """
    if degree != 6:
        raise ValueError("only degree 6 is supported")
    p = traces.p
    w = traces.weight if weight is None else weight
    t = traces.as_dict()
    if not all(m in t for m in (1, 2, 3)):
        raise ValueError("t_1, t_2, t_3 are required")
    if sign is None:
        found = []
        for s in (1, -1):
            try:
                found.append(weil_from_traces(traces, degree, w, s))
            except WeilBoundError:
                pass
        if len(found) != 1:
            raise WeilBoundError(f"{len(found)} signs give Weil polynomials")
        return found[0]
    c = coeffs_from_power_sums([t[1], t[2], t[3]], 3)
    if any(v.denominator != 1 for v in c):
        raise WeilBoundError("traces give non-integral coefficients")
    c = [int(v) for v in c]
    if sign == -1 and c[3] != 0:
        raise WeilBoundError("sign -1 requires c_3 = 0")
    full = c + [sign * p ** w * c[2], sign * p ** (2 * w) * c[1], sign * p ** (3 * w)]
    E = EulerFactor(p, w, tuple(full), sign)
    if not E.check_weil():
        raise WeilBoundError("reconstructed polynomial violates the Weil bound")
    return E


def exterior_square_poly(coeffs):
    """prod_{i<j} (1 - a_i a_j T) from prod (1 - a_i T), by exact linear algebra."""
    c = list(coeffs)
    n = len(c) - 1
    if n < 2:
        return (1,)
    # companion matrix of x^n + c_1 x^{n-1} + ... + c_n (roots a_i)
    C = [[0] * n for _ in range(n)]
    for i in range(1, n):
        C[i][i - 1] = 1
    for i in range(n):
        C[i][n - 1] = -c[n - i]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    W = [[C[i][k] * C[j][l] - C[i][l] * C[j][k] for (k, l) in pairs] for (i, j) in pairs]
    cp = charpoly(W)  # low-first, monic: prod (x - a_i a_j)
    return tuple(reversed(cp))


def exterior_square(P):
    if P.degree != 6:
        raise ValueError("exterior_square expects a degree-6 factor")
    return EulerFactor(P.p, 2 * P.weight, exterior_square_poly(P.coeffs))


def algebraic_part_factor(splitting, p):
    """prod over primes of the cubic subfield above p of (1 - p^f T^f)."""
    if any(e > 1 for e, _ in splitting):
        raise ValueError(f"p = {p} ramifies in the cubic subfield")
    out = (1,)
    for _, f in splitting:
        fac = [0] * (f + 1)
        fac[0], fac[f] = 1, -(p ** f)
        out = poly_mul(out, fac)
    return EulerFactor(p, 2, out)


def curve_trace_data(spec, p, ms=(1, 2, 3)):
    return TraceData(p, tuple((m, curve_trace(spec, p, m)) for m in ms), "curve-H1")


def surface_trace_data(spec, p, ms=(1, 2), budget=None):
    return TraceData(p, tuple((m, count_surface(spec, p, m, budget).S) for m in ms), "transcendental-K3")


def curve_euler_factor(spec, p):
    """L_p(H^1) of the Jacobian from t_1, t_2, t_3 (sign +1 for abelian varieties)."""
    return weil_from_traces(curve_trace_data(spec, p), 6, 1, 1)
