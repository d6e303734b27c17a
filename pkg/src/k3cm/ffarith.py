"""Arithmetic in F_p and F_{p^m} (m <= 6), quadratic characters, and
factorisation of univariate polynomials over F_p.

Polynomials over F_p are lists of ints, lowest degree first, with no trailing
zeros (the zero polynomial is ``[]``).
"""

import itertools
import random
import zlib
from dataclasses import dataclass, field

import numpy as np
from sympy import isprime

MAX_DEGREE = 6


# --------------------------------------------------------------------------
# dense polynomials over F_p

def poly_trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_mod_p(f, p):
    return poly_trim([c % p for c in f])


def poly_add(f, g, p):
    n = max(len(f), len(g))
    return poly_trim([((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p
                      for i in range(n)])


def poly_sub(f, g, p):
    return poly_add(f, [-c for c in g], p)


def poly_mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return poly_mod_p(out, p)


def poly_divmod(f, g, p):
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    f = poly_mod_p(f, p)
    inv = pow(g[-1], -1, p)
    q = [0] * max(len(f) - len(g) + 1, 0)
    r = list(f)
    while len(r) >= len(g):
        c = r[-1] * inv % p
        shift = len(r) - len(g)
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = (r[shift + i] - c * b) % p
        r = poly_trim(r)
    return poly_trim(q), r


def poly_rem(f, g, p):
    return poly_divmod(f, g, p)[1]


def poly_monic(f, p):
    if not f:
        return []
    inv = pow(f[-1], -1, p)
    return [c * inv % p for c in f]


def poly_gcd(f, g, p):
    f, g = poly_mod_p(f, p), poly_mod_p(g, p)
    while g:
        f, g = g, poly_rem(f, g, p)
    return poly_monic(f, p)


def poly_deriv(f, p):
    return poly_mod_p([i * c for i, c in enumerate(f)][1:], p)


def poly_powmod(f, e, mod, p):
    result = [1]
    base = poly_rem(f, mod, p)
    while e:
        if e & 1:
            result = poly_rem(poly_mul(result, base, p), mod, p)
        base = poly_rem(poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def poly_eval(f, x, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def is_irreducible(f, p):
    """Rabin-style test: gcd(x^{p^k} - x, f) = 1 for k < deg f and
    x^{p^deg} = x mod f."""
    f = poly_monic(poly_mod_p(f, p), p)
    d = len(f) - 1
    if d <= 0:
        return False
    if d == 1:
        return True
    xp = [0, 1]
    for k in range(1, d + 1):
        xp = poly_powmod(xp, p, f, p)
        if k < d:
            if len(poly_gcd(poly_sub(xp, [0, 1], p), f, p)) > 1:
                return False
    return poly_sub(xp, [0, 1], p) == []


# --------------------------------------------------------------------------
# finite fields

@dataclass(frozen=True)
class FFContext:
    """The field F_{p^m} = F_p[x]/(modulus)."""

    p: int
    m: int
    modulus: tuple

    @property
    def q(self):
        return self.p ** self.m

    def __call__(self, value):
        return FFElement.lift(self, value)

    def elements(self):
        """All q elements, enumerated by base-p digits (coefficient 0 fastest)."""
        for digits in itertools.product(range(self.p), repeat=self.m):
            yield FFElement(self, tuple(reversed(digits)))

    def element_from_index(self, n):
        coeffs = []
        for _ in range(self.m):
            n, r = divmod(n, self.p)
            coeffs.append(r)
        return FFElement(self, tuple(coeffs))


def ff_context(p, m=1):
    """Build F_{p^m} with the lexicographically first monic irreducible modulus.

    Candidates x^m + c_{m-1}x^{m-1} + ... + c_0 are ordered by the tuple
    (c_{m-1}, ..., c_0); for m = 1 the modulus is x.
    """
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if not 1 <= m <= MAX_DEGREE:
        raise ValueError(f"extension degree {m} outside 1..{MAX_DEGREE}")
    if m == 1:
        return FFContext(p, 1, (0, 1))
    for high in itertools.product(range(p), repeat=m):
        cand = list(reversed(high)) + [1]
        if cand[0] == 0:
            continue
        if is_irreducible(cand, p):
            return FFContext(p, m, tuple(cand))
    raise RuntimeError(f"no irreducible polynomial of degree {m} over F_{p}")  # pragma: no cover


@dataclass(frozen=True)
class FFElement:
    ctx: FFContext
    coeffs: tuple = field(default=())

    @classmethod
    def lift(cls, ctx, value):
        if isinstance(value, FFElement):
            return value
        if isinstance(value, int):
            c = [value % ctx.p] + [0] * (ctx.m - 1)
        else:
            c = list(value)
            if ctx.m == 1:
                c = [poly_eval(c, 0, ctx.p)] if c else [0]
            else:
                c = poly_rem(poly_mod_p(c, ctx.p), list(ctx.modulus), ctx.p)
            c = [v % ctx.p for v in c] + [0] * (ctx.m - len(c))
        return cls(ctx, tuple(c))

    def _poly(self):
        return poly_trim(self.coeffs)

    def _wrap(self, poly):
        if self.ctx.m == 1:
            v = poly[0] if poly else 0
            return FFElement(self.ctx, (v % self.ctx.p,))
        r = poly_rem(poly, list(self.ctx.modulus), self.ctx.p)
        return FFElement(self.ctx, tuple(r + [0] * (self.ctx.m - len(r))))

    def __add__(self, other):
        other = FFElement.lift(self.ctx, other)
        return FFElement(self.ctx, tuple((a + b) % self.ctx.p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FFElement(self.ctx, tuple(-a % self.ctx.p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-FFElement.lift(self.ctx, other))

    def __rsub__(self, other):
        return FFElement.lift(self.ctx, other) - self

    def __mul__(self, other):
        other = FFElement.lift(self.ctx, other)
        return self._wrap(poly_mul(self._poly(), other._poly(), self.ctx.p))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = FFElement.lift(self.ctx, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.ctx.q - 2)

    def __truediv__(self, other):
        return self * FFElement.lift(self.ctx, other).inverse()

    def is_zero(self):
        return not any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = FFElement.lift(self.ctx, other)
        if not isinstance(other, FFElement):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    def __repr__(self):
        return f"FFElement({list(self.coeffs)} in F_{self.ctx.p}^{self.ctx.m})"


def quadratic_character(x):
    """Quadratic character on F_q via Euler's criterion x^((q-1)/2)."""
    ctx = x.ctx
    if ctx.p == 2:
        raise ValueError("quadratic character requires odd characteristic")
    if x.is_zero():
        return 0
    r = x ** ((ctx.q - 1) // 2)
    if r == 1:
        return 1
    if r == -1:
        return -1
    raise ArithmeticError("Euler criterion gave neither 1 nor -1")  # pragma: no cover


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


# --------------------------------------------------------------------------
# factorisation over F_p

def _seeded_rng(p, f, tag=0):
    key = repr((p, tag, tuple(f))).encode()
    return random.Random(zlib.crc32(key))


def _squarefree_decomposition(f, p):
    """Return [(g, e)] with f = prod g^e, g squarefree and pairwise coprime."""
    out = []
    f = poly_monic(f, p)
    if len(f) <= 1:
        return out
    df = poly_deriv(f, p)
    if not df:
        # f is a p-th power: coefficients live at multiples of p
        root = [f[i] for i in range(0, len(f), p)]
        return [(g, e * p) for g, e in _squarefree_decomposition(root, p)]
    c = poly_gcd(f, df, p)
    w = poly_divmod(f, c, p)[0]
    i = 1
    while len(w) > 1:
        y = poly_gcd(w, c, p)
        fac = poly_divmod(w, y, p)[0]
        if len(fac) > 1:
            out.append((fac, i))
        w = y
        c = poly_divmod(c, y, p)[0]
        i += 1
    if len(c) > 1:
        root = [c[k] for k in range(0, len(c), p)]
        out.extend((g, e * p) for g, e in _squarefree_decomposition(root, p))
    return out


def _distinct_degree(f, p):
    out = []
    xp = [0, 1]
    d = 0
    g = list(f)
    while len(g) - 1 >= 2 * (d + 1):
        d += 1
        xp = poly_powmod(xp, p, g, p)
        h = poly_gcd(poly_sub(xp, [0, 1], p), g, p)
        if len(h) > 1:
            out.append((h, d))
            g = poly_divmod(g, h, p)[0]
            xp = poly_rem(xp, g, p)
    if len(g) > 1:
        out.append((g, len(g) - 1))
    return out


def _equal_degree(f, d, p, rng):
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = [rng.randrange(p) for _ in range(n)]
        a = poly_trim(a)
        if len(a) <= 1:
            continue
        if p == 2:
            # absolute trace map a + a^2 + ... + a^(2^(d-1))
            t = list(a)
            cur = list(a)
            for _ in range(d - 1):
                cur = poly_rem(poly_mul(cur, cur, p), f, p)
                t = poly_add(t, cur, p)
            b = t
        else:
            b = poly_sub(poly_powmod(a, (p ** d - 1) // 2, f, p), [1], p)
        g = poly_gcd(b, f, p)
        if 1 < len(g) < len(f):
            h = poly_divmod(f, g, p)[0]
            return _equal_degree(g, d, p, rng) + _equal_degree(h, d, p, rng)


def factor_poly_mod_p(f, p):
    """Factor an integer polynomial modulo p.

    Returns ``[(g, e), ...]`` with monic irreducible ``g`` (coefficient lists,
    lowest degree first) sorted by (degree, coefficients).  The product of the
    factors equals ``f mod p`` up to the leading coefficient.
    """
    fp = poly_mod_p(f, p)
    if not fp:
        raise ValueError("polynomial vanishes identically modulo p")
    rng = _seeded_rng(p, fp)
    out = []
    for g, e in _squarefree_decomposition(fp, p):
        for h, d in _distinct_degree(g, p):
            for irr in _equal_degree(h, d, p, rng):
                out.append((irr, e))
    merged = {}
    for g, e in out:
        merged[tuple(g)] = merged.get(tuple(g), 0) + e
    return sorted(((list(g), e) for g, e in merged.items()), key=lambda t: (len(t[0]), t[0][::-1]))


def factor_degrees(f, p):
    """Multiset of (degree, multiplicity) of the factorisation of f mod p."""
    return sorted((len(g) - 1, e) for g, e in factor_poly_mod_p(f, p))


# --------------------------------------------------------------------------
# vectorised F_q arithmetic used by the counting kernels
#
# An array of N field elements is an int64 array of shape (m, N) holding the
# coefficient vectors.  The kernels keep every intermediate below p^2 * m so
# int64 never overflows for the primes in range (p < 2^20).

def fq_all_elements(ctx):
    """All q elements as a (m, q) array, in ``element_from_index`` order."""
    idx = np.arange(ctx.q, dtype=np.int64)
    out = np.empty((ctx.m, ctx.q), dtype=np.int64)
    for k in range(ctx.m):
        out[k] = idx % ctx.p
        idx = idx // ctx.p
    return out


def fq_mul(ctx, A, B):
    """Elementwise product of two (m, ...) coefficient arrays."""
    p, m = ctx.p, ctx.m
    if m == 1:
        return (A * B) % p
    prod = [None] * (2 * m - 1)
    for i in range(m):
        for j in range(m):
            t = A[i] * B[j]
            prod[i + j] = t if prod[i + j] is None else prod[i + j] + t
    prod = [t % p for t in prod]
    mod = ctx.modulus
    for k in range(2 * m - 2, m - 1, -1):
        c = prod[k]
        for j in range(m):
            if mod[j]:
                prod[k - m + j] = (prod[k - m + j] - c * mod[j]) % p
    return np.stack(prod[:m])


def fq_scale(ctx, c, A):
    return (A * (c % ctx.p)) % ctx.p


def fq_add(ctx, A, B):
    return (A + B) % ctx.p


def fq_norm(ctx, A):
    """Norm F_q -> F_p of each element (determinant of multiplication)."""
    p, m = ctx.p, ctx.m
    if m == 1:
        return A[0] % p
    # columns of the multiplication matrix: A, A*x, ..., A*x^(m-1)
    cols = [A]
    xs = np.zeros_like(A)
    xs[1] = 1
    for _ in range(m - 1):
        cols.append(fq_mul(ctx, cols[-1], xs))
    total = np.zeros(A.shape[1:], dtype=np.int64)
    for perm in itertools.permutations(range(m)):
        sign = _perm_sign(perm)
        term = np.ones(A.shape[1:], dtype=np.int64)
        for row, col in enumerate(perm):
            term = (term * cols[col][row]) % p
        total = (total + sign * term) % p
    return total


def _perm_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def legendre_table(p):
    table = np.full(p, -1, dtype=np.int64)
    table[0] = 0
    table[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
    return table


def fq_quadratic_character(ctx, A, table=None):
    """Vectorised quadratic character: chi_q(a) = legendre(N(a))."""
    if table is None:
        table = legendre_table(ctx.p)
    return table[fq_norm(ctx, A)]
