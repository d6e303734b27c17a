"""Integral ideals as Hermite normal forms on the integral basis, and prime
decomposition (Kummer-Dedekind away from the index, shipped data at it)."""

import itertools
from dataclasses import dataclass
from functools import cached_property

from ..ffarith import factor_poly_mod_p
from ..intlinalg import charpoly, det, hnf_square
from .field import DEGREE, CorruptedFieldData


class Ideal:
    """A nonzero integral ideal of Z_K stored as a 6x6 upper-triangular HNF."""

    __slots__ = ("K", "hnf", "__dict__")

    def __init__(self, K, hnf_rows):
        self.K = K
        self.hnf = tuple(tuple(r) for r in hnf_rows)

    @classmethod
    def from_gens(cls, K, gens):
        rows = []
        for g in gens:
            g = tuple(g)
            if any(g):
                rows.extend(K.mult_matrix(g))
        if not rows:
            raise ValueError("the zero ideal is not supported")
        return cls(K, hnf_square(rows, DEGREE))

    @classmethod
    def principal(cls, K, g):
        return cls.from_gens(K, [g])

    @classmethod
    def unit(cls, K):
        return cls.principal(K, K.one)

    @cached_property
    def norm(self):
        n = 1
        for i in range(DEGREE):
            n *= self.hnf[i][i]
        return n

    def reduce(self, x):
        """Canonical representative of x mod I (coordinates in [0, H_ii))."""
        x = list(x)
        for i in range(DEGREE):
            q = x[i] // self.hnf[i][i]
            if q:
                row = self.hnf[i]
                for j in range(i, DEGREE):
                    x[j] -= q * row[j]
        return tuple(x)

    def contains(self, x):
        return not any(self.reduce(x))

    def contains_ideal(self, other):
        return all(self.contains(r) for r in other.hnf)

    def divides(self, other):
        """self | other  <=>  other is contained in self."""
        return self.contains_ideal(other)

    def __mul__(self, other):
        K = self.K
        gens = [K.mul(a, b) for a in self.hnf for b in other.hnf]
        return Ideal(K, hnf_square(gens, DEGREE))

    def __add__(self, other):
        return Ideal(self.K, hnf_square(list(self.hnf) + list(other.hnf), DEGREE))

    def power(self, e):
        result = Ideal.unit(self.K)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_one(self):
        return self.norm == 1

    def coprime_to(self, other):
        return (self + other).is_one()

    def galois(self, k=1):
        K = self.K
        return Ideal(K, hnf_square([K.galois(r, k) for r in self.hnf], DEGREE))

    def min_integer(self):
        """Smallest positive rational integer in I (it divides the norm)."""
        from sympy import divisors
        for n in divisors(self.norm):
            if self.contains(self.K.rational(n)):
                return n
        raise ArithmeticError("norm not in ideal")  # pragma: no cover

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.K is other.K and self.hnf == other.hnf

    def __hash__(self):
        return hash(self.hnf)

    def __repr__(self):
        return f"Ideal(norm={self.norm})"


@dataclass(eq=False)
class PrimeIdeal:
    """A prime (p, g) of Z_K with residue degree f and ramification e."""

    K: object
    p: int
    gen: tuple
    e: int
    f: int
    index: int = 0

    @cached_property
    def ideal(self):
        return Ideal.from_gens(self.K, [self.K.rational(self.p), self.gen])

    @property
    def norm(self):
        return self.p ** self.f

    @property
    def hnf(self):
        return self.ideal.hnf

    def galois(self, k=1):
        """sigma^k of this prime, matched against the canonical list above p."""
        target = self.ideal.galois(k)
        for P in split_prime(self.K, self.p):
            if P.ideal == target:
                return P
        raise ArithmeticError("Galois image not among the primes above p")  # pragma: no cover

    def valuation(self, x):
        """v_P(x) for a nonzero integral x."""
        if not any(x):
            raise ValueError("valuation of zero")
        v = 0
        Pk = self.ideal
        while Pk.contains(x):
            v += 1
            Pk = Pk * self.ideal
        return v

    def __eq__(self, other):
        return isinstance(other, PrimeIdeal) and self.K is other.K and self.ideal == other.ideal

    def __hash__(self):
        return hash((self.p, self.ideal.hnf))

    def __repr__(self):
        return f"PrimeIdeal(p={self.p}, e={self.e}, f={self.f}, #{self.index})"


def _poly_at(K, alpha, g):
    """Integral coordinates of g(alpha) for an integer polynomial g."""
    acc = K.zero
    for c in reversed(g):
        acc = K.add(K.mul(acc, alpha), K.rational(c))
    return acc


def _char_poly(K, alpha):
    """Monic characteristic polynomial of multiplication by alpha, low-first."""
    return [int(c) for c in charpoly(K.mult_matrix(alpha))]


def _power_index(K, alpha):
    """[Z_K : Z[alpha]] (0 if alpha does not generate K)."""
    rows, x = [], K.one
    for _ in range(DEGREE):
        rows.append(x)
        x = K.mul(x, alpha)
    return abs(det([list(r) for r in rows]))


def _kummer_generator(K, p):
    """A deterministic integral alpha with p not dividing [Z_K : Z[alpha]], or None.

    theta itself when possible; otherwise small combinations of the integral
    basis.  None means p is a common index divisor.
    """
    th = K.theta()
    if th.d == 1 and K.index % p:
        return tuple(th.c)
    small = sorted(itertools.product(range(-2, 3), repeat=DEGREE), key=lambda c: (sum(map(abs, c)), c))
    for coeffs in small:
        if not any(coeffs[1:]):
            continue
        idx = _power_index(K, coeffs)
        if idx and idx % p:
            return tuple(coeffs)
    return None


_SPLIT_CACHE = {}


def split_prime(K, p):
    """Primes of Z_K above p, in canonical order, with e and f.

    Kummer-Dedekind with an element whose order has index prime to p; at a
    common index divisor, the shipped factorisation data is used.
    """
    key = (id(K), p)
    if key in _SPLIT_CACHE:
        return _SPLIT_CACHE[key]
    alpha = _kummer_generator(K, p)
    if alpha is None:
        if p not in K.index_prime_data:
            raise CorruptedFieldData(K.id, f"factorisation data for index prime {p}")
        out = [PrimeIdeal(K, p, tuple(int(c) for c in d["generator"]), int(d["e"]), int(d["f"]), n)
               for n, d in enumerate(K.index_prime_data[p])]
    else:
        out = []
        for n, (g, e) in enumerate(factor_poly_mod_p(_char_poly(K, alpha), p)):
            out.append(PrimeIdeal(K, p, _poly_at(K, alpha, g), e, len(g) - 1, n))
    _SPLIT_CACHE[key] = out
    return out


def factor_ideal(I):
    """Factor an integral ideal as [(PrimeIdeal, exponent)]."""
    from sympy import factorint
    out = []
    for p in sorted(factorint(I.norm)):
        for P in split_prime(I.K, p):
            v = 0
            J = P.ideal
            while J.contains_ideal(I) and v < 64:
                v += 1
                J = J * P.ideal
            if v:
                out.append((P, v))
    return out


def decompose_by_radical(K, p):
    """Primes above p from the structure of the algebra Z_K / p.

    Independent of any generator of K, so it also works at common index
    divisors.  Brute force over idempotents: intended for small p only.
    Returns [(generator, e, f)] with each prime as the ideal (p, generator).
    """
    n = DEGREE
    basis = [tuple(int(i == j) for j in range(n)) for i in range(n)]

    def mulp(x, y):
        return tuple(v % p for v in K.mul(x, y))

    def powp(x, e):
        r = tuple(v % p for v in K.one)
        while e:
            if e & 1:
                r = mulp(r, x)
            x = mulp(x, x)
            e >>= 1
        return r

    # radical = kernel of x -> x^(p^k) with p^k >= n (an F_p-linear map)
    k = 1
    while p ** k < n:
        k += 1
    frob = [powp(b, p ** k) for b in basis]
    radical = _kernel_mod_p(frob, p)
    pZK = [K.scale(p, b) for b in basis]
    rad_ideal = Ideal(K, hnf_square(pZK + [tuple(v) for v in radical], n))
    # idempotents of Z_K/rad: search among x with x^p = x (a subalgebra)
    fixed = _kernel_mod_p([tuple((a - b) % p for a, b in zip(powp(b, p), b)) for b in basis], p)
    elems = []
    for coeffs in itertools.product(range(p), repeat=len(fixed)):
        x = tuple(sum(c * v[j] for c, v in zip(coeffs, fixed)) % p for j in range(n))
        elems.append(x)
    idem = [x for x in elems if rad_ideal.contains(K.sub(mulp(x, x), x)) and not rad_ideal.contains(x)]
    # primitive idempotents: those not a sum of two orthogonal nonzero idempotents
    prim = []
    for e in idem:
        decomposable = False
        for a in idem:
            if a == e:
                continue
            if rad_ideal.contains(K.sub(mulp(a, e), a)) and not rad_ideal.contains(K.sub(a, e)):
                decomposable = True
                break
        if not decomposable and all(not rad_ideal.contains(K.sub(e, q)) for q in prim):
            prim.append(e)
    out = []
    for e in prim:
        one_minus = tuple((a - b) % p for a, b in zip(K.one, e))
        P = rad_ideal + Ideal.from_gens(K, [one_minus, K.rational(p)])
        f = 0
        nrm = P.norm
        while nrm % p == 0:
            nrm //= p
            f += 1
        # ramification index: largest v with P^v | pZ_K
        pid = Ideal.principal(K, K.rational(p))
        v = 0
        J = P
        while J.contains_ideal(pid):
            v += 1
            J = J * P
        gen = _two_element_generator(K, P, p)
        out.append((gen, v, f))
    out.sort(key=lambda t: (t[2], t[0]))
    return out


def _two_element_generator(K, P, p):
    """Find g with P = (p, g), searching small combinations of the HNF rows."""
    rows = P.hnf
    for coeffs in itertools.product(range(-1, 2), repeat=DEGREE):
        g = tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) for j in range(DEGREE))
        if not any(g):
            continue
        if Ideal.from_gens(K, [K.rational(p), g]) == P:
            return g
    raise ArithmeticError("no small two-element generator")  # pragma: no cover


def _kernel_mod_p(images, p):
    """Basis of the kernel of the F_p-linear map sending basis vector i to images[i]."""
    n = len(images)
    m = len(images[0])
    # augmented [images | I], row-reduce the left block
    rows = [list(images[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [v * inv % p for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        r += 1
    return [tuple(row[m:]) for row in rows[r:]]


def galois_apply(K, k, x):
    """sigma^k applied to an element (NFElement or coordinate tuple), an Ideal or a PrimeIdeal."""
    k %= DEGREE
    if isinstance(x, (tuple, list)):
        return K.galois(tuple(x), k) if k else tuple(x)
    return x.galois(k) if k else x


def _poly_disc(f):
    from sympy import Poly, Symbol
    return int(Poly(list(reversed(f)), Symbol("x")).discriminant())


def cubic_subfield_split(K, p):
    """(e, f) for the primes of the cubic subfield F above p.

    Away from the discriminant of the stored cubic this factors the cubic mod p.
    Otherwise F is read off from K: its primes above p are the orbits of
    sigma^3 on the primes of K above p.
    """
    if _poly_disc(K.cubic_poly) % p:
        return sorted((e, len(g) - 1) for g, e in factor_poly_mod_p(K.cubic_poly, p))
    Ps = split_prime(K, p)
    if Ps[0].e % 3 == 0:
        return [(3, 1)]
    orbits = {frozenset((P.index, P.galois(3).index)) for P in Ps}
    return [(1, 3 // len(orbits))] * len(orbits)
