"""Unit groups of residue rings (Z_K/m)^x and their characters.

A modulus is a product of prime powers P^e.  For each P^e the group splits as
a cyclic part of order N(P) - 1 and the principal units (1+P)/(1+P^e), which
are presented by the filtration generators 1 + y (y running over a basis of
P^k/P^{k+1}) with their p-th power relations.  The local presentations are
lifted through the Chinese remainder theorem and the whole relation matrix is
brought to Smith normal form.  Character values are exact elements of Q/Z.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm

from sympy import factorint

from .intlinalg import smith, solve_left
from .numfield.field import DEGREE
from .numfield.ideal import Ideal

# bound on N(P)^e for each prime-power component of a modulus
DEFAULT_NORM_BUDGET = 10**12


class ResidueBudgetError(RuntimeError):
    """The modulus is larger than the configured budget."""


class NotCoprimeError(ValueError):
    """The residue class shares a prime with the modulus."""


# ------------------------------------------------------------------ moduli


class Modulus:
    """A product of distinct prime powers, kept sorted by (p, index)."""

    def __init__(self, K, factors=()):
        self.K = K
        merged = {}
        for P, e in factors:
            if e < 0:
                raise ValueError("negative exponent in a modulus")
            if e:
                merged[P] = merged.get(P, 0) + e
        self.factors = tuple(sorted(merged.items(), key=lambda t: (t[0].p, t[0].index)))

    @cached_property
    def ideal(self):
        I = Ideal.unit(self.K)
        for P, e in self.factors:
            I = I * P.ideal.power(e)
        return I

    @cached_property
    def norm(self):
        n = 1
        for P, e in self.factors:
            n *= P.norm ** e
        return n

    def exponent(self, P):
        return dict(self.factors).get(P, 0)

    def with_exponent(self, P, e):
        d = dict(self.factors)
        d[P] = e
        return Modulus(self.K, d.items())

    def divides(self, other):
        return all(other.exponent(P) >= e for P, e in self.factors)

    def is_one(self):
        return not self.factors

    def key(self):
        """Hashable description independent of object identity."""
        return tuple((P.p, P.index, e) for P, e in self.factors)

    def __eq__(self, other):
        return isinstance(other, Modulus) and self.K is other.K and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = " * ".join(f"P{P.p}_{P.index}^{e}" for P, e in self.factors) or "(1)"
        return f"Modulus({parts}, norm={self.norm})"

    def label(self):
        return ".".join(f"{P.p}_{P.index}^{e}" for P, e in self.factors) or "1"


def order_formula(m):
    """prod N(P)^(e-1) (N(P) - 1)."""
    n = 1
    for P, e in m.factors:
        n *= P.norm ** (e - 1) * (P.norm - 1)
    return n


# ----------------------------------------------------- residue arithmetic


def _mulmod(K, I, x, y):
    return I.reduce(K.mul(x, y))


def _powmod(K, I, x, e):
    if e < 0:
        raise ValueError("negative exponent")
    result = I.reduce(K.one)
    base = I.reduce(x)
    while e:
        if e & 1:
            result = _mulmod(K, I, result, base)
        base = _mulmod(K, I, base, base)
        e >>= 1
    return result


def _residues(I):
    """All canonical representatives modulo I, in lexicographic order."""
    diag = [I.hnf[i][i] for i in range(DEGREE)]
    out = [()]
    for d in diag:
        out = [r + (c,) for r in out for c in range(d)]
    return [I.reduce(r) for r in out]


def _idempotent(K, A, B):
    """e in B with e = 1 mod A, for coprime A and B."""
    rows = [list(r) for r in A.hnf] + [list(r) for r in B.hnf]
    c = solve_left(rows, list(K.one))
    if c is None:
        raise ArithmeticError("moduli are not coprime")
    e = [0] * DEGREE
    for coef, row in zip(c[DEGREE:], B.hnf):
        for j in range(DEGREE):
            e[j] += coef * row[j]
    return tuple(e)


class _LocalGroup:
    """Presentation of (Z_K/P^e)^x with generator-wise discrete logs."""

    def __init__(self, K, P, e):
        self.K, self.P, self.e = K, P, e
        self.N = P.norm
        self.Pe = P.ideal.power(e)
        self._cyclic_generator()
        self._principal_units()

    # cyclic part
    def _cyclic_generator(self):
        K, P, N = self.K, self.P, self.N
        I = P.ideal
        qs = sorted(factorint(N - 1))
        one = I.reduce(K.one)
        for r in _residues(I):
            if not any(r):
                continue
            if all(_powmod(K, I, r, (N - 1) // q) != one for q in qs):
                self.g0 = r
                break
        else:  # pragma: no cover
            raise ArithmeticError("no primitive root in the residue field")
        # t has order N - 1 modulo P^e and reduces to a primitive root mod P
        self.t = _powmod(K, self.Pe, self.g0, N ** (self.e - 1))
        self._t_mod_p = I.reduce(self.t)
        self._bsgs_m = int((N - 1) ** 0.5) + 1
        baby = {}
        x = one
        for j in range(self._bsgs_m):
            baby.setdefault(x, j)
            x = _mulmod(K, I, x, self._t_mod_p)
        self._baby = baby
        self._giant = _powmod(K, I, self._t_mod_p, (-self._bsgs_m) % (N - 1))

    def _residue_dlog(self, x):
        K, I, N = self.K, self.P.ideal, self.N
        qs = factorint(N - 1)
        y = I.reduce(x)
        if not any(y):
            raise NotCoprimeError("residue divisible by the prime")
        if len(qs) == 1 or N - 1 < 4096:
            return self._bsgs(y)
        # Pohlig-Hellman over the prime-power parts
        residues, mods = [], []
        for q, a in qs.items():
            qa = q ** a
            h = _powmod(K, I, y, (N - 1) // qa)
            tq = _powmod(K, I, self._t_mod_p, (N - 1) // qa)
            for k in range(qa):
                if _powmod(K, I, tq, k) == h:
                    residues.append(k)
                    mods.append(qa)
                    break
        from sympy.ntheory.modular import crt
        return int(crt(mods, residues)[0])

    def _bsgs(self, y):
        K, I = self.K, self.P.ideal
        x = y
        for i in range(self._bsgs_m + 1):
            j = self._baby.get(x)
            if j is not None:
                return (i * self._bsgs_m + j) % (self.N - 1)
            x = _mulmod(K, I, x, self._giant)
        raise ArithmeticError("discrete log failed in the residue field")  # pragma: no cover

    # principal units
    def _principal_units(self):
        K, P, e, p = self.K, self.P, self.e, self.P.p
        self.levels = []
        self.u = []
        self.u_inv = []
        powers = [Ideal.unit(K)]
        for k in range(1, e + 1):
            powers.append(powers[-1] * P.ideal)
        self.powers = powers
        order1 = self.N ** (e - 1)
        for k in range(1, e):
            Pk, Pk1 = powers[k], powers[k + 1]
            basis = []
            span = {Pk1.reduce(K.zero): ()}
            for row in Pk.hnf:
                r = Pk1.reduce(row)
                if r in span:
                    continue
                basis.append(tuple(row))
                grown = {}
                for key, digs in span.items():
                    for c in range(p):
                        grown[Pk1.reduce(K.add(key, K.scale(c, row)))] = digs + (c,)
                span = grown
                if len(span) == self.N:
                    break
            if len(span) != self.N:  # pragma: no cover
                raise ArithmeticError("filtration quotient has the wrong size")
            f = len(basis)
            table = span
            start = len(self.u)
            for y in basis:
                g = self.Pe.reduce(K.add(K.one, y))
                self.u.append(g)
                self.u_inv.append(_powmod(K, self.Pe, g, order1 - 1))
            self.levels.append((k, start, f, table))
        self.ngens = 1 + len(self.u)

    def _principal_digits(self, x):
        K, Pe = self.K, self.Pe
        v = [0] * len(self.u)
        for k, start, f, table in self.levels:
            y = self.powers[k + 1].reduce(K.sub(x, K.one))
            digs = table.get(y)
            if digs is None:
                raise ArithmeticError("residue not in the principal-unit filtration")  # pragma: no cover
            for j, c in enumerate(digs):
                if c:
                    v[start + j] += c
                    x = _mulmod(K, Pe, x, _powmod(K, Pe, self.u_inv[start + j], c))
        if x != Pe.reduce(K.one):  # pragma: no cover
            raise ArithmeticError("principal-unit digits did not terminate")
        return v

    def dlog(self, x):
        """Exponents on (t, u_1, ..., u_r) representing x modulo P^e."""
        K, Pe = self.K, self.Pe
        x = Pe.reduce(x)
        a = self._residue_dlog(x)  # relative to t mod P
        rest = _mulmod(K, Pe, x, _powmod(K, Pe, self.t, (self.N - 1) - a % (self.N - 1)))
        return [a] + self._principal_digits(rest)

    def relations(self):
        """Rows generating the relation lattice of (t, u_1, ..., u_r)."""
        n = self.ngens
        rows = [[self.N - 1] + [0] * (n - 1)]
        p = self.P.p
        for j, g in enumerate(self.u):
            d = self._principal_digits(_powmod(self.K, self.Pe, g, p))
            row = [0] * n
            row[1 + j] = p
            for k, c in enumerate(d):
                row[1 + k] -= c
            rows.append(row)
        return rows

    def generators(self):
        return [self.t] + self.u

    def orders(self):
        return [self.N - 1] + [self.N ** (self.e - 1)] * len(self.u)

    def kernel_indices(self, e_new):
        """Generator indices spanning the kernel of reduction to P^e_new."""
        if e_new <= 0:
            return list(range(self.ngens))
        return [1 + start + j for k, start, f, _ in self.levels if k >= e_new for j in range(f)]


# --------------------------------------------------------- global groups


class UnitGroupStructure:
    """(Z_K/m)^x as a direct sum of cyclic groups Z/d_1 + ... + Z/d_r, d_i | d_(i+1)."""

    def __init__(self, modulus, budget=DEFAULT_NORM_BUDGET):
        for P, e in modulus.factors:
            if P.norm ** e > budget:
                raise ResidueBudgetError(f"component norm {P.norm ** e} exceeds budget {budget}")
        self.modulus = modulus
        K = self.K = modulus.K
        self.ideal = modulus.ideal
        self.locals = [_LocalGroup(K, P, e) for P, e in modulus.factors]
        # CRT idempotents
        self.idem = []
        for n, loc in enumerate(self.locals):
            rest = Ideal.unit(K)
            for m, other in enumerate(self.locals):
                if m != n:
                    rest = rest * other.Pe
            self.idem.append(_idempotent(K, loc.Pe, rest) if len(self.locals) > 1 else K.one)
        # raw generators, lifted
        raw, self.raw_orders, self.offsets, rel_blocks = [], [], [], []
        for n, loc in enumerate(self.locals):
            self.offsets.append(len(raw))
            raw.extend(self._lift(n, g) for g in loc.generators())
            self.raw_orders.extend(loc.orders())
            rel_blocks.append(loc.relations())
        self.raw = raw
        nraw = len(raw)
        rel = []
        for n, block in enumerate(rel_blocks):
            off = self.offsets[n]
            for row in block:
                full = [0] * nraw
                full[off:off + len(row)] = row
                rel.append(full)
        self._raw_relations = rel
        if nraw:
            D, _, V, Vinv = smith(rel, with_inverse=True)
            diag = [D[i][i] for i in range(nraw)]
        else:
            D, V, Vinv, diag = [], [], [], []
        self._V = V
        keep = [j for j, d in enumerate(diag) if d != 1]
        self._keep = keep
        self.invariants = tuple(diag[j] for j in keep)
        if any(d == 0 for d in self.invariants):  # pragma: no cover
            raise ArithmeticError("infinite component in a finite unit group")
        # new generators: rows of V^{-1}
        self._Vinv = Vinv
        gens = []
        for j in keep:
            x = self.ideal.reduce(K.one)
            for k in range(nraw):
                c = Vinv[j][k] % self.raw_orders[k]
                if c:
                    x = _mulmod(K, self.ideal, x, _powmod(K, self.ideal, raw[k], c))
            gens.append(x)
        self.generators = tuple(gens)

    def _lift(self, n, g):
        K = self.K
        if len(self.locals) == 1:
            return self.ideal.reduce(g)
        e = self.idem[n]
        return self.ideal.reduce(K.add(K.one, K.mul(e, K.sub(g, K.one))))

    @property
    def rank(self):
        return len(self.invariants)

    @cached_property
    def order(self):
        n = 1
        for d in self.invariants:
            n *= d
        return n

    @cached_property
    def exponent(self):
        return lcm(*self.invariants) if self.invariants else 1

    def raw_to_snf(self, v):
        """Reduce a raw exponent vector to SNF coordinates."""
        out = []
        for j, d in zip(self._keep, self.invariants):
            out.append(sum(v[k] * self._V[k][j] for k in range(len(v))) % d)
        return tuple(out)

    def raw_dlog(self, x):
        v = []
        for loc in self.locals:
            v.extend(loc.dlog(x))
        return v

    def discrete_log(self, x):
        x = tuple(int(c) for c in x)
        for loc in self.locals:
            if loc.P.ideal.contains(x):
                raise NotCoprimeError(f"residue not coprime to {loc.P}")
        return self.raw_to_snf(self.raw_dlog(x))

    def element(self, v):
        """prod g_j^(v_j) as a canonical residue."""
        K, I = self.K, self.ideal
        x = I.reduce(K.one)
        for g, c, d in zip(self.generators, v, self.invariants):
            c %= d
            if c:
                x = _mulmod(K, I, x, _powmod(K, I, g, c))
        return x

    def mul(self, x, y):
        return _mulmod(self.K, self.ideal, x, y)

    def power(self, x, e):
        if e < 0:
            x = _powmod(self.K, self.ideal, x, self.exponent - 1)
            e = -e
        return _powmod(self.K, self.ideal, x, e)

    def kernel_images(self, P, e_new):
        """SNF vectors of generators of ker((Z_K/m)^x -> (Z_K/m')^x), m' = m with P^e_new."""
        for n, loc in enumerate(self.locals):
            if loc.P == P:
                off = self.offsets[n]
                out = []
                for k in loc.kernel_indices(e_new):
                    v = [0] * len(self.raw)
                    v[off + k] = 1
                    out.append(self.raw_to_snf(v))
                return out
        return []

    def __repr__(self):
        return f"UnitGroupStructure({self.modulus!r}, invariants={self.invariants})"


_GROUP_CACHE = {}


def unit_group(m, budget=DEFAULT_NORM_BUDGET):
    """The structure of (Z_K/m)^x (cached per modulus)."""
    key = (id(m.K), m.key())
    G = _GROUP_CACHE.get(key)
    if G is None:
        G = UnitGroupStructure(m, budget)
        _GROUP_CACHE[key] = G
    return G


def discrete_log(G, x):
    return G.discrete_log(x)


# ------------------------------------------------------------ characters


@dataclass(frozen=True)
class FiniteCharacter:
    """chi(g_j) = exp(2 pi i a_j / d_j)."""

    group: UnitGroupStructure
    exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "exponents",
                           tuple(int(a) % d for a, d in zip(self.exponents, self.group.invariants)))

    @cached_property
    def order(self):
        return lcm(*(d // gcd(a, d) for a, d in zip(self.exponents, self.group.invariants))) \
            if self.exponents else 1

    def is_trivial(self):
        return not any(self.exponents)

    def value_on_vector(self, v):
        s = sum(Fraction(a * c, d) for a, c, d in zip(self.exponents, v, self.group.invariants))
        return s - (s.numerator // s.denominator)

    def __call__(self, x):
        """Value at x as an element of Q/Z in [0, 1)."""
        return self.value_on_vector(self.group.discrete_log(x))

    def complex_value(self, x):
        import cmath
        return cmath.exp(2j * cmath.pi * float(self(x)))

    def __mul__(self, other):
        if other.group is not self.group:
            raise ValueError("characters on different groups")
        return FiniteCharacter(self.group, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __eq__(self, other):
        return isinstance(other, FiniteCharacter) and self.group.modulus == other.group.modulus \
            and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.group.modulus, self.exponents))


def _trivial_on(chi, vectors):
    return all(chi.value_on_vector(v) == 0 for v in vectors)


def char_conductor(chi):
    """Smallest modulus through which chi factors."""
    G = chi.group
    m = G.modulus
    exps = dict(m.factors)
    for P, e in m.factors:
        while exps[P] > 0 and _trivial_on(chi, G.kernel_images(P, exps[P] - 1)):
            exps[P] -= 1
    return Modulus(m.K, exps.items())


def restrict_to(chi, target, budget=DEFAULT_NORM_BUDGET):
    """The character of (Z_K/target)^x that chi factors through (target | modulus)."""
    G = chi.group
    m = G.modulus
    if not target.divides(m):
        raise ValueError("target does not divide the modulus")
    H = unit_group(target, budget)
    K = m.K
    dropped = [P for P, _ in m.factors if target.exponent(P) == 0]
    if dropped:
        D = Ideal.unit(K)
        for P in dropped:
            D = D * P.ideal.power(m.exponent(P))
        e = _idempotent(K, D, target.ideal) if not target.is_one() else K.one
    a = []
    for g, d in zip(H.generators, H.invariants):
        y = g
        if dropped:
            # y = g mod target, y = 1 mod the dropped primes
            y = K.add(g, K.mul(e, K.sub(K.one, g)))
        val = chi(y)
        a.append(int(val * d))
        if val * d != int(val * d):
            raise ArithmeticError("character does not factor through the target")
    return FiniteCharacter(H, tuple(a))


def primitive(chi, budget=DEFAULT_NORM_BUDGET):
    return restrict_to(chi, char_conductor(chi), budget)


def enumerate_chars(G, n_max):
    """All characters of G whose order divides n_max, in lexicographic exponent order."""
    steps = [(d // gcd(d, n_max), gcd(d, n_max)) for d in G.invariants]

    def rec(j, prefix):
        if j == len(steps):
            yield FiniteCharacter(G, tuple(prefix))
            return
        step, count = steps[j]
        for k in range(count):
            yield from rec(j + 1, prefix + [k * step])

    yield from rec(0, [])


def enumerate_chars_orders(G, allowed):
    """Characters whose order lies in the given set of allowed orders."""
    n_max = lcm(*allowed)
    for chi in enumerate_chars(G, n_max):
        if chi.order in allowed:
            yield chi


def extend_to(chi, target, budget=DEFAULT_NORM_BUDGET):
    """The pullback of chi to (Z_K/target)^x for a multiple target of its modulus."""
    if not chi.group.modulus.divides(target):
        raise ValueError("target is not a multiple of the modulus")
    H = unit_group(target, budget)
    a = []
    for g, d in zip(H.generators, H.invariants):
        val = chi(g) * d
        a.append(int(val))
    return FiniteCharacter(H, tuple(a))


def galois_closure(m):
    """Smallest sigma-stable multiple of m."""
    exps = dict(m.factors)
    for P, e in m.factors:
        for k in range(1, DEGREE):
            Q = P.galois(k)
            exps[Q] = max(exps.get(Q, 0), e)
    return Modulus(m.K, exps.items())


def pullback_to_closure(chi, budget=DEFAULT_NORM_BUDGET):
    m = chi.group.modulus
    ms = galois_closure(m)
    return chi if ms == m else extend_to(chi, ms, budget)
