"""Algebraic Hecke characters over the sextic CM fields.

A character psi is a finite character chi of (Z_K/m)^x together with an
infinity type T, so that psi((alpha)) = chi(alpha) T(alpha) for alpha prime
to m.  Writing T(alpha) = phi_1(prod_k sigma^k(alpha)^n_k), every value of
psi is phi_1 of an explicit element of K, and all identities below (unit
compatibility, Euler factors, Galois twists) are checked exactly in K.
Complex numbers appear only in :func:`infinity_eval` and
:func:`eval_at_prime`.

For class number h > 1 the values on the shipped class-group generators c_i
are part of the data; psi(c_i) is an o_i-th root of psi((gamma_i)) in K.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from sympy import divisors

from .counting import EulerFactor
from .intlinalg import hnf_square, smith
from .numfield.classgroup import class_group_data, root_in_field, zeta_log
from .numfield.field import DEGREE, NFElement
from .numfield.ideal import Ideal, split_prime
from .resring import (DEFAULT_NORM_BUDGET, FiniteCharacter, Modulus, char_conductor,
                      extend_to, galois_closure, restrict_to, unit_group)

DEFAULT_PRECISION = 120
MAX_PRECISION = 2000

TYPE_X = ((0, 2), (1, 1), (1, 1))
TYPE_A = ((0, 1), (0, 1), (0, 1))
TYPE_PSI_PRIME = ((0, 2), (0, 2), (1, 1))
CASE_TYPES = {"X": TYPE_X, "A": TYPE_A, "psi-prime": TYPE_PSI_PRIME}


class SnappingError(ArithmeticError):
    """T(u) of a unit is not a root of unity: the infinity type is not algebraic on units."""


class ClassDataError(LookupError):
    """A value needs class-group data that the character does not carry."""


# ------------------------------------------------------------ infinity types


@dataclass(frozen=True)
class InfinityType:
    """Pairs (a_j, b_j) on the embedding pairs (phi_j, conj phi_j), j = 0, 1, 2."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        if len(pairs) != 3:
            raise ValueError("an infinity type has three pairs")
        if any(a < 0 or b < 0 for a, b in pairs):
            raise ValueError("infinity-type exponents are non-negative")
        if len({a + b for a, b in pairs}) != 1:
            raise ValueError("infinity type must have constant weight")
        object.__setattr__(self, "pairs", pairs)

    @property
    def weight(self):
        return sum(self.pairs[0])

    def exponents(self, K):
        """n_0..n_5 with T(alpha) = phi_1(prod_k sigma^k(alpha)^n_k)."""
        a = self.pairs
        return tuple(a[j][1] if conj else a[j][0] for j, conj in K.galois_slots)

    @classmethod
    def from_exponents(cls, K, n):
        pairs = [[None, None] for _ in range(3)]
        for k, (j, conj) in enumerate(K.galois_slots):
            pairs[j][1 if conj else 0] = n[k]
        return cls(tuple(tuple(p) for p in pairs))

    def twist(self, K, k):
        """The type of alpha -> T(sigma^k alpha)."""
        n = self.exponents(K)
        out = [0] * DEGREE
        for i in range(DEGREE):
            out[(i + k) % DEGREE] = n[i]
        return InfinityType.from_exponents(K, out)

    def label(self):
        return "{" + ",".join(f"({a},{b})" for a, b in self.pairs) + "}"


def slot_assignments(multiset):
    """Every infinity type whose pairs, up to order and orientation, are the given multiset."""
    out = set()
    for perm in itertools.permutations(multiset):
        for flips in itertools.product((False, True), repeat=3):
            pairs = tuple((b, a) if f else (a, b) for (a, b), f in zip(perm, flips))
            out.add(InfinityType(pairs))
    return sorted(out, key=lambda t: t.pairs)


def _as_element(K, x):
    return x if isinstance(x, NFElement) else NFElement(K, x)


def infinity_element(K, itype, alpha):
    """prod_k sigma^k(alpha)^n_k as an element of K."""
    alpha = _as_element(K, alpha)
    acc = NFElement(K, K.one)
    for k, n in enumerate(itype.exponents(K)):
        if n:
            acc = acc * alpha.galois(k) ** n
    return acc


def infinity_eval(K, itype, alpha, precision=DEFAULT_PRECISION):
    """prod_j phi_j(alpha)^a_j conj(phi_j(alpha))^b_j, certified to `precision` digits."""
    alpha = _as_element(K, alpha)
    if alpha.is_zero():
        raise ValueError("infinity type evaluated at zero")
    emb = K.embed(alpha, precision)
    with mpmath.workdps(precision + 10):
        v = mpmath.mpc(1)
        for j, (a, b) in enumerate(itype.pairs):
            v *= emb[2 * j] ** a * emb[2 * j + 1] ** b
        return v


@lru_cache(maxsize=None)
def zeta_angle(K):
    """rho with phi_1(zeta) = exp(2 pi i rho / w)."""
    z = K.phi1(K.zeta, 40)
    with mpmath.workdps(40):
        r = mpmath.arg(z) * K.w / (2 * mpmath.pi)
        rho = int(mpmath.nint(r)) % K.w
    if math.gcd(rho, K.w) != 1:  # pragma: no cover
        raise ArithmeticError("torsion generator is not primitive under phi_1")
    return rho


def _zeta_exponent(K, val):
    """s with phi_1(zeta^s) = exp(2 pi i val) for val in (1/w)Z/Z."""
    x = val * K.w
    if x.denominator != 1:
        raise ValueError(f"character value {val} is not a w-th root of unity")
    return (int(x) * pow(zeta_angle(K), -1, K.w)) % K.w


def _unit_targets(K, itype):
    """For u in (zeta, u_1, u_2): t with T(u) = phi_1(zeta^t)."""
    out = []
    for u in [K.zeta] + list(K.units):
        t = zeta_log(K, infinity_element(K, itype, u))
        if t is None:
            raise SnappingError(f"T{itype.label()} is not a root of unity on a unit")
        out.append(t)
    return out


def unit_compatible(K, chi, itype):
    """chi(u) T(u) = 1 for the torsion generator and the fundamental units (exact in Q/Z)."""
    for u, t in zip([K.zeta] + list(K.units), _unit_targets(K, itype)):
        if (_zeta_exponent(K, chi(u)) + t) % K.w:
            return False
    return True


def max_char_order(K, M="K"):
    """Admissible finite-character orders under the value-field assumption M.

    M = "K" (the default) gives the divisors of w_K.  An integer M is taken
    as the number of roots of unity of a larger assumed value field.
    """
    w = K.w if M == "K" else int(M)
    return frozenset(divisors(w))


def bound_exponents(K, P, admissible, budget=DEFAULT_NORM_BUDGET):
    """Least e such that characters of admissible order kill 1 + P^e, stable for three steps."""
    n = math.lcm(*admissible)
    e = 0
    while True:
        stable = True
        for E in range(e + 1, e + 4):
            if P.norm ** E > budget:
                raise RuntimeError(f"exponent bound at {P} exceeds the budget")
            G = unit_group(Modulus(K, [(P, E)]), budget)
            for v in G.kernel_images(P, e):
                if any(c % math.gcd(d, n) for c, d in zip(v, G.invariants)):
                    stable = False
                    break
            if not stable:
                break
        if stable:
            return e
        e += 1


def maximal_modulus(K, bad_primes, admissible, budget=DEFAULT_NORM_BUDGET):
    """prod P^e_max(P) over primes above the bad primes, made Galois-stable."""
    factors = []
    for p in sorted(bad_primes):
        for P in split_prime(K, p):
            e = bound_exponents(K, P, admissible, budget)
            if e:
                factors.append((P, e))
    return galois_closure(Modulus(K, factors))


# ------------------------------------------------------------- characters


def prime_class_datum(K, I):
    """(e, beta) with I * prod c_i^e_i = (beta); e = () when h = 1."""
    if isinstance(I, Ideal):
        hnf = I.hnf
    else:
        hnf = I.ideal.hnf
    return _class_datum(K, hnf)


@lru_cache(maxsize=None)
def _class_datum(K, hnf):
    from .numfield.lattice import principal_generator
    I = Ideal(K, hnf)
    if K.class_number == 1:
        return (), principal_generator(I)
    return class_group_data(K).decompose(I)


class HeckeCharacter:
    """psi with finite part chi, infinity type T and values on class-group generators."""

    def __init__(self, K, chi, itype, class_values=()):
        self.K = K
        self.chi = chi
        self.itype = itype if isinstance(itype, InfinityType) else InfinityType(itype)
        self.class_values = tuple(_as_element(K, x) for x in class_values)
        if K.class_number > 1 and len(self.class_values) != class_group_data(K).rank:
            raise ClassDataError("class-group values are required when h > 1")

    @property
    def modulus(self):
        return self.chi.group.modulus

    @property
    def weight(self):
        return self.itype.weight

    def principal_value(self, alpha):
        """Element J of K with psi((alpha)) = phi_1(J)."""
        K = self.K
        s = _zeta_exponent(K, self.chi(alpha))
        return NFElement(K, K.power(K.zeta, s)) * infinity_element(K, self.itype, alpha)

    def value(self, ideal):
        """Element J of K with psi(ideal) = phi_1(J); the ideal must be prime to the modulus."""
        I = ideal if isinstance(ideal, Ideal) else ideal.ideal
        if not I.coprime_to(self.modulus.ideal):
            raise ValueError("ideal is not prime to the modulus")
        e, beta = prime_class_datum(self.K, I)
        v = self.principal_value(beta)
        for x, k in zip(self.class_values, e):
            if k:
                v = v / x ** k
        return v

    def conductor(self):
        return char_conductor(self.chi)

    def primitive(self):
        c = self.conductor()
        if c == self.modulus:
            return self
        return HeckeCharacter(self.K, restrict_to(self.chi, c), self.itype, self.class_values)

    def key(self):
        prim = self.primitive()
        return (self.K.id, prim.itype.pairs, prim.modulus.key(), prim.chi.exponents,
                tuple((x.c, x.d) for x in self.class_values))

    def __eq__(self, other):
        return isinstance(other, HeckeCharacter) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"HeckeCharacter(K_{self.K.id}, {self.itype.label()}, cond={self.conductor().norm})"

    def to_record(self):
        prim = self.primitive()
        G = prim.chi.group
        rec = {
            "field": self.K.id,
            "infinity_type": [list(p) for p in prim.itype.pairs],
            "conductor": {
                "norm": str(prim.modulus.norm),
                "primes": [{"p": P.p, "index": P.index, "e": P.e, "f": P.f, "exponent": e,
                            "hnf": [[str(v) for v in row] for row in P.hnf]}
                           for P, e in prim.modulus.factors],
            },
            "finite_part": {
                "invariants": [str(d) for d in G.invariants],
                "generators": [[str(v) for v in g] for g in G.generators],
                "exponents": [str(a) for a in prim.chi.exponents],
            },
        }
        if self.class_values:
            rec["class_values"] = [{"coords": [str(v) for v in x.c], "den": str(x.d)}
                                   for x in self.class_values]
        return rec


def eval_at_prime(psi, P, precision=DEFAULT_PRECISION):
    """(certified complex value, exact element J) with psi(P) = phi_1(J)."""
    J = psi.value(P)
    dps = precision
    while True:
        try:
            return psi.K.embed(J, dps)[0], J
        except ArithmeticError:
            dps *= 2
            if dps > MAX_PRECISION:
                raise


def _kpoly_mul(K, a, b):
    out = [NFElement(K, K.zero)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return out


def local_factor_K(psi, p):
    """prod over P | p prime to the modulus of (1 - psi(P) T^f), coefficients in K."""
    K = psi.K
    poly = [NFElement(K, K.one)]
    for P in split_prime(K, p):
        if psi.modulus.exponent(P):
            continue
        J = psi.value(P)
        fac = [NFElement(K, K.one)] + [NFElement(K, K.zero)] * (P.f - 1) + [-J]
        poly = _kpoly_mul(K, poly, fac)
    return poly


def euler_factor_Q(psi, p, check=True):
    """The Euler factor at p of the character induced to Q, as an EulerFactor."""
    cond = psi.conductor()
    if any(P.p == p for P, _ in cond.factors):
        raise ValueError(f"p = {p} divides the conductor")
    coeffs = []
    for c in local_factor_K(psi, p):
        q = c.rational_value()
        if q is None or q.denominator != 1:
            raise ArithmeticError(f"Euler factor at {p} has a non-integral coefficient")
        coeffs.append(int(q))
    E = EulerFactor(p, psi.weight, tuple(coeffs))
    if check and not E.check_weil():
        raise ArithmeticError(f"Euler factor at {p} violates the weight bound")
    return E


def galois_twist(psi, k):
    """The character a -> psi(sigma^k a)."""
    K = psi.K
    k %= DEGREE
    if k == 0:
        return psi
    chi = psi.chi
    ms = galois_closure(chi.group.modulus)
    if ms != chi.group.modulus:
        chi = extend_to(chi, ms)
    G = chi.group
    a = []
    for g, d in zip(G.generators, G.invariants):
        a.append(int(chi(K.galois(g, k)) * d))
    chi_t = FiniteCharacter(G, tuple(a))
    values = []
    if K.class_number > 1:
        for c in class_group_data(K).ideals:
            values.append(psi.value(c.galois(k)))
    return HeckeCharacter(K, chi_t, psi.itype.twist(K, k), values)


def galois_orbit(psi):
    """Distinct primitive characters psi o sigma^k, k = 0..5, in order of first appearance."""
    out, seen = [], set()
    for k in range(DEGREE):
        t = galois_twist(psi, k).primitive()
        if t.key() not in seen:
            seen.add(t.key())
            out.append(t)
    return out


# ----------------------------------------------------------- enumeration


class _Block:
    """Candidates sharing one infinity type: a coset of the unit-compatible characters
    times the choices of class-generator roots."""

    def __init__(self, cset, itype):
        self.cset = cset
        self.itype = itype
        K, G, w = cset.K, cset.G, cset.K.w
        self.empty = False
        r = G.rank
        c = cset.c
        # unit compatibility: sum_j k_j (w/c_j) coef_j(u) = -t_u mod w
        targets = _unit_targets(K, itype)
        A = [[int(cset.unit_coefs[u][j] * (w // c[j]) % w) for j in range(r)] for u in range(3)]
        rhs = [(-t) % w for t in targets]
        sol = _solve_mod(A, rhs, w, c)
        if sol is None:
            self.empty = True
            self.count = 0
            return
        self.k0, H = sol
        self.H = H
        self.radices = [c[j] // H[j][j] for j in range(r)] if r else []
        # class generator roots
        self.class_ok = True
        self.q, self.s0, self.roots, self.choice = [], [], [], []
        for gamma, o in zip(cset.class_gammas, cset.class_orders):
            Ig = infinity_element(K, itype, gamma)
            s0, root = None, None
            for s in range(w):
                root = root_in_field(K, NFElement(K, K.power(K.zeta, s)) * Ig, o)
                if root is not None:
                    s0 = s
                    break
            if s0 is None:
                self.empty = True
                self.count = 0
                return
            q = []
            for s in range(w):
                sol_q = [t for t in range(w) if (o * t - (s - s0)) % w == 0]
                q.append(sol_q[0] if sol_q else -1)
            self.q.append(np.array(q, dtype=np.int64))
            self.s0.append(s0)
            self.roots.append(root)
            self.choice.append(math.gcd(o, w))
        self.count = math.prod(self.radices) * math.prod(self.choice)
        self._k0 = np.array(self.k0, dtype=np.int64)
        self._k0_16 = self._k0.astype(np.int16)
        self._c16 = cset.c_arr.astype(np.int16)
        self._scale16 = (cset.K.w // cset.c_arr).astype(np.int16)
        self.survivors = None  # None: the whole coset

    # candidates are rows (Y, B): Y_j = k_j w / c_j in Z/w, B_i in Z/choice_i
    def _digit_vectors(self):
        """Contribution of each mixed-radix digit to the row (B | k)."""
        nb, r = len(self.choice), self.cset.G.rank
        vecs = []
        for i in range(nb):
            v = np.zeros(nb + r, dtype=np.int64)
            v[i] = 1
            vecs.append(v)
        for j in range(len(self.radices)):
            vecs.append(np.concatenate([np.zeros(nb, dtype=np.int64), np.array(self.H[j], dtype=np.int64)]))
        return vecs

    def _tables(self):
        if getattr(self, "_low", None) is None:
            dims = list(self.choice) + list(self.radices)
            vecs = self._digit_vectors()
            split, size = 0, 1
            while split < len(dims) and size * dims[split] <= 1 << 14:
                size *= dims[split]
                split += 1
            self._split, self._low_size = split, size
            low = np.zeros((1, len(self.choice) + self.cset.G.rank), dtype=np.int64)
            for d, v in zip(dims[:split], vecs[:split]):
                low = (low[None, :, :] + np.arange(d)[:, None, None] * v[None, None, :]).reshape(-1, low.shape[1])
            # digit 0 varies fastest
            self._low = _reorder_low(low, dims[:split]).astype(np.int16)
            self._high_dims, self._high_vecs = dims[split:], vecs[split:]
        return self._low

    def _high_rows(self, hi):
        width = len(self.choice) + self.cset.G.rank
        out = np.zeros((len(hi), width), dtype=np.int64)
        rest = hi.copy()
        for d, v in zip(self._high_dims, self._high_vecs):
            t = rest % d
            rest //= d
            out += t[:, None] * v[None, :]
        return out

    def _decode(self, idx):
        cset = self.cset
        low = self._tables()
        nb = len(self.choice)
        lo = idx % self._low_size
        hi = idx // self._low_size
        h0 = int(hi[0])
        highs = self._high_rows(np.arange(h0, int(hi[-1]) + 1, dtype=np.int64))
        X = low[lo] + highs.astype(np.int16)[hi - h0]
        B = X[:, :nb]
        k = (X[:, nb:] + self._k0_16) % self._c16
        Y = ((k * self._scale16) % cset.K.w).astype(np.int8)
        return Y, B

    def chunks(self, size):
        if self.empty:
            return
        if self.survivors is not None:
            Y, B = self.survivors
            for s in range(0, len(Y), size):
                yield Y[s:s + size], B[s:s + size].astype(np.int64)
            return
        for start in range(0, self.count, size):
            idx = np.arange(start, min(start + size, self.count), dtype=np.int64)
            yield self._mask_class(*self._decode(idx))

    def _mask_class(self, Y, B):
        if not self.q:
            return Y, B
        ok = np.ones(len(Y), dtype=bool)
        for i, q in enumerate(self.q):
            s = _exact_matmul(Y, self.cset.class_coefs[i]) % self.cset.K.w
            ok &= q[s] >= 0
        return Y[ok], B[ok]

    def class_shift(self, Y, B, e):
        """Exponent of zeta contributed by psi(c)^(-e) relative to the fixed roots."""
        w = self.cset.K.w
        out = np.zeros(len(Y), dtype=np.int64)
        for i, k in enumerate(e):
            if not k:
                continue
            s = _exact_matmul(Y, self.cset.class_coefs[i]) % w
            out += k * (self.q[i][s] + B[:, i] * (w // self.choice[i]))
        return out

    def prime_element(self, datum):
        """J_P = T(beta) / prod root_i^e_i for the block's infinity type."""
        e, beta = datum
        J = infinity_element(self.cset.K, self.itype, beta)
        for root, k in zip(self.roots, e):
            if k:
                J = J / root ** k
        return J

    def character(self, y, b):
        cset = self.cset
        K, G, w = cset.K, cset.G, cset.K.w
        a = tuple(int(yj) * d // w for yj, d in zip(y, G.invariants))
        chi = FiniteCharacter(G, a)
        values = []
        for i, root in enumerate(self.roots):
            s = int(np.dot(y, cset.class_coefs[i]) % w)
            t = int(self.q[i][s]) + int(b[i]) * (w // self.choice[i])
            values.append(NFElement(K, K.power(K.zeta, t % w)) * root)
        return HeckeCharacter(K, chi, self.itype, values)


def _solve_mod(A, rhs, w, c):
    """Solutions k in prod Z/c_j of A k = rhs (mod w): (particular k0, HNF of the kernel lattice)."""
    r = len(c)
    if r == 0:
        return ((), []) if all(v % w == 0 for v in rhs) else None
    D, U, V = smith(A)
    m = len(A)
    Ur = [sum(U[i][k] * rhs[k] for k in range(m)) for i in range(m)]
    y0 = [0] * r
    steps = [1] * r
    for i in range(m):
        d = D[i][i] if i < r else 0
        g = math.gcd(d, w)
        if Ur[i] % g:
            return None
        if i < r:
            if d % w:
                y0[i] = (Ur[i] // g) * pow((d // g) % (w // g), -1, w // g) % (w // g) if w // g > 1 else 0
            steps[i] = w // g
    k0 = tuple(sum(V[j][i] * y0[i] for i in range(r)) % c[j] for j in range(r))
    rows = [[V[j][i] * steps[i] for j in range(r)] for i in range(r)]
    rows += [[c[j] if jj == j else 0 for jj in range(r)] for j in range(r)]
    H = hnf_square(rows, r)
    return k0, [list(row) for row in H]


class CandidateSet:
    """All Hecke characters of given infinity types whose conductor divides a modulus m.

    Candidates are generated lazily per infinity type and filtered in numpy
    chunks; survivors are kept explicitly once a filter has run.
    """

    def __init__(self, K, modulus, itypes, admissible=None, budget=DEFAULT_NORM_BUDGET, chunk=1 << 17):
        self.K = K
        self.modulus = modulus
        self.G = G = unit_group(modulus, budget)
        self.chunk = chunk
        self.admissible = frozenset(admissible or max_char_order(K))
        n = math.lcm(*self.admissible)
        if K.w % n:
            raise ValueError("admissible orders must divide w_K")
        w = K.w
        self.c = [math.gcd(d, n) for d in G.invariants]
        self.c_arr = np.array(self.c, dtype=np.int64)
        rho_inv = pow(zeta_angle(K), -1, w)
        self._rho_inv = rho_inv
        self.unit_coefs = [self.coef(u) for u in [K.zeta] + list(K.units)]
        if K.class_number > 1:
            C = class_group_data(K)
            for I in C.ideals:
                if not I.coprime_to(modulus.ideal):
                    raise ClassDataError("a class-group generator divides the modulus")
            self.class_gammas, self.class_orders = C.gammas, C.orders
            self.class_coefs = [self.coef(g) for g in C.gammas]
        else:
            self.class_gammas, self.class_orders, self.class_coefs = [], [], []
        self.itypes = list(itypes)
        self.blocks = [_Block(self, T) for T in self.itypes]
        self.initial_count = self.count()
        self._prime_cache = {}
        self._element_cache = {}

    def coef(self, x):
        """s-coefficients: zeta-exponent of chi(x) is Y . coef(x) mod w."""
        v = self.G.discrete_log(x)
        w = self.K.w
        return np.array([(self._rho_inv * vj) % w for vj in v], dtype=np.int64)

    def count(self):
        total = 0
        for b in self.blocks:
            if b.empty:
                continue
            if b.survivors is None:
                # the class-root condition is applied lazily; count it exactly
                if b.q:
                    total += sum(len(Y) for Y, _ in b.chunks(self.chunk))
                else:
                    total += b.count
            else:
                total += len(b.survivors[0])
        return total

    def prime_data(self, p):
        """[(P, coef(beta_P), e_P, datum)] for primes above p prime to the modulus."""
        if p not in self._prime_cache:
            out = []
            for P in split_prime(self.K, p):
                if self.modulus.exponent(P):
                    continue
                datum = prime_class_datum(self.K, P)
                out.append((P, self.coef(datum[1]), datum[0], datum))
            self._prime_cache[p] = out
        return self._prime_cache[p]

    def prime_exponents(self, block, Y, B, p):
        """Per prime above p: (P, zeta exponents s_P per candidate, J_P) with psi(P) = phi_1(zeta^s J)."""
        w = self.K.w
        out = []
        for P, cf, e, datum in self.prime_data(p):
            s = _exact_matmul(Y, cf)
            if e:
                s = s - block.class_shift(Y, B, e)
            key = (id(block), P.p, P.index)
            J = self._element_cache.get(key)
            if J is None:
                J = self._element_cache[key] = block.prime_element(datum)
            out.append((P, s % w, J))
        return out

    def filter(self, predicate):
        """Keep candidates where predicate(block, Y, B) is true; returns the survivor count."""
        for b in self.blocks:
            if b.empty:
                continue
            keepY, keepB = [], []
            for Y, B in b.chunks(self.chunk):
                if not len(Y):
                    continue
                mask = predicate(b, Y, B)
                keepY.append(Y[mask].astype(np.int8))
                keepB.append(B[mask].astype(np.int8))
            r = self.G.rank
            Y = np.concatenate(keepY) if keepY else np.zeros((0, r), dtype=np.int8)
            B = np.concatenate(keepB) if keepB else np.zeros((0, len(b.choice)), dtype=np.int8)
            b.survivors = (Y, B)
        return self.count()

    def informative(self, p, ms):
        """Whether some prime above p has residue degree dividing one of the levels."""
        return any(m % P.f == 0 for P, *_ in self.prime_data(p) for m in ms)

    def filter_traces(self, p, traces):
        """Apply trace_predicate, skipping the scan when no prime above p can contribute."""
        live = {m: t for m, t in traces.items() if self.informative(p, [m])}
        if any(t for m, t in traces.items() if m not in live):
            return self.filter(lambda b, Y, B: np.zeros(len(Y), dtype=bool))
        if not live:
            return self.count()
        return self.filter(self.trace_predicate(p, live))

    def trace_predicate(self, p, traces):
        """Power sums sum_P f psi(P)^(m/f) must equal the given integers t_m exactly."""
        K = self.K
        w = K.w
        cache = {}

        def tables_for(block, primes):
            key = id(block)
            if key not in cache:
                per_m = []
                for m, t in sorted(traces.items()):
                    entries, den = [], 1
                    for n, (P, _, J) in enumerate(primes):
                        if m % P.f:
                            continue
                        vals = [NFElement(K, K.power(K.zeta, (z * (m // P.f)) % w)) * J ** (m // P.f) * P.f
                                for z in range(w)]
                        den = math.lcm(den, *(v.d for v in vals))
                        entries.append((n, vals))
                    arrs = []
                    for n, vals in entries:
                        arr = np.array([[c * (den // v.d) for c in v.c] for v in vals], dtype=object)
                        arrs.append((n, arr.astype(np.int64) if _fits_int64(arr) else arr))
                    target = np.array([t * den * c for c in K.one], dtype=object)
                    per_m.append((arrs, target.astype(np.int64) if _fits_int64(target) else target))
                cache[key] = per_m
            return cache[key]

        def pred(block, Y, B):
            mask = np.ones(len(Y), dtype=bool)
            primes = self.prime_exponents(block, Y, B, p)
            for arrs, target in tables_for(block, primes):
                total = None
                for n, arr in arrs:
                    part = arr[primes[n][1]]
                    total = part if total is None else total + part
                if total is None:
                    continue
                mask &= np.all(total == target, axis=1)
            return mask

        return pred

    def divisor_predicate(self, p, poly):
        """Each factor (1 - psi(P) T^f) must divide the integer polynomial poly."""
        K = self.K
        w = K.w

        def divides(P, J):
            # (1 - J T^f) | poly  <=>  poly(x) = 0 for x^f = 1/J: reduce poly mod T^f - 1/J
            f = P.f
            rem = [NFElement(K, K.zero)] * f
            Jinv = J.inverse()
            power = NFElement(K, K.one)
            for k, c in enumerate(poly):
                if k and k % f == 0:
                    power = power * Jinv
                if c:
                    rem[k % f] = rem[k % f] + power * c
            return all(x.is_zero() for x in rem)

        def pred(block, Y, B):
            mask = np.ones(len(Y), dtype=bool)
            for P, s, J in self.prime_exponents(block, Y, B, p):
                ok = np.array([divides(P, NFElement(K, K.power(K.zeta, z)) * J) for z in range(w)])
                mask &= ok[s]
            return mask

        return pred

    def characters(self, limit=10000):
        """Materialise the current candidates as HeckeCharacter objects."""
        n = self.count()
        if n > limit:
            raise RuntimeError(f"{n} candidates exceed the materialisation limit {limit}")
        out = []
        for b in self.blocks:
            if b.empty:
                continue
            for Y, B in b.chunks(self.chunk):
                for y, bb in zip(Y, B):
                    out.append(b.character(y, bb))
        return out

    def orbits(self, limit=10000):
        """Surviving characters grouped into Galois orbits (primitive representatives)."""
        return group_orbits(self.characters(limit))


def _reorder_low(low, dims):
    """Rows were built with the first digit slowest; make the first digit fastest."""
    if not dims:
        return low
    n = low.shape[0]
    idx = np.arange(n)
    # index with digit 0 fastest -> index with digit 0 slowest
    digits = np.unravel_index(idx, tuple(dims[::-1]))[::-1]
    slow = np.ravel_multi_index(digits, tuple(dims))
    return low[slow]


def _exact_matmul(A, B):
    """Exact product of small integer matrices through float BLAS."""
    A = np.asarray(A, dtype=np.float32)
    B = np.asarray(B, dtype=np.float32)
    if A.shape[-1] * 3 * max(1.0, float(np.abs(B).max(initial=0))) * max(1.0, float(np.abs(A).max(initial=0))) > 1 << 23:
        A, B = A.astype(np.float64), B.astype(np.float64)
    return np.rint(A @ B).astype(np.int64)


def _fits_int64(arr):
    return all(abs(int(v)) < (1 << 58) for v in arr.flat)


def group_orbits(chars):
    """Partition characters into Galois orbits; each orbit sorted by key, orbits sorted by first key."""
    prim = {}
    for psi in chars:
        q = psi.primitive()
        prim.setdefault(q.key(), q)
    remaining = dict(prim)
    orbits = []
    while remaining:
        key = min(remaining, key=_sort_key)
        psi = remaining[key]
        orbit = galois_orbit(psi)
        members = sorted(orbit, key=lambda t: _sort_key(t.key()))
        for t in members:
            remaining.pop(t.key(), None)
        orbits.append(members)
    return orbits


def _sort_key(key):
    return repr(key)


def enumerate_hecke(K, itype, bad_primes, admissible=None, budget=DEFAULT_NORM_BUDGET, modulus=None):
    """Candidate set of Hecke characters of the given infinity type (or multiset of pairs)
    with conductor supported on the bad primes and exponents bounded as in bound_exponents."""
    admissible = frozenset(admissible or max_char_order(K))
    if isinstance(itype, InfinityType):
        itypes = [itype]
    else:
        itypes = slot_assignments(itype)
    if modulus is None:
        modulus = maximal_modulus(K, bad_primes, admissible, budget)
    return CandidateSet(K, modulus, itypes, admissible, budget)


def trace_from_character(psi, p, m):
    """sum over P | p with f | m of f psi(P)^(m/f), as an exact rational integer."""
    K = psi.K
    acc = NFElement(K, K.zero)
    for P in split_prime(K, p):
        if psi.modulus.exponent(P) or m % P.f:
            continue
        acc = acc + psi.value(P) ** (m // P.f) * P.f
    q = acc.rational_value()
    if q is None or q.denominator != 1:
        raise ArithmeticError("power sum is not a rational integer")
    return int(q)
