"""The four cyclic sextic CM fields: shipped data, load-time verification,
element arithmetic on the integral basis, Galois action and embeddings.

Unit-group caveat: the shipped fundamental units are verified to be units and
to be independent (regulator bounded away from zero), not to generate the full
unit group.  If they only generated a finite-index subgroup, character
enumeration would over-produce candidates; trace elimination still discards
every impostor, so downstream conclusions stay sound.
"""

import math
from fractions import Fraction
from functools import cached_property, lru_cache
from importlib import resources

import mpmath
import yaml

from ..intlinalg import det, inverse_rational

DEGREE = 6
EXPECTED_DISCRIMINANTS = {1: 419904, 2: 153664, 3: 8340544, 4: 59105344}


class CorruptedFieldData(ValueError):
    """A shipped field constant failed its load-time check."""

    def __init__(self, field_id, check, detail=""):
        msg = f"field {field_id}: check '{check}' failed"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.check = check


class PrecisionError(ArithmeticError):
    pass


def _frac(s):
    return Fraction(str(s))


def _poly_mulmod(f, g, mod):
    """Product of rational polynomials reduced modulo a monic ``mod``."""
    out = [Fraction(0)] * (len(f) + len(g) - 1) if f and g else []
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    n = len(mod) - 1
    for k in range(len(out) - 1, n - 1, -1):
        c = out[k]
        if c:
            for j in range(n + 1):
                out[k - n + j] -= c * mod[j]
    out = out[:n] + [Fraction(0)] * max(0, n - len(out))
    return out


class NumberField:
    """A degree-6 field Q(theta) with a shipped integral basis.

    Elements are coordinate vectors on the integral basis.  Integral elements
    are tuples of Python ints; general elements are :class:`NFElement`.
    """

    def __init__(self, data):
        self.data = data
        self.id = data["id"]
        self.label = data.get("label", "")
        self.poly = [int(c) for c in data["polynomial"]]
        if len(self.poly) != DEGREE + 1 or self.poly[-1] != 1:
            raise CorruptedFieldData(self.id, "monic sextic", str(self.poly))
        self.basis_power = [[_frac(c) for c in row] for row in data["integral_basis"]]
        self.power_to_basis = inverse_rational(self.basis_power)
        self._build_mult_table()
        self.sigma_poly = [_frac(c) for c in data["galois_generator"]]
        self.sigma_matrix = [self._sigma_image(i) for i in range(DEGREE)]
        tor = data["torsion"]
        self.zeta = tuple(int(c) for c in tor["generator"])
        self.w = int(tor["order"])
        self.units = [tuple(int(c) for c in u) for u in data["units"]]
        self.class_number = int(data.get("class_number", 1))
        self.class_group = data.get("class_group", [])
        cub = data["cubic_subfield"]
        self.cubic_poly = [int(c) for c in cub["polynomial"]]
        self.cubic_root = tuple(int(c) for c in cub["root"])
        self.index_prime_data = {int(d["p"]): d["primes"] for d in data.get("index_primes", [])}

    # ------------------------------------------------------------------ basis

    def _power_to_int_coords(self, v):
        c = [sum(v[k] * self.power_to_basis[k][i] for k in range(DEGREE)) for i in range(DEGREE)]
        return c

    def _build_mult_table(self):
        B = self.basis_power
        table = []
        for i in range(DEGREE):
            row = []
            for j in range(DEGREE):
                prod = _poly_mulmod(B[i], B[j], [Fraction(c) for c in self.poly])
                c = self._power_to_int_coords(prod)
                if any(x.denominator != 1 for x in c):
                    raise CorruptedFieldData(self.id, "integral basis closed under multiplication")
                row.append(tuple(int(x) for x in c))
            table.append(row)
        self.mult_table = table
        terms = [[] for _ in range(DEGREE)]
        for i in range(DEGREE):
            for j in range(DEGREE):
                for k, c in enumerate(table[i][j]):
                    if c:
                        terms[k].append((i, j, c))
        self._terms = terms
        one = self._power_to_int_coords([Fraction(1)] + [Fraction(0)] * (DEGREE - 1))
        if any(x.denominator != 1 for x in one):
            raise CorruptedFieldData(self.id, "1 in the integral basis span")
        self.one = tuple(int(x) for x in one)
        self.zero = (0,) * DEGREE

    def _sigma_image(self, i):
        # sigma(b_i) = sum_k B[i][k] sigma(theta)^k
        mod = [Fraction(c) for c in self.poly]
        acc = [Fraction(0)] * DEGREE
        power = [Fraction(1)] + [Fraction(0)] * (DEGREE - 1)
        for k in range(DEGREE):
            for t in range(DEGREE):
                acc[t] += self.basis_power[i][k] * power[t]
            power = _poly_mulmod(power, self.sigma_poly, mod)
        c = self._power_to_int_coords(acc)
        if any(x.denominator != 1 for x in c):
            raise CorruptedFieldData(self.id, "sigma preserves the integral basis")
        return tuple(int(x) for x in c)

    # ---------------------------------------------------- integral arithmetic

    def mul(self, x, y):
        """Product of two integral coordinate tuples."""
        xy = [[a * b for b in y] for a in x]
        return tuple(sum(c * xy[i][j] for i, j, c in tk) for tk in self._terms)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def scale(self, c, x):
        return tuple(c * a for a in x)

    def power(self, x, e):
        if e < 0:
            raise ValueError("negative exponent for an integral power")
        result = self.one
        base = x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def mult_matrix(self, x):
        """Matrix of multiplication by x: row i holds the coordinates of x*b_i."""
        return [self.mul(x, tuple(int(i == j) for j in range(DEGREE))) for i in range(DEGREE)]

    def norm(self, x):
        """Exact norm of an integral element."""
        return det(self.mult_matrix(x))

    def trace(self, x):
        M = self.mult_matrix(x)
        return sum(M[i][i] for i in range(DEGREE))

    def rational(self, n):
        return tuple(n * c for c in self.one)

    def galois(self, x, k=1):
        """sigma^k applied to an integral (or rational) coordinate vector."""
        k %= DEGREE
        for _ in range(k):
            x = tuple(sum(x[i] * self.sigma_matrix[i][t] for i in range(DEGREE)) for t in range(DEGREE))
        return x

    def element(self, coords, den=1):
        return NFElement(self, coords, den)

    def from_power_basis(self, poly):
        """Element given as a rational polynomial in theta."""
        mod = [Fraction(c) for c in self.poly]
        v = _poly_mulmod([Fraction(c) for c in poly], [Fraction(1)], mod)
        return NFElement.from_fractions(self, self._power_to_int_coords(v))

    def theta(self):
        return self.from_power_basis([0, 1])

    # ------------------------------------------------------------- invariants

    @cached_property
    def discriminant(self):
        T = [[self.trace(self.mul(self._e(i), self._e(j))) for j in range(DEGREE)] for i in range(DEGREE)]
        return det(T)

    def _e(self, i):
        return tuple(int(i == j) for j in range(DEGREE))

    @cached_property
    def index(self):
        """[Z_K : Z[theta]] (theta^k has integral coordinates)."""
        return abs(det([[int(v) for v in row] for row in self.power_to_basis]))

    # ------------------------------------------------------------- embeddings

    @lru_cache(maxsize=None)
    def _roots(self, dps):
        with mpmath.workdps(dps + 10):
            rts = mpmath.polyroots(self.poly[::-1], maxsteps=200, extraprec=4 * dps)
            tol = mpmath.mpf(10) ** (-(dps // 2))
            pos = [r for r in rts if r.imag > 0]
            if len(pos) != 3:
                raise CorruptedFieldData(self.id, "totally imaginary")
            pos.sort(key=lambda r: (mpmath.nint(r.real / tol), r.imag))
            out = []
            for r in pos:
                out.extend([r, mpmath.conj(r)])
            return tuple(out)

    @lru_cache(maxsize=None)
    def _basis_values(self, dps):
        rts = self._roots(dps)
        with mpmath.workdps(dps + 10):
            return tuple(tuple(sum(mpmath.mpf(row[k].numerator) / row[k].denominator * r ** k
                                   for k in range(DEGREE)) for r in rts)
                         for row in self.basis_power)

    def _embed_raw(self, coords, den, dps):
        vals = self._basis_values(dps)
        with mpmath.workdps(dps + 10):
            return [sum(coords[i] * vals[i][e] for i in range(DEGREE)) / den for e in range(DEGREE)]

    def embed(self, x, precision=30, retries=6):
        """The six complex embeddings of x, ordered phi_1, conj phi_1, phi_2, ...

        phi_j is the embedding at the canonical root with positive imaginary
        part; roots are sorted by real part.  Values are certified to
        ``precision`` digits by agreement with a doubled-precision evaluation.
        """
        if precision < 30:
            raise ValueError("embedding precision must be at least 30 digits")
        if not isinstance(x, NFElement):
            x = NFElement(self, x)
        dps = precision + 10
        for _ in range(retries):
            lo = self._embed_raw(x.c, x.d, dps)
            hi = self._embed_raw(x.c, x.d, 2 * dps)
            with mpmath.workdps(2 * dps):
                scale = max([mpmath.mpf(1)] + [abs(v) for v in hi])
                err = max(abs(a - b) for a, b in zip(lo, hi)) / scale
            if err < mpmath.mpf(10) ** (-precision):
                return [mpmath.mpc(v) for v in hi]
            dps *= 2
        raise PrecisionError(f"could not certify {precision} digits")

    def phi1(self, x, dps=60):
        """The reference embedding phi_1 of an element (uncertified, fast)."""
        if not isinstance(x, NFElement):
            x = NFElement(self, x)
        return self._embed_raw(x.c, x.d, dps)[0]

    @cached_property
    def galois_slots(self):
        """For k = 0..5, (slot j, conjugated?) with phi_1 o sigma^k = phi_j or conj(phi_j)."""
        dps = 40
        rts = self._roots(dps)
        out = []
        th = self.theta()
        for k in range(DEGREE):
            v = self.phi1(th.galois(k), dps)
            dists = [abs(v - r) for r in rts]
            e = min(range(DEGREE), key=lambda i: dists[i])
            out.append((e // 2, bool(e % 2)))
        return tuple(out)

    def log_embedding(self, x, dps=30):
        """(log |phi_j(x)|^2)_{j=1..3} as floats."""
        vals = self.embed(x, max(dps, 30))
        return [float(2 * mpmath.log(abs(vals[2 * j]))) for j in range(3)]

    # --------------------------------------------------------------- checks

    def verify(self):
        """Re-check every shipped constant; raise CorruptedFieldData on failure."""
        i = self.id
        from sympy import Poly, symbols
        X = symbols("X")
        if not Poly(self.poly[::-1], X).is_irreducible:
            raise CorruptedFieldData(i, "defining polynomial irreducible")
        expected = EXPECTED_DISCRIMINANTS.get(i)
        if expected is not None and abs(self.discriminant) != expected:
            raise CorruptedFieldData(i, "discriminant matches label", f"{self.discriminant} vs {expected}")
        th = self.theta()
        images = [th.galois(k) for k in range(DEGREE + 1)]
        if images[DEGREE] != th or any(images[k] == th for k in range(1, DEGREE)):
            raise CorruptedFieldData(i, "sigma has exact order 6")
        # sigma^3 is complex conjugation under every embedding
        a = self.embed(th, 30)
        b = self.embed(th.galois(3), 30)
        for e in range(DEGREE):
            if abs(b[e] - mpmath.conj(a[e])) > mpmath.mpf(10) ** -25:
                raise CorruptedFieldData(i, "sigma^3 is complex conjugation")
        for u in self.units:
            if abs(self.norm(u)) != 1:
                raise CorruptedFieldData(i, "units have norm +-1")
        z = self.zeta
        if self.power(z, self.w) != self.one or any(self.power(z, k) == self.one for k in range(1, self.w)):
            raise CorruptedFieldData(i, "torsion generator has the stated order")
        l1, l2 = (self.log_embedding(u) for u in self.units)
        reg = abs(l1[0] * l2[1] - l1[1] * l2[0])
        if reg < 1e-6:
            raise CorruptedFieldData(i, "units independent", f"regulator {reg}")
        f = self.data.get("conductor_of_cubic_subfield")
        if f is not None:
            # h_F R_F from |L(1, chi)|^2; h_F = 1 here, so equality means fundamental units
            expected = cubic_regulator(int(f))
            if abs(reg / 4 - expected) > 1e-9 * expected:
                raise CorruptedFieldData(i, "units are fundamental", f"regulator {reg / 4} vs {expected}")
        for j in range(3):
            e = self._e(j)
            if self.galois(e, 3) != e or self.mul(self.zeta, e) != self._e(j + 3):
                raise CorruptedFieldData(i, "integral basis is O_F + i O_F")
        # cubic subfield: root satisfies the cubic and is fixed by sigma^2
        r = self.cubic_root
        val = self.zero
        for c in reversed(self.cubic_poly):
            val = self.add(self.mul(val, r), self.rational(c))
        if any(val):
            raise CorruptedFieldData(i, "cubic subfield generator is a root")
        if self.galois(r, 2) == r or self.galois(r, 3) != r:
            raise CorruptedFieldData(i, "cubic subfield is the fixed field of sigma^3")
        self._verify_class_group()
        return True

    def _verify_class_group(self):
        from .ideal import Ideal
        h = 1
        for gen in self.class_group:
            I = Ideal.from_gens(self, [self.rational(int(gen["p"])), tuple(int(c) for c in gen["generator"])])
            order = int(gen["order"])
            gamma = tuple(int(c) for c in gen["principalization"])
            if I.power(order) != Ideal.principal(self, gamma):
                raise CorruptedFieldData(self.id, "class group principalization")
            h *= order
        if h != self.class_number:
            raise CorruptedFieldData(self.id, "class group orders multiply to h")

    def __repr__(self):
        return f"NumberField(K_{self.id}, {self.label})"


def cubic_regulator(f):
    """h_F R_F for the cyclic cubic field of prime-power conductor f (analytic)."""
    from sympy import primitive_root, totient
    g = primitive_root(f)
    with mpmath.workdps(30):
        w = mpmath.exp(2j * mpmath.pi / 3)
        total, a = 0, 1
        for k in range(int(totient(f))):
            total += w ** (-k) * mpmath.log(abs(1 - mpmath.exp(2j * mpmath.pi * a / f)))
            a = a * g % f
        return float(abs(total) ** 2 / 4)


class NFElement:
    """An element of K as integer coordinates over a common denominator."""

    __slots__ = ("K", "c", "d")

    def __init__(self, K, coords, den=1):
        coords = tuple(int(v) for v in coords)
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            coords, den = tuple(-v for v in coords), -den
        g = den
        for v in coords:
            g = math.gcd(g, v)
        if g > 1:
            coords, den = tuple(v // g for v in coords), den // g
        self.K, self.c, self.d = K, coords, den

    @classmethod
    def from_fractions(cls, K, fracs):
        fracs = [Fraction(f) for f in fracs]
        den = 1
        for f in fracs:
            den = den * f.denominator // math.gcd(den, f.denominator)
        return cls(K, [int(f * den) for f in fracs], den)

    def _coerce(self, other):
        if isinstance(other, NFElement):
            return other
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return NFElement(self.K, self.K.scale(f.numerator, self.K.one), f.denominator)
        return NFElement(self.K, other)

    def __add__(self, other):
        o = self._coerce(other)
        return NFElement(self.K, [a * o.d + b * self.d for a, b in zip(self.c, o.c)], self.d * o.d)

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.K, [-a for a in self.c], self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return NFElement(self.K, self.K.mul(self.c, o.c), self.d * o.d)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return NFElement(self.K, self.K.power(self.c, e), self.d ** e)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def inverse(self):
        if not any(self.c):
            raise ZeroDivisionError("inverse of zero")
        from ..intlinalg import solve_rational
        # solve x * y = 1: columns of the multiplication matrix
        M = self.K.mult_matrix(self.c)
        A = [[M[i][t] for i in range(DEGREE)] for t in range(DEGREE)]
        y = solve_rational(A, list(self.K.one))
        return NFElement.from_fractions(self.K, [v * self.d for v in y])

    def norm(self):
        return Fraction(self.K.norm(self.c), self.d ** DEGREE)

    def trace(self):
        return Fraction(self.K.trace(self.c), self.d)

    def galois(self, k=1):
        return NFElement(self.K, self.K.galois(self.c, k), self.d)

    def is_integral(self):
        return self.d == 1

    def is_zero(self):
        return not any(self.c)

    def rational_value(self):
        """The rational number represented, or None if not in Q."""
        one = self.K.one
        idx = next(i for i, v in enumerate(one) if v)
        q = Fraction(self.c[idx], one[idx] * self.d)
        if all(Fraction(a, self.d) == q * b for a, b in zip(self.c, one)):
            return q
        return None

    def embed(self, precision=30):
        return self.K.embed(self, precision)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, NFElement):
            return NotImplemented
        return self.c == other.c and self.d == other.d

    def __hash__(self):
        return hash((self.c, self.d))

    def __repr__(self):
        if self.d == 1:
            return f"NFElement({list(self.c)})"
        return f"NFElement({list(self.c)}/{self.d})"


# -------------------------------------------------------------------- loading

DATA_PACKAGE = "k3cm.data"
FIELD_FILE = "fields.yaml"


def read_field_file(path=None):
    if path is None:
        text = resources.files(DATA_PACKAGE).joinpath(FIELD_FILE).read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    doc = yaml.safe_load(text)
    if doc.get("format_version") != 1:
        raise ValueError("unsupported field data format version")
    return doc


_CACHE = {}


def load_field(i, path=None, verify=True):
    """Load K_i from the shipped data file and re-verify all invariants."""
    key = (i, path)
    if key in _CACHE:
        return _CACHE[key]
    if i not in (1, 2, 3, 4):
        raise ValueError(f"no field K_{i}")
    doc = read_field_file(path)
    blocks = [b for b in doc["fields"] if b["id"] == i]
    if not blocks:
        raise CorruptedFieldData(i, "data block present")
    K = NumberField(blocks[0])
    if verify:
        K.verify()
    _CACHE[key] = K
    return K
