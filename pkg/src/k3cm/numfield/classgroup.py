"""Class group data: decomposing ideals against the shipped generators, and
exact roots of field elements."""

import itertools
from functools import lru_cache

import mpmath

from .field import DEGREE, NFElement
from .ideal import Ideal
from .lattice import NotPrincipalError, principal_generator


class ClassGroupData:
    """Generators c_i of orders o_i with c_i^o_i = (gamma_i)."""

    def __init__(self, K):
        self.K = K
        self.ideals, self.orders, self.gammas, self.primes = [], [], [], []
        for gen in K.class_group:
            p = int(gen["p"])
            g = tuple(int(c) for c in gen["generator"])
            self.ideals.append(Ideal.from_gens(K, [K.rational(p), g]))
            self.orders.append(int(gen["order"]))
            self.gammas.append(tuple(int(c) for c in gen["principalization"]))
            self.primes.append(p)

    @property
    def rank(self):
        return len(self.orders)

    def exponent_vectors(self):
        """All exponent vectors in canonical order, (0, ..., 0) first."""
        return list(itertools.product(*(range(o) for o in self.orders)))

    def decompose(self, I):
        """(e, beta) with I * prod c_i^e_i = (beta)."""
        return _decompose(self, I.hnf)


@lru_cache(maxsize=None)
def _decompose(C, hnf):
    K = C.K
    I = Ideal(K, hnf)
    for e in C.exponent_vectors():
        J = I
        for c, k in zip(C.ideals, e):
            if k:
                J = J * c.power(k)
        try:
            return e, principal_generator(J)
        except NotPrincipalError:
            continue
    raise ArithmeticError("ideal class not generated by the shipped generators")


@lru_cache(maxsize=None)
def class_group_data(K):
    return ClassGroupData(K)


def _coords_from_embeddings(K, values, dps):
    vals = K._basis_values(dps)
    with mpmath.workdps(dps):
        A = mpmath.matrix(DEGREE, DEGREE)
        b = mpmath.matrix(DEGREE, 1)
        for e in range(DEGREE):
            for i in range(DEGREE):
                A[e, i] = vals[i][e]
            b[e] = values[e]
        return mpmath.lu_solve(A, b)


def root_in_field(K, y, o):
    """Some x in K with x^o = y, or None (y nonzero)."""
    if not isinstance(y, NFElement):
        y = NFElement(K, y)
    if o == 1:
        return y
    d = y.d
    Y = NFElement(K, K.scale(d ** (o - 1), y.c))  # x = X / d with X^o = Y
    dps = 60 + 4 * sum(len(str(abs(c))) for c in Y.c) // DEGREE
    emb = K.embed(Y, dps)
    with mpmath.workdps(dps):
        base = [mpmath.root(emb[2 * j], o) for j in range(3)]
        unit = [mpmath.exp(2j * mpmath.pi * k / o) for k in range(o)]
        for ks in itertools.product(range(o), repeat=3):
            vals = []
            for j in range(3):
                z = base[j] * unit[ks[j]]
                vals.extend([z, mpmath.conj(z)])
            c = _coords_from_embeddings(K, vals, dps)
            X = tuple(int(mpmath.nint(c[i].real)) for i in range(DEGREE))
            if K.power(X, o) == Y.c:
                return NFElement(K, X, d)
    return None


def zeta_log(K, x):
    """t in [0, w) with zeta^t = x, or None."""
    if not isinstance(x, NFElement):
        x = NFElement(K, x)
    if x.d != 1:
        return None
    z = K.one
    for t in range(K.w):
        if z == x.c:
            return t
        z = K.mul(z, K.zeta)
    return None
