"""Lattice reduction and short-vector enumeration in the Minkowski embedding,
and principal generators of ideals."""

import itertools
import math
from functools import lru_cache

import numpy as np

from ..intlinalg import hnf_square
from .field import DEGREE

LLL_DELTA = 0.99


class NotPrincipalError(ArithmeticError):
    """The norm form has no solution in the ideal: certified non-principal."""


class BoundExhaustedError(ArithmeticError):
    """No generator up to a user-imposed radius; principality undecided."""


@lru_cache(maxsize=None)
def _minkowski_matrix(K):
    """Row i = sqrt(2) (Re phi_j(b_i), Im phi_j(b_i))_j, so |x E|^2 = T2(x)."""
    vals = K._basis_values(40)
    E = np.empty((DEGREE, DEGREE))
    s = math.sqrt(2.0)
    for i in range(DEGREE):
        for j in range(3):
            z = vals[i][2 * j]
            E[i, 2 * j] = s * float(z.real)
            E[i, 2 * j + 1] = s * float(z.imag)
    return E


def t2(K, x):
    v = np.asarray(x, dtype=float) @ _minkowski_matrix(K)
    return float(v @ v)


def lll(B, U=None, delta=LLL_DELTA):
    """LLL-reduce the real row basis B; U tracks the integer transform.

    Returns (B_reduced, U) with B_reduced = U @ B_original.
    """
    B = np.array(B, dtype=float)
    n = B.shape[0]
    U = np.eye(n, dtype=object) if U is None else np.array(U, dtype=object)

    def gso(B):
        Bs = np.zeros_like(B)
        mu = np.zeros((n, n))
        for i in range(n):
            Bs[i] = B[i]
            for j in range(i):
                mu[i, j] = B[i] @ Bs[j] / (Bs[j] @ Bs[j])
                Bs[i] -= mu[i, j] * Bs[j]
        return Bs, mu

    Bs, mu = gso(B)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                B[k] -= q * B[j]
                U[k] = U[k] - q * U[j]
                Bs, mu = gso(B)
        if Bs[k] @ Bs[k] >= (delta - mu[k, k - 1] ** 2) * (Bs[k - 1] @ Bs[k - 1]):
            k += 1
        else:
            B[[k, k - 1]] = B[[k - 1, k]]
            U[[k, k - 1]] = U[[k - 1, k]]
            Bs, mu = gso(B)
            k = max(k - 1, 1)
    return B, U


def enumerate_short(B, radius):
    """All nonzero integer combinations x (up to sign) with |x B|^2 <= radius.

    Fincke-Pohst on the Cholesky factor of the Gram matrix; returns a list of
    (squared length, tuple x).
    """
    G = B @ B.T
    n = G.shape[0]
    # q[i][i] and q[i][j] (j > i) with Q(x) = sum_i q_ii (x_i + sum_j q_ij x_j)^2
    Q = G.astype(float).copy()
    for i in range(n):
        for j in range(i + 1, n):
            Q[j, i] = Q[i, j]
            Q[i, j] = Q[i, j] / Q[i, i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k, l] -= Q[k, i] * Q[i, l]
    R = radius * (1 + 1e-9) + 1e-9
    out = []
    x = [0] * n

    def rec(i, rem):
        c = -sum(Q[i, j] * x[j] for j in range(i + 1, n))
        span = math.sqrt(max(rem, 0.0) / Q[i, i])
        lo, hi = math.ceil(c - span - 1e-12), math.floor(c + span + 1e-12)
        for v in range(lo, hi + 1):
            x[i] = v
            r2 = rem - Q[i, i] * (v - c) ** 2
            if r2 < -1e-9:
                continue
            if i == 0:
                if any(x):
                    out.append((R - r2, tuple(x)))
            else:
                rec(i - 1, r2)
        x[i] = 0

    rec(n - 1, R)
    # keep one of each +-pair
    seen = []
    for val, v in out:
        first = next(a for a in v if a)
        if first > 0:
            seen.append((val, v))
    return seen


def _unit_radius_factor(K):
    """max over the centred unit fundamental domain of sum_j exp(delta_j)."""
    logs = [K.log_embedding(u) for u in K.units]
    best = 0.0
    for s1 in (-0.5, 0.5):
        for s2 in (-0.5, 0.5):
            v = [s1 * a + s2 * b for a, b in zip(*logs)]
            best = max(best, sum(math.exp(t) for t in v))
    return best


def certified_radius(K, norm):
    """Radius in sum_j phi_j(b)^2 containing a generator of every principal
    ideal of the cubic subfield with this norm."""
    return norm ** (2.0 / 3.0) * _unit_radius_factor(K) * 1.01


@lru_cache(maxsize=None)
def _real_embedding_matrix(K):
    """Row j = the three real embeddings of the j-th basis element of O_F."""
    vals = K._basis_values(40)
    E = np.empty((3, 3))
    for j in range(3):
        for k in range(3):
            E[j, k] = float(vals[j][2 * k].real)
    return E


def _check_relative_basis(K):
    """The integral basis must be {w_0, w_1, w_2, i w_0, i w_1, i w_2} with w_j in F."""
    z = K.zeta
    for j in range(3):
        e = K._e(j)
        if K.galois(e, 3) != e or K.mul(z, e) != K._e(j + 3):
            raise ValueError("integral basis is not of the form O_F + i O_F")


def relative_norm_ideal(I):
    """HNF (3x3, on w_0..w_2) of N_{K/F}(I) = (I * conj I) restricted to O_F."""
    J = I * I.galois(3)
    return hnf_square([row[:3] for row in J.hnf], 3)


def _cubic_generator(K, H, N, bound=None):
    """beta in O_F (as K coordinates) with (beta) = the O_F ideal H of norm N."""
    E = _real_embedding_matrix(K)
    B = np.array([[float(v) for v in row] for row in H]) @ E
    Bred, U = lll(B)
    coords = U @ np.array(H, dtype=object)
    cert = certified_radius(K, N)
    R = 4.0 * N ** (2.0 / 3.0)
    while True:
        Rk = min(R, cert) if bound is None else min(R, cert, bound)
        hits = []
        for _, x in enumerate_short(Bred, Rk):
            b = tuple(int(sum(c * row[j] for c, row in zip(x, coords))) for j in range(3)) + (0, 0, 0)
            if abs(K.norm(b)) == N * N:
                hits.append((K.trace(K.mul(b, b)), b))
        if hits:
            return min(hits)[1]
        if Rk >= cert:
            raise NotPrincipalError(f"no generator of norm {N} in the cubic subfield (its class number is not 1?)")
        if bound is not None and Rk >= bound:
            raise BoundExhaustedError(f"no cubic generator within radius {bound}")
        R *= 2.0


@lru_cache(maxsize=None)
def _unit_classes(K):
    """Representatives of E_F / E_F^2 as K coordinates: +-u1^a u2^b."""
    u1, u2 = K.units
    out = []
    for s, a, b in itertools.product((1, -1), (0, 1), (0, 1)):
        out.append(K.scale(s, K.mul(K.power(u1, a), K.power(u2, b))))
    return tuple(out)


def principal_generator(I, bound=None):
    """A generator of the principal ideal I, or an error saying why not.

    Uses the CM structure: if I = (alpha) then alpha * conj(alpha) = beta * eps
    for a generator beta of the relative norm ideal in F and a totally
    positive unit eps of F, taken modulo squares.  For each of these at most
    eight targets t, the ideal lattice of I is reduced in the weighted
    Minkowski norm sum_j |phi_j(x)|^2 / t_j and every point with value <= 3
    is tested exactly.  Exhausting them certifies non-principality
    (NotPrincipalError); this needs h_F = 1 and units generating E_F, both
    checked when the field data is built.  ``bound`` caps the search for
    beta and raises BoundExhaustedError when hit.  The returned generator is
    the one of least exact T2 over all targets, ties broken by coordinates.
    """
    K = I.K
    N = I.norm
    if N == 1:
        return K.one
    _check_relative_basis(K)
    beta = _cubic_generator(K, relative_norm_ideal(I), N, bound)
    vals = K._basis_values(40)
    H = np.array(I.hnf, dtype=object)
    Hf = np.array([[float(v) for v in row] for row in I.hnf])
    hits = []
    for eps in _unit_classes(K):
        target = K.mul(beta, eps)
        t = [float(v.real) for v in K.embed(target, 30)[0::2]]
        if min(t) <= 0:
            continue  # not totally positive
        E = np.empty((DEGREE, DEGREE))
        for i in range(DEGREE):
            for j in range(3):
                z = vals[i][2 * j]
                w = math.sqrt(t[j])
                E[i, 2 * j] = float(z.real) / w
                E[i, 2 * j + 1] = float(z.imag) / w
        Bred, U = lll(Hf @ E)
        coords = U @ H
        for _, x in enumerate_short(Bred, 3.0 * (1 + 1e-6)):
            a = tuple(int(sum(c * row[j] for c, row in zip(x, coords))) for j in range(DEGREE))
            if K.mul(a, K.galois(a, 3)) == target:
                hits.append((K.trace(K.mul(a, K.galois(a, 3))), a))
                hits.append((hits[-1][0], tuple(-v for v in a)))
    if not hits:
        raise NotPrincipalError(f"ideal of norm {N} is not principal")
    return min(hits)[1]


def is_principal(I):
    try:
        principal_generator(I)
        return True
    except NotPrincipalError:
        return False
