import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, strategies as st

from k3cm.numfield import (DEGREE, Ideal, NotPrincipalError, class_group_data,
                           cubic_subfield_split, factor_ideal, galois_apply, is_principal,
                           load_field, principal_generator, split_prime)

FIELDS = (1, 2, 3, 4)
DISCRIMINANTS = {1: -419904, 2: -153664, 3: -8340544, 4: -59105344}
coords = st.lists(st.integers(-20, 20), min_size=DEGREE, max_size=DEGREE).map(tuple)


@pytest.fixture(scope="module", params=FIELDS)
def K(request):
    return load_field(request.param)


def _power_poly(K, x):
    """x as a rational polynomial in theta."""
    out = [Fraction(0)] * DEGREE
    for c, row in zip(x, K.basis_power):
        for k in range(DEGREE):
            out[k] += c * row[k]
    return out


def test_discriminant(K):
    assert abs(K.discriminant) == abs(DISCRIMINANTS[K.id])
    # oracle: disc(poly) / index^2
    t = sympy.Symbol("t")
    dpoly = sympy.discriminant(sympy.Poly(list(reversed(K.poly)), t))
    assert int(dpoly) == K.discriminant * K.index ** 2


def test_sigma_has_order_six_and_cube_is_conjugation(K):
    x = tuple(random.Random(K.id).randint(-9, 9) for _ in range(DEGREE))
    assert K.galois(x, 6) == x
    assert K.galois(x, 2) != x and K.galois(x, 3) != x
    with mpmath.workdps(40):
        a, b = K.phi1(x, 40), K.phi1(K.galois(x, 3), 40)
        assert abs(mpmath.conj(a) - b) < mpmath.mpf(10) ** -30


def test_cubic_subfield_is_fixed_by_conjugation(K):
    r = K.cubic_root
    assert K.galois(r, 3) == r and K.galois(r, 1) != r


@given(st.sampled_from(FIELDS), coords)
def test_norm_matches_resultant(i, x):
    K = load_field(i)
    t = sympy.Symbol("t")
    f = sympy.Poly(list(reversed(K.poly)), t)
    g = sympy.Poly(list(reversed([sympy.Rational(v.numerator, v.denominator) for v in _power_poly(K, x)])), t)
    expect = sympy.resultant(f, g) if any(x) else 0
    assert K.norm(x) == expect


@given(st.sampled_from(FIELDS), coords, coords)
def test_norm_multiplicative_and_galois_invariant(i, x, y):
    K = load_field(i)
    assert K.norm(K.mul(x, y)) == K.norm(x) * K.norm(y)
    assert K.norm(K.galois(x, 1)) == K.norm(x)
    assert K.galois(K.mul(x, y), 2) == K.mul(K.galois(x, 2), K.galois(y, 2))


@given(st.sampled_from(FIELDS), coords)
def test_element_inverse(i, x):
    K = load_field(i)
    if not any(x):
        return
    a = K.element(x)
    assert (a * a.inverse()).c == K.one


@pytest.mark.parametrize("p", [3, 5, 7, 13, 17, 19, 29, 31, 37, 43])
def test_prime_decomposition_norms(K, p):
    primes = split_prime(K, p)
    assert sum(P.e * P.f for P in primes) == DEGREE
    prod = Ideal.unit(K)
    for P in primes:
        prod = prod * P.ideal.power(P.e)
    assert prod == Ideal.principal(K, K.rational(p))
    # sigma permutes the primes above p
    assert sorted(P.galois(1).index for P in primes) == [P.index for P in primes]


def test_factor_ideal_recovers_exponents():
    K = load_field(2)
    P = split_prime(K, 13)[0]
    Q = split_prime(K, 29)[0]
    I = P.ideal.power(2) * Q.ideal
    assert [(R.p, R.index, e) for R, e in factor_ideal(I)] == [(13, P.index, 2), (29, Q.index, 1)]


@pytest.mark.parametrize("p", list(sympy.primerange(3, 200)))
def test_cubic_split_two_routes(p):
    for i in FIELDS:
        K = load_field(i)
        got = cubic_subfield_split(K, p)
        assert sum(e * f for e, f in got) == 3
        # second route: sigma^3-orbits of the primes of K above p
        primes = split_prime(K, p)
        orbits = {frozenset((P.index, P.galois(3).index)) for P in primes}
        e_K = primes[0].e
        if e_K % 3 == 0:
            assert got == [(3, 1)]
        else:
            assert got == [(1, 3 // len(orbits))] * len(orbits)


@pytest.mark.parametrize("i,p", [(1, 17), (2, 13), (3, 37), (1, 73)])
def test_principal_generator(i, p):
    K = load_field(i)
    for P in split_prime(K, p):
        a = principal_generator(P.ideal)
        assert Ideal.principal(K, a) == P.ideal
        assert abs(K.norm(a)) == P.norm


def test_nonprincipal_primes_in_class_number_four():
    K = load_field(4)
    C = class_group_data(K)
    assert C.rank == 2 and C.orders == [2, 2]
    P = split_prime(K, 29)[0]
    assert not is_principal(P.ideal)
    with pytest.raises(NotPrincipalError):
        principal_generator(P.ideal)
    assert is_principal(P.ideal.power(2))
    e, beta = C.decompose(P.ideal)
    J = P.ideal
    for c, k in zip(C.ideals, e):
        if k:
            J = J * c.power(k)
    assert Ideal.principal(K, beta) == J


def test_galois_apply_dispatch():
    K = load_field(1)
    x = (1, 2, 3, 4, 5, 6)
    assert galois_apply(K, 2, x) == K.galois(x, 2)
    assert galois_apply(K, 2, list(x)) == K.galois(x, 2)
    assert galois_apply(K, 2, K.element(x)).c == K.element(K.galois(x, 2)).c
