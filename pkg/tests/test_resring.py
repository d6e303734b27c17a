import random
from math import gcd

import pytest
from hypothesis import given, strategies as st

from k3cm.numfield import DEGREE, load_field, split_prime
from k3cm.resring import (FiniteCharacter, Modulus, NotCoprimeError, char_conductor,
                          enumerate_chars, extend_to, galois_closure, order_formula, primitive,
                          unit_group)


def _modulus(i, parts):
    K = load_field(i)
    return Modulus(K, [(split_prime(K, p)[n], e) for p, n, e in parts])


MODULI = {
    "K1 P2^2 P3^2": (1, [(2, 0, 2), (3, 0, 2)]),
    "K1 P3^3": (1, [(3, 0, 3)]),
    "K1 P2^3 P5": (1, [(2, 0, 3), (5, 0, 1)]),
    "K4 P2a^3 P2b^2": (4, [(2, 0, 3), (2, 1, 2)]),
    "K2 P7^4": (2, [(7, 0, 4)]),
}


def _group(name):
    return unit_group(_modulus(*MODULI[name]))


def _is_unit(m, x):
    return not any(P.ideal.contains(x) for P, _ in m.factors)


def _one_plus(m, f, rng, n):
    """Random units of Z_K/m congruent to 1 modulo f."""
    K = m.K
    rows = f.ideal.hnf
    out = []
    while len(out) < n:
        y = [0] * DEGREE
        for row in rows:
            c = rng.randint(-6, 6)
            y = [a + c * b for a, b in zip(y, row)]
        x = K.add(K.one, tuple(y))
        if _is_unit(m, x):
            out.append(x)
    return out


def _random_unit(G, rng):
    m = G.modulus
    while True:
        x = tuple(rng.randint(-40, 40) for _ in range(DEGREE))
        if _is_unit(m, x):
            return x


@pytest.mark.parametrize("name", ["K1 P2^2 P3^2", "K1 P3^3", "K4 P2a^3 P2b^2"])
def test_order_matches_brute_force_count(name):
    G = _group(name)
    m = G.modulus
    diag = [m.ideal.hnf[i][i] for i in range(DEGREE)]
    count = 0
    reps = [()]
    for d in diag:
        reps = [r + (c,) for r in reps for c in range(d)]
    for r in reps:
        count += _is_unit(m, m.ideal.reduce(r))
    assert G.order == order_formula(m) == count


@pytest.mark.parametrize("name", sorted(MODULI))
def test_invariants_divide_and_multiply_to_order(name):
    G = _group(name)
    assert G.order == order_formula(G.modulus)
    for a, b in zip(G.invariants, G.invariants[1:]):
        assert b % a == 0


def test_discrete_log_round_trip():
    # 1000 samples spread over all moduli
    rng = random.Random(1)
    names = sorted(MODULI)
    for n in range(1000):
        G = _group(names[n % len(names)])
        x = _random_unit(G, rng)
        v = G.discrete_log(x)
        assert G.element(v) == G.modulus.ideal.reduce(x)


@given(st.sampled_from(sorted(MODULI)), st.integers(0, 2**32))
def test_discrete_log_is_homomorphism(name, seed):
    G = _group(name)
    rng = random.Random(seed)
    x, y = _random_unit(G, rng), _random_unit(G, rng)
    vx, vy, vxy = G.discrete_log(x), G.discrete_log(y), G.discrete_log(G.mul(x, y))
    assert vxy == tuple((a + b) % d for a, b, d in zip(vx, vy, G.invariants))


def test_discrete_log_rejects_nonunits():
    G = _group("K1 P3^3")
    with pytest.raises(NotCoprimeError):
        G.discrete_log(G.modulus.K.rational(3))


@pytest.mark.parametrize("name", sorted(MODULI))
@pytest.mark.parametrize("n", [1, 2, 4, 6, 12])
def test_character_count(name, n):
    G = _group(name)
    expect = 1
    for d in G.invariants:
        expect *= gcd(d, n)
    chars = list(enumerate_chars(G, n))
    assert len(chars) == expect == len(set(chars))
    assert all(n % chi.order == 0 for chi in chars)


@pytest.mark.parametrize("name", ["K1 P2^2 P3^2", "K1 P2^3 P5", "K4 P2a^3 P2b^2"])
def test_conductor_is_minimal_and_factors(name):
    G = _group(name)
    rng = random.Random(7)
    for chi in list(enumerate_chars(G, 12))[::5]:
        f = char_conductor(chi)
        assert f.divides(G.modulus)
        prim = primitive(chi)
        assert prim.group.modulus == f
        assert extend_to(prim, G.modulus) == chi
        # chi is trivial on 1 + f but not on 1 + f' for any f' one step smaller
        assert not any(chi(x) for x in _one_plus(G.modulus, f, rng, 20))
        for P, e in f.factors:
            smaller = f.with_exponent(P, e - 1)
            assert any(chi(x) for x in _one_plus(G.modulus, smaller, rng, 200))
        for _ in range(5):
            x = _random_unit(G, rng)
            assert prim(x) == chi(x)


def test_conductor_of_product_with_coprime_conductors():
    G = _group("K1 P2^3 P5")
    m = G.modulus
    P2, P5 = (P for P, _ in m.factors)
    A = [c for c in enumerate_chars(G, 12) if char_conductor(c).key() == ((2, P2.index, 3),)]
    B = [c for c in enumerate_chars(G, 12) if char_conductor(c).key() == ((5, P5.index, 1),)]
    assert A and B
    for a in A[:4]:
        for b in B[:4]:
            assert char_conductor(a * b) == m


def test_galois_closure_is_stable():
    m = _modulus(4, [(2, 0, 3)])
    ms = galois_closure(m)
    assert m.divides(ms)
    for P, e in ms.factors:
        assert ms.exponent(P.galois(1)) == e


def test_trivial_character():
    G = _group("K1 P3^3")
    one = FiniteCharacter(G, (0,) * G.rank)
    assert one.is_trivial() and one.order == 1
    assert char_conductor(one).is_one()
