import random

import mpmath
import pytest
import sympy
from hypothesis import given, strategies as st

from k3cm.hecke import (CASE_TYPES, TYPE_A, TYPE_PSI_PRIME, TYPE_X, CandidateSet, HeckeCharacter,
                        InfinityType, bound_exponents, enumerate_hecke, euler_factor_Q,
                        eval_at_prime, galois_orbit, galois_twist, group_orbits,
                        infinity_element, infinity_eval, max_char_order, slot_assignments,
                        trace_from_character, unit_compatible)
from k3cm.numfield import DEGREE, NFElement, load_field, principal_generator, split_prime
from k3cm.resring import Modulus, enumerate_chars, unit_group

coords = st.lists(st.integers(-9, 9), min_size=DEGREE, max_size=DEGREE).map(tuple).filter(any)


@pytest.fixture(scope="module")
def K1():
    return load_field(1)


@pytest.fixture(scope="module")
def unramified_orbits(K1):
    # characters of the third case type on K_1 with trivial conductor
    return enumerate_hecke(K1, TYPE_PSI_PRIME, set()).orbits()


@pytest.fixture(scope="module")
def x_characters(K1):
    cs = enumerate_hecke(K1, TYPE_X, {2, 3})
    cs.filter_traces(13, {1: 0})
    return cs.characters()[:8]


def test_slot_counts():
    assert {len(slot_assignments(T)) for T in (TYPE_X, TYPE_A, TYPE_PSI_PRIME)} == {6, 8, 12}
    with pytest.raises(ValueError):
        InfinityType(((0, 2), (1, 1), (0, 1)))


def test_max_char_order():
    for i in (1, 2, 3, 4):
        assert max_char_order(load_field(i)) == {1, 2, 4}


@given(st.sampled_from([1, 2, 3]), coords, st.sampled_from(sorted(CASE_TYPES)))
def test_infinity_eval_two_routes(i, x, case):
    K = load_field(i)
    T = slot_assignments(CASE_TYPES[case])[0]
    with mpmath.workdps(60):
        a = infinity_eval(K, T, x, 50)
        b = K.phi1(infinity_element(K, T, x).c, 60) / infinity_element(K, T, x).d
        assert abs(a - b) <= abs(a) * mpmath.mpf(10) ** -40


@given(st.integers(1, 50), st.sampled_from(sorted(CASE_TYPES)))
def test_infinity_eval_on_rationals(n, case):
    K = load_field(2)
    T = InfinityType(CASE_TYPES[case])
    v = infinity_eval(K, T, K.rational(n), 40)
    assert abs(v - n ** (3 * T.weight)) < 1e-20 * n ** (3 * T.weight)


@given(coords, coords)
def test_infinity_type_multiplicative(x, y):
    K = load_field(1)
    T = InfinityType(TYPE_X)
    lhs = infinity_element(K, T, K.mul(x, y))
    rhs = infinity_element(K, T, x) * infinity_element(K, T, y)
    assert lhs.c == rhs.c and lhs.d == rhs.d


def test_twist_of_infinity_type(K1):
    T = InfinityType(TYPE_X)
    assert T.twist(K1, 6) == T
    swapped = InfinityType(tuple((b, a) for a, b in T.pairs))
    assert T.twist(K1, 3) == swapped


@pytest.mark.parametrize("p", [2, 3])
def test_bound_exponents_stabilise(K1, p):
    adm = max_char_order(K1)
    for P in split_prime(K1, p):
        e = bound_exponents(K1, P, adm)

        def count(E):
            if E == 0:
                return 1
            return sum(1 for _ in enumerate_chars(unit_group(Modulus(K1, [(P, E)])), 4))
        assert count(e) == count(e + 1) == count(e + 2)
        if e:
            assert count(e - 1) < count(e)


def test_enumeration_matches_brute_force(K1):
    m = Modulus(K1, [(split_prime(K1, 2)[0], 3), (split_prime(K1, 3)[0], 1)])
    G = unit_group(m)
    for T in slot_assignments(TYPE_X) + slot_assignments(TYPE_A):
        brute = sum(1 for chi in enumerate_chars(G, 4) if unit_compatible(K1, chi, T))
        assert CandidateSet(K1, m, [T]).count() == brute


def test_unramified_orbits(unramified_orbits):
    assert [len(o) for o in unramified_orbits] == [6, 6]
    for orbit in unramified_orbits:
        for psi in orbit:
            assert psi.conductor().is_one()
            assert unit_compatible(psi.K, psi.chi, psi.itype)


def test_value_independent_of_generator(K1, x_characters):
    rng = random.Random(3)
    units = [K1.zeta] + list(K1.units)
    for psi in x_characters:
        for _ in range(5):
            while True:
                a = tuple(rng.randint(-9, 9) for _ in range(DEGREE))
                if any(a) and all(not P.ideal.contains(a) for P, _ in psi.modulus.factors):
                    break
            u = K1.one
            for v in units:
                u = K1.mul(u, K1.power(v, rng.randint(0, 5)))
            J1 = psi.principal_value(a)
            J2 = psi.principal_value(K1.mul(a, u))
            assert (J1.c, J1.d) == (J2.c, J2.d)


def test_eval_at_prime_independent_of_generator(K1, x_characters):
    rng = random.Random(11)
    units = [K1.zeta] + list(K1.units)
    P = next(P for P in split_prime(K1, 13) if not x_characters[0].modulus.exponent(P))
    a = principal_generator(P.ideal)
    for psi in x_characters:
        z, _ = eval_at_prime(psi, P, 60)
        for _ in range(5):
            u = NFElement(K1, K1.one)
            for v in units:
                u = u * NFElement(K1, v) ** rng.randint(-3, 3)
            b = NFElement(K1, a) * u
            assert b.d == 1
            J = psi.principal_value(b.c)
            with mpmath.workdps(60):
                assert abs(K1.phi1(J.c, 60) / J.d - z) < mpmath.mpf(10) ** -40 * abs(z)


@pytest.mark.parametrize("p", [5, 13, 17, 29, 37])
def test_absolute_value_of_prime_values(unramified_orbits, p):
    for psi in unramified_orbits[0][:2]:
        for P in split_prime(psi.K, p):
            z, J = eval_at_prime(psi, P, 60)
            target = mpmath.mpf(P.norm) ** (mpmath.mpf(psi.weight) / 2)
            assert abs(abs(z) / target - 1) < mpmath.mpf(10) ** -40
            # J conj(J) = N(P)^w exactly
            prod = J * J.galois(3)
            assert prod.rational_value() == P.norm ** psi.weight


def test_inert_prime_factor(unramified_orbits):
    psi = unramified_orbits[0][0]
    assert [P.f for P in split_prime(psi.K, 7)] == [6]
    E = euler_factor_Q(psi, 7)
    assert E.degree == 6 and all(c == 0 for c in E.coeffs[1:6])
    assert abs(E.coeffs[6]) == 7 ** (3 * psi.weight)


@pytest.mark.parametrize("p", [p for p in sympy.primerange(5, 51)])
def test_twists_have_equal_euler_factors(unramified_orbits, p):
    for orbit in unramified_orbits:
        E = euler_factor_Q(orbit[0], p)
        assert all(euler_factor_Q(psi, p).coeffs == E.coeffs for psi in orbit[1:])
        assert E.power_sums(6) == [trace_from_character(orbit[0], p, m) for m in range(1, 7)]


def test_twist_values_are_permuted(unramified_orbits):
    psi = unramified_orbits[1][0]
    for k in (1, 2, 3):
        t = galois_twist(psi, k)
        for P in split_prime(psi.K, 13):
            a, b = t.value(P), psi.value(P.galois(k))
            assert (a.c, a.d) == (b.c, b.d)
    # conjugate twist: values are complex conjugates
    t3 = galois_twist(psi, 3)
    for P in split_prime(psi.K, 37):
        z, _ = eval_at_prime(psi, P, 40)
        w, _ = eval_at_prime(t3, P, 40)
        assert abs(mpmath.conj(z) - w) < mpmath.mpf(10) ** -30 * abs(z)


def test_orbit_grouping_is_canonical(unramified_orbits):
    flat = [psi for o in unramified_orbits for psi in o]
    again = group_orbits(list(reversed(flat)))
    assert [[p.key() for p in o] for o in again] == [[p.key() for p in o] for o in unramified_orbits]
    assert len(galois_orbit(flat[0])) == 6


def test_trace_filter_matches_direct_traces(K1):
    cs = enumerate_hecke(K1, TYPE_PSI_PRIME, set())
    chars = cs.characters()
    target = trace_from_character(chars[0], 13, 3)
    expect = {c.key() for c in chars if trace_from_character(c, 13, 3) == target}
    cs.filter_traces(13, {3: target})
    assert {c.key() for c in cs.characters()} == expect


def test_class_values_required_when_class_number_exceeds_one():
    K4 = load_field(4)
    G = unit_group(Modulus(K4, []))
    chi = next(enumerate_chars(G, 1))
    with pytest.raises(LookupError):
        HeckeCharacter(K4, chi, TYPE_PSI_PRIME)
