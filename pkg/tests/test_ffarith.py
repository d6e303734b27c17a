import itertools

import pytest
import sympy
from hypothesis import given, strategies as st

from k3cm.ffarith import (factor_degrees, factor_poly_mod_p, ff_context, fq_all_elements,
                          fq_quadratic_character, is_irreducible, legendre, poly_mul,
                          quadratic_character)

SMALL_PRIMES = [3, 5, 7, 11, 13, 17]


def test_prime_field_context():
    ctx = ff_context(5, 1)
    assert ctx.q == 5 and ctx.modulus == (0, 1)


def test_extension_sizes():
    assert ff_context(5, 3).q == 125
    assert len(list(ff_context(3, 2).elements())) == 9


def test_modulus_is_lexicographically_first_irreducible():
    ctx = ff_context(17, 2)
    # x^2 + c with c a non-residue comes first once no x^2 + 0x + c' below it is irreducible
    first = None
    for c1, c0 in itertools.product(range(17), repeat=2):
        cand = [c0, c1, 1]
        if c0 and is_irreducible(cand, 17):
            first = tuple(cand)
            break
    assert ctx.modulus == first
    assert ctx.modulus[1] == 0 and legendre(-ctx.modulus[0], 17) == -1


def test_bad_context_arguments():
    with pytest.raises(ValueError):
        ff_context(15, 1)
    with pytest.raises(ValueError):
        ff_context(5, 7)


def test_quadratic_character_examples():
    F17, F5 = ff_context(17), ff_context(5)
    assert quadratic_character(F17(4)) == 1
    assert quadratic_character(F17(0)) == 0
    assert quadratic_character(F5(2)) == -1
    with pytest.raises(ValueError):
        quadratic_character(ff_context(2)(1))


@pytest.mark.parametrize("p,m", [(3, 1), (3, 2), (5, 2), (7, 3), (11, 2)])
def test_character_sum_vanishes(p, m):
    ctx = ff_context(p, m)
    assert sum(quadratic_character(x) for x in ctx.elements()) == 0


@pytest.mark.parametrize("p,m", [(3, 3), (5, 2), (13, 2)])
def test_vectorised_character_matches_scalar(p, m):
    ctx = ff_context(p, m)
    E = fq_all_elements(ctx)
    chi = fq_quadratic_character(ctx, E)
    for n in range(0, ctx.q, max(1, ctx.q // 40)):
        assert chi[n] == quadratic_character(ctx.element_from_index(n))


@given(st.sampled_from([(3, 2), (5, 2), (7, 2), (5, 3)]), st.data())
def test_character_multiplicative(pm, data):
    ctx = ff_context(*pm)
    coeffs = st.lists(st.integers(0, pm[0] - 1), min_size=pm[1], max_size=pm[1])
    x = ctx(data.draw(coeffs))
    y = ctx(data.draw(coeffs))
    assert quadratic_character(x * y) == quadratic_character(x) * quadratic_character(y)


@given(st.sampled_from([(3, 2), (5, 3), (7, 2), (2, 4)]), st.data())
def test_frobenius_fixes_elements(pm, data):
    ctx = ff_context(*pm)
    a = ctx(data.draw(st.lists(st.integers(0, pm[0] - 1), min_size=pm[1], max_size=pm[1])))
    assert a ** ctx.q == a


def test_factor_examples():
    assert factor_poly_mod_p([1, 0, 1], 5) == [([2, 1], 1), ([3, 1], 1)]
    assert factor_poly_mod_p([1, 0, 1], 7) == [([1, 0, 1], 1)]
    with pytest.raises(ValueError):
        factor_poly_mod_p([5, 10], 5)


def _resubstitute(f, p):
    prod = [1]
    for g, e in factor_poly_mod_p(f, p):
        for _ in range(e):
            prod = poly_mul(prod, g, p)
    lead = f[-1] % p
    return [c * lead % p for c in prod]


@given(st.sampled_from(SMALL_PRIMES),
       st.lists(st.integers(-50, 50), min_size=2, max_size=9))
def test_factorisation_resubstitutes(p, f):
    while f and f[-1] % p == 0:
        f = f[:-1]
    if len(f) < 2:
        return
    got = _resubstitute(f, p)
    assert got == [c % p for c in f]
    for g, _ in factor_poly_mod_p(f, p):
        assert g[-1] == 1 and is_irreducible(g, p)


@pytest.mark.parametrize("p", [5, 17, 29, 37, 101])
def test_defining_polynomial_splitting_against_sympy(p):
    # K_1 defining polynomial; oracle: sympy's factorisation over GF(p)
    from k3cm.numfield import load_field
    f = load_field(1).poly
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(f)), x, modulus=p)
    expect = sorted((sympy.degree(g, x), e) for g, e in poly.factor_list()[1])
    assert factor_degrees(f, p) == expect


def test_legendre_matches_sympy():
    for p in SMALL_PRIMES:
        for a in range(p):
            assert legendre(a, p) == (0 if a == 0 else sympy.legendre_symbol(a, p))
