import itertools

import mpmath
import pytest
from hypothesis import given, strategies as st

from k3cm.counting import (BadPrimeError, BudgetExceeded, EulerFactor, TraceData,
                           WeilBoundError, algebraic_part_factor, count_curve, count_surface,
                           curve_euler_factor, curve_trace, exterior_square, exterior_square_poly,
                           load_curve, load_surface, poly_divexact, poly_mul, power_sums,
                           surface_bad_primes, weil_from_traces)
from k3cm.ffarith import ff_context, legendre, quadratic_character


# ---------------------------------------------------------------- oracles

def _naive_curve(spec, p, m):
    ctx = ff_context(p, m)
    N = 1
    for x in ctx.elements():
        v = ctx(0)
        for c in reversed(spec.f):
            v = v * x + ctx(c)
        N += 1 + quadratic_character(v)
    return N


def _naive_S_prime_field(spec, p):
    g = spec.g_dict
    S = 0
    for x, y in itertools.product(range(p), repeat=2):
        gv = sum(c * x ** i * y ** j for (i, j, _), c in g.items())
        S += legendre(x * y * gv, p)
    return S


def _projective_points(ctx):
    els = list(ctx.elements())
    zero, one = ctx(0), ctx(1)
    for x, y in itertools.product(els, repeat=2):
        yield (x, y, one)
    for x in els:
        yield (x, one, zero)
    yield (one, zero, zero)


def _eval(poly, P):
    x, y, z = P
    acc = x.ctx(0)
    for (i, j, k), c in poly.items():
        acc = acc + x.ctx(c) * x ** i * y ** j * z ** k
    return acc


def _deriv(poly, v):
    out = {}
    for mon, c in poly.items():
        if mon[v]:
            m = list(mon)
            m[v] -= 1
            out[tuple(m)] = out.get(tuple(m), 0) + c * mon[v]
    return out


def _naive_surface(spec, p, m):
    ctx = ff_context(p, m)
    f = spec.sextic
    partials = [_deriv(f, v) for v in range(3)]
    S = nodes = 0
    for P in _projective_points(ctx):
        val = _eval(f, P)
        S += quadratic_character(val)
        if val.is_zero() and all(_eval(d, P).is_zero() for d in partials):
            nodes += 1
    return S, nodes


# ------------------------------------------------------------ point counts

def test_documented_counts():
    C1, C2 = load_curve(1), load_curve(2)
    assert count_curve(C1, 17) == 12 and curve_trace(C1, 17) == 6
    assert curve_trace(C2, 13) == -4
    assert count_surface(load_surface(1), 17).S == 6
    assert count_surface(load_surface(2), 13).S == 2


@pytest.mark.parametrize("i,p,m", [(1, 5, 1), (1, 7, 2), (2, 5, 2), (3, 13, 1), (4, 5, 1), (4, 3, 2)])
def test_curve_count_matches_naive(i, p, m):
    C = load_curve(i)
    assert count_curve(C, p, m) == _naive_curve(C, p, m)


@pytest.mark.parametrize("i,p", [(1, 5), (1, 13), (2, 5), (2, 17), (3, 13)])
def test_surface_S_matches_naive_prime_field(i, p):
    X = load_surface(i)
    assert count_surface(X, p).S == _naive_S_prime_field(X, p)


@pytest.mark.parametrize("i,p,m", [(1, 5, 1), (1, 7, 1), (2, 5, 2), (1, 5, 2)])
def test_surface_count_and_nodes_match_naive(i, p, m):
    X = load_surface(i)
    res = count_surface(X, p, m)
    S, nodes = _naive_surface(X, p, m)
    assert (res.S, res.nodes) == (S, nodes)
    q = p ** m
    assert res.N == q * q + q + 1 + S + q * nodes


def test_all_nodes_rational_over_large_extension():
    # fifteen pairwise intersections of six lines
    assert count_surface(load_surface(1), 17, 2).nodes == 15


def test_bad_primes():
    assert surface_bad_primes(load_surface(1)) == {2, 3}
    assert surface_bad_primes(load_surface(2)) == {2, 7}
    assert surface_bad_primes(load_surface(3)) == {2, 7, 11, 19}
    assert load_curve(1).bad_primes == {2, 3}
    with pytest.raises(BadPrimeError):
        count_surface(load_surface(1), 3)
    with pytest.raises(BadPrimeError):
        count_curve(load_curve(1), 2)


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        count_surface(load_surface(1), 97, 3)
    with pytest.raises(BudgetExceeded):
        count_curve(load_curve(1), 5, 4)


# ------------------------------------------------------------ Euler factors

def test_curve_euler_factor_is_weil_polynomial():
    for i, p in [(1, 17), (2, 13), (3, 37), (4, 29)]:
        E = curve_euler_factor(load_curve(i), p)
        assert E.degree == 6 and E.check_weil() and E.functional_sign() == 1
        assert E.power_sums(3) == [curve_trace(load_curve(i), p, m) for m in (1, 2, 3)]


def test_weil_check_with_repeated_roots():
    assert EulerFactor(7, 1, (1, 0, 21, 0, 147, 0, 343)).check_weil()
    assert not EulerFactor(7, 1, (1, 100, 0, 0, 0, 0, 343)).check_weil()


def _weil_poly(p, w, angles, sign=1):
    # real Weil polynomial built from three conjugate pairs
    coeffs = (1,)
    for a in angles:
        coeffs = poly_mul(coeffs, (1, -a, p ** w))
    return coeffs


@given(st.sampled_from([5, 7, 11, 13]), st.data())
def test_weil_from_traces_round_trip(p, data):
    bound = 2 * p  # |a| <= 2 p^{w/2} with w = 2
    angles = [data.draw(st.integers(-bound, bound)) for _ in range(3)]
    coeffs = _weil_poly(p, 2, angles)
    s = power_sums(coeffs, 3)
    T = TraceData(p, ((1, s[0]), (2, s[1]), (3, s[2])), "transcendental-K3")
    E = weil_from_traces(T)
    assert E.coeffs == EulerFactor(p, 2, coeffs).coeffs


def test_weil_from_traces_rejects_nonsense():
    with pytest.raises(WeilBoundError):
        TraceData(5, ((1, 1000),), "curve-H1")
    with pytest.raises(WeilBoundError):
        weil_from_traces(TraceData(5, ((1, 1), (2, 0), (3, 0)), "curve-H1"), 6, 1, 1)


def test_exterior_square_against_numeric_roots():
    E = curve_euler_factor(load_curve(1), 17)
    W = exterior_square(E)
    assert W.degree == 15 and W.weight == 2
    with mpmath.workdps(60):
        roots = E.reciprocal_roots(60)
        poly = [mpmath.mpc(1)]
        for a, b in itertools.combinations(roots, 2):
            nxt = poly + [mpmath.mpc(0)]
            for k in range(len(poly)):
                nxt[k + 1] -= a * b * poly[k]
            poly = nxt
        assert all(abs(u - v) < mpmath.mpf(10) ** -30 for u, v in zip(poly, W.coeffs))
    assert W.check_weil()


@given(st.lists(st.integers(-6, 6), min_size=2, max_size=4))
def test_exterior_square_of_split_product(roots):
    coeffs = (1,)
    for a in roots:
        coeffs = poly_mul(coeffs, (1, -a))
    expect = (1,)
    for a, b in itertools.combinations(roots, 2):
        expect = poly_mul(expect, (1, -a * b))
    assert exterior_square_poly(coeffs) == expect


def test_algebraic_part_factor():
    assert algebraic_part_factor([(1, 1)] * 3, 5).coeffs == (1, -15, 75, -125)
    assert algebraic_part_factor([(1, 3)], 5).coeffs == (1, 0, 0, -125)
    with pytest.raises(ValueError):
        algebraic_part_factor([(3, 1)], 3)


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=5),
       st.lists(st.integers(-9, 9), min_size=0, max_size=4))
def test_divexact_inverts_multiplication(a, b):
    b = [1] + b
    prod = poly_mul(a, b)
    q = poly_divexact(prod, b)
    trimmed = list(a)
    while len(trimmed) > 1 and trimmed[-1] == 0:
        trimmed.pop()
    assert q is not None and list(q)[:len(trimmed)] == trimmed and not any(q[len(trimmed):])


def test_divexact_reports_inexact():
    assert poly_divexact((1, 1), (1, 2)) is None
