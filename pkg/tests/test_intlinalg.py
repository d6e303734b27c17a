import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form

from k3cm.intlinalg import charpoly, det, hnf, inverse_rational, mat_mul, smith, solve_left


def matrices(max_rows=4, max_cols=4, lo=-12, hi=12):
    return st.integers(1, max_rows).flatmap(lambda m: st.integers(1, max_cols).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


def _diag(D):
    return [D[i][i] for i in range(min(len(D), len(D[0])))]


@given(matrices())
def test_smith_transforms_and_divisibility(A):
    D, U, V, Vi = smith(A, with_inverse=True)
    assert mat_mul(mat_mul(U, A), V) == D
    n = len(V)
    assert mat_mul(V, Vi) == [[int(i == j) for j in range(n)] for i in range(n)]
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    d = _diag(D)
    assert all(v >= 0 for v in d)
    for a, b in zip(d, d[1:]):
        assert (b == 0) if a == 0 else (b % a == 0)
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)


@given(matrices(3, 3))
def test_smith_invariants_match_sympy(A):
    ours = _diag(smith(A)[0])
    ref = _diag(smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ).tolist())
    assert ours == [abs(int(v)) for v in ref]


@given(matrices(4, 3), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_solve_left_finds_preimages(M, c):
    c = c[:len(M)]
    target = [sum(ci * row[j] for ci, row in zip(c, M)) for j in range(len(M[0]))]
    x = solve_left(M, target)
    assert x is not None
    assert [sum(xi * row[j] for xi, row in zip(x, M)) for j in range(len(M[0]))] == target


def test_solve_left_reports_no_solution():
    assert solve_left([[2, 0], [0, 2]], [1, 0]) is None


@given(matrices(4, 4))
def test_det_and_charpoly_match_sympy(A):
    n = min(len(A), len(A[0]))
    A = [row[:n] for row in A[:n]]
    M = sympy.Matrix(A)
    assert det(A) == M.det()
    x = sympy.Symbol("x")
    assert list(charpoly(A)) == list(reversed(M.charpoly(x).all_coeffs()))


@given(matrices(5, 3))
def test_hnf_spans_same_lattice(A):
    H = hnf(A)
    assert all(H[i][j] == 0 for i in range(len(H)) for j in range(i))
    for row in A:
        assert solve_left(H, row) is not None if H else not any(row)
    for row in H:
        assert solve_left(A, row) is not None


def test_inverse_rational():
    A = [[2, 1], [7, 4]]
    assert mat_mul(A, inverse_rational(A)) == [[1, 0], [0, 1]]
