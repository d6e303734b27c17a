"""Exact integer linear algebra: Hermite and Smith normal forms, determinants,
characteristic polynomials.

Matrices are plain lists of lists of Python ints; nothing here touches floats.
"""

from fractions import Fraction


def _copy(A):
    return [list(map(int, row)) for row in A]


def hnf(rows):
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows ``H`` with ``H[i]`` having leading entry in
    column ``piv_i`` (strictly increasing), positive pivots, and the entries
    above each pivot reduced into ``[0, pivot)``.  For a full-rank square
    lattice the result is upper triangular.
    """
    A = [r for r in _copy(rows) if any(r)]
    if not A:
        return []
    ncols = len(A[0])
    H = []
    col = 0
    while A and col < ncols:
        nz = [r for r in A if r[col] != 0]
        if not nz:
            col += 1
            continue
        zero = [r for r in A if r[col] == 0]
        # gcd-reduce the column by repeated Euclid on the smallest entry
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // piv[col]
                r2 = [a - q * b for a, b in zip(r, piv)]
                if r2[col] != 0:
                    rest.append(r2)
                elif any(r2):
                    zero.append(r2)
            nz = [piv] + rest
        piv = nz[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        H.append(piv)
        A = zero
        col += 1
    # reduce entries above pivots
    for i in range(len(H)):
        pc = next(j for j, a in enumerate(H[i]) if a)
        for k in range(i):
            q = H[k][pc] // H[i][pc]
            if q:
                H[k] = [a - q * b for a, b in zip(H[k], H[i])]
    return H


def hnf_square(rows, n):
    """HNF of a full-rank lattice in Z^n; raises if the rank is deficient."""
    H = hnf(rows)
    if len(H) != n or any(H[i][i] == 0 for i in range(n)):
        raise ValueError("lattice is not of full rank")
    return H


def det(A):
    """Determinant by fraction-free Bareiss elimination."""
    M = _copy(A)
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def mat_mul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def charpoly(A):
    """Characteristic polynomial det(xI - A), low degree first, monic.

    Faddeev--LeVerrier; every division is exact for integer input.
    """
    n = len(A)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    M = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        AM = mat_mul(A, M)
        c_prev = coeffs[n - k + 1]
        M = [[AM[i][j] + (c_prev if i == j else 0) for j in range(n)] for i in range(n)]
        AMk = mat_mul(A, M)
        tr = sum(AMk[i][i] for i in range(n))
        if tr % k:
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        coeffs[n - k] = -tr // k
    return coeffs


def solve_rational(A, b):
    """Solve A x = b over Q for square nonsingular A (rows of A are equations)."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bv)] for row, bv in zip(A, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [M[i][n] for i in range(n)]


def inverse_rational(A):
    n = len(A)
    cols = [solve_rational(A, [int(i == j) for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def smith(A, with_inverse=False):
    """Smith normal form with transforms.

    Returns ``(D, U, V)`` with ``U * A * V == D`` diagonal, ``U`` and ``V``
    unimodular and ``D[i][i]`` dividing ``D[i+1][i+1]`` (all nonnegative).
    With ``with_inverse`` the exact inverse of ``V`` is appended.
    """
    D = _copy(A)
    m = len(D)
    n = len(D[0]) if m else 0
    U = identity(m)
    V = identity(n)
    Vi = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):  # row_dst -= q row_src
        D[dst] = [a - q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q col_src
        for row in D:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]
        Vi[src] = [a + q * b for a, b in zip(Vi[src], Vi[dst])]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not entries:
                return (D, U, V, Vi) if with_inverse else (D, U, V)
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            done = True
            for i in range(t + 1, m):
                q = D[i][t] // D[t][t]
                if q:
                    add_row(i, t, q)
                if D[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = D[t][j] // D[t][t]
                if q:
                    add_col(j, t, q)
                if D[t][j]:
                    done = False
            if not done:
                continue
            # divisibility condition on the remaining block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            D[t] = [a + b for a, b in zip(D[t], D[bad[0]])]
            U[t] = [a + b for a, b in zip(U[t], U[bad[0]])]
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
    return (D, U, V, Vi) if with_inverse else (D, U, V)


def solve_left(M, target):
    """Integer row vector c with c * M == target, or None if there is none."""
    D, U, V = smith(M)
    m, n = len(M), len(M[0])
    tv = [sum(target[k] * V[k][j] for k in range(n)) for j in range(n)]
    y = [0] * m
    for j in range(n):
        d = D[j][j] if j < m else 0
        if d == 0:
            if tv[j]:
                return None
            continue
        if tv[j] % d:
            return None
        y[j] = tv[j] // d
    return [sum(y[i] * U[i][k] for i in range(m)) for k in range(m)]
