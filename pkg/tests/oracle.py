"""Independent reference computations in sympy.

Classical cluster variables are computed from the exchange relation as
rational functions and simplified with ``cancel``; nothing here imports
the package's arithmetic.
"""

import sympy as sp


def symbols(n):
    return sp.symbols(f"x1:{n + 1}")


def mutate_matrix(B, k):
    n = len(B)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == k or j == k:
                out[i][j] = -B[i][j]
            else:
                bik, bkj = B[i][k], B[k][j]
                out[i][j] = B[i][j] + (abs(bik) * bkj + bik * abs(bkj)) / 2
    return [[sp.Integer(int(x)) for x in row] for row in out]


def cluster_after(B, word):
    """Cluster variables (sympy expressions in the initial ones) after ``word``."""
    n = len(B)
    xs = list(symbols(n))
    B = [[sp.Integer(int(x)) for x in row] for row in B]
    for k in word:
        plus, minus = sp.Integer(1), sp.Integer(1)
        for i in range(n):
            b = B[i][k]
            if b > 0:
                plus *= xs[i] ** b
            elif b < 0:
                minus *= xs[i] ** (-b)
        xs[k] = sp.cancel((plus + minus) / xs[k])
        B = mutate_matrix(B, k)
    return xs, B


def to_sympy(elem):
    """A classical LaurentElement as a sympy expression."""
    xs = symbols(elem.dim)
    total = sp.Integer(0)
    for e, c in elem.terms().items():
        term = sp.Integer(int(c.at_one()))
        for x, a in zip(xs, e):
            term *= x ** a
        total += term
    return total


def same(expr1, expr2):
    return sp.cancel(expr1 - expr2) == 0


def freeze_reference(terms, m, btilde_cols, F_positions):
    """Keep the terms ``x^e`` with ``e = m + sum n_k col_k`` and ``n_k = 0`` on ``F``.

    ``terms`` maps exponents to coefficients; the linear system is solved by
    sympy for every exponent.
    """
    cols = sp.Matrix(btilde_cols).T
    out = {}
    for e, c in terms.items():
        rhs = sp.Matrix([a - b for a, b in zip(e, m)])
        sol, params = cols.gauss_jordan_solve(rhs)
        if params.shape[0]:
            raise ValueError("the extended exchange matrix must have full rank")
        if any(sol[p] != 0 for p in F_positions):
            continue
        out[e] = c
    return out
