"""Exact rational matrix helpers.

Matrices are tuples of row tuples holding ``int`` or ``Fraction``. Rank and
inversion are delegated to sympy; everything else is plain Python so that
hot loops avoid sympy object overhead.
"""

from fractions import Fraction

import sympy

from .errors import DimensionError, RankError


def as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def normalize(x):
    """Return an ``int`` when the rational is integral."""
    x = as_fraction(x)
    return int(x) if x.denominator == 1 else x


def matrix(rows):
    return tuple(tuple(normalize(x) for x in row) for row in rows)


def shape(m):
    return (len(m), len(m[0]) if m else 0)


def transpose(m, ncols=None):
    if not m:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*m))


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a, b):
    bt = transpose(b)
    return matrix([[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a])


def mat_vec(m, v):
    return tuple(normalize(sum(x * y for x, y in zip(row, v))) for row in m)


def columns(m, idx):
    return tuple(tuple(row[j] for j in idx) for row in m)


def _sym(m):
    if not m or not m[0]:
        return sympy.zeros(len(m), 0)
    return sympy.Matrix([[sympy.Rational(as_fraction(x).numerator, as_fraction(x).denominator)
                          for x in row] for row in m])


def _unsym(sm):
    return tuple(tuple(normalize(as_fraction(sm[i, j])) for j in range(sm.cols))
                 for i in range(sm.rows))


def rank(m):
    if not m or not m[0]:
        return 0
    return _sym(m).rank()


def inverse(m):
    n, c = shape(m)
    if n != c:
        raise DimensionError(f"cannot invert a {n}x{c} matrix")
    if n == 0:
        return ()
    sm = _sym(m)
    if sm.det() == 0:
        raise RankError("matrix is singular")
    return _unsym(sm.inv())


def left_inverse(m):
    """A rational ``L`` with ``L * m = I`` for a full-column-rank ``m``."""
    rows, cols = shape(m)
    if cols == 0:
        return tuple(() for _ in range(0))
    sm = _sym(m)
    if sm.rank() < cols:
        raise RankError(f"matrix of shape {rows}x{cols} is not of full column rank")
    return _unsym((sm.T * sm).inv() * sm.T)


def solve_full_rank(m, lhs_inv, v):
    """Solve ``m x = v`` given a left inverse; None if there is no solution."""
    x = mat_vec(lhs_inv, v)
    if mat_vec(m, x) != tuple(normalize(a) for a in v):
        return None
    return x


def is_skew_symmetric(m):
    n = len(m)
    return all(m[i][j] == -m[j][i] for i in range(n) for j in range(n))


def solve_unique(a, b):
    """Unique solution of ``a x = b`` by fraction Gaussian elimination.

    Returns None when the system is inconsistent or underdetermined.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [[Fraction(x) for x in a[i]] + [Fraction(b[i])] for i in range(rows)]
    piv_cols = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            return None
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    if any(m[i][cols] != 0 for i in range(r, rows)):
        return None
    return tuple(m[i][cols] for i in range(cols))
