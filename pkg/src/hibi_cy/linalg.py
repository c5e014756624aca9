"""Exact linear algebra over the integers and rationals.

Matrices are lists of rows of Python ints (or Fractions where noted).
Forward elimination is fraction-free (Bareiss), so intermediate entries
stay integral and exact.
"""

from fractions import Fraction
from math import gcd


def _copy(rows):
    return [list(r) for r in rows]


def bareiss_echelon(rows):
    """Fraction-free row echelon form.

    Returns ``(echelon, pivots)``. Rows of ``echelon`` past
    ``len(pivots)`` are zero. Entries are integers whenever the input is.
    """
    m = _copy(rows)
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    prev = 1
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        k = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if k is None:
            continue
        if k != r:
            m[r], m[k] = m[k], m[r]
        piv = m[r][c]
        for i in range(r + 1, n_rows):
            mi = m[i]
            f = mi[c]
            mr = m[r]
            for j in range(c, n_cols):
                # exact division is the Bareiss invariant
                val = piv * mi[j] - f * mr[j]
                mi[j] = val // prev if isinstance(val, int) else val / prev
            mi[c] = 0
        # columns left of c are already zero below the pivot row
        prev = piv
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows):
    if not rows:
        return 0
    return len(bareiss_echelon(rows)[1])


def det(rows):
    """Determinant of a square integer matrix via Bareiss elimination."""
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise ValueError("det requires a square matrix")
    m = _copy(rows)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def primitive(vec):
    """Scale a rational vector to coprime integers (sign preserved)."""
    vec = [Fraction(x) for x in vec]
    den = 1
    for x in vec:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    return [x // g for x in ints]


def nullspace(rows, n_cols=None):
    """Basis of the right kernel as primitive integer vectors."""
    if not rows:
        if n_cols is None:
            raise ValueError("n_cols needed for an empty matrix")
        return [[int(i == j) for j in range(n_cols)] for i in range(n_cols)]
    n_cols = len(rows[0])
    ech, pivots = bareiss_echelon(rows)
    ech = [[Fraction(x) for x in row] for row in ech[:len(pivots)]]
    free = [c for c in range(n_cols) if c not in set(pivots)]
    basis = []
    for f in free:
        sol = [Fraction(0)] * n_cols
        sol[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            s = sum(ech[r][j] * sol[j] for j in range(pc + 1, n_cols))
            sol[pc] = -s / ech[r][pc]
        basis.append(primitive(sol))
    return basis


def in_span(vec, generators):
    """True iff ``vec`` is a rational combination of ``generators``."""
    if not any(vec):
        return True
    if not generators:
        return False
    return rank(list(generators) + [list(vec)]) == rank(generators)


def mat_vec(rows, vec):
    return [sum(a * b for a, b in zip(row, vec)) for row in rows]


def solve(rows, rhs):
    """One rational solution of ``rows @ x = rhs`` or None if inconsistent."""
    n_cols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    ech, pivots = bareiss_echelon(aug)
    if n_cols in pivots:
        return None
    ech = [[Fraction(x) for x in row] for row in ech[:len(pivots)]]
    sol = [Fraction(0)] * n_cols
    for r in range(len(pivots) - 1, -1, -1):
        pc = pivots[r]
        s = sum(ech[r][j] * sol[j] for j in range(pc + 1, n_cols))
        sol[pc] = (ech[r][n_cols] - s) / ech[r][pc]
    return sol
