"""Small exact linear algebra over Fraction: RREF, solve, nullspace, rank.

Matrices are lists of rows; every entry is a `fractions.Fraction`.  Sizes
here are tiny (cochain spaces of low-rank algebroids, bounded polynomial
ansatz spaces), so plain Gaussian elimination is the right tool.
"""

from __future__ import annotations

from fractions import Fraction


def rref(matrix):
    """Return (reduced row echelon form, pivot column list)."""
    rows = [list(r) for r in matrix]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if rows[i][c]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank(matrix):
    return len(rref(matrix)[1])


def solve(matrix, rhs):
    """One exact solution x of matrix @ x = rhs, or None if inconsistent.

    Free variables are set to zero.  `matrix` is m x n (list of rows), `rhs`
    has length m.  With m = 0 the system is vacuous and x = 0 is returned.
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    if nrows == 0:
        return [Fraction(0)] * ncols
    aug = [list(row) + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    reduced, pivots = rref(aug)
    if ncols in pivots:
        return None  # pivot in the augmented column: inconsistent
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = reduced[i][ncols]
    return x


def nullspace(matrix):
    """Basis of the kernel of matrix (acting on column vectors)."""
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    if ncols == 0:
        return []
    if nrows == 0:
        return [[Fraction(1) if j == i else Fraction(0) for j in range(ncols)]
                for i in range(ncols)]
    reduced, pivots = rref(matrix)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for i, c in enumerate(pivots):
            vec[c] = -reduced[i][free]
        basis.append(vec)
    return basis


def independent_columns(matrix):
    """Indices of a maximal independent subset of columns, left to right."""
    return rref(matrix)[1]


def transpose(matrix):
    if not matrix:
        return []
    return [list(col) for col in zip(*matrix)]
