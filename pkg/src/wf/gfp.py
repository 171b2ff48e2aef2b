"""Dense deterministic linear algebra over the prime field F_p.

The systems coming out of the lift and coboundary solvers are a few
hundred unknowns at most, so plain row reduction is enough.  Pivot
choice is fixed (first row with a nonzero entry, columns in order) and
free variables are set to zero, making every solution reproducible.
"""

from __future__ import annotations


def rref(p, rows, ncols):
    """Reduced row echelon form in place; returns the pivot column list."""
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for rr in range(r, len(rows)):
            if rows[rr][c] % p:
                piv = rr
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c] % p, -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        lead = rows[r]
        for rr in range(len(rows)):
            if rr != r and rows[rr][c] % p:
                f = rows[rr][c] % p
                row = rows[rr]
                rows[rr] = [(a - f * b) % p for a, b in zip(row, lead)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def solve(p, rows, rhs, ncols):
    """One solution of rows * x = rhs, or None; free variables are zero."""
    aug = [[x % p for x in row] + [b % p] for row, b in zip(rows, rhs)]
    pivots = rref(p, aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None  # a pivot in the rhs column: inconsistent
    x = [0] * ncols
    for r, c in enumerate(pivots):
        x[c] = aug[r][ncols]
    return x


def kernel_basis(p, rows, ncols):
    """Deterministic basis of the solution space of rows * x = 0."""
    mat = [[x % p for x in row] for row in rows]
    pivots = rref(p, mat, ncols)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for r, c in enumerate(pivots):
            vec[c] = (-mat[r][fc]) % p
        basis.append(vec)
    return basis
