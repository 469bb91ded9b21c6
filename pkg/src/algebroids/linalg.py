"""Exact Gaussian elimination over any field-like scalar type.

Entries only need +, -, *, / and truthiness (nonzero test); both
Fraction and ScalarField qualify.
"""

from __future__ import annotations


def solve_linear(rows: list, rhs: list, zero):
    """One particular solution of rows*v = rhs with free slots at zero.

    Returns a list, or None when the system is inconsistent.
    """
    if len(rows) != len(rhs):
        raise ValueError("shape mismatch")
    width = len(rows[0]) if rows else 0
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(width):
        pivot = None
        for k in range(r, len(aug)):
            if aug[k][col]:
                pivot = k
                break
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        head = aug[r][col]
        aug[r] = [v / head for v in aug[r]]
        for k in range(len(aug)):
            if k != r and aug[k][col]:
                factor = aug[k][col]
                aug[k] = [v - factor * w for v, w in zip(aug[k], aug[r])]
        pivots.append(col)
        r += 1
        if r == len(aug):
            break
    for k in range(r, len(aug)):
        if aug[k][width]:
            return None
    solution = [zero] * width
    for row_i, col in enumerate(pivots):
        solution[col] = aug[row_i][width]
    return solution


def invert_matrix(M: list, zero, one):
    """Inverse of a square matrix, or None when singular."""
    n = len(M)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        pivot = None
        for k in range(col, n):
            if aug[k][col]:
                pivot = k
                break
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        head = aug[col][col]
        aug[col] = [v / head for v in aug[col]]
        for k in range(n):
            if k != col and aug[k][col]:
                factor = aug[k][col]
                aug[k] = [v - factor * w for v, w in zip(aug[k], aug[col])]
    return [row[n:] for row in aug]


def matrix_rank(M: list) -> int:
    """Rank over the fraction field of the entries."""
    rows = [list(r) for r in M]
    if not rows:
        return 0
    width = len(rows[0])
    rank = 0
    for col in range(width):
        pivot = None
        for k in range(rank, len(rows)):
            if rows[k][col]:
                pivot = k
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        head = rows[rank][col]
        rows[rank] = [v / head for v in rows[rank]]
        for k in range(len(rows)):
            if k != rank and rows[k][col]:
                factor = rows[k][col]
                rows[k] = [v - factor * w for v, w in zip(rows[k], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank
