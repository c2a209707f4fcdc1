"""Exact rank and determinant over the rationals.

Verdict-grade computations are fraction-free (Bareiss) on integers; rational
inputs are cleared to integers row by row first. A mod-p ladder provides a
fast certificate for *full* rank (full rank mod p implies full rank over Q);
deficiency always falls through to the exact routine.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _to_int_rows(rows):
    """Clear denominators per row; rank/zero-pattern of det are unchanged."""
    out = []
    for row in rows:
        if all(isinstance(x, int) for x in row):
            out.append(list(row))
            continue
        fr = [Fraction(x) for x in row]
        scale = 1
        for x in fr:
            scale = scale * x.denominator // gcd(scale, x.denominator)
        out.append([int(x * scale) for x in fr])
    return out


def int_rank(rows):
    """Rank of an integer matrix by fraction-free Gaussian elimination."""
    mat = [list(r) for r in rows]
    nr = len(mat)
    nc = len(mat[0]) if nr else 0
    rank = 0
    prev = 1
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if mat[i][c]:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        prow = mat[r]
        p = prow[c]
        for i in range(r + 1, nr):
            row = mat[i]
            f = row[c]
            for j in range(c, nc):
                row[j] = (p * row[j] - f * prow[j]) // prev
        prev = p
        rank += 1
        r += 1
        if r == nr:
            break
    return rank


def exact_rank(rows):
    """Rank over Q for int/Fraction entries."""
    return int_rank(_to_int_rows(rows))


def int_det(rows):
    """Determinant of a square integer matrix (Bareiss)."""
    mat = [list(r) for r in rows]
    n = len(mat)
    if any(len(r) != n for r in mat):
        raise ValueError("matrix is not square")
    sign = 1
    prev = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if mat[i][c]:
                piv = i
                break
        if piv is None:
            return 0
        if piv != c:
            mat[c], mat[piv] = mat[piv], mat[c]
            sign = -sign
        prow = mat[c]
        p = prow[c]
        for i in range(c + 1, n):
            row = mat[i]
            f = row[c]
            for j in range(c, n):
                row[j] = (p * row[j] - f * prow[j]) // prev
        prev = p
    return sign * mat[n - 1][n - 1]


def exact_det(rows):
    """Determinant over Q for int/Fraction entries."""
    fr = [[Fraction(x) for x in row] for row in rows]
    scales = []
    ints = []
    for row in fr:
        scale = 1
        for x in row:
            scale = scale * x.denominator // gcd(scale, x.denominator)
        scales.append(scale)
        ints.append([int(x * scale) for x in row])
    d = int_det(ints)
    denom = 1
    for s in scales:
        denom *= s
    val = Fraction(d, denom)
    return val.numerator if val.denominator == 1 else val


def _modp_full_row_rank(rows, nrows, p):
    """True iff the matrix (list of column-lists) has row rank nrows mod p."""
    # rows: list of columns? No -- rows is a list of row-lists.
    mat = [[x % p for x in r] for r in rows]
    nc = len(mat[0]) if mat else 0
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], -1, p)
        prow = [x * inv % p for x in mat[r]]
        mat[r] = prow
        for i in range(r + 1, len(mat)):
            f = mat[i][c]
            if f:
                row = mat[i]
                for j in range(c, nc):
                    row[j] = (row[j] - f * prow[j]) % p
        r += 1
        if r == nrows:
            return True
    return r == nrows


def has_full_row_rank(rows):
    """Exact full-row-rank test with fast mod-p certificates.

    Full rank mod any prime certifies full rank over Q; only matrices
    deficient mod 2, 3 and 5 pay for the exact elimination.
    """
    nrows = len(rows)
    if nrows == 0:
        return True
    ncols = len(rows[0])
    if ncols < nrows:
        return False
    if all(isinstance(x, int) for row in rows for x in row):
        # GF(2) first, on bit-packed columns with early exit.
        pivot = {}
        for j in range(ncols):
            v = 0
            for i in range(nrows):
                if rows[i][j] & 1:
                    v |= 1 << i
            while v:
                low = (v & -v).bit_length() - 1
                if low in pivot:
                    v ^= pivot[low]
                else:
                    pivot[low] = v
                    break
            if len(pivot) == nrows:
                return True
        for p in (3, 5):
            if _modp_full_row_rank(rows, nrows, p):
                return True
        return int_rank(rows) == nrows
    return exact_rank(rows) == nrows
