"""Dense GF(2) linear algebra on bit-packed rows.

A matrix row is a Python int whose bit j is the entry in column j, so
row operations are single XORs.
"""

from __future__ import annotations


class BitMatrix:
    """Dense GF(2) matrix; rows are bit-packed ints (bit j = column j)."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows, ncols, rows=None):
        if nrows < 0 or ncols < 0:
            raise ValueError("dimensions must be nonnegative")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = list(rows) if rows is not None else [0] * nrows
        if len(self.rows) != nrows:
            raise ValueError("row count mismatch")
        mask = (1 << ncols) - 1
        for r in self.rows:
            if r & ~mask:
                raise ValueError("row has bits beyond ncols")

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_lists(cls, entries):
        nrows = len(entries)
        ncols = len(entries[0]) if entries else 0
        rows = []
        for row in entries:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            rows.append(sum((1 << j) for j, e in enumerate(row) if e & 1))
        return cls(nrows, ncols, rows)

    def get(self, i, j):
        return (self.rows[i] >> j) & 1

    def to_lists(self):
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def column_masks(self):
        """Columns as bit-packed ints (bit i = row i)."""
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            while r:
                low = r & -r
                cols[low.bit_length() - 1] |= 1 << i
                r ^= low
        return cols

    def select_columns(self, cols):
        """Submatrix keeping the given column indices, in the given order."""
        rows = []
        for r in self.rows:
            rows.append(sum(((r >> j) & 1) << t for t, j in enumerate(cols)))
        return BitMatrix(self.nrows, len(cols), rows)

    def transpose(self):
        return BitMatrix(self.ncols, self.nrows, self.column_masks())

    def mul_vec(self, v):
        """Matrix-vector product over GF(2); v is a bit-packed int."""
        out = 0
        for i, r in enumerate(self.rows):
            out |= ((r & v).bit_count() & 1) << i
        return out

    def __eq__(self, other):
        if isinstance(other, BitMatrix):
            return (self.nrows, self.ncols, self.rows) == (other.nrows, other.ncols, other.rows)
        return NotImplemented

    def __repr__(self):
        return f"BitMatrix({self.nrows}x{self.ncols})"

    def to_text(self):
        lines = [f"f2 {self.nrows} {self.ncols}"]
        for r in self.rows:
            lines.append("".join("1" if (r >> j) & 1 else "0" for j in range(self.ncols)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if len(head) != 3 or head[0] != "f2":
            raise ValueError("expected header 'f2 <rows> <cols>'")
        nrows, ncols = int(head[1]), int(head[2])
        if len(lines) != nrows + 1:
            raise ValueError("row count mismatch")
        rows = []
        for ln in lines[1:]:
            ln = ln.strip()
            if len(ln) != ncols or set(ln) - {"0", "1"}:
                raise ValueError("rows must be 0/1 strings of width ncols")
            rows.append(sum((1 << j) for j, ch in enumerate(ln) if ch == "1"))
        return cls(nrows, ncols, rows)


def _basis_insert(pivot, r):
    """Insert r into a lowbit-keyed XOR basis; returns True if independent."""
    while r:
        low = (r & -r).bit_length() - 1
        if low in pivot:
            r ^= pivot[low]
        else:
            pivot[low] = r
            return True
    return False


def f2_rank(rows, ncols=None):
    """Rank of bit-packed rows over GF(2)."""
    pivot = {}
    for r in rows:
        _basis_insert(pivot, r)
    return len(pivot)


def f2_rank_kernel(m):
    """(rank, kernel basis) of a BitMatrix; kernel vectors are bit-packed ints.

    rank + len(kernel) == ncols, and m.mul_vec(w) == 0 for every basis vector w.
    """
    work = list(m.rows)
    ncols = m.ncols
    pivots = {}  # col -> row index in reduced form
    reduced = []
    for r in work:
        for col, idx in pivots.items():
            if (r >> col) & 1:
                r ^= reduced[idx]
        if r:
            col = (r & -r).bit_length() - 1
            # back-eliminate so every pivot column is unique to its row
            for i, rr in enumerate(reduced):
                if (rr >> col) & 1:
                    reduced[i] = rr ^ r
            pivots[col] = len(reduced)
            reduced.append(r)
    rank = len(reduced)
    kernel = []
    free_cols = [j for j in range(ncols) if j not in pivots]
    for j in free_cols:
        w = 1 << j
        for col, idx in pivots.items():
            if (reduced[idx] >> j) & 1:
                w |= 1 << col
        kernel.append(w)
    return rank, kernel


def f2_rank_of_matrix(m):
    return f2_rank(m.rows, m.ncols)


def f2_in_rowspan(rows, vec):
    """True iff vec (bit-packed) lies in the GF(2) span of rows."""
    pivot = {}
    for r in rows:
        _basis_insert(pivot, r)
    r = vec
    while r:
        low = (r & -r).bit_length() - 1
        if low not in pivot:
            return False
        r ^= pivot[low]
    return True
