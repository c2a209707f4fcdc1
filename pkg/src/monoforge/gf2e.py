"""GF(2^l) arithmetic with bit-encoded elements and basis-expansion maps.

An element is an int whose bit i is the coefficient of alpha^i; the field
is F2[alpha] modulo a fixed irreducible polynomial. The default modulus
for each degree is the least irreducible polynomial in the bit-integer
order, which makes every construction reproducible.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import DivisionByZero
from .gf2 import f2_rank


def poly_mod(a, mod):
    """Remainder of a modulo mod, both carry-less binary polynomials."""
    dm = mod.bit_length()
    while a.bit_length() >= dm:
        a ^= mod << (a.bit_length() - dm)
    return a


def poly_mulmod(a, b, mod):
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
    return poly_mod(out, mod)


def is_irreducible(f):
    """Trial division by every polynomial of degree 1..deg(f)//2."""
    deg = f.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in range(1 << d, 1 << (d + 1)):
            if poly_mod(f, g) == 0:
                return False
    return True


@lru_cache(maxsize=None)
def least_irreducible(l):
    """The smallest (as a bit integer) monic irreducible polynomial of degree l."""
    if not 1 <= l <= 16:
        raise ValueError("extension degree must be in 1..16")
    for f in range(1 << l, 1 << (l + 1)):
        if is_irreducible(f):
            return f
    raise RuntimeError("unreachable: irreducible polynomials exist in every degree")


class GF2eCtx:
    """The field F_{2^l} = F2[alpha]/(modulus)."""

    __slots__ = ("l", "modulus", "q")

    def __init__(self, l, modulus=None):
        if not 1 <= l <= 16:
            raise ValueError("extension degree must be in 1..16")
        self.l = l
        self.modulus = modulus if modulus is not None else least_irreducible(l)
        if self.modulus.bit_length() - 1 != l:
            raise ValueError("modulus degree does not match l")
        if not is_irreducible(self.modulus):
            raise ValueError("modulus is reducible")
        self.q = 1 << l

    def elements(self):
        return range(self.q)

    def add(self, a, b):
        return a ^ b

    def mul(self, a, b):
        return poly_mulmod(a, b, self.modulus)

    def pow(self, a, e):
        e = int(e)
        if e < 0:
            return self.pow(self.inv(a), -e)
        out = 1
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return self.pow(a, self.q - 2)

    def arith(self, op, a, b=None):
        """Dispatch helper: op in {'add','mul','inv','pow'}."""
        if op == "add":
            return self.add(a, b)
        if op == "mul":
            return self.mul(a, b)
        if op == "inv":
            return self.inv(a)
        if op == "pow":
            return self.pow(a, b)
        raise ValueError(f"unknown op {op!r}")

    def __eq__(self, other):
        if isinstance(other, GF2eCtx):
            return (self.l, self.modulus) == (other.l, other.modulus)
        return NotImplemented

    def __repr__(self):
        return f"GF2eCtx(l={self.l}, modulus={bin(self.modulus)})"


class FieldBasis:
    """An F2-basis b_1..b_l of F_{2^l} together with the coordinate map phi."""

    __slots__ = ("ctx", "basis", "_inv_rows")

    def __init__(self, ctx, basis):
        self.ctx = ctx
        self.basis = list(basis)
        l = ctx.l
        if len(self.basis) != l:
            raise ValueError("basis must have l elements")
        if f2_rank(self.basis) != l:
            raise ValueError("basis elements are F2-dependent")
        # Solve B * x = bits(v): row-reduce [B | I] where column j of B is basis[j].
        aug = []
        for i in range(l):
            row = sum(((self.basis[j] >> i) & 1) << j for j in range(l))
            aug.append((row, 1 << i))
        pivots = {}
        reduced = []
        for row, tail in aug:
            for col, idx in pivots.items():
                if (row >> col) & 1:
                    r2, t2 = reduced[idx]
                    row ^= r2
                    tail ^= t2
            col = (row & -row).bit_length() - 1
            for k, (r2, t2) in enumerate(reduced):
                if (r2 >> col) & 1:
                    reduced[k] = (r2 ^ row, t2 ^ tail)
            pivots[col] = len(reduced)
            reduced.append((row, tail))
        self._inv_rows = [0] * l
        for col, idx in pivots.items():
            self._inv_rows[col] = reduced[idx][1]

    @classmethod
    def polynomial(cls, ctx):
        """The basis {1, alpha, ..., alpha^(l-1)}."""
        return cls(ctx, [1 << i for i in range(ctx.l)])

    def phi(self, v):
        """Coordinates of v in this basis, as a list of l bits."""
        return [(self._inv_rows[i] & v).bit_count() & 1 for i in range(self.ctx.l)]

    def unphi(self, bits):
        """Inverse of phi: field element from an l-bit coordinate list."""
        v = 0
        for i, b in enumerate(bits):
            if b:
                v ^= self.basis[i]
        return v


def basis_expand(basis, vec):
    """gamma: concatenate phi(v_i) over the entries of vec; F2-linear, gamma(0)=0."""
    out = []
    for v in vec:
        out.extend(basis.phi(v))
    return out
