"""Exact sparse multilinear-friendly polynomials over the rationals.

Coefficients are Python ints or `fractions.Fraction` (exact in both cases;
int is kept where possible because the constructions here are integral).
A monomial is a tuple of (variable-id, exponent) pairs with strictly
increasing variable ids and positive exponents; the empty tuple is the
constant monomial.
"""

from __future__ import annotations

from fractions import Fraction


def normalize_monomial(pairs):
    """Canonical monomial key from (var, exp) pairs; merges repeats, drops exp 0."""
    acc = {}
    for var, exp in pairs:
        if exp:
            acc[int(var)] = acc.get(int(var), 0) + int(exp)
    for exp in acc.values():
        if exp < 0:
            raise ValueError("negative exponent")
    return tuple(sorted((v, e) for v, e in acc.items() if e))


def monomial_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    acc = dict(m1)
    for var, exp in m2:
        acc[var] = acc.get(var, 0) + exp
    return tuple(sorted(acc.items()))


def coeff_str(c):
    """Serialize an exact coefficient as 'p/q'."""
    f = Fraction(c)
    return f"{f.numerator}/{f.denominator}"


def coeff_from_str(s):
    f = Fraction(s)
    return f.numerator if f.denominator == 1 else f


class SparsePoly:
    """Exact sparse polynomial: dict monomial -> nonzero rational coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms=None, _trusted=False):
        if terms is None:
            self.terms = {}
        elif _trusted:
            self.terms = terms
        else:
            self.terms = {}
            for mono, c in terms.items():
                if c:
                    key = normalize_monomial(mono)
                    c0 = self.terms.get(key, 0) + c
                    if c0:
                        self.terms[key] = c0
                    elif key in self.terms:
                        del self.terms[key]

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def const(cls, c):
        return cls({(): c} if c else {}, _trusted=True)

    @classmethod
    def variable(cls, var):
        return cls({((int(var), 1),): 1}, _trusted=True)

    @classmethod
    def monomial(cls, pairs, coeff=1):
        if not coeff:
            return cls()
        return cls({normalize_monomial(pairs): coeff}, _trusted=True)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            c0 = out.get(mono, 0) + c
            if c0:
                out[mono] = c0
            elif mono in out:
                del out[mono]
        return SparsePoly(out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly({m: -c for m, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            if not other:
                return SparsePoly()
            return SparsePoly({m: c * other for m, c in self.terms.items()}, _trusted=True)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = monomial_mul(m1, m2)
                c0 = out.get(mono, 0) + c1 * c2
                if c0:
                    out[mono] = c0
                elif mono in out:
                    del out[mono]
        return SparsePoly(out, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power")
        result = SparsePoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def evaluate(self, assignment):
        """Exact value at a point; `assignment` maps var-id -> int/Fraction."""
        total = 0
        for mono, c in self.terms.items():
            val = c
            for var, exp in mono:
                val = val * assignment[var] ** exp
            total = total + val
        return total

    def variables(self):
        out = set()
        for mono in self.terms:
            for var, _ in mono:
                out.add(var)
        return out

    def total_degree(self):
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def monotone(self):
        """True iff every stored coefficient is nonnegative."""
        return all(c >= 0 for c in self.terms.values())

    def support(self):
        """The set of monomials with nonzero coefficient."""
        return set(self.terms)

    def num_terms(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "SparsePoly(0)"
        bits = []
        for mono, c in sorted(self.terms.items()):
            factors = [f"x{v}" + (f"^{e}" if e > 1 else "") for v, e in mono]
            bits.append(f"{c}*" + "*".join(factors) if factors else str(c))
        return "SparsePoly(" + " + ".join(bits) + ")"

    def to_json(self, nvars=None):
        if nvars is None:
            nvars = max(self.variables(), default=-1) + 1
        terms = [
            {"m": [[v, e] for v, e in mono], "c": coeff_str(c)}
            for mono, c in sorted(self.terms.items())
        ]
        return {"vars": nvars, "terms": terms}

    @classmethod
    def from_json(cls, obj):
        terms = {}
        for t in obj["terms"]:
            mono = normalize_monomial((v, e) for v, e in t["m"])
            c = coeff_from_str(t["c"])
            if c:
                terms[mono] = terms.get(mono, 0) + c
        return cls({m: c for m, c in terms.items() if c}, _trusted=True)


def poly_equal(p, q):
    """True iff the canonical term maps coincide."""
    return p.terms == q.terms


class VarPartition:
    """Disjoint variable blocks covering a declared variable universe."""

    def __init__(self, blocks):
        self.blocks = [frozenset(b) for b in blocks]
        seen = set()
        for b in self.blocks:
            if seen & b:
                raise ValueError("partition blocks overlap")
            seen |= b
        self.universe = frozenset(seen)

    def __len__(self):
        return len(self.blocks)

    def block_of(self):
        """Map var-id -> block index."""
        out = {}
        for i, b in enumerate(self.blocks):
            for v in b:
                out[v] = i
        return out


def is_set_multilinear(p, part):
    """Every monomial picks exactly one variable, with exponent 1, from every block."""
    if not p.variables() <= part.universe:
        raise ValueError("polynomial variables escape the partition universe")
    owner = part.block_of()
    nblocks = len(part)
    for mono in p.terms:
        hit = [0] * nblocks
        ok = True
        for var, exp in mono:
            if exp != 1:
                ok = False
                break
            hit[owner[var]] += 1
        if not ok or any(h != 1 for h in hit):
            return False
    return True
