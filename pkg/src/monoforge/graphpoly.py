"""Graph polynomials, their depth-3 circuits, and the rectangle verifiers.

For a graph G on n vertices and a divisor k of n, the degree-k polynomial
Q_{k,G} lives on variables x_{i,a} indexed by a block i in [k] and a bit
pattern a in {0,1}^(n/k); the coefficient of the selector monomial of a
full assignment a in {0,1}^n is (e(G[supp(a)]) - 1)^2. P_G is Q_{n,G}.

Variable encoding: block i with pattern a (an int whose bit j is the bit
of vertex i*(n/k)+j) gets id i * 2^(n/k) + a. For k = n this is 2i + a_i,
which is the 2n-variable encoding of P_G.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuits import CircuitBuilder
from .errors import EnumerationTooLarge, NotADivisor, NotInducedMatching, VariableUniverseMismatch
from .graphs import is_induced_matching
from .poly import SparsePoly, VarPartition
from .seeding import stream_rng

ENUM_GUARD = 22


def q_var(i, pattern, block_bits):
    return i * (1 << block_bits) + pattern


def q_partition(n, k):
    """The k-block variable partition of the Q_{k,G} variable set."""
    b = n // k
    size = 1 << b
    return VarPartition([range(i * size, (i + 1) * size) for i in range(k)])


def _check_divisor(n, k):
    if k < 1 or n % k:
        raise NotADivisor(f"k={k} does not divide n={n}")


def build_Q(g, k):
    """Exact Q_{k,G} by brute-force summation over all 2^n assignments."""
    n = g.n
    _check_divisor(n, k)
    if n > ENUM_GUARD:
        raise EnumerationTooLarge(f"n={n} exceeds the 2^{ENUM_GUARD} guard")
    b = n // k
    pat_mask = (1 << b) - 1
    edges = g.edges
    terms = {}
    for mask in range(1 << n):
        cnt = 0
        for u, v in edges:
            if (mask >> u) & (mask >> v) & 1:
                cnt += 1
        c = (cnt - 1) * (cnt - 1)
        if c:
            mono = tuple(
                (q_var(i, (mask >> (i * b)) & pat_mask, b), 1) for i in range(k)
            )
            terms[mono] = c
    return SparsePoly(terms, _trusted=True)


def build_P(g):
    return build_Q(g, g.n)


def substitute_Q_to_P(q, n, k):
    """Apply x_{i,a} <- prod_j x_{(i*(n/k)+j, a_j)} turning Q_{k,G} into P_G."""
    _check_divisor(n, k)
    b = n // k
    size = 1 << b
    limit = k * size
    out = {}
    for mono, c in q.terms.items():
        exps = {}
        for var, e in mono:
            if not 0 <= var < limit:
                raise VariableUniverseMismatch(
                    f"variable {var} outside the Q_{{{k},G}} universe of size {limit}"
                )
            i, pattern = divmod(var, size)
            for j in range(b):
                pvar = 2 * (i * b + j) + ((pattern >> j) & 1)
                exps[pvar] = exps.get(pvar, 0) + e
        key = tuple(sorted(exps.items()))
        c0 = out.get(key, 0) + c
        if c0:
            out[key] = c0
        elif key in out:
            del out[key]
    return SparsePoly(out, _trusted=True)


def build_sps_circuit(g, k):
    """Depth-3 circuit for Q_{k,G} via the decomposition Q2 - 2*Q1 + Q0.

    Each product term handles a vertex set W (the union of one or two
    edges): per block, an inner sum gate adds the variables whose pattern
    turns on every W-vertex of that block, and the per-block sums are
    multiplied. Q1 terms carry a -2 constant leaf on their product gate.
    """
    n = g.n
    _check_divisor(n, k)
    b = n // k
    pat_mask = (1 << b) - 1
    builder = CircuitBuilder()

    def block_sum(i, required):
        vs = [
            builder.var(q_var(i, a, b))
            for a in range(1 << b)
            if a & required == required
        ]
        return builder.add(vs)

    def product_for(wset, extra=None):
        required = [0] * k
        for w in wset:
            required[w // b] |= 1 << (w % b)
        children = [] if extra is None else [extra]
        children.extend(block_sum(i, required[i] & pat_mask) for i in range(k))
        return builder.mul(children)

    tops = []
    for e1 in g.edges:
        for e2 in g.edges:
            tops.append(product_for(set(e1) | set(e2)))
    minus_two = builder.const(-2) if g.edges else None
    for e in g.edges:
        tops.append(product_for(set(e), extra=minus_two))
    tops.append(product_for(set()))
    return builder.build(builder.add(tops))


def f_G_eval(g, a):
    """1 iff the subgraph induced on supp(a) has edge count different from 1."""
    if len(a) != g.n:
        raise ValueError("assignment length mismatch")
    cnt = sum(1 for u, v in g.edges if a[u] and a[v])
    return 1 if cnt != 1 else 0


def udisj_ne1(b, c):
    """Different-from-1 disjointness: 1 iff |supp(b) & supp(c)| != 1."""
    if len(b) != len(c):
        raise ValueError("length mismatch")
    inter = sum(1 for x, y in zip(b, c) if x and y)
    return 1 if inter != 1 else 0


PAIR_CHOICES = ((0, 0), (1, 0), (0, 1))


def sample_hard_input(g, matching, seed=None, rng=None):
    """Assignment supported inside an induced matching, one of (0,0),(1,0),(0,1) per edge.

    Every output satisfies e(G[supp(a)]) = 0, hence f_G(a) = 1.
    """
    if not is_induced_matching(g, matching.edges):
        raise NotInducedMatching("matching fails the induced-matching oracle")
    if rng is None:
        rng = stream_rng(seed, "hard-input")
    a = [0] * g.n
    for u, v in matching.edges:
        au, av = PAIR_CHOICES[rng.randrange(3)]
        a[u] = au
        a[v] = av
    return tuple(a)


def assignment_support(p):
    """{Assignment(m) : m in supp(P)} for a P_G-style polynomial on vars 2i+b."""
    out = set()
    for mono in p.terms:
        out.add(frozenset(var // 2 for var, _ in mono if var & 1))
    return out


# ---------------------------------------------------------------------------
# rectangles and balanced-pair decompositions (statement verifiers)


@dataclass(frozen=True)
class Rectangle:
    n: int
    y: frozenset
    z: frozenset
    fam_y: tuple
    fam_z: tuple

    def __post_init__(self):
        ground = set(range(self.n))
        if self.y & self.z or (self.y | self.z) != ground:
            raise ValueError("(Y, Z) must partition the ground set")
        for s in self.fam_y:
            if not s <= self.y:
                raise ValueError("fam_y member escapes Y")
        for s in self.fam_z:
            if not s <= self.z:
                raise ValueError("fam_z member escapes Z")

    def balanced(self):
        """|Y| and |Z| both in [n/3, 2n/3)."""
        ok_y = 3 * len(self.y) >= self.n and 3 * len(self.y) < 2 * self.n
        ok_z = 3 * len(self.z) >= self.n and 3 * len(self.z) < 2 * self.n
        return ok_y and ok_z

    def generated(self):
        return {s | t for s in self.fam_y for t in self.fam_z}

    def to_json(self):
        return {
            "n": self.n,
            "y": sorted(self.y),
            "z": sorted(self.z),
            "fam_y": [sorted(s) for s in self.fam_y],
            "fam_z": [sorted(s) for s in self.fam_z],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            n=obj["n"],
            y=frozenset(obj["y"]),
            z=frozenset(obj["z"]),
            fam_y=tuple(frozenset(s) for s in obj["fam_y"]),
            fam_z=tuple(frozenset(s) for s in obj["fam_z"]),
        )


@dataclass
class CoverVerdict:
    covered: bool
    balanced_all: bool
    witness: frozenset | None


def verify_rectangle_cover(rects, f_ones):
    """Does the union of the rectangles' generated families equal f_ones exactly?"""
    target = {frozenset(s) for s in f_ones}
    union = set()
    for r in rects:
        union |= r.generated()
    diff = union ^ target
    witness = min(diff, key=lambda s: (len(s), sorted(s))) if diff else None
    return CoverVerdict(
        covered=union == target,
        balanced_all=all(r.balanced() for r in rects),
        witness=witness,
    )


def verify_pair_decomposition(p, pairs, part):
    """Check a claimed balanced-monotone-pair decomposition sum(g_i*h_i) = p.

    Returns (ok, diagnostics); diagnostics names the first failed clause.
    """
    universe = part.universe
    nblocks = len(part)
    total = SparsePoly()
    supp = p.support()
    for idx, (gp, hp, (y, z)) in enumerate(pairs):
        y, z = frozenset(y), frozenset(z)
        if y & z or (y | z) != universe:
            return False, f"pair {idx}: partition"
        if not gp.variables() <= y:
            return False, f"pair {idx}: g-variables"
        if not hp.variables() <= z:
            return False, f"pair {idx}: h-variables"
        if not (gp.monotone() and hp.monotone()):
            return False, f"pair {idx}: monotonicity"
        ny = nz = 0
        for block in part.blocks:
            if block <= y:
                ny += 1
            elif block <= z:
                nz += 1
            else:
                return False, f"pair {idx}: refinement"
        if not (3 * ny >= nblocks and 3 * ny < 2 * nblocks
                and 3 * nz >= nblocks and 3 * nz < 2 * nblocks):
            return False, f"pair {idx}: balance"
        prod = gp * hp
        if not prod.support() <= supp:
            return False, f"pair {idx}: support containment"
        total = total + prod
    if total != p:
        return False, "sum"
    return True, None
