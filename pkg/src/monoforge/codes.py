"""Reed-Solomon codes over GF(2^l), binary expansion, and exact code statistics.

Distances are certified by full codeword enumeration when the relevant
dimension is at most `ENUM_CAP_LOG2`; dual distances can also be certified
by a meet-in-the-middle search for the smallest dependent column set of the
generator, which is exact whenever it answers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, log2

from .errors import EnumerationTooLarge
from .gf2 import BitMatrix, f2_rank, f2_rank_kernel
from .gf2e import FieldBasis, GF2eCtx, basis_expand

ENUM_CAP_LOG2 = 24
MITM_BUDGET = 2_000_000


@dataclass
class RSCode:
    ctx: GF2eCtx
    n: int  # dimension
    m: int  # length
    points: tuple

    def __post_init__(self):
        self.points = tuple(self.points)
        if len(self.points) != self.m:
            raise ValueError("need m evaluation points")
        if len(set(self.points)) != self.m:
            raise ValueError("evaluation points must be distinct")
        if self.m > self.ctx.q:
            raise ValueError("m exceeds the field size")
        if not 1 <= self.n <= self.m:
            raise ValueError("need 1 <= n <= m")
        for p in self.points:
            if not 0 <= p < self.ctx.q:
                raise ValueError("evaluation point outside the field")


def rs_code(l, n, m, points=None, modulus=None):
    ctx = GF2eCtx(l, modulus)
    return RSCode(ctx, n, m, tuple(points) if points is not None else tuple(range(m)))


def rs_generator(code):
    """Vandermonde generator G[i][j] = points[j]^i (i = 0..n-1), full rank."""
    ctx = code.ctx
    rows = []
    prev = [1] * code.m
    rows.append(list(prev))
    for _ in range(1, code.n):
        prev = [ctx.mul(prev[j], code.points[j]) for j in range(code.m)]
        rows.append(list(prev))
    return rows


def rs_codewords(code):
    """All q^n codewords (messages times the generator), as tuples."""
    ctx = code.ctx
    gen = rs_generator(code)
    if code.n * code.ctx.l > ENUM_CAP_LOG2:
        raise EnumerationTooLarge(f"q^n = 2^{code.n * code.ctx.l} codewords")
    # odometer walk over messages in F_q^n
    msg = [0] * code.n
    total = ctx.q ** code.n
    out = []
    for _ in range(total):
        word = [0] * code.m
        for i, wi in enumerate(msg):
            if wi:
                row = gen[i]
                for j in range(code.m):
                    word[j] ^= ctx.mul(wi, row[j])
        out.append(tuple(word))
        for i in range(code.n):
            msg[i] += 1
            if msg[i] < ctx.q:
                break
            msg[i] = 0
    return out


def rs_distance(code):
    """Exact minimum weight over all nonzero codewords."""
    best = code.m
    for word in rs_codewords(code):
        w = sum(1 for x in word if x)
        if 0 < w < best:
            best = w
    return best


def fq_rank(ctx, rows):
    """Rank over F_q by Gaussian elimination."""
    mat = [list(r) for r in rows]
    nr = len(mat)
    nc = len(mat[0]) if nr else 0
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
        inv = ctx.inv(mat[r][c])
        mat[r] = [ctx.mul(inv, x) for x in mat[r]]
        for i in range(nr):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [ctx.add(x, ctx.mul(f, y)) for x, y in zip(mat[i], mat[r])]
        r += 1
        if r == nr:
            break
    return r


def rs_dual_distance(code):
    """Exact dual distance = size of the smallest dependent column set of G.

    Any rank+1 columns are dependent, so the search over subset sizes
    2..n+1 always terminates with the exact answer.
    """
    gen = rs_generator(code)
    ctx = code.ctx
    cols = [[gen[i][j] for i in range(code.n)] for j in range(code.m)]
    for j in range(code.m):
        if all(x == 0 for x in cols[j]):
            return 1
    for size in range(2, code.n + 2):
        for idx in combinations(range(code.m), size):
            sub = [[cols[j][i] for j in idx] for i in range(code.n)]
            if fq_rank(ctx, sub) < size:
                return size
    raise AssertionError("unreachable: n+1 columns are always dependent")


@dataclass
class LinearCodeF2:
    """Binary linear code presented by a full-row-rank generator matrix."""

    gen: BitMatrix

    def __post_init__(self):
        if f2_rank(self.gen.rows) != self.gen.nrows:
            raise ValueError("generator must have full row rank")

    @property
    def dim(self):
        return self.gen.nrows

    @property
    def length(self):
        return self.gen.ncols


def binary_expand_code(code, basis=None):
    """Binary code generated by the rows gamma(b_j * g_i), ordered i*l + j.

    The resulting ln x lm matrix generates the gamma-image of the
    F_q-code, so both distances sit inside the [d, l*d] sandwich of the
    source code's distances.
    """
    ctx = code.ctx
    if basis is None:
        basis = FieldBasis.polynomial(ctx)
    gen = rs_generator(code)
    l = ctx.l
    rows = []
    for i in range(code.n):
        g_i = gen[i]
        for j in range(l):
            scaled = [ctx.mul(basis.basis[j], x) for x in g_i]
            bits = basis_expand(basis, scaled)
            rows.append(sum((1 << t) for t, bit in enumerate(bits) if bit))
    return LinearCodeF2(BitMatrix(code.n * l, code.m * l, rows))


def _min_weight_by_enumeration(rows, length):
    """Exact min weight of the span of the rows (Gray-code walk).

    The zero code has no nonzero words; by convention this returns length+1.
    """
    k = len(rows)
    if k > ENUM_CAP_LOG2:
        raise EnumerationTooLarge(f"2^{k} codewords")
    best = length + 1
    word = 0
    prev_gray = 0
    for idx in range(1, 1 << k):
        gray = idx ^ (idx >> 1)
        word ^= rows[(gray ^ prev_gray).bit_length() - 1]
        prev_gray = gray
        w = word.bit_count()
        if 0 < w < best:
            best = w
    return best


def min_dependent_columns(cols, max_size, budget=MITM_BUDGET):
    """Smallest set of distinct columns XOR-ing to zero, or None if > max_size.

    Meet-in-the-middle over subset halves; exact for every size it covers
    because sizes are scanned in increasing order.
    """
    m = len(cols)
    for j, c in enumerate(cols):
        if c == 0:
            return (1, (j,))
    for size in range(2, max_size + 1):
        s1 = size // 2
        s2 = size - s1
        if comb(m, s1) + comb(m, s2) > budget:
            return None
        table = {}
        for idx in combinations(range(m), s1):
            x = 0
            for j in idx:
                x ^= cols[j]
            table.setdefault(x, []).append(idx)
        for idx in combinations(range(m), s2):
            x = 0
            for j in idx:
                x ^= cols[j]
            for other in table.get(x, ()):
                if not set(other) & set(idx):
                    return (size, tuple(sorted(other + idx)))
    return None


@dataclass
class CodeStats:
    distance: int
    dual_distance: int
    delta: Fraction  # 1 - distance/length
    distance_exact: bool
    dual_exact: bool
    length: int
    dim: int

    def well_behaved(self, d, t):
        return self.distance > d and self.dual_distance > t

    def to_json(self):
        return {
            "length": self.length,
            "dim": self.dim,
            "distance": self.distance,
            "distance_exact": self.distance_exact,
            "dual_distance": self.dual_distance,
            "dual_exact": self.dual_exact,
            "delta": f"{self.delta.numerator}/{self.delta.denominator}",
        }

    def csv_row(self):
        return (
            f"{self.length},{self.dim},{self.distance},{int(self.distance_exact)},"
            f"{self.dual_distance},{int(self.dual_exact)},"
            f"{self.delta.numerator}/{self.delta.denominator}"
        )


def _sampled_min_weight(rows, length, trials, seed):
    """Randomized low-weight search; the result only upper-bounds the distance."""
    from .seeding import stream_rng

    rng = stream_rng(seed, "min-weight-sampling")
    k = len(rows)
    best = length + 1
    for _ in range(trials):
        word = 0
        picked = rng.getrandbits(k)
        j = picked
        while j:
            low = (j & -j).bit_length() - 1
            word ^= rows[low]
            j ^= j & -j
        w = word.bit_count()
        if 0 < w < best:
            best = w
    return best


def code_stats(c, enum_cap_log2=ENUM_CAP_LOG2, sample_trials=20000, seed=0):
    """Distance / dual distance / delta of a binary linear code.

    Exact by enumeration within the 2^cap budget; otherwise the dual side
    first tries the exact dependent-column search, and any remaining gap is
    filled by sampling (flagged non-exact).
    """
    r = c.dim
    s = c.length
    if r <= enum_cap_log2:
        distance = _min_weight_by_enumeration(c.gen.rows, s)
        distance_exact = True
    else:
        distance = _sampled_min_weight(c.gen.rows, s, sample_trials, seed)
        distance_exact = False
    kdim = s - r
    if kdim <= enum_cap_log2:
        _, kernel = f2_rank_kernel(c.gen)
        dual_distance = _min_weight_by_enumeration(kernel, s)
        dual_exact = True
    else:
        found = min_dependent_columns(c.gen.column_masks(), max_size=r + 1)
        if found is not None:
            dual_distance = found[0]
            dual_exact = True
        else:
            _, kernel = f2_rank_kernel(c.gen)
            dual_distance = _sampled_min_weight(kernel, s, sample_trials, seed)
            dual_exact = False
    return CodeStats(
        distance=distance,
        dual_distance=dual_distance,
        delta=Fraction(s - distance, s),
        distance_exact=distance_exact,
        dual_exact=dual_exact,
        length=s,
        dim=r,
    )


def codewords_f2(c):
    """All 2^dim codewords as bit-packed ints (enumeration-capped)."""
    if c.dim > ENUM_CAP_LOG2:
        raise EnumerationTooLarge(f"2^{c.dim} codewords")
    words = [0] * (1 << c.dim)
    word = 0
    prev_gray = 0
    for idx in range(1, 1 << c.dim):
        gray = idx ^ (idx >> 1)
        word ^= c.gen.rows[(gray ^ prev_gray).bit_length() - 1]
        prev_gray = gray
        words[gray] = word
    return words


def check_t_wise_independence(c, t, witness=False):
    """Exhaustive test: every <= t coordinates of a uniform codeword are uniform.

    Returns True/False, or (bool, violating (coords, pattern)) with witness=True.
    """
    words = codewords_f2(c)
    total = len(words)
    for size in range(1, t + 1):
        expected, rem = divmod(total, 1 << size)
        if rem:
            if witness:
                return False, (tuple(range(size)), None)
            return False
        for coords in combinations(range(c.length), size):
            counts = {}
            for w in words:
                pat = 0
                for pos, j in enumerate(coords):
                    pat |= ((w >> j) & 1) << pos
                counts[pat] = counts.get(pat, 0) + 1
            for pat in range(1 << size):
                if counts.get(pat, 0) != expected:
                    if witness:
                        return False, (coords, pat)
                    return False
    if witness:
        return True, None
    return True


@dataclass
class Thm43Bound:
    value: float
    applies: bool  # the 2n < d hypothesis
    n: int
    m: int
    d: int
    t: int
    b: float


def thm43_bound(n, m, d, t, b=10.0):
    """(d / (n sqrt(t)))^(sqrt(t) / (b log2 m)) with the Omega-constant set to 1."""
    base = d / (n * t ** 0.5)
    exponent = t ** 0.5 / (b * log2(m))
    return Thm43Bound(
        value=base ** exponent,
        applies=2 * n < d,
        n=n,
        m=m,
        d=d,
        t=t,
        b=b,
    )


def code_to_json(code, binary):
    return {
        "l": code.ctx.l,
        "n": code.n,
        "m": code.m,
        "modulus": code.ctx.modulus,
        "points": list(code.points),
        "generator_f2": binary.gen.to_text(),
    }
