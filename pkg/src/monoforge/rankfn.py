"""Rank functions f_M, their hard input distributions, sparse 0/1 matrices,
and the Cauchy-Binet polynomial identity.

f_M accepts a column subset iff the selected submatrix has full row rank;
rank verdicts are exact (bit-packed GF(2) elimination or fraction-free
integer elimination over Q, with mod-p fast paths that only ever certify
full rank).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .errors import (
    EnumerationTooLarge,
    ParameterDegeneration,
    PreconditionViolated,
    SparsityExceedsRows,
    WeightExceedsLength,
)
from .gf2 import BitMatrix, _basis_insert, f2_rank
from .linalg import exact_det, exact_rank, has_full_row_rank, int_det, int_rank
from .poly import SparsePoly
from .seeding import stream_rng


class RealMatrix01:
    """n x m matrix with 0/1 entries over Q, stored column-wise by support."""

    __slots__ = ("n", "m", "cols_support", "s")

    def __init__(self, n, m, cols_support, s=None):
        self.n = n
        self.m = m
        self.cols_support = tuple(frozenset(c) for c in cols_support)
        if len(self.cols_support) != m:
            raise ValueError("need one support per column")
        for c in self.cols_support:
            if any(not 0 <= i < n for i in c):
                raise ValueError("support index out of range")
        self.s = s
        if s is not None and any(len(c) > s for c in self.cols_support):
            raise ValueError("a column exceeds the recorded sparsity bound")

    def rows(self):
        out = [[0] * self.m for _ in range(self.n)]
        for j, c in enumerate(self.cols_support):
            for i in c:
                out[i][j] = 1
        return out

    def col_masks(self):
        """Columns as bit-packed ints over the rows."""
        return [sum(1 << i for i in c) for c in self.cols_support]

    def select_rows(self, cols):
        """Dense rows of the submatrix on the given column indices."""
        out = [[0] * len(cols) for _ in range(self.n)]
        for t, j in enumerate(cols):
            for i in self.cols_support[j]:
                out[i][t] = 1
        return out

    def to_text(self):
        s = self.s if self.s is not None else max((len(c) for c in self.cols_support), default=0)
        lines = [f"q01 {self.n} {self.m} {s}"]
        for c in self.cols_support:
            lines.append(" ".join(str(i + 1) for i in sorted(c)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = text.splitlines()
        head = lines[0].split()
        if len(head) != 4 or head[0] != "q01":
            raise ValueError("expected header 'q01 <n> <m> <s>'")
        n, m, s = int(head[1]), int(head[2]), int(head[3])
        cols = []
        for ln in lines[1 : m + 1]:
            cols.append(frozenset(int(tok) - 1 for tok in ln.split()))
        return cls(n, m, cols, s=s)

    def __repr__(self):
        return f"RealMatrix01({self.n}x{self.m}, s={self.s})"


def f_M_eval(matrix, x):
    """1 iff the columns selected by supp(x) have full row rank (exact)."""
    if isinstance(matrix, BitMatrix):
        if len(x) != matrix.ncols:
            raise ValueError("input length mismatch")
        cols = matrix.column_masks()
        sel = [cols[j] for j in range(matrix.ncols) if x[j]]
        return 1 if f2_rank(sel) == matrix.nrows else 0
    if isinstance(matrix, RealMatrix01):
        if len(x) != matrix.m:
            raise ValueError("input length mismatch")
        sel = [j for j in range(matrix.m) if x[j]]
        if len(sel) < matrix.n:
            return 0
        return 1 if int_rank(matrix.select_rows(sel)) == matrix.n else 0
    # generic rational matrix as list of rows
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    if len(x) != ncols:
        raise ValueError("input length mismatch")
    sel = [[row[j] for j in range(ncols) if x[j]] for row in matrix]
    if not sel or len(sel[0]) < nrows:
        return 0
    return 1 if exact_rank(sel) == nrows else 0


# ---------------------------------------------------------------------------
# distributions


@dataclass
class DistParams:
    """Parameters of the hard input distributions for f_M."""

    field_tag: str  # "F2" | "Real"
    n: int
    m: int
    d: int | None = None  # code distance parameter (F2 case)
    t: int | None = None  # dual distance parameter (F2 case)
    s: int | None = None  # sparsity (real case)
    k: int | None = None  # overlap parameter (real case)
    weight_override: int | None = None

    def weight(self):
        """D1 Hamming weight: n*ceil(m/d) over F2, 10*n*ceil(log2 n) over R."""
        if self.weight_override is not None:
            return self.weight_override
        if self.field_tag == "F2":
            if self.d is None:
                raise ValueError("F2 weight needs the distance parameter d")
            return self.n * math.ceil(self.m / self.d)
        return 10 * self.n * math.ceil(math.log2(self.n))


def sample_D1(params, seed=None, rng=None):
    """Uniform point of {0,1}^m with Hamming weight exactly W."""
    w = params.weight()
    if w > params.m:
        raise WeightExceedsLength(f"weight {w} exceeds length {params.m}")
    if rng is None:
        rng = stream_rng(seed, "D1")
    a = [0] * params.m
    for j in rng.sample(range(params.m), w):
        a[j] = 1
    return tuple(a)


def sample_D0(matrix, field_tag, seed=None, rng=None):
    """(a, u): a_j = [<M[j], u> = 0]; u uniform in F2^n or {-1,0,1}^n."""
    if rng is None:
        rng = stream_rng(seed, "D0")
    if field_tag == "F2":
        if not isinstance(matrix, BitMatrix):
            raise ValueError("F2 case needs a BitMatrix")
        u = rng.getrandbits(matrix.nrows)
        cols = matrix.column_masks()
        a = tuple(1 - ((c & u).bit_count() & 1) for c in cols)
        return a, u
    if field_tag == "Real":
        if not isinstance(matrix, RealMatrix01):
            raise ValueError("Real case needs a RealMatrix01")
        u = tuple(rng.randrange(3) - 1 for _ in range(matrix.n))
        a = tuple(
            1 if sum(u[i] for i in c) == 0 else 0 for c in matrix.cols_support
        )
        return a, u
    raise ValueError("field_tag must be 'F2' or 'Real'")


def d0_support_f2(matrix):
    """Exact D0 over F2 as {a-mask: probability} by enumerating all u."""
    nr = matrix.nrows
    if nr > 20:
        raise EnumerationTooLarge(f"2^{nr} witnesses")
    cols = matrix.column_masks()
    out = {}
    p = Fraction(1, 1 << nr)
    for u in range(1 << nr):
        mask = 0
        for j, c in enumerate(cols):
            if not (c & u).bit_count() & 1:
                mask |= 1 << j
        out[mask] = out.get(mask, 0) + p
    return out


def d0_support_real(matrix):
    """Exact D0 over R as {a-mask: probability} by enumerating all 3^n u."""
    n = matrix.n
    if n > 12:
        raise EnumerationTooLarge(f"3^{n} witnesses")
    supports = [sorted(c) for c in matrix.cols_support]
    out = {}
    p = Fraction(1, 3 ** n)
    u = [-1] * n
    for _ in range(3 ** n):
        mask = 0
        for j, c in enumerate(supports):
            if sum(u[i] for i in c) == 0:
                mask |= 1 << j
        out[mask] = out.get(mask, 0) + p
        for i in range(n):
            u[i] += 1
            if u[i] < 2:
                break
            u[i] = -1
    return out


def spreadness_exact(m, w, kmax):
    """Exact hypergeometric table: Pr[fixed k-set selected] vs (W/m)^k.

    Returns rows (k, probability, bound, holds); the probability is
    prod_{i<k} (W-i)/(m-i), always at most (W/m)^k.
    """
    if w > m:
        raise WeightExceedsLength(f"W={w} > m={m}")
    if kmax > w:
        raise ValueError("kmax must be at most W")
    rows = []
    prob = Fraction(1)
    bound = Fraction(1)
    ratio = Fraction(w, m) if m else Fraction(0)
    for k in range(kmax + 1):
        if k:
            prob *= Fraction(w - (k - 1), m - (k - 1))
            bound *= ratio
        rows.append((k, prob, bound, prob <= bound))
    return rows


# ---------------------------------------------------------------------------
# sparse matrix sampling


def default_k(m):
    """k = ceil(sqrt(log2 m))."""
    return math.ceil(math.sqrt(math.log2(m)))


def default_s(k):
    """s = 200*k^2."""
    return 200 * k * k


def sample_sparse_matrix(n, s_override=None, seed=None, m=None, rng=None):
    """n x m matrix (m defaults to n^2) with columns uniform on {v: |v| <= s}.

    The default s = 200*k^2 with k = ceil(sqrt(log2 m)) saturates at desk
    scale (s >= n); in that case an explicit s_override is required so the
    degeneration is never silent.
    """
    if m is None:
        m = n * n
    k = default_k(m)
    if s_override is None:
        s = default_s(k)
        if s > n:
            raise ParameterDegeneration(
                f"default s = {s} exceeds n = {n}; pass s_override for desk-scale runs"
            )
    else:
        s = s_override
        if s > n:
            raise SparsityExceedsRows(f"s = {s} > n = {n}")
    if rng is None:
        rng = stream_rng(seed, "sparse-matrix")
    # exactly uniform over the Hamming ball: pick the weight by integer
    # cumulative binomials, then a uniform support of that weight
    cum = []
    total = 0
    for w in range(s + 1):
        total += comb(n, w)
        cum.append(total)
    cols = []
    for _ in range(m):
        r = rng.randrange(total)
        w = next(i for i, c in enumerate(cum) if r < c)
        cols.append(frozenset(rng.sample(range(n), w)))
    return RealMatrix01(n, m, cols, s=s)


# ---------------------------------------------------------------------------
# containment and well-behavedness


@dataclass(frozen=True)
class ContainmentQuery:
    tau: tuple  # distinct column indices
    j: int  # 1-based position within tau
    c: int

    def __post_init__(self):
        if len(set(self.tau)) != len(self.tau):
            raise ValueError("tuple entries must be distinct")
        if not 1 <= self.j <= len(self.tau):
            raise ValueError("j out of range")


def is_c_contained(matrix, query):
    """Does supp(M[tau_j]) share at least c elements with the preceding supports?"""
    tau = query.tau
    before = set()
    for p in range(query.j - 1):
        before |= matrix.cols_support[tau[p]]
    overlap = len(matrix.cols_support[tau[query.j - 1]] & before)
    return overlap >= query.c


def hoeffding_radius(trials, delta=0.05):
    return math.sqrt(math.log(2.0 / delta) / (2.0 * trials))


def wilson_interval(ones, total, z=1.96):
    if total == 0:
        return (0.0, 1.0)
    phat = ones / total
    denom = 1 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class WellBehavedReport:
    n: int
    m: int
    s: int
    k: int
    d1_weight: int
    min_col_support: int
    full_rank_hits: int
    full_rank_trials: int
    full_rank_prob_estimate: Fraction
    ci_low: float
    ci_high: float
    containment_violations: list
    t_range: tuple
    t_advisory_cap: int
    passes: tuple  # (prop1, prop2, prop3)

    def to_json(self):
        est = self.full_rank_prob_estimate
        return {
            "n": self.n,
            "m": self.m,
            "s": self.s,
            "k": self.k,
            "d1_weight": self.d1_weight,
            "min_col_support": self.min_col_support,
            "full_rank_hits": self.full_rank_hits,
            "full_rank_trials": self.full_rank_trials,
            "full_rank_prob_estimate": f"{est.numerator}/{est.denominator}",
            "ci": [round(self.ci_low, 6), round(self.ci_high, 6)],
            "containment_violations": [
                {"t": t, "tau": list(tau)} for t, tau in self.containment_violations
            ],
            "t_range": list(self.t_range),
            "t_advisory_cap": self.t_advisory_cap,
            "passes": list(self.passes),
        }


def _overlap_seeded_pairs(matrix, limit):
    """High-overlap column pairs via a row -> columns inverted index."""
    by_row = [[] for _ in range(matrix.n)]
    for j, c in enumerate(matrix.cols_support):
        for i in c:
            by_row[i].append(j)
    scores = {}
    for cols in by_row:
        if len(cols) > 60:  # cap quadratic blowup on heavy rows
            cols = cols[:60]
        for a in range(len(cols)):
            for b in range(a + 1, len(cols)):
                key = (cols[a], cols[b])
                scores[key] = scores.get(key, 0) + 1
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return [pair for pair, _ in ranked[:limit]]


def check_well_behaved(matrix, k=None, t_max=8, trials=500, seed=0, delta=0.05,
                       d1_weight_override=None):
    """Check the three well-behavedness properties of a sparse 0/1 matrix.

    Property 1 (column weights >= s/2) is exact; property 2 (full-rank
    probability >= 1/10 at the D1 weight) is Monte Carlo with a Hoeffding
    interval; property 3 (containment scarcity) is a one-sided randomized
    search, adversarially seeded with the highest-overlap column pairs --
    "pass" means no violating tuple was found under the budget.

    The default D1 weight 10*n*ceil(log2 n) usually exceeds m at desk
    scale; callers must then pass d1_weight_override (echoed in the report).
    """
    n, m = matrix.n, matrix.m
    s = matrix.s if matrix.s is not None else max(len(c) for c in matrix.cols_support)
    if k is None:
        k = default_k(m)
    min_sup = min(len(c) for c in matrix.cols_support)
    prop1 = 2 * min_sup >= s

    weight = (
        d1_weight_override
        if d1_weight_override is not None
        else 10 * n * math.ceil(math.log2(n))
    )
    if weight > m:
        raise ParameterDegeneration(
            f"D1 weight {weight} exceeds m = {m}; pass d1_weight_override"
        )
    rng = stream_rng(seed, "well-behaved", "rank")
    hits = 0
    for _ in range(trials):
        cols = rng.sample(range(m), weight)
        if has_full_row_rank(matrix.select_rows(cols)):
            hits += 1
    estimate = Fraction(hits, trials)
    rad = hoeffding_radius(trials, delta)
    ci_low = max(0.0, float(estimate) - rad)
    ci_high = min(1.0, float(estimate) + rad)
    prop2 = ci_low >= 0.1

    # property 3: tuples violate if  #{j : tau_j is 10k-contained} >= t/(2k)
    advisory_cap = math.floor(n ** 0.1)
    rng3 = stream_rng(seed, "well-behaved", "containment")
    violations = []
    seeds = _overlap_seeded_pairs(matrix, limit=max(16, trials // 4))
    t_lo, t_hi = 2, max(2, t_max)
    for t in range(t_lo, t_hi + 1):
        candidates = []
        for pair in seeds:
            if t <= m:
                rest = [j for j in rng3.sample(range(m), min(m, t)) if j not in pair]
                tau = tuple(pair) + tuple(rest[: t - 2])
                if len(tau) == t:
                    candidates.append(tau)
        for _ in range(trials):
            candidates.append(tuple(rng3.sample(range(m), t)))
        for tau in candidates:
            contained = 0
            seen = set()
            for j in range(1, t + 1):
                col = matrix.cols_support[tau[j - 1]]
                if len(col & seen) >= 10 * k:
                    contained += 1
                seen |= col
            if 2 * k * contained >= t:
                violations.append((t, tau))
                break
    prop3 = not violations
    return WellBehavedReport(
        n=n,
        m=m,
        s=s,
        k=k,
        d1_weight=weight,
        min_col_support=min_sup,
        full_rank_hits=hits,
        full_rank_trials=trials,
        full_rank_prob_estimate=estimate,
        ci_low=ci_low,
        ci_high=ci_high,
        containment_violations=violations,
        t_range=(t_lo, t_hi),
        t_advisory_cap=advisory_cap,
        passes=(prop1, prop2, prop3),
    )


# ---------------------------------------------------------------------------
# subspace vs Hamming ball


def ball_bound(dim, s):
    return sum(comb(dim, i) for i in range(min(dim, s) + 1))


def count_ball_subspace(basis, n, s, field="F2"):
    """|V intersect {0,1}^n with weight <= s| and the binom(dim, <=s) bound.

    F2 mode enumerates the span (dim <= 20); Q mode enumerates the ball
    (n <= 20) and tests membership by an exact rank comparison.
    """
    if field == "F2":
        pivot = {}
        for v in basis:
            _basis_insert(pivot, v)
        reduced = list(pivot.values())
        dim = len(reduced)
        if dim > 20:
            raise EnumerationTooLarge(f"2^{dim} span vectors")
        count = 0
        word = 0
        prev_gray = 0
        if word.bit_count() <= s:
            count += 1
        for idx in range(1, 1 << dim):
            gray = idx ^ (idx >> 1)
            word ^= reduced[(gray ^ prev_gray).bit_length() - 1]
            prev_gray = gray
            if word.bit_count() <= s:
                count += 1
        bound = ball_bound(dim, s)
        return count, bound, count <= bound
    if field == "Q":
        if n > 20:
            raise EnumerationTooLarge(f"ball enumeration at n={n}")
        rows = [list(map(int, v)) for v in basis]
        dim = int_rank(rows) if rows else 0
        count = 0
        for w in range(min(n, s) + 1):
            for sup in combinations(range(n), w):
                vec = [1 if i in sup else 0 for i in range(n)]
                if int_rank(rows + [vec]) == dim:
                    count += 1
        bound = ball_bound(dim, s)
        return count, bound, count <= bound
    raise ValueError("field must be 'F2' or 'Q'")


# ---------------------------------------------------------------------------
# the Cauchy-Binet polynomial


@dataclass
class CauchyBinetResult:
    p_direct: SparsePoly
    p_det: SparsePoly
    equal: bool
    positivity_ok: bool | None  # P(1_S) > 0 <=> f_M(1_S) = 1, when m <= 14


def _as_rows(matrix):
    if isinstance(matrix, RealMatrix01):
        return matrix.rows(), matrix.n, matrix.m
    rows = [list(r) for r in matrix]
    return rows, len(rows), len(rows[0]) if rows else 0


def _permutations_with_sign(n):
    """(permutation, sign) pairs by recursive insertion."""
    if n == 0:
        return [((), 1)]
    out = []
    for perm, sign in _permutations_with_sign(n - 1):
        for pos in range(n):
            newp = perm[:pos] + (n - 1,) + perm[pos:]
            out.append((newp, sign * (-1) ** (n - 1 - pos)))
    return out


def cauchy_binet_poly(matrix, check_positivity=True):
    """P_direct = sum_S det(M[S])^2 x_S versus the symbolic det(M I_X M^T).

    Exact on Q; guarded to n <= 6, m <= 14 where the permutation expansion
    and the subset enumeration are both enumerable.
    """
    rows, n, m = _as_rows(matrix)
    if n > 6 or m > 14:
        raise EnumerationTooLarge("cauchy_binet_poly guard: n <= 6, m <= 14")

    all_int = all(isinstance(x, int) for row in rows for x in row)
    det_of = int_det if all_int else exact_det
    direct = {}
    for sub in combinations(range(m), n):
        d = det_of([[row[j] for j in sub] for row in rows])
        if d:
            direct[tuple((j, 1) for j in sub)] = d * d
    p_direct = SparsePoly(direct, _trusted=True)

    # entries of B = M I_X M^T: B[i][j] = sum_k M[i][k] M[j][k] x_k
    entry = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sup = []
            for kk in range(m):
                c = rows[i][kk] * rows[j][kk]
                if c:
                    sup.append((kk, c))
            entry[i][j] = sup
    det_terms = {}

    def expand(perm, sign):
        stack = [(0, (), 1)]
        while stack:
            i, key, coeff = stack.pop()
            if i == n:
                exps = {}
                for kk in key:
                    exps[kk] = exps.get(kk, 0) + 1
                mono = tuple(sorted(exps.items()))
                c0 = det_terms.get(mono, 0) + sign * coeff
                if c0:
                    det_terms[mono] = c0
                elif mono in det_terms:
                    del det_terms[mono]
                continue
            for kk, c in entry[i][perm[i]]:
                stack.append((i + 1, key + (kk,), coeff * c))

    for perm, sign in _permutations_with_sign(n):
        expand(perm, sign)
    p_det = SparsePoly(det_terms, _trusted=True)

    equal = p_direct == p_det
    positivity_ok = None
    if check_positivity and m <= 14:
        # subset-sum DP: total coefficient mass of terms inside each S
        size = 1 << m
        dp = [0] * size
        for mono, c in p_direct.terms.items():
            mask = 0
            for var, _ in mono:
                mask |= 1 << var
            dp[mask] += c
        for b in range(m):
            bit = 1 << b
            for x in range(size):
                if x & bit:
                    dp[x] += dp[x ^ bit]
        positivity_ok = True
        for x in range(size):
            bits = tuple((x >> j) & 1 for j in range(m))
            if (dp[x] > 0) != bool(f_M_eval(matrix if isinstance(matrix, RealMatrix01) else rows, bits)):
                positivity_ok = False
                break
    return CauchyBinetResult(p_direct, p_det, equal, positivity_ok)


# ---------------------------------------------------------------------------
# weak independence probe (real D0)


@dataclass
class WeakIndependenceResult:
    k: int
    patterns: dict  # pattern tuple -> (ones, total)
    min_estimate: float | None
    min_wilson_low: float | None
    min_estimate_times_k: float | None


def weak_independence_probe(matrix, query, k=None, trials=2000, seed=0, min_bucket=30):
    """Estimate min over conditioning patterns of Pr[a_{tau_j}=1 | pattern] under real D0.

    Requires tau_j not 10k-contained (the lemma's hypothesis); reports the
    estimate scaled by k for Omega(1/k) inspection.
    """
    if k is None:
        k = default_k(matrix.m)
    if is_c_contained(matrix, ContainmentQuery(query.tau, query.j, 10 * k)):
        raise PreconditionViolated(f"tau_{query.j} is {10 * k}-contained w.r.t. tau")
    rng = stream_rng(seed, "weak-independence")
    tau = query.tau
    j = query.j
    buckets = {}
    for _ in range(trials):
        _, u = sample_D0(matrix, "Real", rng=rng)
        bits = tuple(
            1 if sum(u[i] for i in matrix.cols_support[tau[p]]) == 0 else 0
            for p in range(j - 1)
        )
        target = 1 if sum(u[i] for i in matrix.cols_support[tau[j - 1]]) == 0 else 0
        ones, total = buckets.get(bits, (0, 0))
        buckets[bits] = (ones + target, total + 1)
    min_est = None
    min_low = None
    for ones, total in buckets.values():
        if total < min_bucket:
            continue
        est = ones / total
        low, _ = wilson_interval(ones, total)
        if min_est is None or est < min_est:
            min_est = est
            min_low = low
    return WeakIndependenceResult(
        k=k,
        patterns=buckets,
        min_estimate=min_est,
        min_wilson_low=min_low,
        min_estimate_times_k=None if min_est is None else min_est * k,
    )
