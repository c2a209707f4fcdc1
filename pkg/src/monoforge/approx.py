"""DNF set families, sunflower detection, plucking, and circuit approximation.

A DNF is a family of subsets of [n]: F(x) = OR over members S of AND_{i in S} x_i,
with the empty set denoting the constant-1 term. Probabilities are exact
rationals whenever the distribution supports it (explicit supports, the
uniform cube via bit-parallel indicators, small fixed-weight slices), and
Monte Carlo with confidence intervals otherwise.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, gcd

from .errors import SunflowerNotFound
from .rankfn import wilson_interval
from .seeding import stream_rng

WEIGHT_ENUM_BUDGET = 400_000


# ---------------------------------------------------------------------------
# set families


def canon_key(s):
    return (len(s), tuple(sorted(s)))


class SetFamily:
    """A deduplicated family of subsets of [n], kept in canonical order."""

    __slots__ = ("n", "sets")

    def __init__(self, n, sets):
        self.n = n
        uniq = {frozenset(s) for s in sets}
        for s in uniq:
            if any(not 0 <= i < n for i in s):
                raise ValueError("set element out of range")
        self.sets = tuple(sorted(uniq, key=canon_key))

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __eq__(self, other):
        if isinstance(other, SetFamily):
            return (self.n, self.sets) == (other.n, other.sets)
        return NotImplemented

    def width(self):
        return max((len(s) for s in self.sets), default=0)

    def slice_of(self, size):
        return [s for s in self.sets if len(s) == size]

    def r_small(self, r):
        """At most r^size members of every size 1..n."""
        counts = {}
        for s in self.sets:
            counts[len(s)] = counts.get(len(s), 0) + 1
        for size, cnt in counts.items():
            if size >= 1 and cnt > Fraction(r) ** size:
                return False
        return True

    def term_masks(self):
        return [sum(1 << i for i in s) for s in self.sets]

    def to_json(self):
        return {"n": self.n, "sets": [sorted(s) for s in self.sets]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["n"], [frozenset(s) for s in obj["sets"]])

    def __repr__(self):
        return f"SetFamily(n={self.n}, sets={len(self.sets)}, width={self.width()})"


def dnf_eval(fam, x):
    """OR over members of AND over indices; the empty set is constant 1."""
    for s in fam.sets:
        if all(x[i] for i in s):
            return 1
    return 0


def dnf_eval_mask(term_masks, x_mask):
    for t in term_masks:
        if x_mask & t == t:
            return 1
    return 0


# ---------------------------------------------------------------------------
# bit-parallel indicators over the full cube (truth tables as big ints)


@lru_cache(maxsize=8)
def _var_tables(n):
    """table[i] has bit x set iff (x >> i) & 1, over all 2^n points x."""
    total = 1 << n
    tables = []
    for i in range(n):
        half = 1 << i
        unit = ((1 << half) - 1) << half
        v = unit
        span = 1 << (i + 1)
        while span < total:
            v |= v << span
            span <<= 1
        tables.append(v & ((1 << total) - 1))
    return tables


def dnf_truth_table(n, term_masks):
    """Truth table of the DNF (terms given as bit masks) as a 2^n-bit int."""
    tables = _var_tables(n)
    full = (1 << (1 << n)) - 1
    acc = 0
    for m in term_masks:
        t = full
        while m:
            low = m & -m
            t &= tables[low.bit_length() - 1]
            m ^= low
        acc |= t
        if acc == full:
            break
    return acc


# ---------------------------------------------------------------------------
# distributions


class DistSpec:
    """A distribution over {0,1}^n with exact and sampling interfaces.

    kinds: 'explicit' (mask -> Fraction weights), 'uniform' (the full cube),
    'weightW' (uniform over fixed Hamming weight), 'mix' (half/half of two
    specs), 'sampler' (seeded sampler only, no exact probabilities).
    """

    def __init__(self, n, kind, support=None, weight=None, parts=None,
                 sampler=None, name=None):
        self.n = n
        self.kind = kind
        self.support = support
        self.weight = weight
        self.parts = parts
        self.sampler = sampler
        self.name = name or kind
        self._cum = None
        if kind == "explicit":
            total = sum(support.values())
            if total != 1:
                raise ValueError("explicit weights must sum to 1")

    # -- constructors ------------------------------------------------------

    @classmethod
    def explicit(cls, n, support):
        supp = {int(m): Fraction(w) for m, w in support.items() if w}
        return cls(n, "explicit", support=supp)

    @classmethod
    def uniform(cls, n):
        return cls(n, "uniform")

    @classmethod
    def uniform_weight(cls, n, weight):
        if not 0 <= weight <= n:
            raise ValueError("weight out of range")
        return cls(n, "weightW", weight=weight)

    @classmethod
    def from_sampler(cls, n, sampler, name):
        return cls(n, "sampler", sampler=sampler, name=name)

    @classmethod
    def mix(cls, d0, d1):
        """The half/half mixture (D0 + D1)/2."""
        if d0.n != d1.n:
            raise ValueError("mixing distributions over different cubes")
        return cls(d0.n, "mix", parts=(d0, d1), name=f"mix({d0.name},{d1.name})")

    # -- capabilities ------------------------------------------------------

    def exact_capable(self):
        if self.kind in ("explicit", "uniform"):
            return True
        if self.kind == "weightW":
            return comb(self.n, self.weight) <= WEIGHT_ENUM_BUDGET
        if self.kind == "mix":
            return all(p.exact_capable() for p in self.parts)
        return False

    def _weight_points(self):
        for sup in combinations(range(self.n), self.weight):
            yield sum(1 << i for i in sup)

    # -- exact probabilities ------------------------------------------------

    def term_prob(self, mask):
        """Pr[x covers the term mask] (exact kinds only)."""
        k = mask.bit_count()
        if self.kind == "uniform":
            return Fraction(1, 1 << k)
        if self.kind == "weightW":
            w, n = self.weight, self.n
            if k > w:
                return Fraction(0)
            p = Fraction(1)
            for i in range(k):
                p *= Fraction(w - i, n - i)
            return p
        if self.kind == "explicit":
            return sum(
                (wt for m, wt in self.support.items() if m & mask == mask),
                Fraction(0),
            )
        if self.kind == "mix":
            return (self.parts[0].term_prob(mask) + self.parts[1].term_prob(mask)) / 2
        raise ValueError(f"{self.name}: no exact probabilities")

    def or_prob(self, masks):
        """Pr[x covers at least one of the term masks] (exact kinds only)."""
        masks = list(masks)
        if not masks:
            return Fraction(0)
        if any(m == 0 for m in masks):
            return Fraction(1)
        if self.kind == "uniform":
            table = dnf_truth_table(self.n, masks)
            return Fraction(table.bit_count(), 1 << self.n)
        if self.kind == "explicit":
            total = Fraction(0)
            for pt, wt in self.support.items():
                for m in masks:
                    if pt & m == m:
                        total += wt
                        break
            return total
        if self.kind == "weightW":
            if not self.exact_capable():
                raise ValueError("weight slice too large for exact enumeration")
            hits = 0
            for pt in self._weight_points():
                for m in masks:
                    if pt & m == m:
                        hits += 1
                        break
            return Fraction(hits, comb(self.n, self.weight))
        if self.kind == "mix":
            return (self.parts[0].or_prob(masks) + self.parts[1].or_prob(masks)) / 2
        raise ValueError(f"{self.name}: no exact probabilities")

    def event_prob(self, pred):
        """Pr[pred(x_mask)] for an arbitrary predicate (exact kinds only)."""
        if self.kind == "explicit":
            return sum((wt for m, wt in self.support.items() if pred(m)), Fraction(0))
        if self.kind == "uniform":
            if self.n > 20:
                raise ValueError("uniform event enumeration guard: n <= 20")
            hits = sum(1 for m in range(1 << self.n) if pred(m))
            return Fraction(hits, 1 << self.n)
        if self.kind == "weightW":
            if not self.exact_capable():
                raise ValueError("weight slice too large for exact enumeration")
            hits = sum(1 for m in self._weight_points() if pred(m))
            return Fraction(hits, comb(self.n, self.weight))
        if self.kind == "mix":
            return (self.parts[0].event_prob(pred) + self.parts[1].event_prob(pred)) / 2
        raise ValueError(f"{self.name}: no exact probabilities")

    # -- sampling -----------------------------------------------------------

    def sample(self, rng):
        if self.kind == "uniform":
            return rng.getrandbits(self.n) if self.n else 0
        if self.kind == "weightW":
            mask = 0
            for i in rng.sample(range(self.n), self.weight):
                mask |= 1 << i
            return mask
        if self.kind == "explicit":
            # exact weighted choice over a common denominator
            if self._cum is None:
                denom = 1
                for wt in self.support.values():
                    denom = denom * wt.denominator // gcd(denom, wt.denominator)
                masks = sorted(self.support)
                cum = []
                acc = 0
                for m in masks:
                    acc += int(self.support[m] * denom)
                    cum.append(acc)
                self._cum = (denom, masks, cum)
            denom, masks, cum = self._cum
            ticket = rng.randrange(denom)
            return masks[bisect_right(cum, ticket)]
        if self.kind == "mix":
            return self.parts[rng.randrange(2)].sample(rng)
        if self.kind == "sampler":
            return self.sampler(rng)
        raise ValueError(f"unknown kind {self.kind}")


# ---------------------------------------------------------------------------
# sunflowers


@dataclass
class SunflowerCert:
    member_indices: tuple
    core: frozenset
    epsilon: Fraction
    prob_estimate: object  # Fraction (exact) or (low, high) float CI
    mode: str

    def members(self, fam):
        return [fam.sets[i] for i in self.member_indices]


def _petal_prob(members, core, d0, mode, trials, seed):
    """Pr[some member minus the core is fully on], exact or (estimate, CI)."""
    masks = [sum(1 << i for i in (s - core)) for s in members]
    if mode == "exact":
        return d0.or_prob(masks), None
    rng = stream_rng(seed, "sunflower-prob")
    hits = 0
    for _ in range(trials):
        x = d0.sample(rng)
        if any(x & m == m for m in masks):
            hits += 1
    return Fraction(hits, trials), wilson_interval(hits, trials)


def is_sunflower(fam, member_indices, d0, eps, mode="exact", trials=4000, seed=0):
    """Certify the members as a (D0, eps)-sunflower, or return None.

    Acceptance needs the strict inequality Pr[...] > 1 - eps; in Monte
    Carlo mode the Wilson lower confidence bound must clear it.
    """
    idx = tuple(member_indices)
    if len(idx) < 2:
        return None
    members = [fam.sets[i] for i in idx]
    core = frozenset.intersection(*members)
    eps = Fraction(eps)
    prob, ci = _petal_prob(members, core, d0, mode, trials, seed)
    if mode == "exact":
        ok = prob > 1 - eps
        est = prob
    else:
        ok = ci[0] > float(1 - eps)
        est = (ci[0], ci[1])
    if not ok:
        return None
    return SunflowerCert(idx, core, eps, est, mode)


def sunflower_probability(members, d0, mode="exact", trials=4000, seed=0):
    """Diagnostic: the petal probability for an explicit member list."""
    members = [frozenset(s) for s in members]
    core = frozenset.intersection(*members)
    return _petal_prob(members, core, d0, mode, trials, seed)[0]


def find_classical_sunflower(fam, r):
    """Greedy/recursive classical sunflower finder.

    Returns (petals, core) with pairwise-equal intersections == core, or
    None. Petals are members of the input family.
    """
    if r < 2:
        raise ValueError("need r >= 2")

    def rec(sets, core):
        # maximal pairwise-disjoint subfamily, greedily in canonical order
        disjoint = []
        used = set()
        for s in sorted(sets, key=canon_key):
            if not (s & used):
                disjoint.append(s)
                used |= s
        if len(disjoint) >= r:
            return [s | core for s in disjoint[:r]], core
        # branch on the most popular element
        counts = {}
        for s in sets:
            for i in s:
                counts[i] = counts.get(i, 0) + 1
        if not counts:
            return None
        x = max(sorted(counts), key=lambda i: counts[i])
        link = {s - {x} for s in sets if x in s}
        if len(link) >= 2:
            found = rec(link, core | {x})
            if found is not None:
                return found
        rest = {s for s in sets if x not in s}
        if len(rest) >= r:
            return rec(rest, core)
        return None

    found = rec(set(fam.sets), frozenset())
    if found is None:
        return None
    petals, core = found
    for a, b in combinations(petals, 2):
        assert a & b == core, "classical sunflower postcondition"
    return [frozenset(p) for p in petals], frozenset(core)


def brute_force_sunflower(fam, r):
    """Exhaustive r-sunflower search (soundness oracle; |fam| <= 12)."""
    if len(fam.sets) > 12:
        raise ValueError("brute force guard: |fam| <= 12")
    for combo in combinations(fam.sets, r):
        core = frozenset.intersection(*combo)
        if all(a & b == core for a, b in combinations(combo, 2)):
            return list(combo), core
    return None


# ---------------------------------------------------------------------------
# plucking (Algorithm: replace an oversized slice's sunflower by its core)


@dataclass
class PluckEntry:
    size: int
    core: frozenset
    petals: int
    eps_est: object  # Fraction or float
    mode: str

    def to_json(self):
        return {
            "size": self.size,
            "core": sorted(self.core),
            "petals": self.petals,
            "eps_est": float(self.eps_est),
            "mode": self.mode,
        }


def _find_d0_sunflower(n, slice_sets, d0, eps, mode, trials, seed):
    """Tiered search for a (D0,eps)-sunflower inside one uniform slice.

    (a) candidate cores from pairwise intersections, petals = all supersets,
    ordered by petal count; (b) classical sunflower fallback; (c) None.
    """
    slice_sets = sorted(slice_sets, key=canon_key)
    petal_lists = {}
    for a, b in combinations(slice_sets, 2):
        k0 = a & b
        if k0 not in petal_lists:
            petal_lists[k0] = [s for s in slice_sets if k0 <= s]
    ranked = sorted(
        petal_lists.items(),
        key=lambda kv: (-len(kv[1]), len(kv[0]), tuple(sorted(kv[0]))),
    )
    stream = 0
    for _, members in ranked:
        core = frozenset.intersection(*members)
        prob, ci = _petal_prob(members, core, d0, mode, trials, (seed, stream))
        stream += 1
        ok = prob > 1 - eps if mode == "exact" else ci[0] > float(1 - eps)
        if ok:
            return members, core, prob
    # classical fallback with shrinking petal counts
    fam = SetFamily(n, slice_sets)
    want = len(slice_sets)
    while want >= 2:
        found = find_classical_sunflower(fam, want)
        if found is not None:
            members, core = found
            prob, ci = _petal_prob(members, core, d0, mode, trials, (seed, stream))
            stream += 1
            ok = prob > 1 - eps if mode == "exact" else ci[0] > float(1 - eps)
            if ok:
                return members, core, prob
        want = want // 2 if want > 3 else want - 1
    return None


def pluck(fam, d0, eps, r, w, mode="exact", trials=4000, seed=0):
    """Shrink every oversized slice by replacing sunflowers with their cores.

    While some size-l slice (l <= 2w) holds more than r^l sets, a
    (D0,eps)-sunflower inside it is replaced by its core. The result is
    r-small with width <= 2w and dominates the input DNF pointwise; the
    ledger records every plucked core with its measured error contribution
    Pr[all petals minus the core are off].
    """
    if fam.width() > 2 * w:
        raise ValueError("pluck precondition: width <= 2w")
    eps = Fraction(eps)
    r = Fraction(r)
    current = set(fam.sets)
    ledger = []
    round_no = 0
    while True:
        oversized = None
        counts = {}
        for s in current:
            counts[len(s)] = counts.get(len(s), 0) + 1
        for size in range(1, 2 * w + 1):
            if counts.get(size, 0) > r ** size:
                oversized = size
                break
        if oversized is None:
            break
        slice_sets = [s for s in current if len(s) == oversized]
        found = _find_d0_sunflower(
            fam.n, slice_sets, d0, eps, mode, trials, (seed, round_no)
        )
        if found is None:
            raise SunflowerNotFound(
                oversized,
                f"slice has {len(slice_sets)} sets > r^l = {float(r ** oversized):g}; "
                "r may be below the sunflower threshold for this D0",
            )
        members, core, prob = found
        err = 1 - prob if mode == "exact" else float(1 - prob)
        ledger.append(
            PluckEntry(oversized, core, len(members), err, mode)
        )
        current = {core} | {s for s in current if not core <= s}
        round_no += 1
    out = SetFamily(fam.n, current)
    assert out.r_small(r), "pluck postcondition: r-small"
    assert out.width() <= 2 * w, "pluck postcondition: width"
    return out, ledger


# ---------------------------------------------------------------------------
# the gate-by-gate approximation method


def _exact_err(d, masks_on, masks_off):
    """Pr[DNF(masks_on) = 1 and DNF(masks_off) = 0] under an exact dist."""
    if d.kind == "uniform":
        t_on = dnf_truth_table(d.n, masks_on)
        t_off = dnf_truth_table(d.n, masks_off)
        return Fraction((t_on & ~t_off & ((1 << (1 << d.n)) - 1)).bit_count(), 1 << d.n)

    def pred(x):
        return dnf_eval_mask(masks_on, x) and not dnf_eval_mask(masks_off, x)

    return d.event_prob(pred)


def _mc_err(d, masks_on, masks_off, trials, seed):
    rng = stream_rng(seed, "gate-error")
    hits = 0
    for _ in range(trials):
        x = d.sample(rng)
        if dnf_eval_mask(masks_on, x) and not dnf_eval_mask(masks_off, x):
            hits += 1
    return Fraction(hits, trials)


@dataclass
class GateReport:
    gate_id: str
    kind: str
    e0: object
    e1: object
    plucks: list

    def to_json(self):
        return {
            "gate_id": self.gate_id,
            "kind": self.kind,
            "E0": float(self.e0),
            "E1": float(self.e1),
            "plucks": [p.to_json() for p in self.plucks],
        }


def approximate_circuit(circuit, d0, d1, w, r, eps, mode="exact",
                        trials=4000, seed=0):
    """Run the approximation method over a monotone Boolean circuit.

    Every gate's two children DNFs are combined exactly and then plucked
    back to a (w, r)-DNF (AND gates additionally drop sets wider than w).
    The per-gate errors E1 (D1 mass lost below the exact combination) and
    E0 (D0 mass gained above it) are measured against the combined exact
    sub-DNFs, which is exactly the quantity the union-bound telescopes.
    n-ary gates are folded left-associatively, one combine step per child.
    """
    fams = [None] * len(circuit.nodes)
    reports = []
    w_sets = lambda sets: [s for s in sets if len(s) <= w]

    def err(d, on, off):
        if mode == "exact":
            return _exact_err(d, on, off)
        return _mc_err(d, on, off, trials, (seed, len(reports)))

    def combine(left, right, op, gate_id):
        if op == "or":
            raw = set(left.sets) | set(right.sets)
        else:
            raw = {s | t for s in left.sets for t in right.sets}
        raw_fam = SetFamily(left.n, raw)
        plucked, ledger = pluck(raw_fam, d0, eps, r, w, mode=mode,
                                trials=trials, seed=(seed, gate_id))
        final_sets = w_sets(plucked.sets) if op == "and" else list(plucked.sets)
        final = SetFamily(left.n, final_sets)
        raw_masks = [sum(1 << i for i in s) for s in raw]
        fin_masks = final.term_masks()
        e1 = err(d1, raw_masks, fin_masks)   # dropped below the combination
        e0 = err(d0, fin_masks, raw_masks)   # rose above the combination
        reports.append(GateReport(gate_id, op, e0, e1, ledger))
        return final

    n = d0.n
    for i, (op, arg) in enumerate(circuit.nodes):
        if op == "in":
            fams[i] = SetFamily(n, [frozenset([arg])])
        elif op == "const":
            fams[i] = SetFamily(n, [frozenset()] if arg else [])
        else:
            gate_op = "and" if op == "and" else "or"
            acc = fams[arg[0]]
            for step, child in enumerate(arg[1:]):
                acc = combine(acc, fams[child], gate_op, f"g{i}.{step}")
            fams[i] = acc

    final = fams[circuit.output]
    from .circuits import eval_bool

    fin_masks = final.term_masks()
    dm = DistSpec.mix(d0, d1)

    def agree_pred(x):
        bits = [(x >> j) & 1 for j in range(n)]
        return dnf_eval_mask(fin_masks, x) == eval_bool(circuit, bits)

    if mode == "exact":
        agreement = dm.event_prob(agree_pred)
    else:
        rng = stream_rng(seed, "agreement")
        hits = sum(1 for _ in range(trials) if agree_pred(dm.sample(rng)))
        agreement = Fraction(hits, trials)
    report = {
        "gates": reports,
        "total_E0": sum((g.e0 for g in reports), Fraction(0)),
        "total_E1": sum((g.e1 for g in reports), Fraction(0)),
        "agreement": agreement,
        "params": {"w": w, "r": float(r), "eps": float(eps), "mode": mode},
    }
    return final, report


# ---------------------------------------------------------------------------
# spreadness, the lower-bound criterion, agreement


@dataclass
class SpreadVerdict:
    passes: bool
    worst_set: tuple
    worst_prob: object
    worst_ratio: float


def spread_check(d, t, q, mode="exact", cap=4, trials=4000, seed=0):
    """Is d t-wise q-spread? Exhaustive over |A| <= min(t, cap) in exact mode."""
    q = Fraction(q)
    worst = None
    if mode == "exact":
        if d.n > 20:
            raise ValueError("exact spread check guard: n <= 20")
        sizes = range(1, min(t, cap) + 1)
        for size in sizes:
            for combo in combinations(range(d.n), size):
                mask = sum(1 << i for i in combo)
                p = d.term_prob(mask)
                ratio = p * q ** size
                if worst is None or ratio > worst[2]:
                    worst = (combo, p, ratio)
    else:
        rng = stream_rng(seed, "spread")
        samples = [d.sample(rng) for _ in range(trials)]
        for _ in range(trials // 4):
            size = rng.randint(1, max(1, min(t, cap)))
            combo = tuple(sorted(rng.sample(range(d.n), size)))
            mask = sum(1 << i for i in combo)
            hits = sum(1 for x in samples if x & mask == mask)
            p = Fraction(hits, len(samples))
            ratio = p * q ** size
            if worst is None or ratio > worst[2]:
                worst = (combo, p, ratio)
    if worst is None:
        return SpreadVerdict(True, (), Fraction(0), 0.0)
    return SpreadVerdict(worst[2] <= 1, worst[0], worst[1], float(worst[2]))


@dataclass
class CriterionParams:
    alpha: Fraction
    q: Fraction
    t: int
    w: int
    r_w: Fraction
    n: int
    c: Fraction = Fraction(1, 20)  # the proof's universal constant 0.05


@dataclass
class CriterionResult:
    value: Fraction
    flags: dict
    vacuous: bool

    def to_json(self):
        return {
            "value": float(self.value),
            "value_exact": f"{self.value.numerator}/{self.value.denominator}",
            "flags": dict(self.flags),
            "vacuous": self.vacuous,
        }


def lb_criterion(params):
    """The lower-bound value (c * alpha * q / r_w)^w with hypothesis flags."""
    alpha = Fraction(params.alpha)
    q = Fraction(params.q)
    r_w = Fraction(params.r_w)
    c = Fraction(params.c)
    flags = {
        "w_le_t_half": 2 * params.w <= params.t,
        "q_lower": 8 * r_w <= q,
        "q_upper": q <= r_w * params.n,
    }
    value = (c * alpha * q / r_w) ** params.w if r_w else Fraction(0)
    return CriterionResult(value=value, flags=flags, vacuous=params.w == 0)


def dnf_agreement(fam, oracle, d, mode="exact", trials=4000, seed=0):
    """Pr_{x ~ d}[F(x) = oracle(x)]; oracle takes the n bits as a tuple."""
    masks = fam.term_masks()
    n = fam.n

    def pred(x):
        bits = tuple((x >> j) & 1 for j in range(n))
        return dnf_eval_mask(masks, x) == oracle(bits)

    if mode == "exact":
        return d.event_prob(pred)
    rng = stream_rng(seed, "agreement")
    hits = sum(1 for _ in range(trials) if pred(d.sample(rng)))
    return Fraction(hits, trials)
