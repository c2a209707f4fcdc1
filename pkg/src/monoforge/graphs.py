"""Graphs, expander certification, and the induced-matching sampler.

Vertices are 0-indexed internally; the file format is 1-indexed
("graph <n>" header, then one "u v" line per edge).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphExhausted, NotRegular
from .seeding import stream_rng


class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n, edges):
        self.n = n
        canon = set()
        for u, v in edges:
            if u == v:
                raise ValueError("self-loop")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError("vertex out of range")
            canon.add((min(u, v), max(u, v)))
        self.edges = tuple(sorted(canon))
        self.adj = [set() for _ in range(n)]
        for u, v in self.edges:
            self.adj[u].add(v)
            self.adj[v].add(u)

    def e(self):
        return len(self.edges)

    def degrees(self):
        return [len(a) for a in self.adj]

    def has_edge(self, u, v):
        return v in self.adj[u]

    def induced_edge_count(self, vertices):
        vs = set(vertices)
        return sum(1 for u, v in self.edges if u in vs and v in vs)

    def to_text(self):
        lines = [f"graph {self.n}"]
        for u, v in self.edges:
            lines.append(f"{u + 1} {v + 1}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if len(head) != 2 or head[0] != "graph":
            raise ValueError("expected header 'graph <n>'")
        n = int(head[1])
        edges = []
        for ln in lines[1:]:
            u, v = ln.split()
            edges.append((int(u) - 1, int(v) - 1))
        return cls(n, edges)

    def __repr__(self):
        return f"Graph(n={self.n}, e={self.e()})"


# ---------------------------------------------------------------------------
# named graphs


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a, b):
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def circulant(n, jumps):
    edges = []
    for i in range(n):
        for j in jumps:
            edges.append((i, (i + j) % n))
    return Graph(n, edges)


def petersen():
    """Kneser graph K(5,2): 3-regular, lambda2 = 1."""
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return Graph(10, outer + inner + spokes)


def generalized_petersen(n, k):
    outer = [(i, (i + 1) % n) for i in range(n)]
    inner = [(n + i, n + (i + k) % n) for i in range(n)]
    spokes = [(i, n + i) for i in range(n)]
    return Graph(2 * n, outer + inner + spokes)


def desargues():
    """GP(10,3): 20 vertices, 3-regular, lambda2 = 2 <= 3^0.75."""
    return generalized_petersen(10, 3)


def dodecahedron():
    """GP(10,2): 20 vertices, 3-regular, lambda2 = sqrt(5)."""
    return generalized_petersen(10, 2)


def induced_subgraph(g, vertices):
    """Induced subgraph with vertices relabelled 0..len-1 in sorted order."""
    vs = sorted(set(vertices))
    index = {v: i for i, v in enumerate(vs)}
    edges = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    return Graph(len(vs), edges)


def delete_edge(g, u, v):
    return Graph(g.n, [e for e in g.edges if e != (min(u, v), max(u, v))])


def disjoint_union(g1, g2):
    edges = list(g1.edges) + [(u + g1.n, v + g1.n) for u, v in g2.edges]
    return Graph(g1.n + g2.n, edges)


def expander_corpus():
    """Small graphs passing the d-regular, lambda2 <= d^0.75 test (re-checked at load)."""
    out = {
        "c4": cycle(4),
        "c6": cycle(6),
        "c8": cycle(8),
        "c10": cycle(10),
        "k4": complete(4),
        "k5": complete(5),
        "k6": complete(6),
        "k33": complete_bipartite(3, 3),
        "petersen": petersen(),
        "desargues": desargues(),
        "dodecahedron": dodecahedron(),
        "circulant8-12": circulant(8, (1, 2)),
    }
    for name, g in out.items():
        cert = check_expander(g)
        if not cert.passes:
            raise RuntimeError(f"corpus graph {name} fails the expander check")
    return out


# ---------------------------------------------------------------------------
# expander certification


@dataclass
class ExpanderCert:
    d: int
    lambda2: float
    threshold: float
    passes: bool
    residual: float
    mode: str  # "signed" or "abs"


def check_expander(g, tol=1e-9, mode="signed"):
    """Certify d-regularity and lambda2 <= d^0.75 + tol by a dense eigensolve.

    mode 'signed' reads lambda2 as the second-largest eigenvalue; 'abs'
    takes the largest absolute value among the non-Perron eigenvalues.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    if g.n > 2000:
        raise ValueError("dense eigensolve guard: n <= 2000")
    degs = g.degrees()
    d = degs[0]
    if any(x != d for x in degs):
        raise NotRegular(f"degrees range over {sorted(set(degs))}")
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    vals, vecs = np.linalg.eigh(a)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    residual = 0.0
    for i in range(min(2, g.n)):
        r = np.linalg.norm(a @ vecs[:, i] - vals[i] * vecs[:, i])
        residual = max(residual, float(r))
    if residual > tol:
        raise RuntimeError(f"eigensolve residual {residual} exceeds tol {tol}")
    if g.n == 1:
        lam2 = float("-inf")
    elif mode == "signed":
        lam2 = float(vals[1])
    elif mode == "abs":
        lam2 = float(max(abs(vals[1]), abs(vals[-1])))
    else:
        raise ValueError("mode must be 'signed' or 'abs'")
    threshold = d ** 0.75
    return ExpanderCert(
        d=d,
        lambda2=lam2,
        threshold=threshold,
        passes=lam2 <= threshold + tol,
        residual=residual,
        mode=mode,
    )


# ---------------------------------------------------------------------------
# induced matchings


@dataclass
class Matching:
    edges: tuple
    induced: bool


def is_induced_matching(g, edges):
    """Independent oracle: disjoint graph edges with no cross edge in g."""
    verts = []
    for u, v in edges:
        if not g.has_edge(u, v):
            return False
        verts.append((u, v))
    flat = [x for e in verts for x in e]
    if len(set(flat)) != len(flat):
        return False
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            for x in verts[i]:
                for y in verts[j]:
                    if g.has_edge(x, y):
                        return False
    return True


def _ball2(g, sources):
    """Vertices at distance <= 2 in g from any source vertex."""
    out = set(sources)
    for v in sources:
        out |= g.adj[v]
    for v in list(out):
        out |= g.adj[v]
    return out


def sample_matching(g, m, seed=None, rng=None):
    """Sample an induced matching edge by edge.

    Before each pick, every vertex at distance <= 2 from the current
    matching is removed from g; the next edge is uniform among the edges
    that survive. Raises GraphExhausted(i) if the i-th pick finds no edge.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if rng is None:
        rng = stream_rng(seed, "matching")
    chosen = []
    matched = set()
    for i in range(m):
        banned = _ball2(g, matched) if matched else set()
        avail = [e for e in g.edges if e[0] not in banned and e[1] not in banned]
        if not avail:
            raise GraphExhausted(i)
        u, v = avail[rng.randrange(len(avail))]
        chosen.append((u, v))
        matched.update((u, v))
    return Matching(edges=tuple(chosen), induced=True)
