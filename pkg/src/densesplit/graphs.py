"""Simple undirected graphs with bitset adjacency, family constructors, and
elementary statistics.

Vertices are dense integers ``0..n-1``.  Adjacency is one Python int bitmask
per vertex, which keeps neighborhood and induced-subgraph operations cheap in
the exact search loops built on top of this module.  Graph values are
immutable after construction and safe to share between parallel workers.

All family constructors label vertices deterministically (layouts documented
on each constructor) so that traces and witnesses are reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations


class BudgetExceeded(RuntimeError):
    """An exact search was asked to run beyond its documented size budget."""


class GraphFormatError(ValueError):
    """Malformed graph text."""


def iter_bits(mask: int):
    """Yield indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph: no self-loops, no parallel edges.

    ``adj[v]`` is the neighborhood of ``v`` as a bitmask.
    """

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        if len(self.adj) != self.n:
            raise ValueError("adjacency length does not match vertex count")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row & ~full:
                raise ValueError("adjacency bit out of vertex range")
            if (row >> v) & 1:
                raise ValueError("self-loop")
        for v in range(self.n):
            for u in iter_bits(self.adj[v]):
                if not (self.adj[u] >> v) & 1:
                    raise ValueError("adjacency is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        rows = [0] * n
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @cached_property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u in range(self.n):
            row = self.adj[u] >> (u + 1)
            for k in iter_bits(row):
                out.append((u, u + 1 + k))
        return out

    def edge_count_within(self, mask: int) -> int:
        """Number of edges with both endpoints in the vertex set ``mask``."""
        total = 0
        for v in iter_bits(mask):
            total += (self.adj[v] & mask).bit_count()
        return total // 2

    def is_clique_mask(self, mask: int) -> bool:
        for v in iter_bits(mask):
            if self.adj[v] & mask != mask ^ (1 << v):
                return False
        return True


def null_graph() -> Graph:
    return Graph(0, ())


def make_complete(t: int) -> Graph:
    """Complete graph on vertices ``0..t-1``; rejects ``t == 0``."""
    if t < 1:
        raise ValueError("complete graph needs at least one vertex")
    full = (1 << t) - 1
    return Graph(t, tuple(full ^ (1 << v) for v in range(t)))


def make_cycle(k: int) -> Graph:
    """Cycle ``0 - 1 - ... - (k-1) - 0``; requires ``k >= 3``."""
    if k < 3:
        raise ValueError("cycle length must be at least 3")
    return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def disjoint_union(parts) -> Graph:
    """Disjoint union with vertices relabeled part by part, in input order."""
    parts = list(parts)
    n = sum(g.n for g in parts)
    rows = []
    offset = 0
    for g in parts:
        for v in range(g.n):
            rows.append(g.adj[v] << offset)
        offset += g.n
    return Graph(n, tuple(rows))


def make_barK(t: int, n: int) -> Graph:
    """Complete bipartite ``K_{t,n-t}`` with the t-side completed to a clique.

    Vertices ``0..t-1`` are the clique side, ``t..n-1`` the independent side.
    Has exactly ``n*t - t*(t+1)/2`` edges.
    """
    if not 0 <= t <= n:
        raise ValueError("need 0 <= t <= n")
    edges = list(combinations(range(t), 2))
    edges += [(i, j) for i in range(t) for j in range(t, n)]
    return Graph.from_edges(n, edges)


def glue_at_vertex(g: Graph, k: int) -> Graph:
    """Glue ``k`` copies of ``g`` on the shared vertex 0.

    Copy ``i`` maps vertex ``u > 0`` to ``i*(v(g)-1) + u``; vertex 0 is shared.
    The result has ``k*(v(g)-1) + 1`` vertices and ``k*e(g)`` edges.
    """
    if g.n == 0:
        raise ValueError("cannot glue copies of the null graph")
    if k < 1:
        raise ValueError("need at least one copy")
    edges = []
    for i in range(k):
        def relabel(u, i=i):
            return 0 if u == 0 else i * (g.n - 1) + u
        for u, v in g.edges():
            edges.append((relabel(u), relabel(v)))
    return Graph.from_edges(k * (g.n - 1) + 1, edges)


def components(g: Graph) -> list[frozenset[int]]:
    """Connected components as vertex sets, ordered by smallest member."""
    out = []
    unseen = g.full_mask
    while unseen:
        seed = unseen & -unseen
        members = seed
        frontier = seed
        while frontier:
            nbrs = 0
            for v in iter_bits(frontier):
                nbrs |= g.adj[v]
            frontier = nbrs & ~members
            members |= frontier
        out.append(frozenset(iter_bits(members)))
        unseen &= ~members
    return out


def odd_components(g: Graph) -> int:
    return sum(1 for comp in components(g) if len(comp) % 2 == 1)


def vertex_cover_number(g: Graph, *, budget: int = 24) -> int:
    """Exact minimum vertex cover size by subset search in increasing size.

    A greedy maximal matching gives the starting size (no cover can be
    smaller), and the first cover found is optimal.  Rejects graphs above the
    ``budget`` vertex count because the search is exponential.
    """
    if g.n > budget:
        raise BudgetExceeded(f"vertex cover search limited to {budget} vertices")
    edges = g.edges()
    if not edges:
        return 0
    edge_masks = [(1 << u) | (1 << v) for u, v in edges]
    matched = 0
    lower = 0
    for em in edge_masks:
        if not em & matched:
            matched |= em
            lower += 1
    candidates = [v for v in range(g.n) if g.degree(v) > 0]
    for size in range(lower, len(candidates) + 1):
        for subset in combinations(candidates, size):
            m = mask_of(subset)
            if all(m & em for em in edge_masks):
                return size
    raise AssertionError("unreachable: vertex set itself is a cover")


def induced_subgraph(g: Graph, vertices) -> Graph:
    """Subgraph induced on ``vertices``; new index i maps to ``sorted(vertices)[i]``."""
    order = sorted(set(vertices))
    for v in order:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range")
    pos = {v: i for i, v in enumerate(order)}
    edges = [
        (pos[u], pos[v])
        for u, v in combinations(order, 2)
        if g.has_edge(u, v)
    ]
    return Graph.from_edges(len(order), edges)


# Graph text format: first line "n m", then m lines "u v" with 0 <= u < v < n.

def write_graph_text(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def read_graph_text(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphFormatError("empty graph text")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError("header must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError("header must contain two integers") from exc
    if n < 0 or m < 0:
        raise GraphFormatError("negative counts in header")
    if len(lines) - 1 != m:
        raise GraphFormatError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    seen = set()
    for ln in lines[1:]:
        fields = ln.split()
        if len(fields) != 2:
            raise GraphFormatError(f"bad edge line: {ln!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError as exc:
            raise GraphFormatError(f"bad edge line: {ln!r}") from exc
        if not 0 <= u < v < n:
            raise GraphFormatError(f"edge line {ln!r} violates 0 <= u < v < n")
        if (u, v) in seen:
            raise GraphFormatError(f"duplicate edge line: {ln!r}")
        seen.add((u, v))
        edges.append((u, v))
    return Graph.from_edges(n, edges)


_FAMILY_ATOM = re.compile(r"^(?:(\d+)\s*)?([KC])(\d+)$")


@dataclass(frozen=True)
class GraphFamilySpec:
    """Named construction: complete, cycle, disjoint union, barK, or glue."""

    kind: str
    params: tuple[int, ...] = ()
    children: tuple["GraphFamilySpec", ...] = ()

    def build(self) -> Graph:
        if self.kind == "complete":
            return make_complete(self.params[0])
        if self.kind == "cycle":
            return make_cycle(self.params[0])
        if self.kind == "union":
            return disjoint_union(child.build() for child in self.children)
        if self.kind == "barK":
            return make_barK(*self.params)
        if self.kind == "glue":
            return glue_at_vertex(self.children[0].build(), self.params[0])
        raise ValueError(f"unknown family kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == "complete":
            return f"K{self.params[0]}"
        if self.kind == "cycle":
            return f"C{self.params[0]}"
        if self.kind == "union":
            return "+".join(child.label() for child in self.children)
        if self.kind == "barK":
            return f"barK({self.params[0]},{self.params[1]})"
        if self.kind == "glue":
            return f"glue({self.children[0].label()},{self.params[0]})"
        raise ValueError(f"unknown family kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "GraphFamilySpec":
        """Parse labels like ``K5``, ``C4``, ``2C3``, ``barK(3,7)``,
        ``glue(C4,3)`` and ``+``-joined unions of these."""
        text = text.strip()
        parts = _split_top_level(text, "+")
        if len(parts) > 1:
            return cls("union", (), tuple(cls.parse(p) for p in parts))
        m = _FAMILY_ATOM.match(text)
        if m:
            mult = int(m.group(1)) if m.group(1) else 1
            kind = "complete" if m.group(2) == "K" else "cycle"
            size = int(m.group(3))
            atom = cls(kind, (size,))
            if mult == 1:
                return atom
            if mult < 1:
                raise ValueError(f"bad multiplier in {text!r}")
            return cls("union", (), (atom,) * mult)
        if text.startswith("barK(") and text.endswith(")"):
            inner = text[len("barK("):-1].split(",")
            if len(inner) != 2:
                raise ValueError(f"barK needs two parameters: {text!r}")
            return cls("barK", (int(inner[0]), int(inner[1])))
        if text.startswith("glue(") and text.endswith(")"):
            inner = _split_top_level(text[len("glue("):-1], ",")
            if len(inner) != 2:
                raise ValueError(f"glue needs a spec and a count: {text!r}")
            return cls("glue", (int(inner[1]),), (cls.parse(inner[0]),))
        raise ValueError(f"cannot parse graph family {text!r}")


def _split_top_level(text: str, sep: str) -> list[str]:
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]
