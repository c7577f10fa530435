"""Fibers of the toric map and their symmetric exchange graphs.

A vertex is a sorted tuple of basis indices of a :class:`PolymatroidInstance`
(a multiset: bases may repeat).  Moves are ``(pa, pb, i, j)``: factors at
positions ``pa`` and ``pb`` of the source vertex become
``x_j/x_i * m_pa`` and ``x_i/x_j * m_pb``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .monomial import Monomial, format_monomial
from .order import EQUAL, GREATER, LESS, Convention
from .polymatroid import InvariantViolation, PolymatroidInstance

__all__ = [
    "Step",
    "ThinReport",
    "DescentResult",
    "ExchangeGraph",
    "DisconnectedFiber",
    "make_vertex",
    "vertex_product",
    "vertex_text",
    "parse_vertex",
    "move_text",
    "sort_key",
    "compare_vertices",
    "fiber_vertices",
    "all_fibers",
    "neighbors",
    "move_between",
    "is_thin",
    "descent_move",
    "greedy_thin_vertex",
    "build_graph",
    "is_connected",
    "reduce_to_sink",
    "connect_path",
]

Vertex = tuple  # sorted tuple of basis indices


class Step(NamedTuple):
    src: tuple
    dst: tuple
    move: tuple  # (pa, pb, i, j), positions in src


class DisconnectedFiber(InvariantViolation):
    pass


# -- vertex helpers ---------------------------------------------------------


def make_vertex(inst: PolymatroidInstance, factors) -> Vertex:
    """Accept basis indices, monomials, or monomial text."""
    idx = []
    for f in factors:
        idx.append(f if isinstance(f, int) else inst.basis_index(f))
    return tuple(sorted(idx))


def vertex_product(inst: PolymatroidInstance, V: Sequence[int]) -> Monomial:
    total = [0] * inst.width
    for k in V:
        for i, e in enumerate(inst.bases[k]):
            total[i] += e
    return Monomial(total)


def vertex_text(inst: PolymatroidInstance, V: Sequence[int]) -> str:
    return "{" + ", ".join(format_monomial(inst.bases[k]) for k in V) + "}"


def parse_vertex(inst: PolymatroidInstance, text: str) -> Vertex:
    s = text.strip()
    if not (s.startswith("{") and s.endswith("}")):
        raise ValueError(f"bad vertex text: {text!r}")
    body = s[1:-1].strip()
    return make_vertex(inst, [tok for tok in body.split(",")] if body else [])


def move_text(move: Sequence[int]) -> str:
    pa, pb, i, j = move
    return f"swap(i={i}, j={j}) on factors ({pa + 1},{pb + 1})"


def _ell_sum(inst: PolymatroidInstance, V: Sequence[int]) -> tuple:
    if not V:
        return (0,) * (inst.n * inst.rank)
    if len(V) == 1:
        return inst.ell[V[0]]
    return tuple(map(sum, zip(*(inst.ell[k] for k in V))))


def sort_key(inst: PolymatroidInstance, V: Sequence[int], convention=Convention.HI) -> tuple:
    """Key whose natural tuple order is the l-order (larger key = greater).

    Indices are HI-canonical (l-vector descending), so under HI the
    tie-break is plain tuple order on the sorted indices; under LO the
    factor list is read in reverse and both parts are negated.
    """
    s = _ell_sum(inst, V)
    if convention is Convention.HI or convention == "HI":
        return (len(V), s, tuple(V))
    return (len(V), tuple(-x for x in s), tuple(-k for k in reversed(V)))


def compare_vertices(inst, V, W, convention=Convention.HI) -> int:
    a, b = sort_key(inst, V, convention), sort_key(inst, W, convention)
    return GREATER if a > b else LESS if a < b else EQUAL


# -- fibers -----------------------------------------------------------------


def _fiber_degree(inst: PolymatroidInstance, mu: Monomial) -> int:
    r = inst.rank
    if r == 0 or mu.degree == 0 or mu.degree % r:
        raise ValueError(
            f"degree {mu.degree} of {mu} is not a positive multiple of the rank {r}"
        )
    return mu.degree // r


def fiber_vertices(inst: PolymatroidInstance, mu) -> list[Vertex]:
    """All t-multisets of bases with product ``mu``, in sorted order."""
    mu = inst.monomial(mu)
    t = _fiber_degree(inst, mu)
    bases = inst.bases
    out: list[Vertex] = []
    chosen: list[int] = []

    def search(start: int, rest: tuple, left: int) -> None:
        if left == 1:
            k = inst.index.get(rest)
            if k is not None and k >= start:
                out.append(tuple(chosen) + (k,))
            return
        for k in range(start, len(bases)):
            b = bases[k]
            if all(x <= y for x, y in zip(b, rest)):
                chosen.append(k)
                search(k, tuple(y - x for x, y in zip(b, rest)), left - 1)
                chosen.pop()

    search(0, tuple(mu), t)
    out.sort()
    return out


def all_fibers(inst: PolymatroidInstance, t: int) -> dict[Monomial, list[Vertex]]:
    """Every nonempty fiber of degree t * rank, keyed by its product."""
    from itertools import combinations_with_replacement

    fibers: dict[Monomial, list[Vertex]] = {}
    width = inst.width
    for V in combinations_with_replacement(range(len(inst.bases)), t):
        total = [0] * width
        for k in V:
            for i, e in enumerate(inst.bases[k]):
                total[i] += e
        fibers.setdefault(Monomial(total), []).append(V)
    return dict(sorted(fibers.items()))


def neighbors(inst: PolymatroidInstance, V: Sequence[int]) -> list[tuple[Vertex, tuple]]:
    """Distinct vertices one symmetric exchange away, with the move used."""
    V = tuple(V)
    seen = {V}
    out = []
    t = len(V)
    tried = set()
    for pa in range(t):
        a = V[pa]
        for pb in range(pa + 1, t):
            b = V[pb]
            # equal factors still have backward swaps; repeated pairs add nothing
            if (a, b) in tried:
                continue
            tried.add((a, b))
            rest = V[:pa] + V[pa + 1 : pb] + V[pb + 1 :]
            for i, j, a2, b2 in inst.swaps(a, b):
                W = tuple(sorted(rest + (a2, b2)))
                if W not in seen:
                    seen.add(W)
                    out.append((W, (pa, pb, i, j)))
    return out


def move_between(inst: PolymatroidInstance, V: Sequence[int], W: Sequence[int]) -> tuple:
    """Recover the move taking V to an adjacent W."""
    rest = list(W)
    removed = []
    for pos, k in enumerate(V):
        if k in rest:
            rest.remove(k)
        else:
            removed.append(pos)
    if len(removed) != 2 or len(rest) != 2:
        raise ValueError(f"{V} and {W} do not differ in exactly two factors")
    pa, pb = removed
    ma, mb = inst.bases[V[pa]], inst.bases[V[pb]]
    for c2 in (rest, rest[::-1]):
        na = inst.bases[c2[0]]
        diff = [x - y for x, y in zip(na, ma)]
        if sorted(diff) == [-1] + [0] * (len(diff) - 2) + [1]:
            i, j = diff.index(-1), diff.index(1)
            if inst.bases[c2[1]] == mb.shift(j, i):
                return (pa, pb, i, j)
    raise ValueError(f"{V} and {W} are not related by a symmetric exchange")


def _apply(inst: PolymatroidInstance, V: Sequence[int], move) -> Vertex:
    pa, pb, i, j = move
    a2 = inst.index.get(inst.bases[V[pa]].shift(i, j))
    b2 = inst.index.get(inst.bases[V[pb]].shift(j, i))
    if a2 is None or b2 is None:
        raise InvariantViolation(
            f"move {move_text(move)} leaves the basis set at {vertex_text(inst, V)}",
            {"instance": inst.describe(), "vertex": vertex_text(inst, V), "move": list(move)},
        )
    rest = [k for pos, k in enumerate(V) if pos not in (pa, pb)]
    return tuple(sorted(rest + [a2, b2]))


# -- thin vertices ----------------------------------------------------------


@dataclass
class ThinReport:
    thin: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.thin


def _comparable(h1, h2) -> bool:
    return all(x >= y for x, y in zip(h1, h2)) or all(x <= y for x, y in zip(h1, h2))


def is_thin(inst: PolymatroidInstance, V: Sequence[int]) -> ThinReport:
    hs = [inst.heights[k] for k in V]
    for p in range(len(hs)):
        for q in range(p + 1, len(hs)):
            if not _comparable(hs[p], hs[q]):
                return ThinReport(False, {"condition": 1, "factors": [p + 1, q + 1]})
    for k in range(inst.n):
        col = [h[k] for h in hs]
        if max(col) - min(col) > 1:
            return ThinReport(False, {"condition": 2, "east_step": k + 1})
    return ThinReport(True)


@dataclass
class DescentResult:
    thin: bool
    vertex: Vertex | None = None
    move: tuple | None = None
    case: int | None = None
    comparison: int | None = None  # compare(V, V'), GREATER means a descent

    @property
    def descends(self) -> bool:
        return self.comparison == GREATER


def _column_counts(heights, r: int) -> list[int]:
    prev = 0
    cols = []
    for h in heights:
        cols.append(h - prev)
        prev = h
    cols.append(r - prev)
    return cols


def descent_move(inst: PolymatroidInstance, V: Sequence[int], convention=Convention.HI) -> DescentResult:
    """The exchange from the non-thin-implies-not-a-sink argument.

    Case 1: at the least east step i+1 where two factors are more than a unit
    apart, exchange between the highest and the lowest factor at columns i
    and the least j > i where the highest has fewer north steps.  Case 2: at
    the least i where the east steps 1..i+1 stop being pairwise comparable,
    take a pair with p on or above q through step i but q a unit above p at
    step i+1, and move one of q's column-i north steps to the least j > i
    where p has more north steps than q.
    """
    V = tuple(V)
    if is_thin(inst, V):
        return DescentResult(True)
    r, n = inst.rank, inst.n
    hs = [inst.heights[k] for k in V]
    t = len(V)
    move = None
    case = None
    for k in range(n):
        col = [h[k] for h in hs]
        if max(col) - min(col) > 1:
            i = k
            p = col.index(max(col))
            q = col.index(min(col))
            dp, dq = _column_counts(hs[p], r), _column_counts(hs[q], r)
            j = next(c for c in range(i + 1, n + 1) if dp[c] < dq[c])
            # p gives up a north step at i and takes one at j
            move, case = ((p, q, i, j) if p < q else (q, p, j, i)), 1
            break
    if move is None:
        for i in range(1, n):
            pair = None
            for p in range(t):
                for q in range(t):
                    if p == q:
                        continue
                    hp, hq = hs[p], hs[q]
                    if (
                        all(x >= y for x, y in zip(hp[:i], hq[:i]))
                        and hp[:i] != hq[:i]
                        and hq[i] > hp[i]
                    ):
                        pair = (p, q)
                        break
                if pair:
                    break
            if pair is None:
                continue
            p, q = pair
            dp, dq = _column_counts(hs[p], r), _column_counts(hs[q], r)
            j = next(c for c in range(i + 1, n + 1) if dp[c] > dq[c])
            # p gains a north step at i and gives one up at j; q the reverse
            move, case = ((p, q, j, i) if p < q else (q, p, i, j)), 2
            break
    if move is None:
        raise InvariantViolation(
            f"non-thin vertex {vertex_text(inst, V)} matched neither descent case",
            {"instance": inst.describe(), "vertex": vertex_text(inst, V)},
        )
    W = _apply(inst, V, move)
    return DescentResult(False, W, move, case, compare_vertices(inst, V, W, convention))


def greedy_thin_vertex(inst: PolymatroidInstance, mu, t: int) -> Vertex | None:
    """Build the thin vertex column by column; None when no thin vertex exists.

    Factors are kept in weakly decreasing height order.  Before column i the
    first ``k`` factors sit at the top level and the rest one unit lower;
    column i's north steps are dealt out as q = d // t each plus one more to
    ``rem = d % t`` factors, lower group first.
    """
    mu = inst.monomial(mu)
    if t < 1 or mu.degree != t * inst.rank:
        raise ValueError(f"degree of {mu} is not {t} times the rank {inst.rank}")
    cols = [[0] * inst.width for _ in range(t)]
    heights = [0] * t
    k = t  # everyone starts together at the origin
    for i in range(inst.width):
        q, rem = divmod(mu[i], t)
        if rem <= t - k:
            extra = range(k, k + rem)
        else:
            extra = list(range(rem - t + k)) + list(range(k, t))
        for f in range(t):
            cols[f][i] = q + (1 if f in extra else 0)
            heights[f] += cols[f][i]
        top = heights[0]
        k = sum(1 for h in heights if h == top)
    if any(h != inst.rank for h in heights):
        return None
    idx = [inst.index.get(Monomial(c)) for c in cols]
    if any(x is None for x in idx):
        return None
    return tuple(sorted(idx))


# -- graphs -----------------------------------------------------------------


@dataclass
class ExchangeGraph:
    inst: PolymatroidInstance
    mu: Monomial
    vertices: list
    edges: list  # (u, v, move) with u < v, move relative to vertices[u]
    index: dict = field(default_factory=dict)
    adjacency: list = field(default_factory=list)
    _keys: dict = field(default_factory=dict, repr=False)
    _thin: list | None = field(default=None, repr=False)

    def thin(self) -> list[int]:
        """Indices of the thin vertices, computed once."""
        if self._thin is None:
            self._thin = [u for u, V in enumerate(self.vertices) if is_thin(self.inst, V)]
        return self._thin

    def keys(self, convention=Convention.HI) -> list:
        """Order keys of all vertices, computed once per convention."""
        convention = Convention(convention)
        keys = self._keys.get(convention)
        if keys is None:
            keys = self._keys[convention] = [
                sort_key(self.inst, V, convention) for V in self.vertices
            ]
        return keys

    def key(self, u: int, convention=Convention.HI):
        return self.keys(convention)[u]

    def oriented_edges(self, convention=Convention.HI) -> list[tuple[int, int]]:
        """Edges directed from the larger vertex to the smaller."""
        keys = self.keys(convention)
        return [(u, v) if keys[u] > keys[v] else (v, u) for u, v, _ in self.edges]

    def sinks(self, convention=Convention.HI) -> list[int]:
        keys = self.keys(convention)
        return [
            u for u in range(len(self.vertices))
            if all(keys[v] > keys[u] for v in self.adjacency[u])
        ]

    def components(self) -> list[list[int]]:
        seen = [False] * len(self.vertices)
        comps = []
        for s in range(len(self.vertices)):
            if seen[s]:
                continue
            seen[s] = True
            comp, queue = [], deque([s])
            while queue:
                u = queue.popleft()
                comp.append(u)
                for v in self.adjacency[u]:
                    if not seen[v]:
                        seen[v] = True
                        queue.append(v)
            comps.append(sorted(comp))
        return comps

    def descend(self, u: int, convention=Convention.HI) -> list[int]:
        """Vertex sequence from u down to a sink (see :func:`reduce_to_sink`)."""
        keys = self.keys(convention)
        walk = [u]
        while True:
            ku = keys[u]
            res = descent_move(self.inst, self.vertices[u], convention)
            nxt = None
            if not res.thin and res.descends:
                nxt = self.index[res.vertex]
            else:
                lower = [v for v in self.adjacency[u] if keys[v] < ku]
                if lower:
                    nxt = min(lower, key=keys.__getitem__)
            if nxt is None:
                return walk
            walk.append(nxt)
            u = nxt

    def shortest_path(self, u: int, w: int) -> list[int] | None:
        prev = {u: None}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            if x == w:
                break
            for y in self.adjacency[x]:
                if y not in prev:
                    prev[y] = x
                    queue.append(y)
        if w not in prev:
            return None
        path = [w]
        while path[-1] != u:
            path.append(prev[path[-1]])
        return path[::-1]

    def walk(self, u: int, w: int, convention=Convention.HI) -> list[int]:
        """A vertex walk from u to w: via a common sink when possible, else BFS."""
        if u == w:
            return [u]
        down_u, down_w = self.descend(u, convention), self.descend(w, convention)
        if down_u[-1] == down_w[-1]:
            pos_w = {x: k for k, x in enumerate(down_w)}
            for k, x in enumerate(down_u):
                if x in pos_w:
                    return down_u[: k + 1] + down_w[: pos_w[x]][::-1]
        path = self.shortest_path(u, w)
        if path is None:
            raise DisconnectedFiber(
                f"no walk between {vertex_text(self.inst, self.vertices[u])} and "
                f"{vertex_text(self.inst, self.vertices[w])}",
                self.dump(convention),
            )
        return path

    def steps(self, walk: Sequence[int]) -> list[Step]:
        out = []
        for a, b in zip(walk, walk[1:]):
            V, W = self.vertices[a], self.vertices[b]
            out.append(Step(V, W, move_between(self.inst, V, W)))
        return out

    def dump(self, convention=None) -> dict:
        """Replayable description of the whole fiber.

        Edges are vertex-index pairs; with a convention they point from the
        larger vertex to the smaller.  Moves are recoverable with
        :func:`move_between`.
        """
        inst = self.inst
        out = {
            "instance": inst.describe(),
            "mu": format_monomial(self.mu),
            "t": len(self.vertices[0]) if self.vertices else 0,
            "vertices": [vertex_text(inst, V) for V in self.vertices],
        }
        if convention is None:
            out["edges"] = [[u, v] for u, v, _ in self.edges]
        else:
            out["convention"] = str(Convention(convention))
            out["edges"] = [list(e) for e in self.oriented_edges(convention)]
            out["sinks"] = self.sinks(convention)
            out["thin"] = list(self.thin())
        return out


def _graph_from_vertices(inst: PolymatroidInstance, mu: Monomial, vertices) -> ExchangeGraph:
    vertices = list(vertices)
    index = {V: u for u, V in enumerate(vertices)}
    adjacency: list[list[int]] = [[] for _ in vertices]
    edges = []
    for u, V in enumerate(vertices):
        for W, move in neighbors(inst, V):
            v = index[W]
            if u < v:
                edges.append((u, v, move))
            adjacency[u].append(v)
    for adj in adjacency:
        adj.sort()
    return ExchangeGraph(inst, mu, vertices, edges, index, adjacency)


def build_graph(inst: PolymatroidInstance, mu) -> ExchangeGraph:
    mu = inst.monomial(mu)
    return _graph_from_vertices(inst, mu, fiber_vertices(inst, mu))


@dataclass
class ConnectivityReport:
    connected: bool
    components: int


def is_connected(g: ExchangeGraph) -> ConnectivityReport:
    comps = g.components()
    return ConnectivityReport(len(comps) <= 1, len(comps))


def reduce_to_sink(inst: PolymatroidInstance, V, convention=Convention.HI) -> tuple[Vertex, list[Step]]:
    """Walk strictly downward until no neighbor is smaller.

    Prefers the descent move when it is a descent, else the smallest lower
    neighbor.
    """
    convention = Convention(convention)
    V = tuple(V)
    steps: list[Step] = []
    while True:
        key = sort_key(inst, V, convention)
        res = descent_move(inst, V, convention)
        if not res.thin and res.descends:
            W, move = res.vertex, res.move
        else:
            lower = [(sort_key(inst, W, convention), W, m) for W, m in neighbors(inst, V)]
            lower = [x for x in lower if x[0] < key]
            if not lower:
                return V, steps
            _, W, move = min(lower)
        steps.append(Step(V, W, move))
        V = W


def connect_path(inst: PolymatroidInstance, V, W, convention=Convention.HI) -> list[Step]:
    """Steps of a walk from V to W inside their common fiber."""
    V, W = tuple(V), tuple(W)
    if vertex_product(inst, V) != vertex_product(inst, W):
        raise ValueError(f"{vertex_text(inst, V)} and {vertex_text(inst, W)} lie in different fibers")
    if V == W:
        return []
    sink_v, down_v = reduce_to_sink(inst, V, convention)
    sink_w, down_w = reduce_to_sink(inst, W, convention)
    if sink_v == sink_w:
        walk_v = [V] + [s.dst for s in down_v]
        walk_w = [W] + [s.dst for s in down_w]
        pos_w = {x: k for k, x in enumerate(walk_w)}
        for k, x in enumerate(walk_v):
            if x in pos_w:
                walk = walk_v[: k + 1] + walk_w[: pos_w[x]][::-1]
                break
        return [Step(a, b, move_between(inst, a, b)) for a, b in zip(walk, walk[1:])]
    g = build_graph(inst, vertex_product(inst, V))
    path = g.shortest_path(g.index[V], g.index[W])
    if path is None:
        raise DisconnectedFiber(
            f"{vertex_text(inst, V)} and {vertex_text(inst, W)} are in different components",
            g.dump(convention),
        )
    return g.steps(path)
