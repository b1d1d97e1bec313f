"""Maximum-cardinality matching in general graphs (blossom contraction).

The solver works on an adjacency-list representation with integer
vertices.  Besides the matching itself it can report, for a maximum
matching, the set of vertices reachable from an exposed vertex by an
even-length alternating walk.  That set is exactly the set of vertices
some maximum matching misses, which is what the decomposition code needs.

An exhaustive reference implementation is included for cross-checking on
small graphs.
"""

from __future__ import annotations

from itertools import combinations

from .core import Graph, PreconditionError

__all__ = [
    "MatchingSolver",
    "max_matching",
    "max_matching_with_even_set",
    "exhaustive_max_matching",
]


class MatchingSolver:
    """O(V^3) augmenting-path search with blossom shrinking."""

    def __init__(self, adj: list[list[int]]):
        self.adj = adj
        self.n = len(adj)
        self.match = [-1] * self.n

    def seed(self, pairs: dict[int, int]) -> None:
        """Start from a known (partial) matching."""
        for u, v in pairs.items():
            self.match[u] = v
            self.match[v] = u

    # -- one alternating BFS from `root`; returns an exposed endpoint or -1.
    #    `self.used` ends up marking the even (outer) vertices of the search.
    def _find_path(self, root: int) -> int:
        n, adj, match = self.n, self.adj, self.match
        used = self.used = [False] * n
        p = self.p = [-1] * n
        base = self.base = list(range(n))
        used[root] = True
        queue = [root]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and p[match[to]] != -1):
                    # odd cycle found: contract the blossom
                    curbase = self._lca(v, to)
                    blossom = [False] * n
                    self._mark_path(v, curbase, to, blossom)
                    self._mark_path(to, curbase, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = curbase
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif p[to] == -1:
                    p[to] = v
                    if match[to] == -1:
                        return to
                    used[match[to]] = True
                    queue.append(match[to])
        return -1

    def _lca(self, a: int, b: int) -> int:
        base, match, p = self.base, self.match, self.p
        seen = set()
        a = base[a]
        while True:
            seen.add(a)
            if match[a] == -1:
                break
            a = base[p[match[a]]]
        b = base[b]
        while b not in seen:
            b = base[p[match[b]]]
        return b

    def _mark_path(self, v: int, b: int, child: int, blossom: list[bool]) -> None:
        base, match, p = self.base, self.match, self.p
        while base[v] != b:
            blossom[base[v]] = True
            blossom[base[match[v]]] = True
            p[v] = child
            child = match[v]
            v = p[child]

    def _augment(self, v: int) -> None:
        match, p = self.match, self.p
        while v != -1:
            pv = p[v]
            ppv = match[pv]
            match[v] = pv
            match[pv] = v
            v = ppv

    def solve(self) -> list[int]:
        # greedy warm start
        for v in range(self.n):
            if self.match[v] == -1:
                for to in self.adj[v]:
                    if self.match[to] == -1:
                        self.match[v] = to
                        self.match[to] = v
                        break
        for v in range(self.n):
            if self.match[v] == -1:
                exposed = self._find_path(v)
                if exposed != -1:
                    self._augment(exposed)
        return self.match

    def even_set(self) -> set[int]:
        """Vertices missable by some maximum matching (requires maximality).

        Runs one more search phase from every exposed vertex and collects
        the outer-labelled vertices; no augmenting path may exist.
        """
        out: set[int] = set()
        for v in range(self.n):
            if self.match[v] == -1 and v not in out:
                exposed = self._find_path(v)
                if exposed != -1:
                    raise PreconditionError("matching is not maximum")
                out.update(i for i in range(self.n) if self.used[i])
        return out


def _index_graph(g: Graph) -> tuple[list, dict, list[list[int]]]:
    verts = list(g.vertices)
    idx = {v: i for i, v in enumerate(verts)}
    adj = [[idx[u] for u in sorted(g.adjacency(v))] for v in verts]
    return verts, idx, adj


def max_matching(g: Graph) -> dict:
    """Maximum-cardinality matching as a symmetric partner map."""
    verts, _, adj = _index_graph(g)
    solver = MatchingSolver(adj)
    match = solver.solve()
    return {verts[i]: verts[m] for i, m in enumerate(match) if m != -1}


def max_matching_with_even_set(g: Graph) -> tuple[dict, set]:
    """Maximum matching plus the vertices missed by some maximum matching."""
    verts, _, adj = _index_graph(g)
    solver = MatchingSolver(adj)
    match = solver.solve()
    even = solver.even_set()
    pairs = {verts[i]: verts[m] for i, m in enumerate(match) if m != -1}
    return pairs, {verts[i] for i in even}


def exhaustive_max_matching(g: Graph) -> dict:
    """Reference maximum matching by exhaustive search (|V| <= 12)."""
    if len(g) > 12:
        raise PreconditionError("exhaustive matching capped at 12 vertices")
    edges = list(g.edges())
    best: list = []

    def extend(start: int, chosen: list, used: set):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        # simple bound: even taking every remaining edge cannot win
        if len(chosen) + (len(edges) - start) <= len(best):
            return
        for i in range(start, len(edges)):
            u, v = edges[i]
            if u in used or v in used:
                continue
            chosen.append((u, v))
            used.add(u)
            used.add(v)
            extend(i + 1, chosen, used)
            chosen.pop()
            used.discard(u)
            used.discard(v)

    extend(0, [], set())
    out = {}
    for u, v in best:
        out[u] = v
        out[v] = u
    return out


def has_perfect_matching(g: Graph) -> bool:
    if len(g) % 2 == 1:
        return False
    return len(max_matching(g)) == len(g)
