"""Separator structure of graphs and matchings optimised towards a vertex.

The decomposition produced here is a triple (S, M, components): removing
the separator S leaves only factor-critical components, and M matches S
into pairwise-distinct components.  On top of a triple we build
fractional matchings that saturate a chosen vertex's weighted
neighbourhood as much as possible, the set of vertices reachable from
its unsaturated neighbours by alternating paths, and finally hybrid
skew/fractional pairs improved by local exchange moves until two
separation predicates hold.

Everything is exact; every constructed object can be re-checked by the
verifiers in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .blossom import max_matching, max_matching_with_even_set
from .core import (
    ZERO,
    FractionalMatching,
    Graph,
    GraphInputError,
    InternalInvariantError,
    PairReport,
    PreconditionError,
    SkewMatching,
    WeightedGraph,
    edge_key,
)

__all__ = [
    "GETriple",
    "ReachableSets",
    "GEPair",
    "GEContext",
    "is_factor_critical",
    "ge_decompose",
    "verify_ge_triple",
    "perfect_fractional_matching",
    "c_optimal_matching",
    "verify_c_optimal",
    "reachable",
    "optimize_ge_pair",
    "check_ge_pair",
    "separating_checks",
]


@dataclass(frozen=True)
class GETriple:
    """Separator, separator matching, and the components left behind."""

    separator: frozenset
    matching: dict  # symmetric partner map covering the separator
    components: tuple

    @property
    def singleton_set(self) -> frozenset:
        return frozenset(k[0] for k in self.components if len(k) == 1)

    @property
    def nontrivial_components(self) -> tuple:
        return tuple(k for k in self.components if len(k) > 1)


@dataclass(frozen=True)
class ReachableSets:
    reachable: frozenset
    boundary: frozenset


@dataclass(frozen=True)
class GEPair:
    sigma_tilde: SkewMatching
    mu_tilde: FractionalMatching


@dataclass(frozen=True)
class GEContext:
    """Everything a GE pair is judged against."""

    w: WeightedGraph
    separator: frozenset
    c: object
    mu: FractionalMatching
    reachable: frozenset
    boundary: frozenset
    gamma_b: Fraction


# ---------------------------------------------------------------------------
# Factor-critical graphs and the decomposition
# ---------------------------------------------------------------------------


def is_factor_critical(g: Graph) -> bool:
    """True iff deleting any single vertex leaves a perfectly matchable graph.

    Uses one maximum-matching computation: a connected graph of odd order
    is factor-critical exactly when every vertex is missed by some
    maximum matching.
    """
    n = len(g)
    if n == 0:
        return False
    if n == 1:
        return True
    if n % 2 == 0 or not g.is_connected():
        return False
    _, even = max_matching_with_even_set(g)
    return len(even) == n


def _separator_of(g: Graph, verts: frozenset) -> set:
    """Vertex set whose removal shatters g[verts] into factor-critical parts.

    Recursion: the vertices missable by a maximum matching span the
    factor-critical parts; their outside neighbours join the separator;
    the remaining (perfectly matchable) rest is peeled one vertex at a
    time.  The result attains the matching deficiency of g[verts], which
    is what later makes the separator matchable into distinct components.
    """
    if not verts:
        return set()
    sub = g.subgraph(verts)
    _, missable = max_matching_with_even_set(sub)
    frontier = set()
    for v in missable:
        frontier.update(sub.adjacency(v))
    a_set = frontier - missable
    c_set = set(verts) - missable - a_set
    sep = set(a_set)
    if c_set:
        v = min(c_set)
        sep.add(v)
        sep |= _separator_of(g, frozenset(c_set - {v}))
    return sep


def _match_into_components(g: Graph, sep: Iterable, comps: list) -> dict | None:
    """Match separator vertices into pairwise-distinct components (Kuhn)."""
    comp_of = {}
    for i, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = i
    cands = {
        s: sorted({comp_of[u] for u in g.adjacency(s) if u in comp_of})
        for s in sep
    }
    match_comp: dict = {}

    def improve(s, banned: set) -> bool:
        for ci in cands[s]:
            if ci in banned:
                continue
            banned.add(ci)
            if ci not in match_comp or improve(match_comp[ci], banned):
                match_comp[ci] = s
                return True
        return False

    for s in sorted(sep):
        if not improve(s, set()):
            return None
    pairs: dict = {}
    for ci, s in match_comp.items():
        u = min(x for x in g.adjacency(s) if x in comp_of and comp_of[x] == ci)
        pairs[s] = u
        pairs[u] = s
    return pairs


def ge_decompose(g: Graph) -> GETriple:
    """Compute a separator triple; the result is verified before returning."""
    sep = frozenset(_separator_of(g, frozenset(g.vertices)))
    comps = g.components(within=set(g.vertices) - sep)
    pairs = _match_into_components(g, sep, comps)
    if pairs is None:
        raise InternalInvariantError("separator not matchable into distinct components")
    triple = GETriple(sep, pairs, tuple(comps))
    report = verify_ge_triple(g, triple)
    if not report.ok:
        raise InternalInvariantError(f"decomposition failed verification: {report.message}")
    return triple


def verify_ge_triple(g: Graph, triple: GETriple) -> PairReport:
    """Re-check all triple invariants from scratch."""
    sep = triple.separator
    comps = triple.components
    seen: set = set(sep)
    for comp in comps:
        for v in comp:
            if v in seen:
                return PairReport(False, "partition", v, f"vertex {v!r} appears twice")
            seen.add(v)
    if seen != set(g.vertices):
        return PairReport(False, "partition", None, "components and separator miss vertices")
    expected = {tuple(c) for c in g.components(within=set(g.vertices) - sep)}
    if expected != set(comps):
        return PairReport(False, "components", None, "listed components are wrong")
    for comp in comps:
        if not is_factor_critical(g.subgraph(comp)):
            return PairReport(False, "factor-critical", comp, f"component {comp} not factor-critical")
    m = triple.matching
    used_comps: set = set()
    comp_of = {}
    for i, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = i
    for s in sep:
        if s not in m:
            return PairReport(False, "covers", s, f"separator vertex {s!r} unmatched")
        u = m[s]
        if m.get(u) != s:
            return PairReport(False, "matching", s, "partner map is not symmetric")
        if u in sep or u not in comp_of:
            return PairReport(False, "matching", s, f"{s!r} matched inside the separator")
        if not g.has_edge(s, u):
            return PairReport(False, "matching", s, f"matched pair ({s!r},{u!r}) is not an edge")
        ci = comp_of[u]
        if ci in used_comps:
            return PairReport(False, "distinct", s, "two separator vertices share a component")
        used_comps.add(ci)
    return PairReport(True)


def perfect_fractional_matching(k: Graph) -> FractionalMatching:
    """Average the near-perfect matchings of a factor-critical graph.

    The result loads every vertex with exactly 1.
    """
    n = len(k)
    if n <= 1 or not is_factor_critical(k):
        raise PreconditionError("need a factor-critical graph on more than one vertex")
    vals: dict = {}
    share = Fraction(1, n - 1)
    for v in k.vertices:
        pairs = max_matching(k.subgraph(set(k.vertices) - {v}))
        if len(pairs) != n - 1:
            raise InternalInvariantError("near-perfect matching missing")
        for a, b in pairs.items():
            if a < b:
                e = edge_key(a, b)
                vals[e] = vals.get(e, ZERO) + share
    mu = FractionalMatching(vals)
    if any(mu.load(v) != 1 for v in k.vertices):
        raise InternalInvariantError("averaged matching is not perfect")
    return mu


# ---------------------------------------------------------------------------
# c-optimal fractional matchings
# ---------------------------------------------------------------------------


def _reselect_matching(g: Graph, w: WeightedGraph, sep: frozenset, pairs: dict,
                       singles: frozenset, c) -> dict:
    """Local exchanges minimising uncovered singleton neighbours of c.

    While an uncovered singleton u in N_w(c) reaches, by an alternating
    walk through matched separator vertices, a covered vertex of a
    non-trivial component, the walk is flipped: u becomes covered and the
    component vertex is freed.
    """
    pairs = dict(pairs)
    while True:
        swapped = False
        targets = [u for u in sorted(w.neighbour_set(c) & singles) if u not in pairs]
        for u in targets:
            prev_s: dict = {}
            prev_e: dict = {}
            seen_e = {u}
            seen_s: set = set()
            frontier = [u]
            hit = None
            while frontier and hit is None:
                nxt = []
                for x in frontier:
                    for v in sorted(g.adjacency(x)):
                        if v not in sep or v in seen_s:
                            continue
                        seen_s.add(v)
                        prev_s[v] = x
                        y = pairs[v]
                        if y in singles:
                            if y not in seen_e:
                                seen_e.add(y)
                                prev_e[y] = v
                                nxt.append(y)
                        else:
                            hit = (v, y)
                            break
                    if hit:
                        break
                frontier = nxt
            if hit is None:
                continue
            v, y = hit
            del pairs[y]
            s = v
            while True:
                e = prev_s[s]
                pairs[s] = e
                pairs[e] = s
                if e == u:
                    break
                s = prev_e[e]
            swapped = True
            break
        if not swapped:
            return pairs


class _MutableMatching:
    """Fractional matching under construction, with incremental loads."""

    __slots__ = ("vals", "adj", "loads")

    def __init__(self):
        self.vals: dict = {}
        self.adj: dict = {}
        self.loads: dict = {}

    def add(self, u, v, amount: Fraction) -> None:
        if amount == 0:
            return
        e = edge_key(u, v)
        x = self.vals.get(e, ZERO) + amount
        if x < 0:
            raise InternalInvariantError(f"negative matching value on {e!r}")
        if x == 0:
            del self.vals[e]
            del self.adj[u][v]
            del self.adj[v][u]
        else:
            self.vals[e] = x
            self.adj.setdefault(u, {})[v] = x
            self.adj.setdefault(v, {})[u] = x
        for z in (u, v):
            ld = self.loads.get(z, ZERO) + amount
            if ld < 0 or ld > 1:
                raise InternalInvariantError(f"load {ld} at {z!r} outside [0,1]")
            self.loads[z] = ld

    def load(self, v) -> Fraction:
        return self.loads.get(v, ZERO)

    def freeze(self) -> FractionalMatching:
        return FractionalMatching(self.vals, validate=False)


@dataclass(frozen=True)
class COptimalResult:
    mu: FractionalMatching
    triple: GETriple


def c_optimal_matching(w: WeightedGraph, triple: GETriple, c) -> COptimalResult:
    """Fractional matching maximising the saturation of c's neighbourhood.

    Construction: re-select the separator matching by local exchanges,
    extend it to cover every non-trivial component, then push weight
    towards unsaturated singleton neighbours of c along alternating
    paths.  The companion triple (whose matching may have changed) is
    returned alongside.
    """
    if c not in triple.separator:
        raise PreconditionError(f"{c!r} is not in the separator")
    g = w.unweighted()
    sep = triple.separator
    singles = triple.singleton_set

    pairs = _reselect_matching(g, w, sep, triple.matching, singles, c)
    new_triple = GETriple(sep, pairs, triple.components)

    mm = _MutableMatching()
    for s in sep:
        mm.add(s, pairs[s], Fraction(1))
    for comp in triple.nontrivial_components:
        anchored = [x for x in comp if pairs.get(x) in sep]
        if anchored:
            hole = anchored[0]
            sub = g.subgraph(set(comp) - {hole})
            pm = max_matching(sub)
            if len(pm) != len(comp) - 1:
                raise InternalInvariantError("component lost factor-criticality")
            for a, b in pm.items():
                if a < b:
                    mm.add(a, b, Fraction(1))
        else:
            pfm = perfect_fractional_matching(g.subgraph(comp))
            for (a, b), x in pfm.items():
                mm.add(a, b, x)

    _augment_towards(w, sep, singles, c, mm)
    report = verify_c_optimal(w, new_triple, c, mm.freeze())
    if not report.ok:
        raise InternalInvariantError(f"optimised matching failed verification: {report.message}")
    return COptimalResult(mm.freeze(), new_triple)


def _augment_towards(w: WeightedGraph, sep: frozenset, singles: frozenset, c,
                     mm: _MutableMatching) -> None:
    """Shift weight along alternating paths towards unsaturated c-neighbours."""
    g_adj = {v: w.neighbour_set(v) for v in w.vertices}
    cap = 10 * len(w.vertices) * (sum(len(a) for a in g_adj.values()) // 2 + 1)
    steps = 0
    while True:
        path = _find_shift_path(w, g_adj, sep, singles, c, mm)
        if path is None:
            return
        u, chain, target = path
        delta = min(
            w.weight(c, u) - mm.load(u),
            mm.load(target) - w.weight(c, target),
        )
        prev = u
        for (s, e) in chain:
            delta = min(delta, mm.adj[s][e])
            prev = e
        if delta <= 0:
            raise InternalInvariantError("alternating shift with nonpositive slack")
        prev = u
        for (s, e) in chain:
            mm.add(s, e, -delta)  # lighten before loading, to keep loads in [0,1]
            mm.add(prev, s, delta)
            prev = e
        steps += 1
        if steps > cap:
            raise InternalInvariantError("alternating-shift loop exceeded its cap")


def _find_shift_path(w, g_adj, sep, singles, c, mm):
    """Shortest alternating path from an unsaturated singleton to an
    oversaturated one; None at the fixpoint."""
    sources = [u for u in sorted(w.neighbour_set(c) & singles) if mm.load(u) < w.weight(c, u)]
    if not sources:
        return None
    prev_s: dict = {}
    prev_e: dict = {}
    seen_e = set(sources)
    seen_s: set = set()
    frontier = list(sources)
    origin = {u: u for u in sources}
    while frontier:
        nxt = []
        for x in frontier:
            for v in sorted(g_adj[x] & sep):
                if v in seen_s:
                    continue
                seen_s.add(v)
                prev_s[v] = x
                for y in sorted(mm.adj.get(v, ())):
                    if y in sep:
                        continue
                    if y not in singles:
                        raise InternalInvariantError(
                            "alternating reach left the singleton components"
                        )
                    if mm.load(y) > w.weight(c, y):
                        chain = [(v, y)]
                        s = v
                        while True:
                            e = prev_s[s]
                            if e in origin:
                                u0 = e
                                break
                            s2 = prev_e[e]
                            chain.append((s2, e))
                            s = s2
                        chain.reverse()
                        return (u0, chain, y)
                    if y not in seen_e:
                        seen_e.add(y)
                        prev_e[y] = v
                        nxt.append(y)
        frontier = nxt
    return None


def verify_c_optimal(w: WeightedGraph, triple: GETriple, c,
                     mu: FractionalMatching) -> PairReport:
    """Check support, coverage, and the three alternating-path conditions."""
    g = w.unweighted()
    sep = triple.separator
    singles = triple.singleton_set
    comp_of = {}
    for i, comp in enumerate(triple.components):
        for v in comp:
            comp_of[v] = i

    # support: no separator-separator edges; at most one support edge
    # between the separator and each non-trivial component (extendable to
    # a separator matching); everything else inside components or into
    # singletons.
    forced: dict = {}
    for (a, b), x in mu.items():
        ina, inb = a in sep, b in sep
        if ina and inb:
            return PairReport(False, "support", (a, b), "separator-separator support edge")
        if not ina and not inb:
            if comp_of.get(a) != comp_of.get(b):
                return PairReport(False, "support", (a, b), "support edge crosses components")
            continue
        s, y = (a, b) if ina else (b, a)
        if y in singles:
            continue
        ci = comp_of[y]
        if forced.get(s, ci) != ci or (s in forced and forced[s] != ci):
            return PairReport(False, "support", s, "two matching edges from one separator vertex")
        if ci in forced.values() and forced.get(s) != ci:
            return PairReport(False, "support", y, "component receives two matching edges")
        forced[s] = ci

    # coverage of separator and non-trivial components
    loads = mu.loads()
    for v in sep:
        if loads.get(v, ZERO) != 1:
            return PairReport(False, "covers", v, f"separator vertex {v!r} not covered")
    for comp in triple.nontrivial_components:
        for v in comp:
            if loads.get(v, ZERO) != 1:
                return PairReport(False, "covers", v, f"component vertex {v!r} not covered")

    # an admissible separator matching extending the forced edges must exist
    comps = list(triple.components)
    cands = {}
    for s in sep:
        if s in forced:
            cands[s] = [forced[s]]
        else:
            cands[s] = sorted({comp_of[u] for u in g.adjacency(s) if u in comp_of})
    match_comp: dict = {}

    def improve(s, banned: set) -> bool:
        for ci in cands[s]:
            if ci in banned:
                continue
            banned.add(ci)
            if ci not in match_comp or improve(match_comp[ci], banned):
                match_comp[ci] = s
                return True
        return False

    for s in sorted(sep):
        if not improve(s, set()):
            return PairReport(False, "support", s, "support not extendable to a separator matching")

    # alternating-path conditions B1-B3
    adj_mu = mu.support_adjacency()
    reach_s, reach_x, bad = _alternating_closure(w, g, sep, singles, mu, c, adj_mu)
    if bad is not None:
        return PairReport(False, "B1", bad, "alternating path reaches a non-singleton")
    for v in reach_s:
        if loads.get(v, ZERO) != 1:
            return PairReport(False, "B2", v, f"reached separator vertex {v!r} not covered")
        for x in adj_mu.get(v, ()):
            if x in singles and loads.get(x, ZERO) > w.weight(c, x):
                return PairReport(False, "B3", x, f"support neighbour {x!r} oversaturated")
    return PairReport(True)


def _alternating_closure(w, g, sep, singles, mu, c, adj_mu):
    """Alternating reach from unsaturated singleton neighbours of c.

    Returns (reached separator vertices, reached singletons, witness of a
    non-singleton support successor or None).
    """
    loads = mu.loads()
    sources = [
        u for u in sorted(w.neighbour_set(c) & singles)
        if loads.get(u, ZERO) < w.weight(c, u)
    ]
    seen_e = set(sources)
    seen_s: set = set()
    frontier = list(sources)
    while frontier:
        nxt = []
        for x in frontier:
            for v in g.adjacency(x):
                if v not in sep or v in seen_s:
                    continue
                seen_s.add(v)
                for y in adj_mu.get(v, ()):
                    if y in sep:
                        continue
                    if y not in singles:
                        return seen_s, seen_e, (v, y)
                    if y not in seen_e:
                        seen_e.add(y)
                        nxt.append(y)
        frontier = nxt
    return seen_s, seen_e, None


def reachable(w: WeightedGraph, sep: frozenset, mu: FractionalMatching, c) -> ReachableSets:
    """Vertices on alternating paths from unsaturated singleton c-neighbours.

    The boundary is the union of their neighbourhoods (always inside the
    separator for a c-optimal matching).
    """
    g = w.unweighted()
    singles = frozenset(
        v for v in w.vertices if v not in sep and not (w.neighbour_set(v) - sep)
    )
    adj_mu = mu.support_adjacency()
    seen_s, seen_e, bad = _alternating_closure(w, g, sep, singles, mu, c, adj_mu)
    if bad is not None:
        raise InternalInvariantError("reachability left the singleton components")
    reach = frozenset(seen_e)
    boundary = frozenset().union(*(g.adjacency(x) for x in reach)) if reach else frozenset()
    if not boundary <= sep:
        raise InternalInvariantError("boundary escapes the separator")
    return ReachableSets(reach, boundary)


# ---------------------------------------------------------------------------
# GE pairs
# ---------------------------------------------------------------------------


def check_ge_pair(pair: GEPair, ctx: GEContext) -> PairReport:
    """Validate the nine clauses a hybrid pair must satisfy."""
    sig, mt = pair.sigma_tilde, pair.mu_tilde
    w, sep, c = ctx.w, ctx.separator, ctx.c
    R, SR = ctx.reachable, ctx.boundary
    if sig.gamma != ctx.gamma_b or sig.gamma <= 1:
        return PairReport(False, "GE1", None, f"skew parameter {sig.gamma} invalid")
    ls, lm = sig.loads(), mt.loads()
    for v in set(ls) | set(lm):
        if ls.get(v, ZERO) + lm.get(v, ZERO) > 1:
            return PairReport(False, "GE2", v, f"joint load exceeds 1 at {v!r}")
    anchor = sig.anchor()
    if not anchor <= SR:
        return PairReport(False, "GE3", min(anchor - SR), "anchor leaves the boundary")
    for v, s1 in sig.sigma1_map().items():
        if s1 > w.weight(c, v):
            return PairReport(False, "GE4", v, "anchor does not fit c's neighbourhood")
    tails = {v for v, ld in ls.items() if ld > 0} - anchor
    if not tails <= R:
        return PairReport(False, "GE5", min(tails - R), "tail leaves the reachable set")
    for y in R:
        if ls.get(y, ZERO) + lm.get(y, ZERO) > w.weight(c, y):
            return PairReport(False, "GE6", y, "reachable vertex oversaturated")
    for y in w.neighbour_set(c):
        if y in R:
            continue
        if ls.get(y, ZERO) + lm.get(y, ZERO) < w.weight(c, y):
            return PairReport(False, "GE7", y, "unreachable neighbour undersaturated")
    for v in sep:
        if ls.get(v, ZERO) + lm.get(v, ZERO) != 1:
            return PairReport(False, "GE8", v, f"separator vertex {v!r} not covered")
    touched = R | SR
    for (a, b), x in mt.items():
        if a in touched or b in touched:
            if not ((a in R and b in SR) or (a in SR and b in R)):
                return PairReport(False, "GE9", (a, b), "support edge misplaced near the reachable set")
        elif x != ctx.mu.value(a, b):
            return PairReport(False, "GE9", (a, b), "matching changed away from the reachable set")
    for (a, b), x in ctx.mu.items():
        if a in touched or b in touched:
            continue
        if mt.value(a, b) != x:
            return PairReport(False, "GE9", (a, b), "matching changed away from the reachable set")
    return PairReport(True)


def separating_checks(pair: GEPair, ctx: GEContext, d) -> PairReport:
    """Both separation predicates for an undersaturated reachable vertex d."""
    sig, mt = pair.sigma_tilde, pair.mu_tilde
    w, sep, c = ctx.w, ctx.separator, ctx.c
    ls, lm = sig.loads(), mt.loads()
    if ls.get(d, ZERO) + lm.get(d, ZERO) >= w.weight(c, d):
        raise PreconditionError(f"{d!r} is already saturated")
    nd = w.neighbour_set(d)
    for x in sorted(w.neighbour_set(c) & nd):
        if ls.get(x, ZERO) != w.weight(c, x):
            return PairReport(False, "separation-I", x, "common neighbour not pinned")
    # restrictions of the pair to support edges meeting N_w(d)
    touched_sig: dict = {}
    for (u, v), x in sig.items():
        if u in nd or v in nd:
            touched_sig[u] = touched_sig.get(u, ZERO) + x * sig.tail_share
            touched_sig[v] = touched_sig.get(v, ZERO) + x * sig.head_share
    touched_mu: dict = {}
    for (a, b), x in mt.items():
        if a in nd or b in nd:
            touched_mu[a] = touched_mu.get(a, ZERO) + x
            touched_mu[b] = touched_mu.get(b, ZERO) + x
    left = {
        x for x in w.neighbour_set(c)
        if x in sep and ls.get(x, ZERO) < w.weight(c, x)
    }
    right = {
        y for y in w.neighbour_set(c)
        if y not in sep
        and touched_sig.get(y, ZERO) + touched_mu.get(y, ZERO) > 0
    }
    for x in sorted(left):
        for y in sorted(w.neighbour_set(x) & right):
            return PairReport(False, "separation-II", (x, y), "edge crosses the separation")
    return PairReport(True)


class _PairState:
    """GE pair under optimisation: loads tracked incrementally."""

    def __init__(self, mu: FractionalMatching, gamma: Fraction):
        self.gamma = gamma
        self.sig: dict = {}
        self.sig_loads: dict = {}
        self.mu = _MutableMatching()
        for (a, b), x in mu.items():
            self.mu.add(a, b, x)

    def add_sig(self, u, v, amount: Fraction) -> None:
        if amount == 0:
            return
        g = self.gamma
        x = self.sig.get((u, v), ZERO) + amount
        if x < 0:
            raise InternalInvariantError("negative skew value")
        if x == 0:
            self.sig.pop((u, v))
        else:
            self.sig[(u, v)] = x
        for z, share in ((u, 1 / (1 + g)), (v, g / (1 + g))):
            ld = self.sig_loads.get(z, ZERO) + amount * share
            self.sig_loads[z] = ld
            if ld < 0 or ld + self.mu.load(z) > 1:
                raise InternalInvariantError("pair load left [0,1]")

    def total(self, v) -> Fraction:
        return self.sig_loads.get(v, ZERO) + self.mu.load(v)

    def sig_load(self, v) -> Fraction:
        return self.sig_loads.get(v, ZERO)


def optimize_ge_pair(w: WeightedGraph, triple: GETriple, c,
                     mu: FractionalMatching, gamma_b: Fraction) -> tuple[GEPair, GEContext]:
    """Improve the trivial pair by exchange moves until both separation
    predicates hold; the objective (saturation of c's neighbourhood)
    strictly increases with every move.

    Two move families are used.  The direct move shifts matching weight
    at a pinned common neighbour into skew weight towards an
    undersaturated reachable vertex.  The preparatory move re-routes
    weight touching that vertex's neighbourhood without changing the
    objective, after which a direct move applies.
    """
    gamma_b = Fraction(gamma_b)
    if gamma_b <= 1:
        raise PreconditionError(f"skew parameter must exceed 1, got {gamma_b}")
    sets = reachable(w, triple.separator, mu, c)
    R, SR = sets.reachable, sets.boundary
    ctx = GEContext(w, triple.separator, c, mu, R, SR, gamma_b)
    st = _PairState(mu, gamma_b)
    g = gamma_b
    nbr_c = w.neighbour_set(c)
    cap = 10 * len(w.vertices) * (sum(1 for _ in w.edges()) + 1)
    steps = 0

    def move_direct(d) -> bool:
        for x in sorted(nbr_c & w.neighbour_set(d)):
            if st.sig_load(x) >= w.weight(c, x):
                continue
            support = sorted(st.mu.adj.get(x, ()))
            if not support:
                raise InternalInvariantError("pinnable vertex has no matching support")
            y = support[0]
            delta = min(
                (g - 1) / g * (w.weight(c, x) - st.sig_load(x)),
                (w.weight(c, d) - st.total(d)) / g,
                (g - 1) / g * st.mu.adj[x][y],
            )
            if delta <= 0:
                raise InternalInvariantError("direct move with nonpositive step")
            st.mu.add(x, y, -g / (g - 1) * delta)
            if y == d:
                st.add_sig(x, d, (1 + g) * delta + (1 + g) / (g - 1) * delta)
            else:
                st.add_sig(x, d, (1 + g) * delta)
                st.add_sig(x, y, (1 + g) / (g - 1) * delta)
            return True
        return False

    def move_prepare(d) -> bool:
        nd = w.neighbour_set(d)
        for x in sorted(nbr_c & triple.separator):
            if st.sig_load(x) >= w.weight(c, x):
                continue
            for y in sorted(w.neighbour_set(x) - triple.separator):
                if y not in nbr_c:
                    continue
                zs_mu = sorted(z for z in st.mu.adj.get(y, ()) if z in nd)
                zs_sig = sorted(
                    z for (z, yy) in st.sig if yy == y and z in nd and st.sig[(z, y)] > 0
                )
                if zs_mu:
                    z = zs_mu[0]
                    delta = min(st.mu.adj[z][y], w.weight(c, d) - st.total(d))
                    if delta <= 0:
                        continue
                    st.mu.add(z, d, delta)
                    st.mu.add(z, y, -delta)
                elif zs_sig:
                    z = zs_sig[0]
                    delta = min(st.sig[(z, y)] / g, (w.weight(c, d) - st.total(d)) / g)
                    if delta <= 0:
                        continue
                    st.add_sig(z, d, (1 + g) * delta)
                    st.add_sig(z, y, -(1 + g) * delta)
                else:
                    continue
                if not move_direct(y):
                    raise InternalInvariantError("preparatory move enabled no direct move")
                return True
        return False

    while True:
        moved = False
        for d in sorted(R):
            if st.total(d) < w.weight(c, d):
                if move_direct(d) or move_prepare(d):
                    moved = True
                    steps += 1
                    break
        if not moved:
            break
        if steps > cap:
            raise InternalInvariantError("improvement loop exceeded its cap")

    pair = GEPair(SkewMatching(gamma_b, st.sig), st.mu.freeze())
    report = check_ge_pair(pair, ctx)
    if not report.ok:
        raise InternalInvariantError(f"optimised pair failed {report.clause}: {report.message}")
    loads = {
        v: pair.sigma_tilde.load(v) + pair.mu_tilde.load(v) for v in w.vertices
    }
    for d in sorted(R):
        if loads[d] < w.weight(c, d):
            rep = separating_checks(pair, ctx, d)
            if not rep.ok:
                raise InternalInvariantError(
                    f"fixpoint violates {rep.clause} at {rep.witness!r}"
                )
    return pair, ctx
