"""Exact-rational weighted graphs and the fractional / skew matching kernel.

Every numeric quantity in this module is a ``fractions.Fraction``; no
floating point is used anywhere.  All container types are immutable by
convention after construction (algorithms build plain dicts and seal them
into these wrappers), so values can be shared freely between threads.

Conventions:

* Vertices are arbitrary sortable hashable ids (ints or strings).
* Undirected edges are canonical sorted 2-tuples; loops are forbidden.
* Weighted graphs reject weights outside (0, 1]; a zero-weight edge is
  simply not an edge, so N(v) always equals the weighted neighbourhood.
* A skew matching with parameter gamma distributes each oriented edge's
  mass between tail and head in ratio 1 : gamma.  The tail share of a
  vertex is ``sigma1``, the head share ``sigma2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Frac",
    "as_fraction",
    "edge_key",
    "GraphInputError",
    "PreconditionError",
    "InternalInvariantError",
    "Graph",
    "WeightedGraph",
    "DirectedWeight",
    "FractionalMatching",
    "SkewMatching",
    "AnchoredPair",
    "PairReport",
    "vertex_loads",
    "check_preceq",
    "check_trianglelefteq",
    "truncate",
    "saturation",
    "saturates",
    "covers",
    "fits_neighbourhood",
    "check_anchored_pair",
    "combine_pairs",
    "fractional_from_1skew",
    "min_degree_subgraph",
]

Frac = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


class GraphInputError(ValueError):
    """Malformed graph/matching input (bad weight range, loop, unknown id)."""


class PreconditionError(ValueError):
    """An operation's stated hypothesis does not hold for the given input."""


class InternalInvariantError(RuntimeError):
    """A property the theory guarantees failed; signals an implementation bug."""


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise GraphInputError(f"floating point value {x!r} rejected; use p/q strings")
    raise GraphInputError(f"cannot interpret {x!r} as an exact rational")


def edge_key(u, v) -> tuple:
    """Canonical (sorted) form of an undirected edge; rejects loops."""
    if u == v:
        raise GraphInputError(f"loop at {u!r} is not allowed")
    return (u, v) if u <= v else (v, u)


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------


class Graph:
    """Simple undirected unweighted graph with sortable vertex ids."""

    __slots__ = ("_vertices", "_adj")

    def __init__(self, vertices: Iterable, edges: Iterable[tuple] = ()):
        self._adj: dict = {v: set() for v in vertices}
        for u, v in edges:
            self.__add_edge(u, v)
        self._vertices: tuple = tuple(sorted(self._adj))

    def __add_edge(self, u, v):
        if u == v:
            raise GraphInputError(f"loop at {u!r}")
        if u not in self._adj or v not in self._adj:
            raise GraphInputError(f"edge ({u!r},{v!r}) uses unknown vertex")
        self._adj[u].add(v)
        self._adj[v].add(u)

    @property
    def vertices(self) -> tuple:
        return self._vertices

    def __len__(self):
        return len(self._vertices)

    def __contains__(self, v):
        return v in self._adj

    def neighbours(self, v) -> frozenset:
        return frozenset(self._adj[v])

    def adjacency(self, v) -> set:
        return self._adj[v]

    def has_edge(self, u, v) -> bool:
        return v in self._adj.get(u, ())

    def degree(self, v) -> int:
        return len(self._adj[v])

    def edges(self) -> Iterator[tuple]:
        for u in self._vertices:
            for v in sorted(self._adj[u]):
                if u < v:
                    yield (u, v)

    def num_edges(self) -> int:
        return sum(len(s) for s in self._adj.values()) // 2

    def subgraph(self, keep: Iterable) -> "Graph":
        keep = set(keep)
        return Graph(keep, [(u, v) for u, v in self.edges() if u in keep and v in keep])

    def components(self, within: Iterable | None = None) -> list[tuple]:
        """Connected components (sorted tuples), optionally inside a vertex set."""
        allowed = set(self._vertices) if within is None else set(within)
        seen: set = set()
        out = []
        for start in self._vertices:
            if start not in allowed or start in seen:
                continue
            comp = [start]
            seen.add(start)
            stack = [start]
            while stack:
                x = stack.pop()
                for y in self._adj[x]:
                    if y in allowed and y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            out.append(tuple(sorted(comp)))
        return out

    def is_connected(self) -> bool:
        if not self._vertices:
            return True
        return len(self.components()) == 1

    def average_degree(self) -> Fraction:
        if not self._vertices:
            raise PreconditionError("average degree of the empty graph")
        return Fraction(2 * self.num_edges(), len(self._vertices))


class WeightedGraph:
    """Undirected graph with exact edge weights in (0, 1].

    Zero-weight edges are dropped on ingestion, so the combinatorial
    neighbourhood and the positive-weight neighbourhood always agree.
    """

    __slots__ = ("_vertices", "_adj")

    def __init__(self, vertices: Iterable, weights: Mapping | Iterable = ()):
        self._adj: dict = {v: {} for v in vertices}
        items = weights.items() if isinstance(weights, Mapping) else weights
        for entry in items:
            if isinstance(entry[0], tuple):
                (u, v), w = entry
            else:
                u, v, w = entry
            w = as_fraction(w)
            if w == 0:
                continue
            if not (0 < w <= 1):
                raise GraphInputError(f"weight {w} of edge ({u!r},{v!r}) outside (0,1]")
            if u == v:
                raise GraphInputError(f"loop at {u!r}")
            if u not in self._adj or v not in self._adj:
                raise GraphInputError(f"edge ({u!r},{v!r}) uses unknown vertex")
            self._adj[u][v] = w
            self._adj[v][u] = w
        self._vertices = tuple(sorted(self._adj))

    @property
    def vertices(self) -> tuple:
        return self._vertices

    def __len__(self):
        return len(self._vertices)

    def __contains__(self, v):
        return v in self._adj

    def neighbours(self, v) -> tuple:
        return tuple(sorted(self._adj[v]))

    def neighbour_set(self, v) -> set:
        return set(self._adj[v])

    def weight(self, u, v) -> Fraction:
        """w(uv); zero when uv is not an edge."""
        return self._adj.get(u, {}).get(v, ZERO)

    def has_edge(self, u, v) -> bool:
        return v in self._adj.get(u, ())

    def edges(self) -> Iterator[tuple]:
        for u in self._vertices:
            for v, w in sorted(self._adj[u].items()):
                if u < v:
                    yield (u, v, w)

    def deg_w(self, v, among: Iterable | None = None) -> Fraction:
        row = self._adj[v]
        if among is None:
            return sum(row.values(), ZERO)
        return sum((row[u] for u in among if u in row), ZERO)

    def delta_w(self) -> Fraction:
        return min((self.deg_w(v) for v in self._vertices), default=ZERO)

    def Delta_w(self) -> Fraction:
        return max((self.deg_w(v) for v in self._vertices), default=ZERO)

    def unweighted(self) -> Graph:
        return Graph(self._vertices, [(u, v) for u, v, _ in self.edges()])

    def to_directed(self) -> "DirectedWeight":
        values = {}
        for u, v, w in self.edges():
            values[(u, v)] = w
            values[(v, u)] = w
        return DirectedWeight(self._vertices, values)


class DirectedWeight:
    """Nonnegative weights on oriented vertex pairs (possibly asymmetric)."""

    __slots__ = ("_vertices", "_out")

    def __init__(self, vertices: Iterable, values: Mapping = ()):
        self._out: dict = {v: {} for v in vertices}
        items = values.items() if isinstance(values, Mapping) else values
        for (u, v), w in items:
            w = as_fraction(w)
            if w < 0:
                raise GraphInputError(f"negative oriented weight on ({u!r},{v!r})")
            if w == 0:
                continue
            if u == v:
                raise GraphInputError(f"loop at {u!r}")
            if u not in self._out or v not in self._out:
                raise GraphInputError(f"pair ({u!r},{v!r}) uses unknown vertex")
            self._out[u][v] = w
        self._vertices = tuple(sorted(self._out))

    @property
    def vertices(self) -> tuple:
        return self._vertices

    def __contains__(self, v):
        return v in self._out

    def weight(self, u, v) -> Fraction:
        return self._out.get(u, {}).get(v, ZERO)

    def out_neighbours(self, u) -> tuple:
        return tuple(sorted(self._out[u]))

    def out_row(self, u) -> dict:
        return self._out[u]

    def deg_w(self, u, among: Iterable | None = None) -> Fraction:
        row = self._out[u]
        if among is None:
            return sum(row.values(), ZERO)
        return sum((row[x] for x in among if x in row), ZERO)


# ---------------------------------------------------------------------------
# Matchings
# ---------------------------------------------------------------------------


class FractionalMatching:
    """Edge weights in [0,1] whose load at every vertex is at most 1."""

    __slots__ = ("_values",)

    def __init__(self, values: Mapping = (), *, validate: bool = True):
        vals: dict = {}
        items = values.items() if isinstance(values, Mapping) else values
        for e, x in items:
            x = as_fraction(x)
            if x == 0:
                continue
            if x < 0:
                raise GraphInputError(f"negative matching value on {e!r}")
            vals[edge_key(*e)] = x
        self._values = vals
        if validate:
            bad = next((v for v, ld in self.loads().items() if ld > 1), None)
            if bad is not None:
                raise GraphInputError(f"fractional matching overloads vertex {bad!r}")

    @classmethod
    def zero(cls) -> "FractionalMatching":
        return cls({})

    def value(self, u, v) -> Fraction:
        return self._values.get(edge_key(u, v), ZERO)

    def items(self):
        return self._values.items()

    def support(self) -> tuple:
        return tuple(sorted(self._values))

    def support_adjacency(self) -> dict:
        adj: dict = {}
        for (u, v), x in self._values.items():
            adj.setdefault(u, {})[v] = x
            adj.setdefault(v, {})[u] = x
        return adj

    def load(self, v) -> Fraction:
        total = ZERO
        for (a, b), x in self._values.items():
            if a == v or b == v:
                total += x
        return total

    def loads(self) -> dict:
        out: dict = {}
        for (a, b), x in self._values.items():
            out[a] = out.get(a, ZERO) + x
            out[b] = out.get(b, ZERO) + x
        return out

    def weight(self) -> Fraction:
        return sum(self._values.values(), ZERO)

    def covered_vertices(self) -> set:
        """Vertices with strictly positive load."""
        out = set()
        for a, b in self._values:
            out.add(a)
            out.add(b)
        return out

    def scaled(self, t) -> "FractionalMatching":
        t = as_fraction(t)
        if not (0 <= t <= 1):
            raise PreconditionError(f"scaling factor {t} outside [0,1]")
        return FractionalMatching(
            {e: x * t for e, x in self._values.items()}, validate=False
        )

    def plus(self, other: "FractionalMatching") -> "FractionalMatching":
        vals = dict(self._values)
        for e, x in other._values.items():
            vals[e] = vals.get(e, ZERO) + x
        return FractionalMatching(vals)

    def minus(self, other: "FractionalMatching") -> "FractionalMatching":
        vals = dict(self._values)
        for e, x in other._values.items():
            y = vals.get(e, ZERO) - x
            if y < 0:
                raise PreconditionError(f"subtrahend exceeds minuend on edge {e!r}")
            vals[e] = y
        return FractionalMatching(vals, validate=False)

    def leq(self, other: "FractionalMatching") -> bool:
        return all(x <= other._values.get(e, ZERO) for e, x in self._values.items())

    def __eq__(self, other):
        return isinstance(other, FractionalMatching) and self._values == other._values

    def __hash__(self):
        return hash(frozenset(self._values.items()))

    def __repr__(self):
        return f"FractionalMatching(W={self.weight()}, |supp|={len(self._values)})"


class SkewMatching:
    """Oriented-edge weights that load tails and heads in ratio 1 : gamma.

    The load cap is: for every u, sigma1(u) + sigma2(u) <= 1 where
    sigma1(u) = sum_v sigma(u->v)/(1+gamma) and
    sigma2(u) = gamma * sum_v sigma(v->u)/(1+gamma).
    """

    __slots__ = ("gamma", "_values")

    def __init__(self, gamma, values: Mapping = (), *, validate: bool = True):
        self.gamma = as_fraction(gamma)
        if self.gamma < 0:
            raise GraphInputError(f"negative skew {self.gamma}")
        vals: dict = {}
        items = values.items() if isinstance(values, Mapping) else values
        for (u, v), x in items:
            x = as_fraction(x)
            if x == 0:
                continue
            if x < 0:
                raise GraphInputError(f"negative skew value on ({u!r},{v!r})")
            if u == v:
                raise GraphInputError(f"loop at {u!r}")
            vals[(u, v)] = x
        self._values = vals
        if validate:
            bad = next((v for v, ld in self.loads().items() if ld > 1), None)
            if bad is not None:
                raise GraphInputError(f"skew matching overloads vertex {bad!r}")

    @classmethod
    def zero(cls, gamma) -> "SkewMatching":
        return cls(gamma, {})

    @property
    def tail_share(self) -> Fraction:
        return 1 / (1 + self.gamma)

    @property
    def head_share(self) -> Fraction:
        return self.gamma / (1 + self.gamma)

    def value(self, u, v) -> Fraction:
        return self._values.get((u, v), ZERO)

    def items(self):
        return self._values.items()

    def support(self) -> tuple:
        return tuple(sorted(self._values))

    def sigma1(self, v) -> Fraction:
        s = sum((x for (a, _), x in self._values.items() if a == v), ZERO)
        return s / (1 + self.gamma)

    def sigma2(self, v) -> Fraction:
        s = sum((x for (_, b), x in self._values.items() if b == v), ZERO)
        return s * self.gamma / (1 + self.gamma)

    def load(self, v) -> Fraction:
        return self.sigma1(v) + self.sigma2(v)

    def tail_sums(self) -> dict:
        out: dict = {}
        for (a, _), x in self._values.items():
            out[a] = out.get(a, ZERO) + x
        return out

    def loads(self) -> dict:
        out: dict = {}
        ts, hs = self.tail_share, self.head_share
        for (a, b), x in self._values.items():
            out[a] = out.get(a, ZERO) + x * ts
            out[b] = out.get(b, ZERO) + x * hs
        return out

    def sigma1_map(self) -> dict:
        ts = self.tail_share
        out: dict = {}
        for (a, _), x in self._values.items():
            out[a] = out.get(a, ZERO) + x * ts
        return out

    def anchor(self) -> frozenset:
        return frozenset(a for (a, _), x in self._values.items() if x > 0)

    def weight(self) -> Fraction:
        return sum(self._values.values(), ZERO)

    def tail_set(self) -> frozenset:
        """Vertices that receive head mass but no tail mass."""
        return frozenset(b for (_, b) in self._values) - self.anchor()

    def covered_vertices(self) -> set:
        out = set()
        for a, b in self._values:
            out.add(a)
            out.add(b)
        return out

    def scaled(self, t) -> "SkewMatching":
        t = as_fraction(t)
        if not (0 <= t <= 1):
            raise PreconditionError(f"scaling factor {t} outside [0,1]")
        return SkewMatching(
            self.gamma, {e: x * t for e, x in self._values.items()}, validate=False
        )

    def scaled_to_weight(self, target) -> "SkewMatching":
        target = as_fraction(target)
        w = self.weight()
        if target == w:
            return self
        if w == 0 or target > w:
            raise PreconditionError(
                f"cannot scale weight {w} down to larger target {target}"
            )
        return self.scaled(target / w)

    def plus(self, other: "SkewMatching") -> "SkewMatching":
        if other.gamma != self.gamma:
            raise PreconditionError("cannot add skew matchings with different skews")
        vals = dict(self._values)
        for e, x in other._values.items():
            vals[e] = vals.get(e, ZERO) + x
        return SkewMatching(self.gamma, vals)

    def minus(self, other: "SkewMatching") -> "SkewMatching":
        if other.gamma != self.gamma:
            raise PreconditionError("cannot subtract skew matchings with different skews")
        vals = dict(self._values)
        for e, x in other._values.items():
            y = vals.get(e, ZERO) - x
            if y < 0:
                raise PreconditionError(f"subtrahend exceeds minuend on {e!r}")
            vals[e] = y
        return SkewMatching(self.gamma, vals, validate=False)

    def is_sub_matching_of(self, other: "SkewMatching") -> bool:
        """Skew sub-matching order: both endpoint shares dominated edgewise."""
        g1, g2 = self.gamma, other.gamma
        for (u, v), x in self._values.items():
            y = other.value(u, v)
            if x / (1 + g1) > y / (1 + g2):
                return False
            if x * g1 / (1 + g1) > y * g2 / (1 + g2):
                return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, SkewMatching)
            and self.gamma == other.gamma
            and self._values == other._values
        )

    def __hash__(self):
        return hash((self.gamma, frozenset(self._values.items())))

    def __repr__(self):
        return (
            f"SkewMatching(gamma={self.gamma}, W={self.weight()},"
            f" |supp|={len(self._values)})"
        )


@dataclass(frozen=True)
class AnchoredPair:
    """Two disjoint skew matchings anchored at the ends of a designated edge."""

    sigma_a: SkewMatching
    sigma_b: SkewMatching
    anchor_edge: tuple

    @property
    def gamma_a(self) -> Fraction:
        return self.sigma_a.gamma

    @property
    def gamma_b(self) -> Fraction:
        return self.sigma_b.gamma

    def weight_a(self) -> Fraction:
        return self.sigma_a.weight()

    def weight_b(self) -> Fraction:
        return self.sigma_b.weight()

    def swapped(self) -> "AnchoredPair":
        """Exchange the two components and reverse the anchor edge."""
        c, d = self.anchor_edge
        return AnchoredPair(self.sigma_b, self.sigma_a, (d, c))


@dataclass(frozen=True)
class PairReport:
    """Verification outcome for an anchored pair; names the first bad clause."""

    ok: bool
    clause: str | None = None
    witness: object = None
    message: str = ""

    def __bool__(self):
        return self.ok


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def vertex_loads(m, v):
    """Exact load of ``m`` at ``v``.

    Fractional matchings give a single Fraction; skew matchings give the
    triple (total, tail share, head share).
    """
    if isinstance(m, FractionalMatching):
        return m.load(v)
    if isinstance(m, SkewMatching):
        s1, s2 = m.sigma1(v), m.sigma2(v)
        return (s1 + s2, s1, s2)
    raise GraphInputError(f"unsupported matching type {type(m)!r}")


def check_preceq(mu: FractionalMatching, sigma: SkewMatching) -> bool:
    """True iff mu is dominated by sigma on both orientations of its support."""
    g = sigma.gamma
    denom = 1 + g
    for (u, v), x in mu.items():
        fwd = (sigma.value(u, v) + g * sigma.value(v, u)) / denom
        bwd = (sigma.value(v, u) + g * sigma.value(u, v)) / denom
        if x > fwd or x > bwd:
            return False
    return True


def check_trianglelefteq(sigmas, mu: FractionalMatching) -> bool:
    """True iff the skew matchings jointly fit inside mu, edge by edge.

    Accepts a single skew matching or a non-empty sequence of them (the
    skews may differ).  Both orientations of every supporting edge are
    checked.
    """
    if isinstance(sigmas, SkewMatching):
        sigmas = [sigmas]
    sigmas = list(sigmas)
    if not sigmas:
        raise PreconditionError("need at least one skew matching")
    edges = set()
    for s in sigmas:
        for u, v in s.support():
            edges.add(edge_key(u, v))
    for u, v in edges:
        fwd = ZERO
        bwd = ZERO
        for s in sigmas:
            g = s.gamma
            fwd += (s.value(u, v) + g * s.value(v, u)) / (1 + g)
            bwd += (s.value(v, u) + g * s.value(u, v)) / (1 + g)
        cap = mu.value(u, v)
        if fwd > cap or bwd > cap:
            return False
    return True


def truncate(w, mu: FractionalMatching) -> DirectedWeight:
    """Diminish every oriented weight by the head's load, clamped at zero."""
    if isinstance(w, WeightedGraph):
        w = w.to_directed()
    loads = mu.loads()
    values = {}
    for u in w.vertices:
        for x, wx in w.out_row(u).items():
            red = wx - loads.get(x, ZERO)
            if red > 0:
                values[(u, x)] = red
    return DirectedWeight(w.vertices, values)


def _combined_loads(nus) -> dict:
    total: dict = {}
    for nu in nus:
        for v, ld in nu.loads().items():
            total[v] = total.get(v, ZERO) + ld
    return total


def saturation(w, u, nus: Sequence) -> Fraction:
    """sum over v in N_w(u) of min(combined load at v, w(u->v))."""
    if isinstance(w, WeightedGraph):
        w = w.to_directed()
    if u not in w:
        raise GraphInputError(f"unknown vertex {u!r}")
    loads = _combined_loads(nus)
    total = ZERO
    for v, wx in w.out_row(u).items():
        total += min(loads.get(v, ZERO), wx)
    return total


def saturates(w, u, nus: Sequence, within: Iterable | None = None) -> bool:
    """True iff combined load >= w(u->v) on every weighted neighbour (in U)."""
    if isinstance(w, WeightedGraph):
        w = w.to_directed()
    loads = _combined_loads(nus)
    allowed = None if within is None else set(within)
    for v, wx in w.out_row(u).items():
        if allowed is not None and v not in allowed:
            continue
        if loads.get(v, ZERO) < wx:
            return False
    return True


def covers(nus: Sequence, vertices: Iterable) -> bool:
    """True iff combined load is exactly 1 on every listed vertex."""
    loads = _combined_loads(nus)
    return all(loads.get(v, ZERO) == 1 for v in vertices)


def fits_neighbourhood(sigma: SkewMatching, w, u) -> bool:
    """True iff sigma's tail share at every vertex is capped by w(u->.)."""
    if isinstance(w, WeightedGraph):
        w = w.to_directed()
    row = w.out_row(u)
    for v, s1 in sigma.sigma1_map().items():
        if s1 > row.get(v, ZERO):
            return False
    return True


def check_anchored_pair(
    pair: AnchoredPair, w: WeightedGraph, *, require_anchor_weight: bool = True
) -> PairReport:
    """Validate the four anchored-pair clauses against a weighted graph.

    Clauses: (A1) the matchings are disjoint, (A2)/(A3) each anchor fits
    the weighted neighbourhood of its end of the anchor edge, (A4) joint
    tail shares at common neighbours stay below the larger of the two
    incident weights.  The first violated clause is reported together
    with a witness vertex.
    """
    c, d = pair.anchor_edge
    if c not in w or d not in w:
        raise GraphInputError(f"anchor edge ({c!r},{d!r}) uses unknown vertex")
    if require_anchor_weight and w.weight(c, d) == 0:
        return PairReport(False, "anchor", (c, d), "anchor edge has zero weight")

    la = pair.sigma_a.loads()
    lb = pair.sigma_b.loads()
    for v in set(la) | set(lb):
        if la.get(v, ZERO) + lb.get(v, ZERO) > 1:
            return PairReport(False, "A1", v, f"joint load at {v!r} exceeds 1")

    s1a = pair.sigma_a.sigma1_map()
    s1b = pair.sigma_b.sigma1_map()
    for v, s1 in s1a.items():
        if s1 > w.weight(c, v):
            return PairReport(False, "A2", v, f"anchor of first matching leaves N_w({c!r})")
    for v, s1 in s1b.items():
        if s1 > w.weight(d, v):
            return PairReport(False, "A3", v, f"anchor of second matching leaves N_w({d!r})")

    common = w.neighbour_set(c) & w.neighbour_set(d)
    for x in sorted(common):
        joint = s1a.get(x, ZERO) + s1b.get(x, ZERO)
        if joint > max(w.weight(c, x), w.weight(d, x)):
            return PairReport(False, "A4", x, f"joint tail share too large at {x!r}")
    return PairReport(True)


def combine_pairs(
    pair: AnchoredPair,
    bar_pair: AnchoredPair,
    w: WeightedGraph | DirectedWeight,
    mu: FractionalMatching,
    bar_mu: FractionalMatching,
) -> AnchoredPair:
    """Edgewise sum of a pair valid in w with one valid in the mu-truncation.

    Hypotheses are re-checked; the failing one is named in the raised
    error.  The sum is again a valid pair in w, fitting inside mu+bar_mu.
    """
    if pair.anchor_edge != bar_pair.anchor_edge:
        raise PreconditionError("pairs are anchored at different edges")
    if pair.gamma_a != bar_pair.gamma_a or pair.gamma_b != bar_pair.gamma_b:
        raise PreconditionError("pairs have different skew parameters")
    mu_loads = mu.loads()
    for v, ld in bar_mu.loads().items():
        if ld + mu_loads.get(v, ZERO) > 1:
            raise PreconditionError(f"fractional matchings are not disjoint at {v!r}")
    if not check_trianglelefteq([pair.sigma_a, pair.sigma_b], mu):
        raise PreconditionError("first pair does not fit inside its fractional matching")
    if not check_trianglelefteq([bar_pair.sigma_a, bar_pair.sigma_b], bar_mu):
        raise PreconditionError("second pair does not fit inside its fractional matching")
    wd = w.to_directed() if isinstance(w, WeightedGraph) else w
    bar_w = truncate(wd, mu)
    c, d = pair.anchor_edge
    if not fits_neighbourhood(bar_pair.sigma_a, bar_w, c):
        raise PreconditionError("second pair's first anchor leaves the truncated neighbourhood")
    if not fits_neighbourhood(bar_pair.sigma_b, bar_w, d):
        raise PreconditionError("second pair's second anchor leaves the truncated neighbourhood")
    return AnchoredPair(
        pair.sigma_a.plus(bar_pair.sigma_a),
        pair.sigma_b.plus(bar_pair.sigma_b),
        pair.anchor_edge,
    )


def fractional_from_1skew(sigma: SkewMatching) -> FractionalMatching:
    """Forget orientations of a 1-skew matching; halves the total weight."""
    if sigma.gamma != 1:
        raise PreconditionError(f"skew is {sigma.gamma}, need exactly 1")
    vals: dict = {}
    for (u, v), x in sigma.items():
        e = edge_key(u, v)
        vals[e] = vals.get(e, ZERO) + x / 2
    return FractionalMatching(vals, validate=False)


def min_degree_subgraph(g: Graph) -> Graph:
    """Induced subgraph H with min degree >= d(H)/2 >= d(G)/2.

    Repeatedly deletes a vertex of degree below half the current average
    degree; deleting such a vertex never decreases the average.
    """
    if len(g) == 0:
        raise PreconditionError("empty input graph")
    deg = {v: g.degree(v) for v in g.vertices}
    alive = set(g.vertices)
    edges2 = Fraction(sum(deg.values()))  # twice the edge count
    while True:
        n = len(alive)
        threshold = edges2 / (2 * n)  # d(G_cur)/2
        victim = None
        for v in sorted(alive):
            if deg[v] < threshold:
                victim = v
                break
        if victim is None:
            break
        alive.discard(victim)
        edges2 -= 2 * deg[victim]
        for u in g.adjacency(victim):
            if u in alive:
                deg[u] -= 1
        if not alive:  # cannot happen: average degree argument
            raise InternalInvariantError("peeled the whole graph")
    return g.subgraph(alive)
