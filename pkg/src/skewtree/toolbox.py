"""Constructive matching lemmas: each operation returns skew matchings
with exact weight identities, built by explicit per-edge formulas or by
deterministic greedy loops.

Shared conventions:

* ``U``/``V`` arguments are disjoint vertex sets; fractional matchings
  passed in must be supported as stated by each operation.
* Greedy loops scan candidates in sorted order and take the maximal
  admissible increment (capped so targets are met exactly), so outputs
  are deterministic.
* Hypotheses are re-checked on entry; a failed one raises
  ``PreconditionError`` naming the failing bound and a witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ZERO,
    AnchoredPair,
    DirectedWeight,
    FractionalMatching,
    InternalInvariantError,
    PreconditionError,
    SkewMatching,
    WeightedGraph,
    as_fraction,
    check_anchored_pair,
    check_trianglelefteq,
    edge_key,
    fits_neighbourhood,
    truncate,
)

__all__ = [
    "SplitParams",
    "extend_out",
    "balance_out",
    "combination",
    "extend_out_skew",
    "allocate_hats",
    "improved_balance",
    "completion",
    "greedy1",
    "greedy2",
    "greedy3",
    "fill_disjoint",
    "k_half",
]


@dataclass(frozen=True)
class SplitParams:
    """Four nonnegative weights with positive first components.

    The derived skews are the head/tail ratios of the two target
    matchings.
    """

    a1: Fraction
    a2: Fraction
    b1: Fraction
    b2: Fraction

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.a1 <= 0 or self.b1 <= 0:
            raise PreconditionError("first components of a split must be positive")
        if self.a2 < 0 or self.b2 < 0:
            raise PreconditionError("split components must be nonnegative")

    @property
    def gamma_a(self) -> Fraction:
        return self.a2 / self.a1

    @property
    def gamma_b(self) -> Fraction:
        return self.b2 / self.b1

    @property
    def total(self) -> Fraction:
        return self.a1 + self.a2 + self.b1 + self.b2

    @property
    def weight_a(self) -> Fraction:
        return self.a1 + self.a2

    @property
    def weight_b(self) -> Fraction:
        return self.b1 + self.b2

    def swapped_sides(self) -> "SplitParams":
        return SplitParams(self.b1, self.b2, self.a1, self.a2)


def _as_directed(w) -> DirectedWeight:
    return w.to_directed() if isinstance(w, WeightedGraph) else w


def _min_skew_factor(gamma: Fraction) -> Fraction:
    return 1 + min(gamma, 1 / gamma) if gamma > 0 else Fraction(1)


# ---------------------------------------------------------------------------
# Basic operations
# ---------------------------------------------------------------------------


def extend_out(U, V, mu: FractionalMatching, gamma) -> SkewMatching:
    """Orient a U-V matching away from U, scaled to the skew's capacity.

    The result fits inside mu, is anchored in U, and has weight exactly
    (1 + min(gamma, 1/gamma)) times the weight of mu.
    """
    gamma = as_fraction(gamma)
    U, V = set(U), set(V)
    factor = (1 + gamma) / max(Fraction(1), gamma)
    vals = {}
    for (a, b), x in mu.items():
        if a in U and b in V:
            u, v = a, b
        elif b in U and a in V:
            u, v = b, a
        else:
            raise PreconditionError(f"matching edge {(a, b)!r} does not run between U and V")
        vals[(u, v)] = x * factor
    return SkewMatching(gamma, vals)


def balance_out(U, mu: FractionalMatching, gamma) -> SkewMatching:
    """Load a matching inside U symmetrically on both orientations."""
    gamma = as_fraction(gamma)
    U = set(U)
    vals = {}
    for (a, b), x in mu.items():
        if a not in U or b not in U:
            raise PreconditionError(f"matching edge {(a, b)!r} leaves U")
        vals[(a, b)] = x
        vals[(b, a)] = x
    return SkewMatching(gamma, vals)


def _maximal_capped_submatching(mu: FractionalMatching, caps: dict) -> FractionalMatching:
    """Greedy maximal nu <= mu with nu's load at v capped by caps[v].

    Vertices absent from caps are uncapped.  Edges are scanned in sorted
    order; each receives the largest admissible value, so afterwards no
    single edge can be increased.
    """
    loads: dict = {}
    vals: dict = {}
    for e in sorted(mu.support()):
        x = mu.value(*e)
        a, b = e
        room_a = caps[a] - loads.get(a, ZERO) if a in caps else x
        room_b = caps[b] - loads.get(b, ZERO) if b in caps else x
        take = min(x, room_a, room_b)
        if take > 0:
            vals[e] = take
            loads[a] = loads.get(a, ZERO) + take
            loads[b] = loads.get(b, ZERO) + take
    return FractionalMatching(vals, validate=False)


def combination(w, v, mu: FractionalMatching, gamma) -> SkewMatching:
    """Skew matching inside mu whose weight covers the saturation at v.

    Splits mu into a part reachable from v on both sides (balanced) and a
    bipartite remainder reachable on one side (oriented outward), then
    glues the two pieces.
    """
    gamma = as_fraction(gamma)
    wd = _as_directed(w)
    row_v = wd.out_row(v)

    caps = {x: row_v.get(x, ZERO) for x in mu.covered_vertices()}
    mu_both = _maximal_capped_submatching(mu, caps)
    sig_both = balance_out(mu_both.covered_vertices() | {v}, mu_both, gamma)

    w_prime = truncate(wd, mu_both)
    rest = mu.minus(mu_both)
    row_vp = w_prime.out_row(v)
    u_side = set(row_vp)

    # remainder capped at the truncated weights, supported at u_side edges
    filtered = FractionalMatching(
        {e: x for e, x in rest.items() if (e[0] in u_side) != (e[1] in u_side)},
        validate=False,
    )
    caps2 = {x: row_vp.get(x, ZERO) for x in u_side}
    mu_one = _maximal_capped_submatching(filtered, caps2)
    for (a, b), x in rest.items():
        if a in u_side and b in u_side and x > 0:
            raise InternalInvariantError("remainder edge reachable from both sides")
    other = mu_one.covered_vertices() - u_side
    sig_one = (
        extend_out(u_side, other, mu_one, gamma)
        if mu_one.weight() > 0
        else SkewMatching.zero(gamma)
    )

    vals = dict(sig_both.items())
    for e, x in sig_one.items():
        vals[e] = vals.get(e, ZERO) + x
    return SkewMatching(gamma, vals)


def extend_out_skew(w, u, sigma_b: SkewMatching, gamma_a) -> SkewMatching:
    """Shrink a skew matching (skew >= 1) onto a smaller skew, same anchor."""
    gamma_a = as_fraction(gamma_a)
    if sigma_b.gamma < 1:
        raise PreconditionError(f"source skew {sigma_b.gamma} is below 1")
    if not fits_neighbourhood(sigma_b, w, u):
        raise PreconditionError("source anchor does not fit the neighbourhood")
    if gamma_a > 0:
        factor = (1 + min(gamma_a, 1 / gamma_a)) / (1 + sigma_b.gamma)
    else:
        factor = Fraction(1) / (1 + sigma_b.gamma)
    return SkewMatching(gamma_a, {e: x * factor for e, x in sigma_b.items()})


# ---------------------------------------------------------------------------
# Allocation and the two filling operations
# ---------------------------------------------------------------------------


def allocate_hats(alpha1, alpha2, beta1, beta2, capacity) -> tuple[Fraction, Fraction]:
    """Proportional caps (bh1, bh2) <= (beta1, beta2) such that

        bh1 + (beta2 - bh2) + alpha1 <= capacity
        bh2 + (beta1 - bh1) + alpha2 <= capacity.

    Writing bh = t*beta, both constraints are linear in t; the feasible
    window in [0,1] is nonempty exactly under the stated hypotheses.
    """
    a1, a2 = as_fraction(alpha1), as_fraction(alpha2)
    b1, b2 = as_fraction(beta1), as_fraction(beta2)
    cap = as_fraction(capacity)
    if min(a1, a2, b1, b2) < 0:
        raise PreconditionError("negative allocation parameter")
    if a1 + a2 + b1 + b2 > 2 * cap:
        raise PreconditionError("total exceeds twice the capacity")
    if min(b1, b2) + max(a1, a2) > cap:
        raise PreconditionError("smaller part plus larger companion exceeds capacity")
    lo = b2 + a1 - cap  # t*(b2-b1) must be >= lo and <= hi
    hi = cap - b1 - a2
    diff = b2 - b1
    if diff > 0:
        t = max(ZERO, lo / diff)
    elif diff < 0:
        t = max(ZERO, hi / diff)
    else:
        t = Fraction(1) if lo <= 0 <= hi else None
    if t is None or not (0 <= t <= 1) or not (lo <= t * diff <= hi):
        raise InternalInvariantError("allocation window empty despite hypotheses")
    return (t * b1, t * b2)


def improved_balance(U, V, mu: FractionalMatching, split: SplitParams
                     ) -> tuple[SkewMatching, SkewMatching]:
    """Fill a U-V matching completely with two skew matchings.

    Requires the split total to be exactly twice the matching weight and
    the larger first part plus the smaller second part to fit in it.  The
    first output is anchored in U; the second one splits its orientation
    between the two sides according to the proportional allocation.
    """
    wmu = mu.weight()
    if split.total != 2 * wmu:
        raise PreconditionError(f"split total {split.total} != 2*W(mu) = {2 * wmu}")
    if max(split.a1, split.a2) + min(split.b1, split.b2) > wmu:
        raise PreconditionError("split does not fit the matching")
    bh1, bh2 = allocate_hats(split.a1, split.a2, split.b1, split.b2, wmu)
    U, V = set(U), set(V)
    va: dict = {}
    vb: dict = {}
    fa = split.weight_a / wmu
    fb_fwd = (bh1 + bh2) / wmu
    fb_bwd = (split.weight_b - bh1 - bh2) / wmu
    for (a, b), x in mu.items():
        if a in U and b in V:
            u, v = a, b
        elif b in U and a in V:
            u, v = b, a
        else:
            raise PreconditionError(f"matching edge {(a, b)!r} does not run between U and V")
        if fa:
            va[(u, v)] = x * fa
        if fb_fwd:
            vb[(u, v)] = x * fb_fwd
        if fb_bwd:
            vb[(v, u)] = x * fb_bwd
    return (SkewMatching(split.gamma_a, va), SkewMatching(split.gamma_b, vb))


def completion(w, U, V, u, mu: FractionalMatching, split: SplitParams
               ) -> tuple[SkewMatching, SkewMatching]:
    """Place one full skew matching inside a U-V matching and complete it
    with a second one that recovers the saturation at u.

    The first output has weight exactly the first split sum and anchor
    inside U; the second fits the neighbourhood of u and has weight at
    least the saturation of u minus the first weight.  When the second
    skew is at most 1, the pair moreover uses every V-vertex fully.
    """
    wd = _as_directed(w)
    U, V = set(U), set(V)
    ga, gb = split.gamma_a, split.gamma_b
    wmu = mu.weight()
    row_u = wd.out_row(u)
    for y in sorted(V & mu.covered_vertices()):
        if mu.load(y) > row_u.get(y, ZERO):
            raise PreconditionError(f"V-vertex {y!r} loaded beyond w(u->{y!r})")
    if max(split.a1, split.a2) + min(split.b1, split.b2) > wmu:
        raise PreconditionError("larger first part does not fit")
    if min(split.a1, split.a2) + max(split.b1, split.b2) < wmu:
        raise PreconditionError("matching cannot be exhausted by the split")
    if wmu == 0:
        raise PreconditionError("empty matching cannot host a positive split")

    def orient(a, b):
        if a in U and b in V:
            return a, b
        if b in U and a in V:
            return b, a
        raise PreconditionError(f"matching edge {(a, b)!r} does not run between U and V")

    # first matching: proportional, oriented away from U
    fa = split.weight_a / wmu
    sig_a: dict = {}
    for (a, b), x in mu.items():
        p, q = orient(a, b)
        sig_a[(p, q)] = x * fa

    # split mu into the part reachable from u on the U side as well
    mu_loads = mu.loads()
    mu_p: dict = {}
    for (a, b), x in mu.items():
        p, q = orient(a, b)
        lx = mu_loads[p]
        frac = min(row_u.get(p, ZERO), lx) / lx
        if x * frac > 0:
            mu_p[edge_key(p, q)] = x * frac
    mu_prime = FractionalMatching(mu_p, validate=False)
    mu_hat = mu.minus(mu_prime)
    w_p = mu_prime.weight()

    sap: dict = {}
    sah: dict = {}
    for (a, b), x in mu.items():
        p, q = orient(a, b)
        xp = mu_prime.value(p, q)
        if xp * fa > 0:
            sap[(p, q)] = xp * fa
        rem = (x - xp) * fa
        if rem > 0:
            sah[(p, q)] = rem

    # counterweight so each used edge of mu_prime is loaded evenly
    same_direction = (1 - ga) * (1 - gb) <= 0
    bar_b: dict = {}
    if ga != 1:
        if gb == 1:
            raise InternalInvariantError("degenerate second skew with skewed first")
        ratio = ((1 + gb) / (1 + ga)) * (
            (max(Fraction(1), ga) - min(Fraction(1), ga))
            / (max(Fraction(1), gb) - min(Fraction(1), gb))
        )
        for (p, q), x in sap.items():
            key = (p, q) if same_direction else (q, p)
            bar_b[key] = x * ratio
    bar_sig_b = SkewMatching(gb, bar_b, validate=False)

    bar_mu_vals: dict = {}
    for (p, q), x in sap.items():
        other = bar_b.get((p, q) if same_direction else (q, p), ZERO)
        bar_mu_vals[edge_key(p, q)] = (
            min(Fraction(1), ga) / (1 + ga) * x
            + max(Fraction(1), gb) / (1 + gb) * other
        )
    bar_mu = FractionalMatching(bar_mu_vals, validate=False)

    # balance the remainder of mu_prime
    rest_p = mu_prime.minus(bar_mu)
    tilde_b = balance_out(rest_p.covered_vertices() | {u}, rest_p, gb)
    sig_b_prime_vals = dict(bar_b)
    for e, x in tilde_b.items():
        sig_b_prime_vals[e] = sig_b_prime_vals.get(e, ZERO) + x

    # the part of mu_hat hosting the remainder of the first matching
    tilde_mu_vals: dict = {}
    for (p, q), x in sah.items():
        tilde_mu_vals[edge_key(p, q)] = max(Fraction(1), ga) / (1 + ga) * x
    tilde_mu = FractionalMatching(tilde_mu_vals, validate=False)
    free = mu_hat.minus(tilde_mu)

    if gb <= 1 and ga < 1:
        # saturate V by counterweighting inside mu_hat instead
        sig_vals: dict = {}
        ratio2 = ((1 - ga) / (1 + ga)) * ((1 + gb) / (1 - gb)) if gb != 1 else None
        if ratio2 is None:
            raise InternalInvariantError("degenerate skews in the saturating branch")
        for (p, q), x in sah.items():
            sig_vals[(q, p)] = x * ratio2
        sig_mid = SkewMatching(gb, sig_vals, validate=False)
        tilde_mu2_vals: dict = {}
        for (p, q), x in sah.items():
            tilde_mu2_vals[edge_key(p, q)] = (
                x / (1 + ga) + gb / (1 + gb) * sig_vals[(q, p)]
            )
        tilde_mu2 = FractionalMatching(tilde_mu2_vals, validate=False)
        free2 = mu_hat.minus(tilde_mu2)
        sig_last = (
            extend_out(V, U, free2, gb) if free2.weight() > 0 else SkewMatching.zero(gb)
        )
        out_b: dict = dict(sig_b_prime_vals)
        for part in (sig_mid, sig_last):
            for e, x in part.items():
                out_b[e] = out_b.get(e, ZERO) + x
    else:
        sig_hat_b = (
            extend_out(V, U, free, gb) if free.weight() > 0 else SkewMatching.zero(gb)
        )
        out_b = dict(sig_b_prime_vals)
        for e, x in sig_hat_b.items():
            out_b[e] = out_b.get(e, ZERO) + x

    sigma_a = SkewMatching(ga, sig_a)
    sigma_b = SkewMatching(gb, out_b)
    if not check_trianglelefteq([sigma_a, sigma_b], mu):
        raise InternalInvariantError("completed pair does not fit inside the matching")
    if not fits_neighbourhood(sigma_b, wd, u):
        raise InternalInvariantError("completed second matching does not fit at u")
    need = max(ZERO, _saturation_at(wd, u, mu) - sigma_a.weight())
    if sigma_b.weight() < need:
        raise InternalInvariantError("completed second matching too light")
    if gb <= 1:
        for y in sorted(V & mu.covered_vertices()):
            if sigma_a.load(y) + sigma_b.load(y) != mu.load(y):
                raise InternalInvariantError(f"V-vertex {y!r} not used fully")
    return sigma_a, sigma_b


def _saturation_at(wd: DirectedWeight, u, mu: FractionalMatching) -> Fraction:
    loads = mu.loads()
    return sum(
        (min(loads.get(x, ZERO), wx) for x, wx in wd.out_row(u).items()), ZERO
    )


# ---------------------------------------------------------------------------
# Greedy extensions
# ---------------------------------------------------------------------------


def _pair_loads(pair: AnchoredPair) -> dict:
    out = pair.sigma_a.loads()
    for v, ld in pair.sigma_b.loads().items():
        out[v] = out.get(v, ZERO) + ld
    return out


def check_pair_directed(pair: AnchoredPair, wd: DirectedWeight) -> None:
    """Anchored-pair clauses against an oriented weight; raises on failure.

    Validity against a pointwise-smaller weight implies validity against
    the original symmetric one, so constructions that shrink weights can
    certify against their working copy.
    """
    c, d = pair.anchor_edge
    la, lb = pair.sigma_a.loads(), pair.sigma_b.loads()
    for v in set(la) | set(lb):
        if la.get(v, ZERO) + lb.get(v, ZERO) > 1:
            raise InternalInvariantError(f"pair overloads {v!r}")
    row_c, row_d = wd.out_row(c), wd.out_row(d)
    s1a, s1b = pair.sigma_a.sigma1_map(), pair.sigma_b.sigma1_map()
    for v, s1 in s1a.items():
        if s1 > row_c.get(v, ZERO):
            raise InternalInvariantError(f"first anchor leaves the neighbourhood at {v!r}")
    for v, s1 in s1b.items():
        if s1 > row_d.get(v, ZERO):
            raise InternalInvariantError(f"second anchor leaves the neighbourhood at {v!r}")
    for x in set(row_c) & set(row_d):
        if s1a.get(x, ZERO) + s1b.get(x, ZERO) > max(row_c[x], row_d[x]):
            raise InternalInvariantError(f"joint tail share too large at {x!r}")


def greedy1(w, pair: AnchoredPair, U, V, kappa, gamma_a=None) -> SkewMatching:
    """Grow a skew matching from V towards U under a degree hypothesis.

    Requires w(u->V) and the U-neighbourhood counts to exceed the target
    plus the existing pair's loads.  The result is supported from V to U,
    anchored in V, of weight exactly (1+gamma)*kappa, and extends the
    pair's first matching without violating the pair clauses.
    """
    wd = _as_directed(w)
    U, V = set(U), set(V)
    kappa = as_fraction(kappa)
    ga = pair.gamma_a if gamma_a is None else as_fraction(gamma_a)
    u, _ = pair.anchor_edge
    base = _pair_loads(pair)
    row_u = wd.out_row(u)
    lhs = sum((row_u.get(x, ZERO) for x in V), ZERO)
    rhs = kappa + sum((base.get(x, ZERO) for x in V), ZERO)
    if lhs < rhs:
        raise PreconditionError(f"degree into V too small: {lhs} < {rhs}")
    load_in_U = sum((base.get(y, ZERO) for y in U), ZERO)
    for x in sorted(V):
        cnt = sum(1 for y in wd.out_row(x) if y in U)
        if cnt < ga * kappa + load_in_U:
            raise PreconditionError(
                f"U-neighbourhood of {x!r} too small: {cnt} < {ga * kappa + load_in_U}"
            )
    return _greedy_core(wd, base, U, V, kappa, ga, row_u, mode="to_U")


def greedy3(w, pair: AnchoredPair, U, V, kappa, gamma_a=None) -> SkewMatching:
    """Like greedy1 but driven from the U side: requires |U| and, for
    every U-vertex, the weighted degree of u into its V-neighbourhood."""
    wd = _as_directed(w)
    U, V = set(U), set(V)
    kappa = as_fraction(kappa)
    ga = pair.gamma_a if gamma_a is None else as_fraction(gamma_a)
    u, _ = pair.anchor_edge
    base = _pair_loads(pair)
    row_u = wd.out_row(u)
    load_in_U = sum((base.get(y, ZERO) for y in U), ZERO)
    if len(U) < ga * kappa + load_in_U:
        raise PreconditionError(f"|U| = {len(U)} below {ga * kappa + load_in_U}")
    load_in_V = sum((base.get(x, ZERO) for x in V), ZERO)
    for y in sorted(U):
        dw = sum((row_u.get(x, ZERO) for x in wd.out_row(y) if x in V), ZERO)
        if dw < kappa + load_in_V:
            raise PreconditionError(
                f"saturated degree through {y!r} too small: {dw} < {kappa + load_in_V}"
            )
    return _greedy_core(wd, base, U, V, kappa, ga, row_u, mode="from_U")


def _greedy_core(wd, base, U, V, kappa, ga, row_u, mode) -> SkewMatching:
    target = (1 + ga) * kappa
    vals: dict = {}
    loads = dict(base)
    weight = ZERO
    guard = 0
    limit = (len(U) + 1) * (len(V) + 1) + 1
    while weight < target:
        guard += 1
        if guard > limit:
            raise InternalInvariantError("greedy loop stalled")
        step = None
        if mode == "to_U":
            for x in sorted(V):
                if row_u.get(x, ZERO) <= loads.get(x, ZERO):
                    continue
                for y in sorted(wd.out_row(x)):
                    if y in U and loads.get(y, ZERO) < 1:
                        step = (x, y)
                        break
                if step:
                    break
        else:
            for y in sorted(U):
                if loads.get(y, ZERO) >= 1:
                    continue
                for x in sorted(wd.out_row(y)):
                    if x in V and row_u.get(x, ZERO) > loads.get(x, ZERO):
                        step = (x, y)
                        break
                if step:
                    break
        if step is None:
            raise InternalInvariantError("greedy step unavailable despite hypotheses")
        x, y = step
        tail_room = (row_u[x] - loads.get(x, ZERO)) * (1 + ga)
        head_room = (1 - loads.get(y, ZERO)) * (1 + ga) / ga if ga > 0 else None
        inc = min(tail_room, target - weight)
        if head_room is not None:
            inc = min(inc, head_room)
        if inc <= 0:
            raise InternalInvariantError("greedy increment vanished")
        vals[(x, y)] = vals.get((x, y), ZERO) + inc
        loads[x] = loads.get(x, ZERO) + inc / (1 + ga)
        loads[y] = loads.get(y, ZERO) + inc * ga / (1 + ga)
        weight += inc
    return SkewMatching(ga, vals, validate=False)


def greedy2(w, pair: AnchoredPair, U, V, kappa, gamma_a=None) -> SkewMatching:
    """Two-stage greedy: reserve tail capacity on V, then convert the
    reservation into oriented weight towards U or V."""
    wd = _as_directed(w)
    U, V = set(U), set(V)
    kappa = as_fraction(kappa)
    ga = pair.gamma_a if gamma_a is None else as_fraction(gamma_a)
    u, _ = pair.anchor_edge
    base = _pair_loads(pair)
    row_u = wd.out_row(u)
    lhs = sum((row_u.get(x, ZERO) for x in V), ZERO)
    if lhs < kappa + sum((base.get(x, ZERO) for x in V), ZERO):
        raise PreconditionError("degree into V too small")
    both = U | V
    load_in_both = sum((base.get(x, ZERO) for x in both), ZERO)
    for x in sorted(V):
        cnt = sum(1 for y in wd.out_row(x) if y in both)
        if cnt < (1 + ga) * kappa + load_in_both:
            raise PreconditionError(f"joint neighbourhood of {x!r} too small")

    reserve: dict = {}
    remaining = kappa
    for x in sorted(V):
        if remaining <= 0:
            break
        room = row_u.get(x, ZERO) - base.get(x, ZERO)
        take = min(room, remaining)
        if take > 0:
            reserve[x] = take
            remaining -= take
    if remaining > 0:
        raise InternalInvariantError("reservation fell short despite the degree bound")

    vals: dict = {}
    loads = dict(base)
    for x in sorted(V):
        loads[x] = loads.get(x, ZERO) + reserve.get(x, ZERO)
    guard = 0
    limit = (len(V) + 1) * (len(both) + 1) + 1
    pending = {x: r for x, r in reserve.items() if r > 0}
    while pending:
        guard += 1
        if guard > limit:
            raise InternalInvariantError("conversion loop stalled")
        x = min(pending)
        step = None
        for y in sorted(wd.out_row(x)):
            if y in both and loads.get(y, ZERO) < 1:
                step = y
                break
        if step is None:
            raise InternalInvariantError("conversion step unavailable despite hypotheses")
        y = step
        delta = pending[x]
        if ga > 0:
            delta = min(delta, (1 - loads.get(y, ZERO)) / ga)
        if delta <= 0:
            raise InternalInvariantError("conversion increment vanished")
        vals[(x, y)] = vals.get((x, y), ZERO) + (1 + ga) * delta
        loads[y] = loads.get(y, ZERO) + ga * delta
        pending[x] -= delta
        if pending[x] == 0:
            del pending[x]
    sig = SkewMatching(ga, vals, validate=False)
    if sig.weight() != (1 + ga) * kappa:
        raise InternalInvariantError("converted weight off target")
    return sig


# ---------------------------------------------------------------------------
# Disjoint filling and the full two-sided construction
# ---------------------------------------------------------------------------


def fill_disjoint(w, edge, mu1: FractionalMatching, mu2: FractionalMatching,
                  mu: FractionalMatching, gamma1, gamma2) -> AnchoredPair:
    """Anchor one skew matching per side of an edge in two disjoint
    sub-matchings; weights equal the respective saturations."""
    u, v = edge
    wd = _as_directed(w)
    summed = mu1.plus(mu2)
    if not summed.leq(mu):
        raise PreconditionError("sub-matchings exceed the ambient matching")
    sig1 = combination(wd, u, mu1, gamma1)
    t1 = _saturation_at(wd, u, mu1)
    sig1 = sig1.scaled_to_weight(t1)
    bar_w = truncate(wd, mu1)
    sig2 = combination(bar_w, v, mu2, gamma2)
    t2 = _saturation_at(bar_w, v, mu2)
    sig2 = sig2.scaled_to_weight(t2)
    pair = AnchoredPair(sig1, sig2, (u, v))
    if not check_trianglelefteq([sig1, sig2], mu):
        raise InternalInvariantError("disjoint filling does not fit")
    check_pair_directed(pair, wd)
    return pair


def k_half(w, edge, mu: FractionalMatching, k, split: SplitParams,
           _trace: list | None = None) -> AnchoredPair:
    """Anchored pair of prescribed weights at an edge whose ends carry
    saturation k and k/2.

    Follows a five-stage construction: normalise the weights so the two
    saturations are exact, partition the matching into a both-sides part,
    a shared bipartite part and two private parts, dispose of three
    simple configurations, decide the anchor orientation, and glue the
    pieces.  All output weights are exact.
    """
    k = as_fraction(k)
    if k < 2:
        raise PreconditionError(f"total weight {k} below 2")
    if split.total != k:
        raise PreconditionError(f"split sums to {split.total}, not {k}")
    c, d = edge
    wd = _as_directed(w)
    if _saturation_at(wd, c, mu) < k:
        raise PreconditionError(f"saturation at {c!r} below {k}")
    if _saturation_at(wd, d, mu) < Fraction(k, 2):
        raise PreconditionError(f"saturation at {d!r} below {Fraction(k, 2)}")
    trace = _trace if _trace is not None else []

    if split.weight_a > k / 2:
        trace.append("kh-swap")
        out = k_half(w, (c, d), mu, k, split.swapped_sides(), _trace=trace)
        return out.swapped()

    wd = _normalise_row(wd, d, mu, k / 2, keep=c)
    wd = _normalise_row(wd, c, mu, k, keep=d)
    ga, gb = split.gamma_a, split.gamma_b
    alpha, beta = split.weight_a, split.weight_b

    # both-sides part at d, then the shared bipartite layer
    caps_d = {x: wd.weight(d, x) for x in mu.covered_vertices()}
    mu_d = _maximal_capped_submatching(mu, caps_d)
    w_p = truncate(wd, mu_d)
    U = set(w_p.out_row(d))
    rest = mu.minus(mu_d)
    bar_filtered = FractionalMatching(
        {e: x for e, x in rest.items() if (e[0] in U) or (e[1] in U)}, validate=False
    )
    caps_u = {x: w_p.weight(d, x) for x in U}
    bar_mu_d = _maximal_capped_submatching(bar_filtered, caps_u)
    for (a, b), x in bar_mu_d.items():
        if a in U and b in U:
            raise InternalInvariantError("shared layer edge inside U")

    row_cp = w_p.out_row(c)
    mu_dp_vals: dict = {}
    for (a, b), x in bar_mu_d.items():
        y = a if a not in U else b
        ly = bar_mu_d.load(y)
        frac = min(row_cp.get(y, ZERO), ly) / ly if ly > 0 else ZERO
        if x * frac > 0:
            mu_dp_vals[edge_key(a, b)] = x * frac
    mu_dp = FractionalMatching(mu_dp_vals, validate=False)
    mu_star = bar_mu_d.minus(mu_dp)
    mu_c = mu.minus(mu_d).minus(bar_mu_d)
    two_wd = 2 * mu_d.weight()

    # simple case: private-to-c mass already reaches the second target
    if two_wd + mu_star.weight() >= beta:
        trace.append("kh-simple-b")
        pair = fill_disjoint(wd, (d, c), mu_d.plus(bar_mu_d), mu_c, mu, ga, gb)
        pair = AnchoredPair(
            pair.sigma_a.scaled_to_weight(alpha),
            pair.sigma_b.scaled_to_weight(beta),
            (d, c),
        )
        return _k_half_finish(pair, wd, mu, split)

    # simple case: the both-sides part alone hosts the first matching
    if two_wd >= alpha:
        trace.append("kh-simple-a")
        mu_dd = mu_d.scaled(alpha / two_wd)
        pair = fill_disjoint(wd, (d, c), mu_dd, mu.minus(mu_dd), mu, ga, gb)
        pair = AnchoredPair(
            pair.sigma_a.scaled_to_weight(alpha),
            pair.sigma_b.scaled_to_weight(beta),
            (d, c),
        )
        return _k_half_finish(pair, wd, mu, split)

    # simple case: both-sides plus shared-private mass hosts it
    if alpha <= two_wd + mu_star.weight():
        trace.append("kh-simple-mix")
        pair = _k_half_mixed(wd, (c, d), mu, mu_d, mu_dp, mu_star, mu_c,
                             split, w_p, U)
        return _k_half_finish(pair, wd, mu, split)

    trace.append("kh-main")
    a_res = alpha - two_wd - mu_star.weight()
    b_res = beta - two_wd - mu_star.weight()
    if a_res <= 0 or b_res <= 0:
        raise InternalInvariantError("main-path residuals must be positive")
    inner_a = (a_res / (1 + ga), ga * a_res / (1 + ga))
    inner_b = (b_res / (1 + gb), gb * b_res / (1 + gb))
    w_mu_dp = mu_dp.weight()
    if a_res + b_res != 2 * w_mu_dp:
        raise InternalInvariantError("shared layer weight mismatch")
    if max(inner_a) + min(inner_b) <= w_mu_dp:
        trace.append("kh-anchor-dc")
        host, other, first_at_d = split, split.swapped_sides(), True
        inner = SplitParams(inner_a[0], inner_a[1], inner_b[0], inner_b[1])
    elif max(inner_b) + min(inner_a) <= w_mu_dp:
        trace.append("kh-anchor-cd")
        host, other, first_at_d = split.swapped_sides(), split, False
        inner = SplitParams(inner_b[0], inner_b[1], inner_a[0], inner_a[1])
    else:
        raise InternalInvariantError("neither anchoring admits the completion")
    sig_at_d, sig_at_c = _k_half_main(
        wd, (c, d), mu, mu_d, mu_dp, mu_star, mu_c, host, other, inner, w_p, U
    )
    if first_at_d:
        pair = AnchoredPair(sig_at_d, sig_at_c, (d, c))
    else:
        pair = AnchoredPair(sig_at_c, sig_at_d, (c, d))
    return _k_half_finish(pair, wd, mu, split if first_at_d else split)


def _k_half_finish(pair: AnchoredPair, wd: DirectedWeight, mu: FractionalMatching,
                   split: SplitParams) -> AnchoredPair:
    if pair.weight_a() != split.weight_a or pair.weight_b() != split.weight_b:
        raise InternalInvariantError(
            f"pair weights ({pair.weight_a()},{pair.weight_b()}) off target"
        )
    if not check_trianglelefteq([pair.sigma_a, pair.sigma_b], mu):
        raise InternalInvariantError("final pair does not fit inside the matching")
    check_pair_directed(pair, wd)
    return pair


def _normalise_row(wd: DirectedWeight, v, mu: FractionalMatching, target: Fraction,
                   keep) -> DirectedWeight:
    """Reduce the oriented weights out of v (sparing v->keep) until the
    saturation there is exactly `target`."""
    loads = mu.loads()
    row = dict(wd.out_row(v))
    excess = sum((min(loads.get(x, ZERO), wx) for x, wx in row.items()), ZERO) - target
    if excess < 0:
        raise InternalInvariantError("saturation below target for normalisation")
    if excess == 0:
        return wd
    for x in sorted(row):
        if x == keep or excess == 0:
            continue
        cur = min(loads.get(x, ZERO), row[x])
        cut = min(cur, excess)
        if cut > 0:
            # lower the weight just enough that the min-term drops by `cut`
            row[x] = min(row[x], loads.get(x, ZERO)) - cut
            excess -= cut
    if excess > 0:
        raise PreconditionError(
            f"cannot normalise saturation at {v!r} without touching the anchor edge"
        )
    values = {}
    for u in wd.vertices:
        if u == v:
            for x, wx in row.items():
                if wx > 0:
                    values[(v, x)] = wx
        else:
            for x, wx in wd.out_row(u).items():
                values[(u, x)] = wx
    return DirectedWeight(wd.vertices, values)


def _k_half_mixed(wd, edge, mu, mu_d, mu_dp, mu_star, mu_c, split, w_p, U):
    """Simple configuration where the first matching lives in the
    both-sides part plus a slice of the shared-private mass."""
    c, d = edge
    ga, gb = split.gamma_a, split.gamma_b
    alpha, beta = split.weight_a, split.weight_b
    two_wd = 2 * mu_d.weight()
    hat_target = alpha - two_wd
    hat_mu = mu_star.scaled(hat_target / mu_star.weight())

    pair0 = fill_disjoint(wd, (d, c), mu_d, mu_dp, mu_d.plus(mu_dp), ga, gb)
    w_hat = truncate(w_p, mu_dp)
    sig_a2 = combination(w_hat, d, hat_mu, ga).scaled_to_weight(hat_target)
    combined_a = pair0.sigma_a.plus(sig_a2)

    used = mu_d.plus(mu_dp).plus(hat_mu)
    w_pp = truncate(wd, used)
    sig_b2 = combination(w_pp, c, mu.minus(used), gb)
    need = beta - pair0.sigma_b.weight()
    if need > 0:
        if sig_b2.weight() < need:
            raise InternalInvariantError("mixed case second matching too light")
        sig_b = pair0.sigma_b.plus(sig_b2.scaled_to_weight(need))
    else:
        sig_b = pair0.sigma_b.scaled_to_weight(beta)
    pair = AnchoredPair(combined_a, sig_b, (d, c))
    if not check_trianglelefteq([combined_a, sig_b], mu):
        raise InternalInvariantError("mixed case pair does not fit")
    return pair


def _k_half_main(wd, edge, mu, mu_d, mu_dp, mu_star, mu_c, host: SplitParams,
                 other: SplitParams, inner: SplitParams, w_p, U):
    """Main path: balance the both-sides part (anchored at the k/2 end),
    complete inside the shared layer, orient the private layer outward,
    and finish from the saturated end.

    ``host`` is the split half riding on the k/2 side, ``other`` the one
    anchored at the saturated end; ``inner`` carries the residuals fed to
    the completion step.  Returns (matching at d, matching at c).
    """
    c, d = edge
    gh, go = host.gamma_a, other.gamma_a

    tilde_h = balance_out(mu_d.covered_vertices() | {d}, mu_d, gh)
    V_side = mu_dp.covered_vertices() - U
    sig_hp, sig_op = completion(w_p, U, V_side, c, mu_dp, inner)

    if mu_star.weight() > 0:
        sig_star = extend_out(U, mu_star.covered_vertices() - U, mu_star, gh)
        sig_star = sig_star.scaled_to_weight(mu_star.weight())
    else:
        sig_star = SkewMatching.zero(gh)

    bar_w = truncate(wd, mu_d.plus(mu_dp).plus(mu_star))
    tilde_o = combination(bar_w, c, mu_c, go)

    sig_at_d = tilde_h.plus(sig_hp).plus(sig_star)
    if sig_at_d.weight() != host.weight_a:
        raise InternalInvariantError(
            f"k/2-side weight {sig_at_d.weight()} != {host.weight_a}"
        )
    target_o = other.weight_a
    if sig_op.weight() >= target_o:
        sig_at_c = sig_op.scaled_to_weight(target_o)
    else:
        need = target_o - sig_op.weight()
        if tilde_o.weight() < need:
            raise InternalInvariantError("saturated-side matching falls short")
        sig_at_c = sig_op.plus(tilde_o.scaled_to_weight(need))
    if not check_trianglelefteq([sig_at_d, sig_at_c], mu):
        raise InternalInvariantError("main path pair does not fit")
    return sig_at_d, sig_at_c
