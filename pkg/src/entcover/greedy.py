"""Greedy marginal-gain solver with a full execution trace, and the
second-difference coefficient table derived from that trace."""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .core import Cover, PolymatroidOracle
from .instances import GraphInstance


@dataclass(frozen=True)
class GreedyTrace:
    """Everything the greedy run decided, in order.

    order:    chosen element indices i_1..i_l
    deltas:   marginal gains, deltas[r-1] = f(W_r) - f(W_{r-1}) >= 1
    prefixes: W_1..W_l as bitmasks (W_0 is the empty set, not stored)
    rank:     1-based total order on all m elements — chosen elements by
              selection step, unchosen elements after them by index
    cover:    allocation with x[i_r] = delta_r, zero elsewhere
    """

    order: Tuple[int, ...]
    deltas: Tuple[int, ...]
    prefixes: Tuple[int, ...]
    rank: Tuple[int, ...]
    cover: Cover

    def prefix(self, r: int) -> int:
        """W_r as a bitmask; r = 0 gives the empty set."""
        return 0 if r == 0 else self.prefixes[r - 1]

    @property
    def length(self) -> int:
        return len(self.order)


def _tie_key(policy: str, m: int) -> List[int]:
    # smaller key wins a marginal tie
    if policy == "lowest":
        return list(range(m))
    if policy == "highest":
        return [m - 1 - j for j in range(m)]
    if policy.startswith("random:"):
        seed = int(policy.split(":", 1)[1])
        key = list(range(m))
        random.Random(seed).shuffle(key)
        return key
    raise ValueError(f"unknown tie-break policy '{policy}'")


def run_greedy(oracle: PolymatroidOracle, tie_break: str = "lowest",
               lazy: bool = False) -> GreedyTrace:
    """Repeatedly pick the element with the largest marginal gain until
    f(S) reaches f(U).

    Ties in the argmax are broken by the policy: "lowest" (default),
    "highest", or "random:<seed>" (a seeded priority shuffle).  The lazy
    variant maintains a max-heap of stale marginals and recomputes on
    pop; for a genuine polymatroid it produces the identical trace.
    """
    m = oracle.m
    total = oracle.total()
    if total < 1:
        raise ValueError("f(U) must be at least 1")
    key = _tie_key(tie_break, m)
    order: List[int] = []
    deltas: List[int] = []
    prefixes: List[int] = []
    s = 0
    fs = 0
    if lazy:
        heap = []
        for j in range(m):
            g = oracle.eval(1 << j)
            if g < 0:
                raise ValueError("non-monotone oracle")
            heap.append((-g, key[j], j))
        heapq.heapify(heap)
        while fs < total:
            if not heap:
                raise ValueError("oracle stalled before reaching f(U); not monotone submodular")
            _, k, j = heapq.heappop(heap)
            g = oracle.eval(s | (1 << j)) - fs
            if g < 0:
                raise ValueError("non-monotone oracle")
            if heap and (-g, k) > (heap[0][0], heap[0][1]):
                heapq.heappush(heap, (-g, k, j))  # stale; retry later
                continue
            if g == 0:
                raise ValueError("oracle stalled before reaching f(U); not monotone submodular")
            s |= 1 << j
            fs += g
            order.append(j)
            deltas.append(g)
            prefixes.append(s)
    else:
        remaining = set(range(m))
        while fs < total:
            best_j = -1
            best = None
            for j in remaining:
                g = oracle.eval(s | (1 << j)) - fs
                if g < 0:
                    raise ValueError("non-monotone oracle")
                cand = (-g, key[j])
                if best is None or cand < best:
                    best = cand
                    best_j = j
            if best is None or -best[0] == 0:
                raise ValueError("oracle stalled before reaching f(U); not monotone submodular")
            g = -best[0]
            s |= 1 << best_j
            fs += g
            remaining.discard(best_j)
            order.append(best_j)
            deltas.append(g)
            prefixes.append(s)
    if fs != total:
        # overshot f(U): some f(W) > f(U) with W inside U
        raise ValueError("non-monotone oracle")
    rank = [0] * m
    for r, j in enumerate(order):
        rank[j] = r + 1
    nxt = len(order) + 1
    for j in range(m):
        if rank[j] == 0:
            rank[j] = nxt
            nxt += 1
    x = [0] * m
    for j, d in zip(order, deltas):
        x[j] = d
    return GreedyTrace(tuple(order), tuple(deltas), tuple(prefixes),
                       tuple(rank), Cover(tuple(x)))


@dataclass(frozen=True)
class CoefficientTable:
    """l x m integer matrix; entry [r-1][j] measures how much of greedy
    step r the element j could have claimed."""

    a: Tuple[Tuple[int, ...], ...]

    def row(self, r: int) -> Tuple[int, ...]:
        """Row for greedy step r (1-based)."""
        return self.a[r - 1]

    @property
    def steps(self) -> int:
        return len(self.a)


def coefficients(oracle: PolymatroidOracle, trace: GreedyTrace) -> CoefficientTable:
    """Second differences of f along the greedy prefixes.

    a[r][j] = (f(W_r) - f(W_{r-1})) - (f(W_r + j) - f(W_{r-1} + j)).
    The j = i_r diagonal automatically equals delta_r and rows vanish on
    already-chosen elements; no case analysis is needed here.
    """
    m = oracle.m
    rows: List[Tuple[int, ...]] = []
    prev = 0
    f_prev = 0
    for r in range(trace.length):
        w = trace.prefixes[r]
        f_w = oracle.eval(w)
        row = []
        for j in range(m):
            bit = 1 << j
            row.append((f_w - f_prev)
                       - (oracle.eval(w | bit) - oracle.eval(prev | bit)))
        rows.append(tuple(row))
        prev, f_prev = w, f_w
    return CoefficientTable(tuple(rows))


def specialized_coefficients(inst: GraphInstance, trace: GreedyTrace,
                             problem: str) -> CoefficientTable:
    """Closed-form coefficient tables for the two graph families.

    problem="meo":  a[r][j] = delta_r on the diagonal, 1 when j is an
    unchosen-so-far neighbor of the step's vertex, else 0.

    problem="mest": on the contracted graph where every component touched
    by W_{r-1} is fused, a[r][j] counts how many distinct foreign
    components adjacent to i_r disappear when j's edges are contracted
    too — i.e. (components i_r would newly merge) minus (the same after
    j is added first).  Diagonal delta_r; zero on chosen elements.

    Must agree entry-wise with :func:`coefficients` on the generic
    oracle; that equality is asserted in the test suite.
    """
    if not isinstance(inst, GraphInstance):
        raise TypeError("specialized coefficients exist only for graph instances")
    if problem not in ("meo", "mest"):
        raise ValueError(f"unknown problem kind '{problem}'")
    n = inst.n_vertices
    adj = {v: set(inst.neighbors(v)) for v in range(n)}
    rows: List[Tuple[int, ...]] = []
    if problem == "meo":
        for r in range(trace.length):
            ir = trace.order[r]
            w_prev = trace.prefix(r)
            row = []
            for j in range(n):
                if j == ir:
                    row.append(trace.deltas[r])
                elif (w_prev >> j) & 1:
                    row.append(0)
                elif j in adj[ir]:
                    row.append(1)
                else:
                    row.append(0)
            rows.append(tuple(row))
        return CoefficientTable(tuple(rows))

    # mest: disjoint-set contraction per (step, element) pair
    def component_finder(touch_mask: int):
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (u, v) in inst.edges:
            if (touch_mask >> u) & 1 or (touch_mask >> v) & 1:
                parent[find(u)] = find(v)
        return find

    def merged_components(ir: int, touch_mask: int) -> int:
        find = component_finder(touch_mask)
        own = find(ir)
        return len({find(k) for k in adj[ir]} - {own})

    for r in range(trace.length):
        ir = trace.order[r]
        w_prev = trace.prefix(r)
        base = merged_components(ir, w_prev)
        row = []
        for j in range(n):
            if j == ir:
                row.append(trace.deltas[r])
            elif (w_prev >> j) & 1:
                row.append(0)
            else:
                row.append(base - merged_components(ir, w_prev | (1 << j)))
        rows.append(tuple(row))
    return CoefficientTable(tuple(rows))
