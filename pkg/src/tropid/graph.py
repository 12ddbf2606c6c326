"""Digraph view of a tropical matrix.

Strongly connected components, cyclicity, spectral radius, critical graph,
Kleene star, and the walk oracles built on them.  Nodes are the 0-based row
indices of the source matrix; an arc (i, j, w) exists exactly for each finite
entry A_ij = w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    BOTTOM,
    CapExceeded,
    ShapeError,
    TropError,
    TropMatrix,
    TropScalar,
    check_scalar,
)

SIMPLE_CYCLE_ENUM_LIMIT = 8
RESTRICTED_WALK_NODE_CAP = 12


class DivergenceError(TropError, ArithmeticError):
    """Kleene star requested for a matrix with a positive-mean cycle."""


@dataclass(frozen=True)
class WeightedDigraph:
    node_count: int
    arcs: frozenset  # of (from, to, weight)

    @classmethod
    def from_matrix(cls, a: TropMatrix) -> "WeightedDigraph":
        if not a.is_square():
            raise ShapeError("graph view needs a square matrix")
        arcs = frozenset(
            (i, j, x) for i, row in enumerate(a.entries) for j, x in enumerate(row) if x is not BOTTOM
        )
        return cls(a.rows, arcs)

    def successors(self):
        adj = [[] for _ in range(self.node_count)]
        for i, j, w in sorted(self.arcs):
            adj[i].append((j, w))
        return adj

    def arc_set(self):
        return frozenset((i, j) for i, j, _ in self.arcs)


@dataclass(frozen=True)
class CriticalGraph:
    """A subgraph given by its arc set and the nodes incident to it."""

    node_count: int
    nodes: frozenset
    arcs: frozenset  # of (from, to)

    def is_empty(self) -> bool:
        return not self.arcs


@dataclass(frozen=True)
class WalkWitness:
    node_sequence: tuple
    weight: TropScalar
    length: int


def scc_decompose(g: WeightedDigraph) -> list:
    """SCCs as frozensets, topologically ordered (arc sources first).

    Iterative Tarjan; components come out in reverse topological order and
    are flipped before returning.
    """
    n = g.node_count
    adj = [[] for _ in range(n)]
    for i, j, _ in g.arcs:
        adj[i].append(j)
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for u in it:
                if index[u] is None:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack[u] = True
                    work.append((u, iter(adj[u])))
                    advanced = True
                    break
                if on_stack[u]:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp.add(u)
                    if u == v:
                        break
                comps.append(frozenset(comp))
    comps.reverse()
    return comps


def _scc_has_cycle(g: WeightedDigraph, comp) -> bool:
    if len(comp) > 1:
        return True
    (v,) = comp
    return any(i == v and j == v for i, j, _ in g.arcs)


def cyclicity(g: WeightedDigraph) -> int:
    """gcd of cycle lengths per SCC, lcm across SCCs; 1 if no cycles."""
    result = 1
    for comp in scc_decompose(g):
        if not _scc_has_cycle(g, comp):
            continue
        adj = {v: [] for v in comp}
        for i, j, _ in g.arcs:
            if i in comp and j in comp:
                adj[i].append(j)
        root = min(comp)
        level = {root: 0}
        queue = [root]
        while queue:
            v = queue.pop()
            for u in adj[v]:
                if u not in level:
                    level[u] = level[v] + 1
                    queue.append(u)
        g_scc = 0
        for v in comp:
            for u in adj[v]:
                g_scc = math.gcd(g_scc, level[v] + 1 - level[u])
        result = math.lcm(result, g_scc)
    return result


# -- simple cycles -------------------------------------------------------


def simple_cycles(g: WeightedDigraph):
    """All simple cycles as canonical node tuples (smallest node first).

    DFS rooted at each node s over nodes >= s, smallest-index-first, so the
    output order is deterministic.
    """
    n = g.node_count
    adj = [[] for _ in range(n)]
    for i, j, _ in sorted(g.arcs):
        adj[i].append(j)
    out = []
    for s in range(n):
        path = [s]
        on_path = {s}

        def dfs(v):
            for u in adj[v]:
                if u < s:
                    continue
                if u == s:
                    out.append(tuple(path))
                elif u not in on_path:
                    path.append(u)
                    on_path.add(u)
                    dfs(u)
                    path.pop()
                    on_path.remove(u)

        dfs(s)
    return out


def cycle_weight(a: TropMatrix, cycle: Sequence[int]) -> TropScalar:
    total = 0
    k = len(cycle)
    for idx in range(k):
        x = a.entries[cycle[idx]][cycle[(idx + 1) % k]]
        if x is BOTTOM:
            return BOTTOM
        total = total + x
    return total


def _karp_max_mean(a: TropMatrix, comp) -> Optional[Fraction]:
    """Karp's scheme (maximization form) on one strongly connected component."""
    nodes = sorted(comp)
    k = len(nodes)
    pos = {v: t for t, v in enumerate(nodes)}
    if k == 1:
        v = nodes[0]
        w = a.entries[v][v]
        return None if w is BOTTOM else Fraction(w)
    arcs = [
        (pos[i], pos[j], x)
        for i in nodes
        for j in nodes
        if (x := a.entries[i][j]) is not BOTTOM
    ]
    source = 0
    dist = [[BOTTOM] * k for _ in range(k + 1)]
    dist[0][source] = 0
    for step in range(1, k + 1):
        prev = dist[step - 1]
        cur = dist[step]
        for u, v, w in arcs:
            pu = prev[u]
            if pu is BOTTOM:
                continue
            cand = pu + w
            if cur[v] is BOTTOM or cand > cur[v]:
                cur[v] = cand
    best = None
    for v in range(k):
        dk = dist[k][v]
        if dk is BOTTOM:
            continue
        worst = None
        for step in range(k):
            ds = dist[step][v]
            if ds is BOTTOM:
                continue
            ratio = Fraction(dk - ds, k - step)
            if worst is None or ratio < worst:
                worst = ratio
        if worst is not None and (best is None or worst > best):
            best = worst
    return best


def spectral_radius(a: TropMatrix, strategy: str = "auto") -> TropScalar:
    """Maximal mean weight of cycles; BOTTOM when the graph is acyclic.

    Simple-cycle enumeration up to n = 8, Karp's minimum-mean-cycle scheme in
    maximization form per SCC beyond.
    """
    if not a.is_square():
        raise ShapeError("spectral radius needs a square matrix")
    n = a.rows
    if strategy == "auto":
        strategy = "enumerate" if n <= SIMPLE_CYCLE_ENUM_LIMIT else "karp"
    g = WeightedDigraph.from_matrix(a)
    if strategy == "enumerate":
        if n > SIMPLE_CYCLE_ENUM_LIMIT:
            raise CapExceeded(f"cycle enumeration capped at n={SIMPLE_CYCLE_ENUM_LIMIT}")
        best = BOTTOM
        for cyc in simple_cycles(g):
            w = cycle_weight(a, cyc)
            mean = Fraction(w, len(cyc))
            if best is BOTTOM or mean > best:
                best = mean
        return _tidy_fraction(best)
    if strategy == "karp":
        best = BOTTOM
        for comp in scc_decompose(g):
            if not _scc_has_cycle(g, comp):
                continue
            mean = _karp_max_mean(a, comp)
            if mean is not None and (best is BOTTOM or mean > best):
                best = mean
        return _tidy_fraction(best)
    raise ValueError(f"unknown strategy {strategy!r}")


def _tidy_fraction(x: TropScalar) -> TropScalar:
    if x is BOTTOM:
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def critical_graph(a: TropMatrix) -> CriticalGraph:
    """Union of all simple cycles of mean weight equal to the spectral radius.

    After normalizing by -lambda all cycle weights are <= 0, so an arc (i, j)
    lies on a zero-mean simple cycle iff its normalized weight plus the best
    normalized return-walk weight j -> i is exactly 0.
    """
    if not a.is_square():
        raise ShapeError("critical graph needs a square matrix")
    lam = spectral_radius(a)
    if lam is BOTTOM:
        return CriticalGraph(a.rows, frozenset(), frozenset())
    norm = a.shift(-lam)
    star = kleene_star(norm)
    arcs = set()
    for i in range(a.rows):
        for j in range(a.cols):
            x = norm.entries[i][j]
            if x is BOTTOM:
                continue
            back = star.entries[j][i]
            if back is not BOTTOM and x + back == 0:
                arcs.add((i, j))
    nodes = frozenset(i for arc in arcs for i in arc)
    return CriticalGraph(a.rows, nodes, frozenset(arcs))


def critical_matrix(a: TropMatrix) -> TropMatrix:
    """Matrix of the critical graph: source entries on critical arcs."""
    crit = critical_graph(a)
    return TropMatrix(
        [[a.entries[i][j] if (i, j) in crit.arcs else BOTTOM for j in range(a.cols)] for i in range(a.rows)]
    )


def subgraph_cyclicity(h: CriticalGraph) -> int:
    if h.is_empty():
        return 1
    g = WeightedDigraph(h.node_count, frozenset((i, j, 0) for i, j in h.arcs))
    return cyclicity(g)


def is_completely_reducible(h: CriticalGraph) -> bool:
    """No arcs between different SCCs of the subgraph."""
    if h.is_empty():
        return True
    g = WeightedDigraph(h.node_count, frozenset((i, j, 0) for i, j in h.arcs))
    comp_of = {}
    for comp in scc_decompose(g):
        for v in comp:
            comp_of[v] = comp
    return all(comp_of[i] is comp_of[j] for i, j in h.arcs)


def kleene_star(a: TropMatrix) -> TropMatrix:
    """Entrywise supremum of all powers a^k, k >= 0.

    Floyd-Warshall closure over the max-plus semiring; requires the spectral
    radius to be <= 0, otherwise diagonal entries would diverge.
    """
    if not a.is_square():
        raise ShapeError("kleene star needs a square matrix")
    lam = spectral_radius(a)
    if lam is not BOTTOM and lam > 0:
        raise DivergenceError(f"spectral radius {lam} > 0, star diverges")
    n = a.rows
    d = [list(row) for row in a.entries]
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik is BOTTOM:
                continue
            di = d[i]
            for j in range(n):
                dkj = dk[j]
                if dkj is BOTTOM:
                    continue
                cand = dik + dkj
                if di[j] is BOTTOM or cand > di[j]:
                    di[j] = cand
    for i in range(n):
        if d[i][i] is BOTTOM or d[i][i] < 0:
            d[i][i] = 0
    return TropMatrix(d)


def max_weight_walk(a: TropMatrix, i: int, j: int, t: int) -> Optional[WalkWitness]:
    """Best walk i -> j with exactly t arcs, reconstructed from DP pointers.

    Returns None when (a^t)_ij is BOTTOM.  Length-0 walks are admitted: for
    t = 0 the answer is the empty walk at i when i = j.  Ties resolve to the
    smallest predecessor index.
    """
    if not a.is_square():
        raise ShapeError("walk oracle needs a square matrix")
    n = a.rows
    best = [BOTTOM] * n
    best[i] = 0
    parents = []
    for _ in range(t):
        nxt = [BOTTOM] * n
        par = [None] * n
        for u in range(n):
            bu = best[u]
            if bu is BOTTOM:
                continue
            row = a.entries[u]
            for v in range(n):
                w = row[v]
                if w is BOTTOM:
                    continue
                cand = bu + w
                if nxt[v] is BOTTOM or cand > nxt[v]:
                    nxt[v] = cand
                    par[v] = u
        parents.append(par)
        best = nxt
    if best[j] is BOTTOM:
        return None
    seq = [j]
    cur = j
    for par in reversed(parents):
        cur = par[cur]
        seq.append(cur)
    seq.reverse()
    return WalkWitness(tuple(seq), best[j], t)


def _simple_walk_profiles(a: TropMatrix, start: int, reverse: bool):
    """profiles[v][l] = best weight of a simple walk of length l between
    start and v (direction per `reverse`), via DP over visited-node masks."""
    n = a.rows
    if reverse:
        weight = lambda u, v: a.entries[v][u]
    else:
        weight = lambda u, v: a.entries[u][v]
    profiles = [[BOTTOM] * n for _ in range(n)]
    profiles[start][0] = 0
    state = {(1 << start, start): 0}
    for _ in range(n - 1):
        nstate = {}
        for (mask, v), val in state.items():
            for u in range(n):
                bit = 1 << u
                if mask & bit:
                    continue
                w = weight(v, u)
                if w is BOTTOM:
                    continue
                key = (mask | bit, u)
                cand = val + w
                if key not in nstate or cand > nstate[key]:
                    nstate[key] = cand
        state = nstate
        if not state:
            break
        for (mask, v), val in state.items():
            length = bin(mask).count("1") - 1
            if profiles[v][length] is BOTTOM or val > profiles[v][length]:
                profiles[v][length] = val
    return profiles


def restricted_walk_optimum(b: TropMatrix, i: int, j: int, t: int) -> TropScalar:
    """Best weight over walks i -> j of length exactly t shaped as
    simple walk, then s >= 0 repeats of one loop, then simple walk."""
    if not b.is_square():
        raise ShapeError("walk oracle needs a square matrix")
    n = b.rows
    if n > RESTRICTED_WALK_NODE_CAP:
        raise CapExceeded(f"restricted walk DP capped at n={RESTRICTED_WALK_NODE_CAP}")
    fwd = _simple_walk_profiles(b, i, reverse=False)
    bwd = _simple_walk_profiles(b, j, reverse=True)
    best = BOTTOM
    for h in range(n):
        loop = b.entries[h][h]
        for l1 in range(min(n - 1, t) + 1):
            f = fwd[h][l1]
            if f is BOTTOM:
                continue
            for l2 in range(min(n - 1, t - l1) + 1):
                g = bwd[h][l2]
                if g is BOTTOM:
                    continue
                s = t - l1 - l2
                if s == 0:
                    cand = f + g
                elif loop is BOTTOM:
                    continue
                else:
                    cand = f + s * loop + g
                if best is BOTTOM or cand > best:
                    best = cand
    return best


def permutation_cycles(perm: Sequence[int]):
    """Cycles of a permutation as canonical tuples (smallest node first)."""
    seen = set()
    out = []
    for s in range(len(perm)):
        if s in seen:
            continue
        cyc = [s]
        seen.add(s)
        v = perm[s]
        while v != s:
            cyc.append(v)
            seen.add(v)
            v = perm[v]
        out.append(tuple(cyc))
    return out


def witness_cycle(q: TropMatrix, tau: Sequence[int]):
    """A simple cycle of G(q), not a cycle of tau, whose weight is at least
    the sum of tau's per-node cycle means over its nodes; None if there is no
    such cycle.  Among qualifying cycles the lexicographically smallest
    canonical node tuple is returned.
    """
    if not q.is_square():
        raise ShapeError("witness cycle needs a square matrix")
    n = q.rows
    if sorted(tau) != list(range(n)):
        raise ValueError("tau must be a permutation of the matrix indices")
    mu = [None] * n
    for cyc in permutation_cycles(tau):
        w = 0
        ok = True
        for idx, v in enumerate(cyc):
            x = q.entries[v][cyc[(idx + 1) % len(cyc)]] if len(cyc) > 1 else q.entries[v][v]
            if x is BOTTOM:
                ok = False
                break
            w = w + x
        mean = Fraction(w, len(cyc)) if ok else BOTTOM
        for v in cyc:
            mu[v] = mean
    tau_cycles = {_canonical_cycle(c) for c in permutation_cycles(tau)}
    g = WeightedDigraph.from_matrix(q)
    best = None
    for cyc in simple_cycles(g):
        canon = _canonical_cycle(cyc)
        if canon in tau_cycles:
            continue
        w = cycle_weight(q, cyc)
        bound = 0
        for v in cyc:
            if mu[v] is BOTTOM:
                bound = BOTTOM
                break
            bound = bound + mu[v]
        if bound is BOTTOM or w >= bound:
            if best is None or canon < best:
                best = canon
    return best


def _canonical_cycle(cyc: Sequence[int]) -> tuple:
    k = cyc.index(min(cyc))
    return tuple(cyc[k:]) + tuple(cyc[:k])


def to_dot(g: WeightedDigraph, name: str = "G") -> str:
    """DOT-format dump for documentation; not a stable interface."""
    lines = [f"digraph {name} {{"]
    for v in range(g.node_count):
        lines.append(f"  {v};")
    for i, j, w in sorted(g.arcs):
        lines.append(f'  {i} -> {j} [label="{w}"];')
    lines.append("}")
    return "\n".join(lines)
