"""CSR terms, Nachtigall reduction, the weak CSR expansion of matrix powers,
and the two constructive rank-collapse procedures built on them.

For a completely reducible subgraph H of the critical graph of A the terms
are

    M = ((-lambda(A) + A)^cyc(H))*      C = M restricted to columns in H
    S = A restricted to arcs of H       R = M restricted to rows in H

and the weak expansion states A^t = C S^t R  v  B[A]^t for all
t >= (n-1)^2 + 1, where B[A] drops every arc incident to a critical node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    BOTTOM,
    ShapeError,
    TropError,
    TropMatrix,
    TropScalar,
    lcm_upto,
    mat_max,
    mat_max_all,
    mat_mul,
    mat_pow,
    power_table,
    scalar_from_str,
    scalar_to_str,
)
from .graph import (
    CriticalGraph,
    WeightedDigraph,
    critical_graph,
    is_completely_reducible,
    kleene_star,
    scc_decompose,
    simple_cycles,
    spectral_radius,
    subgraph_cyclicity,
    witness_cycle,
)
from .ranks import tropical_rank


class FalsificationAlarm(TropError, AssertionError):
    """An identity the theory guarantees failed on a concrete instance."""


def weak_csr_threshold(n: int) -> int:
    return (n - 1) ** 2 + 1


@dataclass(frozen=True)
class CsrTerms:
    C: TropMatrix
    S: TropMatrix
    R: TropMatrix
    subgraph: CriticalGraph
    cyc: int
    lam: TropScalar

    def product_at(self, t: int) -> TropMatrix:
        return mat_mul(mat_mul(self.C, mat_pow(self.S, t)), self.R)


def csr_terms(a: TropMatrix, h: CriticalGraph) -> CsrTerms:
    """CSR terms of `a` with respect to a completely reducible subgraph of
    its critical graph; all-bottom terms for the empty (acyclic) case."""
    if not a.is_square():
        raise ShapeError("CSR terms need a square matrix")
    n = a.rows
    crit = critical_graph(a)
    if not h.arcs <= crit.arcs:
        raise ValueError("H must be a subgraph of the critical graph")
    if not is_completely_reducible(h):
        raise ValueError("H must be completely reducible")
    lam = spectral_radius(a)
    if h.is_empty():
        z = TropMatrix.bottom(n, n)
        return CsrTerms(z, z, z, h, 1, lam)
    cyc = subgraph_cyclicity(h)
    m = kleene_star(mat_pow(a.shift(-lam), cyc))
    c_rows = [[m.entries[i][j] if j in h.nodes else BOTTOM for j in range(n)] for i in range(n)]
    s_rows = [[a.entries[i][j] if (i, j) in h.arcs else BOTTOM for j in range(n)] for i in range(n)]
    r_rows = [[m.entries[i][j] if i in h.nodes else BOTTOM for j in range(n)] for i in range(n)]
    return CsrTerms(TropMatrix(c_rows), TropMatrix(s_rows), TropMatrix(r_rows), h, cyc, lam)


def nachtigall_reduce(a: TropMatrix) -> TropMatrix:
    """Zero out every row and column indexed by a critical node."""
    crit = critical_graph(a)
    return TropMatrix(
        [
            [BOTTOM if (i in crit.nodes or j in crit.nodes) else a.entries[i][j] for j in range(a.cols)]
            for i in range(a.rows)
        ]
    )


def weak_csr_verify(a: TropMatrix, t: int):
    """Compare a^t against C S^t R v B[a]^t with H the full critical graph.

    Returns None on equality, otherwise (i, j, lhs, rhs) for the first
    mismatching entry in row-major order.  Equality is guaranteed for
    t >= (n-1)^2 + 1; smaller t is allowed for exploration.
    """
    terms = csr_terms(a, critical_graph(a))
    lhs = mat_pow(a, t)
    rhs = mat_max(terms.product_at(t), mat_pow(nachtigall_reduce(a), t))
    if lhs == rhs:
        return None
    for i in range(a.rows):
        for j in range(a.cols):
            if lhs.entries[i][j] != rhs.entries[i][j]:
                return (i, j, lhs.entries[i][j], rhs.entries[i][j])
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class FactorCertificate:
    """Node-disjoint simple cycles with per-cycle CSR terms witnessing a
    factor-rank bound on a^t."""

    cycles: tuple  # of (node tuple, reduction level)
    terms: tuple  # of CsrTerms, aligned with cycles
    t: int
    sum_of_lengths: int
    reconstruction_ok: bool

    def to_obj(self) -> dict:
        return {
            "t": self.t,
            "sum_of_lengths": self.sum_of_lengths,
            "reconstruction_ok": self.reconstruction_ok,
            "cycles": [{"nodes": list(nodes), "level": level} for nodes, level in self.cycles],
            "terms": [
                {
                    "C": term.C.to_obj(),
                    "S": term.S.to_obj(),
                    "R": term.R.to_obj(),
                    "cyc": term.cyc,
                    "lambda": scalar_to_str(term.lam),
                }
                for term in self.terms
            ],
        }


def _cycle_subgraph(n: int, cycle: Sequence[int]) -> CriticalGraph:
    arcs = frozenset((cycle[k], cycle[(k + 1) % len(cycle)]) for k in range(len(cycle)))
    return CriticalGraph(n, frozenset(cycle), arcs)


def _minimal_cycle_per_scc(h: CriticalGraph):
    """One minimal-length simple cycle per SCC of the subgraph, each the
    lexicographically smallest canonical tuple among the minimal ones."""
    g = WeightedDigraph(h.node_count, frozenset((i, j, 0) for i, j in h.arcs))
    comps = [c for c in scc_decompose(g) if c & h.nodes]
    chosen = []
    all_cycles = simple_cycles(g)
    for comp in comps:
        in_comp = [c for c in all_cycles if set(c) <= comp]
        if not in_comp:
            continue
        best_len = min(len(c) for c in in_comp)
        chosen.append(min(c for c in in_comp if len(c) == best_len))
    return sorted(chosen)


def nested_csr_expansion(a: TropMatrix, t: int) -> FactorCertificate:
    """Iterate the Nachtigall reduction to acyclicity, take one minimal
    simple cycle per SCC of each level's critical graph, and certify
    a^t as the tropical sum of the per-cycle CSR products."""
    if not a.is_square():
        raise ShapeError("expansion needs a square matrix")
    n = a.rows
    if t < weak_csr_threshold(n):
        raise ValueError(f"t must be at least (n-1)^2+1 = {weak_csr_threshold(n)}")
    cycles = []
    terms = []
    level = 1
    current = a
    while True:
        h = critical_graph(current)
        if h.is_empty():
            break
        for cyc in _minimal_cycle_per_scc(h):
            cycles.append((cyc, level))
            terms.append(csr_terms(current, _cycle_subgraph(n, cyc)))
        current = nachtigall_reduce(current)
        level += 1
    target = mat_pow(a, t)
    if terms:
        recon = mat_max_all([term.product_at(t) for term in terms])
    else:
        recon = TropMatrix.bottom(n, n)
    if recon != target:
        raise FalsificationAlarm("nested CSR expansion failed to reconstruct the power")
    return FactorCertificate(
        cycles=tuple(cycles),
        terms=tuple(terms),
        t=t,
        sum_of_lengths=sum(len(c) for c, _ in cycles),
        reconstruction_ok=True,
    )


def minimize_certificate(cert: FactorCertificate, a: TropMatrix) -> FactorCertificate:
    """Greedily drop cycles whose term is redundant for reconstruction.

    Drop order: higher reduction level first, then longer cycles, then
    lexicographic.  The surviving total cycle length must not exceed the
    tropical rank of `a`; a violation would falsify the collapse bound and
    raises loudly.
    """
    if not cert.reconstruction_ok:
        raise ValueError("certificate must reconstruct before minimization")
    target = mat_pow(a, cert.t)
    entries = list(zip(cert.cycles, cert.terms))
    products = {id(term): term.product_at(cert.t) for _, term in entries}
    order = sorted(entries, key=lambda e: (-e[0][1], -len(e[0][0]), e[0][0]))
    for item in order:
        rest = [e for e in entries if e is not item]
        if rest:
            recon = mat_max_all([products[id(term)] for _, term in rest])
        else:
            recon = TropMatrix.bottom(a.rows, a.cols)
        if recon == target:
            entries = rest
    kept_cycles = tuple(c for c, _ in entries)
    kept_terms = tuple(term for _, term in entries)
    total = sum(len(c) for c, _ in kept_cycles)
    bound = tropical_rank(a).value
    if total > bound:
        raise FalsificationAlarm(
            f"minimized certificate keeps total cycle length {total} > tropical rank {bound}"
        )
    return FactorCertificate(
        cycles=kept_cycles,
        terms=kept_terms,
        t=cert.t,
        sum_of_lengths=total,
        reconstruction_ok=True,
    )


def singular_power_decomposition(a: TropMatrix, t: Optional[int] = None):
    """Rank-one decomposition of B^t for B = a^lcm(1..n) when B is singular.

    Returns (terms, c, B) where terms are the n-1 pairs
    (column h of B^n, row h of B^(t-n)) over h != c, and c is the excluded
    node: the minimal-loop-weight node of the witness cycle (missing loops
    count as -infinity; smallest index breaks ties).  When no witness cycle
    of length >= 2 exists, singularity forces some loop to be -infinity and
    the smallest such node is excluded instead.
    """
    if not a.is_square():
        raise ShapeError("decomposition needs a square matrix")
    n = a.rows
    if t is None:
        t = 3 * n - 2
    if t < 3 * n - 2:
        raise ValueError(f"t must be at least 3n-2 = {3 * n - 2}")
    b = mat_pow(a, lcm_upto(n))
    if tropical_rank(b).value == n:
        raise ValueError("power has full tropical rank; decomposition needs a singular power")
    theta = witness_cycle(b, tuple(range(n)))
    if theta is not None:
        loops = [(b.entries[v][v], v) for v in theta]
        bottoms = [v for w, v in loops if w is BOTTOM]
        if bottoms:
            c = min(bottoms)
        else:
            best = min(w for w, _ in loops)
            c = min(v for w, v in loops if w == best)
    else:
        bottoms = [v for v in range(n) if b.entries[v][v] is BOTTOM]
        if not bottoms:
            raise FalsificationAlarm("singular matrix with finite loops must admit a witness cycle")
        c = min(bottoms)
    bn = mat_pow(b, n)
    btn = mat_pow(b, t - n)
    terms = [(bn.col_matrix(h), btn.row_matrix(h)) for h in range(n) if h != c]
    target = mat_pow(b, t)
    if terms:
        recon = mat_max_all([mat_mul(col, row) for col, row in terms])
    else:
        recon = TropMatrix.bottom(n, n)
    if recon != target:
        raise FalsificationAlarm("rank-one terms failed to reconstruct the singular power")
    return terms, c, b


def csr_walk_value(
    a: TropMatrix,
    h: CriticalGraph,
    i: int,
    j: int,
    t: int,
    p: int,
    nodes: Sequence[int],
) -> TropScalar:
    """Best weight over walks i -> j through some node of `nodes` whose
    length is congruent to t mod p, by DP over lengths up to
    (n-1)^2 + 1 + n*p.

    Independent oracle for (C S^t R)_ij on normalized matrices: requires
    lambda(a) = 0, p a multiple of cyc(H), and `nodes` meeting every SCC
    of H.
    """
    if spectral_radius(a) != 0:
        raise ValueError("walk oracle needs a normalized matrix (spectral radius 0)")
    cyc = subgraph_cyclicity(h)
    if p % cyc:
        raise ValueError(f"p = {p} must be a multiple of cyc(H) = {cyc}")
    node_set = frozenset(nodes)
    g = WeightedDigraph(h.node_count, frozenset((x, y, 0) for x, y in h.arcs))
    for comp in scc_decompose(g):
        if comp & h.nodes and not (comp & node_set):
            raise ValueError("node set must meet every SCC of H")
    n = a.rows
    cap = (n - 1) ** 2 + 1 + n * p
    # state: (node, reached-through-marked-node flag)
    best = {(i, i in node_set): 0}
    out = best.get((j, True)) if t % p == 0 else None
    answer = BOTTOM if out is None else out
    for length in range(1, cap + 1):
        nxt = {}
        for (v, flag), val in best.items():
            row = a.entries[v]
            for u in range(n):
                w = row[u]
                if w is BOTTOM:
                    continue
                key = (u, flag or u in node_set)
                cand = val + w
                if key not in nxt or cand > nxt[key]:
                    nxt[key] = cand
        best = nxt
        if not best:
            break
        if length % p == t % p:
            val = best.get((j, True))
            if val is not None and (answer is BOTTOM or val > answer):
                answer = val
    return answer
