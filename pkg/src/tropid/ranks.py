"""Tropical rank and factor rank with verifiable certificates.

Tropical rank searches square submatrices for nonsingularity.  Exact factor
rank searches, for each candidate inner dimension k, over assignments of a
"tight" factor index to every finite entry; each assignment reduces to a
difference-constraint feasibility problem solved by Bellman-Ford, and a
feasible assignment yields an explicit factorization witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .core import (
    BOTTOM,
    CapExceeded,
    ShapeError,
    TropError,
    TropMatrix,
    is_nonsingular,
    mat_mul,
    mat_max_all,
    scalar_to_str,
)

TROPICAL_RANK_CAP = 7


class ReconstructionError(TropError, ValueError):
    """A claimed decomposition fails to reproduce the target matrix."""


class SearchBudgetExceeded(TropError, RuntimeError):
    """Factor-rank search ran out of its feasibility-check budget."""


@dataclass(frozen=True)
class RankReport:
    """Rank value with kind and re-checkable certificate.

    kind is one of "tropical", "factor_exact", "factor_upper", "factor_lower".
    For budget-limited factor-rank runs, ``lower_bound`` carries the best
    proven lower bound alongside the certified upper bound in ``value``.
    """

    value: int
    kind: str
    certificate: Optional[dict] = None
    lower_bound: Optional[int] = None

    def to_obj(self) -> dict:
        obj = {"value": self.value, "kind": self.kind}
        if self.lower_bound is not None:
            obj["lower_bound"] = self.lower_bound
        if self.certificate is not None:
            obj["certificate"] = _certificate_obj(self.certificate)
        return obj


def _certificate_obj(cert: dict) -> dict:
    out = {}
    for key, val in cert.items():
        if isinstance(val, TropMatrix):
            out[key] = val.to_obj()
        elif isinstance(val, (list, tuple)) and val and isinstance(val[0], TropMatrix):
            out[key] = [m.to_obj() for m in val]
        else:
            out[key] = val
    return out


def tropical_rank(a: TropMatrix, cap: int = TROPICAL_RANK_CAP) -> RankReport:
    """Largest k such that some k x k submatrix is nonsingular."""
    if min(a.rows, a.cols) > cap:
        raise CapExceeded(f"exhaustive submatrix search capped at min dimension {cap}")
    finite = a.finite_positions()
    if not finite:
        return RankReport(0, "tropical", {"rows": [], "cols": []})
    for k in range(min(a.rows, a.cols), 1, -1):
        for rows in combinations(range(a.rows), k):
            for cols in combinations(range(a.cols), k):
                if is_nonsingular(a.submatrix(rows, cols)):
                    return RankReport(k, "tropical", {"rows": list(rows), "cols": list(cols)})
    i, j = finite[0]
    return RankReport(1, "tropical", {"rows": [i], "cols": [j]})


# -- factor rank ----------------------------------------------------------


def _rgs_assignments(m: int, k: int):
    """Restricted growth strings of length m using exactly k classes.

    Canonical representatives under relabeling of the k factor indices;
    emitted in lexicographic order.
    """
    assign = [0] * m

    def rec(pos, used):
        if m - pos < k - used:
            return
        if pos == m:
            if used == k:
                yield tuple(assign)
            return
        top = min(used + 1, k)
        for c in range(top):
            assign[pos] = c
            yield from rec(pos + 1, max(used, c + 1))

    yield from rec(0, 0)


def _feasible_factorization(a: TropMatrix, finite, assign, k: int):
    """Difference-constraint feasibility for one tightness assignment.

    Variables are b_il and (negated) c_lj for the factor slots forced finite
    by the assignment; every other slot is BOTTOM.  Bottom entries of `a`
    must see no (i,l),(l,j) pair with both slots finite.
    """
    n, m = a.rows, a.cols
    b_needed = set()
    c_needed = set()
    for (i, j), l in zip(finite, assign):
        b_needed.add((i, l))
        c_needed.add((l, j))
    bottom_cells = [(i, j) for i in range(n) for j in range(m) if a.entries[i][j] is BOTTOM]
    for i, j in bottom_cells:
        for l in range(k):
            if (i, l) in b_needed and (l, j) in c_needed:
                return None
    # nodes: 0 = source, then b-vars, then y_lj standing for -c_lj
    b_index = {v: 1 + t for t, v in enumerate(sorted(b_needed))}
    c_index = {v: 1 + len(b_index) + t for t, v in enumerate(sorted(c_needed))}
    nv = 1 + len(b_index) + len(c_index)
    edges = [(0, t, 0) for t in range(1, nv)]
    tight = set(zip(finite, assign))
    for i, j in finite:
        aij = a.entries[i][j]
        for l in range(k):
            bi = b_index.get((i, l))
            cj = c_index.get((l, j))
            if bi is None or cj is None:
                continue
            # b_il - y_lj <= a_ij
            edges.append((cj, bi, aij))
            if ((i, j), l) in tight:
                edges.append((bi, cj, -aij))
    dist = [0] * nv
    for _ in range(nv):
        changed = False
        for u, v, w in edges:
            cand = dist[u] + w
            if cand < dist[v]:
                dist[v] = cand
                changed = True
        if not changed:
            break
    else:
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                return None  # negative cycle: infeasible
    b_rows = [[BOTTOM] * k for _ in range(n)]
    c_rows = [[BOTTOM] * m for _ in range(k)]
    for (i, l), node in b_index.items():
        b_rows[i][l] = dist[node]
    for (l, j), node in c_index.items():
        c_rows[l][j] = -dist[node]
    return TropMatrix(b_rows), TropMatrix(c_rows)


def factor_rank_exact(a: TropMatrix, cap: Optional[int] = None, budget: int = 200_000) -> RankReport:
    """Smallest k with a = b (x) c for b in M_{n,k}, c in M_{k,m}.

    The all-bottom matrix has factor rank 0 by convention.  When the
    feasibility budget runs out the report downgrades to a certified
    upper bound with the best proven lower bound attached.
    """
    n, m = a.rows, a.cols
    trivial_cap = min(n, m)
    if cap is None:
        cap = trivial_cap
    finite = a.finite_positions()
    if not finite:
        return RankReport(0, "factor_exact", {"terms": []})
    lower = 1
    if trivial_cap <= TROPICAL_RANK_CAP:
        lower = max(lower, tropical_rank(a).value)
    checks = 0
    for k in range(lower, min(cap, trivial_cap) + 1):
        if k == trivial_cap:
            b, c = (a, TropMatrix.identity(m)) if m <= n else (TropMatrix.identity(n), a)
            return RankReport(k, "factor_exact", {"B": b, "C": c})
        for assign in _rgs_assignments(len(finite), k):
            checks += 1
            if checks > budget:
                b, c = (a, TropMatrix.identity(m)) if m <= n else (TropMatrix.identity(n), a)
                return RankReport(
                    trivial_cap,
                    "factor_upper",
                    {"B": b, "C": c, "budget_spent": checks - 1},
                    lower_bound=k,
                )
            result = _feasible_factorization(a, finite, assign, k)
            if result is not None:
                b, c = result
                if mat_mul(b, c) != a:
                    raise ReconstructionError("feasible assignment failed to reproduce the matrix")
                return RankReport(k, "factor_exact", {"B": b, "C": c})
    # every k up to the requested cap is infeasible, so the rank exceeds it
    return RankReport(min(cap, trivial_cap) + 1, "factor_lower", None)


def rank_one_sum_bound(terms: Sequence, target: TropMatrix) -> RankReport:
    """Check that the given (column, row) pairs tropically sum to the target.

    Each term contributes the rank-one matrix column (x) row; a mismatch
    raises ReconstructionError naming the first differing entry in row-major
    order.
    """
    mats = []
    for col, row in terms:
        if col.cols != 1 or row.rows != 1:
            raise ShapeError("terms must be (column vector, row vector) pairs")
        mats.append(mat_mul(col, row))
    acc = mat_max_all(mats) if mats else TropMatrix.bottom(target.rows, target.cols)
    if acc.shape != target.shape:
        raise ShapeError(f"terms build {acc.shape}, target is {target.shape}")
    if acc != target:
        for i in range(target.rows):
            for j in range(target.cols):
                if acc.entries[i][j] != target.entries[i][j]:
                    raise ReconstructionError(
                        f"entry ({i}, {j}): terms give {scalar_to_str(acc.entries[i][j])}, "
                        f"target has {scalar_to_str(target.entries[i][j])}"
                    )
    return RankReport(
        len(mats),
        "factor_upper",
        {"columns": [c for c, _ in terms], "rows": [r for _, r in terms]},
    )
