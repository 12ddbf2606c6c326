"""Exact rational linear feasibility via Phase-I simplex.

Decides whether a target vector is a convex combination of given points,
entirely over Fractions.  Infeasibility comes with a Farkas certificate:
a vector y with y . p <= c for every point p but y . target > c, i.e. a
separating hyperplane usable to build explicit counterexamples.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence


def solve_nonnegative_combination(columns: Sequence[Sequence], rhs: Sequence):
    """Find x >= 0 with sum x_i * columns[i] = rhs, or a Farkas vector.

    Returns (True, x) on feasibility, else (False, y) with
    y . columns[i] <= 0 for all i and y . rhs > 0.
    Bland's rule keeps the pivoting finite; all arithmetic is exact.
    """
    m = len(columns)
    k = len(rhs)
    signs = [1] * k
    rows = []
    for r in range(k):
        row = [Fraction(col[r]) for col in columns]
        b = Fraction(rhs[r])
        if b < 0:
            row = [-x for x in row]
            b = -b
            signs[r] = -1
        row.extend(Fraction(1) if t == r else Fraction(0) for t in range(k))
        row.append(b)
        rows.append(row)
    width = m + k + 1
    # Phase-I objective: minimize the sum of the artificial variables.
    # cost row holds reduced costs; value cell carries -objective.
    cost = [Fraction(0)] * width
    for row in rows:
        for t in range(width):
            cost[t] -= row[t]
    for t in range(m, m + k):
        cost[t] += 1
    basis = list(range(m, m + k))

    while True:
        enter = next((t for t in range(m + k) if cost[t] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for r in range(k):
            coeff = rows[r][enter]
            if coeff > 0:
                ratio = rows[r][width - 1] / coeff
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave is None:
            raise ArithmeticError("phase-I objective unbounded; inconsistent tableau")
        pivot = rows[leave][enter]
        rows[leave] = [x / pivot for x in rows[leave]]
        prow = rows[leave]
        for r in range(k):
            if r != leave and rows[r][enter]:
                f = rows[r][enter]
                rows[r] = [x - f * y for x, y in zip(rows[r], prow)]
        if cost[enter]:
            f = cost[enter]
            cost = [x - f * y for x, y in zip(cost, prow)]
        basis[leave] = enter

    objective = -cost[width - 1]
    if objective == 0:
        x = [Fraction(0)] * m
        for r, var in enumerate(basis):
            if var < m:
                x[var] = rows[r][width - 1]
        return True, x
    # duals: reduced cost of artificial t is 1 - y_t in the internal signs
    y = [signs[t] * (1 - cost[m + t]) for t in range(k)]
    return False, y


def hull_membership(points: Sequence[Sequence], target: Sequence):
    """Is target in the convex hull of the points?

    Returns (True, lambdas) with an explicit convex combination, or
    (False, y) where y . target > max_i (y . points[i]): a separating
    direction over the coordinates.
    """
    if not points:
        return False, [Fraction(0)] * len(target) + [Fraction(1)]
    columns = [tuple(p) + (1,) for p in points]
    rhs = tuple(target) + (1,)
    feasible, cert = solve_nonnegative_combination(columns, rhs)
    if feasible:
        return True, cert
    return False, cert[:-1]


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(u, v)), Fraction(0))


def verify_membership(points, target, lambdas) -> bool:
    if len(lambdas) != len(points):
        return False
    if any(l < 0 for l in lambdas):
        return False
    if sum(lambdas) != 1:
        return False
    dim = len(target)
    for c in range(dim):
        if sum(l * Fraction(p[c]) for l, p in zip(lambdas, points)) != Fraction(target[c]):
            return False
    return True


def verify_separation(points, target, y) -> bool:
    ty = dot(y, target)
    return all(dot(y, p) < ty for p in points)


def scale_to_integers(vec: Sequence) -> list:
    """Clear denominators, preserving direction."""
    fracs = [Fraction(x) for x in vec]
    from math import lcm

    denom = lcm(*[f.denominator for f in fracs]) if fracs else 1
    return [int(f * denom) for f in fracs]
