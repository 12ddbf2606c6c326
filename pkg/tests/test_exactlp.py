import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from tropid.exactlp import (
    hull_membership,
    scale_to_integers,
    solve_nonnegative_combination,
    verify_membership,
    verify_separation,
)


def test_feasible_combination_is_reconstructed():
    cols = [(1, 0), (0, 1), (1, 1)]
    ok, x = solve_nonnegative_combination(cols, (2, 3))
    assert ok
    assert sum(x[i] * Fraction(cols[i][0]) for i in range(3)) == 2
    assert sum(x[i] * Fraction(cols[i][1]) for i in range(3)) == 3


def test_infeasible_has_farkas_vector():
    cols = [(1, 0), (0, 1)]
    ok, y = solve_nonnegative_combination(cols, (-1, 0))
    assert not ok
    assert all(sum(Fraction(a) * Fraction(b) for a, b in zip(y, c)) <= 0 for c in cols)
    assert sum(Fraction(a) * Fraction(b) for a, b in zip(y, (-1, 0))) > 0


def test_hull_membership_triangle():
    pts = [(0, 0), (4, 0), (0, 4)]
    ok, lam = hull_membership(pts, (1, 1))
    assert ok and verify_membership(pts, (1, 1), lam)
    ok, lam = hull_membership(pts, (0, 0))
    assert ok and verify_membership(pts, (0, 0), lam)
    ok, lam = hull_membership(pts, (2, 2))
    assert ok and verify_membership(pts, (2, 2), lam)
    ok, y = hull_membership(pts, (3, 3))
    assert not ok and verify_separation(pts, (3, 3), y)


def test_hull_membership_empty_and_single():
    ok, y = hull_membership([], (1,))
    assert not ok
    ok, lam = hull_membership([(2, 5)], (2, 5))
    assert ok and lam == [1]
    ok, y = hull_membership([(2, 5)], (2, 4))
    assert not ok and verify_separation([(2, 5)], (2, 4), y)


def test_membership_on_segment_with_fractions():
    pts = [(0, 0), (1, 3)]
    ok, lam = hull_membership(pts, (Fraction(1, 2), Fraction(3, 2)))
    assert ok and verify_membership(pts, (Fraction(1, 2), Fraction(3, 2)), lam)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_randomized_memberships_have_checkable_certificates(seed):
    rng = random.Random(seed)
    dim = rng.randint(1, 5)
    pts = [tuple(rng.randint(-6, 6) for _ in range(dim)) for _ in range(rng.randint(1, 10))]
    if rng.random() < 0.5:
        # target: a random convex combination with small rational weights
        weights = [rng.randint(0, 4) for _ in pts]
        if sum(weights) == 0:
            weights[0] = 1
        total = sum(weights)
        target = tuple(
            sum(Fraction(w, total) * p[c] for w, p in zip(weights, pts)) for c in range(dim)
        )
        ok, lam = hull_membership(pts, target)
        assert ok and verify_membership(pts, target, lam)
    else:
        target = tuple(rng.randint(-8, 8) for _ in range(dim))
        ok, cert = hull_membership(pts, target)
        if ok:
            assert verify_membership(pts, target, cert)
        else:
            assert verify_separation(pts, target, cert)


def test_scale_to_integers():
    assert scale_to_integers([Fraction(1, 2), Fraction(1, 3)]) == [3, 2]
    assert scale_to_integers([2, -1]) == [2, -1]
