import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropid.core import BOTTOM, TropMatrix, lcm_upto, mat_mul, mat_pow, permanent, trace
from tropid.ranks import tropical_rank
from tropid.words import (
    Concat,
    Leaf,
    LWDigraph,
    Repeat,
    Subst,
    W,
    Word,
    diagonal_formula_check,
    evaluate,
    evaluate_walk_dp,
    occurrences,
    one_cyclic_matrix,
    one_cyclic_optimum,
    perm_trace_power_check,
    pr_condition,
    random_pr_pair,
    substitute,
)

M = TropMatrix

words_st = st.text(alphabet="ab", min_size=1, max_size=12).map(W)


def random_matrix(rng, n, low=-10, high=10, bottom_mass=0.0):
    return M([[BOTTOM if rng.random() < bottom_mass else rng.randint(low, high) for _ in range(n)] for _ in range(n)])


def random_word(rng, max_len=8):
    return W("".join(rng.choice("ab") for _ in range(rng.randint(1, max_len))))


# -- word type ---------------------------------------------------------------


def test_word_parsing_and_rle():
    assert W("abba").to_plain() == "abba"
    assert W("a^2 b^2 a").to_plain() == "aabba"
    assert W("a^6b^6").runs == (("a", 6), ("b", 6))
    assert len(W("a^100 b")) == 101
    with pytest.raises(ValueError):
        W("")
    with pytest.raises(ValueError):
        W("abc")


def test_word_concat_and_repeat():
    assert (W("ab") + W("ba")).to_plain() == "abba"
    assert (W("ab") * 3).to_plain() == "ababab"
    assert (W("a") + W("a")).runs == (("a", 2),)


def test_occurrences():
    assert occurrences(W("abba"), "a") == 2
    assert occurrences(W("a^5"), "b") == 0
    rng = random.Random(1)
    for _ in range(30):
        w = random_word(rng)
        assert occurrences(w, "a") + occurrences(w, "b") == len(w)


def test_substitute_examples():
    assert substitute(W("ab"), W("aa"), W("ba")).to_plain() == "aaba"
    rng = random.Random(2)
    for _ in range(30):
        w = random_word(rng)
        assert substitute(w, W("a"), W("b")) == w


def test_substitute_length_and_counts():
    rng = random.Random(3)
    for _ in range(40):
        w, u, v = random_word(rng), random_word(rng), random_word(rng)
        out = substitute(w, u, v)
        ka, kb = occurrences(w, "a"), occurrences(w, "b")
        assert len(out) == ka * len(u) + kb * len(v)
        assert occurrences(out, "a") == ka * occurrences(u, "a") + kb * occurrences(v, "a")


# -- evaluation -----------------------------------------------------------------


def test_evaluate_single_letters():
    rng = random.Random(4)
    a = random_matrix(rng, 3, bottom_mass=0.3)
    b = random_matrix(rng, 3, bottom_mass=0.3)
    assert evaluate(W("a"), a, b) == a
    assert evaluate(W("b"), a, b) == b


def test_evaluate_hand_example():
    a = M([[0, 1], [BOTTOM, 0]])
    b = M([[0, BOTTOM], [2, 0]])
    assert evaluate(W("ab"), a, b) == M([[3, 1], [2, 0]])


def test_evaluate_powers():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n, bottom_mass=0.3)
        b = random_matrix(rng, n, bottom_mass=0.3)
        t = rng.randint(1, 6)
        assert evaluate(W("a") * t, a, b) == mat_pow(a, t)
        assert evaluate(W("a") * t + W("b"), a, b) == mat_mul(mat_pow(a, t), b)


def test_evaluate_matches_walk_dp():
    rng = random.Random(6)
    for _ in range(40):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n, bottom_mass=0.35)
        b = random_matrix(rng, n, bottom_mass=0.35)
        w = random_word(rng, max_len=7)
        assert evaluate(w, a, b) == evaluate_walk_dp(w, a, b)


def test_evaluate_same_matrix_is_power():
    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n, bottom_mass=0.3)
        w = random_word(rng)
        assert evaluate(w, a, a) == mat_pow(a, len(w))


def test_evaluate_scaling_in_first_argument():
    rng = random.Random(8)
    for _ in range(25):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n, bottom_mass=0.2)
        b = random_matrix(rng, n, bottom_mass=0.2)
        w = random_word(rng)
        alpha = rng.randint(-7, 7)
        shifted = evaluate(w, a.shift(alpha), b)
        base = evaluate(w, a, b)
        assert shifted == base.shift(occurrences(w, "a") * alpha)


@given(words_st, words_st, words_st, st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_substitution_homomorphism(w, u, v, seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    a = random_matrix(rng, n, bottom_mass=0.25)
    b = random_matrix(rng, n, bottom_mass=0.25)
    direct = evaluate(substitute(w, u, v), a, b)
    composed = evaluate(w, evaluate(u, a, b), evaluate(v, a, b))
    assert direct == composed


def test_lw_digraph_arcs():
    a = M([[0, BOTTOM], [BOTTOM, 1]])
    b = M([[BOTTOM, 2], [BOTTOM, BOTTOM]])
    g = LWDigraph.from_pair(a, b)
    assert (0, 0, "a", 0) in g.arcs
    assert (0, 1, "b", 2) in g.arcs
    assert len(g.arcs) == 3


# -- evaluation plans ---------------------------------------------------------------


def test_expr_plans_match_flat_words():
    rng = random.Random(9)
    core = Subst(W("aba"), Leaf(W("a^2")), Leaf(W("b^2")))
    plan = Concat((Repeat(core, 3), Leaf(W("ab"))))
    flat = plan.word()
    assert flat == substitute(W("aba"), W("a^2"), W("b^2")) * 3 + W("ab")
    for _ in range(15):
        n = rng.randint(1, 3)
        a = random_matrix(rng, n, bottom_mass=0.25)
        b = random_matrix(rng, n, bottom_mass=0.25)
        assert plan.evaluate(a, b) == evaluate(flat, a, b)


def test_expr_memo_shares_subtrees():
    calls = []

    class Spy(Leaf):
        def _compute(self, a, b, memo):
            calls.append(1)
            return super()._compute(a, b, memo)

    shared = Spy(W("ab"))
    plan = Concat((shared, shared, shared))
    rng = random.Random(10)
    a = random_matrix(rng, 2)
    b = random_matrix(rng, 2)
    plan.evaluate(a, b)
    assert len(calls) == 1


# -- Shitov factorization and full-rank transfer ---------------------------------------


def test_shitov_factorization_identity():
    # expanding the products letter by letter gives
    #   w<AB, AC> x A = P (w<QBP, QCP>) Q          for A = PQ
    # and hence, with B the identity (the pair (X, XR) case),
    #   (wa)<A, AC> = P (w<QP, QCP>) Q
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(2, 4)
        k = rng.randint(1, n - 1)
        p = M([[rng.randint(-5, 5) for _ in range(k)] for _ in range(n)])
        q = M([[rng.randint(-5, 5) for _ in range(n)] for _ in range(k)])
        b = random_matrix(rng, n, bottom_mass=0.2)
        c = random_matrix(rng, n, bottom_mass=0.2)
        w = random_word(rng, max_len=5)
        a = mat_mul(p, q)
        lhs = mat_mul(evaluate(w, mat_mul(a, b), mat_mul(a, c)), a)
        inner = evaluate(w, mat_mul(mat_mul(q, b), p), mat_mul(mat_mul(q, c), p))
        rhs = mat_mul(mat_mul(p, inner), q)
        assert lhs == rhs
        lhs2 = evaluate(w + W("a"), a, mat_mul(a, c))
        inner2 = evaluate(w, mat_mul(q, p), mat_mul(mat_mul(q, c), p))
        assert lhs2 == mat_mul(mat_mul(p, inner2), q)


def test_full_rank_pairs_satisfy_triangular_identities():
    # an identity that holds for upper triangular pairs transfers to any pair
    # meeting the permanent/trace and full-rank conditions
    adjan_u = W("abba") + W("ab") + W("abba")
    adjan_v = W("abba") + W("ba") + W("abba")
    rng = random.Random(12)
    for _ in range(10):
        n = rng.randint(2, 3)
        a, b = random_pr_pair(rng, n, adjan_u)
        if not pr_condition(a, b, adjan_v).holds:
            continue
        assert evaluate(adjan_u, a, b) == evaluate(adjan_v, a, b)


# -- permanent/rank condition -------------------------------------------------------


def test_pr_condition_identity_pair():
    diag = pr_condition(TropMatrix.identity(2), TropMatrix.identity(2), W("ab"))
    assert diag.holds


def test_pr_condition_fails_on_singular_product():
    a = M([[1, 2], [3, 4]])
    diag = pr_condition(a, TropMatrix.identity(2), W("ab"))
    assert not diag.holds
    assert not diag.full_rank


def test_pr_condition_generator():
    rng = random.Random(13)
    for _ in range(10):
        n = rng.randint(2, 4)
        w = random_word(rng, max_len=6)
        a, b = random_pr_pair(rng, n, w)
        diag = pr_condition(a, b, w)
        assert diag.holds
        assert permanent(a).value == trace(a)


def test_diagonal_formula():
    assert diagonal_formula_check(TropMatrix.identity(2), TropMatrix.identity(2), W("ab"))
    rng = random.Random(14)
    for _ in range(25):
        n = rng.randint(2, 4)
        w = random_word(rng, max_len=8)
        a, b = random_pr_pair(rng, n, w)
        assert diagonal_formula_check(a, b, w)


def test_diagonal_formula_requires_condition():
    a = M([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        diagonal_formula_check(a, TropMatrix.identity(2), W("ab"))


def test_diagonal_formula_can_fail_without_condition():
    # without the permanent/rank condition the diagonal can exceed the
    # loops-only walk weight
    a = M([[0, 5], [5, 0]])
    w = W("aa")
    val = evaluate(w, a, a)
    assert val.entries[0][0] == 10 > 2 * a.entries[0][0]


# -- one-cyclic walks -----------------------------------------------------------------


def one_cyclic_oracle(w, a, b, i, j):
    """Brute force over labeled node sequences that never revisit a departed
    node."""
    n = a.rows
    letters = list(w)
    best = BOTTOM
    for mids in product(range(n), repeat=len(letters) - 1):
        seq = (i,) + mids + (j,)
        ok = True
        weight = 0
        departed = set()
        for k, letter in enumerate(letters):
            u, v = seq[k], seq[k + 1]
            if u != v:
                departed.add(u)
            if v in departed:
                ok = False
                break
            mat = a if letter == "a" else b
            x = mat.entries[u][v]
            if x is BOTTOM:
                ok = False
                break
            weight += x
        if ok and (best is BOTTOM or weight > best):
            best = weight
    return best


def test_one_cyclic_single_node():
    a = M([[3]])
    b = M([[-1]])
    assert one_cyclic_optimum(W("aab"), a, b, 0, 0) == 5
    assert one_cyclic_optimum(W("a"), M([[BOTTOM]]), b, 0, 0) is BOTTOM


def test_one_cyclic_against_oracle():
    rng = random.Random(15)
    for _ in range(25):
        n = rng.randint(1, 3)
        a = random_matrix(rng, n, bottom_mass=0.3)
        b = random_matrix(rng, n, bottom_mass=0.3)
        w = random_word(rng, max_len=5)
        mat = one_cyclic_matrix(w, a, b)
        for i in range(n):
            for j in range(n):
                assert mat.entries[i][j] == one_cyclic_oracle(w, a, b, i, j)


def test_one_cyclic_below_evaluation():
    rng = random.Random(16)
    for _ in range(20):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n, bottom_mass=0.3)
        b = random_matrix(rng, n, bottom_mass=0.3)
        w = random_word(rng, max_len=6)
        full = evaluate(w, a, b)
        restricted = one_cyclic_matrix(w, a, b)
        for i in range(n):
            for j in range(n):
                r = restricted.entries[i][j]
                f = full.entries[i][j]
                assert r is BOTTOM or (f is not BOTTOM and r <= f)


def test_one_cyclic_reaches_evaluation_under_condition():
    rng = random.Random(17)
    for _ in range(15):
        n = rng.randint(2, 4)
        w = random_word(rng, max_len=6)
        a, b = random_pr_pair(rng, n, w)
        full = evaluate(w, a, b)
        restricted = one_cyclic_matrix(w, a, b)
        assert restricted == full


# -- permanent/trace power check ---------------------------------------------------------


def test_perm_trace_power_check():
    assert perm_trace_power_check(TropMatrix.identity(3))
    rng = random.Random(18)
    vacuous = 0
    for _ in range(60):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n, bottom_mass=rng.choice([0.0, 0.3]))
        assert perm_trace_power_check(a)
        if tropical_rank(mat_pow(a, lcm_upto(n))).value < n:
            vacuous += 1
    assert vacuous > 0
