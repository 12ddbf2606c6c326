import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropid.core import (
    BOTTOM,
    CapExceeded,
    ShapeError,
    TropMatrix,
    is_nonsingular,
    lcm_upto,
    mat_max,
    mat_mul,
    mat_pow,
    permanent,
    permutation_weight,
    power_table,
    scalar_from_str,
    scalar_to_str,
    trace,
)


def M(rows):
    return TropMatrix(rows)


def random_matrix(rng, n, low=-10, high=10, bottom_mass=0.0):
    return TropMatrix(
        [[BOTTOM if rng.random() < bottom_mass else rng.randint(low, high) for _ in range(n)] for _ in range(n)]
    )


# -- scalars ------------------------------------------------------------


def test_bottom_is_absorbing_and_minimal():
    assert BOTTOM + 5 is BOTTOM
    assert 5 + BOTTOM is BOTTOM
    assert BOTTOM + BOTTOM is BOTTOM
    assert BOTTOM < 0
    assert not (BOTTOM < BOTTOM)
    assert max(BOTTOM, -100) == -100
    assert max(BOTTOM, BOTTOM) is BOTTOM


def test_floats_rejected():
    with pytest.raises(TypeError):
        M([[1.5]])
    with pytest.raises(TypeError):
        M([[True]])


def test_scalar_round_trip():
    for x in [0, -7, 123456, Fraction(3, 7), Fraction(-22, 5), BOTTOM]:
        assert scalar_from_str(scalar_to_str(x)) == x or scalar_from_str(scalar_to_str(x)) is x
    assert scalar_from_str("4/2") == 2


# -- matrix construction and serialization --------------------------------


def test_shape_validation():
    with pytest.raises(ShapeError):
        M([])
    with pytest.raises(ShapeError):
        M([[1, 2], [3]])


def test_json_round_trip(tmp_path):
    a = M([[0, Fraction(1, 3)], [BOTTOM, -4]])
    obj = a.to_obj()
    assert obj["entries"][1][0] == "-inf"
    assert obj["entries"][0][1] == "1/3"
    b = TropMatrix.from_obj(json.loads(json.dumps(obj)))
    assert a == b


# -- mat_mul --------------------------------------------------------------


def test_mul_identity():
    a = M([[3, BOTTOM], [Fraction(1, 2), -2]])
    assert mat_mul(TropMatrix.identity(2), a) == a
    assert mat_mul(a, TropMatrix.identity(2)) == a


def test_mul_hand_expansion():
    # (AB)_ij = max_k (A_ik + B_kj), expanded entry by entry
    a = M([[0, 1], [BOTTOM, 0]])
    b = M([[0, BOTTOM], [2, 0]])
    assert mat_mul(a, b) == M([[3, 1], [2, 0]])


def test_mul_absorbing_zero():
    a = M([[1, 2], [3, 4]])
    z = TropMatrix.bottom(2, 2)
    assert mat_mul(a, z) == z
    assert mat_mul(z, a) == z


def test_mul_shape_mismatch():
    with pytest.raises(ShapeError):
        mat_mul(M([[1, 2]]), M([[1, 2]]))


def test_mul_associative_randomized():
    rng = random.Random(20260810)
    for _ in range(60):
        n = rng.randint(1, 5)
        a = random_matrix(rng, n, bottom_mass=0.2)
        b = random_matrix(rng, n, bottom_mass=0.2)
        c = random_matrix(rng, n, bottom_mass=0.2)
        assert mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c))


# -- mat_max ---------------------------------------------------------------


def test_max_idempotent_and_identity():
    a = M([[1, BOTTOM], [0, 3]])
    assert mat_max(a, a) == a
    assert mat_max(a, TropMatrix.bottom(2, 2)) == a


def test_max_entrywise():
    assert mat_max(M([[1, BOTTOM]]), M([[0, 3]])) == M([[1, 3]])


# -- powers -----------------------------------------------------------------


def test_pow_zero_is_identity():
    a = M([[5, 1], [2, BOTTOM]])
    assert mat_pow(a, 0) == TropMatrix.identity(2)


def test_pow_diagonal():
    a = M([[0, BOTTOM], [BOTTOM, -1]])
    assert mat_pow(a, 2) == M([[0, BOTTOM], [BOTTOM, -2]])


def test_pow_addition_law():
    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n, bottom_mass=0.25)
        s, t = rng.randint(0, 5), rng.randint(0, 5)
        assert mat_pow(a, s + t) == mat_mul(mat_pow(a, s), mat_pow(a, t))


def test_power_table_matches_mat_pow():
    rng = random.Random(11)
    a = random_matrix(rng, 3, bottom_mass=0.3)
    table = power_table(a, 6)
    for t, m in enumerate(table):
        assert m == mat_pow(a, t)


# -- trace / permanent / nonsingularity -------------------------------------


def test_trace_values():
    assert trace(TropMatrix.identity(3)) == 0
    assert trace(M([[1, 2], [3, 4]])) == 5
    assert trace(M([[BOTTOM, 0], [0, BOTTOM]])) is BOTTOM
    with pytest.raises(ShapeError):
        trace(M([[1, 2]]))


def test_permanent_identity():
    rep = permanent(TropMatrix.identity(2))
    assert rep.value == 0
    assert rep.unique
    assert rep.optimal_permutations == ((0, 1),)


def test_permanent_tie():
    rep = permanent(M([[1, 2], [3, 4]]))
    # both permutations weigh 5: id -> 1+4, swap -> 2+3
    assert rep.value == 5
    assert not rep.unique
    assert set(rep.optimal_permutations) == {(0, 1), (1, 0)}


def test_permanent_all_bottom():
    rep = permanent(TropMatrix.bottom(2, 2))
    assert rep.value is BOTTOM
    assert not rep.unique
    assert rep.optimal_permutations == ()


def test_permanent_strategies_agree():
    rng = random.Random(99)
    for _ in range(120):
        n = rng.randint(1, 5)
        a = random_matrix(rng, n, bottom_mass=rng.choice([0.0, 0.3, 0.6]))
        ex = permanent(a, strategy="exhaustive")
        dp = permanent(a, strategy="assignment")
        assert ex.value == dp.value or (ex.value is BOTTOM and dp.value is BOTTOM)
        assert ex.unique == dp.unique
        assert sorted(ex.optimal_permutations) == sorted(dp.optimal_permutations) or (ex.truncated or dp.truncated)


def test_permanent_large_uses_assignment():
    rng = random.Random(5)
    a = random_matrix(rng, 10)
    rep = permanent(a)
    assert rep.strategy == "assignment"
    # spot check: reported permutation attains the value
    assert permutation_weight(a, rep.optimal_permutations[0]) == rep.value
    with pytest.raises(CapExceeded):
        permanent(a, strategy="exhaustive")


def test_permanent_truncation_flag():
    a = TropMatrix.fill(4, 4, 0)
    rep = permanent(a, perm_cap=5)
    assert rep.truncated
    assert len(rep.optimal_permutations) == 5
    assert not rep.unique


def test_nonsingularity():
    assert is_nonsingular(TropMatrix.identity(4))
    assert not is_nonsingular(M([[1, 2], [3, 4]]))
    assert is_nonsingular(M([[0, BOTTOM], [BOTTOM, 0]]))


def test_permanent_product_inequality_and_composition():
    # per(AB) >= per(A) + per(B); equality plus tau composition when AB
    # is nonsingular
    rng = random.Random(42)
    seen_nonsingular = 0
    for _ in range(150):
        n = rng.randint(1, 5)
        a = random_matrix(rng, n, bottom_mass=0.2)
        b = random_matrix(rng, n, bottom_mass=0.2)
        pa, pb, pab = permanent(a), permanent(b), permanent(mat_mul(a, b))
        if pa.value is BOTTOM or pb.value is BOTTOM:
            assert pab.value is BOTTOM or pab.value >= BOTTOM
        else:
            assert pab.value is not BOTTOM and pab.value >= pa.value + pb.value
        if pab.unique:
            seen_nonsingular += 1
            assert pa.unique and pb.unique
            assert pab.value == pa.value + pb.value
            ta, tb, tab = (
                pa.optimal_permutations[0],
                pb.optimal_permutations[0],
                pab.optimal_permutations[0],
            )
            assert tuple(tb[ta[i]] for i in range(n)) == tab
    assert seen_nonsingular > 10


def test_permanent_vs_trace_and_product_trace():
    rng = random.Random(3)
    for _ in range(80):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n, bottom_mass=0.2)
        b = random_matrix(rng, n, bottom_mass=0.2)
        pa = permanent(a).value
        ta = trace(a)
        if ta is not BOTTOM:
            assert pa is not BOTTOM and pa >= ta
        tab = trace(mat_mul(a, b))
        tb = trace(b)
        if ta is not BOTTOM and tb is not BOTTOM:
            assert tab is not BOTTOM and tab >= ta + tb


@given(st.integers(-30, 30), st.integers(1, 4), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_permanent_scaling(alpha, n, seed):
    rng = random.Random(seed)
    a = random_matrix(rng, n, bottom_mass=0.2)
    pa = permanent(a).value
    shifted = permanent(a.shift(alpha)).value
    if pa is BOTTOM:
        assert shifted is BOTTOM
    else:
        assert shifted == pa + n * alpha


def test_lcm_upto():
    assert lcm_upto(1) == 1
    assert lcm_upto(3) == 6
    assert lcm_upto(5) == 60
    assert lcm_upto(6) == 60
