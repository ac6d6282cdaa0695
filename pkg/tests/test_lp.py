import itertools
from fractions import Fraction

import pytest

from matext import lp as lpmod
from matext.lp import (
    EQ,
    GE,
    LE,
    LinearProgram,
    LPError,
    LPOutcome,
    check_certificate,
    pin_matroid,
    shannon_block,
    solve,
)
from matext.masks import full_mask, popcount, subsets_of
from matext.matroid import Matroid
from matext.catalog import vamos


def tiny_lp():
    lp = LinearProgram(2)
    lp.add_row({1: 1}, GE, 1)
    lp.add_row({1: 1, 2: 1}, LE, 3)
    lp.set_objective({1: 1, 2: -1})
    return lp


def test_row_ge_form_negates_le():
    lp = tiny_lp()
    coeffs, rhs = lp.rows[1].ge_form()
    assert coeffs == {1: -1, 2: -1} and rhs == -3


def test_float_coefficients_rejected():
    lp = LinearProgram(1)
    with pytest.raises(LPError):
        lp.add_row({1: 0.5}, GE, 0)


def test_lp_json_roundtrip():
    lp = tiny_lp()
    lp.add_row({"v": Fraction(2, 3), 3: -1}, EQ, Fraction(1, 7), tag="T")
    lp2 = LinearProgram.from_json(lp.to_json())
    assert lp2.n_points == lp.n_points
    assert [(r.coeffs, r.sense, r.rhs, r.tag) for r in lp2.rows] == [
        (r.coeffs, r.sense, r.rhs, r.tag) for r in lp.rows
    ]
    assert lp2.objective == lp.objective


def test_outcome_json_roundtrip():
    out = LPOutcome(
        status="optimal",
        point={1: Fraction(1, 3), "v": Fraction(2)},
        value=Fraction(5, 3),
        dual={0: Fraction(1, 2)},
    )
    out2 = LPOutcome.from_json(out.to_json())
    assert out2.status == out.status
    assert out2.point == out.point
    assert out2.value == out.value
    assert out2.dual == out.dual


def brute_polymatroid_ok(f, n):
    ground = full_mask(n)
    if f[0] != 0:
        return False
    for x in range(1 << n):
        for y in range(1 << n):
            if (x & y) == x and f[x] > f[y] + 1e-9:
                return False
            if f[x | y] + f[x & y] > f[x] + f[y] + 1e-9:
                return False
    return True


@pytest.mark.parametrize("n", [2, 3, 4])
def test_shannon_block_elemental_completeness(n):
    """The elemental rows admit exactly the polymatroids: every vector
    satisfying them passes brute-force monotonicity+submodularity, and
    every violating vector is cut off by some row."""
    lp = LinearProgram(n)
    shannon_block(lp, n)

    def satisfies(f):
        for row in lp.rows:
            lhs = sum(f[k] * float(v) for k, v in row.coeffs.items())
            if lhs < -1e-9:
                return False
        return True

    import random

    rng = random.Random(n)
    for trial in range(300):
        f = [0.0] * (1 << n)
        for x in range(1, 1 << n):
            f[x] = rng.uniform(0, 2)
        assert satisfies(f) == brute_polymatroid_ok(f, n)


def test_shannon_block_row_count():
    lp = LinearProgram(4)
    added = shannon_block(lp, 4)
    # n(n-1)/2 * 2^(n-2) submodular rows + n monotonicity rows
    assert added == 6 * 4 + 4


def test_pin_matroid_feasible_and_certified():
    m = Matroid.uniform(2, 3)
    lp = LinearProgram(3)
    shannon_block(lp, 3)
    pin_matroid(lp, m)
    out = solve(lp)
    assert out.status == "feasible"
    assert check_certificate(lp, out)
    assert out.point[full_mask(3)] == 2


def test_infeasible_has_verified_farkas():
    lp = LinearProgram(1)
    lp.add_row({1: 1}, GE, 2)
    lp.add_row({1: 1}, LE, 1)
    out = solve(lp)
    assert out.status == "infeasible"
    assert out.farkas is not None
    assert check_certificate(lp, out)


def test_optimum_with_dual_certificate():
    lp = LinearProgram(2)
    lp.add_row({1: 1, 2: 1}, GE, 2)
    lp.add_row({1: 1}, GE, 0)
    lp.add_row({2: 1}, GE, 0)
    lp.set_objective({1: 2, 2: 3})
    out = solve(lp)
    assert out.status == "optimal"
    assert out.value == 4
    assert check_certificate(lp, out)


def test_certificate_rejects_tampering():
    lp = LinearProgram(1)
    lp.add_row({1: 1}, GE, 2)
    lp.add_row({1: 1}, LE, 1)
    out = solve(lp)
    bad = LPOutcome.from_json(out.to_json())
    bad.farkas = dict(bad.farkas)
    bad.farkas[0] = -bad.farkas[0]  # negative multiplier on a >= row
    assert not check_certificate(lp, bad)
    bad2 = LPOutcome.from_json(out.to_json())
    bad2.farkas = {0: bad2.farkas[0]}  # drop a row: combination no longer zero
    assert not check_certificate(lp, bad2)


def test_unbounded_detected():
    lp = LinearProgram(1)
    lp.add_row({1: 1}, GE, 0)
    lp.set_objective({1: -1})
    out = solve(lp)
    assert out.status == "unbounded"


def test_solve_deterministic_across_runs():
    m = vamos()
    lp = LinearProgram(8)
    shannon_block(lp, 8)
    pin_matroid(lp, m)
    first = solve(lp)
    for _ in range(9):
        again = solve(lp)
        assert again.status == first.status
        assert again.point == first.point
        assert again.farkas == first.farkas
        assert again.value == first.value


def test_exact_and_float_paths_agree():
    lp = LinearProgram(2)
    lp.add_row({1: 1, 2: 2}, GE, 3)
    lp.add_row({1: 1}, LE, 5)
    lp.add_row({2: 1}, LE, 5)
    lp.add_row({1: 1}, GE, 0)
    lp.add_row({2: 1}, GE, 0)
    lp.set_objective({1: 1, 2: 1})
    a = solve(lp, method="exact")
    b = solve(lp, method="float")
    assert a.status == b.status == "optimal"
    assert a.value == b.value
    assert check_certificate(lp, a) and check_certificate(lp, b)


def test_size_guard():
    lp = LinearProgram(20)
    with pytest.raises(lpmod.LPSizeError):
        shannon_block(lp, 17)
