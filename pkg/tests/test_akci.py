import collections
import random

import pytest

from matext import lp as lpmod
from matext.akci import (
    AKSequence,
    AKStep,
    ak_pair_filter,
    build_sequence_lp,
    check_sequence,
    ge_heuristic,
    is_k_ak,
    nonmodular_flat_pairs,
    search_refutation,
    unfiltered_pairs,
    validate_sequence,
)
from matext.catalog import tic_tac_toe, vamos
from matext.lp import check_certificate
from matext.masks import mask_of
from matext.matroid import Matroid

from conftest import random_sparse_paving


def test_sequence_json_roundtrip():
    seq = AKSequence(
        [
            AKStep(x=mask_of([0, 1]), y=mask_of([2, 3])),
            AKStep(x=mask_of([0, 4]) | (1 << 8), y=mask_of([5]), kind="CI"),
        ]
    )
    seq2 = AKSequence.from_json(seq.to_json(8))
    assert [(s.x, s.y, s.kind) for s in seq2.steps] == [
        (s.x, s.y, s.kind) for s in seq.steps
    ]


def test_validate_sequence_rejects_bad_steps():
    m = Matroid.uniform(3, 5)
    with pytest.raises((lpmod.LPError, ValueError)):
        # references an auxiliary point that does not exist yet
        validate_sequence(m, AKSequence([AKStep(x=mask_of([0, 1]) | (1 << 6), y=2)]))


def test_t3_filter_tag_census():
    t3 = tic_tac_toe()
    pairs = nonmodular_flat_pairs(t3)
    assert len(pairs) == 20034
    tags = collections.Counter(ak_pair_filter(t3, x, y) for x, y in pairs)
    assert tags == collections.Counter(
        {
            None: 8540,
            "TWO_HYPERPLANES": 6994,
            "XY_CIRCUIT": 1716,
            "X_LINE": 988,
            "SPARSE_RANK_SUM": 904,
            "Y_HYPERPLANE": 892,
        }
    )


def test_vamos_filter_tag_census():
    v = vamos()
    pairs = nonmodular_flat_pairs(v)
    assert len(pairs) == 1894
    tags = collections.Counter(ak_pair_filter(v, x, y) for x, y in pairs)
    assert tags == collections.Counter(
        {
            "TWO_HYPERPLANES": 1084,
            "X_LINE": 420,
            "XY_CIRCUIT": 272,
            "SPARSE_RANK_SUM": 88,
            None: 30,
        }
    )


def test_vamos_not_1_ak():
    verdict, res = is_k_ak(vamos(), 1)
    assert verdict is False
    assert res.refutation is not None
    (step,) = res.refutation.steps
    assert (step.x, step.y) == (mask_of([0, 1, 2, 3]), mask_of([4, 5]))
    # the embedded certificate re-verifies
    lp = build_sequence_lp(vamos(), res.refutation)
    assert check_certificate(lp, res.reports[0].outcome)


def test_ak_information_rank_forced():
    """Feasible single-step AK solutions pin f(Z) to r(X)+r(Y)-r(XY)."""
    v = vamos()
    z = 1 << v.n
    checked = 0
    for x, y in nonmodular_flat_pairs(v):
        if ak_pair_filter(v, x, y) is None:
            continue
        out, _ = check_sequence(v, AKSequence([AKStep(x=x, y=y)]))
        assert out.status == "feasible"
        assert out.exact_point
        assert out.point[z] == v.rank(x) + v.rank(y) - v.rank(x | y)
        checked += 1
        if checked >= 8:
            break
    assert checked == 8


def test_ge_implies_ci_feasible():
    t3 = tic_tac_toe()
    rng = random.Random(3)
    cands = [p for p in nonmodular_flat_pairs(t3) if ak_pair_filter(t3, *p) is None]
    rng.shuffle(cands)
    tried = 0
    for x, y in cands:
        if not ge_heuristic(t3, x, y):
            continue
        out, _ = check_sequence(t3, AKSequence([AKStep(x=x, y=y, kind="CI")]))
        assert out.status == "feasible", (x, y)
        tried += 1
        if tried >= 3:
            break
    assert tried == 3


def test_overlapping_pair_rows_accumulate():
    """AK2' rows where X' is inside Y must cancel the f(X'Y) and f(Y) terms
    against each other (they are the same variable), not drop one of them."""
    t3 = tic_tac_toe()
    x, y = mask_of([5, 6, 8]), mask_of([1, 3, 7, 8])  # share point 8
    lp = build_sequence_lp(t3, AKSequence([AKStep(x=x, y=y)]))
    z = 1 << 9
    for row in lp.rows:
        if row.tag == "AK2'" and (1 << 8) | z in row.coeffs:
            # X' = {8} is inside Y: row must reduce to f(X'Z) - f(Z) = 0
            assert row.coeffs == {(1 << 8) | z: 1, z: -1}
    out, _ = check_sequence(t3, AKSequence([AKStep(x=x, y=y)]))
    assert out.status == "feasible"
    # the same point also admits a common information, as theory requires
    out_ci, _ = check_sequence(t3, AKSequence([AKStep(x=x, y=y, kind="CI")]))
    assert out_ci.status == "feasible"


def test_filters_do_not_change_verdict_small():
    rng = random.Random(21)
    for _ in range(4):
        m = random_sparse_paving(6, 3, rng)
        v1, _ = is_k_ak(m, 1, use_filters=True)
        v2, _ = is_k_ak(m, 1, use_filters=False)
        assert v1 == v2


def test_search_refutation_budget_flag():
    res = search_refutation(vamos(), max_depth=1, budget=0)
    assert res.refutation is None
    assert res.truncated


def test_sequence_lp_has_expected_blocks():
    t3 = tic_tac_toe()
    seq = AKSequence([AKStep(x=mask_of([0, 1, 2]), y=mask_of([3, 6]))])
    lp = build_sequence_lp(t3, seq)
    tags = collections.Counter(r.tag for r in lp.rows)
    assert tags["AK1"] == 1
    assert tags["RANK_PIN"] == (1 << 9) - 1
    assert tags["AK2'"] >= 2
    assert tags["SHANNON"] > 0
