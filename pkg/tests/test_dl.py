import collections
import random

import pytest

from matext.catalog import isd_5_10, tic_tac_toe, vamos
from matext.dl import (
    GUARANTEED,
    INCONCLUSIVE,
    REFUTED,
    WITNESS_IN_GROUND,
    dl_ak_equiv_rank4,
    dl_pair_filter,
    is_k_dl,
    minimal_forced_flats,
    quasi_intersection_in,
)
from matext.masks import mask_of
from matext.matroid import Matroid, MatroidError

from conftest import random_sparse_paving


def test_quasi_intersection_modular_pair_is_intersection():
    m = Matroid.uniform(2, 4)
    x = m.closure(mask_of([0]))
    y = m.closure(mask_of([1]))
    t = quasi_intersection_in(m, x, y)
    assert t == (x & y)


def test_quasi_intersection_requires_flats():
    v = vamos()
    with pytest.raises(MatroidError):
        quasi_intersection_in(v, mask_of([0, 1, 2]), mask_of([4, 5]))


def test_minimal_forced_flats_are_minimal_and_forced():
    v = vamos()
    x, y = mask_of([0, 1, 2, 3]), mask_of([4, 5])
    ryx = v.rank(x | y) - v.rank(x)
    mins = minimal_forced_flats(v, x, y)
    assert mins
    for f in mins:
        assert (f & x) == f
        assert v.rank(f | y) - v.rank(f) == ryx
    for f in mins:
        for g in mins:
            assert f == g or (f & g) != f


def test_filter_tags_structure():
    v = vamos()
    # lines always carry a witness
    assert dl_pair_filter(v, mask_of([0, 2]), mask_of([1, 3])) == "LINE"
    # hyperplane partner
    assert dl_pair_filter(v, mask_of([0, 1, 2, 3]), mask_of([0, 4, 6])) == "HYPERPLANE"
    with pytest.raises(MatroidError):
        # (plane, plane) sharing a pair of points: a modular pair
        dl_pair_filter(v, mask_of([0, 1, 2, 3]), mask_of([2, 3, 4, 5]))


def test_vamos_depth1_refuted():
    v = vamos()
    verdict, reports = is_k_dl(v, 1)
    assert verdict is False
    census = collections.Counter(r.status for r in reports)
    assert census[REFUTED] == 1
    (bad,) = [r for r in reports if r.status == REFUTED]
    assert bad.pair == (mask_of([0, 1, 2, 3]), mask_of([4, 5]))


def test_t3_depth1_passes():
    t3 = tic_tac_toe()
    verdict, reports = is_k_dl(t3, 1)
    assert verdict is True
    census = collections.Counter(r.status for r in reports)
    assert census == collections.Counter(
        {GUARANTEED: 15174, WITNESS_IN_GROUND: 4860}
    )


def test_rank4_dl_ak_equivalence_census():
    v = vamos()
    census = collections.Counter()
    for x in v.flats(3):
        for y in v.flats(2):
            if v.modular_defect(x, y) > 0:
                census[dl_ak_equiv_rank4(v, x, y)] += 1
    assert census == collections.Counter({(True, True): 384, (False, False): 6})


def test_budget_truncation_reports_inconclusive():
    v = vamos()
    verdict, reports = is_k_dl(v, 2, budget=1, cut_budget=2)
    assert verdict in (False, INCONCLUSIVE)
    # never a silent pass under a tiny budget
    assert verdict is not True


def test_filters_do_not_change_verdict_small():
    rng = random.Random(31)
    for _ in range(4):
        m = random_sparse_paving(7, 3, rng)
        v1, _ = is_k_dl(m, 1, use_filters=True)
        v2, _ = is_k_dl(m, 1, use_filters=False)
        assert v1 == v2


def test_memoization_consistency():
    v = vamos()
    a = is_k_dl(v, 1)[0]
    b = is_k_dl(v, 1)[0]
    assert a == b is False
