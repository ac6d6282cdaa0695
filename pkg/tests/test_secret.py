from fractions import Fraction

import pytest

from matext.akci import AKSequence, AKStep
from matext.catalog import ag_3_2_prime, tic_tac_toe
from matext.lp import check_certificate
from matext.masks import mask_of
from matext.matroid import Matroid
from matext.secret import (
    AccessStructure,
    StructureError,
    ak_set_advisor,
    build_bound_lp,
    maximal_forbidden,
    port,
    ss_bound,
)


def test_u23_port_is_2_of_3_threshold():
    m = Matroid.uniform(2, 3)
    spec = port(m, 0)
    assert spec.structure.participants == mask_of([1, 2])
    assert spec.structure.min_authorized == [mask_of([1, 2])]
    assert maximal_forbidden(spec) == sorted([mask_of([1]), mask_of([2])])


def test_t3_port_minimal_authorized_are_port_members():
    m = tic_tac_toe()
    spec = port(m, 0)
    d = 1
    for a in spec.structure.min_authorized:
        assert m.rank(a | d) == m.rank(a)
        # minimality: every proper subset fails
        for p in range(9):
            s = a & ~(1 << p)
            if s != a and s:
                assert m.rank(s | d) > m.rank(s) or not spec.structure.is_authorized(s)


def test_access_structure_validation():
    with pytest.raises(StructureError):
        AccessStructure(mask_of([1, 2]), 1, [mask_of([2])])  # dealer inside
    with pytest.raises(StructureError):
        AccessStructure(mask_of([1, 2]), 0, [mask_of([1]), mask_of([1, 2])])  # chain
    with pytest.raises(StructureError):
        AccessStructure(mask_of([1, 2]), 0, [])


def test_port_rejects_degenerate_dealers():
    m = Matroid.from_bases(3, [[0], [1]])  # point 2 is a loop
    with pytest.raises(StructureError):
        port(m, 2)


def test_ideal_port_bound_is_one_with_certificate():
    spec = port(Matroid.uniform(2, 3), 0)
    res = ss_bound(spec)
    assert res.sigma_lower == 1
    assert res.certificate.status == "optimal"
    assert check_certificate(res.lp, res.certificate)


def test_normalization_scales_bound():
    spec = port(Matroid.uniform(2, 3), 0)
    lp = build_bound_lp(spec, normalization=2)
    from matext import lp as lpmod

    out = lpmod.solve(lp)
    assert out.status == "optimal"
    assert out.value == 2


def test_ag_prime_port_single_ak_step_bound():
    m = ag_3_2_prime()
    spec = port(m, 1)
    res0 = ss_bound(spec)
    assert res0.sigma_lower == 1  # no auxiliary information: trivial bound
    step = AKStep(x=mask_of([2, 3, 4, 5]), y=mask_of([6, 7]))
    res1 = ss_bound(spec, AKSequence([step]))
    assert res1.sigma_lower == Fraction(13, 12)
    assert check_certificate(res1.lp, res1.certificate)


def test_bound_result_serialization():
    spec = port(Matroid.uniform(2, 3), 0)
    res = ss_bound(spec)
    d = res.to_dict()
    assert d["sigma_lower"] == "1"
    assert d["certificate"]["status"] == "optimal"


def test_step_referencing_unknown_point_rejected():
    spec = port(Matroid.uniform(2, 3), 0)
    with pytest.raises(StructureError):
        build_bound_lp(spec, AKSequence([AKStep(x=1 << 7, y=1 << 2)]))


def test_step_count_cap():
    spec = port(Matroid.uniform(2, 3), 0)
    steps = AKSequence([AKStep(x=2, y=4)] * 5)
    with pytest.raises(StructureError):
        build_bound_lp(spec, steps)


def test_advisor_deterministic():
    spec = port(ag_3_2_prime(), 1)
    a = ak_set_advisor(spec, budget=12)
    b = ak_set_advisor(spec, budget=12)
    assert a == b
    assert all(v >= 1 for v, _ in a)
