import random

import pytest

from matext.catalog import (
    ag_3_2,
    ag_3_2_prime,
    tic_tac_toe_dual,
    vamos,
)
from matext.masks import mask_of
from matext.matroid import Matroid, MatroidError
from matext.psm import (
    PseudoTriple,
    base_check_psm,
    brute_recursive_psm,
    get_psm_triples,
    recursive_psm,
    validate_triple,
)

from conftest import random_sparse_paving


@pytest.mark.parametrize("n,k", [(4, 2), (5, 3), (6, 3), (6, 4)])
def test_uniform_matroids_have_no_pseudotriples(n, k):
    assert list(get_psm_triples(Matroid.uniform(k, n))) == []


def test_validate_triple_symmetric_in_first_two():
    v = vamos()
    flats = sorted(v.flat_set())
    rng = random.Random(2)
    for _ in range(200):
        x, y, z = rng.choice(flats), rng.choice(flats), rng.choice(flats)
        assert validate_triple(v, x, y, z) == validate_triple(v, y, x, z)


def test_validate_triple_equal_xy_never_valid():
    v = vamos()
    for f in sorted(v.flat_set()):
        for z in (mask_of([4, 5]), mask_of([0, 1, 6, 7])):
            assert not validate_triple(v, f, f, z)


def test_validate_triple_rejects_non_flats():
    v = vamos()
    with pytest.raises(MatroidError):
        validate_triple(v, mask_of([0, 1, 2]), mask_of([4, 5]), mask_of([6, 7]))


def test_vamos_pseudotriples_frozen():
    got = [(t.x, t.y, t.z) for t in get_psm_triples(vamos())]
    assert got == [
        (mask_of([0, 1, 2, 3]), mask_of([0, 1, 4, 5]), mask_of([2, 3, 4, 5])),
        (mask_of([0, 1, 2, 3]), mask_of([0, 1, 6, 7]), mask_of([2, 3, 6, 7])),
    ]
    t = PseudoTriple(*got[0])
    assert t.a == 0


def test_base_check_verdicts_on_builtins():
    assert base_check_psm(vamos()) is False
    assert base_check_psm(ag_3_2_prime()) is False
    assert base_check_psm(ag_3_2()) is True
    assert base_check_psm(tic_tac_toe_dual()) is True


def test_base_equals_recursive_depth1():
    for m in (vamos(), ag_3_2(), ag_3_2_prime(), tic_tac_toe_dual()):
        assert base_check_psm(m) == recursive_psm(m, 1)


def test_depth2_matches_brute_force_on_small_matroids():
    rng = random.Random(7)
    checked = 0
    for n, k in [(5, 3), (5, 3), (6, 2), (5, 3), (6, 2), (5, 3)]:
        m = random_sparse_paving(n, k, rng)
        if len(m.flat_set()) > 18:
            continue  # brute enumeration needs a tiny flat lattice
        r = recursive_psm(m, 2, budget=100_000, cut_budget=5000)
        b = brute_recursive_psm(m, 2)
        assert r == b
        checked += 1
    # matroids this small cannot carry pseudotriples (that needs rank >= 4
    # and a large flat lattice), so the agreement is vacuous-True here; the
    # refutation direction is covered by the built-in verdicts above.
    assert checked >= 1


def test_recursive_false_propagates_from_base():
    # forced collapse refutes at any depth
    assert recursive_psm(vamos(), 2) is False
    assert recursive_psm(vamos(), 3) is False


def test_trace_records_refuting_triple():
    trace = []
    assert recursive_psm(vamos(), 1, trace=trace) is False
    assert trace and trace[0]["reason"] == "forced_collapse"
    assert trace[0]["triple"]["x"] == [0, 1, 2, 3]


def test_depth_validation():
    with pytest.raises(ValueError):
        recursive_psm(vamos(), 0)
