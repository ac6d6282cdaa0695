import io

import pytest

from matext.catalog import (
    Catalog,
    ag_3_2,
    ag_3_2_prime,
    export_string,
    isd_5_10,
    parse_catalog,
    tic_tac_toe,
    tic_tac_toe_dual,
    vamos,
)
from matext.masks import mask_of
from matext.matroid import Matroid, MatroidError


def test_t3_circuit_hyperplanes_exact():
    t3 = tic_tac_toe()
    rows = [(0, 1, 2), (3, 4, 5), (6, 7, 8)]
    cols = [(0, 3, 6), (1, 4, 7), (2, 5, 8)]
    want = {
        mask_of(a) | mask_of(b)
        for i, a in enumerate(rows)
        for j, b in enumerate(cols)
        if (i, j) != (1, 1)
    }
    assert set(t3.circuit_hyperplanes) == want
    assert t3.n == 9 and t3.k == 5


def test_isd_structure():
    m = isd_5_10()
    t3 = tic_tac_toe()
    t3d = tic_tac_toe_dual()
    e = 1 << 9
    want = set(t3.circuit_hyperplanes) | {c | e for c in t3d.circuit_hyperplanes}
    assert set(m.circuit_hyperplanes) == want
    assert m.is_sparse_paving()


def test_builtins_verify():
    cat = Catalog()
    for name in cat.names():
        ok, viol = cat.get(name).verify_axioms()
        assert ok, (name, viol)


def test_ag_3_2_has_14_planes_prime_has_13():
    assert len(ag_3_2().circuit_hyperplanes) == 14
    assert len(ag_3_2_prime().circuit_hyperplanes) == 13


def test_vamos_planes():
    v = vamos()
    assert len(v.circuit_hyperplanes) == 5
    assert mask_of([4, 5, 6, 7]) not in set(v.circuit_hyperplanes)


def test_export_import_roundtrip():
    for m in (tic_tac_toe(), vamos(), isd_5_10(), ag_3_2_prime()):
        text = export_string(m, comment="roundtrip")
        (m2,) = parse_catalog(io.StringIO(text))
        assert m2 == m
        assert m2.name == m.name


def test_export_basis_form_roundtrip():
    m = Matroid.from_bases(4, [[0, 1], [0, 2], [1, 2], [1, 3]], name="B")
    text = export_string(m)
    assert "form=bases" in text
    (m2,) = parse_catalog(io.StringIO(text))
    assert m2.same_rank_function(m)


def test_parse_errors():
    with pytest.raises(MatroidError):
        parse_catalog(io.StringIO("0 1 2\n"))
    with pytest.raises(MatroidError):
        parse_catalog(io.StringIO("matroid X n=3 r=2 form=nonsense\n"))
    with pytest.raises(MatroidError):
        parse_catalog(io.StringIO("matroid X n=bad r=2 form=bases\n"))


def test_catalog_load_and_lookup():
    cat = Catalog()
    text = export_string(vamos().with_name("local_vamos"))
    loaded = cat.load(io.StringIO(text))
    assert loaded == ["local_vamos"]
    assert cat.get("local_vamos").same_rank_function(vamos())
    with pytest.raises(KeyError):
        cat.get("missing")
