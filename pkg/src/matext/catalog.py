"""Built-in matroids and the line-oriented catalog file format.

Format: a header line ``matroid <name> n=<points> r=<rank> form=<bases|circuit_hyperplanes>``
followed by one set per line (sorted point indices separated by spaces).
Lines starting with ``#`` are comments; several matroids may share a file.
"""

from __future__ import annotations

import io
from typing import Dict, Iterable, List, TextIO, Tuple

from .masks import mask_of, points_of
from .matroid import Matroid, MatroidError

A1, A2, A3 = (0, 1, 2), (3, 4, 5), (6, 7, 8)
B1, B2, B3 = (0, 3, 6), (1, 4, 7), (2, 5, 8)


def tic_tac_toe() -> Matroid:
    """Sparse paving (5,9) matroid with the 3x3 grid's row/column unions
    as circuit-hyperplanes, the center pair excluded."""
    rows = (A1, A2, A3)
    cols = (B1, B2, B3)
    chs = []
    for i, a in enumerate(rows):
        for j, b in enumerate(cols):
            if (i, j) == (1, 1):
                continue
            chs.append(mask_of(a) | mask_of(b))
    return Matroid(9, circuit_hyperplanes=chs, rank=5, name="T3")


def tic_tac_toe_dual() -> Matroid:
    return tic_tac_toe().dual().with_name("T3_dual")


def isd_5_10() -> Matroid:
    """Identically self-dual sparse paving (5,10) matroid whose deletion at
    point 9 is T3 and whose contraction at 9 is the dual of T3."""
    t3 = tic_tac_toe()
    t3d = tic_tac_toe_dual()
    e = 1 << 9
    chs = list(t3.circuit_hyperplanes) + [c | e for c in t3d.circuit_hyperplanes]
    return Matroid(10, circuit_hyperplanes=chs, rank=5, name="ISD_5_10")


def vamos() -> Matroid:
    """Rank-4 matroid on 8 points, the smallest non-algebraic matroid.
    Circuit-hyperplanes are five of the six 4-point 'planes' on the pairs
    {0,1},{2,3},{4,5},{6,7}; the sixth ({4,5,6,7}) is a basis."""
    planes = [(0, 1, 2, 3), (0, 1, 4, 5), (0, 1, 6, 7), (2, 3, 4, 5), (2, 3, 6, 7)]
    return Matroid.sparse_paving(8, 4, planes, name="Vamos")


def ag_3_2() -> Matroid:
    """Binary affine cube: points are the vectors of GF(2)^3, planes are the
    fourteen 4-sets whose labels XOR to zero."""
    import itertools

    chs = []
    for comb in itertools.combinations(range(8), 4):
        if comb[0] ^ comb[1] ^ comb[2] ^ comb[3] == 0:
            chs.append(mask_of(comb))
    return Matroid(8, circuit_hyperplanes=chs, rank=4, name="AG_3_2")


def ag_3_2_prime() -> Matroid:
    """AG(3,2) with one circuit-hyperplane relaxed into a basis."""
    base = ag_3_2()
    chs = list(base.circuit_hyperplanes)[1:]
    return Matroid(8, circuit_hyperplanes=chs, rank=4, name="AG_3_2_prime")


_BUILTIN_FACTORIES = {
    "T3": tic_tac_toe,
    "T3_dual": tic_tac_toe_dual,
    "ISD_5_10": isd_5_10,
    "Vamos": vamos,
    "AG_3_2": ag_3_2,
    "AG_3_2_prime": ag_3_2_prime,
    "U_2_3": lambda: Matroid.uniform(2, 3),
    "U_2_4": lambda: Matroid.uniform(2, 4),
    "U_3_5": lambda: Matroid.uniform(3, 5),
}


class Catalog:
    """Mapping name -> matroid, seeded with the built-ins."""

    def __init__(self):
        self._entries: Dict[str, Matroid] = {}

    def names(self) -> List[str]:
        return sorted(set(_BUILTIN_FACTORIES) | set(self._entries))

    def get(self, name: str) -> Matroid:
        if name in self._entries:
            return self._entries[name]
        if name in _BUILTIN_FACTORIES:
            m = _BUILTIN_FACTORIES[name]()
            self._entries[name] = m
            return m
        raise KeyError(f"unknown matroid {name!r}; known: {', '.join(self.names())}")

    def add(self, m: Matroid, validate: bool = True) -> None:
        if validate:
            ok, viol = m.verify_axioms()
            if not ok:
                raise MatroidError(f"catalog entry {m.name!r} fails matroid axioms: {viol}")
        self._entries[m.name] = m

    def load(self, fh: TextIO, validate: bool = True) -> List[str]:
        loaded = []
        for m in parse_catalog(fh):
            self.add(m, validate=validate)
            loaded.append(m.name)
        return loaded


def parse_catalog(fh: TextIO) -> List[Matroid]:
    out: List[Matroid] = []
    header: Tuple[str, int, int, str] | None = None
    sets: List[int] = []

    def flush():
        nonlocal header, sets
        if header is None:
            return
        name, n, r, form = header
        if form == "bases":
            out.append(Matroid(n, bases=sets, name=name))
        else:
            out.append(Matroid(n, circuit_hyperplanes=sets, rank=r, name=name))
        header, sets = None, []

    for lineno, raw in enumerate(fh, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("matroid "):
            flush()
            parts = line.split()
            fields = dict(p.split("=", 1) for p in parts[2:])
            try:
                header = (
                    parts[1],
                    int(fields["n"]),
                    int(fields["r"]),
                    fields["form"],
                )
            except (KeyError, ValueError, IndexError) as exc:
                raise MatroidError(f"bad catalog header at line {lineno}: {line!r}") from exc
            if header[3] not in ("bases", "circuit_hyperplanes"):
                raise MatroidError(f"unknown form {header[3]!r} at line {lineno}")
            sets = []
        else:
            if header is None:
                raise MatroidError(f"set data before any header at line {lineno}")
            try:
                sets.append(mask_of(int(t) for t in line.split()))
            except ValueError as exc:
                raise MatroidError(f"bad set line {lineno}: {line!r}") from exc
    flush()
    return out


def export_matroid(m: Matroid, fh: TextIO, comment: str = "") -> None:
    if m.is_sparse_paving_form:
        form, sets = "circuit_hyperplanes", m.circuit_hyperplanes
    else:
        form, sets = "bases", m.bases()
    name = m.name or "unnamed"
    if comment:
        fh.write(f"# {comment}\n")
    fh.write(f"matroid {name} n={m.n} r={m.k} form={form}\n")
    for s in sets:
        fh.write(" ".join(str(p) for p in points_of(s)) + "\n")


def export_string(m: Matroid, comment: str = "") -> str:
    buf = io.StringIO()
    export_matroid(m, buf, comment=comment)
    return buf.getvalue()
