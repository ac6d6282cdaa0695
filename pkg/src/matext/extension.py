"""Modular cuts and single-point extensions.

A modular cut is an upward-closed family of flats that is closed under
intersections of its modular pairs; each such family (other than the one
containing the empty flat) determines a proper single-point extension and
vice versa.  The enumeration here drives the recursive quasi-intersection
and pseudomodularity searches.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from .masks import full_mask, popcount
from .matroid import Matroid, MatroidError


@dataclass(frozen=True)
class ModularCut:
    host: Matroid
    flats_in_cut: frozenset

    def __contains__(self, flat: int) -> bool:
        return flat in self.flats_in_cut

    def __len__(self) -> int:
        return len(self.flats_in_cut)

    def sorted_flats(self) -> Tuple[int, ...]:
        return tuple(sorted(self.flats_in_cut))

    def is_valid(self) -> bool:
        m = self.host
        cut = self.flats_in_cut
        for f in cut:
            if not m.is_flat(f):
                return False
        flat_set = m.flat_set()
        for f in cut:
            for g in flat_set:
                if f != g and (f & g) == f and g not in cut:
                    return False
        for f, g in itertools.combinations(cut, 2):
            if m.modular_defect(f, g) == 0 and (f & g) not in cut:
                return False
        return True


@dataclass
class PointExtension:
    base: Matroid
    new_point: int
    cut: ModularCut
    result: Matroid


def _upward_close(m: Matroid, flats: set) -> set:
    out = set(flats)
    for g in m.flat_set():
        for f in flats:
            if (f & g) == f:
                out.add(g)
                break
    return out


def generate_cut(m: Matroid, generators: Sequence[int]) -> ModularCut:
    """Smallest modular cut of `m` containing the given flats."""
    for g in generators:
        if not m.is_flat(g):
            raise MatroidError(f"generator {g:#x} is not a flat")
    cut = _upward_close(m, set(generators))
    # Fixpoint: add intersections of modular pairs, re-close upward.  The
    # family only grows and lives inside the finite flat lattice, so the
    # loop terminates within |flats| rounds.
    for _ in range(len(m.flat_set()) + 1):
        added = set()
        members = sorted(cut)
        for f, g in itertools.combinations(members, 2):
            inter = f & g
            if inter not in cut and m.modular_defect(f, g) == 0:
                added.add(inter)
        if not added:
            break
        cut = _upward_close(m, cut | added)
    else:
        raise RuntimeError("modular-cut fixpoint failed to converge")
    return ModularCut(m, frozenset(cut))


def principal_cut(m: Matroid, x: int) -> ModularCut:
    """All flats containing the flat x."""
    return generate_cut(m, [x])


def extend_by_point(m: Matroid, cut: ModularCut, allow_loop: bool = False) -> PointExtension:
    """Proper single-point extension determined by a modular cut.

    The new point gets index n; for A inside the old ground set the rank is
    unchanged, and r(A + e) = r(A) when closure(A) is in the cut, else
    r(A) + 1.
    """
    if cut.host is not m:
        raise MatroidError("cut belongs to a different matroid")
    if not allow_loop and m.closure(0) in cut.flats_in_cut:
        raise MatroidError("cut contains the bottom flat; extension point would be a loop")
    n = m.n
    if n + 1 > 16:
        raise MatroidError("extension would exceed the 16-point cap")
    base_table = m.rank_table()
    e = 1 << n
    table = [0] * (1 << (n + 1))
    in_cut = cut.flats_in_cut
    for a in range(1 << n):
        ra = base_table[a]
        table[a] = ra
        table[a | e] = ra if m.closure(a) in in_cut else ra + 1
    result = Matroid(n + 1, rank_table=table, name=f"{m.name}+e{n}" if m.name else "")
    return PointExtension(base=m, new_point=n, cut=cut, result=result)


def iter_antichains(flats: Sequence[int], max_size: Optional[int] = None):
    """Nonempty antichains of the containment order, smallest total rank first
    within each size class."""
    fl = list(flats)

    def rec(start: int, chosen: List[int]):
        if chosen:
            yield tuple(chosen)
        if max_size is not None and len(chosen) >= max_size:
            return
        for i in range(start, len(fl)):
            cand = fl[i]
            if any((cand & c) == cand or (cand & c) == c for c in chosen):
                continue
            chosen.append(cand)
            yield from rec(i + 1, chosen)
            chosen.pop()

    yield from rec(0, [])


def enumerate_cuts_through(
    m: Matroid,
    must_contain: Sequence[int],
    budget: int = 10000,
    max_extra_generators: Optional[int] = None,
    include_coloop: bool = False,
) -> Tuple[List[ModularCut], bool]:
    """Distinct modular cuts containing every flat in `must_contain`.

    Explores cuts generated by antichains of flats (the generated cut is
    checked to contain the anchors), deduplicated, ordered by cut size
    ascending.  `budget` caps the number of antichains explored; the second
    return value flags truncation.
    """
    for f in must_contain:
        if not m.is_flat(f):
            raise MatroidError("must_contain entries must be flats")
    bottom = m.closure(0)
    flats = [f for f in sorted(m.flat_set(), key=lambda f: (m.rank(f), f)) if f != bottom]
    seen = {}
    truncated = False
    explored = 0
    base_gens = list(must_contain)
    candidates: Iterable[Tuple[int, ...]] = itertools.chain(
        [()], iter_antichains(flats, max_size=max_extra_generators)
    )
    for extra in candidates:
        if explored >= budget:
            truncated = True
            break
        explored += 1
        try:
            cut = generate_cut(m, base_gens + list(extra))
        except MatroidError:
            continue
        if bottom in cut.flats_in_cut:
            continue  # loop extension, excluded by default
        if not cut.flats_in_cut and not include_coloop:
            continue  # empty cut makes the new point a coloop
        if any(f not in cut.flats_in_cut for f in must_contain):
            continue
        seen.setdefault(cut.flats_in_cut, cut)
    cuts = sorted(seen.values(), key=lambda c: (len(c), c.sorted_flats()))
    return cuts, truncated


def all_modular_cuts_brute(m: Matroid, include_loop_cuts: bool = False) -> List[frozenset]:
    """Every family of flats satisfying the modular-cut axioms, by scanning
    all upward-closed families.  Only usable on very small flat lattices."""
    flats = sorted(m.flat_set())
    if len(flats) > 22:
        raise MatroidError("brute-force cut enumeration needs a tiny flat lattice")
    bottom = m.closure(0)
    out = []
    for bits in range(1 << len(flats)):
        fam = frozenset(flats[i] for i in range(len(flats)) if (bits >> i) & 1)
        if not fam:
            continue
        if not include_loop_cuts and bottom in fam:
            continue
        cut = ModularCut(m, fam)
        if cut.is_valid():
            out.append(fam)
    return out


def chain_extend(m: Matroid, flat_chain_spec: Sequence[Sequence[int]]) -> Matroid:
    """Apply a sequence of cut-generated single-point extensions.

    Each entry is a list of generator flats over the ground set of the
    matroid produced so far (so later entries may reference earlier new
    points)."""
    cur = m
    for gens in flat_chain_spec:
        closed = [cur.closure(g) for g in gens]
        cut = generate_cut(cur, closed)
        cur = extend_by_point(cur, cut).result
    return cur
