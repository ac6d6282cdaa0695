"""Pseudomodularity testing.

A matroid's flat lattice is pseudomodular when, for all flats X, Y, Z with
X covering X∩Z and Y covering Y∩Z, r(X∩Y) - r(X∩Y∩Z) <= 1.  Full algebraic
matroids are pseudomodular, and the property persists under the following
recursion: any violating triple (a "pseudotriple") must admit a single-point
extension by a point lying in the closures of X, Y and Z but rising above
A = X∩Y∩Z, and at least one such extension must again pass the check at the
next lower depth.  A matroid failing the depth-d check is not algebraic.

The result is one-sided: a False verdict refutes algebraicity, a True
verdict asserts nothing about it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from .extension import enumerate_cuts_through, extend_by_point, generate_cut
from .masks import points_of
from .matroid import Matroid, MatroidError


@dataclass(frozen=True)
class PseudoTriple:
    """Flats x, y, z with x covering x∩z, y covering y∩z, and
    r(x∩y) - r(x∩y∩z) > 1.  Only x and y are interchangeable."""

    x: int
    y: int
    z: int

    @property
    def a(self) -> int:
        return self.x & self.y & self.z

    def to_dict(self) -> dict:
        return {
            "x": points_of(self.x),
            "y": points_of(self.y),
            "z": points_of(self.z),
            "a": points_of(self.a),
        }


def _covers(m: Matroid, big: int, small: int) -> bool:
    """In the flat lattice (graded by rank) big covers small iff it
    contains it with rank exactly one more."""
    return (small & big) == small and m.rank(big) == m.rank(small) + 1


def validate_triple(m: Matroid, x: int, y: int, z: int) -> bool:
    """Whether (x, y, z) is a pseudotriple of m.  Symmetric in (x, y)."""
    for f in (x, y, z):
        if not m.is_flat(f):
            raise MatroidError(f"{f:#x} is not a flat")
    return _validate_known_flats(m, x, y, z)


def _validate_known_flats(m: Matroid, x: int, y: int, z: int) -> bool:
    if not _covers(m, x, x & z) or not _covers(m, y, y & z):
        return False
    return m.rank(x & y) - m.rank(x & y & z) > 1


def get_psm_triples(m: Matroid) -> Iterator[PseudoTriple]:
    """Lazily yield the pseudotriples of m.

    Scans unordered flat triples; since only the first two positions are
    symmetric, each triple is tried in the three orientations (x,y,z),
    (x,z,y), (z,y,x), yielding the first that validates.
    """
    flats = sorted(m.flat_set(), key=lambda f: (m.rank(f), f))
    for x, y, z in itertools.combinations(flats, 3):
        if _validate_known_flats(m, x, y, z):
            yield PseudoTriple(x, y, z)
        elif _validate_known_flats(m, x, z, y):
            yield PseudoTriple(x, z, y)
        elif _validate_known_flats(m, z, y, x):
            yield PseudoTriple(z, y, x)


def _triple_forces_collapse(m: Matroid, t: PseudoTriple) -> bool:
    """True when every proper single-point extension whose new point lies
    under x, y and z also keeps it under a = x∩y∩z.

    Any such extension's modular cut contains the cut generated by
    {x, y, z}; if a is already in that generated cut, the new point always
    lands in closure(a) and r(a + e) = r(a), so the extension demanded of
    an algebraic matroid cannot exist.
    """
    cut = generate_cut(m, [t.x, t.y, t.z])
    return t.a in cut.flats_in_cut


def base_check_psm(m: Matroid) -> bool:
    """Depth-1 pseudomodularity check.

    False as soon as some pseudotriple forces every candidate extension
    point to collapse onto x∩y∩z; True when no triple does (in particular
    when there are no pseudotriples at all).
    """
    for t in get_psm_triples(m):
        if _triple_forces_collapse(m, t):
            return False
    return True


@dataclass
class _Budget:
    remaining: int

    def spend(self, amount: int = 1) -> bool:
        if self.remaining < amount:
            return False
        self.remaining -= amount
        return True


def recursive_psm(
    m: Matroid,
    depth: int,
    budget: int = 10_000,
    cut_budget: int = 2000,
    trace: Optional[List[dict]] = None,
    _memo: Optional[Dict] = None,
    _budget: Optional[_Budget] = None,
):
    """Recursive pseudomodularity check to the given depth.

    Returns True / False / "inconclusive".  Depth 1 is the base check.  At
    higher depths every pseudotriple must admit a single-point extension by
    a point under the closures of x, y, z with r(a + e) > r(a) that is
    itself (depth-1)-pseudomodular; a triple with no such extension refutes.
    `budget` caps the number of extensions built across the whole recursion,
    and cut enumeration truncated by `cut_budget` downgrades a would-be
    refutation to "inconclusive".  `trace`, if a list, collects dicts
    describing refuting triples and the extension cuts explored.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    memo = _memo if _memo is not None else {}
    shared = _budget if _budget is not None else _Budget(budget)
    key = (bytes(m.rank_table()), depth)
    if key in memo:
        return memo[key]
    if depth == 1:
        verdict = True
        for t in get_psm_triples(m):
            if _triple_forces_collapse(m, t):
                if trace is not None:
                    trace.append({"triple": t.to_dict(), "reason": "forced_collapse"})
                verdict = False
                break
        memo[key] = verdict
        return verdict

    verdict = True
    for t in get_psm_triples(m):
        if _triple_forces_collapse(m, t):
            if trace is not None:
                trace.append({"triple": t.to_dict(), "reason": "forced_collapse"})
            verdict = False
            break
        cuts, truncated = enumerate_cuts_through(
            m, [t.x, t.y, t.z], budget=cut_budget
        )
        found = False
        saw_truncation = truncated
        chain = []
        for cut in cuts:
            if t.a in cut.flats_in_cut:
                continue  # new point would not rise above a
            if not shared.spend():
                saw_truncation = True
                break
            try:
                ext = extend_by_point(m, cut).result
            except MatroidError:
                continue
            sub = recursive_psm(
                ext,
                depth - 1,
                cut_budget=cut_budget,
                trace=None,
                _memo=memo,
                _budget=shared,
            )
            chain.append([points_of(f) for f in cut.sorted_flats()])
            if sub == "inconclusive":
                saw_truncation = True
                continue
            if sub:
                found = True
                break
        if found:
            continue
        if saw_truncation:
            if verdict is True:
                verdict = "inconclusive"
            continue
        if trace is not None:
            trace.append(
                {
                    "triple": t.to_dict(),
                    "reason": "no_extension_survives",
                    "cuts_tried": chain,
                }
            )
        verdict = False
        break
    memo[key] = verdict
    return verdict


def brute_recursive_psm(m: Matroid, depth: int) -> bool:
    """Reference implementation over all single-point extensions.

    Enumerates every modular cut of m outright (feasible only on small
    ground sets) instead of the anchored, budgeted search; used to
    cross-check `recursive_psm`.
    """
    from .extension import all_modular_cuts_brute, ModularCut

    if depth < 1:
        raise ValueError("depth must be >= 1")
    if depth == 1:
        return base_check_psm(m)
    for t in get_psm_triples(m):
        anchors = (t.x, t.y, t.z)
        found = False
        for flats in all_modular_cuts_brute(m):
            if not flats:
                continue
            if any(f not in flats for f in anchors):
                continue
            if t.a in flats:
                continue
            if m.closure(0) in flats:
                continue
            ext = extend_by_point(m, ModularCut(m, flats)).result
            if brute_recursive_psm(ext, depth - 1):
                found = True
                break
        if not found:
            return False
    return True
