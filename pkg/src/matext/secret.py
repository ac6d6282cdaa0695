"""Matroid ports, access structures, and information-ratio lower bounds.

The bound LP minimizes the largest share size v subject to: the entropy
vector over participants + dealer + auxiliaries being a polymatroid,
compatibility with the access structure (authorized sets determine the
secret, forbidden sets are independent of it), and the auxiliary-point
constraints carried by an AK/CI step sequence.  The optimum is an exact
rational lower bound on the information ratio, shipped with a dual
certificate that re-verifies by rational arithmetic alone.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import lp as lpmod
from .akci import AKSequence, AKStep, ak_constraints, ci_constraints, nonmodular_flat_pairs
from .lp import EQ, GE, LinearProgram, LPOutcome, shannon_block
from .masks import full_mask, points_of, popcount, subsets_of
from .matroid import Matroid, MatroidError

MAX_GROUND = 16
MAX_AK_STEPS = 4

SHARE_VAR = "v"


class StructureError(ValueError):
    pass


@dataclass
class AccessStructure:
    """Monotone family over the participant set, given by its minimal
    authorized sets; the dealer is a distinguished extra point."""

    participants: int  # mask
    dealer: int  # point index, outside participants
    min_authorized: List[int]

    def __post_init__(self):
        d = 1 << self.dealer
        if d & self.participants:
            raise StructureError("dealer must lie outside the participant set")
        for a in self.min_authorized:
            if a & ~self.participants:
                raise StructureError("authorized set outside participants")
        for a, b in itertools.permutations(self.min_authorized, 2):
            if a != b and (a & b) == a:
                raise StructureError("min_authorized must be an antichain")
        if not self.min_authorized:
            raise StructureError("empty access structure")

    def is_authorized(self, x: int) -> bool:
        return any((a & x) == a for a in self.min_authorized)


@dataclass
class PortSpec:
    matroid: Matroid
    dealer_point: int
    structure: AccessStructure


def port(m: Matroid, dealer_point: int) -> PortSpec:
    """Access structure {X : r(X + p0) = r(X)} of the matroid at the given
    dealer point, reduced to its minimal members."""
    if not (0 <= dealer_point < m.n):
        raise StructureError("dealer point outside the ground set")
    d = 1 << dealer_point
    if m.rank(d) == 0:
        raise StructureError("dealer point is a loop; structure degenerate")
    p_mask = full_mask(m.n) & ~d
    if m.rank(p_mask) < m.k:
        raise StructureError("dealer point is a coloop; no set is authorized")
    minimal = []
    for x in sorted(subsets_of(p_mask), key=popcount):
        if x and m.rank(x | d) == m.rank(x):
            if not any((a & x) == a for a in minimal):
                minimal.append(x)
    structure = AccessStructure(p_mask, dealer_point, sorted(minimal))
    return PortSpec(matroid=m, dealer_point=dealer_point, structure=structure)


def maximal_forbidden(spec: Union[PortSpec, AccessStructure]) -> List[int]:
    """Maximal participant subsets containing no minimal authorized set."""
    acc = spec.structure if isinstance(spec, PortSpec) else spec
    p = acc.participants
    out = []
    for x in sorted(subsets_of(p), key=popcount, reverse=True):
        if acc.is_authorized(x):
            continue
        if not any((x & b) == x for b in out):
            out.append(x)
    return sorted(out)


@dataclass
class BoundResult:
    sigma_lower: Fraction
    lp: LinearProgram
    certificate: LPOutcome
    ak_sets_used: List[Tuple[int, int, str]]

    def to_dict(self) -> dict:
        return {
            "sigma_lower": str(self.sigma_lower),
            "sigma_lower_decimal": float(self.sigma_lower),
            "n_rows": len(self.lp.rows),
            "n_vars": len(self.lp.variables()),
            "ak_sets": [
                {"X": points_of(x), "Y": points_of(y), "kind": kind}
                for x, y, kind in self.ak_sets_used
            ],
            "certificate": json.loads(self.certificate.to_json()),
        }


def _structure_of(spec: Union[PortSpec, AccessStructure]) -> AccessStructure:
    return spec.structure if isinstance(spec, PortSpec) else spec


def build_bound_lp(
    spec: Union[PortSpec, AccessStructure],
    ak_steps: Optional[AKSequence] = None,
    normalization: int = 1,
) -> LinearProgram:
    """LP whose minimum lower-bounds the information ratio of the structure.

    Points: participants and dealer keep their indices; auxiliary point i
    sits at index max_point + 1 + i.  Compatibility rows: f(dealer) is the
    normalization; authorized sets determine the dealer (f(A + p0) = f(A)
    for minimal authorized A); forbidden sets are independent of it
    (f(B + p0) = f(B) + f(p0) for maximal forbidden B).  AK2' has no
    ambient matroid to reduce against here, so it ranges over all subsets
    of X."""
    acc = _structure_of(spec)
    steps = ak_steps.steps if ak_steps is not None else []
    if len(steps) > MAX_AK_STEPS:
        raise StructureError(f"at most {MAX_AK_STEPS} auxiliary points per run")
    d = 1 << acc.dealer
    base_points = sorted(points_of(acc.participants | d))
    next_free = max(base_points) + 1
    aux_points = list(range(next_free, next_free + len(steps)))
    all_points = base_points + aux_points
    if len(all_points) > MAX_GROUND:
        raise lpmod.LPSizeError("participants + dealer + auxiliaries exceed the point cap")

    lp = LinearProgram(max(all_points) + 1)
    shannon_block(lp, len(all_points), points=all_points)
    lp.add_row({d: 1}, EQ, normalization, tag="NORM")
    for a in acc.min_authorized:
        lp.add_row({a | d: 1, a: -1}, EQ, 0, tag="AUTH")
    for b in maximal_forbidden(acc):
        if not b:
            continue  # f(d) = f(d) + f(empty) holds trivially
        lp.add_row({b | d: 1, d: -1, b: -1}, EQ, 0, tag="FORB")
    allowed = acc.participants | d
    for i, s in enumerate(steps):
        z = aux_points[i]
        earlier = 0
        for j in range(i):
            earlier |= 1 << aux_points[j]
        if (s.x | s.y) & ~(allowed | earlier):
            raise StructureError(f"step {i} references unavailable points")
        if s.kind == "CI":
            ci_constraints(lp, z, s.x, s.y)
        else:
            scope = [t for t in subsets_of(s.x) if t]
            ak_constraints(lp, z, s.x, s.y, scope)
    for p in points_of(acc.participants):
        lp.add_row({SHARE_VAR: 1, 1 << p: -1}, GE, 0, tag="SHARE")
    lp.set_objective({SHARE_VAR: 1})
    return lp


def ss_bound(
    spec: Union[PortSpec, AccessStructure],
    ak_steps: Optional[AKSequence] = None,
    method: str = "auto",
) -> BoundResult:
    """Exact-rational lower bound on the information ratio, with its dual
    certificate."""
    lp = build_bound_lp(spec, ak_steps)
    outcome = lpmod.solve(lp, method=method)
    if outcome.status != "optimal":
        raise lpmod.LPError(
            f"bound LP should be solvable for a monotone structure; got {outcome.status}"
        )
    used = [(s.x, s.y, s.kind) for s in (ak_steps.steps if ak_steps else [])]
    return BoundResult(
        sigma_lower=outcome.value, lp=lp, certificate=outcome, ak_sets_used=used
    )


def ak_set_advisor(
    spec: PortSpec,
    budget: int = 50,
    method: str = "auto",
) -> List[Tuple[Fraction, Tuple[int, int]]]:
    """Rank candidate (X, Y) pairs by the bound a single AK step yields.

    Candidates are all of the matroid's nonmodular flat pairs — pairs that
    touch the dealer are kept, since they often give the strongest bounds;
    evaluation order and output are deterministic."""
    if not isinstance(spec, PortSpec):
        raise StructureError("advisor needs a matroid port")
    m = spec.matroid
    cands = list(nonmodular_flat_pairs(m))
    out = []
    for x, y in cands[:budget]:
        res = ss_bound(spec, AKSequence([AKStep(x=x, y=y)]), method=method)
        out.append((res.sigma_lower, (x, y)))
    out.sort(key=lambda t: (-t[0], t[1]))
    return out
