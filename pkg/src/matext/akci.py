"""Ahlswede-Korner / common-information extension checks via exact LPs.

A sequence of auxiliary points z_1..z_k is adjoined to the matroid's
ground set; each z_i carries the extension constraints for one pair of
sets (which may reference earlier z's).  Infeasibility of the resulting
polymatroid program proves the matroid is not almost entropic, with an
exact Farkas certificate.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import lp as lpmod
from .extension import generate_cut, extend_by_point
from .lp import EQ, GE, LinearProgram, LPOutcome, check_certificate, pin_matroid, shannon_block
from .masks import format_mask, full_mask, points_of, popcount, subsets_of
from .matroid import Matroid, MatroidError

MAX_GROUND = 16


@dataclass(frozen=True)
class AKStep:
    """One auxiliary point: kind 'AK' or 'CI' for the pair (x, y).

    Masks are over the extended ground set: matroid points 0..n-1, then
    z_i at index n+i."""

    x: int
    y: int
    kind: str = "AK"


@dataclass
class AKSequence:
    steps: List[AKStep]

    def __len__(self):
        return len(self.steps)

    def to_json(self, n_points: int) -> str:
        recs = []
        for i, s in enumerate(self.steps):
            recs.append(
                {
                    "z": n_points + i,
                    "kind": s.kind,
                    "X": points_of(s.x),
                    "Y": points_of(s.y),
                }
            )
        return json.dumps({"n_points": n_points, "steps": recs}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AKSequence":
        data = json.loads(text)
        steps = []
        for rec in data["steps"]:
            x = sum(1 << p for p in rec["X"])
            y = sum(1 << p for p in rec["Y"])
            steps.append(AKStep(x=x, y=y, kind=rec.get("kind", "AK")))
        return cls(steps)


def validate_sequence(m: Matroid, seq: AKSequence) -> None:
    n = m.n
    total = n + len(seq.steps)
    if total > MAX_GROUND:
        raise MatroidError(f"extended ground {total} exceeds the {MAX_GROUND}-point cap")
    for i, s in enumerate(seq.steps):
        allowed = full_mask(n + i)
        if (s.x | s.y) & ~allowed:
            raise MatroidError(
                f"step {i} references points beyond the ground available at that step"
            )
        if s.kind not in ("AK", "CI"):
            raise MatroidError(f"step {i} has unknown kind {s.kind!r}")


# -- constraint emission -------------------------------------------------------


def ak_constraints(
    lp: LinearProgram, z_point: int, x: int, y: int, flats_of_x: Iterable[int]
) -> int:
    """AK1 + AK2' rows for the auxiliary point z = {z_point}.

    AK1: f(ZX) = f(X).  AK2' for each listed X' (X itself must be in the
    list): f(X'Z) - f(Z) = f(X'Y) - f(Y)."""
    z = 1 << z_point
    if z & (x | y):
        raise lpmod.LPError("auxiliary point collides with the pair")
    added = 0
    lp.add_row(_merge([(x | z, 1), (x, -1)]), EQ, 0, tag="AK1")
    added += 1
    for xp in flats_of_x:
        if xp == 0:
            continue
        if xp & ~x:
            raise lpmod.LPError("AK2' subset outside X")
        coeffs = _merge([(xp | z, 1), (z, -1), (xp | y, -1), (y, 1)])
        if coeffs:
            lp.add_row(coeffs, EQ, 0, tag="AK2'")
            added += 1
    return added


def ci_constraints(lp: LinearProgram, z_point: int, x: int, y: int) -> int:
    z = 1 << z_point
    if z & (x | y):
        raise lpmod.LPError("auxiliary point collides with the pair")
    lp.add_row(_merge([(x | z, 1), (x, -1)]), EQ, 0, tag="CI1")
    lp.add_row(_merge([(y | z, 1), (y, -1)]), EQ, 0, tag="CI1")
    lp.add_row(_merge([(z, 1), (x, -1), (y, -1), (x | y, 1)]), EQ, 0, tag="CI2")
    return 3


def _merge(entries: Iterable[Tuple[int, int]]) -> Dict[int, int]:
    # takes (set, coefficient) pairs so that coinciding sets accumulate
    # (e.g. X'Y = Y when X' is inside Y) instead of overwriting each other
    out: Dict[int, int] = {}
    for k, v in entries:
        if k == 0:
            continue  # f(empty) = 0 substituted
        out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def _ak2_scope(m: Matroid, x: int) -> List[int]:
    """Sets X' at which AK2' is imposed: flats of the base matroid inside x
    when x stays within the matroid ground, else all nonempty subsets."""
    ground = full_mask(m.n)
    if x & ~ground:
        return [s for s in subsets_of(x) if s]
    flats = [f for f in m.flat_set() if (f & x) == f and f]
    if x not in flats:
        flats.append(x)
    return sorted(flats)


def build_sequence_lp(
    m: Matroid, seq: AKSequence, ak2_all_subsets: bool = False
) -> LinearProgram:
    validate_sequence(m, seq)
    total = m.n + len(seq.steps)
    lp = LinearProgram(total)
    shannon_block(lp, total)
    pin_matroid(lp, m)
    for i, s in enumerate(seq.steps):
        z_point = m.n + i
        if s.kind == "CI":
            ci_constraints(lp, z_point, s.x, s.y)
        else:
            scope = (
                [t for t in subsets_of(s.x) if t]
                if ak2_all_subsets
                else _ak2_scope(m, s.x)
            )
            ak_constraints(lp, z_point, s.x, s.y, scope)
    return lp


# -- pair filters --------------------------------------------------------------

MODULAR = "MODULAR"
XY_CIRCUIT = "XY_CIRCUIT"
X_LINE = "X_LINE"
Y_HYPERPLANE = "Y_HYPERPLANE"
TWO_HYPERPLANES = "TWO_HYPERPLANES"
SPARSE_RANK_SUM = "SPARSE_RANK_SUM"
GE_RESOLVED = "GE_RESOLVED"


def ak_pair_filter(m: Matroid, x: int, y: int) -> Optional[str]:
    """Tag pairs of flats whose AK extension is guaranteed by structure, so
    the LP can be skipped.  Returns None when no guarantee applies."""
    if not m.is_flat(x) or not m.is_flat(y):
        raise MatroidError("ak_pair_filter expects flats")
    if m.modular_defect(x, y) == 0:
        return MODULAR
    k = m.k
    if m.rank(x) == 2:
        return X_LINE
    if m.rank(x) == k - 1 and m.rank(y) == k - 1:
        return TWO_HYPERPLANES
    if (x & y) == 0 and m.rank(y) == k - 1:
        return Y_HYPERPLANE
    if (x & y) == 0 and m.is_circuit(x | y):
        return XY_CIRCUIT
    if (
        (x & y) == 0
        and m.is_sparse_paving_form
        and m.rank(x) + m.rank(y) == k + 1
        and x not in set(m.circuit_hyperplanes)
    ):
        return SPARSE_RANK_SUM
    return None


def ge_heuristic(m: Matroid, x: int, y: int, budget: int = 8) -> bool:
    """Bounded search for a chain of principal extensions after which the
    closures of x and y become a modular pair.  Success implies a common
    information (hence AK both ways) exists; failure proves nothing."""
    cur = m
    cx, cy = cur.closure(x), cur.closure(y)
    for _ in range(budget):
        if cur.modular_defect(cx, cy) == 0:
            return True
        if cur.n + 1 > MAX_GROUND:
            return False
        try:
            cut = generate_cut(cur, [cx, cy])
            if cur.closure(0) in cut.flats_in_cut:
                return False
            ext = extend_by_point(cur, cut)
        except (MatroidError, RuntimeError):
            return False
        new_defect_probe = ext.result
        ncx = new_defect_probe.closure(cx)
        ncy = new_defect_probe.closure(cy)
        if new_defect_probe.modular_defect(ncx, ncy) >= cur.modular_defect(cx, cy):
            return False
        cur, cx, cy = new_defect_probe, ncx, ncy
    return cur.modular_defect(cx, cy) == 0


# -- sequence checking and search ----------------------------------------------


@dataclass
class SequenceReport:
    sequence: AKSequence
    outcome: LPOutcome
    n_rows: int
    n_vars: int
    rows_by_tag: Dict[str, int]

    def to_dict(self) -> dict:
        return {
            "steps": json.loads(self.sequence.to_json(0))["steps"],
            "status": self.outcome.status,
            "n_rows": self.n_rows,
            "n_vars": self.n_vars,
            "rows_by_tag": self.rows_by_tag,
        }


def check_sequence(
    m: Matroid, seq: AKSequence, method: str = "auto", ak2_all_subsets: bool = False
) -> Tuple[LPOutcome, SequenceReport]:
    """Decide whether any polymatroid extension of `m` realizes the whole
    sequence of AK/CI informations; infeasible means `m` is not almost
    entropic, with an exportable exact certificate."""
    lp = build_sequence_lp(m, seq, ak2_all_subsets=ak2_all_subsets)
    outcome = lpmod.solve(lp, method=method)
    tags: Dict[str, int] = {}
    for r in lp.rows:
        tags[r.tag] = tags.get(r.tag, 0) + 1
    report = SequenceReport(
        sequence=seq,
        outcome=outcome,
        n_rows=len(lp.rows),
        n_vars=len(lp.variables()),
        rows_by_tag=tags,
    )
    return outcome, report


def nonmodular_flat_pairs(m: Matroid) -> List[Tuple[int, int]]:
    """Ordered nonmodular flat pairs, ascending (rank sum, masks)."""
    flats = [f for f in m.flats() if 0 < m.rank(f) < m.k]
    pairs = []
    for x, y in itertools.permutations(flats, 2):
        if m.modular_defect(x, y) > 0:
            pairs.append((x, y))
    pairs.sort(key=lambda p: (m.rank(p[0]) + m.rank(p[1]), p[0], p[1]))
    return pairs


def unfiltered_pairs(m: Matroid, use_filters: bool = True, use_ge: bool = False) -> List[Tuple[int, int]]:
    out = []
    for x, y in nonmodular_flat_pairs(m):
        if use_filters and ak_pair_filter(m, x, y) is not None:
            continue
        if use_ge and ge_heuristic(m, x, y):
            continue
        out.append((x, y))
    return out


@dataclass
class SearchResult:
    refutation: Optional[AKSequence]
    truncated: bool
    lp_solves: int
    reports: List[SequenceReport] = field(default_factory=list)


def _step_candidates(
    m: Matroid, base_pairs: Sequence[Tuple[int, int]], n_z: int
) -> List[AKStep]:
    """Candidate pairs for the next step once n_z auxiliaries exist: the
    matroid's own unfiltered pairs, then those with earlier z's merged into
    X, then pairs of a flat against a pure z-set."""
    cands: List[AKStep] = []
    zmask_all = ((1 << n_z) - 1) << m.n
    for x, y in base_pairs:
        cands.append(AKStep(x=x, y=y))
    if n_z:
        z_subsets = [s for s in subsets_of(zmask_all) if s]
        for x, y in base_pairs:
            for zs in z_subsets:
                cands.append(AKStep(x=x | zs, y=y))
    return cands


def _structured_seeds(m: Matroid, base_pairs: Sequence[Tuple[int, int]]):
    """Three-step candidate chains read off the circuit-hyperplane incidence
    of a sparse paving matroid.

    Pattern: two circuit-hyperplanes A, B sharing k-2 points anchor the
    first two steps (each against a 2-set outside A|B); the closing step
    merges both auxiliaries into a non-circuit hyperplane F inside A|B whose
    complement inside a third circuit-hyperplane C <= A|B is exactly a
    2-set.  Chains of this shape are where interacting circuit-hyperplanes
    can make the joint extension program infeasible; each candidate is still
    decided by its LP, the pattern only orders the search."""
    if not m.is_sparse_paving_form:
        return
    k = m.k
    ground = full_mask(m.n)
    chs = sorted(m.circuit_hyperplanes)
    pair_set = set(base_pairs)
    hyps = [
        f
        for f in sorted(m.flat_set())
        if m.rank(f) == k - 1 and f not in chs
    ]
    z12 = (1 << m.n) | (1 << (m.n + 1))
    for a_i, b_i in itertools.combinations(range(len(chs)), 2):
        A, B = chs[a_i], chs[b_i]
        if popcount(A & B) != k - 2:
            continue
        ab = A | B
        rest = ground & ~ab
        ys = [s for s in subsets_of(rest) if popcount(s) == 2]
        closings = []
        for C in chs:
            if C in (A, B) or (C & ~ab):
                continue
            for f in hyps:
                if f & ~ab:
                    continue
                s = C & ~f
                if popcount(s) == 2 and not (f & s):
                    closings.append((f, s))
        for f, s in closings:
            for ya in ys:
                if (A, ya) not in pair_set:
                    continue
                for yb in ys:
                    if yb == ya or (B, yb) not in pair_set:
                        continue
                    yield [
                        AKStep(x=A, y=ya),
                        AKStep(x=B, y=yb),
                        AKStep(x=f | z12, y=s),
                    ]


def search_refutation(
    m: Matroid,
    max_depth: int,
    budget: int = 2000,
    use_filters: bool = True,
    use_ge: bool = False,
    method: str = "auto",
) -> SearchResult:
    """Search for an infeasible AK sequence: structured circuit-hyperplane
    chains first, then iterative-deepening over the unfiltered pairs.

    Candidate pairs are the unfiltered nonmodular flat pairs, augmented at
    deeper levels by merging earlier auxiliary points into X.  Feasible
    nodes are decided by the (fast) solver; a refutation is only reported
    once its Farkas certificate verifies exactly."""
    base_pairs = unfiltered_pairs(m, use_filters=use_filters, use_ge=use_ge)
    solves = 0
    truncated = False

    if max_depth >= 3:
        for steps in _structured_seeds(m, base_pairs):
            if solves >= budget:
                truncated = True
                break
            solves += 1
            outcome, report = check_sequence(m, AKSequence(steps), method=method)
            if outcome.status == "infeasible":
                return SearchResult(
                    refutation=AKSequence(steps),
                    truncated=False,
                    lp_solves=solves,
                    reports=[report],
                )

    for depth in range(1, max_depth + 1):
        stack: List[List[AKStep]] = [[]]
        while stack:
            prefix = stack.pop()
            if len(prefix) == depth:
                if solves >= budget:
                    truncated = True
                    break
                solves += 1
                outcome, report = check_sequence(m, AKSequence(list(prefix)), method=method)
                if outcome.status == "infeasible":
                    return SearchResult(
                        refutation=AKSequence(list(prefix)),
                        truncated=False,
                        lp_solves=solves,
                        reports=[report],
                    )
                continue
            cands = _step_candidates(m, base_pairs, len(prefix))
            # depth-first, preserving candidate order
            for step in reversed(cands):
                if any(step == p for p in prefix):
                    continue
                stack.append(prefix + [step])
        if truncated:
            break
    return SearchResult(refutation=None, truncated=truncated, lp_solves=solves)


def is_k_ak(
    m: Matroid,
    depth: int,
    budget: int = 2000,
    use_filters: bool = True,
    use_ge: bool = False,
):
    """True / False / "inconclusive": does every sequence of <= depth AK
    steps admit a polymatroid extension?  False carries the refuting
    sequence; a truncated search is reported as inconclusive, never as a
    pass."""
    res = search_refutation(m, depth, budget=budget, use_filters=use_filters, use_ge=use_ge)
    if res.refutation is not None:
        return False, res
    if res.truncated:
        return "inconclusive", res
    return True, res
