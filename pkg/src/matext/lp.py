"""Exact-rational linear programming over subset-indexed variables.

Variables are keyed by subset masks of an extended ground set (plus ad-hoc
keys like the share bound in the secret-sharing LP).  All constraint data is
exact: integer/rational coefficients, rational right-hand sides.

Two solution paths share one certificate format:

* a dense two-phase simplex over ``fractions.Fraction`` (Bland's rule, so
  deterministic and terminating), used directly on small instances, and
* a floating-point pass through scipy's HiGHS used only as an untrusted
  oracle on large instances; any infeasibility or bound it suggests is
  reconstructed as an exact certificate on the (small) support and verified
  by pure rational arithmetic before being reported.

Certificate convention: every row is read in its ">="-form (a "<=" row is
negated).  A Farkas certificate is a vector u, nonnegative on inequality
rows, with  sum_i u_i a_i = 0  and  sum_i u_i b_i > 0.  A dual certificate
for a minimization is y, nonnegative on inequality rows, with
sum_i y_i a_i = c  and  sum_i y_i b_i = value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .masks import format_mask, full_mask, popcount, subsets_of

Key = Union[int, str]

GE, LE, EQ = ">=", "<=", "=="


class LPError(ValueError):
    pass


class LPSizeError(LPError):
    pass


@dataclass
class Row:
    coeffs: Dict[Key, Fraction]
    sense: str
    rhs: Fraction
    tag: str = ""

    def ge_form(self) -> Tuple[Dict[Key, Fraction], Fraction]:
        """Coefficients and rhs with the row read as `a.x >= b`."""
        if self.sense == LE:
            return {k: -v for k, v in self.coeffs.items()}, -self.rhs
        return dict(self.coeffs), self.rhs


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise LPError("refusing float coefficient; pass int/Fraction")
    return Fraction(x)


class LinearProgram:
    """Sparse exact-rational LP.  Rows are kept in insertion order; the row
    index is the handle used by certificates."""

    def __init__(self, n_points: int = 0):
        self.n_points = n_points
        self.rows: List[Row] = []
        self.objective: Optional[Dict[Key, Fraction]] = None  # minimized

    def add_row(self, coeffs: Dict[Key, object], sense: str, rhs, tag: str = "") -> int:
        if sense not in (GE, LE, EQ):
            raise LPError(f"bad sense {sense!r}")
        clean = {k: _frac(v) for k, v in coeffs.items() if v}
        self.rows.append(Row(clean, sense, _frac(rhs), tag))
        return len(self.rows) - 1

    def set_objective(self, coeffs: Dict[Key, object]) -> None:
        self.objective = {k: _frac(v) for k, v in coeffs.items() if v}

    def variables(self) -> List[Key]:
        seen = set()
        for row in self.rows:
            seen.update(row.coeffs)
        if self.objective:
            seen.update(self.objective)
        ints = sorted(k for k in seen if isinstance(k, int))
        others = sorted((k for k in seen if not isinstance(k, int)), key=str)
        return ints + others  # type: ignore[operator]

    def copy(self) -> "LinearProgram":
        out = LinearProgram(self.n_points)
        out.rows = [Row(dict(r.coeffs), r.sense, r.rhs, r.tag) for r in self.rows]
        out.objective = dict(self.objective) if self.objective else None
        return out

    # -- serialization --------------------------------------------------------

    def to_json(self) -> str:
        def key_out(k):
            return k if isinstance(k, int) else f"${k}"

        return json.dumps(
            {
                "n_points": self.n_points,
                "rows": [
                    {
                        "coeffs": {str(key_out(k)): str(v) for k, v in r.coeffs.items()},
                        "sense": r.sense,
                        "rhs": str(r.rhs),
                        "tag": r.tag,
                    }
                    for r in self.rows
                ],
                "objective": None
                if self.objective is None
                else {str(key_out(k)): str(v) for k, v in self.objective.items()},
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "LinearProgram":
        def key_in(s: str) -> Key:
            return s[1:] if s.startswith("$") else int(s)

        data = json.loads(text)
        lp = cls(data.get("n_points", 0))
        for r in data["rows"]:
            lp.rows.append(
                Row(
                    {key_in(k): Fraction(v) for k, v in r["coeffs"].items()},
                    r["sense"],
                    Fraction(r["rhs"]),
                    r.get("tag", ""),
                )
            )
        if data.get("objective") is not None:
            lp.objective = {key_in(k): Fraction(v) for k, v in data["objective"].items()}
        return lp


@dataclass
class LPOutcome:
    status: str  # feasible | infeasible | optimal | unbounded
    point: Optional[Dict[Key, Fraction]] = None
    value: Optional[Fraction] = None
    farkas: Optional[Dict[int, Fraction]] = None  # row index -> multiplier
    dual: Optional[Dict[int, Fraction]] = None
    exact_point: bool = True

    def to_json(self) -> str:
        def key_out(k):
            return str(k) if isinstance(k, int) else f"${k}"

        return json.dumps(
            {
                "status": self.status,
                "point": None
                if self.point is None
                else {key_out(k): str(v) for k, v in self.point.items()},
                "value": None if self.value is None else str(self.value),
                "farkas": None
                if self.farkas is None
                else {str(i): str(v) for i, v in self.farkas.items()},
                "dual": None
                if self.dual is None
                else {str(i): str(v) for i, v in self.dual.items()},
                "exact_point": self.exact_point,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "LPOutcome":
        def key_in(s: str) -> Key:
            return s[1:] if s.startswith("$") else int(s)

        d = json.loads(text)
        return cls(
            status=d["status"],
            point=None
            if d.get("point") is None
            else {key_in(k): Fraction(v) for k, v in d["point"].items()},
            value=None if d.get("value") is None else Fraction(d["value"]),
            farkas=None
            if d.get("farkas") is None
            else {int(i): Fraction(v) for i, v in d["farkas"].items()},
            dual=None
            if d.get("dual") is None
            else {int(i): Fraction(v) for i, v in d["dual"].items()},
            exact_point=d.get("exact_point", True),
        )


# -- constraint generators ----------------------------------------------------


def shannon_block(lp: LinearProgram, n_points: int, points: Optional[Sequence[int]] = None) -> int:
    """Elemental polymatroid inequalities over the given points.

    For every unordered pair i != j and every A disjoint from both:
    f(Ai) + f(Aj) - f(Aij) - f(A) >= 0, and for every i: f(Q) - f(Q-i) >= 0.
    With f(empty) = 0 substituted, these generate all of monotonicity and
    submodularity.  Returns the number of rows added.
    """
    pts = list(points) if points is not None else list(range(n_points))
    n = len(pts)
    if n > 16:
        raise LPSizeError(f"{n} points would need ~{n * (n - 1) * 2 ** (n - 3)} rows")
    ground = 0
    for p in pts:
        ground |= 1 << p
    added = 0
    for ia in range(n):
        for ib in range(ia + 1, n):
            i, j = 1 << pts[ia], 1 << pts[ib]
            rest = ground & ~(i | j)
            for a in subsets_of(rest):
                coeffs: Dict[Key, Fraction] = {}
                for m, c in ((a | i, 1), (a | j, 1), (a | i | j, -1), (a, -1)):
                    if m:
                        coeffs[m] = coeffs.get(m, Fraction(0)) + c
                lp.add_row(coeffs, GE, 0, tag="SHANNON")
                added += 1
    for p in pts:
        i = 1 << p
        coeffs = {ground: Fraction(1)}
        if ground & ~i:
            coeffs[ground & ~i] = Fraction(-1)
        lp.add_row(coeffs, GE, 0, tag="SHANNON")
        added += 1
    return added


def pin_matroid(lp: LinearProgram, m, points: Optional[Sequence[int]] = None) -> int:
    """Pin f(X) = rank(X) for every nonempty X over the matroid's points.

    `points` maps the matroid's own ground set into the LP's; defaults to
    the identity embedding."""
    pts = list(points) if points is not None else list(range(m.n))
    if len(pts) != m.n:
        raise LPError("point map size mismatch")
    added = 0
    for a in range(1, 1 << m.n):
        mask = 0
        for bit in range(m.n):
            if (a >> bit) & 1:
                mask |= 1 << pts[bit]
        lp.add_row({mask: 1}, EQ, m.rank(a), tag="RANK_PIN")
        added += 1
    return added


# -- certificate checking ------------------------------------------------------


def check_certificate(lp: LinearProgram, outcome: LPOutcome) -> bool:
    """Re-verify an outcome with streaming rational arithmetic only."""
    try:
        if outcome.status == "infeasible":
            return _check_farkas(lp, outcome.farkas)
        if outcome.status == "feasible":
            return outcome.point is not None and _check_point(lp, outcome.point)
        if outcome.status == "optimal":
            if outcome.value is None or outcome.dual is None:
                return False
            if not _check_dual_bound(lp, outcome.dual, outcome.value):
                return False
            if outcome.exact_point:
                if outcome.point is None or not _check_point(lp, outcome.point):
                    return False
                obj = sum(
                    (outcome.point.get(k, Fraction(0)) * c for k, c in lp.objective.items()),
                    Fraction(0),
                )
                if obj != outcome.value:
                    return False
            return True
        if outcome.status == "unbounded":
            return True  # nothing to check without a ray; solver-internal
        return False
    except (KeyError, TypeError):
        return False


def _check_point(lp: LinearProgram, point: Dict[Key, Fraction]) -> bool:
    for row in lp.rows:
        lhs = sum((point.get(k, Fraction(0)) * c for k, c in row.coeffs.items()), Fraction(0))
        if row.sense == GE and lhs < row.rhs:
            return False
        if row.sense == LE and lhs > row.rhs:
            return False
        if row.sense == EQ and lhs != row.rhs:
            return False
    return True


def _combine(lp: LinearProgram, mult: Dict[int, Fraction]):
    combo: Dict[Key, Fraction] = {}
    rhs = Fraction(0)
    for i, u in mult.items():
        row = lp.rows[i]
        coeffs, b = row.ge_form()
        if row.sense != EQ and u < 0:
            return None, None
        for k, c in coeffs.items():
            combo[k] = combo.get(k, Fraction(0)) + u * c
        rhs += u * b
    combo = {k: v for k, v in combo.items() if v}
    return combo, rhs


def _check_farkas(lp: LinearProgram, farkas: Optional[Dict[int, Fraction]]) -> bool:
    if not farkas:
        return False
    combo, rhs = _combine(lp, farkas)
    if combo is None:
        return False
    return not combo and rhs > 0


def _check_dual_bound(lp: LinearProgram, dual: Dict[int, Fraction], value: Fraction) -> bool:
    if lp.objective is None:
        return False
    combo, rhs = _combine(lp, dual)
    if combo is None:
        return False
    c = {k: v for k, v in lp.objective.items() if v}
    return combo == c and rhs == value


# -- exact simplex -------------------------------------------------------------


class _ExactSimplex:
    """Two-phase dense tableau simplex over Fractions with Bland's rule.

    Variables may be free (split into a difference of nonnegatives) or
    declared nonnegative.  Produces exact primal points, Farkas rows from
    phase 1, and dual multipliers from phase 2.
    """

    def __init__(self, lp: LinearProgram, nonneg: Optional[set] = None):
        self.lp = lp
        self.vars = lp.variables()
        self.nonneg = nonneg or set()
        self._build()

    def _build(self):
        lp = self.lp
        # columns: for each variable one (nonneg) or two (free, x+ - x-)
        self.col_var: List[Tuple[Key, int]] = []  # (key, +1/-1)
        for k in self.vars:
            self.col_var.append((k, +1))
            if k not in self.nonneg:
                self.col_var.append((k, -1))
        ncols = len(self.col_var)
        col_of: Dict[Key, List[int]] = {}
        for idx, (k, s) in enumerate(self.col_var):
            col_of.setdefault(k, []).append(idx)

        m = len(lp.rows)
        A: List[List[Fraction]] = []
        b: List[Fraction] = []
        self.row_sign: List[int] = []  # multiply original ge-form by this to get tableau row
        self.slack_col: List[Optional[int]] = []
        for row in lp.rows:
            coeffs, rhs = row.ge_form()
            arow = [Fraction(0)] * ncols
            for k, c in coeffs.items():
                for idx in col_of[k]:
                    arow[idx] += c * self.col_var[idx][1]
            # a.x >= rhs  ->  a.x - s = rhs (s >= 0); equality: no slack
            A.append(arow)
            b.append(rhs)
            self.slack_col.append(None if row.sense == EQ else -1)
        # append slack columns
        for i, sc in enumerate(self.slack_col):
            if sc is not None:
                for r in range(m):
                    A[r].append(Fraction(-1) if r == i else Fraction(0))
                self.slack_col[i] = ncols
                ncols += 1
        # normalize b >= 0
        self.flip: List[bool] = []
        for i in range(m):
            if b[i] < 0:
                A[i] = [-x for x in A[i]]
                b[i] = -b[i]
                self.flip.append(True)
            else:
                self.flip.append(False)
        self.A, self.b, self.m, self.ncols = A, b, m, ncols

    def solve(self) -> LPOutcome:
        A, b, m = self.A, self.b, self.m
        n_struct = self.ncols
        # phase 1: artificials
        basis = []
        for i in range(m):
            for r in range(m):
                A[r].append(Fraction(1) if r == i else Fraction(0))
            basis.append(n_struct + i)
        ncols = n_struct + m
        cost1 = [Fraction(0)] * n_struct + [Fraction(1)] * m
        tab_obj, y1 = self._run(A, b, basis, cost1, ncols)
        if tab_obj > 0:
            farkas = self._farkas_from_duals(y1)
            return LPOutcome(status="infeasible", farkas=farkas)
        # drive artificials out of the basis when possible; zero their columns
        for i in range(m):
            if basis[i] >= n_struct:
                piv = next((j for j in range(n_struct) if A[i][j] != 0), None)
                if piv is not None:
                    self._pivot(A, b, basis, i, piv, ncols)
        # forbid artificials from re-entering
        blocked = set(range(n_struct, ncols))

        if self.lp.objective is None:
            point = self._extract_point(basis, b)
            return LPOutcome(status="feasible", point=point)

        cost2 = [Fraction(0)] * ncols
        key_cost = {k: v for k, v in self.lp.objective.items()}
        for j, (k, s) in enumerate(self.col_var):
            cost2[j] = key_cost.get(k, Fraction(0)) * s
        res = self._run(A, b, basis, cost2, ncols, blocked=blocked)
        if res is None:
            return LPOutcome(status="unbounded")
        obj, y2 = res if isinstance(res, tuple) else (res, None)
        point = self._extract_point(basis, b)
        dual = self._dual_from_duals(y2)
        return LPOutcome(status="optimal", point=point, value=obj, dual=dual)

    def _run(self, A, b, basis, cost, ncols, blocked=frozenset()):
        m = self.m
        # reduced costs maintained implicitly via y = c_B B^-1 recomputation is
        # costly; instead keep an explicit objective row.
        z = [Fraction(0)] * ncols
        zval = Fraction(0)
        for i in range(m):
            cb = cost[basis[i]]
            if cb:
                for j in range(ncols):
                    z[j] += cb * A[i][j]
                zval += cb * b[i]
        while True:
            enter = None
            for j in range(ncols):
                if j in blocked or basis_contains(basis, j):
                    continue
                if cost[j] - z[j] < 0:
                    enter = j
                    break
            if enter is None:
                y = self._duals(A, b, basis, cost)
                return zval, y
            ratios = []
            for i in range(m):
                if A[i][enter] > 0:
                    ratios.append((b[i] / A[i][enter], basis[i], i))
            if not ratios:
                return None  # unbounded
            _, _, leave = min(ratios, key=lambda t: (t[0], t[1]))
            self._pivot(A, b, basis, leave, enter, ncols)
            # rebuild the objective row; same O(m*n) as maintaining it by
            # pivoting, and immune to bookkeeping drift
            z = [Fraction(0)] * ncols
            zval = Fraction(0)
            for i in range(m):
                cbi = cost[basis[i]]
                if cbi:
                    for j in range(ncols):
                        z[j] += cbi * A[i][j]
                    zval += cbi * b[i]

    def _duals(self, A, b, basis, cost):
        # y_i = (c_B B^{-1})_i read off the artificial columns e_i, which sit
        # at indices n_struct + i of the phase-1 tableau; during phase 2 the
        # same columns still hold B^{-1}.
        m = self.m
        nart0 = self.ncols  # first artificial column
        y = []
        for i in range(m):
            col = nart0 + i
            acc = Fraction(0)
            for r in range(m):
                cb = cost[basis[r]]
                if cb:
                    acc += cb * A[r][col]
            y.append(acc)
        return y

    def _pivot(self, A, b, basis, leave, enter, ncols):
        piv = A[leave][enter]
        inv = 1 / piv
        A[leave] = [x * inv for x in A[leave]]
        b[leave] *= inv
        for r in range(self.m):
            if r != leave and A[r][enter] != 0:
                f = A[r][enter]
                Ar, Al = A[r], A[leave]
                A[r] = [Ar[j] - f * Al[j] for j in range(len(Ar))]
                b[r] -= f * b[leave]
        basis[leave] = enter

    def _extract_point(self, basis, b) -> Dict[Key, Fraction]:
        vals: Dict[Key, Fraction] = {}
        for i, bi in enumerate(basis):
            if bi < len(self.col_var):
                k, s = self.col_var[bi]
                vals[k] = vals.get(k, Fraction(0)) + s * b[i]
        return {k: v for k, v in vals.items()}

    def _signed_multipliers(self, y) -> Dict[int, Fraction]:
        out = {}
        for i, yi in enumerate(y):
            if self.flip[i]:
                yi = -yi
            if yi:
                out[i] = yi
        return out

    def _farkas_from_duals(self, y) -> Dict[int, Fraction]:
        return self._signed_multipliers(y)

    def _dual_from_duals(self, y) -> Dict[int, Fraction]:
        return self._signed_multipliers(y)


def basis_contains(basis, j):
    return j in basis


def solve(lp: LinearProgram, method: str = "auto", nonneg_vars: bool = False) -> LPOutcome:
    """Solve the LP exactly.

    `method` is one of:
      - "exact": dense rational simplex (small LPs only);
      - "float": HiGHS oracle + exact certificate reconstruction;
      - "auto": exact below a size threshold, float-assisted above it.
    """
    nvars = len(lp.variables())
    nrows = len(lp.rows)
    if method == "auto":
        method = "exact" if nrows * max(nvars, 1) <= 4_000 else "float"
    if method == "exact":
        nonneg = set(lp.variables()) if nonneg_vars else set()
        return _ExactSimplex(lp, nonneg=nonneg).solve()
    if method == "float":
        from . import lpfloat

        return lpfloat.solve_float_assisted(lp)
    raise LPError(f"unknown method {method!r}")
