"""Float-assisted LP solving with exact certificate reconstruction.

HiGHS (via scipy) is used purely as an oracle on instances too large for
the dense rational simplex.  Nothing reported to callers rests on floating
point alone:

* pinned variables (single-variable equality rows, e.g. matroid rank pins)
  are substituted out before any float work; certificates are mapped back
  to the original rows exactly;
* infeasibility: a dual ray is located in floats (interior point on large
  instances), sharpened to a vertex by an L1 re-solve on its support, and
  the multiplier vector is then recomputed exactly as the nullspace of the
  support system over the rationals; the resulting Farkas combination is
  verified by streaming rational arithmetic before being returned;
* feasibility: a float point is rationalized and kept only if it satisfies
  every row exactly;
* optimality: the dual multipliers on the float support are recomputed
  exactly the same way, giving an exact certified bound; the primal point
  is rationalized and marked exact only when its objective matches.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .lp import (
    EQ,
    GE,
    LE,
    LinearProgram,
    LPError,
    LPOutcome,
    _check_dual_bound,
    _check_farkas,
    _check_point,
    _ExactSimplex,
)

_RAY_TOL = 1e-9
_IPM_THRESHOLD = 20_000  # rows above which interior point beats simplex here


def _scipy():
    from scipy import sparse
    from scipy.optimize import linprog

    return sparse, linprog


def _method_for(nrows: int) -> str:
    return "highs-ipm" if nrows > _IPM_THRESHOLD else "highs"


class _Reduced:
    """The LP after pin substitution, with float matrices for every row."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        self.pinned: Dict[object, Fraction] = {}
        self.pin_row_of: Dict[object, int] = {}
        conflict = None
        for idx, row in enumerate(lp.rows):
            if row.sense == EQ and len(row.coeffs) == 1:
                (k, c), = row.coeffs.items()
                val = row.rhs / c
                if k in self.pinned:
                    if self.pinned[k] != val:
                        conflict = (self.pin_row_of[k], idx)
                else:
                    self.pinned[k] = val
                    self.pin_row_of[k] = idx
        self.pin_conflict = conflict

        self.free_vars = [k for k in lp.variables() if k not in self.pinned]
        self.col_of = {k: j for j, k in enumerate(self.free_vars)}
        n = len(self.free_vars)

        # reduced rows, ge-form: indices into lp.rows, float csr + rhs
        self.row_idx: List[int] = []
        row_is_eq: List[bool] = []
        data, ri, rj, rhs = [], [], [], []
        self.trivially_violated: Optional[Tuple[int, int]] = None  # (row, sign)
        pin_rows = set(self.pin_row_of.values())
        r = 0
        for idx, row in enumerate(lp.rows):
            if idx in pin_rows:
                continue
            coeffs, b = row.ge_form()
            red_b = b
            ncoef = 0
            for k, c in coeffs.items():
                if k in self.pinned:
                    red_b -= c * self.pinned[k]
                else:
                    ri.append(r)
                    rj.append(self.col_of[k])
                    data.append(float(c))
                    ncoef += 1
            if ncoef == 0:
                if self.trivially_violated is None:
                    if red_b > 0:
                        self.trivially_violated = (idx, 1)
                    elif row.sense == EQ and red_b < 0:
                        self.trivially_violated = (idx, -1)
                continue
            self.row_idx.append(idx)
            row_is_eq.append(row.sense == EQ)
            rhs.append(float(red_b))
            r += 1
        sparse, _ = _scipy()
        self.A = sparse.csr_matrix((data, (ri, rj)), shape=(r, n))
        self.b = np.array(rhs)
        self.is_eq = np.array(row_is_eq, dtype=bool)
        self.n = n
        self.m = r

    def reduced_ge_form(self, idx: int) -> Tuple[Dict[object, Fraction], Fraction]:
        coeffs, b = self.lp.rows[idx].ge_form()
        out = {}
        for k, c in coeffs.items():
            if k in self.pinned:
                b -= c * self.pinned[k]
            else:
                out[k] = c
        return out, b

    def lift_certificate(self, mult: Dict[int, Fraction]) -> Dict[int, Fraction]:
        """Add pin-row multipliers cancelling the pinned columns."""
        residual: Dict[object, Fraction] = {}
        for idx, u in mult.items():
            coeffs, _ = self.lp.rows[idx].ge_form()
            for k, c in coeffs.items():
                if k in self.pinned:
                    residual[k] = residual.get(k, Fraction(0)) + u * c
        cert = dict(mult)
        for k, tot in residual.items():
            if not tot:
                continue
            pin = self.lp.rows[self.pin_row_of[k]]
            (c0,) = pin.coeffs.values()
            cert[self.pin_row_of[k]] = cert.get(self.pin_row_of[k], Fraction(0)) - tot / c0
        return {i: v for i, v in cert.items() if v}


def solve_float_assisted(lp: LinearProgram) -> LPOutcome:
    sparse, linprog = _scipy()
    red = _Reduced(lp)
    if red.pin_conflict is not None:
        return _pin_conflict_outcome(lp, red)
    if red.trivially_violated is not None:
        idx, sign = red.trivially_violated
        cert = red.lift_certificate({idx: Fraction(sign)})
        if not _check_farkas(lp, cert):
            raise LPError("trivial violation certificate failed verification")
        return LPOutcome(status="infeasible", farkas=cert)

    if red.n == 0:
        # every variable is pinned and no reduced row is violated: the pin
        # assignment itself is the (unique) feasible point
        point = dict(red.pinned)
        if lp.objective is None:
            return LPOutcome(status="feasible", point=point, exact_point=True)
        value = sum(
            (v * point.get(k, Fraction(0)) for k, v in lp.objective.items()),
            Fraction(0),
        )
        cert = _exact_dual_pinned_only(lp, red)
        return LPOutcome(
            status="optimal", point=point, value=value, dual=cert, exact_point=True
        )

    if lp.objective is None:
        # Farkas alternative: sup b.u over the homogeneous dual cone is
        # positive iff the primal is infeasible, so one ray solve settles
        # feasibility and, when positive, hands us the certificate support.
        ray = _float_ray(red)
        if ray is not None:
            return _certify_infeasible(lp, red, ray)
        x = _float_primal(red, np.zeros(red.n))
        if x is None:
            # HiGHS disagreed with the ray solve; trust neither, fail loudly
            raise LPError("oracle disagreement: no dual ray but primal reports infeasible")
        point, exact = _rationalize_point(lp, red, x)
        return LPOutcome(status="feasible", point=point, exact_point=exact)

    # objective path
    c = np.zeros(red.n)
    obj_const = Fraction(0)
    for k, v in lp.objective.items():
        if k in red.pinned:
            obj_const += v * red.pinned[k]
        else:
            c[red.col_of[k]] = float(v)
    res = _float_primal_full(red, c)
    if res.status == 2:
        ray = _float_ray(red)
        if ray is None:
            raise LPError("oracle disagreement: primal infeasible but no dual ray found")
        return _certify_infeasible(lp, red, ray)
    if res.status == 3:
        return LPOutcome(status="unbounded")
    if res.status != 0:
        raise LPError(f"HiGHS returned status {res.status}: {res.message}")
    point, point_exact = _rationalize_point(lp, red, res.x)
    sup = _dual_support(red, res)
    value, cert = _exact_dual(lp, red, sup)
    if value is None:
        raise LPError("float path failed to certify the optimum exactly")
    exact_point = False
    if point_exact and point is not None:
        obj = sum(
            (point.get(k, Fraction(0)) * v for k, v in lp.objective.items()), Fraction(0)
        )
        exact_point = obj == value
    return LPOutcome(
        status="optimal", point=point, value=value, dual=cert, exact_point=exact_point
    )


# -- float oracles -------------------------------------------------------------


def _float_primal_full(red: _Reduced, c):
    sparse, linprog = _scipy()
    ineq = ~red.is_eq
    A_ub = -red.A[ineq]
    b_ub = -red.b[ineq]
    A_eq = red.A[red.is_eq]
    b_eq = red.b[red.is_eq]
    return linprog(
        c,
        A_ub=A_ub if A_ub.shape[0] else None,
        b_ub=b_ub if A_ub.shape[0] else None,
        A_eq=A_eq if A_eq.shape[0] else None,
        b_eq=b_eq if A_eq.shape[0] else None,
        bounds=(None, None),
        method=_method_for(red.m),
    )


def _float_primal(red: _Reduced, c):
    res = _float_primal_full(red, c)
    return res.x if res.status == 0 else None


def _float_ray(red: _Reduced):
    """Maximize b.u over {u: u^T A = 0, u_ineq in [0,1], u_eq in [-1,1]}.

    A positive optimum is a scaled Farkas ray; optimum 0 certifies (in
    floats) that none exists."""
    sparse, linprog = _scipy()
    bounds = np.where(red.is_eq[:, None], (-1.0, 1.0), (0.0, 1.0))
    res = linprog(
        -red.b,
        A_eq=red.A.T.tocsr(),
        b_eq=np.zeros(red.n),
        bounds=list(map(tuple, bounds)),
        method=_method_for(red.m),
    )
    if res.status != 0 or -res.fun < _RAY_TOL:
        return None
    return res.x


# -- exact reconstruction ------------------------------------------------------


def _rationalize_point(lp, red: _Reduced, x) -> Tuple[Optional[Dict], bool]:
    if x is None:
        return None, False
    point = dict(red.pinned)
    for k, xv in zip(red.free_vars, x):
        f = Fraction(float(xv)).limit_denominator(10**6)
        if f:
            point[k] = f
    if _check_point(lp, point):
        return point, True
    approx = dict(red.pinned)
    for k, xv in zip(red.free_vars, x):
        approx[k] = Fraction(float(xv)).limit_denominator(10**12)
    return approx, False


def _pin_conflict_outcome(lp, red: _Reduced) -> LPOutcome:
    i, j = red.pin_conflict
    ci = next(iter(lp.rows[i].coeffs.values()))
    cj = next(iter(lp.rows[j].coeffs.values()))
    cert = {i: Fraction(1) / ci, j: Fraction(-1) / cj}
    if not _check_farkas(lp, cert):
        cert = {i: Fraction(-1) / ci, j: Fraction(1) / cj}
        if not _check_farkas(lp, cert):
            raise LPError("inconsistent pins but certificate construction failed")
    return LPOutcome(status="infeasible", farkas=cert)


def _certify_infeasible(lp, red: _Reduced, u) -> LPOutcome:
    sup = np.nonzero(np.abs(u) > _RAY_TOL)[0]
    sup = _l1_vertex_support(red, sup)
    forms = {int(i): red.reduced_ge_form(red.row_idx[int(i)]) for i in sup}
    alive = _prune_lonely(forms)
    sols = _nullspace_solutions(red, alive, forms, target=None)
    for mult in sols:
        cert = red.lift_certificate(
            {red.row_idx[i]: v for i, v in mult.items() if v}
        )
        if _check_farkas(lp, cert):
            return LPOutcome(status="infeasible", farkas=cert)
    raise LPError("exact Farkas reconstruction failed on the float support")


def _l1_vertex_support(red: _Reduced, sup):
    """Re-solve the ray restricted to its support minimizing the L1 norm,
    which lands on a vertex (unique multiplier vector) and often shrinks
    the support."""
    sparse, linprog = _scipy()
    if sup.size == 0:
        return sup
    A_s = red.A[sup].T.tocsr()
    b_s = red.b[sup]
    eq_s = red.is_eq[sup]
    # split equality-row multipliers into u+ - u- so the objective is a
    # genuine L1 norm and the optimum is basic
    cols = [A_s]
    cost = [np.ones(sup.size)]
    brow = [b_s]
    if eq_s.any():
        A_neg = -A_s[:, eq_s]
        cols.append(A_neg)
        cost.append(np.ones(int(eq_s.sum())))
        brow.append(-b_s[eq_s])
    A_full = sparse.hstack(cols).tocsr()
    norm = sparse.csr_matrix(np.concatenate(brow))
    A_eq = sparse.vstack([A_full, norm]).tocsr()
    b_eq = np.zeros(red.n + 1)
    b_eq[-1] = 1.0
    res = linprog(
        np.concatenate(cost), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs"
    )
    if res.status != 0:
        return sup
    u = res.x[: sup.size].copy()
    if eq_s.any():
        u[eq_s] -= res.x[sup.size:]
    return sup[np.abs(u) > _RAY_TOL]


def _prune_lonely(forms: Dict[int, Tuple[Dict, Fraction]]) -> List[int]:
    """Drop support rows containing a variable no other support row touches:
    the balance equation on that variable forces their multiplier to zero."""
    alive = set(forms)
    while True:
        count: Dict[object, int] = {}
        for i in alive:
            for k in forms[i][0]:
                count[k] = count.get(k, 0) + 1
        drop = [i for i in alive if any(count[k] == 1 for k in forms[i][0])]
        if not drop:
            return sorted(alive)
        alive -= set(drop)


def _nullspace_solutions(red: _Reduced, alive, forms, target):
    """Exact multipliers on the support via sparse rational elimination.

    Solves sum_i u_i a_i = target (0 for Farkas) together with the
    normalization sum_i u_i b_i = 1 treated as an extra homogeneous column;
    yields candidate solutions from the (small) nullspace.
    """
    if not alive:
        return []
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    col_of = {i: j for j, i in enumerate(alive)}
    keys = sorted(
        {k for i in alive for k in forms[i][0]}, key=lambda x: (isinstance(x, str), str(x))
    )
    if target:
        if any(k not in set(keys) for k in target):
            return []
    row_of = {k: j for j, k in enumerate(keys)}
    t_col = len(alive)
    sdm: Dict[int, Dict[int, object]] = {}
    for i in alive:
        ci = col_of[i]
        coeffs, rhs = forms[i]
        for k, v in coeffs.items():
            sdm.setdefault(row_of[k], {})[ci] = QQ(v.numerator, v.denominator)
        if rhs:
            sdm.setdefault(len(keys), {})[ci] = QQ(rhs.numerator, rhs.denominator)
    if target:
        for k, v in target.items():
            sdm.setdefault(row_of[k], {})[t_col] = QQ(-v.numerator, v.denominator)
    sdm.setdefault(len(keys), {})[t_col] = QQ(-1)
    M = DomainMatrix(sdm, (len(keys) + 1, t_col + 1), QQ)
    rr, piv = M.rref()
    pivset = set(piv)
    free = [j for j in range(t_col + 1) if j not in pivset]
    rep = rr.rep.to_sdm() if hasattr(rr.rep, "to_sdm") else rr.rep
    basis = []
    for f in free:
        vec = {f: Fraction(1)}
        for r, p in enumerate(piv):
            row = rep.get(r, {})
            v = row.get(f)
            if v is not None:
                vec[p] = Fraction(-int(v.numerator), int(v.denominator))
        basis.append(vec)
    sols = []
    for vec in basis:
        t = vec.get(t_col, Fraction(0))
        if not t:
            continue
        sols.append({alive[j]: v / t for j, v in vec.items() if j != t_col})
    return sols


def _dual_support(red: _Reduced, res) -> np.ndarray:
    marg = np.zeros(red.m)
    ineq = ~red.is_eq
    if res.ineqlin is not None and len(res.ineqlin.marginals):
        marg[ineq] = np.asarray(res.ineqlin.marginals)
    if res.eqlin is not None and len(res.eqlin.marginals):
        marg[red.is_eq] = np.asarray(res.eqlin.marginals)
    return np.nonzero(np.abs(marg) > _RAY_TOL)[0]


def _exact_dual_pinned_only(lp, red: _Reduced) -> Dict[int, Fraction]:
    """Dual certificate when every variable is pinned: scale each pin row
    to reproduce its variable's objective coefficient."""
    cert: Dict[int, Fraction] = {}
    for k, ck in (lp.objective or {}).items():
        if not ck:
            continue
        idx = red.pin_row_of[k]
        (c0,) = lp.rows[idx].coeffs.values()
        cert[idx] = cert.get(idx, Fraction(0)) + ck / c0
    return {i: v for i, v in cert.items() if v}


def _exact_dual(lp, red: _Reduced, sup):
    """Exact dual multipliers on the float support.

    Solves sum_i y_i a_i = c exactly on the support; the certified value is
    sum_i y_i b_i, a true lower bound for the minimization whatever the
    float optimum claimed.
    """
    if lp.objective is None:
        return None, None
    obj_red: Dict[object, Fraction] = {}
    obj_const = Fraction(0)
    for k, v in lp.objective.items():
        if k in red.pinned:
            obj_const += v * red.pinned[k]
        else:
            obj_red[k] = v
    forms = {int(i): red.reduced_ge_form(red.row_idx[int(i)]) for i in sup}
    alive = sorted(forms)
    # here the normalization column is the objective; solve the linear
    # system directly: unknown y on support rows, equations per variable
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    keys = sorted(
        {k for i in alive for k in forms[i][0]} | set(obj_red),
        key=lambda x: (isinstance(x, str), str(x)),
    )
    row_of = {k: j for j, k in enumerate(keys)}
    sdm: Dict[int, Dict[int, object]] = {}
    for j, i in enumerate(alive):
        for k, v in forms[i][0].items():
            sdm.setdefault(row_of[k], {})[j] = QQ(v.numerator, v.denominator)
    rhs_col = len(alive)
    for k, v in obj_red.items():
        sdm.setdefault(row_of[k], {})[rhs_col] = QQ(v.numerator, v.denominator)
    M = DomainMatrix(sdm, (len(keys), rhs_col + 1), QQ)
    rr, piv = M.rref()
    rep = rr.rep.to_sdm() if hasattr(rr.rep, "to_sdm") else rr.rep
    if rhs_col in piv:
        return None, None  # objective not spanned by the support rows
    y: Dict[int, Fraction] = {}
    for r, p in enumerate(piv):
        v = rep.get(r, {}).get(rhs_col)
        if v is not None:
            y[alive[p]] = Fraction(int(v.numerator), int(v.denominator))
    mult = {red.row_idx[i]: v for i, v in y.items() if v}
    cert = red.lift_certificate(mult)
    value = sum((v * forms[i][1] for i, v in y.items()), Fraction(0)) + obj_const
    if not _check_dual_bound(lp, cert, value):
        return None, None
    return value, cert
