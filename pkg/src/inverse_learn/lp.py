"""Self-contained dense LP engine plus small polyhedral utilities.

The solver is a two-phase primal simplex on a dense tableau with native
variable bounds (nonbasic variables may sit at either bound, the ratio test
is the bounded-variable one).  Pivoting is Dantzig most-negative with an
automatic switch to Bland's rule after a run of degenerate steps, so cycling
cannot persist.  Everything is deterministic: ties break toward the smallest
column / basis index.

Statuses are data, not exceptions: callers inspect ``LpResult.status``.
Equality rows are supported; the inverse solvers use them to force chosen
constraints to bind exactly instead of juggling big-M arithmetic.
"""
from __future__ import annotations

import itertools
import warnings as _warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InfeasibleRegionError, TooLargeError

# row senses (internal integer codes so problem arrays stay numeric)
LE, EQ, GE = -1, 0, 1

_INF = np.inf


class LpStatus(str, Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    NUMERICAL_FAILURE = "NUMERICAL_FAILURE"


@dataclass
class LpProblem:
    """Minimise ``c . x`` s.t. rows ``A_i . x (<=|=|>=) rhs_i`` and
    ``lower <= x <= upper`` (bounds default to free)."""

    c: np.ndarray
    A: np.ndarray
    senses: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.asarray(self.A, dtype=float)
        if self.A.ndim != 2:
            self.A = self.A.reshape(-1, self.c.size)
        self.senses = np.asarray(self.senses, dtype=int)
        self.rhs = np.asarray(self.rhs, dtype=float)
        n = self.c.size
        self.lower = (
            np.full(n, -_INF) if self.lower is None else np.asarray(self.lower, float)
        )
        self.upper = (
            np.full(n, _INF) if self.upper is None else np.asarray(self.upper, float)
        )
        m = self.A.shape[0]
        if self.A.shape != (m, n) or self.senses.shape != (m,) or self.rhs.shape != (m,):
            raise ValueError("inconsistent LP dimensions")


@dataclass
class LpResult:
    status: LpStatus
    x: np.ndarray | None = None
    objective: float | None = None
    duals: np.ndarray | None = None
    dual_objective: float | None = None
    iterations: int = 0


def solve_lp(prob, tol_feas=1e-7, tol_opt=1e-9, max_iter=None):
    """Solve an `LpProblem`; returns an `LpResult` (statuses, not raises)."""
    m, n = prob.A.shape
    lo, up = prob.lower, prob.upper
    if np.any(lo > up + 1e-12):
        return LpResult(status=LpStatus.INFEASIBLE)

    # ---- variable transform: every internal column has bounds [0, U] ------
    cols = []        # structural columns of the internal matrix
    c_int = []       # internal costs
    U = []           # internal upper bounds
    col_var = []     # original variable index per column
    col_sign = []    # +1 shifted, -1 mirrored
    shifts = np.zeros(n)
    for j in range(n):
        a_j = prob.A[:, j]
        if np.isfinite(lo[j]):
            shifts[j] = lo[j]
            cols.append(a_j)
            c_int.append(prob.c[j])
            U.append(up[j] - lo[j])
            col_var.append(j)
            col_sign.append(1.0)
        elif np.isfinite(up[j]):
            shifts[j] = up[j]
            cols.append(-a_j)
            c_int.append(-prob.c[j])
            U.append(_INF)
            col_var.append(j)
            col_sign.append(-1.0)
        else:  # free: split into positive and negative parts
            cols.append(a_j)
            c_int.append(prob.c[j])
            U.append(_INF)
            col_var.append(j)
            col_sign.append(1.0)
            cols.append(-a_j)
            c_int.append(-prob.c[j])
            U.append(_INF)
            col_var.append(j)
            col_sign.append(-1.0)
    n_struct = len(cols)
    obj_const = float(prob.c @ shifts)
    rhs_int = prob.rhs - prob.A @ shifts

    # ---- slack columns, row flips, artificial seeding ----------------------
    slack_of_row = np.full(m, -1, dtype=int)
    for i in range(m):
        if prob.senses[i] != EQ:
            e = np.zeros(m)
            e[i] = 1.0 if prob.senses[i] == LE else -1.0
            slack_of_row[i] = len(cols)
            cols.append(e)
            c_int.append(0.0)
            U.append(_INF)
            col_var.append(-1)
            col_sign.append(0.0)

    Aint = np.column_stack(cols) if cols else np.zeros((m, 0))
    flip = rhs_int < 0
    Aint[flip] *= -1.0
    rhs_int = np.where(flip, -rhs_int, rhs_int)

    basis = np.empty(m, dtype=int)
    art_cols = []
    extra = []
    for i in range(m):
        s = slack_of_row[i]
        if s >= 0 and Aint[i, s] == 1.0:
            basis[i] = s
        else:
            e = np.zeros(m)
            e[i] = 1.0
            idx = Aint.shape[1] + len(extra)
            extra.append(e)
            art_cols.append(idx)
            basis[i] = idx
    if extra:
        Aint = np.column_stack([Aint] + extra)
    N = Aint.shape[1]
    c_int = np.asarray(c_int + [0.0] * len(extra))
    U = np.asarray(U + [_INF] * len(extra))
    is_art = np.zeros(N, dtype=bool)
    is_art[art_cols] = True

    if max_iter is None:
        max_iter = 50 * (m + N)

    # ---- tableau state ------------------------------------------------------
    Tab = Aint.copy()
    xB = rhs_int.copy()
    at_upper = np.zeros(N, dtype=bool)
    basic_mask = np.zeros(N, dtype=bool)
    basic_mask[basis] = True
    cI = is_art.astype(float)
    redII = c_int - c_int[basis] @ Tab
    redI = cI - cI[basis] @ Tab
    enterable = (~is_art) & (U > 0)

    scale = max(1.0, float(np.max(np.abs(rhs_int))) if m else 1.0)
    iters = 0
    degen_run = 0

    def _infeasibility():
        return float(xB[is_art[basis]].sum()) if len(art_cols) else 0.0

    for phase in (1, 2):
        if phase == 1 and not art_cols:
            continue
        if phase == 2:
            U[is_art] = 0.0  # pin artificials; basic ones stay parked at zero
        red = redI if phase == 1 else redII
        while True:
            if iters >= max_iter:
                return LpResult(status=LpStatus.NUMERICAL_FAILURE, iterations=iters)
            lower_side = enterable & ~basic_mask & ~at_upper & (red < -tol_opt)
            upper_side = enterable & ~basic_mask & at_upper & (red > tol_opt)
            any_cand = lower_side | upper_side
            if not any_cand.any():
                break  # phase optimal
            if degen_run < 40:
                score = np.where(any_cand, np.abs(red), -_INF)
                q = int(np.argmax(score))
            else:  # Bland
                q = int(np.flatnonzero(any_cand)[0])
            delta = -1.0 if at_upper[q] else 1.0

            d = Tab[:, q]
            move = delta * d  # basic vars change at rate -move
            dec = move > 1e-9
            inc = move < -1e-9
            t_best = U[q] if np.isfinite(U[q]) else _INF
            r = -1
            leave_at_upper = False
            if dec.any():
                ratios = np.maximum(xB[dec], 0.0) / move[dec]
                rows = np.flatnonzero(dec)
                k = int(np.argmin(ratios))
                # deterministic tie handling: smallest t wins; among near-ties
                # prefer the largest pivot (stability), then lowest basis index
                tie = ratios <= ratios[k] + 1e-9
                cand_rows = rows[tie]
                if degen_run < 40:
                    k2 = cand_rows[int(np.argmax(np.abs(move[cand_rows])))]
                else:
                    k2 = cand_rows[int(np.argmin(basis[cand_rows]))]
                t_dec = float(np.maximum(xB[k2], 0.0) / move[k2])
                if t_dec < t_best - 1e-12:
                    t_best, r, leave_at_upper = t_dec, int(k2), False
            if inc.any():
                ub = U[basis]
                rows = np.flatnonzero(inc & np.isfinite(ub))
                if rows.size:
                    gaps = np.maximum(ub[rows] - xB[rows], 0.0)
                    ratios = gaps / (-move[rows])
                    k = int(np.argmin(ratios))
                    tie = ratios <= ratios[k] + 1e-9
                    cand_rows = rows[tie]
                    if degen_run < 40:
                        k2 = cand_rows[int(np.argmax(np.abs(move[cand_rows])))]
                    else:
                        k2 = cand_rows[int(np.argmin(basis[cand_rows]))]
                    t_inc = float(
                        np.maximum(U[basis[k2]] - xB[k2], 0.0) / (-move[k2])
                    )
                    if t_inc < t_best - 1e-12:
                        t_best, r, leave_at_upper = t_inc, int(k2), True
            if not np.isfinite(t_best):
                if phase == 1:
                    return LpResult(status=LpStatus.NUMERICAL_FAILURE, iterations=iters)
                return LpResult(status=LpStatus.UNBOUNDED, iterations=iters)

            iters += 1
            degen_run = degen_run + 1 if t_best <= 1e-11 else 0
            if r < 0:
                # bound-to-bound move: the entering variable flips sides
                xB -= move * t_best
                at_upper[q] = ~at_upper[q]
                continue

            p_col = int(basis[r])
            xB -= move * t_best
            xB[r] = (U[q] if at_upper[q] else 0.0) + delta * t_best
            piv = Tab[r, q]
            Tab[r] = Tab[r] / piv
            colq = Tab[:, q].copy()
            colq[r] = 0.0
            Tab -= np.outer(colq, Tab[r])
            redI = redI - redI[q] * Tab[r]
            redII = redII - redII[q] * Tab[r]
            red = redI if phase == 1 else redII
            basis[r] = q
            basic_mask[q] = True
            basic_mask[p_col] = False
            at_upper[q] = False
            at_upper[p_col] = leave_at_upper and np.isfinite(U[p_col])

        if phase == 1 and _infeasibility() > tol_feas * scale:
            return LpResult(status=LpStatus.INFEASIBLE, iterations=iters)

    # ---- exact extraction from the final basis ------------------------------
    x_int = np.where(at_upper & np.isfinite(U), U, 0.0)
    x_int[basis] = 0.0
    B = Aint[:, basis]
    rhs_eff = rhs_int - Aint @ x_int
    try:
        xB_exact = np.linalg.solve(B, rhs_eff)
        y_int = np.linalg.solve(B.T, c_int[basis])
    except np.linalg.LinAlgError:
        xB_exact, *_ = np.linalg.lstsq(B, rhs_eff, rcond=None)
        y_int, *_ = np.linalg.lstsq(B.T, c_int[basis], rcond=None)
    x_int[basis] = xB_exact

    x = shifts.copy()
    for k in range(n_struct):
        x[col_var[k]] += col_sign[k] * x_int[k]
    objective = float(prob.c @ x)

    reduced = c_int - y_int @ Aint
    up_mask = at_upper & np.isfinite(U) & ~basic_mask
    dual_objective = float(y_int @ rhs_int + reduced[up_mask] @ U[up_mask]) + obj_const
    duals = np.where(flip, -y_int, y_int)

    # honesty checks: only report OPTIMAL when the claimed certificate holds
    resid = float(np.max(np.abs(Aint @ x_int - rhs_int))) if m else 0.0
    lo_viol = float(np.max(-x_int, initial=0.0))
    up_viol = float(np.max((x_int - U)[np.isfinite(U)], initial=0.0))
    gap = abs(objective - dual_objective)
    if (
        resid > tol_feas * scale * 10
        or lo_viol > tol_feas * scale * 10
        or up_viol > tol_feas * scale * 10
        or gap > 1e-6 * (1.0 + abs(objective))
    ):
        return LpResult(status=LpStatus.NUMERICAL_FAILURE, iterations=iters)

    return LpResult(
        status=LpStatus.OPTIMAL,
        x=x,
        objective=objective,
        duals=duals,
        dual_objective=dual_objective,
        iterations=iters,
    )


# ===========================================================================
# distance objectives
# ===========================================================================

class Norm(str, Enum):
    L1 = "l1"
    LINF = "linf"


class Agg(str, Enum):
    SUM = "sum"
    MAX = "max"


@dataclass(frozen=True)
class DistanceSpec:
    """Which norm measures one residual and how residuals aggregate over K."""

    norm: Norm = Norm.L1
    agg: Agg = Agg.SUM

    def __post_init__(self):
        object.__setattr__(self, "norm", Norm(self.norm))
        object.__setattr__(self, "agg", Agg(self.agg))

    def evaluate(self, X, z):
        """Exact distance between the point z and the observation matrix X."""
        E = np.abs(np.asarray(X, float) - np.asarray(z, float))
        per_obs = E.sum(axis=1) if self.norm is Norm.L1 else E.max(axis=1)
        return float(per_obs.sum() if self.agg is Agg.SUM else per_obs.max())

    @property
    def label(self):
        return f"{self.norm.value}-{self.agg.value}"


@dataclass(frozen=True)
class DistanceFragment:
    """Epigraph encoding of a distance objective, ready to splice into an LP.

    Decision variables are ``[z (n), aux (n_aux)]``; every row is a GE row
    ``rows_z . z + rows_aux . aux >= rhs``; aux variables live in [0, inf)
    and carry the whole objective.
    """

    n: int
    K: int
    n_aux: int
    rows_z: np.ndarray
    rows_aux: np.ndarray
    rhs: np.ndarray
    obj_aux: np.ndarray
    spec: DistanceSpec


def build_distance_objective(obs, spec):
    """Linearise the distance from z to the observation set as LP rows.

    L1 residuals get one auxiliary per (observation, coordinate) with the
    classic pair of rows ``t >= +-(x - z)``; max-aggregation adds a single
    epigraph variable on top.  LINF residuals need one auxiliary per
    observation (or a single one for max-of-max).
    """
    X = obs.X
    K, n = X.shape
    spec = DistanceSpec(spec.norm, spec.agg)
    rows_z, rows_aux, rhs = [], [], []

    def pair_rows(aux_index, n_aux, k, i):
        rz = np.zeros(n)
        rz[i] = 1.0
        ra = np.zeros(n_aux)
        ra[aux_index] = 1.0
        rows_z.append(rz)
        rows_aux.append(ra)
        rhs.append(X[k, i])
        rows_z.append(-rz)
        rows_aux.append(ra)
        rhs.append(-X[k, i])

    if spec.norm is Norm.L1:
        n_t = K * n
        n_aux = n_t if spec.agg is Agg.SUM else n_t + 1
        for k in range(K):
            for i in range(n):
                pair_rows(k * n + i, n_aux, k, i)
        if spec.agg is Agg.SUM:
            obj = np.ones(n_t)
        else:
            # s >= sum_i t_{k,i} for every k; objective is s alone
            for k in range(K):
                ra = np.zeros(n_aux)
                ra[n_t] = 1.0
                ra[k * n : (k + 1) * n] = -1.0
                rows_z.append(np.zeros(n))
                rows_aux.append(ra)
                rhs.append(0.0)
            obj = np.zeros(n_aux)
            obj[n_t] = 1.0
    else:
        n_aux = K if spec.agg is Agg.SUM else 1
        for k in range(K):
            a = k if spec.agg is Agg.SUM else 0
            for i in range(n):
                pair_rows(a, n_aux, k, i)
        obj = np.ones(n_aux) if spec.agg is Agg.SUM else np.ones(1)

    return DistanceFragment(
        n=n,
        K=K,
        n_aux=n_aux,
        rows_z=np.asarray(rows_z),
        rows_aux=np.asarray(rows_aux),
        rhs=np.asarray(rhs),
        obj_aux=obj,
        spec=spec,
    )


# ===========================================================================
# polyhedral helpers over forward instances
# ===========================================================================

def region_rows(inst, fold_singleton_trivial=True):
    """Canonical GE rows of the region, optionally folding trivial
    singleton rows (box constraints) into variable bounds.

    Returns ``(A, b, lower, upper)``.  Relevant rows are never folded:
    the inverse solvers must be able to force any of them to equality.
    """
    n = inst.n
    lower = np.full(n, -_INF)
    upper = np.full(n, _INF)
    rows, rhs = [inst.A], [inst.b]
    if inst.m2:
        if fold_singleton_trivial:
            keep = []
            for i in range(inst.m2):
                row = inst.W[i]
                nz = np.flatnonzero(row)
                if nz.size == 1:
                    j = int(nz[0])
                    a = row[j]
                    bnd = inst.q[i] / a
                    if a > 0:
                        lower[j] = max(lower[j], bnd)
                    else:
                        upper[j] = min(upper[j], bnd)
                else:
                    keep.append(i)
            if keep:
                rows.append(inst.W[keep])
                rhs.append(inst.q[keep])
        else:
            rows.append(inst.W)
            rhs.append(inst.q)
    A = np.vstack(rows)
    b = np.concatenate(rhs)
    return A, b, lower, upper


def compute_bigM(inst, j, big_m_default=1e6):
    """Largest possible slack of relevant row j over the region.

    This is the tight per-row constant for a big-M binding formulation.
    Unbounded slack falls back to ``big_m_default`` with a warning;
    an empty region raises INFEASIBLE_REGION.
    """
    A, b, lower, upper = region_rows(inst)
    res = solve_lp(
        LpProblem(
            c=-inst.A[j],
            A=A,
            senses=np.full(A.shape[0], GE),
            rhs=b,
            lower=lower,
            upper=upper,
        )
    )
    if res.status == LpStatus.INFEASIBLE:
        raise InfeasibleRegionError("cannot size big-M over an empty region")
    if res.status == LpStatus.UNBOUNDED:
        _warnings.warn(
            f"slack of relevant row {j} is unbounded; using default big-M "
            f"{big_m_default:g}",
            RuntimeWarning,
            stacklevel=2,
        )
        return float(big_m_default)
    if res.status != LpStatus.OPTIMAL:
        raise InfeasibleRegionError(f"big-M sizing LP failed: {res.status}")
    return float(-res.objective - inst.b[j])


def vertex_enumeration_oracle(inst, tol=1e-7, max_vars=4, max_rows=20):
    """All vertices of the region by brute-force row-subset enumeration.

    Deliberately guarded (n <= 4, total rows <= 20): this exists as an
    independent cross-check for the simplex and the inverse solvers, not as
    a production path.  Raises TOO_LARGE beyond the guard.
    """
    n = inst.n
    A = np.vstack([inst.A, inst.W]) if inst.m2 else inst.A
    b = np.concatenate([inst.b, inst.q]) if inst.m2 else inst.b
    m = A.shape[0]
    if n > max_vars or m > max_rows:
        raise TooLargeError(
            f"vertex enumeration guarded to n <= {max_vars}, rows <= {max_rows} "
            f"(got n={n}, rows={m})"
        )
    vertices = []
    for subset in itertools.combinations(range(m), n):
        sub = A[list(subset)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        v = np.linalg.solve(sub, b[list(subset)])
        if np.min(A @ v - b) >= -tol:
            if not any(np.max(np.abs(v - w)) <= tol for w in vertices):
                vertices.append(v)
    vertices.sort(key=lambda v: tuple(v))
    return vertices
