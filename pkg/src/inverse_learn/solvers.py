"""Inverse solvers: recover plausible optimal decisions from observations.

Given a forward region and K observed decisions, these solvers find the
*learning point* z — a point on the region's boundary minimising a chosen
distance to the observations — under a binding-cardinality control p:

* ``solve_bil``      project onto one chosen relevant boundary (an LP);
* ``algorithm1``     sweep every relevant boundary, keep the closest result;
* ``solve_il``       require exactly p relevant rows to bind;
* ``solve_mil``      same, but trade distance against binding *preferred* rows;
* ``sequence_dependent``  grow a previous binding set by one row;
* ``sweep``          frontier of solutions over a whole range of p.

The cardinality-p selection is solved by exact subset enumeration whenever
C(m1, p) fits the enumeration budget, and otherwise by a depth-first
branch-and-bound whose bound is the cardinality-free LP relaxation with the
already-chosen rows forced to equality.  Forcing a subset to equality is
equivalent to the big-M binding formulation whenever each M_j is at least
the row's maximum slack over the region, which is exactly how `compute_bigM`
sizes them; the enumeration path therefore never needs numeric M values.

Ties between subsets with equal objective break lexicographically, so every
solver is deterministic.
"""
from __future__ import annotations

import itertools
import math
import warnings as _warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import lp
from .errors import (
    AllInfeasibleError,
    MalformedError,
    NoPreferredError,
    NumericalFailureError,
)
from .model import TAU_TIGHT

OK = "OK"
INFEASIBLE_AT_P = "INFEASIBLE_AT_P"
TERMINATED = "TERMINATED"


@dataclass(frozen=True)
class SolverOptions:
    """Tuning knobs shared by all inverse solvers."""

    enum_budget: int = 100_000
    big_m_default: float = 1e6
    tol_feas: float = 1e-7
    tau_tight: float = TAU_TIGHT


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class InverseSolution:
    """One solved learning point (or the reason there is none).

    ``v`` is the 0/1 selection over relevant rows (which rows were *forced*
    to bind), ``tight`` the rows actually tight at z (a superset of the
    selection when the point is degenerate), ``eps`` the per-observation
    residuals ``x^k - z`` stacked as rows.
    """

    method: str
    p: int
    status: str
    spec: lp.DistanceSpec
    variables: tuple
    relevant_names: tuple
    v: np.ndarray
    z: np.ndarray | None = None
    distance: float | None = None
    tight: tuple = ()
    eps: np.ndarray | None = None
    preferred_bound_count: int = 0
    score: float | None = None
    big_m: np.ndarray | None = None

    @property
    def selected(self):
        """Indices of relevant rows chosen to bind."""
        return tuple(int(j) for j in np.flatnonzero(self.v))

    @property
    def binding_names(self):
        return tuple(self.relevant_names[j] for j in self.selected)

    @property
    def tight_names(self):
        return tuple(self.relevant_names[j] for j in self.tight)

    def to_dict(self):
        return {
            "method": self.method,
            "p": self.p,
            "z": None if self.z is None else [float(v) for v in self.z],
            "binding": list(self.binding_names),
            "tight": list(self.tight_names),
            "distance": None if self.distance is None else float(self.distance),
            "preferred_bound_count": int(self.preferred_bound_count),
            "per_observation_eps": None
            if self.eps is None
            else [[float(v) for v in row] for row in self.eps],
            "status": self.status,
        }


@dataclass
class FrontierPoint:
    p: int
    status: str
    solution: InverseSolution | None

    def to_dict(self):
        return {
            "p": self.p,
            "status": self.status,
            "solution": None if self.solution is None else self.solution.to_dict(),
        }


@dataclass
class Frontier:
    mode: str
    points: list = field(default_factory=list)
    mil_weights: tuple | None = None

    def to_dict(self):
        return {
            "mode": self.mode,
            "mil_weights": None
            if self.mil_weights is None
            else [float(w) for w in self.mil_weights],
            "points": [pt.to_dict() for pt in self.points],
        }


# ---------------------------------------------------------------------------
# LP assembly
# ---------------------------------------------------------------------------

def _assemble(inst, frag, eq_rows=()):
    """LP over [z, aux]: region rows (chosen ones as equalities) + fragment."""
    n = inst.n
    A_r, b_r, z_lo, z_hi = lp.region_rows(inst)
    m_r = A_r.shape[0]
    senses = np.full(m_r, lp.GE)
    for j in eq_rows:
        senses[j] = lp.EQ  # relevant rows always come first in region_rows
    n_aux = frag.n_aux
    A = np.vstack(
        [
            np.hstack([A_r, np.zeros((m_r, n_aux))]),
            np.hstack([frag.rows_z, frag.rows_aux]),
        ]
    )
    return lp.LpProblem(
        c=np.concatenate([np.zeros(n), frag.obj_aux]),
        A=A,
        senses=np.concatenate([senses, np.full(frag.rhs.size, lp.GE)]),
        rhs=np.concatenate([b_r, frag.rhs]),
        lower=np.concatenate([z_lo, np.zeros(n_aux)]),
        upper=np.concatenate([z_hi, np.full(n_aux, np.inf)]),
    )


def _project(inst, obs, frag, subset, opts):
    """Min-distance point with the given rows forced tight.

    Returns ``(distance, z)`` with the distance recomputed exactly from the
    observations, or None when the forced face misses the region.
    """
    res = lp.solve_lp(_assemble(inst, frag, eq_rows=subset))
    if res.status == lp.LpStatus.INFEASIBLE:
        return None
    if res.status != lp.LpStatus.OPTIMAL:
        raise NumericalFailureError(
            f"projection LP ended with status {res.status} for rows {subset}"
        )
    z = res.x[: inst.n]
    dist = frag.spec.evaluate(obs.X, z)
    if abs(dist - res.objective) > 1e-6 * (1.0 + abs(dist)):
        raise NumericalFailureError(
            f"LP optimum {res.objective} disagrees with recomputed distance {dist}"
        )
    return dist, z


def _make_solution(inst, obs, spec, method, p, subset, dist, z, opts, score=None):
    v = np.zeros(inst.m1, dtype=int)
    v[list(subset)] = 1
    slacks = inst.slacks(z)
    for j in subset:
        if slacks[j] > opts.tau_tight:
            raise NumericalFailureError(
                f"row {inst.relevant_names[j]!r} selected to bind but has slack {slacks[j]:.3g}"
            )
    S = set(inst.S)
    return InverseSolution(
        method=method,
        p=p,
        status=OK,
        spec=spec,
        variables=tuple(inst.variables),
        relevant_names=inst.relevant_names,
        v=v,
        z=z,
        distance=float(dist),
        tight=inst.tight_relevant(z, opts.tau_tight),
        eps=obs.X - z,
        preferred_bound_count=len(S.intersection(subset)),
        score=score,
    )


def _empty_solution(inst, spec, method, p, status, forced=()):
    v = np.zeros(inst.m1, dtype=int)
    v[list(forced)] = 1
    return InverseSolution(
        method=method,
        p=p,
        status=status,
        spec=spec,
        variables=tuple(inst.variables),
        relevant_names=inst.relevant_names,
        v=v,
    )


def _require_solvable(inst, obs):
    if inst.m1 == 0:
        raise MalformedError("instance has no relevant constraints")
    if obs.K == 0:
        raise MalformedError("need at least one observation")
    if obs.n != inst.n:
        raise MalformedError(
            f"observations have {obs.n} columns, instance has {inst.n} variables"
        )


# ---------------------------------------------------------------------------
# single-boundary projection and the sweep over all boundaries
# ---------------------------------------------------------------------------

def solve_bil(inst, obs, spec, j, opts=DEFAULT_OPTIONS):
    """Closest point to the observations on relevant boundary j.

    Status INFEASIBLE_AT_P when that hyperplane misses the region.
    """
    _require_solvable(inst, obs)
    if not 0 <= j < inst.m1:
        raise MalformedError(f"relevant row index {j} out of range [0, {inst.m1})")
    frag = lp.build_distance_objective(obs, spec)
    hit = _project(inst, obs, frag, (j,), opts)
    if hit is None:
        return _empty_solution(inst, spec, "bil", 1, INFEASIBLE_AT_P, forced=(j,))
    dist, z = hit
    return _make_solution(inst, obs, spec, "bil", 1, (j,), dist, z, opts)


def algorithm1(inst, obs, spec, opts=DEFAULT_OPTIONS):
    """Project onto every relevant boundary and keep the closest point.

    The strict ``<`` comparison means earlier rows win ties, so the result
    is deterministic.  Raises ALL_INFEASIBLE when no boundary touches the
    region (impossible for a non-degenerate bounded region, but guarded).
    """
    _require_solvable(inst, obs)
    frag = lp.build_distance_objective(obs, spec)
    best = None
    for j in range(inst.m1):
        hit = _project(inst, obs, frag, (j,), opts)
        if hit is None:
            continue
        dist, z = hit
        if best is None or dist < best[0] - 1e-12:
            best = (dist, j, z)
    if best is None:
        raise AllInfeasibleError("no relevant boundary intersects the region")
    dist, j, z = best
    return _make_solution(inst, obs, spec, "alg1", 1, (j,), dist, z, opts)


# ---------------------------------------------------------------------------
# cardinality-p selection: enumeration and branch-and-bound
# ---------------------------------------------------------------------------

def _mil_score(dist, n_pref, weights, K, s_size):
    w1, w2 = weights
    return (w1 / K) * dist - (w2 / s_size) * n_pref


def _search_subsets(inst, obs, spec, p, opts, forced=(), weights=None):
    """Best p-subset of relevant rows by (score, lexicographic subset).

    ``forced`` rows are always part of the subset.  With ``weights`` the
    score is the preference-aware objective, otherwise plain distance.
    Returns ``(subset, dist, z, score)`` or None when every subset misses
    the region.
    """
    m1 = inst.m1
    forced = tuple(sorted(forced))
    free = [j for j in range(m1) if j not in set(forced)]
    extra = p - len(forced)
    if extra < 0 or extra > len(free):
        return None
    frag = lp.build_distance_objective(obs, spec)
    K = obs.K
    S = set(inst.S)
    s_size = max(len(S), 1)

    def score_of(subset, dist):
        if weights is None:
            return dist
        return _mil_score(dist, len(S.intersection(subset)), weights, K, s_size)

    best = None  # (score, subset, dist, z)

    def consider(subset, dist, z):
        nonlocal best
        sc = score_of(subset, dist)
        if best is None or sc < best[0] - 1e-9 or (
            sc <= best[0] + 1e-9 and subset < best[1]
        ):
            best = (sc, subset, dist, z)

    if math.comb(len(free), extra) <= opts.enum_budget:
        for combo in itertools.combinations(free, extra):
            subset = tuple(sorted(forced + combo))
            hit = _project(inst, obs, frag, subset, opts)
            if hit is None:
                continue
            consider(subset, *hit)
    else:
        # DFS over include/exclude decisions in index order; the bound is the
        # cardinality-free projection with the included rows forced tight.
        def bound_score(included, start):
            hit = _project(inst, obs, frag, tuple(sorted(forced + included)), opts)
            if hit is None:
                return None, None
            dist, z = hit
            if weights is None:
                return dist, (dist, z)
            undecided = free[start:]
            max_pref = len(S.intersection(forced + included)) + min(
                extra - len(included), len(S.intersection(undecided))
            )
            return _mil_score(dist, max_pref, weights, K, s_size), (dist, z)

        def dfs(start, included):
            nonlocal best
            if len(included) == extra:
                subset = tuple(sorted(forced + included))
                hit = _project(inst, obs, frag, subset, opts)
                if hit is not None:
                    consider(subset, *hit)
                return
            if extra - len(included) > len(free) - start:
                return
            bnd, _ = bound_score(included, start)
            if bnd is None:
                return
            if best is not None and bnd >= best[0] - 1e-9:
                return
            dfs(start + 1, included + (free[start],))
            dfs(start + 1, included)

        dfs(0, ())

    if best is None:
        return None
    sc, subset, dist, z = best
    return subset, dist, z, sc


def solve_il(inst, obs, spec, p, opts=DEFAULT_OPTIONS):
    """Learning point with exactly p relevant rows forced to bind.

    p = 1 is answered by `algorithm1` (identical by construction and
    cheaper).  Status INFEASIBLE_AT_P when no p rows can bind together.
    """
    _require_solvable(inst, obs)
    if p < 1:
        raise MalformedError(f"binding cardinality p must be >= 1, got {p}")
    if p == 1:
        try:
            return replace(algorithm1(inst, obs, spec, opts), method="il")
        except AllInfeasibleError:
            # no relevant boundary meets the region <=> no point binds 1 row
            return _empty_solution(inst, spec, "il", 1, INFEASIBLE_AT_P)
    found = _search_subsets(inst, obs, spec, p, opts)
    if found is None:
        return _empty_solution(inst, spec, "il", p, INFEASIBLE_AT_P)
    subset, dist, z, _ = found
    return _make_solution(inst, obs, spec, "il", p, subset, dist, z, opts)


def solve_mil(inst, obs, spec, p, omega1=1.0, omega2=1.0, opts=DEFAULT_OPTIONS):
    """Like `solve_il` but rewards binding *preferred* rows.

    Minimises ``(omega1/K) * distance - (omega2/|S|) * (# preferred rows
    selected)`` over all p-subsets.  ``distance`` on the result is still the
    plain distance; the traded-off objective lands in ``score``.
    """
    _require_solvable(inst, obs)
    if p < 1:
        raise MalformedError(f"binding cardinality p must be >= 1, got {p}")
    if omega1 < 0 or omega2 < 0 or (omega1 == 0 and omega2 == 0):
        raise MalformedError("weights must be nonnegative and not both zero")
    if not inst.S:
        raise NoPreferredError("instance marks no preferred constraints")
    if len(inst.S) > p:
        _warnings.warn(
            f"instance marks {len(inst.S)} preferred rows but only p={p} can bind",
            RuntimeWarning,
            stacklevel=2,
        )
    found = _search_subsets(inst, obs, spec, p, opts, weights=(omega1, omega2))
    if found is None:
        return _empty_solution(inst, spec, "mil", p, INFEASIBLE_AT_P)
    subset, dist, z, score = found
    return _make_solution(
        inst, obs, spec, "mil", p, subset, dist, z, opts, score=float(score)
    )


def sequence_dependent(inst, obs, spec, start, opts=DEFAULT_OPTIONS, weights=None):
    """Grow the binding set of a previous solution by exactly one row.

    The rows already selected in ``start`` stay forced, so successive
    solutions share the face the earlier ones defined and distances never
    decrease along a chain.  Status TERMINATED when no additional row can
    bind together with the inherited set.
    """
    _require_solvable(inst, obs)
    if start.status != OK or start.z is None:
        raise MalformedError("sequencing needs a successfully solved start point")
    forced = start.selected
    p = len(forced) + 1
    found = (
        _search_subsets(inst, obs, spec, p, opts, forced=forced, weights=weights)
        if p <= inst.m1
        else None
    )
    if found is None:
        return _empty_solution(inst, spec, "seq", p, TERMINATED, forced=forced)
    subset, dist, z, score = found
    return _make_solution(
        inst,
        obs,
        spec,
        "seq",
        p,
        subset,
        dist,
        z,
        opts,
        score=None if weights is None else float(score),
    )


INDEPENDENT = "independent"
DEPENDENT = "dependent"


def sweep(
    inst,
    obs,
    spec,
    p_min,
    p_max,
    mode=INDEPENDENT,
    mil_weights=None,
    opts=DEFAULT_OPTIONS,
):
    """Solve across a range of binding cardinalities and collect a frontier.

    INDEPENDENT solves each p from scratch (`solve_il`, or `solve_mil` when
    weights are given).  DEPENDENT solves p_min from scratch and then chains
    `sequence_dependent`, keeping each previous binding set; once a step
    TERMINATEs, the remaining cardinalities are recorded as TERMINATED too.
    """
    if p_min < 1 or p_max < p_min:
        raise MalformedError(f"bad cardinality range [{p_min}, {p_max}]")
    if mode not in (INDEPENDENT, DEPENDENT):
        raise MalformedError(f"unknown sweep mode {mode!r}")
    frontier = Frontier(mode=mode, mil_weights=mil_weights)

    def solve_at(p):
        if mil_weights is None:
            return solve_il(inst, obs, spec, p, opts)
        return solve_mil(inst, obs, spec, p, mil_weights[0], mil_weights[1], opts)

    if mode == INDEPENDENT:
        for p in range(p_min, p_max + 1):
            sol = solve_at(p)
            frontier.points.append(FrontierPoint(p, sol.status, sol))
        return frontier

    current = solve_at(p_min)
    frontier.points.append(FrontierPoint(p_min, current.status, current))
    for p in range(p_min + 1, p_max + 1):
        if current.status != OK:
            frontier.points.append(FrontierPoint(p, TERMINATED, None))
            continue
        nxt = sequence_dependent(inst, obs, spec, current, opts, weights=mil_weights)
        frontier.points.append(FrontierPoint(p, nxt.status, nxt))
        current = nxt
    return frontier


def solve_seq(inst, obs, spec, p, opts=DEFAULT_OPTIONS, weights=None):
    """Dependent chain from p = 1 up to ``p``; returns the final step reached.

    When the chain breaks early the returned solution carries status
    TERMINATED and its ``p`` names the cardinality that failed.
    """
    frontier = sweep(inst, obs, spec, 1, p, DEPENDENT, weights, opts)
    for pt in reversed(frontier.points):
        if pt.solution is not None:
            return pt.solution
    raise AllInfeasibleError("dependent chain produced no step at all")  # pragma: no cover
