"""Forward-problem data model: constraints, instances, observations.

The forward problem is ``max c'x`` over a polyhedron split into *relevant*
rows (the ones an analyst considers binding-worthy and wants explained) and
*trivial* rows (bookkeeping such as nonnegativity and serving caps).  All
row arithmetic is done in a canonical GE storage: a user row
``coeffs . x <= rhs`` is stored as ``-coeffs . x >= -rhs``, so the slack of
row j at x is always ``s_j(x) = A_j x - b_j >= 0`` and the *outward* normal
of the row is ``n_j = -A_j`` (equivalently: ``coeffs`` for a <= row and
``-coeffs`` for a >= row).  A point maximises some ``c != 0`` over the region
exactly when c lies in the cone spanned by the outward normals of its tight
rows; that equivalence is what `check_learning_point` decides.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    EmptySetError,
    InfeasibleRegionError,
    MalformedError,
    ZeroCostError,
)
from .nnls import nnls

#: tightness tolerance on canonical slacks, used everywhere a tight set is read
TAU_TIGHT = 1e-7

#: feasibility tolerance on canonical slacks
TOL_FEAS = 1e-7


class Sense(str, Enum):
    LE = "<="
    GE = ">="


class Kind(str, Enum):
    RELEVANT = "relevant"
    TRIVIAL = "trivial"


@dataclass(frozen=True)
class LinearConstraint:
    """One inequality row ``coeffs . x (<=|>=) rhs``.

    ``preferred`` marks a relevant row the analyst would like to see binding;
    it is meaningless (and rejected) on trivial rows.
    """

    name: str
    coeffs: np.ndarray
    sense: Sense
    rhs: float
    kind: Kind = Kind.RELEVANT
    preferred: bool = False

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise MalformedError(f"constraint {self.name!r}: coeffs must be a 1-d vector")
        if not np.all(np.isfinite(coeffs)) or not np.isfinite(self.rhs):
            raise MalformedError(f"constraint {self.name!r}: non-finite data")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "sense", Sense(self.sense))
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "rhs", float(self.rhs))
        if self.preferred and self.kind is not Kind.RELEVANT:
            raise MalformedError(
                f"constraint {self.name!r}: preferred flag on a trivial row"
            )

    # canonical GE storage -------------------------------------------------
    @property
    def canonical_coeffs(self):
        return self.coeffs if self.sense is Sense.GE else -self.coeffs

    @property
    def canonical_rhs(self):
        return self.rhs if self.sense is Sense.GE else -self.rhs

    @property
    def outward_normal(self):
        """Normal pointing out of the feasible half-space."""
        return -self.canonical_coeffs

    def slack(self, x):
        """Canonical slack ``s(x) >= 0`` iff x satisfies the row."""
        return float(self.canonical_coeffs @ np.asarray(x, dtype=float) - self.canonical_rhs)

    def to_dict(self):
        return {
            "name": self.name,
            "coeffs": [float(v) for v in self.coeffs],
            "sense": self.sense.value,
            "rhs": self.rhs,
            "kind": self.kind.value,
            "preferred": self.preferred,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(
                name=str(d["name"]),
                coeffs=np.asarray(d["coeffs"], dtype=float),
                sense=Sense(d["sense"]),
                rhs=float(d["rhs"]),
                kind=Kind(d.get("kind", "relevant")),
                preferred=bool(d.get("preferred", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedError(f"bad constraint record: {exc}") from exc


@dataclass(frozen=True)
class ForwardInstance:
    """A named forward LP: variables plus relevant and trivial rows.

    Derived canonical arrays are cached at construction:

    * ``A, b``   relevant rows in GE form (m1 x n)
    * ``W, q``   trivial rows in GE form (m2 x n)
    * ``normals``  outward normals of the relevant rows (= -A)
    * ``S``      indices (into the relevant rows) of preferred rows
    """

    variables: tuple
    constraints: tuple
    name: str = "instance"

    def __post_init__(self):
        variables = tuple(str(v) for v in self.variables)
        constraints = tuple(self.constraints)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "constraints", constraints)
        n = len(variables)
        if n == 0:
            raise MalformedError("instance has no variables")
        for row in constraints:
            if row.coeffs.size != n:
                raise MalformedError(
                    f"constraint {row.name!r} has {row.coeffs.size} coefficients, expected {n}"
                )
        names = [r.name for r in constraints]
        if len(set(names)) != len(names):
            dupes = sorted({x for x in names if names.count(x) > 1})
            raise MalformedError(f"duplicate constraint names: {dupes}")
        rel = tuple(r for r in constraints if r.kind is Kind.RELEVANT)
        trv = tuple(r for r in constraints if r.kind is Kind.TRIVIAL)
        object.__setattr__(self, "_relevant", rel)
        object.__setattr__(self, "_trivial", trv)

        def stack(rows):
            if rows:
                mat = np.vstack([r.canonical_coeffs for r in rows])
                rhs = np.array([r.canonical_rhs for r in rows])
            else:
                mat = np.zeros((0, n))
                rhs = np.zeros(0)
            mat.flags.writeable = False
            rhs.flags.writeable = False
            return mat, rhs

        A, b = stack(rel)
        W, q = stack(trv)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "q", q)
        normals = -A
        normals.flags.writeable = False
        object.__setattr__(self, "normals", normals)
        object.__setattr__(
            self, "S", tuple(j for j, r in enumerate(rel) if r.preferred)
        )

    # --- basic shape ------------------------------------------------------
    @property
    def n(self):
        return len(self.variables)

    @property
    def m1(self):
        return len(self._relevant)

    @property
    def m2(self):
        return len(self._trivial)

    @property
    def relevant(self):
        return self._relevant

    @property
    def trivial(self):
        return self._trivial

    @property
    def relevant_names(self):
        return tuple(r.name for r in self._relevant)

    # --- row arithmetic ----------------------------------------------------
    def slacks(self, x):
        """Canonical slacks of the relevant rows at x (shape (m1,))."""
        return self.A @ np.asarray(x, dtype=float) - self.b

    def trivial_slacks(self, x):
        return self.W @ np.asarray(x, dtype=float) - self.q

    def is_feasible(self, x, tol=TOL_FEAS):
        s = self.slacks(x)
        t = self.trivial_slacks(x)
        return bool(
            (s.size == 0 or s.min() >= -tol) and (t.size == 0 or t.min() >= -tol)
        )

    def tight_relevant(self, x, tau=TAU_TIGHT):
        """Indices of relevant rows tight at x (slack <= tau)."""
        s = self.slacks(x)
        return tuple(int(j) for j in np.flatnonzero(s <= tau))

    def tight_trivial(self, x, tau=TAU_TIGHT):
        t = self.trivial_slacks(x)
        return tuple(int(j) for j in np.flatnonzero(t <= tau))

    def with_preferred(self, names):
        """Copy of the instance with the preferred set replaced by `names`."""
        names = set(names)
        known = {r.name for r in self._relevant}
        unknown = names - known
        if unknown:
            raise MalformedError(
                f"preferred rows not among relevant constraints: {sorted(unknown)}"
            )
        rows = tuple(
            LinearConstraint(
                name=r.name,
                coeffs=r.coeffs,
                sense=r.sense,
                rhs=r.rhs,
                kind=r.kind,
                preferred=(r.kind is Kind.RELEVANT and r.name in names),
            )
            for r in self.constraints
        )
        return ForwardInstance(self.variables, rows, name=self.name)

    # --- serialization ------------------------------------------------------
    def to_dict(self):
        return {
            "name": self.name,
            "variables": list(self.variables),
            "constraints": [r.to_dict() for r in self.constraints],
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "variables" not in d or "constraints" not in d:
            raise MalformedError("instance JSON needs 'variables' and 'constraints'")
        rows = tuple(LinearConstraint.from_dict(r) for r in d["constraints"])
        return cls(
            variables=tuple(d["variables"]),
            constraints=rows,
            name=str(d.get("name", "instance")),
        )

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedError(f"instance JSON does not parse: {exc}") from exc
        return cls.from_dict(d)


@dataclass(frozen=True)
class ObservationSet:
    """K observed decision vectors, one row each, columns = variables."""

    X: np.ndarray
    variables: tuple = ()

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2:
            raise MalformedError("observations must form a K x n matrix")
        if not np.all(np.isfinite(X)):
            raise MalformedError("observations contain non-finite values")
        X = X.copy()
        X.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "variables", tuple(str(v) for v in self.variables))

    @property
    def K(self):
        return self.X.shape[0]

    @property
    def n(self):
        return self.X.shape[1]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = list(self.variables) if self.variables else [
            f"x{i + 1}" for i in range(self.n)
        ]
        writer.writerow(header)
        for row in self.X:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        try:
            rows = list(csv.reader(io.StringIO(text)))
        except csv.Error as exc:
            raise MalformedError(f"observations CSV does not parse: {exc}") from exc
        rows = [r for r in rows if r and any(cell.strip() for cell in r)]
        if not rows:
            raise MalformedError("observations CSV has no header row")
        header = [h.strip() for h in rows[0]]
        data = []
        for lineno, r in enumerate(rows[1:], start=2):
            if len(r) != len(header):
                raise MalformedError(
                    f"observations CSV line {lineno}: expected {len(header)} cells"
                )
            try:
                data.append([float(v) for v in r])
            except ValueError as exc:
                raise MalformedError(
                    f"observations CSV line {lineno}: {exc}"
                ) from exc
        X = np.array(data, dtype=float).reshape(len(data), len(header))
        return cls(X=X, variables=tuple(header))

    def require_match(self, inst):
        """Raise unless these observations fit `inst` (dimension and names)."""
        if self.n != inst.n:
            raise MalformedError(
                f"observations have {self.n} columns, instance has {inst.n} variables"
            )
        if self.variables and tuple(self.variables) != tuple(inst.variables):
            raise MalformedError(
                "observation columns do not match instance variables: "
                f"{list(self.variables)} vs {list(inst.variables)}"
            )


@dataclass(frozen=True)
class OptimalityCertificate:
    """Multipliers proving ``x`` maximises ``c`` over the region.

    ``c = sum_j y_j n_j`` with y >= 0 supported on the tight relevant rows
    (u is the trivial-row block, all zeros by construction here), with c
    normalised to unit Euclidean length.
    """

    c: np.ndarray
    y: np.ndarray
    u: np.ndarray
    norm: str = "l2"

    def __post_init__(self):
        for name in ("c", "y", "u"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def to_dict(self):
        return {
            "c": [float(v) for v in self.c],
            "y": [float(v) for v in self.y],
            "u": [float(v) for v in self.u],
            "norm": self.norm,
        }


@dataclass
class ValidationReport:
    feasible: bool
    m1: int
    m2: int
    preferred: list
    warnings: list = field(default_factory=list)
    feasible_point: np.ndarray | None = None

    def to_dict(self):
        return {
            "feasible": self.feasible,
            "m1": self.m1,
            "m2": self.m2,
            "preferred": list(self.preferred),
            "warnings": list(self.warnings),
            "feasible_point": None
            if self.feasible_point is None
            else [float(v) for v in self.feasible_point],
        }


def validate_instance(inst, check_redundancy=True):
    """Structural and geometric checks; returns a `ValidationReport`.

    Raises MALFORMED for zero rows, duplicate names or an empty relevant
    set, and INFEASIBLE_REGION when the rows admit no point at all.
    Redundancy (a row that is never tight on the rest of the region) is a
    warning, not an error: the solvers stay correct, only the "min over
    boundaries" sweep wastes a subproblem on such a row.
    """
    from . import lp  # local import: lp has no model dependency

    names = [r.name for r in inst.constraints]
    dupes = sorted({nm for nm in names if names.count(nm) > 1})
    if dupes:
        raise MalformedError(f"duplicate constraint names: {dupes}")
    for row in inst.constraints:
        if np.max(np.abs(row.coeffs)) == 0.0:
            raise MalformedError(f"constraint {row.name!r} has all-zero coefficients")
    if inst.m1 == 0:
        raise MalformedError("instance has no relevant constraints")

    rows_mat = np.vstack([inst.A, inst.W]) if inst.m2 else inst.A
    rows_rhs = np.concatenate([inst.b, inst.q]) if inst.m2 else inst.b

    feas = lp.solve_lp(
        lp.LpProblem(
            c=np.zeros(inst.n),
            A=rows_mat,
            senses=np.full(rows_mat.shape[0], lp.GE),
            rhs=rows_rhs,
        )
    )
    if feas.status != lp.LpStatus.OPTIMAL:
        raise InfeasibleRegionError("the constraint rows admit no feasible point")

    warnings = []
    if check_redundancy:
        total = rows_mat.shape[0]
        all_names = [r.name for r in inst.relevant] + [r.name for r in inst.trivial]
        for i in range(total):
            others = np.ones(total, dtype=bool)
            others[i] = False
            if not others.any():
                continue
            probe = lp.solve_lp(
                lp.LpProblem(
                    c=rows_mat[i],
                    A=rows_mat[others],
                    senses=np.full(total - 1, lp.GE),
                    rhs=rows_rhs[others],
                )
            )
            if (
                probe.status == lp.LpStatus.OPTIMAL
                and probe.objective - rows_rhs[i] > 1e-7
            ):
                warnings.append(
                    f"constraint {all_names[i]!r} is redundant (never tight; "
                    f"minimum slack {probe.objective - rows_rhs[i]:.3g})"
                )

    return ValidationReport(
        feasible=True,
        m1=inst.m1,
        m2=inst.m2,
        preferred=[inst.relevant[j].name for j in inst.S],
        warnings=warnings,
        feasible_point=feas.x,
    )


def check_learning_point(inst, x, c, tau=TAU_TIGHT, tol=1e-8):
    """Decide whether x maximises the cost c over the instance's region.

    Returns ``(ok, certificate)``.  The test is the outward-normal cone
    membership at x: feasible x with tight rows T maximises c iff
    ``c in cone{n_j : j in T}``.  The multipliers found by nonnegative least
    squares double as the optimality certificate.
    """
    x = np.asarray(x, dtype=float)
    c = np.asarray(c, dtype=float)
    cn = np.linalg.norm(c)
    if cn == 0.0:
        raise ZeroCostError("cost vector is identically zero")
    c_hat = c / cn

    if not inst.is_feasible(x):
        return False, None
    tight = inst.tight_relevant(x, tau)
    if not tight:
        return False, None

    gens = inst.normals[list(tight)]  # rows = generators
    lam, rnorm = nnls(gens.T, c_hat)
    if rnorm > tol:
        return False, None
    y = np.zeros(inst.m1)
    y[list(tight)] = lam
    cert = OptimalityCertificate(c=c_hat, y=y, u=np.zeros(inst.m2))
    return True, cert


@dataclass(frozen=True)
class PercentileTable:
    """Per-variable percentiles of an observation set (type-7 interpolation)."""

    variables: tuple
    percentiles: tuple
    values: np.ndarray  # len(percentiles) x n

    def to_dict(self):
        return {
            "variables": list(self.variables),
            "percentiles": [float(p) for p in self.percentiles],
            "values": [[float(v) for v in row] for row in self.values],
        }

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["variable"] + [f"p{p:g}" for p in self.percentiles])
        for i, name in enumerate(self.variables):
            writer.writerow([name] + [repr(float(v)) for v in self.values[:, i]])
        return buf.getvalue()


def observation_stats(obs, percentiles=(10, 25, 50, 75, 90)):
    """Percentile summary of each observed coordinate.

    Linear interpolation between order statistics, i.e. what
    ``numpy.percentile`` does by default; {0,10} at p90 gives 9.0.
    """
    if obs.K == 0:
        raise EmptySetError("no observations to summarise")
    qs = tuple(float(p) for p in percentiles)
    if not qs:
        raise MalformedError("need at least one percentile")
    if any(p < 0 or p > 100 for p in qs):
        raise MalformedError("percentiles must lie in [0, 100]")
    values = np.percentile(obs.X, qs, axis=0)
    variables = obs.variables or tuple(f"x{i + 1}" for i in range(obs.n))
    return PercentileTable(variables=variables, percentiles=qs, values=values)


def average_forward_objective(obs, c):
    """Mean of ``c . x^k`` over the observation set."""
    if obs.K == 0:
        raise EmptySetError("no observations to average over")
    c = np.asarray(c, dtype=float)
    if c.shape != (obs.n,):
        raise MalformedError(f"cost has shape {c.shape}, expected ({obs.n},)")
    return float(np.mean(obs.X @ c))
