"""Diet decision support: CSV tables in, forward instances and reports out.

A food table holds per-serving nutrient amounts (rows = foods, columns =
nutrients, units baked into the column header like ``"Energy (kcal)"``).
A bounds table gives each nutrient a lower and an upper intake bound plus flags
saying which sides the analyst considers *relevant* (worth explaining as
binding) and *preferred* (desired binding).  `build_diet_instance` turns the
pair into a forward instance: two rows per nutrient in table order, then two
trivial box rows per food (nonnegative servings, common serving cap).
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .errors import (
    EmptySetError,
    MalformedError,
    MissingNutrientError,
    UnitMismatchError,
)
from .model import (
    ForwardInstance,
    Kind,
    LinearConstraint,
    ObservationSet,
    Sense,
    observation_stats,
)

DEFAULT_SERVING_CAP = 8.0


def _base_name(nutrient):
    """Header name with the parenthesised unit stripped: 'Energy (kcal)' -> 'Energy'."""
    return nutrient.split(" (")[0].strip()


@dataclass(frozen=True)
class FoodTable:
    foods: tuple
    nutrients: tuple
    matrix: np.ndarray  # foods x nutrients, per-serving amounts

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "foods", tuple(str(f) for f in self.foods))
        object.__setattr__(self, "nutrients", tuple(str(n) for n in self.nutrients))
        if matrix.shape != (len(self.foods), len(self.nutrients)):
            raise MalformedError(
                f"food matrix is {matrix.shape}, expected "
                f"({len(self.foods)}, {len(self.nutrients)})"
            )
        if not np.all(np.isfinite(matrix)):
            raise MalformedError("food table contains non-finite amounts")
        if np.any(matrix < 0):
            raise MalformedError("per-serving nutrient amounts cannot be negative")
        matrix = matrix.copy()
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)
        names = list(self.foods)
        if len(set(names)) != len(names):
            raise MalformedError("duplicate food names")

    def column(self, nutrient):
        return self.matrix[:, self.nutrients.index(nutrient)]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["food"] + list(self.nutrients))
        for i, food in enumerate(self.foods):
            writer.writerow([food] + [repr(float(v)) for v in self.matrix[i]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
        if not rows or len(rows[0]) < 2 or rows[0][0].strip() != "food":
            raise MalformedError("food CSV must start with a 'food,<nutrients...>' header")
        nutrients = tuple(h.strip() for h in rows[0][1:])
        foods, data = [], []
        for lineno, r in enumerate(rows[1:], start=2):
            if len(r) != len(nutrients) + 1:
                raise MalformedError(f"food CSV line {lineno}: wrong cell count")
            foods.append(r[0].strip())
            try:
                data.append([float(v) for v in r[1:]])
            except ValueError as exc:
                raise MalformedError(f"food CSV line {lineno}: {exc}") from exc
        return cls(foods=tuple(foods), nutrients=nutrients, matrix=np.array(data))


_BOUNDS_HEADER = [
    "nutrient",
    "lower",
    "upper",
    "lower_relevant",
    "upper_relevant",
    "lower_preferred",
    "upper_preferred",
]


@dataclass(frozen=True)
class NutrientBounds:
    nutrients: tuple
    lower: np.ndarray
    upper: np.ndarray
    lower_relevant: np.ndarray
    upper_relevant: np.ndarray
    lower_preferred: np.ndarray
    upper_preferred: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nutrients", tuple(str(n) for n in self.nutrients))
        n = len(self.nutrients)
        for name in ("lower", "upper"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,) or not np.all(np.isfinite(arr)):
                raise MalformedError(f"bounds column {name!r} malformed")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        for name in (
            "lower_relevant",
            "upper_relevant",
            "lower_preferred",
            "upper_preferred",
        ):
            arr = np.asarray(getattr(self, name), dtype=bool)
            if arr.shape != (n,):
                raise MalformedError(f"bounds column {name!r} malformed")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if np.any(self.lower_preferred & ~self.lower_relevant) or np.any(
            self.upper_preferred & ~self.upper_relevant
        ):
            raise MalformedError("preferred bounds must also be marked relevant")
        if len(set(self.nutrients)) != n:
            raise MalformedError("duplicate nutrient names in bounds table")

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_BOUNDS_HEADER)
        for i, name in enumerate(self.nutrients):
            writer.writerow(
                [
                    name,
                    repr(float(self.lower[i])),
                    repr(float(self.upper[i])),
                    int(self.lower_relevant[i]),
                    int(self.upper_relevant[i]),
                    int(self.lower_preferred[i]),
                    int(self.upper_preferred[i]),
                ]
            )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
        if not rows or [h.strip() for h in rows[0]] != _BOUNDS_HEADER:
            raise MalformedError(
                "bounds CSV header must be exactly: " + ",".join(_BOUNDS_HEADER)
            )
        names, cols = [], {k: [] for k in _BOUNDS_HEADER[1:]}
        for lineno, r in enumerate(rows[1:], start=2):
            if len(r) != len(_BOUNDS_HEADER):
                raise MalformedError(f"bounds CSV line {lineno}: wrong cell count")
            names.append(r[0].strip())
            try:
                cols["lower"].append(float(r[1]))
                cols["upper"].append(float(r[2]))
                for k, cell in zip(_BOUNDS_HEADER[3:], r[3:]):
                    cols[k].append(bool(int(cell)))
            except ValueError as exc:
                raise MalformedError(f"bounds CSV line {lineno}: {exc}") from exc
        return cls(
            nutrients=tuple(names),
            lower=np.array(cols["lower"]),
            upper=np.array(cols["upper"]),
            lower_relevant=np.array(cols["lower_relevant"]),
            upper_relevant=np.array(cols["upper_relevant"]),
            lower_preferred=np.array(cols["lower_preferred"]),
            upper_preferred=np.array(cols["upper_preferred"]),
        )


def _match_nutrient(foods, nutrient):
    """Index of `nutrient` in the food table, with unit-aware errors."""
    if nutrient in foods.nutrients:
        return foods.nutrients.index(nutrient)
    base = _base_name(nutrient)
    same_base = [n for n in foods.nutrients if _base_name(n) == base]
    if same_base:
        raise UnitMismatchError(
            f"bounds declare {nutrient!r} but the food table has {same_base[0]!r}"
        )
    raise MissingNutrientError(f"food table has no nutrient {nutrient!r}")


def build_diet_instance(foods, bounds, serving_cap=DEFAULT_SERVING_CAP, name="diet"):
    """Forward instance from a food table and nutrient bounds.

    Rows come out in a fixed order — per nutrient a lower then an upper row
    (``"<nutrient>:lower"`` / ``"<nutrient>:upper"``), then two trivial box
    rows per food — so the construction is lossless and reversible.
    """
    if serving_cap <= 0 or not np.isfinite(serving_cap):
        raise MalformedError(f"serving cap must be positive, got {serving_cap}")
    n_foods = len(foods.foods)
    rows = []
    for i, nutrient in enumerate(bounds.nutrients):
        col = foods.matrix[:, _match_nutrient(foods, nutrient)]
        rows.append(
            LinearConstraint(
                name=f"{nutrient}:lower",
                coeffs=col,
                sense=Sense.GE,
                rhs=float(bounds.lower[i]),
                kind=Kind.RELEVANT if bounds.lower_relevant[i] else Kind.TRIVIAL,
                preferred=bool(bounds.lower_preferred[i]),
            )
        )
        rows.append(
            LinearConstraint(
                name=f"{nutrient}:upper",
                coeffs=col,
                sense=Sense.LE,
                rhs=float(bounds.upper[i]),
                kind=Kind.RELEVANT if bounds.upper_relevant[i] else Kind.TRIVIAL,
                preferred=bool(bounds.upper_preferred[i]),
            )
        )
    eye = np.eye(n_foods)
    for i, food in enumerate(foods.foods):
        rows.append(
            LinearConstraint(
                name=f"{food}:min", coeffs=eye[i], sense=Sense.GE, rhs=0.0,
                kind=Kind.TRIVIAL,
            )
        )
        rows.append(
            LinearConstraint(
                name=f"{food}:max", coeffs=eye[i], sense=Sense.LE, rhs=float(serving_cap),
                kind=Kind.TRIVIAL,
            )
        )
    return ForwardInstance(variables=tuple(foods.foods), constraints=tuple(rows), name=name)


def diet_tables_from_instance(inst):
    """Reverse of `build_diet_instance`: recover (foods, bounds, cap).

    Relies on the row-name convention; coefficients come back bit-identical
    because nothing is ever rescaled on the way through.
    """
    suffixes = (":lower", ":upper", ":min", ":max")
    stray = [r.name for r in inst.constraints if not r.name.endswith(suffixes)]
    if stray:
        raise MalformedError(
            f"rows {stray[:3]} do not follow the <nutrient>:lower/:upper, "
            f"<food>:min/:max naming convention"
        )
    lower_rows = [r for r in inst.constraints if r.name.endswith(":lower")]
    upper_rows = {r.name[: -len(":upper")]: r for r in inst.constraints if r.name.endswith(":upper")}
    if not lower_rows:
        raise MalformedError("instance has no nutrient bound rows")
    nutrients, lo, up = [], [], []
    lrel, urel, lpref, upref = [], [], [], []
    columns = []
    cap = None
    for r in inst.constraints:
        if r.name.endswith(":max") and r.kind is Kind.TRIVIAL:
            cap = r.rhs
    for r in lower_rows:
        nutrient = r.name[: -len(":lower")]
        u = upper_rows.pop(nutrient, None)
        if u is None:
            raise MalformedError(f"no upper row paired with {r.name!r}")
        nutrients.append(nutrient)
        columns.append(r.coeffs)
        lo.append(r.rhs)
        up.append(u.rhs)
        lrel.append(r.kind is Kind.RELEVANT)
        urel.append(u.kind is Kind.RELEVANT)
        lpref.append(r.preferred)
        upref.append(u.preferred)
    if upper_rows:
        raise MalformedError(
            f"no lower row paired with {sorted(upper_rows)[0] + ':upper'!r}"
        )
    foods = FoodTable(
        foods=tuple(inst.variables),
        nutrients=tuple(nutrients),
        matrix=np.column_stack(columns) if columns else np.zeros((inst.n, 0)),
    )
    bounds = NutrientBounds(
        nutrients=tuple(nutrients),
        lower=np.array(lo),
        upper=np.array(up),
        lower_relevant=np.array(lrel),
        upper_relevant=np.array(urel),
        lower_preferred=np.array(lpref),
        upper_preferred=np.array(upref),
    )
    return foods, bounds, (DEFAULT_SERVING_CAP if cap is None else cap)


@dataclass
class DietEvaluation:
    servings: np.ndarray
    totals: dict
    violations: list  # dicts: constraint, bound, actual, margin

    @property
    def feasible(self):
        return not self.violations

    def to_dict(self):
        return {
            "servings": [float(v) for v in self.servings],
            "totals": {k: float(v) for k, v in self.totals.items()},
            "violations": list(self.violations),
            "feasible": self.feasible,
        }


def evaluate_diet(foods, bounds, servings, serving_cap=None):
    """Nutrient totals of a serving vector and any violated bounds.

    Serving-box checks (nonnegativity, the cap) run only when a cap is
    supplied; the nutrient rows are always checked.
    """
    servings = np.asarray(servings, dtype=float)
    if servings.shape != (len(foods.foods),):
        raise MalformedError(
            f"servings vector has shape {servings.shape}, expected ({len(foods.foods)},)"
        )
    totals = {}
    violations = []
    for i, nutrient in enumerate(bounds.nutrients):
        col = foods.matrix[:, _match_nutrient(foods, nutrient)]
        total = float(col @ servings)
        totals[nutrient] = total
        if total < bounds.lower[i]:
            violations.append(
                {
                    "constraint": f"{nutrient}:lower",
                    "bound": float(bounds.lower[i]),
                    "actual": total,
                    "margin": float(bounds.lower[i] - total),
                }
            )
        if total > bounds.upper[i]:
            violations.append(
                {
                    "constraint": f"{nutrient}:upper",
                    "bound": float(bounds.upper[i]),
                    "actual": total,
                    "margin": float(total - bounds.upper[i]),
                }
            )
    if serving_cap is not None:
        for i, food in enumerate(foods.foods):
            if servings[i] < 0:
                violations.append(
                    {
                        "constraint": f"{food}:min",
                        "bound": 0.0,
                        "actual": float(servings[i]),
                        "margin": float(-servings[i]),
                    }
                )
            if servings[i] > serving_cap:
                violations.append(
                    {
                        "constraint": f"{food}:max",
                        "bound": float(serving_cap),
                        "actual": float(servings[i]),
                        "margin": float(servings[i] - serving_cap),
                    }
                )
    return DietEvaluation(servings=servings, totals=totals, violations=violations)


@dataclass
class DietReport:
    outdir: str
    files: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def diet_report(frontier, obs, foods, outdir, bounds=None, instance=None):
    """Render a frontier of diet recommendations to CSV tables and figures.

    Writes per-cardinality servings, nutrient totals (against bounds when
    given), binding-count summaries, an observation percentile table, and
    two SVG charts.  Returns a `DietReport` listing everything written.
    """
    os.makedirs(outdir, exist_ok=True)
    report = DietReport(outdir=outdir)
    ok_points = [pt for pt in frontier.points if pt.status == "OK" and pt.solution is not None]
    p_values = [pt.p for pt in ok_points]

    # ---- binding-count frontier summary ------------------------------------
    summary_rows = []
    for pt in frontier.points:
        sol = pt.solution
        if sol is None or pt.status != "OK":
            summary_rows.append([pt.p, pt.status, "", "", "", "", "", "", ""])
            continue
        if instance is not None:
            tight_rel = len(instance.tight_relevant(sol.z))
            tight_trv = len(instance.tight_trivial(sol.z))
            pref_tight = len(set(instance.S).intersection(instance.tight_relevant(sol.z)))
        else:
            tight_rel = len(sol.tight)
            tight_trv = ""
            pref_tight = ""
        k = max(sol.eps.shape[0], 1)
        summary_rows.append(
            [
                pt.p,
                pt.status,
                sol.method,
                repr(float(sol.distance)),
                repr(float(sol.distance) / k if sol.spec.agg.value == "sum" else float(sol.distance)),
                tight_rel,
                tight_trv,
                pref_tight,
                sol.preferred_bound_count,
            ]
        )
    path = os.path.join(outdir, "frontier_summary.csv")
    _write_csv(
        path,
        [
            "p",
            "status",
            "method",
            "distance",
            "avg_distance",
            "binding_relevant",
            "binding_trivial",
            "preferred_tight",
            "preferred_selected",
        ],
        summary_rows,
    )
    report.files["frontier_summary"] = path

    # ---- recommended servings ----------------------------------------------
    path = os.path.join(outdir, "recommended_servings.csv")
    _write_csv(
        path,
        ["food"] + [f"p{p}" for p in p_values],
        [
            [food] + [repr(float(pt.solution.z[i])) for pt in ok_points]
            for i, food in enumerate(foods.foods)
        ],
    )
    report.files["recommended_servings"] = path

    # ---- nutrient totals ----------------------------------------------------
    header = ["nutrient"] + [f"p{p}" for p in p_values]
    if bounds is not None:
        header += ["lower", "upper"]
    rows = []
    for j, nutrient in enumerate(foods.nutrients):
        col = foods.matrix[:, j]
        row = [nutrient] + [repr(float(col @ pt.solution.z)) for pt in ok_points]
        if bounds is not None:
            if nutrient in bounds.nutrients:
                i = bounds.nutrients.index(nutrient)
                row += [repr(float(bounds.lower[i])), repr(float(bounds.upper[i]))]
            else:
                row += ["", ""]
        rows.append(row)
    path = os.path.join(outdir, "nutrient_totals.csv")
    _write_csv(path, header, rows)
    report.files["nutrient_totals"] = path

    # ---- observation percentiles ---------------------------------------------
    stats = None
    try:
        stats = observation_stats(obs)
    except EmptySetError:
        report.metadata["stats_error"] = "EMPTY_SET"
    if stats is not None:
        path = os.path.join(outdir, "observation_percentiles.csv")
        with open(path, "w", newline="") as fh:
            fh.write(stats.to_csv())
        report.files["observation_percentiles"] = path

    # ---- figures ---------------------------------------------------------------
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [pt.p for pt in frontier.points]
    ys = [pt.solution.distance if (pt.status == "OK" and pt.solution) else np.nan for pt in frontier.points]
    ax.plot(xs, ys, marker="o", color="#2c5f8a")
    for pt in frontier.points:
        if pt.status != "OK":
            ax.axvline(pt.p, color="#c0c0c0", linestyle=":", linewidth=1)
            ax.annotate(pt.status, (pt.p, ax.get_ylim()[0]), fontsize=7, rotation=90)
    ax.set_xlabel("binding cardinality p")
    ax.set_ylabel("distance to observations")
    ax.set_title(f"recommendation frontier ({frontier.mode})")
    ax.set_xticks(xs)
    fig.tight_layout()
    path = os.path.join(outdir, "frontier_distance.svg")
    fig.savefig(path)
    plt.close(fig)
    report.files["frontier_distance"] = path

    fig, ax = plt.subplots(figsize=(7, max(3.0, 0.22 * len(foods.foods))))
    ypos = np.arange(len(foods.foods))
    if stats is not None:
        lo = stats.values[0]
        hi = stats.values[-1]
        mid = stats.values[len(stats.percentiles) // 2]
        ax.hlines(ypos, lo, hi, color="#bbbbbb", linewidth=3, label="observed p10-p90")
        ax.plot(mid, ypos, "|", color="#555555", markersize=8, label="observed median")
    markers = ["o", "s", "D", "^", "v", "P", "X"]
    for idx, pt in enumerate(ok_points):
        ax.plot(
            pt.solution.z,
            ypos,
            markers[idx % len(markers)],
            markersize=4,
            linestyle="none",
            label=f"recommended p={pt.p}",
        )
    ax.set_yticks(ypos)
    ax.set_yticklabels(foods.foods, fontsize=7)
    ax.set_xlabel("servings")
    ax.set_title("recommended servings vs observed intake")
    ax.legend(fontsize=7, loc="upper right")
    fig.tight_layout()
    path = os.path.join(outdir, "servings_vs_observations.svg")
    fig.savefig(path)
    plt.close(fig)
    report.files["servings_vs_observations"] = path

    report.metadata["p_values"] = p_values
    report.metadata["n_foods"] = len(foods.foods)
    return report


def synthetic_diet_fixture(
    n_foods=38,
    n_nutrients=11,
    n_obs=3,
    seed=7,
    n_relevant=8,
    n_preferred=3,
    cap=DEFAULT_SERVING_CAP,
):
    """Seeded synthetic food/bounds/observation triple with a feasible region.

    The bounds are cut around the nutrient totals of a hidden interior
    serving vector, so the instance is feasible by construction; the
    observations are noisy copies of that vector and may individually
    violate bounds (that is the point of the exercise).
    """
    rng = np.random.default_rng(seed)
    foods = tuple(f"food{i + 1:02d}" for i in range(n_foods))
    nutrients = tuple(f"nutrient{j + 1:02d} (g)" for j in range(n_nutrients))
    mask = rng.random((n_foods, n_nutrients)) < 0.6
    matrix = np.where(mask, rng.uniform(0.5, 10.0, (n_foods, n_nutrients)), 0.0)
    matrix[0] = np.maximum(matrix[0], 0.5)  # no all-zero nutrient column

    x0 = rng.uniform(1.0, 4.0, n_foods)
    totals = x0 @ matrix
    lower = totals * (1.0 - rng.uniform(0.15, 0.45, n_nutrients))
    upper = totals * (1.0 + rng.uniform(0.15, 0.45, n_nutrients))

    slots = [(j, side) for j in range(n_nutrients) for side in ("lower", "upper")]
    order = rng.permutation(len(slots))
    chosen = [slots[i] for i in order[: min(n_relevant, len(slots))]]
    preferred = chosen[: min(n_preferred, len(chosen))]
    flags = {
        "lower_relevant": np.zeros(n_nutrients, dtype=bool),
        "upper_relevant": np.zeros(n_nutrients, dtype=bool),
        "lower_preferred": np.zeros(n_nutrients, dtype=bool),
        "upper_preferred": np.zeros(n_nutrients, dtype=bool),
    }
    for j, side in chosen:
        flags[f"{side}_relevant"][j] = True
    for j, side in preferred:
        flags[f"{side}_preferred"][j] = True

    bounds = NutrientBounds(
        nutrients=nutrients, lower=lower, upper=upper, **flags
    )
    table = FoodTable(foods=foods, nutrients=nutrients, matrix=matrix)
    X = np.clip(x0 + rng.normal(0.0, 0.7, (n_obs, n_foods)), 0.0, cap)
    observations = ObservationSet(X=X, variables=foods)
    return table, bounds, observations
