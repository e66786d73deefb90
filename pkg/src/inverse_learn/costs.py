"""Cost inference: which objective makes a learning point look optimal?

A feasible point z with tight relevant rows T maximises exactly the costs in
the cone spanned by the outward normals of T.  Among those, `infer_cost`
picks the unit cost maximising the summed objective value of the
observations, which for the Euclidean norm is the normalised projection of
``d = sum_k x^k`` onto the cone (computed by nonnegative least squares; the
multipliers double as the optimality certificate).  When that projection is
zero — the data points away from every generator — the maximiser sits on a
face boundary, and a guarded fallback scores the normalised generators and
in-cone face projections directly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyConeError,
    MalformedError,
    NotOptimalError,
    TooLargeError,
    ZeroCostError,
)
from .model import TAU_TIGHT, OptimalityCertificate
from .nnls import nnls

PROJECTION = "PROJECTION"
FACE_FALLBACK = "FACE_FALLBACK"

#: face enumeration guard for the fallback path
MAX_FALLBACK_GENERATORS = 12


@dataclass(frozen=True)
class CostCone:
    """Cone of costs certified optimal at ``z``: nonnegative combinations of
    the outward normals of the rows tight at z."""

    z: np.ndarray
    tight: tuple          # indices into the relevant rows
    generators: np.ndarray  # one row per tight constraint
    names: tuple

    @property
    def dim(self):
        return self.generators.shape[1]

    def contains(self, c, tol=1e-8):
        """Cone membership by nonnegative least squares residual."""
        c = np.asarray(c, dtype=float)
        _, rnorm = nnls(self.generators.T, c)
        return rnorm <= tol * max(1.0, float(np.linalg.norm(c)))

    def to_dict(self):
        return {
            "z": [float(v) for v in self.z],
            "tight": list(self.names),
            "generators": [[float(v) for v in g] for g in self.generators],
        }


@dataclass(frozen=True)
class InferredCost:
    c: np.ndarray
    multipliers: np.ndarray  # one per cone generator, c = multipliers @ generators
    avg_objective: float
    exactness: str
    cone: CostCone

    def to_dict(self):
        return {
            "c": [float(v) for v in self.c],
            "lambda": {
                name: float(w) for name, w in zip(self.cone.names, self.multipliers)
            },
            "avg_objective": float(self.avg_objective),
            "exactness": self.exactness,
        }


def build_cone(inst, z, tau=TAU_TIGHT):
    """Cone of costs making z optimal; EMPTY_CONE for interior points."""
    z = np.asarray(z, dtype=float)
    if not inst.is_feasible(z):
        raise MalformedError("cone point is not feasible for the instance")
    tight = inst.tight_relevant(z, tau)
    if not tight:
        raise EmptyConeError(
            "no relevant constraint is tight at the point; every nonzero cost "
            "is improvable there"
        )
    gens = inst.normals[list(tight)].copy()
    return CostCone(
        z=z,
        tight=tight,
        generators=gens,
        names=tuple(inst.relevant_names[j] for j in tight),
    )


def infer_cost(cone, obs):
    """Unit cost in the cone maximising the observations' summed objective.

    Euclidean projection of ``d = sum_k x^k`` onto the cone when that is
    nonzero (exactness PROJECTION); otherwise the best of the normalised
    generators and in-cone face projections (exactness FACE_FALLBACK).
    """
    if obs.K == 0:
        raise MalformedError("cost inference needs at least one observation")
    d = obs.X.sum(axis=0)
    G = cone.generators  # (t, n)
    t = G.shape[0]

    lam, _ = nnls(G.T, d)
    proj = lam @ G
    pn = float(np.linalg.norm(proj))
    if pn > 1e-9 * max(1.0, float(np.linalg.norm(d))):
        c = proj / pn
        mult = lam / pn
        return InferredCost(
            c=c,
            multipliers=mult,
            avg_objective=float(d @ c) / obs.K,
            exactness=PROJECTION,
            cone=cone,
        )

    # Projection is zero: the data is in the cone's polar, so the maximiser of
    # d.c over the unit-sphere cap lies on the boundary.  Score the generator
    # rays, plus any face-span projection that happens to stay inside the cone
    # (a numerical safety net near the zero-projection boundary).
    if t > MAX_FALLBACK_GENERATORS:
        raise TooLargeError(
            f"face fallback guarded to {MAX_FALLBACK_GENERATORS} generators, got {t}"
        )
    candidates = []  # (value, order, c, multipliers)
    for j in range(t):
        gn = float(np.linalg.norm(G[j]))
        if gn == 0.0:
            continue
        c = G[j] / gn
        mult = np.zeros(t)
        mult[j] = 1.0 / gn
        candidates.append((float(d @ c), (1, j), c, mult))
    for size in range(2, t + 1):
        for face in itertools.combinations(range(t), size):
            sub = G[list(face)]
            coef, *_ = np.linalg.lstsq(sub.T, d, rcond=None)
            p_face = coef @ sub
            norm = float(np.linalg.norm(p_face))
            if norm <= 1e-12 or np.any(coef < -1e-9):
                continue
            c = p_face / norm
            mult = np.zeros(t)
            mult[list(face)] = coef / norm
            candidates.append((float(d @ c), (size, face), c, mult))
    if not candidates:
        raise EmptyConeError("cone has no nonzero generators")
    candidates.sort(key=lambda item: (-item[0], item[1]))
    value, _, c, mult = candidates[0]
    return InferredCost(
        c=c,
        multipliers=mult,
        avg_objective=value / obs.K,
        exactness=FACE_FALLBACK,
        cone=cone,
    )


def certify(inst, z, c, tau=TAU_TIGHT, tol=1e-8):
    """Optimality certificate for (z, c), or NOT_OPTIMAL.

    Normalises c to unit Euclidean length, writes it as a nonnegative
    combination of the outward normals tight at z, and returns the
    multipliers; trivial-row multipliers are identically zero because only
    relevant-row normals enter the cone.
    """
    z = np.asarray(z, dtype=float)
    c = np.asarray(c, dtype=float)
    cn = float(np.linalg.norm(c))
    if cn == 0.0:
        raise ZeroCostError("cannot certify the zero cost")
    c_hat = c / cn
    if not inst.is_feasible(z):
        raise NotOptimalError("point is not feasible")
    cone = build_cone(inst, z, tau)
    lam, rnorm = nnls(cone.generators.T, c_hat)
    if rnorm > tol:
        raise NotOptimalError(
            f"cost lies outside the tight-row normal cone (residual {rnorm:.3g})"
        )
    y = np.zeros(inst.m1)
    y[list(cone.tight)] = lam
    return OptimalityCertificate(c=c_hat, y=y, u=np.zeros(inst.m2))
