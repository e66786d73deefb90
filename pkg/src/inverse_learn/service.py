"""HTTP/JSON service over the solver pipeline.

The session store is in-memory; ids are content hashes, so registering the
same payload twice returns the same id and concurrent identical requests
cannot race each other into different answers.  Solution bodies are
serialized through the same canonical serializer the CLI uses.
"""

import json
import threading
from contextlib import asynccontextmanager
from dataclasses import replace

import numpy as np
from fastapi import FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .costs import build_cone, infer_cost
from .errors import (
    AllInfeasibleError,
    EmptyConeError,
    InverseLearnError,
    MalformedError,
    NoPreferredError,
    NotOptimalError,
    NumericalFailureError,
    ZeroCostError,
)
from .lp import Agg, DistanceSpec, Norm
from .model import ForwardInstance, ObservationSet, observation_stats
from .serialize import (
    ENGINE_VERSION,
    canonical_json,
    content_id,
    cost_document,
    frontier_document,
    instance_document,
    observations_id,
    solution_document,
    stats_document,
)
from .solvers import (
    DEFAULT_OPTIONS,
    INDEPENDENT,
    algorithm1,
    solve_bil,
    solve_il,
    solve_mil,
    solve_seq,
    sweep,
)

# errors that report a solver status rather than a bad request
_STATUS_ERRORS = (
    AllInfeasibleError,
    EmptyConeError,
    NoPreferredError,
    NotOptimalError,
    NumericalFailureError,
    ZeroCostError,
)


class SessionStore:
    """Content-addressed registry for instances, observations and solutions."""

    def __init__(self):
        self._lock = threading.Lock()
        self._instances = {}
        self._observations = {}   # id -> (ObservationSet, instance_id)
        self._solutions = {}      # id -> (instance_id, observations_id, z list)

    def put_instance(self, inst):
        iid = content_id("inst", inst.to_dict())
        with self._lock:
            self._instances.setdefault(iid, inst)
        return iid

    def get_instance(self, iid):
        inst = self._instances.get(iid)
        if inst is None:
            raise KeyError(f"unknown instance id {iid!r}")
        return inst

    def put_observations(self, obs, instance_id):
        oid = observations_id(obs)
        with self._lock:
            self._observations.setdefault(oid, (obs, instance_id))
        return oid

    def get_observations(self, oid):
        entry = self._observations.get(oid)
        if entry is None:
            raise KeyError(f"unknown observations id {oid!r}")
        return entry

    def put_solution(self, sol_id, instance_id, obs_id, z):
        with self._lock:
            self._solutions.setdefault(sol_id, (instance_id, obs_id, z))

    def get_solution(self, sol_id):
        entry = self._solutions.get(sol_id)
        if entry is None:
            raise KeyError(f"unknown solution id {sol_id!r}")
        return entry

    def snapshot(self):
        return {
            "instances": {iid: inst.to_dict() for iid, inst in self._instances.items()},
            "observations": {
                oid: {"instance": iid, "csv": obs.to_csv()}
                for oid, (obs, iid) in self._observations.items()
            },
            "solutions": {
                sid: {"instance": iid, "observations": oid, "z": z}
                for sid, (iid, oid, z) in self._solutions.items()
            },
        }


def _error_body(code, message, status=None):
    body = {"error": code, "detail": message, "engine_version": ENGINE_VERSION}
    if status is not None:
        body["status"] = status
    return body


def _bad_request(message, code="MALFORMED"):
    return JSONResponse(status_code=400, content=_error_body(code, message))


def _not_found(message):
    return JSONResponse(status_code=404, content=_error_body("NOT_FOUND", message))


def _canonical_response(doc, status_code=200):
    return Response(
        content=canonical_json(doc),
        status_code=status_code,
        media_type="application/json",
    )


def _parse_spec(body):
    return DistanceSpec(Norm(body.get("norm", "l1")), Agg(body.get("agg", "sum")))


def _parse_options(body):
    opts = DEFAULT_OPTIONS
    if body.get("enum_budget") is not None:
        opts = replace(opts, enum_budget=int(body["enum_budget"]))
    if body.get("big_m_default") is not None:
        opts = replace(opts, big_m_default=float(body["big_m_default"]))
    if body.get("tolerance") is not None:
        tol = float(body["tolerance"])
        opts = replace(opts, tol_feas=tol, tau_tight=tol)
    return opts


def _resolve_pair(store, body):
    inst = store.get_instance(_require(body, "instance"))
    obs, _ = store.get_observations(_require(body, "observations"))
    if body.get("preferred") is not None:
        inst = inst.with_preferred([str(n) for n in body["preferred"]])
    obs.require_match(inst)
    return inst, obs


def _require(body, key):
    value = body.get(key)
    if value is None:
        raise MalformedError(f"request body needs {key!r}")
    return str(value)


def _require_p(body, method):
    p = body.get("p")
    if p is None:
        raise MalformedError(f"method {method!r} needs an integer p")
    return int(p)


def _dispatch_solve(inst, obs, body, spec, opts):
    method = str(body.get("method", "il"))
    if method == "bil":
        j = body.get("j")
        if j is None and body.get("row") is not None:
            name = str(body["row"])
            try:
                j = list(inst.relevant_names).index(name)
            except ValueError:
                raise MalformedError(f"no relevant row named {name!r}") from None
        if j is None:
            raise MalformedError("method 'bil' needs 'j' or 'row'")
        return solve_bil(inst, obs, spec, int(j), opts)
    if method == "alg1":
        return algorithm1(inst, obs, spec, opts)
    if method == "il":
        return solve_il(inst, obs, spec, _require_p(body, method), opts)
    if method == "seq":
        return solve_seq(inst, obs, spec, _require_p(body, method), opts)
    if method == "mil":
        return solve_mil(
            inst,
            obs,
            spec,
            _require_p(body, method),
            float(body.get("omega1", 1.0)),
            float(body.get("omega2", 1.0)),
            opts,
        )
    raise MalformedError(f"unknown method {method!r}")


def create_app(store=None, snapshot_path=None):
    registry = store if store is not None else SessionStore()

    @asynccontextmanager
    async def lifespan(_app):
        yield
        if snapshot_path:  # pragma: no cover - exercised manually
            with open(snapshot_path, "w", encoding="utf-8") as fh:
                fh.write(canonical_json(registry.snapshot()))

    app = FastAPI(title="inverse-learn", version=ENGINE_VERSION, lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = registry
    app.state.store = store

    @app.exception_handler(KeyError)
    async def _key_error(_req, exc):
        return _not_found(str(exc.args[0]) if exc.args else "unknown id")

    @app.exception_handler(InverseLearnError)
    async def _domain_error(_req, exc):
        if isinstance(exc, _STATUS_ERRORS):
            return JSONResponse(
                status_code=422, content=_error_body(exc.code, str(exc), status=exc.code)
            )
        return _bad_request(str(exc), code=exc.code)

    @app.exception_handler(Exception)
    async def _internal_error(_req, exc):  # pragma: no cover - defensive
        return JSONResponse(
            status_code=500, content=_error_body("INTERNAL", str(exc))
        )

    async def _json_body(request):
        try:
            return json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as exc:
            raise MalformedError(f"request body is not JSON: {exc}") from exc

    @app.post("/instances")
    async def post_instance(request: Request):
        body = await _json_body(request)
        inst = ForwardInstance.from_dict(body)
        iid = store.put_instance(inst)
        return {"id": iid, "engine_version": ENGINE_VERSION}

    @app.get("/instances/{iid}")
    async def get_instance(iid: str):
        inst = store.get_instance(iid)
        return _canonical_response(instance_document(inst, instance_id=iid))

    @app.post("/observations")
    async def post_observations(request: Request, instance: str = Query(...)):
        inst = store.get_instance(instance)
        text = (await request.body()).decode("utf-8")
        obs = ObservationSet.from_csv(text)
        obs.require_match(inst)
        oid = store.put_observations(obs, instance)
        return {"id": oid, "engine_version": ENGINE_VERSION}

    @app.get("/observations/{oid}/stats")
    async def get_stats(oid: str, percentiles: str = "10,25,50,75,90"):
        obs, _ = store.get_observations(oid)
        try:
            levels = tuple(float(v) for v in percentiles.split(","))
        except ValueError as exc:
            raise MalformedError(f"bad percentiles list {percentiles!r}") from exc
        table = observation_stats(obs, levels)
        return _canonical_response(stats_document(table))

    @app.post("/solve")
    async def post_solve(request: Request):
        body = await _json_body(request)
        inst, obs = _resolve_pair(store, body)
        sol = _dispatch_solve(inst, obs, body, _parse_spec(body), _parse_options(body))
        doc = solution_document(sol)
        if sol.status != "OK":
            return _canonical_response(doc, status_code=422)
        store.put_solution(doc["id"], _require(body, "instance"),
                           _require(body, "observations"), doc["z"])
        if body.get("include_cost"):
            doc = dict(doc)
            opts = _parse_options(body)
            cone = build_cone(inst, np.array(doc["z"]), opts.tau_tight)
            doc["cost"] = cost_document(infer_cost(cone, obs))
        if body.get("include_activity"):
            doc = dict(doc)
            z = np.array(doc["z"])
            doc["activity"] = {
                "relevant_slacks": [float(s) for s in inst.slacks(z)],
                "trivial_slacks": [float(s) for s in inst.trivial_slacks(z)],
            }
        return _canonical_response(doc)

    @app.post("/frontier")
    async def post_frontier(request: Request):
        body = await _json_body(request)
        inst, obs = _resolve_pair(store, body)
        spec = _parse_spec(body)
        opts = _parse_options(body)
        p_min = int(body.get("p_min", 1))
        p_max = int(body.get("p_max", p_min))
        mode = str(body.get("mode", INDEPENDENT)).lower()
        weights = None
        if body.get("method") == "mil" or body.get("mil"):
            weights = (float(body.get("omega1", 1.0)), float(body.get("omega2", 1.0)))
        frontier = sweep(inst, obs, spec, p_min, p_max, mode, weights, opts)
        return _canonical_response(frontier_document(frontier))

    @app.post("/infer-cost")
    async def post_infer_cost(request: Request):
        body = await _json_body(request)
        opts = _parse_options(body)
        if body.get("solution") is not None:
            iid, oid, z = store.get_solution(str(body["solution"]))
            inst = store.get_instance(iid)
            obs, _ = store.get_observations(oid)
            z = np.array(z, dtype=float)
        else:
            inst = store.get_instance(_require(body, "instance"))
            obs, _ = store.get_observations(_require(body, "observations"))
            if body.get("z") is None:
                raise MalformedError("request needs 'solution' or inline 'z'")
            z = np.array(body["z"], dtype=float)
        cone = build_cone(inst, z, opts.tau_tight)
        inferred = infer_cost(cone, obs)
        return _canonical_response(cost_document(inferred))

    return app
