"""Canonical JSON documents shared by the CLI and the HTTP service.

Every document that leaves the package goes through `canonical_json`, so the
two delivery paths emit byte-identical output for identical inputs.  Ids are
content hashes, which keeps them deterministic and makes registration
idempotent.
"""

import hashlib
import json

from . import __version__

ENGINE_VERSION = f"inverse-learn/{__version__}"


def canonical_json(obj):
    """Serialize `obj` with a fixed, diff-friendly layout.

    `allow_nan=False` turns any NaN/inf that slipped through into a loud
    error instead of invalid JSON.
    """
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def content_id(kind, payload):
    digest = hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
    return f"{kind}-{digest[:16]}"


def solution_document(sol):
    """Solution dict + engine version + content id (in that key order)."""
    doc = sol.to_dict()
    doc["engine_version"] = ENGINE_VERSION
    doc["id"] = content_id("sol", doc)
    return doc


def frontier_document(frontier):
    doc = frontier.to_dict()
    doc["engine_version"] = ENGINE_VERSION
    doc["id"] = content_id("frontier", doc)
    return doc


def instance_document(inst, instance_id=None):
    doc = inst.to_dict()
    doc["engine_version"] = ENGINE_VERSION
    doc["id"] = instance_id if instance_id is not None else content_id("inst", inst.to_dict())
    return doc


def cost_document(inferred):
    doc = inferred.to_dict()
    doc["engine_version"] = ENGINE_VERSION
    return doc


def stats_document(table):
    doc = table.to_dict()
    doc["engine_version"] = ENGINE_VERSION
    return doc


def instance_id(inst):
    return content_id("inst", inst.to_dict())


def observations_id(obs):
    return content_id("obs", {"variables": list(obs.variables), "rows": obs.X.tolist()})
