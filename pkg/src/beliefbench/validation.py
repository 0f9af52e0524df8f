"""Loading and applying the published JSON Schemas.

Every payload the HTTP service accepts or emits has a schema file under
``beliefbench/schemas/``; these are the shared contract with any client.
Schema validation covers structure only. Domain rules a JSON Schema cannot
express (ball totals, histogram bin count, fit preconditions) live in the
dataclass constructors and surface through the same ValidationError type.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema
from referencing import Registry, Resource

from .errors import ValidationError

__all__ = ["SCHEMA_NAMES", "load_schema", "validate_payload"]

SCHEMA_NAMES = (
    "belief",
    "study-config",
    "response-submission",
    "participant-record",
    "step-spec",
    "analysis-report",
)


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise KeyError(f"unknown schema {name!r}")
    path = resources.files("beliefbench.schemas").joinpath(f"{name}.schema.json")
    return json.loads(path.read_text())


@lru_cache(maxsize=1)
def _registry() -> Registry:
    pairs = []
    for name in SCHEMA_NAMES:
        doc = load_schema(name)
        pairs.append((doc["$id"], Resource.from_contents(doc)))
    return Registry().with_resources(pairs)


@lru_cache(maxsize=None)
def _validator(name: str) -> jsonschema.Draft202012Validator:
    return jsonschema.Draft202012Validator(load_schema(name), registry=_registry())


def validate_payload(instance, schema_name: str) -> None:
    """Raise ValidationError at the first (shallowest) schema violation."""
    errors = sorted(
        _validator(schema_name).iter_errors(instance),
        key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))),
    )
    if errors:
        err = errors[0]
        raise ValidationError(err.message, path=tuple(str(p) for p in err.absolute_path))
