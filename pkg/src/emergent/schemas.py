"""JSON Schemas for every CLI config file.

These dicts are the source of truth; the copies under docs/ are rendered
from them verbatim.  Validation runs under draft-07 semantics so the
tuple form of ``items`` behaves identically across jsonschema versions.
"""

from __future__ import annotations

import jsonschema

from .errors import ValidationError

DRAFT = "http://json-schema.org/draft-07/schema#"

# a matrix/vector entry: plain real number or an [re, im] pair
COMPLEX_ENTRY = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

MATRIX = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": COMPLEX_ENTRY},
}

VECTOR = {"type": "array", "minItems": 1, "items": COMPLEX_ENTRY}

CLOCK_SYSTEM_SCHEMA = {
    "$schema": DRAFT,
    "title": "clock system",
    "description": "System Hamiltonian and initial state for the clock subcommand.",
    "type": "object",
    "required": ["hamiltonian", "initial_state"],
    "additionalProperties": False,
    "properties": {"hamiltonian": MATRIX, "initial_state": VECTOR},
}

THERMAL_LEVELS_SCHEMA = {
    "$schema": DRAFT,
    "title": "bath level table",
    "description": "Explicit bath levels as [energy, degeneracy] rows.",
    "type": "object",
    "required": ["levels"],
    "additionalProperties": False,
    "properties": {
        "levels": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "minItems": 2,
                "maxItems": 2,
                "items": {"type": "number"},
            },
        }
    },
}

BARRIER_TABLE_SCHEMA = {
    "$schema": DRAFT,
    "title": "barrier table",
    "description": "Sampled wavevector profile k(r) with strictly increasing r.",
    "type": "object",
    "required": ["r", "k"],
    "additionalProperties": False,
    "properties": {
        "r": {"type": "array", "minItems": 2, "items": {"type": "number"}},
        "k": {"type": "array", "minItems": 2, "items": {"type": "number"}},
    },
}

COSMO_CONFIG_SCHEMA = {
    "$schema": DRAFT,
    "title": "cosmo run config",
    "description": "Equation of state, quadratic source strength, initial data, "
    "and the output grid for one expansion history.",
    "type": "object",
    "required": ["omega_eos", "alpha", "a0", "rho0", "t_end"],
    "additionalProperties": False,
    "properties": {
        "omega_eos": {"type": "number", "exclusiveMinimum": -1},
        "alpha": {
            "oneOf": [
                {"type": "number", "minimum": 0},
                {"const": "default"},
            ]
        },
        "a0": {"type": "number", "exclusiveMinimum": 0},
        "rho0": {"type": "number", "exclusiveMinimum": 0},
        "t_end": {"type": "number", "exclusiveMinimum": 0},
        "n_samples": {"type": "integer", "minimum": 2},
    },
}

WITNESS_SYSTEM_SCHEMA = {
    "$schema": DRAFT,
    "title": "witness system",
    "description": "Hamiltonian with its tensor factorization and bipartition.",
    "type": "object",
    "required": ["hamiltonian", "factors", "bipartition"],
    "additionalProperties": False,
    "properties": {
        "hamiltonian": MATRIX,
        "factors": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "minItems": 2, "maxItems": 2},
        },
        "bipartition": {
            "type": "array",
            "minItems": 2,
            "maxItems": 2,
            "items": {"type": "array", "minItems": 1, "items": {"type": "string"}},
        },
    },
}

ALL_SCHEMAS = {
    "clock_system": CLOCK_SYSTEM_SCHEMA,
    "thermal_levels": THERMAL_LEVELS_SCHEMA,
    "barrier_table": BARRIER_TABLE_SCHEMA,
    "cosmo_config": COSMO_CONFIG_SCHEMA,
    "witness_system": WITNESS_SYSTEM_SCHEMA,
}


def validate_config(instance, schema: dict, source: str) -> None:
    """Raise ValidationError naming the source file and offending field."""
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.absolute_path))
    if not errors:
        return
    first = errors[0]
    parts = ["$"]
    for step in first.absolute_path:
        parts.append(f"[{step}]" if isinstance(step, int) else f".{step}")
    raise ValidationError(f"{source}: {''.join(parts)}: {first.message}")
