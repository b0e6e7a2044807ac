"""JSON schema for the CLI report envelope; tests validate every JSON
report against it."""

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "config", "results", "violations"],
    "additionalProperties": False,
    "properties": {
        "command": {"enum": ["validate", "align", "paths", "groupoid"]},
        "config": {
            "type": "object",
            "required": ["graph", "bound", "cutoff", "format"],
            "properties": {
                "graph": {"type": "string"},
                "bound": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                "cutoff": {"type": "integer", "minimum": 1},
                "blocks": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
                "format": {"enum": ["text", "json"]},
            },
            "additionalProperties": True,
        },
        "results": {"type": "object"},
        "violations": {"type": "integer", "minimum": 0},
    },
}

VERDICT_SCHEMA = {
    "type": "object",
    "required": ["element", "value"],
    "properties": {
        "element": {"type": "string"},
        "value": {"enum": ["True", "False", "UnknownAtBound"]},
        "witness": {
            "type": ["array", "null"],
            "items": {"type": "string"},
            "minItems": 2,
            "maxItems": 2,
        },
        "record": {"type": "object"},
    },
    "additionalProperties": False,
}

ELEMENT_SCHEMA = {
    "type": "object",
    "required": ["x", "q", "y", "cert"],
    "properties": {
        "x": {"type": "array", "items": {"type": "string"}},
        "q": {"type": "array", "items": {"type": "integer"}},
        "y": {"type": "array", "items": {"type": "string"}},
        "cert": {
            "type": "object",
            "required": ["m", "n"],
            "properties": {
                "m": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                "n": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            },
        },
    },
    "additionalProperties": False,
}
