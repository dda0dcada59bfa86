"""Turn REST API documentation into validated, callable tools."""

import json

from . import _core
from ._core import Doc2ToolError, canonical_url, estimate_causes, percent_decode, percent_encode, rank_combinations

__all__ = [
    "Doc2ToolError",
    "canonical_url",
    "estimate_causes",
    "export_function_source",
    "export_openapi",
    "generate_tools",
    "heuristic_extract",
    "percent_decode",
    "percent_encode",
    "rank_combinations",
    "run_pipeline",
    "validate_spec",
]


def validate_spec(spec):
    """Check an extracted spec (dict) and return {ok, violations, spec}."""
    return json.loads(_core.validate_spec(json.dumps(spec)))


def heuristic_extract(text):
    """Extract a spec dict from plain documentation text without a model."""
    return json.loads(_core.heuristic_extract(text))


def generate_tools(spec, source_id):
    """Build tool descriptors (dicts) for every endpoint of a valid spec."""
    return json.loads(_core.generate_tools(json.dumps(spec), source_id))


def export_function_source(tool):
    """Render a tool descriptor as a standalone Python function."""
    return _core.export_function_source(json.dumps(tool))


def export_openapi(tools, title=""):
    """Render same-host tools as an OpenAPI 3 YAML document."""
    return _core.export_openapi(json.dumps(tools), title)


def run_pipeline(config_path, stages=(), backend=None, seed=None, offline=False):
    """Run pipeline stages; returns (exit_code, log_text)."""
    return _core.run_pipeline(str(config_path), list(stages), backend, seed, offline)
