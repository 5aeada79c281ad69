"""Figure-reproduction scripts for the hyperbox CSV outputs.

Standalone consumers of the simulator's files: each script takes --in /
--out, validates the input schema exactly, and renders PNG or SVG without
recomputing any statistics.
"""

__version__ = "0.1.0"

from .io import SCHEMAS, SchemaError, read_rows

__all__ = ["SCHEMAS", "SchemaError", "read_rows"]
