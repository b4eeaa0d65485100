"""Deterministic report files: CSV for bulk numerics, JSON for summaries.

Every writer is atomic (temp file in the target directory, then rename)
and byte-stable: floats print as %.17g, JSON keys are sorted, newlines
are plain \\n.  Non-finite floats become null in JSON and print as
nan/inf in CSV.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

import numpy as np

from .errors import ValidationError

SCHEMA_VERSION = "1"


def format_float(value) -> str:
    return f"{float(value):.17g}"


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def _atomic_write_bytes(path: str, payload: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".partial-")
    except OSError as exc:
        raise ValidationError(f"cannot write to {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        mask = os.umask(0)
        os.umask(mask)
        os.chmod(tmp, 0o666 & ~mask)
        os.replace(tmp, path)
    except OSError as exc:
        os.unlink(tmp)
        raise ValidationError(f"cannot write to {path}: {exc}") from exc


def write_csv(path: str, header, rows) -> None:
    """Fixed header row, then formatted rows; empty ``rows`` leaves
    a header-only file."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([_format_cell(cell) for cell in row])
    _atomic_write_bytes(path, buffer.getvalue().encode("utf-8"))


def render_json(document) -> str:
    """Serialize with sorted keys, two-space indent, %.17g floats."""

    def emit(node, depth):
        pad = "  " * depth
        if isinstance(node, dict):
            if not node:
                return "{}"
            keys = sorted(node)
            body = ",\n".join(
                f'{pad}  {json.dumps(str(key))}: {emit(node[key], depth + 1)}' for key in keys
            )
            return "{\n" + body + "\n" + pad + "}"
        if isinstance(node, (list, tuple)):
            if not node:
                return "[]"
            body = ",\n".join(f"{pad}  {emit(item, depth + 1)}" for item in node)
            return "[\n" + body + "\n" + pad + "]"
        if isinstance(node, bool):
            return "true" if node else "false"
        if isinstance(node, (int, np.integer)):
            return str(int(node))
        if isinstance(node, (float, np.floating)):
            value = float(node)
            if not math.isfinite(value):
                return "null"
            return format_float(value)
        if isinstance(node, str):
            return json.dumps(node)
        if node is None:
            return "null"
        raise ValidationError(f"cannot serialize {type(node).__name__} to JSON")

    return emit(document, 0) + "\n"


def write_json(path: str, document) -> None:
    _atomic_write_bytes(path, render_json(document).encode("utf-8"))


def write_png(path: str, payload: bytes) -> None:
    _atomic_write_bytes(path, payload)
