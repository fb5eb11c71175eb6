"""JSON serialization helpers using optional orjson."""

from __future__ import annotations

try:
    import orjson  # type: ignore[import-not-found]
except ImportError:  # pragma: no cover - optional dependency
    orjson = None  # type: ignore[assignment]

import json
from pathlib import Path

import numpy as np


def _to_builtin(obj: object) -> object:
    """Convert numpy values that JSON encoders do not understand.

    Args:
        obj: Value rejected by the encoder.

    Returns:
        Equivalent built-in Python value.

    Throws:
        TypeError: If ``obj`` has no JSON representation.
    """

    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def json_dumps(data: object) -> str:
    """Serialize data to an indented JSON string.

    Both encoders use two-space indentation.

    Args:
        data: Data structure to serialize.

    Returns:
        JSON representation of ``data``.
    """

    # orjson is preferred when installed; both emit two-space indents.
    if orjson is not None:
        return orjson.dumps(
            data, option=orjson.OPT_INDENT_2, default=_to_builtin
        ).decode()
    return json.dumps(data, ensure_ascii=False, indent=2, default=_to_builtin)


def json_loads(data: str | bytes) -> object:
    """Deserialize JSON data from a string or bytes.

    Args:
        data: JSON content as ``str`` or ``bytes``.

    Returns:
        Parsed JSON object.
    """

    if orjson is not None:
        return orjson.loads(data)

    # Bytes are decoded as UTF-8 before the stdlib decoder sees them.
    if isinstance(data, (bytes, bytearray)):
        return json.loads(data.decode())
    return json.loads(data)


def write_json(path: Path, data: object) -> None:
    """Write ``data`` to ``path`` as JSON terminated by a newline.

    Args:
        path: Destination file.
        data: Data structure to serialize.
    """

    path.write_text(json_dumps(data) + "\n", encoding="utf-8")


def read_json(path: Path) -> object:
    """Read a JSON document from ``path``.

    Args:
        path: Source file.

    Returns:
        Parsed JSON object.
    """

    return json_loads(path.read_bytes())
