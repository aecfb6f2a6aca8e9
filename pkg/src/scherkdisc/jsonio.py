"""Canonical JSON serialization: 17-significant-digit floats, stable layout.

Artifacts must be byte-identical across runs, so floats are formatted
explicitly instead of relying on the encoder default.
"""

from __future__ import annotations


def _fmt_float(x: float) -> str:
    if x != x:
        raise ValueError("NaN is not representable in canonical JSON")
    if x in (float("inf"), float("-inf")):
        raise ValueError("infinity is not representable in canonical JSON")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def canonical_dumps(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [canonical_dumps(v, indent + 1) for v in obj]
        inner = ",\n".join("  " * (indent + 1) + it for it in items)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            "  " * (indent + 1) + canonical_dumps(str(k), 0) + ": " + canonical_dumps(v, indent + 1)
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    # numpy scalars and the like
    try:
        return _fmt_float(float(obj))
    except (TypeError, ValueError):
        raise TypeError(f"cannot canonically serialize {type(obj)}")


def canonical_dump(obj, path):
    with open(path, "w") as fh:
        fh.write(canonical_dumps(obj))
        fh.write("\n")
