"""CSV reading/writing and run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from .errors import DataFormatError


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def write_csv(path, header, columns) -> None:
    """Write equal-length columns under a single header row (RFC 4180, CRLF-free)."""
    path = Path(path)
    columns = [np.asarray(c) if not isinstance(c, list) else c for c in columns]
    n = len(columns[0]) if columns else 0
    if any(len(c) != n for c in columns):
        raise ValueError("all columns must have equal length")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(n):
            w.writerow([_fmt(c[i]) for c in columns])


def read_csv(path, required=None) -> dict[str, np.ndarray]:
    """Read a numeric CSV into ``{column: float array}``."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataFormatError(f"{path} is empty", line=1) from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataFormatError(
                    f"expected {len(header)} fields, found {len(row)}", line=lineno
                )
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise DataFormatError(f"non-numeric field ({exc})", line=lineno) from None
    missing = [c for c in (required or ()) if c not in header]
    if missing:
        raise DataFormatError(f"{path}: missing column(s) {', '.join(missing)}; have {', '.join(header)}")
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {h: data[:, i] for i, h in enumerate(header)}


def write_kv(path, items: dict) -> None:
    write_csv(path, ["key", "value"], [list(items.keys()), [_fmt(v) for v in items.values()]])


def read_kv(path) -> dict[str, str]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["key", "value"]:
            raise DataFormatError(f"{path}: expected header 'key,value'", line=1)
        out = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataFormatError("expected 2 fields", line=lineno)
            out[row[0]] = row[1]
    return out


def read_config(path) -> dict[str, str]:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataFormatError(f"{path}: expected key=value", line=lineno)
            key, value = (p.strip() for p in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest_path(out) -> Path:
    out = Path(out)
    if out.is_dir():
        return out / "manifest.json"
    return out.with_name(out.name + ".manifest.json")


def write_manifest(out, manifest: dict) -> Path:
    path = manifest_path(out)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    os.replace(tmp, path)
    return path


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.ndarray,)):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(type(o))
