"""On-disk formats: CSV tables, the SEC1 binary matrix format, results JSON.

SEC1 layout, all little-endian::

    b"SEC1" | rows: uint64 | cols: uint64 | rows * cols float64, row-major

Results documents are UTF-8 JSON with the top-level keys in the order
``schema_version, kind, config, outputs, timing`` (``timing`` only when
present), nested object keys sorted, two-space indentation, and every float
written with 17 significant digits.
"""

import csv
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_int
from .exceptions import DataFormatError, InvalidArgumentError, SchemaVersionError
from .linalg import fix_signs
from .sap import ProjectionBasis
from .secants import SecantSet
from .synth import DataSet

MAGIC = b"SEC1"
_HEADER = struct.Struct("<4sQQ")
SCHEMA_VERSION = 1
_MAX_ELEMENTS = (2**63 - 1) // 8


def _fmt(x):
    return format(float(x), ".17g")


def load_csv(path, has_header=False):
    """Read a rectangular numeric CSV into a DataSet, one point per row."""
    path = Path(path)
    rows = []
    width = None
    with path.open(newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if has_header and lineno == 1:
                continue
            if not record or all(not cell.strip() for cell in record):
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise DataFormatError(
                    f"{path}: ragged row {lineno} has {len(record)} columns, expected {width}"
                )
            values = []
            for col, cell in enumerate(record, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataFormatError(
                        f"{path}: row {lineno}, column {col}: {cell!r} is not a number"
                    ) from None
                if not math.isfinite(value):
                    raise DataFormatError(
                        f"{path}: row {lineno}, column {col}: non-finite value {cell!r}"
                    )
                values.append(value)
            rows.append(values)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return DataSet(np.array(rows), {"source": str(path)})


def save_csv(matrix, path, header=None):
    """Write a 2-D array as CSV with 17-significant-digit floats."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise InvalidArgumentError("save_csv expects a 2-D array")
    with Path(path).open("w", newline="") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in matrix:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def save_matrix_binary(matrix, path):
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise InvalidArgumentError("binary matrices must be 2-D")
    if not np.all(np.isfinite(matrix)):
        raise InvalidArgumentError("binary matrices must be finite")
    rows, cols = matrix.shape
    with Path(path).open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols))
        fh.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())


def load_matrix_binary(path):
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 4 or raw[:4] != MAGIC:
        raise DataFormatError(f"{path}: bad magic {raw[:4]!r}, expected {MAGIC!r}")
    if len(raw) < _HEADER.size:
        raise DataFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    _, rows, cols = _HEADER.unpack_from(raw)
    if cols and rows > _MAX_ELEMENTS // cols:
        raise DataFormatError(f"{path}: size overflow for a {rows}x{cols} matrix")
    expected = _HEADER.size + rows * cols * 8
    if len(raw) < expected:
        raise DataFormatError(
            f"{path}: truncated payload, {len(raw)} bytes for a {rows}x{cols} matrix "
            f"(need {expected})"
        )
    if len(raw) > expected:
        raise DataFormatError(f"{path}: {len(raw) - expected} trailing bytes after payload")
    data = np.frombuffer(raw, dtype="<f8", count=rows * cols, offset=_HEADER.size)
    return data.astype(np.float64).reshape(rows, cols)


def _is_csv(path):
    return Path(path).suffix.lower() == ".csv"


def load_dataset(path, has_header=False):
    """Load points from CSV (by suffix) or from a SEC1 binary file."""
    if _is_csv(path):
        return load_csv(path, has_header=has_header)
    points = load_matrix_binary(path)
    if points.shape[0] == 0 or points.shape[1] == 0:
        raise DataFormatError(f"{path}: empty matrix")
    if not np.all(np.isfinite(points)):
        raise DataFormatError(f"{path}: non-finite entries")
    return DataSet(points, {"source": str(path)})


def save_dataset(data, path):
    if _is_csv(path):
        save_csv(data.points, path)
    else:
        save_matrix_binary(data.points, path)


def save_basis(basis, path):
    """Write the (n, m) basis; CSV has n rows and m columns."""
    if _is_csv(path):
        save_csv(basis.columns, path)
    else:
        save_matrix_binary(basis.columns, path)


def load_basis(path):
    if _is_csv(path):
        return ProjectionBasis(load_csv(path).points)
    return ProjectionBasis(load_matrix_binary(path))


def _sidecar(path):
    path = Path(path)
    return path.with_name(path.name + ".json")


def save_secants(secants, path):
    """SEC1 file holding the (n, p) matrix plus a JSON sidecar ``<path>.json``."""
    save_matrix_binary(secants.secants, path)
    meta = {
        "n": secants.n,
        "p": secants.p,
        "threshold": secants.threshold,
        "dropped_duplicates": secants.dropped_duplicates,
        "dropped_short": secants.dropped_short,
        "lengths": secants.lengths,
        "pairs": None if secants.pairs is None else secants.pairs,
    }
    _sidecar(path).write_text(dumps_json(meta), encoding="utf-8")


def load_secants(path):
    S = np.asfortranarray(load_matrix_binary(path))
    try:
        meta = json.loads(_sidecar(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{_sidecar(path)}: malformed JSON ({exc})") from exc
    lengths = np.array(meta["lengths"], dtype=np.float64)
    pairs = None if meta["pairs"] is None else np.array(meta["pairs"], dtype=np.intp)
    if lengths.shape != (S.shape[1],):
        raise DataFormatError(f"{path}: sidecar lists {lengths.size} lengths for {S.shape[1]} secants")
    return SecantSet(
        S, lengths, pairs, meta["threshold"], meta["dropped_duplicates"], meta["dropped_short"]
    )


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise InvalidArgumentError(f"cannot serialize {type(obj).__name__} to JSON")


def _float_token(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = _fmt(x)
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _emit(obj, indent, out, sort_keys=True):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        keys = sorted(obj) if sort_keys else list(obj)
        out.append("{\n")
        for i, key in enumerate(keys):
            out.append(f"{pad}  {json.dumps(key, ensure_ascii=False)}: ")
            _emit(obj[key], indent + 1, out)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
        elif all(not isinstance(v, (dict, list)) for v in obj):
            out.append("[")
            for i, v in enumerate(obj):
                if i:
                    out.append(", ")
                _emit(v, indent, out)
            out.append("]")
        else:
            out.append("[\n")
            for i, v in enumerate(obj):
                out.append(pad + "  ")
                _emit(v, indent + 1, out)
                out.append(",\n" if i < len(obj) - 1 else "\n")
            out.append(pad + "]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float_token(obj))
    elif obj is None:
        out.append("null")
    else:
        out.append(json.dumps(obj, ensure_ascii=False))


def dumps_json(obj, sort_keys=True):
    """Serialize with sorted keys and 17-significant-digit floats."""
    out = []
    _emit(_plain(obj), 0, out, sort_keys)
    return "".join(out) + "\n"


@dataclass
class ResultsDocument:
    kind: str
    config: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    timing: dict = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self):
        doc = {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "config": _plain(self.config),
            "outputs": _plain(self.outputs),
        }
        if self.timing is not None:
            doc["timing"] = _plain(self.timing)
        return doc


def dumps_results(doc):
    return dumps_json(doc.to_dict(), sort_keys=False)


def write_results(doc, path):
    Path(path).write_text(dumps_results(doc), encoding="utf-8")


def loads_results(text, source="<string>"):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{source}: malformed JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise DataFormatError(f"{source}: top level must be an object")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"{source}: unsupported schema_version {version!r} (expected {SCHEMA_VERSION})"
        )
    missing = [key for key in ("kind", "config", "outputs") if key not in raw]
    if missing:
        raise DataFormatError(f"{source}: missing keys {missing}")
    unknown = set(raw) - {"schema_version", "kind", "config", "outputs", "timing"}
    if unknown:
        raise DataFormatError(f"{source}: unknown keys {sorted(unknown)}")
    return ResultsDocument(
        kind=raw["kind"],
        config=raw["config"],
        outputs=raw["outputs"],
        timing=raw.get("timing"),
        schema_version=version,
    )


def read_results(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"{path}: not UTF-8 ({exc})") from exc
    return loads_results(text, str(path))


CURVE_HEADER = ("dim", "min_norm", "run_id")


def write_curves_csv(curves, path):
    """One row per (dimension, run); ``curves`` is a list of DimensionCurve."""
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(CURVE_HEADER) + "\n")
        for run_id, curve in enumerate(curves):
            for dim, value in zip(curve.dims, curve.min_norms):
                fh.write(f"{dim},{_fmt(value)},{run_id}\n")


def read_curves_csv(path):
    """Return ``{run_id: (dims, min_norms)}`` in file order."""
    from .analysis import DimensionCurve

    path = Path(path)
    runs = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CURVE_HEADER:
            raise DataFormatError(f"{path}: expected header {','.join(CURVE_HEADER)}")
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != 3:
                raise DataFormatError(f"{path}: row {lineno} has {len(record)} columns, expected 3")
            try:
                dim, value, run_id = int(record[0]), float(record[1]), int(record[2])
            except ValueError:
                raise DataFormatError(f"{path}: row {lineno} is not (int, float, int)") from None
            runs.setdefault(run_id, ([], []))
            runs[run_id][0].append(dim)
            runs[run_id][1].append(value)
    if not runs:
        raise DataFormatError(f"{path}: no curve rows")
    return [
        DimensionCurve(dims, norms, meta={"run_id": run_id, "source": str(path)})
        for run_id, (dims, norms) in runs.items()
    ]


def pca_preprocess(data, target_dim):
    """Center the data and keep its top ``target_dim`` principal coordinates.

    Returns ``(reduced, basis, mean)``; ``reduced.points @ basis.columns.T + mean``
    reconstructs the input when nothing outside the kept subspace was lost.
    """
    target_dim = check_int(target_dim, "target_dim", minimum=1)
    if target_dim > min(data.k, data.n):
        raise InvalidArgumentError(
            f"target_dim={target_dim} exceeds min(k, n) = {min(data.k, data.n)}"
        )
    mean = data.points.mean(axis=0)
    centered = data.points - mean
    _, _, Vt = np.linalg.svd(centered, full_matrices=False)
    (components,) = fix_signs(Vt[:target_dim].T)
    basis = ProjectionBasis(components)
    reduced = DataSet(
        centered @ components,
        dict(data.meta, pca_dim=target_dim),
    )
    return reduced, basis, mean
