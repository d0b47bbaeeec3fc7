"""Reading three-group CSV data and writing surfaces, draws and study tables.

Floats are written in Python's shortest round-trip form (``repr``), so reading
a file back reproduces every value bit for bit. All files are UTF-8 with LF
line endings.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import ProbabilityGrid, RocSurfaceEstimate, ThreeGroupSample

__all__ = [
    "DataParseError",
    "TMT_SHA256",
    "TMT_LABELS",
    "format_float",
    "load_csv",
    "load_tmt",
    "tmt_path",
    "sha256_file",
    "write_surface_csv",
    "read_surface_csv",
    "write_draws_csv",
    "write_band_csv",
    "write_study_csv",
    "write_json",
]

TMT_LABELS = ("U", "MCI", "D")
TMT_SIZES = (170, 52, 23)
TMT_SHA256 = "9f5c03c73702baea52c94537079be9a4ca57b6e0a77e6db16e5f503a750e0e32"


class DataParseError(ValueError):
    """Malformed input data; ``line`` is the 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def format_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_csv(
    path,
    group_column: str = "group",
    value_column: str = "value",
    label_map: Optional[Mapping[str, int] | Sequence[str]] = None,
) -> ThreeGroupSample:
    """Read a long-format CSV into a :class:`ThreeGroupSample`.

    ``label_map`` maps raw labels to groups 1, 2, 3; a sequence of three labels
    is read in that order. By default the labels must be ``1``, ``2``, ``3``.
    Row order within each group is preserved.
    """
    if label_map is None:
        label_map = {"1": 1, "2": 2, "3": 3}
    elif not isinstance(label_map, Mapping):
        labels = list(label_map)
        if len(labels) != 3:
            raise DataParseError("label order must name exactly three labels")
        label_map = {str(lab): k + 1 for k, lab in enumerate(labels)}
    label_map = {str(k): int(v) for k, v in label_map.items()}
    if sorted(set(label_map.values())) != [1, 2, 3]:
        raise DataParseError("label map must cover groups 1, 2 and 3")

    groups: dict[int, list[float]] = {1: [], 2: [], 3: []}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (group_column, value_column):
            if col not in header:
                raise DataParseError(f"missing column {col!r} (have {header})", line=1)
        for row in reader:
            line = reader.line_num
            label = (row[group_column] or "").strip()
            if label not in label_map:
                raise DataParseError(f"unknown group label {label!r}", line=line)
            raw = (row[value_column] or "").strip()
            try:
                value = float(raw)
            except ValueError:
                raise DataParseError(f"cannot parse value {raw!r}", line=line) from None
            if not math.isfinite(value):
                raise DataParseError(f"non-finite value {raw!r}", line=line)
            groups[label_map[label]].append(value)
    inverse = {v: k for k, v in label_map.items()}
    for g in (1, 2, 3):
        if not groups[g]:
            raise DataParseError(f"no rows for group label {inverse[g]!r}")
    return ThreeGroupSample(groups[1], groups[2], groups[3])


def tmt_path() -> Path:
    """Location of the bundled Trail Making Test Part A file."""
    return Path(str(resources.files("rocsbb.data").joinpath("tmt_part_a.csv")))


def load_tmt() -> ThreeGroupSample:
    """Bundled TMT Part A completion times (seconds): unimpaired, MCI, dementia."""
    path = tmt_path()
    digest = sha256_file(path)
    if digest != TMT_SHA256:
        raise DataParseError(f"bundled TMT file checksum mismatch: {digest}")
    sample = load_csv(path, label_map=TMT_LABELS)
    if sample.sizes != TMT_SIZES:
        raise DataParseError(f"bundled TMT group sizes {sample.sizes} != {TMT_SIZES}")
    return sample


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_surface_csv(path, surface: RocSurfaceEstimate) -> None:
    """Columns ``p1,p3,rocs``; p1-major row order."""
    p1, p3 = surface.grid.p1_points, surface.grid.p3_points
    rows = (
        (format_float(p1[i]), format_float(p3[j]), format_float(surface.values[i, j]))
        for i in range(p1.size)
        for j in range(p3.size)
    )
    _write_rows(path, ("p1", "p3", "rocs"), rows)


def read_surface_csv(path) -> RocSurfaceEstimate:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["p1", "p3", "rocs"]:
            raise DataParseError(f"expected header p1,p3,rocs, got {reader.fieldnames}", line=1)
        data = np.array([[float(r["p1"]), float(r["p3"]), float(r["rocs"])] for r in reader])
    p1 = np.unique(data[:, 0])
    p3 = np.unique(data[:, 1])
    if data.shape[0] != p1.size * p3.size:
        raise DataParseError("surface file is not a complete grid")
    values = data[:, 2].reshape(p1.size, p3.size)
    return RocSurfaceEstimate(ProbabilityGrid(p1, p3), values)


def write_draws_csv(path, draws) -> None:
    _write_rows(path, ("draw", "vus"), ((k, format_float(v)) for k, v in enumerate(draws)))


def write_band_csv(path, band) -> None:
    rows = (
        tuple(format_float(v) for v in row)
        for row in zip(band.z, band.mean, band.lower, band.upper)
    )
    _write_rows(path, ("z", "mean", "lower", "upper"), rows)


STUDY_COLUMNS = (
    "dataset",
    "estimator",
    "emse",
    "vus",
    "ci_lower",
    "ci_upper",
    "covered",
    "bandwidth_branch",
    "error",
)


def write_study_csv(path, result) -> None:
    def cell(v):
        if isinstance(v, bool):
            return str(v).lower()
        if v is None:
            return ""
        if isinstance(v, float):
            return format_float(v)
        return v

    rows = ([cell(getattr(r, c)) for c in STUDY_COLUMNS] for r in result.records)
    _write_rows(path, STUDY_COLUMNS, rows)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def write_json(path, obj) -> None:
    text = json.dumps(_jsonable(obj), indent=2, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")
