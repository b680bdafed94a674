"""
Artifact Codecs - CSV and JSON persistence of measures, plans and controls

Floats are written with ``repr`` so every value parses back to the identical
double.

File layouts:
    measure CSV: header ``x0,...,x{n-1},w``, one atom per row
    plan CSV:    header ``i,j,mass``, one entry per row
    control:     JSON ``{"M": int, "k": int, "values": [[...] x M]}``
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np

from ..core.errors import MeasureError
from ..dynamics.control import ControlSchedule
from ..transport.measure import DiscreteMeasure, build_measure
from ..transport.plan import CouplingPlan

PathLike = Union[str, Path]


def _fmt(value: float) -> str:
    return repr(float(value))


def write_table(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a CSV table; floats are formatted losslessly"""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def read_table(path: PathLike) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def write_measure_csv(path: PathLike, measure: DiscreteMeasure) -> Path:
    header = [f"x{d}" for d in range(measure.dim)] + ["w"]
    rows = (list(atom) + [w] for atom, w in zip(measure.atoms.tolist(), measure.weights.tolist()))
    return write_table(path, header, rows)


def read_measure_csv(path: PathLike) -> DiscreteMeasure:
    """
    Read a measure CSV

    Weights that already sum to one are kept bit for bit; anything else is
    normalized and zero-weight rows are dropped.

    Raises:
        MeasureError: Missing weight column, malformed rows or invalid weights
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise MeasureError(f"Measure file {path} is empty") from None
        if not header or header[-1] != "w":
            raise MeasureError(f"Measure file {path} lacks a trailing 'w' column")
        try:
            data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
        except ValueError as e:
            raise MeasureError(f"Malformed row in {path}: {e}") from e
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] != len(header):
        raise MeasureError(f"Measure file {path} has no consistent rows")
    atoms, weights = data[:, :-1], data[:, -1]
    if np.all(weights > 0.0) and abs(weights.sum() - 1.0) <= 1e-12:
        return DiscreteMeasure(atoms=atoms, weights=weights)
    return build_measure(atoms, weights)


def write_plan_csv(path: PathLike, plan: CouplingPlan) -> Path:
    return write_table(path, ["i", "j", "mass"], ([i, j, m] for i, j, m in plan.entries()))


def read_plan_csv(path: PathLike, n1: int, n2: int) -> CouplingPlan:
    try:
        entries = [(int(r["i"]), int(r["j"]), float(r["mass"])) for r in read_table(path)]
    except (KeyError, ValueError) as e:
        raise MeasureError(f"Malformed plan file {path}: {e}") from e
    return CouplingPlan.from_entries(n1, n2, entries)


def write_json(path: PathLike, data: Dict[str, Any]) -> Path:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline"""
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_control(path: PathLike, control: ControlSchedule) -> Path:
    return write_json(path, control.to_dict())


def read_control(path: PathLike) -> ControlSchedule:
    return ControlSchedule.from_json(Path(path).read_text(encoding="utf-8"))
