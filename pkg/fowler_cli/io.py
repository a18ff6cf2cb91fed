"""CSV and JSON readers and writers for grids, trajectories and reports.

CSV floats are written with ``%.17g`` and JSON floats with Python's
shortest round-trip repr, so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
import logging
from collections.abc import Iterable, Sequence
from io import StringIO
from pathlib import Path
from typing import Any

import numpy as np

from fowler_core.errors import InvalidGrid
from fowler_core.invariants import hamiltonian_values
from fowler_core.model import Params
from fowler_core.ode.state import Trajectory
from fowler_core.shooting import AtlasRow
from fowler_core.transform import CylinderGrid, RadialGrid

logger = logging.getLogger(__name__)

ATLAS_COLUMNS = ("a", "b", "T_a", "H", "residual")


def format_float(value: float) -> str:
    return format(value, ".17g")


def _cell(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def render_rows(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    return buffer.getvalue()


def write_rows(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    Path(path).write_text(render_rows(header, rows), encoding="utf-8")


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2) + "\n"


def write_json(path: str | Path, payload: Any) -> None:
    Path(path).write_text(dumps(payload), encoding="utf-8")


# ---- trajectories -----------------------------------------------------------


def trajectory_header(p: int) -> list[str]:
    cols = ["t"]
    for block in ("v", "d1", "d2", "d3"):
        cols.extend(f"{block}_{i}" for i in range(1, p + 1))
    cols.append("H")
    return cols


def write_trajectory(path: str | Path, traj: Trajectory, params: Params) -> None:
    """One row per state: time, the block-ordered state and its Hamiltonian."""
    energies = hamiltonian_values(params, traj.values) if len(traj) else np.empty(0)
    rows = (
        [t, *values, h] for t, values, h in zip(traj.times, traj.values, energies, strict=True)
    )
    write_rows(path, trajectory_header(traj.p), rows)
    logger.info("wrote %d trajectory rows to %s", len(traj), path)


def events_payload(traj: Trajectory) -> dict[str, Any]:
    events = []
    for event in traj.events:
        entry: dict[str, Any] = {
            "t": event.t,
            "kind": event.kind.value,
            "component": event.component,
        }
        if event.extremum is not None:
            entry["extremum"] = event.extremum
        events.append(entry)
    return {"events": events, "terminal": traj.terminal.value}


def events_path(trajectory_path: str | Path) -> Path:
    """``orbit.csv`` -> ``orbit.events.json``."""
    path = Path(trajectory_path)
    return path.with_name(f"{path.stem}.events.json")


def write_events(path: str | Path, traj: Trajectory) -> None:
    write_json(path, events_payload(traj))


# ---- grids ---------------------------------------------------------------------


def _read_table(path: str | Path, first: str) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InvalidGrid(f"{path}: empty file") from None
        rows = [row for row in reader if row]
    if not header or header[0] != first or len(header) < 2:
        raise InvalidGrid(f"{path}: header must be '{first}' followed by at least one column")
    try:
        data = np.array([[float(x) for x in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise InvalidGrid(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise InvalidGrid(f"{path}: every row must have {len(header)} columns")
    return header, data


def read_radial_grid(path: str | Path) -> RadialGrid:
    """``r,u_1,...,u_p`` CSV."""
    _, data = _read_table(path, "r")
    return RadialGrid(data[:, 0], data[:, 1:])


def write_radial_grid(path: str | Path, grid: RadialGrid) -> None:
    header = ["r", *(f"u_{i}" for i in range(1, grid.p + 1))]
    write_rows(path, header, ([r, *u] for r, u in zip(grid.points, grid.values, strict=True)))


def read_cylinder_grid(path: str | Path) -> CylinderGrid:
    """``t,v_1,...,v_p`` CSV."""
    _, data = _read_table(path, "t")
    return CylinderGrid(data[:, 0], data[:, 1:])


def write_cylinder_grid(path: str | Path, grid: CylinderGrid) -> None:
    header = ["t", *(f"v_{i}" for i in range(1, grid.p + 1))]
    write_rows(path, header, ([t, *v] for t, v in zip(grid.times, grid.values, strict=True)))


# ---- atlas ------------------------------------------------------------------------


def write_atlas(path: str | Path, rows: Sequence[AtlasRow]) -> None:
    write_rows(path, ATLAS_COLUMNS, ([r.a, r.b, r.T_a, r.H, r.residual] for r in rows))
