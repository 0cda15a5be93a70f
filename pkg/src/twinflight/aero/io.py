"""On-disk format for aerodynamic databases.

A database directory holds one `manifest.json` plus one CSV per table.
CSV layout: header row of axis names followed by "value", then one row
per grid tuple in row-major order. Floats are written with repr so a
save/load round trip is bit-exact.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .database import AeroDatabase, CoefficientTables, COEFFICIENTS
from .tables import AeroTable

MANIFEST_NAME = "manifest.json"


class DatabaseFormatError(ValueError):
    """Raised when a database directory fails schema or grid validation."""


def _axis_unit(name: str) -> str:
    if name in ("alpha", "beta") or name.startswith("delta_"):
        return "deg"
    if name in ("p_hat", "q_hat", "r_hat"):
        return "rad/s"
    return "dimensionless"


def _table_entry(filename: str, table: AeroTable) -> dict:
    return {
        "file": filename,
        "axes": list(table.axis_names),
        "units": [_axis_unit(a) for a in table.axis_names],
    }


def _write_table_csv(path: Path, table: AeroTable) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(table.axis_names) + ["value"])
        for flat, value in enumerate(table.values):
            coords = []
            rem = flat
            for stride, grid in zip(table.strides, table.axis_grids):
                coords.append(grid[rem // stride])
                rem %= stride
            writer.writerow([repr(c) for c in coords] + [repr(value)])


def _read_table_csv(path: Path, expected_axes: list[str]) -> AeroTable:
    if not path.exists():
        raise DatabaseFormatError(f"table file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatabaseFormatError(f"{path}: empty table file") from None
        if header[-1] != "value":
            raise DatabaseFormatError(f"{path}: last column must be 'value'")
        axes = header[:-1]
        if axes != expected_axes:
            raise DatabaseFormatError(
                f"{path}: axis columns {axes} do not match manifest {expected_axes}"
            )
        rows = [[float(cell) for cell in row] for row in reader if row]
    if not rows:
        raise DatabaseFormatError(f"{path}: no data rows")

    # Recover each axis grid from the row-major ordering: unique values in
    # order of first appearance.
    grids: list[list[float]] = []
    for col in range(len(axes)):
        seen: list[float] = []
        for row in rows:
            if row[col] not in seen:
                seen.append(row[col])
        grids.append(seen)
    for name, grid in zip(axes, grids):
        if any(grid[i + 1] <= grid[i] for i in range(len(grid) - 1)):
            raise DatabaseFormatError(
                f"{path}: axis {name!r} grid is not strictly increasing"
            )
    expected_rows = 1
    for grid in grids:
        expected_rows *= len(grid)
    if len(rows) != expected_rows:
        raise DatabaseFormatError(
            f"{path}: {len(rows)} rows but grid sizes imply {expected_rows}"
        )
    # Verify the rows really are the row-major product of the grids.
    strides = [1] * len(grids)
    for i in range(len(grids) - 2, -1, -1):
        strides[i] = strides[i + 1] * len(grids[i + 1])
    for flat, row in enumerate(rows):
        rem = flat
        for col, (stride, grid) in enumerate(zip(strides, grids)):
            if row[col] != grid[rem // stride]:
                raise DatabaseFormatError(
                    f"{path}: row {flat + 2} breaks row-major grid order on axis "
                    f"{axes[col]!r}"
                )
            rem %= stride
    values = tuple(row[-1] for row in rows)
    try:
        return AeroTable(tuple(axes), tuple(tuple(g) for g in grids), values)
    except ValueError as exc:
        raise DatabaseFormatError(f"{path}: {exc}") from exc


def save_database(db: AeroDatabase, path: str | Path) -> None:
    """Write the database as manifest.json plus one CSV per table."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    manifest: dict = {
        "format": "twinflight-aerodb/1",
        "geometry": {
            "wingspan": db.wingspan,
            "mean_chord": db.mean_chord,
            "reference_area": db.reference_area,
        },
        "coefficients": {},
    }
    for name in COEFFICIENTS:
        tables = db.coefficients[name]
        entry: dict = {}
        base_file = f"{name}_baseline.csv"
        _write_table_csv(root / base_file, tables.baseline)
        entry["baseline"] = _table_entry(base_file, tables.baseline)
        entry["rate_increments"] = {}
        for rate, table in sorted(tables.rate_increments.items()):
            fname = f"{name}_rate_{rate}.csv"
            _write_table_csv(root / fname, table)
            entry["rate_increments"][rate] = _table_entry(fname, table)
        entry["control_increments"] = {}
        for surface, table in sorted(tables.control_increments.items()):
            fname = f"{name}_ctrl_{surface}.csv"
            _write_table_csv(root / fname, table)
            entry["control_increments"][surface] = _table_entry(fname, table)
        manifest["coefficients"][name] = entry
    with open(root / MANIFEST_NAME, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_database(path: str | Path) -> AeroDatabase:
    """Load and validate a database directory written by save_database."""
    root = Path(path)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.exists():
        raise DatabaseFormatError(f"manifest not found: {manifest_path}")
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DatabaseFormatError(f"{manifest_path}: invalid JSON ({exc})") from exc
    if manifest.get("format") != "twinflight-aerodb/1":
        raise DatabaseFormatError(
            f"{manifest_path}: unsupported format {manifest.get('format')!r}"
        )
    try:
        geom = manifest["geometry"]
        coeff_entries = manifest["coefficients"]
    except KeyError as exc:
        raise DatabaseFormatError(f"{manifest_path}: missing key {exc}") from exc

    coefficients = {}
    for name in COEFFICIENTS:
        if name not in coeff_entries:
            raise DatabaseFormatError(f"{manifest_path}: missing coefficient {name!r}")
        entry = coeff_entries[name]
        baseline = _read_table_csv(root / entry["baseline"]["file"], entry["baseline"]["axes"])
        rates = {
            rate: _read_table_csv(root / spec["file"], spec["axes"])
            for rate, spec in entry.get("rate_increments", {}).items()
        }
        controls = {
            surface: _read_table_csv(root / spec["file"], spec["axes"])
            for surface, spec in entry.get("control_increments", {}).items()
        }
        coefficients[name] = CoefficientTables(
            baseline=baseline, rate_increments=rates, control_increments=controls
        )
    try:
        db = AeroDatabase(
            coefficients=coefficients,
            wingspan=float(geom["wingspan"]),
            mean_chord=float(geom["mean_chord"]),
            reference_area=float(geom["reference_area"]),
        )
        db.validate_zero_perturbation()
    except ValueError as exc:
        raise DatabaseFormatError(f"{root}: {exc}") from exc
    return db
