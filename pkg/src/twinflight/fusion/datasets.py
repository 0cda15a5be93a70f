"""Sampled aerodynamic datasets and their on-disk CSV + sidecar format."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

INPUT_COLUMNS = ("alpha", "beta")
RESPONSE_COLUMNS = ("CL", "CD", "Cm", "CY", "Cl", "Cn")


@dataclass
class Dataset:
    """Inputs and per-response outputs from one analysis source."""

    inputs: np.ndarray  # (n, m)
    outputs: dict[str, np.ndarray]  # response -> (n,)
    fidelity_tag: str
    bounds: list[tuple[float, float]]  # per input dimension
    input_names: tuple[str, ...] = INPUT_COLUMNS

    def __post_init__(self) -> None:
        self.inputs = np.asarray(self.inputs, dtype=float)
        if self.inputs.ndim != 2:
            raise ValueError("inputs must be a 2-D array")
        n, m = self.inputs.shape
        if n < m + 1:
            raise ValueError(f"need at least m+1={m + 1} samples, got {n}")
        if len(self.bounds) != m:
            raise ValueError("one bounds pair required per input dimension")
        lows = np.array([b[0] for b in self.bounds])
        highs = np.array([b[1] for b in self.bounds])
        if np.any(self.inputs < lows - 1e-9) or np.any(self.inputs > highs + 1e-9):
            raise ValueError(f"dataset {self.fidelity_tag!r} has inputs outside bounds")
        # Duplicate input rows make the correlation matrix exactly singular.
        order = np.lexsort(self.inputs.T[::-1])
        sorted_inputs = self.inputs[order]
        if n > 1:
            diffs = np.abs(np.diff(sorted_inputs, axis=0)).max(axis=1)
            if np.any(diffs < 1e-12):
                raise ValueError(f"dataset {self.fidelity_tag!r} contains duplicate input rows")
        for name, vec in self.outputs.items():
            arr = np.asarray(vec, dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"response {name!r} has shape {arr.shape}, expected ({n},)")
            self.outputs[name] = arr

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_dims(self) -> int:
        return self.inputs.shape[1]

    def response(self, name: str) -> np.ndarray:
        if name not in self.outputs:
            raise KeyError(f"dataset {self.fidelity_tag!r} has no response {name!r}")
        return self.outputs[name]


def save_dataset(ds: Dataset, csv_path: str | Path) -> None:
    """Write samples as CSV with a JSON sidecar carrying tag and bounds."""
    csv_path = Path(csv_path)
    responses = [r for r in RESPONSE_COLUMNS if r in ds.outputs]
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.input_names) + responses)
        for i in range(ds.n_samples):
            row = [repr(float(v)) for v in ds.inputs[i]]
            row += [repr(float(ds.outputs[r][i])) for r in responses]
            writer.writerow(row)
    sidecar = {
        "fidelity_tag": ds.fidelity_tag,
        "tool": ds.fidelity_tag,
        "bounds": [list(b) for b in ds.bounds],
        "input_names": list(ds.input_names),
    }
    with open(csv_path.with_suffix(".json"), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_dataset(csv_path: str | Path) -> Dataset:
    csv_path = Path(csv_path)
    if not csv_path.exists():
        raise FileNotFoundError(f"dataset file not found: {csv_path}")
    sidecar_path = csv_path.with_suffix(".json")
    if not sidecar_path.exists():
        raise FileNotFoundError(f"dataset sidecar not found: {sidecar_path}")
    with open(sidecar_path, encoding="utf-8") as fh:
        sidecar = json.load(fh)
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(c) for c in row] for row in reader if row]
    input_names = tuple(sidecar.get("input_names", INPUT_COLUMNS))
    m = len(input_names)
    if header[:m] != list(input_names):
        raise ValueError(f"{csv_path}: input columns {header[:m]} != {list(input_names)}")
    responses = header[m:]
    data = np.array(rows)
    outputs = {name: data[:, m + j] for j, name in enumerate(responses)}
    return Dataset(
        inputs=data[:, :m],
        outputs=outputs,
        fidelity_tag=sidecar["fidelity_tag"],
        bounds=[tuple(b) for b in sidecar["bounds"]],
        input_names=input_names,
    )
