"""Synthetic stand-ins for the external aerodynamic analysis tools.

Real database construction ingests CSV exports from panel/empirical codes
and RANS CFD. Those tools are not runnable at desk scale, so this module
provides an analytic ground-truth coefficient model plus per-tool
distortion profiles that reproduce the character of each source: broad
low-fidelity coverage with systematic bias, and a handful of accurate
high-fidelity samples. The "avl"-like profile carries the exaggerated
lift and nose-down pitching moment that makes single-source databases
misbehave in closed-loop simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datasets import RESPONSE_COLUMNS, Dataset
from .sampling import lhs_sample

ALPHA_RANGE = (-20.0, 30.0)
BETA_RANGE = (0.0, 20.0)
DEFAULT_BOUNDS = [ALPHA_RANGE, BETA_RANGE]

LF_TOOLS = ("hetlas", "avl", "xflr5")
HF_TOOL = "cfd"

LF_SAMPLE_COUNT = 1200
HF_SAMPLE_COUNT = 25


def truth_coefficients(alpha_deg: float, beta_deg: float) -> dict[str, float]:
    """Ground-truth clean-configuration coefficients at one condition.

    Smooth low-order model of a statically stable boxed-wing airframe:
    lift softens toward stall, drag is parabolic in lift, and the pitching
    moment crosses zero at a small positive angle of attack.
    """
    a = math.radians(alpha_deg)
    b = math.radians(beta_deg)
    cl = 0.35 + 4.2 * a - 1.1 * a**3 - 0.30 * b * b
    cd = 0.035 + 0.055 * cl * cl + 0.35 * b * b
    cm = 0.040 - 0.85 * a - 0.12 * b * b
    cy = -0.60 * b + 0.05 * a * b
    cl_roll = -0.07 * b + 0.02 * a * b
    cn = 0.09 * b - 0.015 * a * b
    return {"CL": cl, "CD": cd, "Cm": cm, "CY": cy, "Cl": cl_roll, "Cn": cn}


@dataclass(frozen=True)
class ToolProfile:
    """Systematic distortion of the truth model for one analysis tool."""

    name: str
    scale: dict[str, float]
    offset: dict[str, float]
    alpha_warp: float  # deg of effective angle-of-attack shift
    noise_sd: float

    def evaluate(self, alpha_deg: float, beta_deg: float) -> dict[str, float]:
        base = truth_coefficients(alpha_deg + self.alpha_warp, beta_deg)
        return {
            k: self.scale.get(k, 1.0) * v + self.offset.get(k, 0.0)
            for k, v in base.items()
        }


def _uniform_profile(name, scale, offset, alpha_warp, noise_sd) -> ToolProfile:
    return ToolProfile(
        name=name,
        scale={k: scale for k in RESPONSE_COLUMNS},
        offset={k: offset for k in RESPONSE_COLUMNS},
        alpha_warp=alpha_warp,
        noise_sd=noise_sd,
    )


TOOL_PROFILES: dict[str, ToolProfile] = {
    # Empirical/handbook tool: consistent mild overprediction.
    "hetlas": _uniform_profile("hetlas", scale=1.08, offset=0.015, alpha_warp=0.8, noise_sd=2e-3),
    # Vortex-lattice tool: too much lift, strongly nose-down pitching moment.
    "avl": ToolProfile(
        name="avl",
        scale={"CL": 1.30, "CD": 0.80, "Cm": 1.10, "CY": 1.20, "Cl": 1.15, "Cn": 1.20},
        offset={"CL": 0.15, "CD": -0.010, "Cm": -0.16, "CY": 0.020, "Cl": 0.012, "Cn": 0.015},
        alpha_warp=-1.2,
        noise_sd=2e-3,
    ),
    # Panel tool: slight underprediction with a small alpha shift.
    "xflr5": _uniform_profile("xflr5", scale=0.93, offset=-0.018, alpha_warp=0.5, noise_sd=2e-3),
    # High-fidelity CFD: unbiased, tiny numerical scatter.
    "cfd": _uniform_profile("cfd", scale=1.0, offset=0.0, alpha_warp=0.0, noise_sd=5e-4),
}


def generate_dataset(
    tool: str,
    n_samples: int,
    seed: int,
    bounds: list[tuple[float, float]] | None = None,
) -> Dataset:
    """Sample one tool over an LHS design and package it as a Dataset."""
    if tool not in TOOL_PROFILES:
        raise KeyError(f"unknown tool {tool!r}; known: {sorted(TOOL_PROFILES)}")
    profile = TOOL_PROFILES[tool]
    bounds = bounds or DEFAULT_BOUNDS
    inputs = lhs_sample(bounds, n_samples, seed)
    rng = np.random.default_rng(seed + 7919)
    outputs: dict[str, np.ndarray] = {k: np.empty(n_samples) for k in RESPONSE_COLUMNS}
    for i, (alpha, beta) in enumerate(inputs):
        values = profile.evaluate(alpha, beta)
        for k in RESPONSE_COLUMNS:
            outputs[k][i] = values[k]
    if profile.noise_sd > 0:
        for k in RESPONSE_COLUMNS:
            outputs[k] += rng.normal(0.0, profile.noise_sd, size=n_samples)
    return Dataset(inputs=inputs, outputs=outputs, fidelity_tag=tool, bounds=list(bounds))


def generate_campaign(seed: int = 2024) -> tuple[Dataset, list[Dataset]]:
    """The standard desk-scale campaign: 25 HF samples, 3 x 1200 LF samples."""
    hf = generate_dataset(HF_TOOL, HF_SAMPLE_COUNT, seed)
    lf = [
        generate_dataset(tool, LF_SAMPLE_COUNT, seed + 1 + i)
        for i, tool in enumerate(LF_TOOLS)
    ]
    return hf, lf


def truth_on(points: np.ndarray) -> dict[str, np.ndarray]:
    """Ground-truth responses evaluated on an (n, 2) array of conditions."""
    out = {k: np.empty(len(points)) for k in RESPONSE_COLUMNS}
    for i, (alpha, beta) in enumerate(points):
        values = truth_coefficients(alpha, beta)
        for k in RESPONSE_COLUMNS:
            out[k][i] = values[k]
    return out


def truth_database(
    alpha_grid=None,
    beta_grid=None,
    tool: str | None = None,
):
    """AeroDatabase tabulated straight from the analytic model (no fitting).

    Fast deterministic database for simulation tests; pass a tool name to
    tabulate that tool's distorted view instead of the truth.
    """
    from .pipeline import assemble_database, tabulate_predictors

    alpha_grid = tuple(alpha_grid) if alpha_grid is not None else tuple(np.linspace(-20, 30, 26))
    beta_grid = tuple(beta_grid) if beta_grid is not None else tuple(np.linspace(0, 20, 11))
    profile = TOOL_PROFILES[tool] if tool else None

    def make_predictor(coeff):
        def predict(pts):
            if profile is None:
                return truth_on(pts)[coeff]
            return np.array([profile.evaluate(a, b)[coeff] for a, b in pts])
        return predict

    predictors = {k: make_predictor(k) for k in RESPONSE_COLUMNS}
    baselines = tabulate_predictors(predictors, alpha_grid, beta_grid)
    return assemble_database(baselines, alpha_grid)
