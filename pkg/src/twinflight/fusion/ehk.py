"""Multi-fidelity fusion: extended hierarchical kriging.

One high-fidelity dataset is fused with any number of low-fidelity
surrogates by treating the LF predictions as trend regressors:

    f_hf(x) ~= rho . f_lf(x) + Z_d(x)

where rho is a per-surrogate scaling vector and Z_d a zero-mean Gaussian
discrepancy process with variance sigma_d^2. For a candidate kernel width
theta_d, rho and sigma_d^2 have closed generalized-least-squares forms
through the inverse HF correlation matrix; theta_d itself is chosen by
the same multistart likelihood search used for ordinary kriging.

The predictive variance reported here is the plain kriging variance of
the discrepancy process, sigma_d^2 * (1 - r R^-1 r); it ignores the
uncertainty of the rho estimate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from .datasets import Dataset
from .kriging import (
    FitError,
    FusionConfig,
    KrigingModel,
    _chol_with_escalation,
    correlation_matrix,
    cross_correlation,
    gls_closed_forms,
    maximize_loglik,
    normalize,
    pairwise_sq_diffs,
)

log = logging.getLogger(__name__)


@dataclass
class EHKModel:
    """Fused multi-fidelity surrogate for one response."""

    lf_surrogates: list[KrigingModel]
    rho: np.ndarray  # (L,)
    sigma_d_sq: float
    theta_d: np.ndarray  # (m,)
    hf_inputs: np.ndarray
    hf_outputs: np.ndarray
    bounds: list[tuple[float, float]]
    nugget: float
    F_lf_at_hf: np.ndarray = field(repr=False)  # (n_hf, L)
    hf_correlation_factorization: np.ndarray = field(repr=False)
    _x_norm: np.ndarray = field(repr=False)
    _alpha: np.ndarray = field(repr=False)  # R^-1 (y_hf - F rho)

    def lf_prediction(self, x: np.ndarray) -> np.ndarray:
        """(nq, L) matrix of LF surrogate means at the query points."""
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        return np.column_stack([m.predict(pts) for m in self.lf_surrogates])

    def predict(self, x: np.ndarray, return_variance: bool = False):
        """Fused posterior mean (and optionally variance) at query points."""
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        f_lf = self.lf_prediction(pts)
        q_norm = normalize(pts, self.bounds)
        r, exact = cross_correlation(q_norm, self._x_norm, self.theta_d, self.nugget)
        mean = f_lf @ self.rho + r @ self._alpha
        hits = exact >= 0
        if hits.any():
            mean[hits] = self.hf_outputs[exact[hits]]
        if not return_variance:
            return mean if pts.shape[0] > 1 else float(mean[0])
        rinv_r = sla.cho_solve((self.hf_correlation_factorization, True), r.T)
        quad = np.einsum("ij,ji->i", r, rinv_r)
        var = np.maximum(self.sigma_d_sq * (1.0 - quad), 0.0)
        var[hits] = 0.0
        if pts.shape[0] > 1:
            return mean, var
        return float(mean[0]), float(var[0])


def ehk_predict(model: EHKModel, x: np.ndarray) -> tuple[float, float]:
    """Fused mean and variance at a single point."""
    mean, var = model.predict(np.atleast_2d(x), return_variance=True)
    if np.ndim(mean) > 0:
        return float(mean[0]), float(var[0])
    return mean, var


def _collinear_pairs(f_lf: np.ndarray, models: list[KrigingModel]) -> list[str]:
    names = [f"lf[{i}]" for i in range(len(models))]
    pairs = []
    if f_lf.shape[1] < 2:
        return pairs
    corr = np.corrcoef(f_lf.T)
    for i in range(len(models)):
        for j in range(i + 1, len(models)):
            if abs(corr[i, j]) > 0.9999:
                pairs.append(f"{names[i]}~{names[j]}")
    return pairs


def refit_ehk_gls(
    hf: Dataset,
    lf_models: list[KrigingModel],
    theta_d: np.ndarray,
    cfg: FusionConfig | None = None,
    response: str | None = None,
) -> EHKModel:
    """EHK model on (possibly reduced) HF data at a fixed kernel width.

    Skips the likelihood search and redoes only the closed-form GLS stage;
    used for fast leave-one-out scoring.
    """
    cfg = cfg or FusionConfig()
    if response is None:
        response = next(iter(hf.outputs))
    y = hf.response(response)
    f_lf = np.column_stack([model.predict(hf.inputs) for model in lf_models])
    x_norm = normalize(hf.inputs, hf.bounds)
    sq_diffs = pairwise_sq_diffs(x_norm)
    chol, eta = _chol_with_escalation(correlation_matrix(sq_diffs, theta_d), cfg.nugget)
    rho, sigma_d_sq, rinv_resid = gls_closed_forms(f_lf, y, chol)
    return EHKModel(
        lf_surrogates=list(lf_models),
        rho=rho,
        sigma_d_sq=max(sigma_d_sq, 0.0),
        theta_d=np.array(theta_d),
        hf_inputs=np.array(hf.inputs),
        hf_outputs=np.array(y),
        bounds=list(hf.bounds),
        nugget=eta,
        F_lf_at_hf=f_lf,
        hf_correlation_factorization=chol,
        _x_norm=x_norm,
        _alpha=rinv_resid,
    )


def fit_ehk(
    hf: Dataset,
    lf_models: list[KrigingModel],
    cfg: FusionConfig | None = None,
    response: str | None = None,
) -> EHKModel:
    """Fuse HF samples with LF surrogates into one EHK model.

    Needs at least as many HF samples as LF surrogates, otherwise the
    scaling vector is underdetermined.
    """
    cfg = cfg or FusionConfig()
    if not lf_models:
        raise ValueError("at least one LF surrogate is required")
    if response is None:
        if len(hf.outputs) != 1:
            raise ValueError("HF dataset has multiple responses; name one")
        response = next(iter(hf.outputs))
    y = hf.response(response)
    n_hf, m = hf.inputs.shape
    for model in lf_models:
        if model.training_inputs.shape[1] != m:
            raise ValueError("LF surrogate input dimension does not match HF data")
    if n_hf < len(lf_models):
        raise FitError(
            f"{n_hf} HF samples cannot identify {len(lf_models)} scaling factors"
        )

    f_lf = np.column_stack([model.predict(hf.inputs) for model in lf_models])
    x_norm = normalize(hf.inputs, hf.bounds)
    sq_diffs = pairwise_sq_diffs(x_norm)

    try:
        theta_d, evals = maximize_loglik(sq_diffs, f_lf, y, cfg, m)
    except FitError as exc:
        pairs = _collinear_pairs(f_lf, lf_models)
        if pairs:
            raise FitError(f"collinear LF surrogates: {', '.join(pairs)}") from exc
        raise
    log.debug("ehk fit %s: theta_d=%s after %d evals", response, theta_d, evals)

    chol, eta = _chol_with_escalation(correlation_matrix(sq_diffs, theta_d), cfg.nugget)
    try:
        rho, sigma_d_sq, rinv_resid = gls_closed_forms(f_lf, y, chol)
    except FitError as exc:
        pairs = _collinear_pairs(f_lf, lf_models)
        detail = f" (collinear LF surrogates: {', '.join(pairs)})" if pairs else ""
        raise FitError(f"scaling factors underdetermined{detail}") from exc

    return EHKModel(
        lf_surrogates=list(lf_models),
        rho=rho,
        sigma_d_sq=max(sigma_d_sq, 0.0),
        theta_d=theta_d,
        hf_inputs=np.array(hf.inputs),
        hf_outputs=np.array(y),
        bounds=list(hf.bounds),
        nugget=eta,
        F_lf_at_hf=f_lf,
        hf_correlation_factorization=chol,
        _x_norm=x_norm,
        _alpha=rinv_resid,
    )
