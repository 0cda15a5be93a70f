"""Ordinary kriging with Gaussian correlation and MLE hyperparameters.

The correlation between two samples is the squared-exponential product
kernel phi(x, x') = prod_k exp(-theta_k |x_k - x'_k|^2), evaluated on
inputs normalized to the unit box. Kernel widths theta come from
maximizing the concentrated log-likelihood with a seeded multistart
bounded direct search in log10(theta) space.

A small diagonal nugget regularizes the correlation matrix. The nugget is
folded into prediction correlations at zero distance, so the fitted
surface reproduces its training data to roundoff rather than to
nugget-level error.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy.optimize import minimize

log = logging.getLogger(__name__)

MAX_NUGGET = 1e-4


class FitError(RuntimeError):
    """Surrogate fitting failed (ill-conditioned correlation or bad data)."""


@dataclass(frozen=True)
class FusionConfig:
    """Knobs for surrogate fitting; defaults suit desk-scale datasets."""

    nugget: float = 1e-8
    theta_bounds: tuple[float, float] = (1e-3, 1e3)
    multistart_count: int = 8
    optimizer_budget: int = 40  # max likelihood evaluations per fit
    rng_seed: int = 0

    def __post_init__(self) -> None:
        lo, hi = self.theta_bounds
        if lo <= 0 or hi <= lo:
            raise ValueError(f"theta bounds must be positive and ordered, got {self.theta_bounds}")
        if self.multistart_count < 1:
            raise ValueError("multistart_count must be >= 1")
        if self.optimizer_budget < self.multistart_count:
            raise ValueError("optimizer_budget must cover at least one eval per start")


def normalize(x: np.ndarray, bounds: list[tuple[float, float]]) -> np.ndarray:
    lows = np.array([b[0] for b in bounds])
    spans = np.array([b[1] - b[0] for b in bounds])
    return (np.asarray(x, dtype=float) - lows) / spans


def pairwise_sq_diffs(xn: np.ndarray) -> np.ndarray:
    """(m, n, n) stack of per-dimension squared coordinate differences."""
    diff = xn[:, None, :] - xn[None, :, :]
    return np.ascontiguousarray(np.moveaxis(diff * diff, 2, 0))


def correlation_matrix(sq_diffs: np.ndarray, theta: np.ndarray) -> np.ndarray:
    return np.exp(-np.tensordot(theta, sq_diffs, axes=1))


def cross_correlation(
    q_norm: np.ndarray, x_norm: np.ndarray, theta: np.ndarray, nugget: float
) -> tuple[np.ndarray, np.ndarray]:
    """(nq, n) correlations of query points to training points.

    Also returns, per query, the index of an exactly coincident training
    point (-1 if none); callers short-circuit those to the stored training
    outputs, which keeps the surface an interpolator regardless of how
    ill-conditioned the correlation matrix is.
    """
    d2 = (q_norm[:, None, :] - x_norm[None, :, :]) ** 2
    r = np.exp(-(d2 * theta).sum(axis=2))
    exact_mask = d2.sum(axis=2) == 0.0
    exact_idx = np.where(exact_mask.any(axis=1), exact_mask.argmax(axis=1), -1)
    if exact_mask.any():
        r = r + nugget * exact_mask
    return r, exact_idx


def _chol_with_escalation(r_matrix: np.ndarray, nugget: float) -> tuple[np.ndarray, float]:
    """Cholesky of R + eta*I, escalating eta by 10x up to MAX_NUGGET."""
    eta = nugget
    n = r_matrix.shape[0]
    idx = np.diag_indices(n)
    while True:
        try:
            reg = r_matrix.copy()
            reg[idx] += eta
            return sla.cholesky(reg, lower=True), eta
        except sla.LinAlgError:
            if eta >= MAX_NUGGET:
                raise FitError(
                    f"correlation matrix not positive definite even with nugget {eta:.1e}; "
                    "inputs may be nearly duplicated"
                ) from None
            eta *= 10.0
            log.warning("correlation factorization failed, escalating nugget to %.1e", eta)


def gls_closed_forms(
    basis: np.ndarray, y: np.ndarray, chol: np.ndarray
) -> tuple[np.ndarray, float, np.ndarray]:
    """Closed-form GLS trend and process variance through R^-1.

    Returns (coefficients, sigma^2, R^-1 residual). `basis` is the n x p
    trend matrix; for an ordinary-kriging constant trend p = 1. One step
    of iterative refinement keeps the residual solve near machine
    precision even when R is poorly conditioned, which is what lets the
    fitted surface reproduce its training data.
    """
    n = y.shape[0]
    rinv_f = sla.cho_solve((chol, True), basis)
    rinv_y = sla.cho_solve((chol, True), y)
    gram = basis.T @ rinv_f
    if np.linalg.cond(gram) > 1e12:
        raise FitError("trend normal equations are numerically singular")
    try:
        coeffs = sla.solve(gram, basis.T @ rinv_y, assume_a="pos")
    except sla.LinAlgError as exc:
        raise FitError(f"singular trend normal equations: {exc}") from exc
    resid = y - basis @ coeffs
    rinv_resid = rinv_y - rinv_f @ coeffs
    correction = resid - chol @ (chol.T @ rinv_resid)
    rinv_resid = rinv_resid + sla.cho_solve((chol, True), correction)
    sigma2 = float(resid @ rinv_resid) / n
    return coeffs, sigma2, rinv_resid


def concentrated_loglik(
    sq_diffs: np.ndarray, basis: np.ndarray, y: np.ndarray, theta: np.ndarray, nugget: float
) -> float:
    """Profile log-likelihood of theta with trend and variance concentrated out."""
    n = y.shape[0]
    chol, _ = _chol_with_escalation(correlation_matrix(sq_diffs, theta), nugget)
    _, sigma2, _ = gls_closed_forms(basis, y, chol)
    log_det = 2.0 * float(np.log(np.diag(chol)).sum())
    return -0.5 * (n * np.log(max(sigma2, 1e-300)) + log_det)


def maximize_loglik(
    sq_diffs: np.ndarray,
    basis: np.ndarray,
    y: np.ndarray,
    cfg: FusionConfig,
    n_dims: int,
) -> tuple[np.ndarray, int]:
    """Multistart bounded direct search over log10(theta).

    Start points are theta = 1 plus seeded Latin-hypercube draws; the two
    most promising starts get a Powell refinement within the remaining
    evaluation budget. Returns the best theta and the evaluation count.
    """
    lo, hi = np.log10(cfg.theta_bounds[0]), np.log10(cfg.theta_bounds[1])
    rng = np.random.default_rng(cfg.rng_seed)
    starts = [np.zeros(n_dims)]  # theta = 1, the trivial start, always included
    extra = cfg.multistart_count - 1
    if extra > 0:
        unit = np.empty((extra, n_dims))
        for k in range(n_dims):
            unit[:, k] = (rng.permutation(extra) + rng.uniform(size=extra)) / extra
        starts.extend(lo + (hi - lo) * unit)
    starts = [np.clip(s, lo, hi) for s in starts]

    evals = 0
    best: tuple[float, np.ndarray] | None = None

    def objective(z: np.ndarray) -> float:
        nonlocal evals, best
        evals += 1
        theta = 10.0 ** np.clip(z, lo, hi)
        try:
            ll = concentrated_loglik(sq_diffs, basis, y, theta, cfg.nugget)
        except FitError:
            return 1e30
        if best is None or ll > best[0]:
            best = (ll, theta.copy())
        return -ll

    scored = sorted(
        ((objective(s), i, s) for i, s in enumerate(starts)), key=lambda t: (t[0], t[1])
    )
    if best is None:
        raise FitError("likelihood evaluation failed for every candidate kernel width")
    # Refine the two most promising starts with whatever budget remains.
    for rank, (_, _, start) in enumerate(scored[:2]):
        remaining = cfg.optimizer_budget - evals
        if remaining <= n_dims + 1:
            break
        budget = remaining // 2 if rank == 0 else remaining
        minimize(
            objective,
            start,
            method="Powell",
            bounds=[(lo, hi)] * n_dims,
            options={"maxfev": budget, "xtol": 1e-3, "ftol": 1e-5},
        )

    assert best is not None
    return best[1], evals


@dataclass
class KrigingModel:
    """Fitted ordinary-kriging surrogate for one response."""

    theta: np.ndarray
    process_variance: float
    trend_mean: float
    training_inputs: np.ndarray  # raw coordinates
    training_outputs: np.ndarray
    bounds: list[tuple[float, float]]
    nugget: float
    correlation_factorization: np.ndarray = field(repr=False)  # lower Cholesky of R + eta I
    _x_norm: np.ndarray = field(repr=False)
    _alpha: np.ndarray = field(repr=False)  # R^-1 (y - mean)
    _rinv_ones: np.ndarray = field(repr=False)
    _ones_rinv_ones: float = field(repr=False)

    def predict(self, x: np.ndarray, return_variance: bool = False):
        """Posterior mean (and optionally variance) at one or more points."""
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        q_norm = normalize(pts, self.bounds)
        r, exact = cross_correlation(q_norm, self._x_norm, self.theta, self.nugget)
        mean = self.trend_mean + r @ self._alpha
        hits = exact >= 0
        if hits.any():
            mean[hits] = self.training_outputs[exact[hits]]
        if not return_variance:
            return mean if pts.shape[0] > 1 else float(mean[0])
        rinv_r = sla.cho_solve((self.correlation_factorization, True), r.T)
        quad = np.einsum("ij,ji->i", r, rinv_r)
        trend_term = (1.0 - r @ self._rinv_ones) ** 2 / self._ones_rinv_ones
        var = np.maximum(self.process_variance * (1.0 - quad + trend_term), 0.0)
        var[hits] = 0.0
        if pts.shape[0] > 1:
            return mean, var
        return float(mean[0]), float(var[0])


def fit_kriging(data, cfg: FusionConfig | None = None, response: str | None = None) -> KrigingModel:
    """Fit an ordinary-kriging surrogate to one response of a dataset.

    `response` may be omitted when the dataset carries exactly one output
    vector.
    """
    cfg = cfg or FusionConfig()
    if response is None:
        if len(data.outputs) != 1:
            raise ValueError("dataset has multiple responses; name one")
        response = next(iter(data.outputs))
    y = data.response(response)
    x_norm = normalize(data.inputs, data.bounds)
    sq_diffs = pairwise_sq_diffs(x_norm)
    ones = np.ones((data.n_samples, 1))

    theta, evals = maximize_loglik(sq_diffs, ones, y, cfg, data.n_dims)
    log.debug("kriging fit %s/%s: theta=%s after %d evals", data.fidelity_tag, response, theta, evals)

    chol, eta = _chol_with_escalation(correlation_matrix(sq_diffs, theta), cfg.nugget)
    coeffs, sigma2, rinv_resid = gls_closed_forms(ones, y, chol)
    rinv_ones = sla.cho_solve((chol, True), ones).ravel()
    return KrigingModel(
        theta=theta,
        process_variance=sigma2,
        trend_mean=float(coeffs[0]),
        training_inputs=np.array(data.inputs),
        training_outputs=np.array(y),
        bounds=list(data.bounds),
        nugget=eta,
        correlation_factorization=chol,
        _x_norm=x_norm,
        _alpha=rinv_resid,
        _rinv_ones=rinv_ones,
        _ones_rinv_ones=float(ones.ravel() @ rinv_ones),
    )
