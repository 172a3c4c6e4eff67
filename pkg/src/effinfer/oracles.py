"""Closed-form posteriors and evidences for the validation models.

Plain numerics only; nothing here touches the inference machinery.
"""

from __future__ import annotations

import math

import numpy as np

from .models import HMM_PRIOR_STD, LINREGR_PRIOR_STD, HMMData, LinRegrData

__all__ = ["beta_bernoulli", "bayes_linregr", "kalman_log_evidence"]


def beta_bernoulli(heads: int, tails: int) -> tuple[float, float]:
    """Posterior (mean, variance) of ``p`` under a uniform prior."""
    a = 1.0 + heads
    b = 1.0 + tails
    return a / (a + b), a * b / ((a + b) ** 2 * (a + b + 1.0))


def bayes_linregr(
    data: LinRegrData,
    prior_std: tuple[float, float] = LINREGR_PRIOR_STD,
    noise_std: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and covariance of ``(slope, intercept)``."""
    X = np.column_stack([np.asarray(data.xs, float), np.ones(len(data.xs))])
    y = np.asarray(data.ys, float)
    prior_prec = np.diag(1.0 / np.square(prior_std))
    prec = prior_prec + X.T @ X / noise_std**2
    cov = np.linalg.inv(prec)
    mean = cov @ (X.T @ y) / noise_std**2
    return mean, cov


def kalman_log_evidence(data: HMMData) -> float:
    """Exact ``log p(y_0 .. y_{T-1})`` for :func:`~effinfer.models.lin_gauss_hmm`
    by the prediction-error decomposition."""
    mean, var = 0.0, HMM_PRIOR_STD**2
    r2, q2 = data.r_std**2, data.q_std**2
    total = 0.0
    for y in data.ys:
        s = var + r2
        e = y - mean
        total += -0.5 * (math.log(2.0 * math.pi * s) + e * e / s)
        gain = var / s
        mean += gain * e
        var *= 1.0 - gain
        var += q2
    return total
