"""Mixture-density output heads for the gesture model.

The network's projection vector (length 9M) is split into a 1D mixture over
time deltas (3M values) and a 2D mixture over touch locations (6M values).
Log-likelihoods are computed with log-sum-exp so they stay finite even when
every raw component density underflows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp as np_logsumexp

from . import autodiff as ad

SIGMA_LOGIT_MIN = -10.0
SIGMA_LOGIT_MAX = 10.0
RHO_MAX = 0.99999

LOG_2PI = np.log(2.0 * np.pi)


class ProjectionLengthError(ValueError):
    """Raised when the raw projection vector length is not 9M."""


@dataclass
class MixtureParams1D:
    """Mixture of M scalar normals over time deltas."""

    weights: np.ndarray  # (..., M), sums to 1
    means: np.ndarray  # (..., M), seconds
    stds: np.ndarray  # (..., M), > 0

    @property
    def component_count(self) -> int:
        return self.weights.shape[-1]


@dataclass
class MixtureParams2D:
    """Mixture of M correlated bivariate normals over touch locations."""

    weights: np.ndarray
    means_x: np.ndarray
    means_y: np.ndarray
    stds_x: np.ndarray
    stds_y: np.ndarray
    correlations: np.ndarray  # (..., M), in (-1, 1)

    @property
    def component_count(self) -> int:
        return self.weights.shape[-1]


def _softmax(logits):
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def split_projection(p, m: int):
    """Split a raw projection into the (time, space) raw sub-vectors.

    Layout: first 3M entries are the time head (pi-logits, mu, sigma-logits),
    the remaining 6M the space head (pi-logits, mu_x, mu_y, sigma_x-logits,
    sigma_y-logits, rho-logits).
    """
    p = np.asarray(p, dtype=np.float64)
    if p.shape[-1] != 9 * m:
        raise ProjectionLengthError(
            f"projection has length {p.shape[-1]}, expected 9M = {9 * m}"
        )
    return p[..., : 3 * m], p[..., 3 * m :]


def split_and_transform(p, m: int):
    """Raw projection -> (MixtureParams1D, MixtureParams2D).

    Transforms guarantee valid parameters for any finite input: softmax
    weights, exp of a clamped logit for stds, tanh (clamped) for rho.
    """
    time_raw, space_raw = split_projection(p, m)

    t_pi = _softmax(time_raw[..., :m])
    t_mu = time_raw[..., m : 2 * m]
    t_sigma = np.exp(np.clip(time_raw[..., 2 * m :], SIGMA_LOGIT_MIN, SIGMA_LOGIT_MAX))
    time_params = MixtureParams1D(t_pi, t_mu, t_sigma)

    s = space_raw
    s_pi = _softmax(s[..., :m])
    mu_x = s[..., m : 2 * m]
    mu_y = s[..., 2 * m : 3 * m]
    sx = np.exp(np.clip(s[..., 3 * m : 4 * m], SIGMA_LOGIT_MIN, SIGMA_LOGIT_MAX))
    sy = np.exp(np.clip(s[..., 4 * m : 5 * m], SIGMA_LOGIT_MIN, SIGMA_LOGIT_MAX))
    rho = np.clip(np.tanh(s[..., 5 * m :]), -RHO_MAX, RHO_MAX)
    space_params = MixtureParams2D(s_pi, mu_x, mu_y, sx, sy, rho)
    return time_params, space_params


# -- densities ------------------------------------------------------------


def pdf_bivariate_normal(x, y, mu_x, mu_y, sigma_x, sigma_y, rho):
    """Density of a correlated bivariate normal at (x, y)."""
    return np.exp(log_pdf_bivariate_normal(x, y, mu_x, mu_y, sigma_x, sigma_y, rho))


def log_pdf_bivariate_normal(x, y, mu_x, mu_y, sigma_x, sigma_y, rho):
    dx = (np.asarray(x) - mu_x) / sigma_x
    dy = (np.asarray(y) - mu_y) / sigma_y
    z = dx * dx + dy * dy - 2.0 * rho * dx * dy
    one_m_r2 = 1.0 - rho * rho
    return (
        -z / (2.0 * one_m_r2)
        - LOG_2PI
        - np.log(sigma_x)
        - np.log(sigma_y)
        - 0.5 * np.log(one_m_r2)
    )


def log_pdf_normal(t, mu, sigma):
    d = (np.asarray(t) - mu) / sigma
    return -0.5 * d * d - 0.5 * LOG_2PI - np.log(sigma)


# -- negative log likelihoods --------------------------------------------


def nll_space(params: MixtureParams2D, xs, ys) -> float:
    """Mean negative log mixture likelihood of targets (x_i, y_i).

    Parameter arrays carry a leading event axis; log-sum-exp over components.
    """
    xs = np.asarray(xs, dtype=np.float64)
    log_comp = log_pdf_bivariate_normal(
        xs[..., None],
        np.asarray(ys, dtype=np.float64)[..., None],
        params.means_x,
        params.means_y,
        params.stds_x,
        params.stds_y,
        params.correlations,
    )
    with np.errstate(divide="ignore"):
        log_w = np.log(params.weights)
    log_lik = np_logsumexp(log_w + log_comp, axis=-1)
    _check_finite(log_lik, "space")
    return float(-np.mean(log_lik))


def nll_time(params: MixtureParams1D, dts) -> float:
    """Mean negative log mixture likelihood of time-delta targets."""
    dts = np.asarray(dts, dtype=np.float64)
    log_comp = log_pdf_normal(dts[..., None], params.means, params.stds)
    with np.errstate(divide="ignore"):
        log_w = np.log(params.weights)
    log_lik = np_logsumexp(log_w + log_comp, axis=-1)
    _check_finite(log_lik, "time")
    return float(-np.mean(log_lik))


def total_loss(space_nll: float, time_nll: float) -> float:
    return space_nll + time_nll


def _check_finite(log_lik, head):
    bad = np.flatnonzero(~np.isfinite(np.atleast_1d(log_lik)))
    if bad.size:
        raise FloatingPointError(
            f"non-finite {head} log-likelihood at event index {int(bad[0])}"
        )


# -- sampling -------------------------------------------------------------


def sample_mixture_2d(params: MixtureParams2D, rng: np.random.Generator):
    """Draw one (x, y): categorical over weights, then a correlated normal."""
    j = rng.choice(params.component_count, p=params.weights)
    z1 = rng.standard_normal()
    z2 = rng.standard_normal()
    rho = params.correlations[j]
    x = params.means_x[j] + params.stds_x[j] * z1
    y = params.means_y[j] + params.stds_y[j] * (rho * z1 + np.sqrt(1.0 - rho * rho) * z2)
    return float(x), float(y)


def sample_mixture_1d(params: MixtureParams1D, rng: np.random.Generator) -> float:
    j = rng.choice(params.component_count, p=params.weights)
    return float(params.means[j] + params.stds[j] * rng.standard_normal())


# -- autodiff twins, used by the training path ---------------------------


def nll_time_ad(time_raw: ad.Var, dts: np.ndarray, m: int) -> ad.Var:
    """Loss contribution of the time head; returns the per-event sum."""
    log_pi = ad.log_softmax(time_raw[..., :m])
    mu = time_raw[..., m : 2 * m]
    s = ad.clip(time_raw[..., 2 * m :], SIGMA_LOGIT_MIN, SIGMA_LOGIT_MAX)
    d = (ad.constant(dts[..., None]) - mu) * ad.exp(-s)
    log_comp = ad.constant(-0.5 * LOG_2PI) - s - 0.5 * ad.square(d)
    return -ad.vsum(ad.logsumexp(log_pi + log_comp, axis=-1))


def nll_space_ad(space_raw: ad.Var, xs: np.ndarray, ys: np.ndarray, m: int) -> ad.Var:
    """Loss contribution of the space head; returns the per-event sum."""
    log_pi = ad.log_softmax(space_raw[..., :m])
    mu_x = space_raw[..., m : 2 * m]
    mu_y = space_raw[..., 2 * m : 3 * m]
    sx = ad.clip(space_raw[..., 3 * m : 4 * m], SIGMA_LOGIT_MIN, SIGMA_LOGIT_MAX)
    sy = ad.clip(space_raw[..., 4 * m : 5 * m], SIGMA_LOGIT_MIN, SIGMA_LOGIT_MAX)
    rho = ad.clip(ad.tanh(space_raw[..., 5 * m :]), -RHO_MAX, RHO_MAX)
    dx = (ad.constant(xs[..., None]) - mu_x) * ad.exp(-sx)
    dy = (ad.constant(ys[..., None]) - mu_y) * ad.exp(-sy)
    z = ad.square(dx) + ad.square(dy) - 2.0 * rho * dx * dy
    one_m_r2 = 1.0 - ad.square(rho)
    log_comp = (
        -z / (2.0 * one_m_r2)
        - ad.constant(LOG_2PI)
        - sx
        - sy
        - 0.5 * ad.log(one_m_r2)
    )
    return -ad.vsum(ad.logsumexp(log_pi + log_comp, axis=-1))
