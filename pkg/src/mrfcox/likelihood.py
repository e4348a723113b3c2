"""Grouped-data Cox likelihood on a hazard-increment partition, with analytic
first and second derivatives in single coefficients.

The interval sums collapse to one term per subject: a subject contributes the
survival factor exp(-A_i * exp(X_i beta)) where A_i accumulates the hazard
increments of every interval it fully survives (plus its own interval when
censored), and an event subject additionally contributes
log(1 - exp(-h_k exp(X_i beta))) for its failure interval.
"""

from __future__ import annotations

import numpy as np

from .datamodel import IntervalSets, SurvivalDataset

_LN2 = float(np.log(2.0))


def log1mexp(mu):
    """log(1 - exp(-mu)) for mu >= 0 without underflow; -inf at mu = 0."""
    mu = np.asarray(mu, dtype=float)
    with np.errstate(divide="ignore"):
        small = np.log(-np.expm1(-np.minimum(mu, _LN2)))
        large = np.log1p(-np.exp(-np.maximum(mu, _LN2)))
    return np.where(mu < _LN2, small, large)


def event_grad_factor(mu):
    """d/d(log e) of log(1 - exp(-mu)) at mu = h*e, i.e. mu/(exp(mu) - 1)."""
    mu = np.asarray(mu, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        q = np.exp(-mu)
        out = mu * q / (-np.expm1(-mu))
    out = np.where(mu == 0.0, 1.0, out)
    return np.where(np.isinf(mu), 0.0, out)


def event_hess_factor(mu):
    """Second log-derivative factor mu*q*((1-q) - mu)/(1-q)^2 with q=exp(-mu).

    Always nonpositive: each event term is concave in any single coefficient.
    """
    mu = np.asarray(mu, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        q = np.exp(-mu)
        one_minus_q = -np.expm1(-mu)
        out = mu * q * (one_minus_q - mu) / (one_minus_q * one_minus_q)
    out = np.where(mu == 0.0, 0.0, out)
    return np.where(np.isinf(mu), 0.0, out)


class LikelihoodWorkspace:
    """Per-chain cache of linear predictors and hazard accumulations.

    Belongs to exactly one chain; the dataset and interval sets it references
    are shared read-only. exp_lp tracks exp(linear_predictors) incrementally
    as single coefficients change; refresh() recomputes both from scratch.
    """

    def __init__(self, data: SurvivalDataset, sets: IntervalSets):
        self.data = data
        self.sets = sets
        self.X = data.covariates
        self.k_idx = sets.interval_index - 1
        self.events = np.flatnonzero(data.events == 1)
        self.k_events = self.k_idx[self.events]
        # Transposed contiguous copies: the sampler touches one column of X at
        # a time, thousands of times per sweep.
        self.XT = np.ascontiguousarray(self.X.T)
        self.XT2 = self.XT**2
        self.XT_events = np.ascontiguousarray(self.X[self.events].T)
        self.XT2_events = self.XT_events**2
        # Weight of a subject's own interval in its survival factor: censored
        # subjects survive it, event subjects leave through the event term.
        self._own_weight = (data.events == 0).astype(float)
        self.linear_predictors = np.zeros(data.n)
        self.exp_lp = np.ones(data.n)
        self.h = None
        self.at_risk_hazard = None  # A_i
        self.h_events = None

    def set_h(self, h):
        h = np.asarray(h, dtype=float)
        prefix = np.concatenate(([0.0], np.cumsum(h)))
        self.h = h
        self.at_risk_hazard = prefix[self.k_idx] + self._own_weight * h[self.k_idx]
        self.h_events = h[self.k_events]

    def refresh(self, beta):
        self.linear_predictors = self.X @ np.asarray(beta, dtype=float)
        with np.errstate(over="ignore"):
            self.exp_lp = np.exp(self.linear_predictors)

    def log_likelihood(self, exp_lp=None) -> float:
        e = self.exp_lp if exp_lp is None else exp_lp
        mu = self.h_events * e[self.events]
        return float(-(self.at_risk_hazard @ e) + log1mexp(mu).sum())

    def shifted_exp_lp(self, j, dbeta):
        with np.errstate(over="ignore"):
            return self.exp_lp * np.exp(self.X[:, j] * dbeta)

    def apply_shift(self, j, dbeta, exp_lp):
        self.linear_predictors = self.linear_predictors + self.X[:, j] * dbeta
        self.exp_lp = exp_lp

    def grad_hess(self, j, beta_j, sigma2_j, exp_lp=None):
        """Derivatives of the conditional log posterior of coefficient j,
        including the spike-or-slab prior terms."""
        e = self.exp_lp if exp_lp is None else exp_lp
        ae = self.at_risk_hazard * e
        mu = self.h_events * e[self.events]
        phi = event_grad_factor(mu)
        psi = event_hess_factor(mu)
        g1 = -(ae @ self.X[:, j]) + phi @ self.X_events[:, j] - beta_j / sigma2_j
        g2 = -(ae @ self.X2[:, j]) + psi @ self.X2_events[:, j] - 1.0 / sigma2_j
        return float(g1), float(g2)


def log_likelihood(beta, h, data: SurvivalDataset, sets: IntervalSets) -> float:
    """Grouped-data log likelihood; -inf when an event probability underflows
    to zero (a valid log-density limit, not an error)."""
    h = np.asarray(h, dtype=float)
    if h.shape != (sets.K,):
        raise ValueError(f"h has length {h.size}, partition has {sets.K} intervals")
    if np.any(h <= 0):
        raise ValueError("all hazard increments must be strictly positive")
    ws = LikelihoodWorkspace(data, sets)
    ws.set_h(h)
    ws.refresh(beta)
    return ws.log_likelihood()


def log_likelihood_grad_hess_beta_j(j, beta, h, data: SurvivalDataset, sets: IntervalSets, sigma2_j) -> tuple:
    """First and second derivatives with respect to beta_j of the conditional
    log posterior log_likelihood(beta, h) + log N(beta_j; 0, sigma2_j)."""
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise ValueError("all hazard increments must be strictly positive")
    ws = LikelihoodWorkspace(data, sets)
    ws.set_h(h)
    ws.refresh(beta)
    return ws.grad_hess(j, float(np.asarray(beta, dtype=float)[j]), float(sigma2_j))
