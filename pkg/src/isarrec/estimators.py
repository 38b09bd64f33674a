"""Estimator-style wrappers so the recovery algorithms drop into sklearn
pipelines.

All transformers are stateless: ``fit`` only validates, ``transform`` does
the work on a single complex grid.  Missing samples are marked with NaN in
the input (either part of the complex value), mirroring the imputer
convention; diagnostics from the last transform land on ``report_`` or
``trace_``.
"""

from __future__ import annotations

from math import sqrt

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .direct import recover_direct, recover_iterative
from .gradient import GradientConfig, recover_gradient
from .transforms import dft2, smethod
from .validation import check_complex_grid, split_observed


class _GridTransformer(BaseEstimator, TransformerMixin):
    def fit(self, X, y=None):
        check_complex_grid(X, allow_nan=True)
        return self

    def _split(self, X):
        return split_observed(X)


class DirectRecovery(_GridTransformer):
    """One-shot least-squares recovery on the strongest-bin support.

    k_hat=None keeps as many bins as there are available samples.
    """

    def __init__(self, k_hat=None, rcond_threshold=1e-10):
        self.k_hat = k_hat
        self.rcond_threshold = rcond_threshold

    def transform(self, X):
        grid, mask = self._split(X)
        report = recover_direct(grid, mask, k_hat=self.k_hat,
                                rcond_threshold=self.rcond_threshold)
        self.report_ = report
        return report.grid


class IterativeRecovery(_GridTransformer):
    """Recovery by strongest-bin peeling with LS re-solves."""

    def __init__(self, max_components=None, tol=None, rcond_threshold=1e-10):
        self.max_components = max_components
        self.tol = tol
        self.rcond_threshold = rcond_threshold

    def transform(self, X):
        grid, mask = self._split(X)
        report = recover_iterative(grid, mask, max_components=self.max_components,
                                   tol=self.tol, rcond_threshold=self.rcond_threshold)
        self.report_ = report
        return report.grid


class GradientRecovery(_GridTransformer):
    """Missing-sample completion by S-method sparsity descent."""

    def __init__(self, corrections=0, delta_init="auto", delta_shrink=sqrt(10.0),
                 stall_ratio=0.01, tr_threshold=0.001, max_sweeps=1000,
                 delta_min=1e-12, inner_sweeps=1, shrink_on="stall"):
        self.corrections = corrections
        self.delta_init = delta_init
        self.delta_shrink = delta_shrink
        self.stall_ratio = stall_ratio
        self.tr_threshold = tr_threshold
        self.max_sweeps = max_sweeps
        self.delta_min = delta_min
        self.inner_sweeps = inner_sweeps
        self.shrink_on = shrink_on

    def _config(self):
        return GradientConfig(corrections=self.corrections, delta_init=self.delta_init,
                              delta_shrink=self.delta_shrink, stall_ratio=self.stall_ratio,
                              tr_threshold=self.tr_threshold, max_sweeps=self.max_sweeps,
                              delta_min=self.delta_min, inner_sweeps=self.inner_sweeps,
                              shrink_on=self.shrink_on)

    def transform(self, X):
        grid, mask = self._split(X)
        recovered, trace = recover_gradient(grid, mask, self._config())
        self.trace_ = trace
        return recovered


class SMethod(_GridTransformer):
    """Complete grid in, S-method image out (for pipeline tails)."""

    def __init__(self, corrections=0):
        self.corrections = corrections

    def transform(self, X):
        grid = check_complex_grid(X, allow_nan=True)
        if np.isnan(grid.real).any() or np.isnan(grid.imag).any():
            raise ValueError("SMethod needs a complete grid; recover first")
        return smethod(dft2(grid), self.corrections)
