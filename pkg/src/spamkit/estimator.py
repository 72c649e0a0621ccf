"""Scikit-learn style wrapper around sparse pseudospectral fitting.

The design points are fixed by the scheme, so ``fit`` expects ``X`` to be the
node table returned by :meth:`SparsePseudospectralRegressor.design` (rows in
any order). It is a surrogate builder, not a scattered-data regressor.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from ._config import MERGE_TOL
from .exceptions import DataValidationError, InvalidArgumentError
from .smolyak import SmolyakScheme, build_sparse_rule
from .spam import direct_expansion_from_values, spam_expansion_from_values
from .tensor import evaluate_nodes


class SparsePseudospectralRegressor(RegressorMixin, BaseEstimator):
    """Polynomial surrogate from function values on a Smolyak sparse grid.

    Parameters
    ----------
    level : int, default=3
        Smolyak level ``l`` (``l = 0`` is the single-grid scheme).
    growth : {"exp", "linear"}, default="exp"
        Univariate rule sizes ``2**m - 1`` or ``2*m - 1``.
    method : {"spam", "direct"}, default="spam"
        Combine tensor pseudospectral coefficients (``"spam"``), or integrate
        each basis polynomial with the signed sparse rule (``"direct"``).
    families : RecurrenceCoefficients or sequence, optional
        Orthonormal families per input; Legendre on ``[-1, 1]`` by default.
    max_nodes : int, optional
        Resource cap; falls back to ``SPAMKIT_MAX_NODES`` or ``10**7``.
    n_jobs : int, default=1
        Worker threads for per-grid transforms and ``fit_function`` calls.

    Attributes
    ----------
    expansion_ : SpamExpansion
    coef_ : ndarray
        Coefficients in ``basis_`` order.
    basis_ : tuple of multi-index
        Union basis sorted by total degree.
    rule_ : SparseGridRule
    mean_, variance_ : float
    n_features_in_ : int
    """

    def __init__(self, level=3, growth="exp", method="spam", families=None, max_nodes=None,
                 n_jobs=1):
        self.level = level
        self.growth = growth
        self.method = method
        self.families = families
        self.max_nodes = max_nodes
        self.n_jobs = n_jobs

    def _build_rule(self, n_features):
        if self.method not in ("spam", "direct"):
            raise InvalidArgumentError(f"method must be 'spam' or 'direct', got {self.method!r}")
        scheme = SmolyakScheme.standard(int(n_features), int(self.level), self.growth)
        return build_sparse_rule(scheme, self.families, max_nodes=self.max_nodes,
                                 keep_contributors=False)

    def design(self, n_features: int) -> np.ndarray:
        """Node table at which ``fit`` needs target values."""
        return self._build_rule(n_features).nodes.copy()

    def _finish(self, rule, values):
        if self.method == "spam":
            exp = spam_expansion_from_values(values, rule, self.n_jobs)
        else:
            exp = direct_expansion_from_values(values, rule)
        self.rule_ = rule
        self.expansion_ = exp
        self.basis_ = exp.basis
        self.coef_ = exp.coefficients_in_basis_order()
        self.mean_ = exp.mean()
        self.variance_ = exp.variance()
        return self

    def fit(self, X, y):
        """Fit from values ``y`` at the design nodes ``X``.

        Raises
        ------
        DataValidationError
            When the rows of ``X`` are not a permutation of the design nodes
            (max-norm tolerance ``1e-12``).
        """
        X, y = validate_data(self, X, y, y_numeric=True)
        rule = self._build_rule(X.shape[1])
        if X.shape[0] != len(rule):
            raise DataValidationError(f"expected {len(rule)} design rows, got {X.shape[0]}")
        dist, pos = cKDTree(X).query(rule.nodes, p=np.inf)
        if np.any(dist > MERGE_TOL) or np.unique(pos).size != len(rule):
            j = int(np.argmax(dist > MERGE_TOL)) if np.any(dist > MERGE_TOL) else 0
            raise DataValidationError(f"X does not match the design; node {j} has no partner")
        return self._finish(rule, np.asarray(y, dtype=float)[pos])

    def fit_function(self, f, n_features: int):
        """Fit by calling ``f`` once per design node."""
        rule = self._build_rule(n_features)
        self.n_features_in_ = int(n_features)
        return self._finish(rule, evaluate_nodes(f, rule.nodes, self.n_jobs))

    def predict(self, X):
        check_is_fitted(self, "expansion_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise InvalidArgumentError(
                f"X has {X.shape[1]} features, estimator was fitted with {self.n_features_in_}"
            )
        return self.expansion_.evaluate(X)
