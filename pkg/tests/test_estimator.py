import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from spamkit import SparsePseudospectralRegressor
from spamkit.exceptions import DataValidationError, InvalidArgumentError
from spamkit.smolyak import SmolyakScheme
from spamkit.spam import spam_expansion


def f(s):
    return math.exp(0.5 * s[0]) * math.cos(s[1])


def test_params_round_trip():
    est = SparsePseudospectralRegressor(level=4, growth="linear", method="direct")
    assert est.get_params()["level"] == 4
    assert clone(est).get_params() == est.get_params()
    est.set_params(level=2)
    assert est.level == 2


def test_fit_matches_library():
    est = SparsePseudospectralRegressor(level=4)
    X = est.design(2)
    y = np.array([f(x) for x in X])
    est.fit(X, y)
    ref = spam_expansion(f, SmolyakScheme.standard(2, 4))
    assert np.array_equal(est.expansion_.coefficients, ref.coefficients)
    assert est.basis_ == ref.basis
    assert est.mean_ == ref.mean() and est.n_features_in_ == 2
    assert len(est.coef_) == len(est.basis_)


def test_fit_accepts_permuted_rows():
    est = SparsePseudospectralRegressor(level=3)
    X = est.design(2)
    y = np.array([f(x) for x in X])
    perm = np.random.default_rng(1).permutation(len(X))
    a = est.fit(X, y).coef_
    b = clone(est).fit(X[perm], y[perm]).coef_
    assert np.array_equal(a, b)


def test_fit_rejects_wrong_design():
    est = SparsePseudospectralRegressor(level=3)
    X = est.design(2)
    with pytest.raises(DataValidationError):
        est.fit(X[:-1], np.zeros(len(X) - 1))
    with pytest.raises(DataValidationError):
        est.fit(X + 1e-6, np.zeros(len(X)))
    with pytest.raises(ValueError):
        est.fit(X, np.zeros(len(X) + 1))


def test_predict():
    est = SparsePseudospectralRegressor(level=6).fit_function(f, 2)
    pts = np.random.default_rng(2).uniform(-1, 1, (50, 2))
    pred = est.predict(pts)
    assert np.abs(pred - [f(p) for p in pts]).max() < 1e-10
    assert est.score(pts, [f(p) for p in pts]) > 1 - 1e-12
    with pytest.raises(InvalidArgumentError):
        est.predict(np.zeros((3, 3)))


def test_direct_method_and_errors():
    est = SparsePseudospectralRegressor(level=3, method="direct").fit_function(f, 2)
    assert est.expansion_.method == "direct"
    with pytest.raises(NotFittedError):
        SparsePseudospectralRegressor().predict(np.zeros((1, 2)))
    with pytest.raises(InvalidArgumentError):
        SparsePseudospectralRegressor(method="lstsq").design(2)
