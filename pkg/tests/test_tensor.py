import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from spamkit.exceptions import EvaluationError, InvalidArgumentError, ResourceLimitError
from spamkit.orthopoly import ExtrapolationWarning, LEGENDRE
from spamkit.tensor import (
    SpectralExpansion,
    as_multi_index,
    evaluate_expansion,
    evaluate_nodes,
    full_index_set,
    pseudospectral_from_values,
    tensor_grid,
    tensor_pseudospectral,
    tensor_quadrature,
    total_degree,
)


def test_multi_index_validation():
    assert as_multi_index([1, 2]) == (1, 2)
    assert as_multi_index(3) == (3,)
    for bad in ([0, 1], [1.5], []):
        with pytest.raises(InvalidArgumentError):
            as_multi_index(bad)
    assert total_degree((1, 1)) == 0
    assert total_degree((3, 2, 1)) == 3


def test_full_index_set_order_and_cap():
    assert full_index_set((2, 3)) == [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]
    with pytest.raises(ResourceLimitError):
        full_index_set((100, 100), max_size=9999)


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv("SPAMKIT_MAX_NODES", "8")
    with pytest.raises(ResourceLimitError):
        tensor_grid((3, 3))
    monkeypatch.setenv("SPAMKIT_MAX_NODES", "lots")
    with pytest.raises(InvalidArgumentError):
        tensor_grid((3, 3))


def test_grid_examples():
    g = tensor_grid((1, 1))
    assert g.nodes.tolist() == [[0.0, 0.0]] and g.weights.tolist() == [1.0]
    g = tensor_grid((2, 2))
    a = 1 / math.sqrt(3)
    np.testing.assert_allclose(g.nodes, [[-a, -a], [-a, a], [a, -a], [a, a]], atol=1e-15)
    np.testing.assert_allclose(g.weights, [0.25] * 4, atol=1e-16)
    with pytest.raises(InvalidArgumentError):
        tensor_grid((2, 2), families=(LEGENDRE,))


def test_quadrature_exactness_and_call_count():
    calls = []

    def f(s):
        calls.append(tuple(s))
        return s[0] ** 4 * s[1] ** 2

    g = tensor_grid((3, 2))
    assert tensor_quadrature(f, g) == pytest.approx(1 / 15, abs=1e-15)
    assert len(calls) == len(set(calls)) == 6


def test_evaluation_error_carries_node():
    def f(s):
        if s[0] > 0.5:
            raise ZeroDivisionError
        return 0.0

    with pytest.raises(EvaluationError) as info:
        evaluate_nodes(f, tensor_grid((3, 1)).nodes)
    assert info.value.node[0] == pytest.approx(math.sqrt(0.6))


def test_threads_do_not_change_values():
    nodes = tensor_grid((7, 5)).nodes
    f = lambda s: math.sin(3 * s[0]) * math.exp(s[1])
    assert np.array_equal(evaluate_nodes(f, nodes, 1), evaluate_nodes(f, nodes, 4))


def test_matches_loop_oracle():
    f = oracles.FUNCTIONS[3]
    exp = tensor_pseudospectral(f, (5, 4))
    ref = oracles.tensor_coeffs(f, (5, 4))
    for i, c in exp:
        assert c == pytest.approx(ref[i], abs=1e-13)


def test_constant_coefficient_equals_quadrature():
    f = oracles.FUNCTIONS[4]
    g = tensor_grid((9, 6))
    exp = tensor_pseudospectral(f, (9, 6))
    assert exp.mean() == tensor_quadrature(f, g)


def test_batch_axes():
    rng = np.random.default_rng(0)
    v = rng.normal(size=(3, 4, 2))
    both = pseudospectral_from_values(v, (3, 4))
    for b in range(2):
        assert np.array_equal(both[..., b], pseudospectral_from_values(v[..., b], (3, 4)))
    with pytest.raises(InvalidArgumentError):
        pseudospectral_from_values(v, (4, 3))


def test_interpolates_at_grid_nodes():
    f = lambda s: math.exp(s[0] - 2 * s[1])
    exp = tensor_pseudospectral(f, (6, 5))
    g = tensor_grid((6, 5))
    np.testing.assert_allclose(exp.evaluate(g.nodes), [f(x) for x in g.nodes], rtol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_reproduces_box_polynomials(n1, n2, data):
    i = (data.draw(st.integers(1, n1)), data.draw(st.integers(1, n2)))
    phi = lambda s: oracles.onp(i[0], s[0]) * oracles.onp(i[1], s[1])
    exp = tensor_pseudospectral(phi, (n1, n2))
    for k, c in exp:
        assert abs(c - (1.0 if k == i else 0.0)) < 1e-13


class TestSpectralExpansion:
    def test_sorted_and_read_only(self):
        exp = SpectralExpansion({(2, 1): 3.0, (1, 1): 2.0})
        assert exp.keys() == [(1, 1), (2, 1)]
        assert exp.mean() == 2.0 and exp.variance() == 9.0
        with pytest.raises(ValueError):
            exp.coefficients[0] = 1.0

    def test_validation(self):
        with pytest.raises(InvalidArgumentError):
            SpectralExpansion({})
        with pytest.raises(InvalidArgumentError):
            SpectralExpansion([((1, 1), 1.0), ((1, 1), 2.0)])
        with pytest.raises(InvalidArgumentError):
            SpectralExpansion({(1,): 1.0, (1, 1): 1.0})
        assert len(SpectralExpansion({}, dimension=2)) == 0

    def test_evaluate(self):
        exp = SpectralExpansion({(1, 1): 1.0, (2, 1): 2.0, (1, 3): -1.0})
        s = (0.3, -0.4)
        want = 1 + 2 * oracles.onp(2, 0.3) - oracles.onp(3, -0.4)
        assert exp(s) == pytest.approx(want, abs=1e-15)
        assert evaluate_expansion(exp, s) == exp(s)
        with pytest.raises(InvalidArgumentError):
            exp((0.1, 0.2, 0.3))
        with pytest.warns(ExtrapolationWarning):
            exp((1.5, 0.0))
