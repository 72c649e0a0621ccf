import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from spamkit.exceptions import (
    DataValidationError,
    EvaluationError,
    InvalidArgumentError,
    NumericFailureError,
)
from spamkit.orthopoly import (
    LEGENDRE,
    ExtrapolationWarning,
    QuadratureRule1D,
    RecurrenceCoefficients,
    basis_values,
    eval_basis,
    gauss_rule,
    jacobi_matrix,
    legendre_recurrence,
    pseudospectral_1d,
    quadrature_apply,
    transform_matrix,
    tridiag_eigenvalues,
    warn_if_extrapolating,
)


class TestRecurrence:
    def test_legendre_values(self):
        rc = legendre_recurrence(3)
        assert rc.alphas == (0.0, 0.0, 0.0)
        assert rc.betas[0] == pytest.approx(1 / math.sqrt(3), abs=1e-15)
        assert rc.betas[1] == pytest.approx(2 / math.sqrt(15), abs=1e-15)
        assert rc.support == (-1.0, 1.0)

    def test_rejects_bad_tables(self):
        with pytest.raises(InvalidArgumentError):
            legendre_recurrence(0)
        with pytest.raises(InvalidArgumentError):
            RecurrenceCoefficients((0.0, 0.0), (1.0,))
        with pytest.raises(InvalidArgumentError):
            RecurrenceCoefficients((0.0,), (-1.0,))
        with pytest.raises(InvalidArgumentError):
            RecurrenceCoefficients((), ())

    def test_hashable_and_equal(self):
        assert legendre_recurrence(5) == legendre_recurrence(5)
        assert hash(legendre_recurrence(5)) == hash(legendre_recurrence(5))

    def test_csv_round_trip(self, tmp_path):
        rc = legendre_recurrence(20)
        path = tmp_path / "rc.csv"
        rc.to_csv(path)
        text = path.read_bytes()
        assert text.startswith(b"k,alpha,beta\n1,0,")
        assert b"\r" not in text
        back = RecurrenceCoefficients.from_csv(path, "legendre", (-1.0, 1.0))
        assert back == rc

    def test_csv_errors(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("k,a,b\n1,0,1\n")
        with pytest.raises(DataValidationError):
            RecurrenceCoefficients.from_csv(p)
        p.write_text("k,alpha,beta\n2,0,1\n")
        with pytest.raises(DataValidationError, match="row 1"):
            RecurrenceCoefficients.from_csv(p)
        p.write_text("k,alpha,beta\n1,zero,1\n")
        with pytest.raises(DataValidationError):
            RecurrenceCoefficients.from_csv(p)

    def test_custom_family_from_file(self, tmp_path):
        # probabilists' Hermite, orthonormal: alpha = 0, beta_k = sqrt(k)
        p = tmp_path / "hermite.csv"
        p.write_text("k,alpha,beta\n" + "".join(f"{k},0,{math.sqrt(k)!r}\n" for k in range(1, 6)))
        rc = RecurrenceCoefficients.from_csv(p, "hermite")
        rule = gauss_rule(rc, 3)
        np.testing.assert_allclose(rule.nodes, [-math.sqrt(3), 0, math.sqrt(3)], atol=1e-14)
        np.testing.assert_allclose(rule.weights, [1 / 6, 2 / 3, 1 / 6], atol=1e-14)


class TestJacobi:
    def test_examples(self):
        assert jacobi_matrix(LEGENDRE, 1).tolist() == [[0.0]]
        J2 = jacobi_matrix(LEGENDRE, 2)
        assert J2[0, 1] == J2[1, 0] == pytest.approx(0.5773502691896258, abs=1e-15)
        J3 = jacobi_matrix(LEGENDRE, 3)
        assert J3[1, 2] == pytest.approx(0.5163977794943222, abs=1e-15)
        assert np.all(np.diag(J3) == 0)

    def test_length_guard(self):
        short = legendre_recurrence(4)
        with pytest.raises(InvalidArgumentError):
            jacobi_matrix(short, 5)
        with pytest.raises(InvalidArgumentError):
            gauss_rule(short, 0)

    def test_eigenvalue_examples(self):
        np.testing.assert_allclose(
            tridiag_eigenvalues([0, 0], [1 / math.sqrt(3)]),
            [-0.5773502691896258, 0.5773502691896258], atol=1e-15)
        J = jacobi_matrix(LEGENDRE, 3)
        np.testing.assert_allclose(tridiag_eigenvalues(np.diag(J), np.diag(J, 1)),
                                   [-math.sqrt(0.6), 0, math.sqrt(0.6)], atol=1e-15)

    def test_eigenvalues_against_dense_solver(self):
        rng = np.random.default_rng(3)
        for n in (1, 2, 5, 17, 60):
            d = rng.normal(size=n)
            e = rng.normal(size=n - 1)
            ref = np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1))
            np.testing.assert_allclose(tridiag_eigenvalues(d, e), ref, atol=1e-12)

    def test_decoupled_blocks(self):
        vals = tridiag_eigenvalues([1.0, 2.0, 3.0], [0.0, 0.0])
        assert vals.tolist() == [1.0, 2.0, 3.0]

    def test_bad_shapes(self):
        with pytest.raises(InvalidArgumentError):
            tridiag_eigenvalues([], [])
        with pytest.raises(InvalidArgumentError):
            tridiag_eigenvalues([1.0, 2.0], [])

    def test_nonconvergence_is_reported(self):
        with pytest.raises(NumericFailureError):
            tridiag_eigenvalues([0.0, 0.0], [float("nan")])


class TestGaussRule:
    def test_examples(self):
        r = gauss_rule(LEGENDRE, 1)
        assert r.nodes.tolist() == [0.0] and r.weights.tolist() == [1.0]
        r = gauss_rule(LEGENDRE, 2)
        np.testing.assert_allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
        np.testing.assert_allclose(r.weights, [0.5, 0.5], atol=1e-15)
        r = gauss_rule(LEGENDRE, 3)
        np.testing.assert_allclose(r.nodes, [-math.sqrt(0.6), 0, math.sqrt(0.6)], atol=1e-15)
        np.testing.assert_allclose(r.weights, [5 / 18, 4 / 9, 5 / 18], atol=1e-15)

    @pytest.mark.parametrize("n", [4, 7, 15, 31, 50, 64])
    def test_matches_reference(self, n):
        x, w = oracles.gauss_legendre(n)
        r = gauss_rule(LEGENDRE, n)
        np.testing.assert_allclose(r.nodes, x, atol=1e-14)
        # the reference itself loses about 1e-12 relative on the smallest weights
        np.testing.assert_allclose(r.weights, w, rtol=1e-11, atol=2e-15)

    @pytest.mark.parametrize("n", [7, 64])
    def test_matches_extended_precision(self, n):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 40
        r = gauss_rule(LEGENDRE, n)
        for x, w in zip(r.nodes, r.weights):
            t = mpmath.mpf(x)
            for _ in range(4):
                t -= mpmath.legendre(n, t) / mpmath.diff(lambda u: mpmath.legendre(n, u), t)
            dp = mpmath.diff(lambda u: mpmath.legendre(n, u), t)
            w_ref = 1 / ((1 - t * t) * dp * dp)
            assert abs(x - float(t)) < 1e-15
            assert abs(w - float(w_ref)) / float(w_ref) < 5e-14

    @pytest.mark.parametrize("n", [2, 9, 40, 127])
    def test_symmetry(self, n):
        r = gauss_rule(LEGENDRE, n)
        np.testing.assert_allclose(r.nodes, -r.nodes[::-1], atol=1e-13)
        np.testing.assert_allclose(r.weights, r.weights[::-1], atol=1e-13)
        assert abs(math.fsum(r.weights) - 1) < 1e-13

    def test_read_only(self):
        r = gauss_rule(LEGENDRE, 5)
        with pytest.raises(ValueError):
            r.nodes[0] = 1.0

    def test_rule_validation(self):
        with pytest.raises(InvalidArgumentError):
            QuadratureRule1D([0.1, 0.0], [0.5, 0.5])
        with pytest.raises(InvalidArgumentError):
            QuadratureRule1D([0.0, 0.1], [1.5, -0.5])
        with pytest.raises(InvalidArgumentError):
            QuadratureRule1D([0.0, 0.1], [0.5, 0.4])

    def test_cached(self):
        assert gauss_rule(LEGENDRE, 11) is gauss_rule(LEGENDRE, 11)


class TestBasis:
    def test_examples(self):
        v = eval_basis(LEGENDRE, 3, 0.5).values
        assert v[0] == 1.0
        assert v[1] == pytest.approx(math.sqrt(3) * 0.5, abs=1e-15)
        assert eval_basis(LEGENDRE, 3, 1.0).values[2] == pytest.approx(math.sqrt(5), abs=1e-14)

    def test_extrapolation_flag(self):
        assert not eval_basis(LEGENDRE, 3, 1.0).extrapolated
        assert eval_basis(LEGENDRE, 3, 1.5).extrapolated
        with pytest.warns(ExtrapolationWarning):
            assert warn_if_extrapolating((LEGENDRE,), np.array([[2.0]]))

    def test_against_reference(self):
        x = np.linspace(-1, 1, 41)
        B = basis_values(LEGENDRE, 30, x)
        assert B.shape == (41, 30)
        for i in (1, 2, 5, 17, 30):
            np.testing.assert_allclose(B[:, i - 1], oracles.onp(i, x), atol=1e-12)

    def test_orthonormal_under_own_rule(self):
        n = 25
        r = gauss_rule(LEGENDRE, n)
        B = basis_values(LEGENDRE, n, r.nodes)
        G = (B.T * r.weights) @ B
        np.testing.assert_allclose(G, np.eye(n), atol=1e-13)

    def test_transform_matrix(self):
        T = transform_matrix(LEGENDRE, 6)
        r = gauss_rule(LEGENDRE, 6)
        assert np.array_equal(T[0], r.weights)
        assert not T.flags.writeable


class TestQuadrature:
    def test_examples(self):
        assert quadrature_apply(gauss_rule(LEGENDRE, 3), lambda s: s**4) == pytest.approx(0.2, abs=1e-14)
        assert quadrature_apply(gauss_rule(LEGENDRE, 2), lambda s: s**4) == pytest.approx(1 / 9, abs=1e-15)

    def test_evaluator_failure(self):
        def bad(s):
            if s > 0:
                raise RuntimeError("boom")
            return s

        with pytest.raises(EvaluationError) as info:
            quadrature_apply(gauss_rule(LEGENDRE, 3), bad)
        assert info.value.node == pytest.approx(math.sqrt(0.6))
        assert isinstance(info.value.__cause__, RuntimeError)

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(1, 40), data=st.data())
    def test_exactness(self, n, data):
        k = data.draw(st.integers(0, 2 * n - 1))
        exact = 1.0 / (k + 1) if k % 2 == 0 else 0.0
        assert abs(quadrature_apply(gauss_rule(LEGENDRE, n), lambda s: s**k) - exact) < 1e-12


class TestPseudospectral1D:
    def test_interpolates_at_nodes(self):
        n = 9
        c = pseudospectral_1d(math.exp, LEGENDRE, n)
        r = gauss_rule(LEGENDRE, n)
        approx = basis_values(LEGENDRE, n, r.nodes) @ c
        np.testing.assert_allclose(approx, np.exp(r.nodes), rtol=1e-12)

    def test_reproduces_basis(self):
        for j in range(1, 8):
            c = pseudospectral_1d(lambda s: basis_values(LEGENDRE, 8, s)[j - 1], LEGENDRE, 8)
            np.testing.assert_allclose(c, np.eye(8)[j - 1], atol=1e-13)

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=10))
    def test_polynomial_recovery(self, coefs):
        n = len(coefs)
        f = lambda s: float(basis_values(LEGENDRE, n, s) @ np.array(coefs))
        np.testing.assert_allclose(pseudospectral_1d(f, LEGENDRE, n), coefs, atol=1e-12)
