"""Univariate orthonormal polynomials and their Gauss quadrature rules.

Families are described by three-term recurrence coefficients for polynomials
orthonormal with respect to a probability density. Indices are 1-based:
``pi_i`` has degree ``i - 1`` and ``pi_1 == 1``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ._summation import compensated_sum
from .exceptions import (
    DataValidationError,
    EvaluationError,
    InvalidArgumentError,
    NumericFailureError,
)

__all__ = [
    "RecurrenceCoefficients",
    "QuadratureRule1D",
    "BasisEvaluation",
    "ExtrapolationWarning",
    "LEGENDRE",
    "legendre_recurrence",
    "jacobi_matrix",
    "tridiag_eigenvalues",
    "gauss_rule",
    "eval_basis",
    "basis_values",
    "transform_matrix",
    "quadrature_apply",
    "pseudospectral_1d",
]


class ExtrapolationWarning(UserWarning):
    """Basis polynomials were evaluated outside the support interval."""


@dataclass(frozen=True)
class RecurrenceCoefficients:
    """Recurrence table ``(alpha_k, beta_k)``, ``k = 1..n``.

    ``beta_k`` couples ``pi_k`` and ``pi_{k+1}``:

        s pi_k(s) = beta_{k-1} pi_{k-1}(s) + alpha_k pi_k(s) + beta_k pi_{k+1}(s)

    so a table of length ``n`` supports Gauss rules and basis vectors of up to
    ``n`` entries. ``beta_n`` only enters the rule of order ``n + 1``.
    """

    alphas: Tuple[float, ...]
    betas: Tuple[float, ...]
    family_label: str = "custom"
    support: Optional[Tuple[float, float]] = None
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        betas = tuple(float(b) for b in self.betas)
        if len(alphas) != len(betas):
            raise InvalidArgumentError("alphas and betas must have equal length")
        if not alphas:
            raise InvalidArgumentError("recurrence table is empty")
        if not all(b > 0 for b in betas):
            raise InvalidArgumentError("betas must be strictly positive")
        support = None if self.support is None else tuple(float(x) for x in self.support)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "support", support)
        object.__setattr__(
            self, "_hash", hash((alphas, betas, self.family_label, support))
        )

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.alphas)

    @classmethod
    def from_csv(cls, path, family_label=None, support=None):
        """Load a table from a CSV file with header ``k,alpha,beta``."""
        alphas, betas = [], []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != [
                "k",
                "alpha",
                "beta",
            ]:
                raise DataValidationError(f"{path}: expected header 'k,alpha,beta'")
            for row_no, row in enumerate(reader, start=1):
                try:
                    k = int(row["k"])
                    alpha, beta = float(row["alpha"]), float(row["beta"])
                except (TypeError, ValueError):
                    raise DataValidationError(f"{path}: malformed row {row_no}")
                if k != row_no:
                    raise DataValidationError(
                        f"{path}: row {row_no} has k={k}, expected {row_no}"
                    )
                alphas.append(alpha)
                betas.append(beta)
        label = family_label if family_label is not None else str(path)
        return cls(tuple(alphas), tuple(betas), label, support)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["k", "alpha", "beta"])
            for k, (a, b) in enumerate(zip(self.alphas, self.betas), start=1):
                writer.writerow([k, format(a, ".17g"), format(b, ".17g")])


@dataclass(frozen=True, eq=False)
class QuadratureRule1D:
    """Nodes and probability weights of a univariate rule."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise InvalidArgumentError("nodes and weights must be equal-length 1-D arrays")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidArgumentError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise InvalidArgumentError("weights must be strictly positive")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise InvalidArgumentError("weights must sum to 1")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size


@dataclass(frozen=True, eq=False)
class BasisEvaluation:
    """Values ``pi_1(s), ..., pi_n(s)`` at a single point."""

    values: np.ndarray
    extrapolated: bool = False


def legendre_recurrence(n: int) -> RecurrenceCoefficients:
    """Recurrence for Legendre polynomials orthonormal under density 1/2 on [-1, 1]."""
    if n < 1:
        raise InvalidArgumentError("n must be at least 1")
    betas = tuple(k / math.sqrt(4.0 * k * k - 1.0) for k in range(1, n + 1))
    return RecurrenceCoefficients((0.0,) * n, betas, "legendre", (-1.0, 1.0))


LEGENDRE = legendre_recurrence(1024)


def _require_length(rc, n):
    if n < 1:
        raise InvalidArgumentError("n must be at least 1")
    if n > len(rc):
        raise InvalidArgumentError(
            f"{rc.family_label!r} has {len(rc)} recurrence coefficients, {n} requested"
        )


def jacobi_matrix(rc: RecurrenceCoefficients, n: int) -> np.ndarray:
    """Dense ``n x n`` Jacobi matrix: ``alpha_1..alpha_n`` on the diagonal,
    ``beta_1..beta_{n-1}`` on the off-diagonals."""
    _require_length(rc, n)
    off = np.array(rc.betas[: n - 1])
    return np.diag(np.array(rc.alphas[:n])) + np.diag(off, 1) + np.diag(off, -1)


def tridiag_eigenvalues(diag: Sequence[float], offdiag: Sequence[float]) -> np.ndarray:
    """Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.

    Parameters
    ----------
    diag : sequence of float
        The ``n`` diagonal entries.
    offdiag : sequence of float
        The ``n - 1`` off-diagonal entries.

    Returns
    -------
    numpy.ndarray
        All eigenvalues in ascending order.

    Raises
    ------
    NumericFailureError
        If more than ``30 n`` QL sweeps are needed.
    """
    d = [float(x) for x in diag]
    n = len(d)
    if n == 0:
        raise InvalidArgumentError("matrix must be at least 1 x 1")
    if len(offdiag) != n - 1:
        raise InvalidArgumentError("offdiag must have length n - 1")
    e = [float(x) for x in offdiag] + [0.0]
    eps = np.finfo(float).eps
    max_sweeps = 30 * n
    sweeps = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd or e[m] == 0.0:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise NumericFailureError(
                    f"tridiagonal QL did not converge after {max_sweeps} sweeps"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(np.array(d))


def basis_values(rc: RecurrenceCoefficients, n: int, s) -> np.ndarray:
    """Evaluate ``pi_1..pi_n`` at every point of ``s``.

    Returns an array of shape ``s.shape + (n,)``. No support check is made.
    """
    _require_length(rc, n)
    s = np.asarray(s, dtype=float)
    out = np.empty(s.shape + (n,))
    out[..., 0] = 1.0
    if n > 1:
        out[..., 1] = (s - rc.alphas[0]) / rc.betas[0]
    for k in range(2, n):
        # slot k holds pi_{k+1}
        out[..., k] = (
            (s - rc.alphas[k - 1]) * out[..., k - 1] - rc.betas[k - 2] * out[..., k - 2]
        ) / rc.betas[k - 1]
    return out


def _outside_support(rc, s):
    if rc.support is None:
        return False
    lo, hi = rc.support
    s = np.asarray(s)
    return bool(np.any((s < lo) | (s > hi)))


def eval_basis(rc: RecurrenceCoefficients, n: int, s: float) -> BasisEvaluation:
    """Basis vector at one point; ``extrapolated`` marks points off the support."""
    values = basis_values(rc, n, float(s))
    values.setflags(write=False)
    return BasisEvaluation(values, _outside_support(rc, s))


def _polish(rc, n, nodes):
    """Newton-refine eigenvalues on ``pi_{n+1}`` and form ``1/||pi||^2``, both in
    extended precision, so that the rounded weights match the rounded nodes."""
    x = nodes.astype(np.longdouble)
    a = np.array(rc.alphas[:n], dtype=np.longdouble)
    b = np.array(rc.betas[:n], dtype=np.longdouble)
    scale = 1.0 + float(np.max(np.abs(nodes)))
    for _ in range(2):
        p_prev, p = np.zeros_like(x), np.ones_like(x)
        dp_prev, dp = np.zeros_like(x), np.zeros_like(x)
        for k in range(n):
            b_prev = b[k - 1] if k else 0.0
            p_next = ((x - a[k]) * p - b_prev * p_prev) / b[k]
            dp_next = (p + (x - a[k]) * dp - b_prev * dp_prev) / b[k]
            p_prev, p, dp_prev, dp = p, p_next, dp, dp_next
        step = p / dp
        # a large step would mean Newton is wandering toward a neighbouring root
        step[~np.isfinite(step) | (np.abs(step) > 1e-10 * scale)] = 0.0
        x = x - step
    p_prev, p = np.zeros_like(x), np.ones_like(x)
    total = np.ones_like(x)
    for k in range(n - 1):
        b_prev = b[k - 1] if k else 0.0
        p_prev, p = p, ((x - a[k]) * p - b_prev * p_prev) / b[k]
        total += p * p
    return x.astype(float), (1.0 / total).astype(float)


@lru_cache(maxsize=4096)
def gauss_rule(rc: RecurrenceCoefficients, n: int) -> QuadratureRule1D:
    """The ``n``-point Gauss rule of a family.

    Nodes are the Jacobi-matrix eigenvalues (implicit QL, then a Newton
    polish); weights are ``1 / ||pi(node)||^2`` with ``n`` basis entries.
    """
    _require_length(rc, n)
    nodes = tridiag_eigenvalues(rc.alphas[:n], rc.betas[: n - 1])
    nodes, weights = _polish(rc, n, nodes)
    return QuadratureRule1D(nodes, weights)


@lru_cache(maxsize=4096)
def transform_matrix(rc: RecurrenceCoefficients, n: int) -> np.ndarray:
    """Matrix ``T[i, j] = pi_i(node_j) * weight_j`` mapping node values to
    pseudospectral coefficients. Row 0 equals the weight vector exactly."""
    rule = gauss_rule(rc, n)
    out = basis_values(rc, n, rule.nodes).T * rule.weights
    out.setflags(write=False)
    return out


def _evaluate(f, nodes):
    out = np.empty(len(nodes))
    for j, x in enumerate(nodes):
        try:
            out[j] = f(x)
        except Exception as exc:
            raise EvaluationError(x) from exc
    return out


def quadrature_apply(rule, f: Callable) -> float:
    """Apply a quadrature rule to ``f``.

    For a :class:`QuadratureRule1D` ``f`` receives a float; for multivariate
    rules (anything with ``nodes`` of shape ``(N, d)`` and ``weights``) it
    receives a length-``d`` array. Terms are summed in node order with
    compensation.
    """
    nodes = np.asarray(rule.nodes)
    if nodes.shape[0] == 0:
        raise InvalidArgumentError("rule has no nodes")
    if nodes.ndim == 1:
        values = _evaluate(f, [float(x) for x in nodes])
    else:
        values = _evaluate(f, list(nodes))
    return compensated_sum(values * np.asarray(rule.weights))


def pseudospectral_1d(f: Callable, rc: RecurrenceCoefficients, n: int) -> np.ndarray:
    """Coefficients ``f_hat_i = sum_j f(node_j) pi_i(node_j) weight_j``, ``i = 1..n``."""
    rule = gauss_rule(rc, n)
    values = _evaluate(f, [float(x) for x in rule.nodes])
    return compensated_sum(transform_matrix(rc, n) * values, axis=1)


def warn_if_extrapolating(families, points):
    """Emit :class:`ExtrapolationWarning` if any coordinate leaves its support."""
    points = np.asarray(points)
    for k, rc in enumerate(families):
        if _outside_support(rc, points[..., k]):
            warnings.warn(
                f"evaluating outside the support of {rc.family_label!r} in dimension {k + 1}",
                ExtrapolationWarning,
                stacklevel=3,
            )
            return True
    return False
