"""Tensor-product Gauss grids and pseudospectral expansions."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from ._config import resolve_max_nodes
from ._summation import NeumaierAccumulator, compensated_sum
from .exceptions import EvaluationError, InvalidArgumentError, ResourceLimitError
from .orthopoly import (
    LEGENDRE,
    QuadratureRule1D,
    RecurrenceCoefficients,
    basis_values,
    gauss_rule,
    transform_matrix,
    warn_if_extrapolating,
)

__all__ = [
    "MultiIndex",
    "as_multi_index",
    "total_degree",
    "resolve_families",
    "full_index_set",
    "TensorGrid",
    "tensor_grid",
    "tensor_quadrature",
    "SpectralExpansion",
    "tensor_pseudospectral",
    "pseudospectral_from_values",
    "evaluate_expansion",
    "evaluate_nodes",
]

MultiIndex = Tuple[int, ...]


def as_multi_index(m) -> MultiIndex:
    """Validate and normalise a 1-based multi-index."""
    seq = tuple(m) if np.ndim(m) else (m,)
    if not seq:
        raise InvalidArgumentError("multi-index must have at least one entry")
    out = []
    for x in seq:
        if int(x) != x or x < 1:
            raise InvalidArgumentError(f"multi-index entries must be integers >= 1, got {seq}")
        out.append(int(x))
    return tuple(out)


def total_degree(i: MultiIndex) -> int:
    """Polynomial degree of ``pi_i``: the sum of ``i_k - 1``."""
    return sum(i) - len(i)


def resolve_families(families, d: int) -> Tuple[RecurrenceCoefficients, ...]:
    """Broadcast ``None`` or a single family to ``d`` dimensions."""
    if families is None:
        return (LEGENDRE,) * d
    if isinstance(families, RecurrenceCoefficients):
        return (families,) * d
    families = tuple(families)
    if len(families) != d:
        raise InvalidArgumentError(f"expected {d} families, got {len(families)}")
    return families


def _check_size(n, max_nodes):
    size = math.prod(n)
    cap = resolve_max_nodes(max_nodes)
    if size > cap:
        raise ResourceLimitError(f"tensor order {n} has {size} nodes, cap is {cap}")
    return size


def full_index_set(n, max_size: Optional[int] = None) -> list:
    """All multi-indices ``i`` with ``1 <= i_k <= n_k``, in lexicographic order."""
    n = as_multi_index(n)
    _check_size(n, max_size)
    return list(itertools.product(*(range(1, nk + 1) for nk in n)))


@dataclass(frozen=True, eq=False)
class TensorGrid:
    """Cross product of univariate Gauss rules.

    Node ``j`` of the flattened grid corresponds to the ``j``-th multi-index
    of :func:`full_index_set` (last coordinate varies fastest).
    """

    order: MultiIndex
    rules: Tuple[QuadratureRule1D, ...]
    families: Tuple[RecurrenceCoefficients, ...]
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def dimension(self):
        return len(self.order)

    def __len__(self):
        return self.weights.size


def _product_weights(rules):
    w = np.ones(())
    for rule in rules:
        w = np.multiply.outer(w, rule.weights)
    return w.ravel()


def tensor_grid(n, families=None, max_nodes: Optional[int] = None) -> TensorGrid:
    """Tensor Gauss grid of order ``n`` (one univariate order per dimension)."""
    n = as_multi_index(n)
    _check_size(n, max_nodes)
    families = resolve_families(families, len(n))
    rules = tuple(gauss_rule(rc, nk) for rc, nk in zip(families, n))
    mesh = np.meshgrid(*(r.nodes for r in rules), indexing="ij")
    nodes = np.stack([x.ravel() for x in mesh], axis=1)
    weights = _product_weights(rules)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return TensorGrid(n, rules, families, nodes, weights)


def evaluate_nodes(f: Callable, nodes: np.ndarray, threads: int = 1) -> np.ndarray:
    """Call ``f`` exactly once per row of ``nodes``.

    With ``threads > 1`` calls are spread over a thread pool; results are
    still stored by node position so the output does not depend on it.
    """

    def call(x):
        try:
            return float(f(x))
        except Exception as exc:
            raise EvaluationError(tuple(float(v) for v in x)) from exc

    rows = [np.array(x) for x in nodes]
    if threads > 1 and len(rows) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return np.array(list(pool.map(call, rows)), dtype=float)
    return np.array([call(x) for x in rows], dtype=float)


def _contract_axis(a, mat, axis):
    """``out[..., i, ...] = sum_j mat[i, j] * a[..., j, ...]`` with compensation."""
    a = np.moveaxis(a, axis, 0)
    r = mat.shape[0]
    acc = NeumaierAccumulator((r,) + a.shape[1:])
    col_shape = (r,) + (1,) * (a.ndim - 1)
    for j in range(a.shape[0]):
        acc.add(mat[:, j].reshape(col_shape) * a[j])
    return np.moveaxis(acc.result(), 0, axis)


def _contract(values, matrices):
    # innermost sum is over the last coordinate
    out = values
    for k in reversed(range(len(matrices))):
        out = _contract_axis(out, matrices[k], k)
    return out


def tensor_quadrature(f: Callable, grid: TensorGrid, threads: int = 1) -> float:
    """Integrate ``f`` with a tensor grid; ``f`` receives a length-``d`` array."""
    values = evaluate_nodes(f, grid.nodes, threads).reshape(grid.order)
    weights = [rule.weights[None, :] for rule in grid.rules]
    return float(_contract(values, weights).reshape(()))


def pseudospectral_from_values(values, order, families=None) -> np.ndarray:
    """Tensor pseudospectral coefficients from node values.

    Parameters
    ----------
    values : array_like
        Node values of shape ``order + batch``; trailing batch axes are
        transformed independently.
    order : tuple of int
        Tensor order ``n``.
    families : optional
        Recurrence families, one per dimension (Legendre by default).

    Returns
    -------
    numpy.ndarray
        Coefficients with the same shape as ``values``; entry ``i - 1`` holds
        the coefficient of ``pi_i``.
    """
    order = as_multi_index(order)
    values = np.asarray(values, dtype=float)
    if values.shape[: len(order)] != order:
        raise InvalidArgumentError(
            f"values shape {values.shape} does not start with order {order}"
        )
    families = resolve_families(families, len(order))
    mats = [transform_matrix(rc, nk) for rc, nk in zip(families, order)]
    return _contract(values, mats)


class SpectralExpansion:
    """Finite expansion ``sum_i c_i pi_i(s)`` in an orthonormal product basis.

    Terms are stored sorted lexicographically by multi-index.

    Parameters
    ----------
    terms : mapping or iterable of (multi-index, coefficient)
    families : optional
        One recurrence family per dimension.
    dimension : int, optional
        Required when ``terms`` is empty.
    metadata : dict, optional
        Free-form provenance (orders, levels, flags).
    """

    def __init__(self, terms, families=None, dimension=None, metadata=None):
        items = terms.items() if hasattr(terms, "items") else terms
        pairs = sorted((as_multi_index(k), float(v)) for k, v in items)
        keys = [k for k, _ in pairs]
        if len(set(keys)) != len(keys):
            raise InvalidArgumentError("duplicate multi-index in expansion terms")
        if dimension is None:
            if not keys:
                raise InvalidArgumentError("dimension is required for an empty expansion")
            dimension = len(keys[0])
        if any(len(k) != dimension for k in keys):
            raise InvalidArgumentError("all multi-indices must have the same dimension")
        self.dimension = int(dimension)
        self.families = resolve_families(families, self.dimension)
        self.indices = np.array(keys, dtype=int).reshape(len(keys), self.dimension)
        self.coefficients = np.array([v for _, v in pairs], dtype=float)
        self.indices.setflags(write=False)
        self.coefficients.setflags(write=False)
        self.metadata = dict(metadata or {})

    @classmethod
    def _from_sorted(cls, indices, coefficients, families, metadata=None):
        self = cls.__new__(cls)
        self.dimension = indices.shape[1]
        self.families = tuple(families)
        self.indices = np.asarray(indices, dtype=int)
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.indices.setflags(write=False)
        self.coefficients.setflags(write=False)
        self.metadata = dict(metadata or {})
        return self

    def __len__(self):
        return self.coefficients.size

    def __iter__(self):
        for k, v in zip(self.keys(), self.coefficients):
            yield k, float(v)

    def __repr__(self):
        return f"{type(self).__name__}(dimension={self.dimension}, n_terms={len(self)})"

    def keys(self):
        return [tuple(int(x) for x in row) for row in self.indices]

    def as_dict(self) -> dict:
        return dict(iter(self))

    def coefficient(self, i, default=0.0) -> float:
        return self.as_dict().get(as_multi_index(i), default)

    def degrees(self) -> np.ndarray:
        return self.indices.sum(axis=1) - self.dimension

    def mean(self) -> float:
        """Coefficient of the constant polynomial ``pi_(1,...,1)``."""
        hit = np.all(self.indices == 1, axis=1)
        return float(self.coefficients[hit][0]) if hit.any() else 0.0

    def variance(self) -> float:
        """Sum of squared non-constant coefficients."""
        rest = ~np.all(self.indices == 1, axis=1)
        c = self.coefficients[rest]
        return math.fsum(c * c)

    def basis_matrix(self, points) -> np.ndarray:
        """``B[p, t] = pi_{i_t}(points[p])`` for every stored term ``t``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dimension:
            raise InvalidArgumentError(
                f"points have dimension {points.shape[1]}, expansion has {self.dimension}"
            )
        out = np.ones((points.shape[0], len(self)))
        if not len(self):
            return out
        for k, rc in enumerate(self.families):
            nmax = int(self.indices[:, k].max())
            table = basis_values(rc, nmax, points[:, k])
            out = out * table[:, self.indices[:, k] - 1]
        return out

    def evaluate(self, points) -> np.ndarray:
        """Evaluate at an ``(P, d)`` array of points; terms summed in key order."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        warn_if_extrapolating(self.families, points)
        if not len(self):
            return np.zeros(points.shape[0])
        terms = self.basis_matrix(points) * self.coefficients
        return np.atleast_1d(compensated_sum(terms, axis=1))

    def __call__(self, s) -> float:
        return evaluate_expansion(self, s)


def evaluate_expansion(exp: SpectralExpansion, s) -> float:
    """Evaluate an expansion at a single ``d``-dimensional point."""
    s = np.asarray(s, dtype=float).ravel()
    if s.size != exp.dimension:
        raise InvalidArgumentError(
            f"point has dimension {s.size}, expansion has {exp.dimension}"
        )
    return float(exp.evaluate(s[None, :])[0])


def tensor_pseudospectral(
    f: Callable,
    n,
    families=None,
    max_nodes: Optional[int] = None,
    threads: int = 1,
) -> SpectralExpansion:
    """Tensor pseudospectral expansion of ``f`` on the order-``n`` Gauss grid.

    ``f`` is called exactly once per grid node with a length-``d`` array.
    """
    grid = tensor_grid(n, families, max_nodes)
    values = evaluate_nodes(f, grid.nodes, threads).reshape(grid.order)
    coeffs = pseudospectral_from_values(values, grid.order, grid.families)
    indices = np.array(full_index_set(grid.order, max_nodes), dtype=int)
    return SpectralExpansion._from_sorted(
        indices.reshape(-1, grid.dimension),
        coeffs.ravel(),
        grid.families,
        {"order": grid.order},
    )
