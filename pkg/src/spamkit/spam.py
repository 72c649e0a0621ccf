"""Sparse pseudospectral approximation and the direct sparse-quadrature baseline.

The sparse pseudospectral expansion combines the tensor pseudospectral
coefficients of each constituent grid with the Smolyak coefficients
``c(m)``. The direct baseline instead integrates every basis polynomial
against ``f`` with the merged (signed) sparse rule.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._summation import NeumaierAccumulator, compensated_sum
from .exceptions import InvalidArgumentError, ResourceLimitError
from .orthopoly import basis_values
from .smolyak import SmolyakScheme, SparseGridRule, build_sparse_rule
from .tensor import (
    SpectralExpansion,
    as_multi_index,
    evaluate_nodes,
    full_index_set,
    pseudospectral_from_values,
    total_degree,
)
from ._config import resolve_max_nodes

__all__ = [
    "SpamExpansion",
    "GramMatrix",
    "union_basis",
    "degree_sorted",
    "spam_expansion",
    "spam_from_values",
    "direct_sparse_expansion",
    "direct_from_values",
    "gram_matrix",
    "expansion_mean",
    "expansion_variance",
]


def degree_sorted(indices) -> list:
    """Sort multi-indices by total degree, then lexicographically."""
    return sorted((as_multi_index(i) for i in indices), key=lambda i: (total_degree(i), i))


def union_basis(scheme: SmolyakScheme, families=None, max_size: Optional[int] = None) -> list:
    """Union of the tensor index sets of every grid in the scheme.

    Returned in (total degree, lexicographic) order. ``families`` is accepted
    for symmetry with the other builders; the basis depends only on orders.
    """
    cap = resolve_max_nodes(max_size)
    basis = set()
    for _, _, n in scheme.terms():
        basis.update(full_index_set(n, cap))
        if len(basis) > cap:
            raise ResourceLimitError(f"union basis exceeds {cap} elements")
    return degree_sorted(basis)


class SpamExpansion(SpectralExpansion):
    """Expansion over a union basis, with the scheme that produced it.

    ``basis`` lists the union basis in degree order; coefficients are
    stored (like every :class:`SpectralExpansion`) in lexicographic order.
    """

    def __init__(self, basis, coefficients, families, scheme, method="spam", n_nodes=None,
                 metadata=None):
        basis = [as_multi_index(i) for i in basis]
        coefficients = np.asarray(coefficients, dtype=float)
        lex = sorted(range(len(basis)), key=lambda t: basis[t])
        indices = np.array([basis[t] for t in lex], dtype=int).reshape(len(basis), scheme.dim)
        meta = {
            "dim": scheme.dim,
            "level": scheme.level,
            "growth": scheme.growth.short_name,
            "method": method,
            "n_nodes": n_nodes,
            "n_basis": len(basis),
        }
        meta.update(metadata or {})
        init = SpectralExpansion._from_sorted(indices, coefficients[lex], families, meta)
        self.__dict__.update(init.__dict__)
        self.basis = tuple(degree_sorted(basis))
        self.scheme = scheme
        self.method = method

    def coefficients_in_basis_order(self) -> np.ndarray:
        lookup = self.as_dict()
        return np.array([lookup[i] for i in self.basis])


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """``matrix[a, b]`` is the coefficient of ``pi_a`` recovered from ``f = pi_b``.

    Rows and columns follow ``basis`` (degree-sorted).
    """

    matrix: np.ndarray = field(repr=False)
    basis: tuple
    mode: str

    def deviation(self) -> np.ndarray:
        return np.abs(self.matrix - np.eye(len(self.basis)))

    def max_deviation(self) -> float:
        return float(self.deviation().max())

    def identity_block(self, tol: float = 1e-10):
        """Size of the largest leading block equal to the identity within ``tol``.

        Returns ``(size, degree of last basis element in the block)``.
        """
        dev = self.deviation()
        size = 0
        while size < len(self.basis):
            k = size + 1
            if max(dev[:k, k - 1].max(), dev[k - 1, :k].max()) >= tol:
                break
            size = k
        degree = total_degree(self.basis[size - 1]) if size else -1
        return size, degree


def _positions(keys, lookup):
    return np.array([lookup[k] for k in keys], dtype=np.int64)


def spam_from_values(values, rule: SparseGridRule, basis=None, threads: int = 1) -> np.ndarray:
    """SPAM coefficients from values at the rule's unique nodes.

    Parameters
    ----------
    values : array_like
        Shape ``(N,)`` or ``(N, batch)``, aligned with ``rule.nodes``.
    rule : SparseGridRule
    basis : list of multi-index, optional
        Output ordering; defaults to :func:`union_basis` of the rule's scheme.
    threads : int
        Tensor transforms for distinct grids may run concurrently; the
        combination is always a sequential fold in lexicographic ``m`` order.

    Returns
    -------
    numpy.ndarray
        Shape ``(len(basis),) + batch``.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] != len(rule):
        raise InvalidArgumentError(f"expected {len(rule)} node values, got {values.shape[0]}")
    batch = values.shape[1:]
    basis = union_basis(rule.scheme) if basis is None else [as_multi_index(i) for i in basis]
    lookup = {k: t for t, k in enumerate(basis)}

    def transform(part):
        local = values[part.node_index].reshape(part.order + batch)
        coeffs = pseudospectral_from_values(local, part.order, rule.families)
        return coeffs.reshape((-1,) + batch)

    parts = rule.parts
    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(transform, parts))
    else:
        blocks = [transform(p) for p in parts]

    acc = NeumaierAccumulator((len(basis),) + batch)
    for part, block in zip(parts, blocks):
        try:
            where = _positions(full_index_set(part.order), lookup)
        except KeyError as exc:
            raise InvalidArgumentError(f"basis is missing index {exc.args[0]}") from None
        acc.add(part.coefficient * block, where)
    out = acc.result()
    # The constant coefficient is sum_m c(m) Q_m(f), which the merged rule
    # re-brackets as sum_j w_j f_j. Taking it from the merged rule keeps the
    # mean bit-identical to sparse_quadrature.
    const = lookup.get((1,) * rule.dimension)
    if const is not None:
        w = rule.weights.reshape((-1,) + (1,) * len(batch))
        out[const] = compensated_sum(values * w, axis=0)
    return out


def _rule_for(scheme_or_rule, families, max_nodes=None):
    if isinstance(scheme_or_rule, SparseGridRule):
        return scheme_or_rule
    return build_sparse_rule(scheme_or_rule, families, max_nodes=max_nodes,
                             keep_contributors=False)


def spam_expansion(
    f: Callable,
    scheme,
    families=None,
    threads: int = 1,
    max_nodes: Optional[int] = None,
) -> SpamExpansion:
    """Sparse pseudospectral expansion of ``f``.

    ``f`` is evaluated once per unique sparse-grid node; every constituent
    tensor grid reads its values from that shared table.
    """
    rule = _rule_for(scheme, families, max_nodes)
    values = evaluate_nodes(f, rule.nodes, threads)
    return spam_expansion_from_values(values, rule, threads)


def spam_expansion_from_values(values, rule: SparseGridRule, threads: int = 1) -> SpamExpansion:
    basis = union_basis(rule.scheme)
    coefs = spam_from_values(values, rule, basis, threads)
    return SpamExpansion(basis, coefs, rule.families, rule.scheme, "spam", len(rule))


def _basis_at_nodes(rule, basis):
    """``B[j, t] = pi_{basis[t]}(node_j)``."""
    idx = np.array(basis, dtype=int).reshape(len(basis), rule.dimension)
    out = np.ones((len(rule), len(basis)))
    for k, rc in enumerate(rule.families):
        table = basis_values(rc, int(idx[:, k].max()), rule.nodes[:, k])
        out = out * table[:, idx[:, k] - 1]
    return out


def direct_from_values(values, rule: SparseGridRule, basis=None) -> np.ndarray:
    """Integrate ``values * pi`` with the signed sparse rule, for each basis element.

    Terms are ``(value * pi(node)) * weight`` summed in canonical node order,
    so the constant coefficient matches :func:`sparse_quadrature` exactly.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] != len(rule):
        raise InvalidArgumentError(f"expected {len(rule)} node values, got {values.shape[0]}")
    basis = union_basis(rule.scheme) if basis is None else [as_multi_index(i) for i in basis]
    B = _basis_at_nodes(rule, basis)
    batch = values.shape[1:]
    acc = NeumaierAccumulator((len(basis),) + batch)
    for j in range(len(rule)):
        v = values[j].reshape((1,) + batch)
        acc.add((B[j].reshape((-1,) + (1,) * len(batch)) * v) * rule.weights[j])
    return acc.result()


def direct_sparse_expansion(
    f: Callable,
    scheme,
    families=None,
    basis=None,
    threads: int = 1,
    max_nodes: Optional[int] = None,
) -> SpamExpansion:
    """Baseline: apply the sparse rule directly to each Fourier-coefficient integral."""
    rule = _rule_for(scheme, families, max_nodes)
    values = evaluate_nodes(f, rule.nodes, threads)
    return direct_expansion_from_values(values, rule, basis)


def direct_expansion_from_values(values, rule: SparseGridRule, basis=None) -> SpamExpansion:
    basis = union_basis(rule.scheme) if basis is None else degree_sorted(basis)
    coefs = direct_from_values(values, rule, basis)
    return SpamExpansion(basis, coefs, rule.families, rule.scheme, "direct", len(rule))


def gram_matrix(scheme_or_rule, mode: str = "spam", families=None, threads: int = 1,
                max_nodes: Optional[int] = None) -> GramMatrix:
    """Discrete Gram matrix of the union basis under SPAM or direct integration.

    Entry ``(a, b)`` is the coefficient of ``pi_a`` obtained when the method
    is applied to ``f = pi_b``.
    """
    if mode not in ("spam", "direct"):
        raise InvalidArgumentError(f"mode must be 'spam' or 'direct', got {mode!r}")
    rule = _rule_for(scheme_or_rule, families, max_nodes)
    basis = union_basis(rule.scheme)
    cap = resolve_max_nodes(max_nodes)
    if len(basis) ** 2 > cap * 100:
        raise ResourceLimitError(f"Gram matrix of {len(basis)} basis elements is too large")
    B = _basis_at_nodes(rule, basis)
    if mode == "spam":
        G = spam_from_values(B, rule, basis, threads)
    else:
        G = direct_from_values(B, rule, basis)
    G.setflags(write=False)
    return GramMatrix(G, tuple(basis), mode)


def expansion_mean(exp: SpectralExpansion) -> float:
    """Mean under the weight density: the constant-term coefficient."""
    if not len(exp):
        raise InvalidArgumentError("expansion is empty")
    return exp.mean()


def expansion_variance(exp: SpectralExpansion) -> float:
    """Variance: sum of squared non-constant coefficients."""
    if not len(exp):
        raise InvalidArgumentError("expansion is empty")
    return exp.variance()
