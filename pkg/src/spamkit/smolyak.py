"""Smolyak index sets, combination coefficients and merged sparse-grid rules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Tuple, Union

import numpy as np

from ._config import MERGE_TOL, resolve_max_nodes
from ._summation import compensated_sum
from .exceptions import InvalidArgumentError, ResourceLimitError
from .orthopoly import gauss_rule
from .tensor import (
    MultiIndex,
    TensorGrid,
    as_multi_index,
    evaluate_nodes,
    resolve_families,
    tensor_grid,
)

__all__ = [
    "GrowthRule",
    "SmolyakScheme",
    "SparseGridRule",
    "GridPart",
    "standard_index_set",
    "smolyak_coefficient",
    "build_sparse_rule",
    "sparse_quadrature",
]

_ALIASES = {"exp": "exponential", "exponential": "exponential", "linear": "linear", "lin": "linear"}


@dataclass(frozen=True)
class GrowthRule:
    """Map from Smolyak index ``m >= 1`` to a univariate rule size ``n_m``.

    ``exponential``: ``2**m - 1``; ``linear``: ``2*m - 1``; ``custom``: an
    explicit table ``(n_1, n_2, ...)``.
    """

    kind: str = "exponential"
    table: Tuple[int, ...] = ()

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in ("exponential", "linear", "custom"):
            raise InvalidArgumentError(f"unknown growth rule {self.kind!r}")
        table = tuple(int(n) for n in self.table)
        if kind == "custom":
            if not table or table[0] < 1:
                raise InvalidArgumentError("custom growth table must start with n_1 >= 1")
            if any(b <= a for a, b in zip(table, table[1:])):
                raise InvalidArgumentError("custom growth table must be strictly increasing")
        elif table:
            raise InvalidArgumentError("only custom growth rules take a table")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "table", table)

    @classmethod
    def parse(cls, value: Union[str, "GrowthRule"]) -> "GrowthRule":
        if isinstance(value, GrowthRule):
            return value
        return cls(str(value).strip().lower())

    @property
    def short_name(self) -> str:
        return {"exponential": "exp", "linear": "linear", "custom": "custom"}[self.kind]

    def __call__(self, m: int) -> int:
        if m < 1:
            raise InvalidArgumentError("growth index m must be >= 1")
        if self.kind == "exponential":
            return 2**m - 1
        if self.kind == "linear":
            return 2 * m - 1
        if m > len(self.table):
            raise InvalidArgumentError(f"custom growth table has no entry for m={m}")
        return self.table[m - 1]


def _compositions(d, lo, hi):
    """Tuples of ``d`` positive integers with sum in ``[lo, hi]``, lexicographic."""
    if d == 1:
        for x in range(max(lo, 1), hi + 1):
            yield (x,)
        return
    for first in range(1, hi - (d - 1) + 1):
        for rest in _compositions(d - 1, lo - first, hi - first):
            yield (first,) + rest


def standard_index_set(d: int, l: int) -> list:
    """Admissible set ``{m : l + 1 <= |m| <= l + d}`` in lexicographic order."""
    if d < 1:
        raise InvalidArgumentError("dimension must be >= 1")
    if l < 0:
        raise InvalidArgumentError("level must be >= 0")
    return list(_compositions(d, l + 1, l + d))


def smolyak_coefficient(m, d: int, l: int) -> int:
    """``(-1)**(l + d - |m|) * binomial(d - 1, l + d - |m|)``."""
    m = as_multi_index(m)
    if len(m) != d:
        raise InvalidArgumentError(f"multi-index {m} does not have dimension {d}")
    k = l + d - sum(m)
    if not 0 <= k <= d - 1:
        raise InvalidArgumentError(f"{m} is not in the level-{l} standard index set")
    return (-1) ** k * math.comb(d - 1, k)


@dataclass(frozen=True, eq=False)
class SmolyakScheme:
    """Admissible index set with combination coefficients and a growth rule.

    Use :meth:`standard` for the classical isotropic scheme and
    :meth:`custom` to inject any ``(m, c(m))`` table.
    """

    dim: int
    level: Optional[int]
    index_set: Tuple[MultiIndex, ...]
    coefficients: Tuple[float, ...]
    growth: GrowthRule = field(default_factory=GrowthRule)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidArgumentError("dimension must be >= 1")
        if self.level is not None and self.level < 0:
            raise InvalidArgumentError("level must be >= 0")
        if len(self.index_set) != len(self.coefficients) or not self.index_set:
            raise InvalidArgumentError("index set and coefficients must be non-empty and aligned")
        pairs = sorted(zip((as_multi_index(m) for m in self.index_set), self.coefficients))
        if any(len(m) != self.dim for m, _ in pairs):
            raise InvalidArgumentError("index set entries must match the scheme dimension")
        if len({m for m, _ in pairs}) != len(pairs):
            raise InvalidArgumentError("index set contains duplicates")
        object.__setattr__(self, "index_set", tuple(m for m, _ in pairs))
        object.__setattr__(self, "coefficients", tuple(c for _, c in pairs))
        object.__setattr__(self, "growth", GrowthRule.parse(self.growth))

    @classmethod
    def standard(cls, dim: int, level: int, growth="exp") -> "SmolyakScheme":
        index_set = standard_index_set(dim, level)
        coefs = tuple(smolyak_coefficient(m, dim, level) for m in index_set)
        return cls(dim, level, tuple(index_set), coefs, GrowthRule.parse(growth))

    @classmethod
    def custom(cls, terms: Mapping, growth="exp", level=None) -> "SmolyakScheme":
        items = list(terms.items())
        if not items:
            raise InvalidArgumentError("custom scheme needs at least one term")
        dim = len(as_multi_index(items[0][0]))
        return cls(dim, level, tuple(m for m, _ in items), tuple(c for _, c in items),
                   GrowthRule.parse(growth))

    @property
    def is_standard(self) -> bool:
        if self.level is None:
            return False
        std = standard_index_set(self.dim, self.level)
        return tuple(std) == self.index_set and all(
            smolyak_coefficient(m, self.dim, self.level) == c
            for m, c in zip(self.index_set, self.coefficients)
        )

    def orders(self, m) -> MultiIndex:
        """Tensor order ``(n_{m_1}, ..., n_{m_d})``."""
        return tuple(self.growth(mk) for mk in m)

    def coefficient(self, m) -> float:
        return dict(zip(self.index_set, self.coefficients))[as_multi_index(m)]

    def terms(self):
        """``(m, c(m), orders)`` for every index with a non-zero coefficient."""
        return [(m, c, self.orders(m)) for m, c in zip(self.index_set, self.coefficients) if c != 0]

    def tensor_node_count(self) -> int:
        return sum(math.prod(n) for _, _, n in self.terms())


@dataclass(frozen=True, eq=False)
class GridPart:
    """One constituent tensor grid and where its nodes landed after merging."""

    multi_index: MultiIndex
    coefficient: float
    grid: TensorGrid
    node_index: np.ndarray = field(repr=False)

    @property
    def order(self):
        return self.grid.order


@dataclass(frozen=True, eq=False)
class SparseGridRule:
    """Merged sparse-grid quadrature rule; weights may be negative.

    Nodes are unique (under the merge tolerance) and sorted lexicographically
    by coordinates.
    """

    scheme: SmolyakScheme
    families: tuple
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    parts: Tuple[GridPart, ...] = field(repr=False)
    _contributors: Optional[tuple] = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.scheme.dim

    def __len__(self):
        return self.weights.size

    def contributors(self, j: int) -> list:
        """``(m, tensor-local weight)`` pairs merged into node ``j``."""
        if self._contributors is None:
            raise InvalidArgumentError("rule was built with keep_contributors=False")
        return list(self._contributors[j])


def _cluster_axis(rc, orders, tol):
    """Merge univariate nodes of several Gauss orders along one axis.

    Returns ``{order: cluster ids}`` and the canonical coordinate per cluster.
    Cluster ids increase with coordinate. The canonical coordinate is taken
    from the lowest order in the cluster, so the shared midpoint of odd-order
    symmetric rules is keyed structurally, not by floating-point equality.
    """
    entries = []
    for n in sorted(orders):
        for j, x in enumerate(gauss_rule(rc, n).nodes):
            entries.append((float(x), n, j))
    entries.sort()
    ids = {n: np.empty(n, dtype=np.int64) for n in orders}
    canon = []
    anchor = None
    best_order = None
    for x, n, j in entries:
        if anchor is None or x - anchor > tol:
            anchor = x
            canon.append(x)
            best_order = n
        elif n < best_order:
            canon[-1] = x
            best_order = n
        ids[n][j] = len(canon) - 1
    return ids, np.array(canon)


def build_sparse_rule(
    scheme: SmolyakScheme,
    families=None,
    max_nodes: Optional[int] = None,
    keep_contributors: bool = True,
    merge_tol: float = MERGE_TOL,
) -> SparseGridRule:
    """Merge the tensor grids of a Smolyak scheme into one signed rule.

    The merged weight of a node is the sum over contributing grids of
    ``c(m)`` times the tensor weight. Raises :class:`InvalidArgumentError`
    if the weights do not sum to 1 within 1e-12 (which is how custom
    schemes are validated) and :class:`ResourceLimitError` if the total
    tensor node count exceeds the cap.
    """
    families = resolve_families(families, scheme.dim)
    cap = resolve_max_nodes(max_nodes)
    terms = scheme.terms()
    if not terms:
        raise InvalidArgumentError("scheme has no non-zero coefficients")
    total = scheme.tensor_node_count()
    if total > cap:
        raise ResourceLimitError(f"sparse grid needs {total} tensor nodes, cap is {cap}")

    axes = []
    for k in range(scheme.dim):
        used = {n[k] for _, _, n in terms}
        axes.append(_cluster_axis(families[k], used, merge_tol))

    grids, keys, contrib = [], [], []
    for m, c, n in terms:
        grid = tensor_grid(n, families, cap)
        mesh = np.meshgrid(*(axes[k][0][n[k]] for k in range(scheme.dim)), indexing="ij")
        keys.append(np.stack([x.ravel() for x in mesh], axis=1))
        contrib.append(c * grid.weights)
        grids.append(grid)
    all_keys = np.concatenate(keys)
    all_contrib = np.concatenate(contrib)
    unique_keys, inverse = np.unique(all_keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)

    order = np.argsort(inverse, kind="stable")
    bounds = np.flatnonzero(np.diff(inverse[order])) + 1
    weights = np.array([math.fsum(g) for g in np.split(all_contrib[order], bounds)])
    nodes = np.stack([axes[k][1][unique_keys[:, k]] for k in range(scheme.dim)], axis=1)

    err = abs(math.fsum(weights) - 1.0)
    if err > 1e-12:
        raise InvalidArgumentError(
            f"sparse weights sum to 1 + {err:.3e}; the (index set, coefficient) pair is inconsistent"
        )

    parts, offset = [], 0
    for (m, c, _), grid in zip(terms, grids):
        idx = inverse[offset : offset + len(grid)]
        idx.setflags(write=False)
        parts.append(GridPart(m, c, grid, idx))
        offset += len(grid)

    contributors = None
    if keep_contributors:
        lists = [[] for _ in range(len(weights))]
        for part in parts:
            for pos, j in enumerate(part.node_index):
                lists[j].append((part.multi_index, float(part.grid.weights[pos])))
        contributors = tuple(tuple(x) for x in lists)

    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SparseGridRule(scheme, families, nodes, weights, tuple(parts), contributors)


def sparse_quadrature(f: Callable, rule: SparseGridRule, threads: int = 1) -> float:
    """``sum_j f(node_j) weight_j`` in canonical node order, one call per node."""
    if not len(rule):
        raise InvalidArgumentError("rule has no nodes")
    return sparse_quadrature_values(evaluate_nodes(f, rule.nodes, threads), rule)


def sparse_quadrature_values(values, rule: SparseGridRule) -> float:
    values = np.asarray(values, dtype=float)
    if values.shape != rule.weights.shape:
        raise InvalidArgumentError(f"expected {len(rule)} node values, got {values.shape}")
    return compensated_sum(values * rule.weights)
