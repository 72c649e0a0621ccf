"""Bivariate benchmark functions, truth expansions and level sweeps."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .exceptions import InvalidArgumentError
from .smolyak import GrowthRule, SmolyakScheme, build_sparse_rule
from .spam import (
    direct_expansion_from_values,
    spam_expansion_from_values,
    union_basis,
)
from .tensor import SpectralExpansion, as_multi_index, evaluate_nodes, tensor_pseudospectral, total_degree

__all__ = [
    "TestFunction",
    "ErrorReport",
    "TruthResolutionWarning",
    "test_function",
    "diffusion_response",
    "truth_expansion",
    "coefficient_error",
    "truncation_error",
    "level_sweep",
    "coefficient_surface",
    "degree_envelope",
]


class TruthResolutionWarning(UserWarning):
    """The trailing coefficients of a truth expansion have not decayed enough."""


@dataclass(frozen=True)
class TestFunction:
    __test__ = False

    id: object
    formula: str
    evaluator: Callable
    dim: int = 2
    decay_tol: float = 1e-10

    def __call__(self, s):
        return self.evaluator(s)


def _f1(s):
    return s[0] ** 10 * s[1] ** 10


def _f2(s):
    return math.exp(s[0] + s[1])


def _f3(s):
    return math.sin(5.0 * (s[0] - 0.5)) + math.cos(3.0 * (s[1] - 1.0))


def _f4(s):
    return 1.0 / (2.0 + 16.0 * (s[0] - 0.1) ** 2 + 25.0 * (s[1] + 0.1) ** 2)


def _f5(s):
    return (abs(s[0] - 0.2) + abs(s[1] + 0.2)) ** 3


_FUNCTIONS = {
    1: TestFunction(1, "s1^10 * s2^10", _f1),
    2: TestFunction(2, "exp(s1 + s2)", _f2),
    3: TestFunction(3, "sin(5(s1 - 0.5)) + cos(3(s2 - 1))", _f3),
    4: TestFunction(4, "1 / (2 + 16(s1 - 0.1)^2 + 25(s2 + 0.1)^2)", _f4),
    # kinks in the first derivative: only slow algebraic decay
    5: TestFunction(5, "(|s1 - 0.2| + |s2 + 0.2|)^3", _f5, decay_tol=1e-4),
}


def test_function(id) -> TestFunction:
    """One of the five bivariate benchmark functions (ids 1 to 5)."""
    try:
        return _FUNCTIONS[int(id)]
    except (KeyError, TypeError, ValueError):
        raise InvalidArgumentError(f"unknown test function id {id!r}; expected 1..5") from None


test_function.__test__ = False


def diffusion_response(dim: int = 5, decay: float = 0.5, scale: float = 0.4) -> TestFunction:
    """Analytic stand-in for the spatial mean of a 1-D diffusion solve.

    ``g(s) = 1 / (1 + sum_k scale * decay**(k-1) * s_k)``: a rational
    response whose sensitivity decays across dimensions, like a truncated
    random-field coefficient with decreasing eigenvalues.
    """
    w = np.array([scale * decay**k for k in range(dim)])
    if w.sum() >= 1.0:
        raise InvalidArgumentError("weights must sum below 1 to keep the response analytic")

    def g(s):
        return 1.0 / (1.0 + float(np.dot(w, s)))

    return TestFunction("diffusion", f"1 / (1 + sum_k {scale}*{decay}^(k-1) s_k)", g, dim)


def _trailing_mass(exp: SpectralExpansion, order):
    band = np.any(exp.indices > np.array(order) - np.array(order) // 4, axis=1)
    c2 = exp.coefficients**2
    total = math.fsum(c2)
    return math.fsum(c2[band]) / total if total > 0 else 0.0


def truth_expansion(f, order: int = 64, dim: Optional[int] = None, families=None,
                    decay_tol: Optional[float] = None, threads: int = 1) -> SpectralExpansion:
    """High-order tensor pseudospectral expansion used as the reference.

    The share of squared coefficient mass in the last quarter of the index
    range is recorded in ``metadata["trailing_mass"]``; a
    :class:`TruthResolutionWarning` is issued when it exceeds ``decay_tol``
    (taken from the :class:`TestFunction` when available).
    """
    if dim is None:
        dim = getattr(f, "dim", 2)
    if decay_tol is None:
        decay_tol = getattr(f, "decay_tol", 1e-10)
    orders = (int(order),) * dim
    exp = tensor_pseudospectral(f, orders, families, threads=threads)
    mass = _trailing_mass(exp, orders)
    exp.metadata.update({"order": orders, "trailing_mass": mass})
    if mass > decay_tol:
        warnings.warn(
            f"truth order {order} may be unresolved: trailing mass {mass:.2e} > {decay_tol:.0e}",
            TruthResolutionWarning,
            stacklevel=2,
        )
    return exp


def _truth_lookup(truth: SpectralExpansion):
    lookup = truth.as_dict()
    box = truth.indices.max(axis=0) if len(truth) else None

    def get(i):
        if i in lookup:
            return lookup[i]
        if box is not None and np.all(np.array(i) <= box):
            raise InvalidArgumentError(f"truth expansion has no coefficient for {i}")
        # beyond the truth order the reference coefficient is taken as zero
        return 0.0

    return get


def coefficient_error(approx, truth: SpectralExpansion, basis=None) -> float:
    """Sum over ``basis`` of squared differences between approximate and truth
    coefficients, accumulated in basis order.

    ``basis`` defaults to the approximation's own basis. Indices beyond the
    truth's tensor order compare against zero.
    """
    approx_map = approx.as_dict() if hasattr(approx, "as_dict") else dict(approx)
    if basis is None:
        basis = getattr(approx, "basis", None) or sorted(approx_map)
    basis = [as_multi_index(i) for i in basis]
    if any(len(i) != truth.dimension for i in basis):
        raise InvalidArgumentError("basis and truth dimensions differ")
    extra = set(approx_map) - set(basis)
    if extra:
        raise InvalidArgumentError(f"approximation has terms outside the basis, e.g. {min(extra)}")
    ref = _truth_lookup(truth)
    return math.fsum((approx_map.get(i, 0.0) - ref(i)) ** 2 for i in basis)


def truncation_error(truth: SpectralExpansion, basis) -> float:
    """Sum of squared truth coefficients whose index is not in ``basis``."""
    keep = {as_multi_index(i) for i in basis}
    return math.fsum(v * v for i, v in truth if i not in keep)


@dataclass(frozen=True)
class ErrorReport:
    level: int
    n_nodes: int
    spam_error: float
    direct_error: float
    truncation_error: float

    def __post_init__(self):
        for name in ("spam_error", "direct_error", "truncation_error"):
            v = getattr(self, name)
            if not (math.isnan(v) or v >= 0):
                raise InvalidArgumentError(f"{name} must be >= 0")


def level_sweep(f, dim: int = 2, levels: Iterable[int] = range(2, 7), growth="exp",
                truth: Optional[SpectralExpansion] = None, truth_order: int = 64,
                methods=("spam", "direct"), families=None, threads: int = 1,
                max_nodes: Optional[int] = None, keep_expansions: bool = False):
    """Compare SPAM and direct coefficients against a shared truth, level by level.

    Returns a list of :class:`ErrorReport` in level order; methods left out
    report ``nan``. With ``keep_expansions=True`` returns
    ``(reports, truth, {level: {method: expansion}})``.
    """
    growth = GrowthRule.parse(growth)
    if truth is None:
        truth = truth_expansion(f, truth_order, dim, families, threads=threads)
    reports, kept = [], {}
    for level in levels:
        scheme = SmolyakScheme.standard(dim, level, growth)
        rule = build_sparse_rule(scheme, families, max_nodes=max_nodes, keep_contributors=False)
        values = evaluate_nodes(f, rule.nodes, threads)
        basis = union_basis(scheme)
        errs, exps = {}, {}
        for method in ("spam", "direct"):
            if method not in methods:
                errs[method] = math.nan
                continue
            if method == "spam":
                exp = spam_expansion_from_values(values, rule, threads)
            else:
                exp = direct_expansion_from_values(values, rule, basis)
            errs[method] = coefficient_error(exp, truth, basis)
            exps[method] = exp
        reports.append(ErrorReport(level, len(rule), errs["spam"], errs["direct"],
                                   truncation_error(truth, basis)))
        kept[level] = exps
    if keep_expansions:
        return reports, truth, kept
    return reports


def coefficient_surface(exp: SpectralExpansion, max_index: Optional[int] = None) -> list:
    """Rows ``(i_1, i_2, log10|c|)`` of a bivariate expansion; zeros map to ``-inf``."""
    if exp.dimension != 2:
        raise InvalidArgumentError("coefficient surfaces are defined for 2-D expansions")
    rows = []
    for (i1, i2), c in exp:
        if max_index is not None and (i1 > max_index or i2 > max_index):
            continue
        rows.append((i1, i2, math.log10(abs(c)) if c != 0 else -math.inf))
    return rows


def degree_envelope(exp: SpectralExpansion) -> dict:
    """Largest coefficient magnitude at each total degree."""
    out = {}
    for i, c in exp:
        d = total_degree(i)
        out[d] = max(out.get(d, 0.0), abs(c))
    return dict(sorted(out.items()))
