"""Command line entry point: ``spamkit {nodes,fit,compare,gram}``.

Exit codes: 0 success, 1 file-system error, 2 invalid input, 3 resource
limit, 4 numerical or evaluator failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io
from .exceptions import (
    EvaluationError,
    InvalidArgumentError,
    NumericFailureError,
    ResourceLimitError,
)
from .experiments import (
    coefficient_surface,
    diffusion_response,
    level_sweep,
    test_function,
    truth_expansion,
)
from .smolyak import SmolyakScheme, build_sparse_rule
from .spam import (
    direct_expansion_from_values,
    gram_matrix,
    spam_expansion_from_values,
)
from .tensor import evaluate_nodes

log = logging.getLogger("spamkit")

FUNCTION_CHOICES = ("1", "2", "3", "4", "5", "diffusion", "ext")


@dataclass
class RunConfig:
    dim: int
    level: object
    growth: str = "exp"
    scheme_file: Optional[Path] = None
    function: Optional[str] = None
    out: Path = Path(".")
    max_nodes: Optional[int] = None
    seed: Optional[int] = None
    threads: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidArgumentError("--dim must be >= 1")
        if self.max_nodes is not None and self.max_nodes <= 0:
            raise InvalidArgumentError("--max-nodes must be positive")
        if self.threads < 1:
            raise InvalidArgumentError("--threads must be >= 1")

    def levels(self):
        return parse_levels(self.level)

    def scheme(self, level=None) -> SmolyakScheme:
        if self.scheme_file is not None:
            return io.load_scheme(self.scheme_file)
        if level is None:
            levels = self.levels()
            if len(levels) != 1:
                raise InvalidArgumentError("this command takes a single --level")
            level = levels[0]
        return SmolyakScheme.standard(self.dim, level, self.growth)

    def evaluator(self, dim):
        if self.function in (None, "ext"):
            raise InvalidArgumentError("a built-in --function is required")
        if self.function == "diffusion":
            return diffusion_response(dim)
        if dim != 2:
            raise InvalidArgumentError(f"test function {self.function} is bivariate; use --dim 2")
        return test_function(self.function)


def parse_levels(text) -> list:
    """``"4"``, ``"2:6"`` (inclusive) or ``"2,4,5"``."""
    if isinstance(text, int):
        levels = [text]
    else:
        try:
            text = str(text).strip()
            if ":" in text:
                lo, hi = (int(t) for t in text.split(":"))
                levels = list(range(lo, hi + 1))
            else:
                levels = [int(t) for t in text.split(",")]
        except ValueError:
            raise InvalidArgumentError(f"cannot parse level {text!r}") from None
    if not levels or min(levels) < 0:
        raise InvalidArgumentError(f"levels must be non-empty and >= 0, got {text!r}")
    return levels


def _config(args) -> RunConfig:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return RunConfig(
        dim=args.dim,
        level=args.level,
        growth=args.growth,
        scheme_file=Path(args.scheme) if getattr(args, "scheme", None) else None,
        function=getattr(args, "function", None),
        out=out,
        max_nodes=args.max_nodes,
        seed=args.seed,
        threads=args.threads,
    )


def _rule(cfg, scheme=None):
    scheme = scheme or cfg.scheme()
    return build_sparse_rule(scheme, max_nodes=cfg.max_nodes, keep_contributors=False)


def cmd_nodes(args) -> int:
    cfg = _config(args)
    rule = _rule(cfg)
    io.write_nodes(cfg.out / "nodes.csv", rule)
    io.write_rule(cfg.out / "rule.csv", rule)
    if cfg.function not in (None, "ext"):
        values = evaluate_nodes(cfg.evaluator(rule.dimension), rule.nodes, cfg.threads)
        io.write_values(cfg.out / "values.csv", rule.nodes, values)
    print(f"nodes {len(rule)}")
    return 0


def _fit_values(cfg, rule, values_file):
    if values_file is not None:
        return io.read_values(values_file, rule.nodes)
    if cfg.function in (None, "ext"):
        raise InvalidArgumentError("fit needs --values or a built-in --function")
    return evaluate_nodes(cfg.evaluator(rule.dimension), rule.nodes, cfg.threads)


def cmd_fit(args) -> int:
    cfg = _config(args)
    rule = _rule(cfg)
    values = _fit_values(cfg, rule, args.values)
    methods = ("spam", "direct") if args.method == "both" else (args.method,)
    for method in methods:
        if method == "spam":
            exp = spam_expansion_from_values(values, rule, cfg.threads)
        else:
            exp = direct_expansion_from_values(values, rule)
        name = "coeffs.csv" if len(methods) == 1 else f"coeffs_{method}.csv"
        io.write_expansion(cfg.out / name, exp)
        print(f"{method}: mean {exp.mean():.17g} variance {exp.variance():.17g} basis {len(exp)}")
        if cfg.seed is not None and cfg.function not in (None, "ext"):
            f = cfg.evaluator(rule.dimension)
            pts = np.random.default_rng(cfg.seed).uniform(-1.0, 1.0, (100, rule.dimension))
            err = np.max(np.abs(exp.evaluate(pts) - evaluate_nodes(f, pts)))
            print(f"{method}: holdout max abs error {err:.3e} (100 points, seed {cfg.seed})")
    return 0


def cmd_compare(args) -> int:
    cfg = _config(args)
    if cfg.scheme_file is not None:
        raise InvalidArgumentError("compare sweeps standard schemes; --scheme is not supported")
    f = cfg.evaluator(cfg.dim)
    methods = ("spam", "direct") if args.method == "both" else (args.method,)
    truth = truth_expansion(f, args.truth_order, cfg.dim, threads=cfg.threads)
    reports, _, kept = level_sweep(
        f, cfg.dim, cfg.levels(), cfg.growth, truth=truth, methods=methods,
        threads=cfg.threads, max_nodes=cfg.max_nodes, keep_expansions=True,
    )
    io.write_report(cfg.out / "report.csv", reports)
    if args.surfaces:
        if cfg.dim != 2:
            raise InvalidArgumentError("--surfaces needs --dim 2")
        io.write_surface(cfg.out / "surface_truth.csv", coefficient_surface(truth))
        for level, exps in kept.items():
            for method, exp in exps.items():
                io.write_surface(cfg.out / f"surface_{method}_l{level}.csv",
                                 coefficient_surface(exp))
    for r in reports:
        print(f"level {r.level} nodes {r.n_nodes} spam {r.spam_error:.3e} "
              f"direct {r.direct_error:.3e} trunc {r.truncation_error:.3e}")
    return 0


def cmd_gram(args) -> int:
    cfg = _config(args)
    rule = _rule(cfg)
    modes = ("spam", "direct") if args.method == "both" else (args.method,)
    for mode in modes:
        g = gram_matrix(rule, mode, threads=cfg.threads, max_nodes=cfg.max_nodes)
        io.write_gram(cfg.out / f"gram_{mode}.csv", g)
        size, degree = g.identity_block(1e-10)
        print(f"{mode}: basis {len(g.basis)} max|G-I| {g.max_deviation():.3e} "
              f"identity block {size} (through degree {degree})")
    return 0


def _common(p, level_default="3"):
    p.add_argument("--dim", type=int, default=2, help="number of random inputs (default 2)")
    p.add_argument("--level", default=level_default,
                   help="Smolyak level; l=0 is the single grid n=(1,...,1)")
    p.add_argument("--growth", choices=("exp", "linear"), default="exp",
                   help="rule sizes 2^m-1 (exp) or 2m-1 (linear)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--max-nodes", type=int, default=None,
                   help="resource cap (default: SPAMKIT_MAX_NODES or 1e7)")
    p.add_argument("--seed", type=int, default=None, help="seed for random check points")
    p.add_argument("--threads", type=int, default=1, help="worker threads (outputs do not depend on it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spamkit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nodes", help="write the sparse-grid nodes and rule")
    _common(p)
    p.add_argument("--scheme", help="scheme config file (dim, level, growth, index_set)")
    p.add_argument("--function", choices=FUNCTION_CHOICES, help="also write values.csv")
    p.set_defaults(run=cmd_nodes)

    p = sub.add_parser("fit", help="fit an expansion from node values")
    _common(p)
    p.add_argument("--scheme")
    p.add_argument("--function", choices=FUNCTION_CHOICES, default="ext")
    p.add_argument("--values", help="values.csv with node echo (for --function ext)")
    p.add_argument("--method", choices=("spam", "direct", "both"), default="spam")
    p.set_defaults(run=cmd_fit)

    p = sub.add_parser("compare", help="SPAM vs direct coefficient errors over levels")
    _common(p, level_default="2:6")
    p.add_argument("--function", choices=FUNCTION_CHOICES, required=True)
    p.add_argument("--method", choices=("spam", "direct", "both"), default="both")
    p.add_argument("--truth-order", type=int, default=64)
    p.add_argument("--surfaces", action="store_true", help="write coefficient surfaces")
    p.set_defaults(run=cmd_compare)

    p = sub.add_parser("gram", help="discrete Gram matrices of the union basis")
    _common(p, level_default="4")
    p.add_argument("--scheme")
    p.add_argument("--method", choices=("spam", "direct", "both"), default="both")
    p.set_defaults(run=cmd_gram)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.run(args)
    except InvalidArgumentError as exc:
        return _fail(2, "invalid input", exc)
    except ResourceLimitError as exc:
        return _fail(3, "resource limit", exc)
    except (NumericFailureError, EvaluationError) as exc:
        if exc.__cause__ is not None:
            exc = f"{exc} ({exc.__cause__!r})"
        return _fail(4, "numerical failure", exc)
    except OSError as exc:
        return _fail(1, "file error", exc)


def _fail(code, kind, exc):
    print(f"spamkit: {kind}: {exc}", file=sys.stderr)
    return code

if __name__ == "__main__":
    sys.exit(main())
