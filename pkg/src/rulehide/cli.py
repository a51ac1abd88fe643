"""Command-line interface: build trees, list rules, hide rules, solve balance
equations, evaluate runs, and serve the HTTP API.

Exit codes: 0 success, 2 input/parse error, 3 unsolvable equation without a
relax budget, 4 rule not found.  Identical inputs produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dataset import Dataset, DatasetError, load_csv, write_csv
from .diophantine import (
    DiophantineEq,
    UnsolvableError,
    minimal_natural,
    solve_general,
)
from .evaluation import build_report
from .hiding import CompletionStrategy, HidingError, hide
from .tree import RuleNotFoundError, RulePath, induce

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNSOLVABLE = 3
EXIT_RULE_NOT_FOUND = 4


def _read_dataset(path: str):
    with open(path, "rb") as fh:
        return load_csv(fh.read())


def _parse_relax(specs: list[str]) -> dict[int | str, int]:
    budgets: dict[int | str, int] = {}
    for spec in specs:
        key, _, budget = spec.partition(":")
        if not budget:
            raise DatasetError(f"bad relax spec {spec!r}; expected node:budget, e.g. root:1")
        budgets["root" if key == "root" else int(key)] = int(budget)
    return budgets


def _gather_requests(ds: Dataset, args: argparse.Namespace) -> list[str]:
    """Rule-text requests plus node-id addressed ones (plan-debugging aid;
    node ids do not survive re-induction, rule chains do)."""
    requests = list(args.request)
    if getattr(args, "request_node", None):
        tree = induce(ds)
        for raw in args.request_node:
            node = tree.node(int(raw))
            if not node.is_leaf:
                raise RuleNotFoundError(f"node {raw} is not a leaf")
            rule = RulePath(tree.path_to(node.node_id), node.leaf_class)
            requests.append(rule.format(tree.schema_names))
    return requests


#: Config-file key -> (namespace attribute, built-in default).  A flag that
#: still carries its default is overridden by the config file.
_CONFIG_KEYS = {
    "output": ("output", None),
    "requests": ("request", []),
    "relax": ("relax", []),
    "strategy": ("strategy", CompletionStrategy.TWO_LEVEL_HOLDBACK.value),
    "emit_tree": ("emit_tree", None),
    "emit_plan": ("emit_plan", None),
    "emit_report": ("emit_report", None),
}


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    """Config file supplies defaults; explicit flags win."""
    if not getattr(args, "config", None):
        return args
    doc = json.loads(Path(args.config).read_text())
    for key, (attr, default) in _CONFIG_KEYS.items():
        if key in doc and hasattr(args, attr) and getattr(args, attr) == default:
            setattr(args, attr, doc[key])
    return args


def cmd_build(args: argparse.Namespace) -> int:
    ds = _read_dataset(args.input)
    tree = induce(ds)
    text = tree.to_json()
    if args.emit_tree:
        Path(args.emit_tree).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_rules(args: argparse.Namespace) -> int:
    ds = _read_dataset(args.input)
    tree = induce(ds)
    for rule in tree.extract_rules():
        print(rule.format(tree.schema_names))
    return EXIT_OK


def cmd_hide(args: argparse.Namespace) -> int:
    ds = _read_dataset(args.input)
    relax = _parse_relax(args.relax or [])
    strategy = CompletionStrategy(args.strategy)
    result = hide(ds, _gather_requests(ds, args), relax=relax, strategy=strategy)
    sanitized = write_csv(result.sanitized, include_provenance=args.provenance)
    if args.output:
        Path(args.output).write_text(sanitized)
    else:
        sys.stdout.write(sanitized)
    if args.emit_plan:
        Path(args.emit_plan).write_text(result.plan.to_json() + "\n")
    if args.emit_tree:
        Path(args.emit_tree).write_text(result.retrained_tree.to_json() + "\n")
    if args.emit_report:
        Path(args.emit_report).write_text(build_report(result).to_json() + "\n")
    return EXIT_OK


def cmd_solve_eq(args: argparse.Namespace) -> int:
    eq = DiophantineEq(args.a, args.b, args.c)
    family = solve_general(eq)
    doc: dict = {"equation": {"a": eq.a, "b": eq.b, "c": eq.c}}
    if family is None:
        doc["solvable"] = False
    else:
        x, y = minimal_natural(family, args.lb_x, args.lb_y)
        doc.update(
            solvable=True,
            family={
                "x0": family.x0,
                "y0": family.y0,
                "step_x": family.step_x,
                "step_y": family.step_y,
                "gcd": family.g,
            },
            lower_bounds=[args.lb_x, args.lb_y],
            minimal=[x, y],
        )
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    ds = _read_dataset(args.input)
    relax = _parse_relax(args.relax or [])
    strategy = CompletionStrategy(args.strategy)
    result = hide(ds, _gather_requests(ds, args), relax=relax, strategy=strategy)
    report = build_report(result)
    print(report.to_json() if args.json else report.to_text())
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.data_dir))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rulehide", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="induce a tree and emit it as JSON")
    build.add_argument("input")
    build.add_argument("--emit-tree", metavar="PATH")
    build.add_argument("--config")
    build.set_defaults(func=cmd_build)

    rules = sub.add_parser("rules", help="print one rule per leaf")
    rules.add_argument("input")
    rules.add_argument("--config")
    rules.set_defaults(func=cmd_rules)

    hide_p = sub.add_parser("hide", help="hide rules and write the sanitized CSV")
    hide_p.add_argument("input")
    hide_p.add_argument("--request", action="append", default=[], metavar="RULE",
                        help="rule to hide, e.g. 'a1=1,a2=1 => p'; repeatable")
    hide_p.add_argument("--request-node", action="append", default=[], metavar="NODE_ID",
                        help="address a leaf by node id instead of its rule chain")
    hide_p.add_argument("--relax", action="append", default=[], metavar="NODE:BUDGET",
                        help="ratio shift budget, e.g. root:1; repeatable")
    hide_p.add_argument("--strategy", choices=[s.value for s in CompletionStrategy],
                        default=CompletionStrategy.TWO_LEVEL_HOLDBACK.value)
    hide_p.add_argument("--output", "-o", metavar="PATH")
    hide_p.add_argument("--provenance", action="store_true",
                        help="append the provenance column to the output CSV")
    hide_p.add_argument("--emit-plan", metavar="PATH")
    hide_p.add_argument("--emit-tree", metavar="PATH", help="write the re-induced tree JSON")
    hide_p.add_argument("--emit-report", metavar="PATH")
    hide_p.add_argument("--config")
    hide_p.set_defaults(func=cmd_hide)

    solve = sub.add_parser("solve-eq", help="solve a*x - b*y = c over naturals")
    solve.add_argument("a", type=int)
    solve.add_argument("b", type=int)
    solve.add_argument("c", type=int)
    solve.add_argument("--lb-x", type=int, default=0)
    solve.add_argument("--lb-y", type=int, default=0)
    solve.set_defaults(func=cmd_solve_eq)

    evaluate = sub.add_parser("evaluate", help="hide and print the evaluation report")
    evaluate.add_argument("input")
    evaluate.add_argument("--request", action="append", default=[], metavar="RULE")
    evaluate.add_argument("--request-node", action="append", default=[], metavar="NODE_ID")
    evaluate.add_argument("--relax", action="append", default=[], metavar="NODE:BUDGET")
    evaluate.add_argument("--strategy", choices=[s.value for s in CompletionStrategy],
                          default=CompletionStrategy.TWO_LEVEL_HOLDBACK.value)
    evaluate.add_argument("--json", action="store_true")
    evaluate.add_argument("--config")
    evaluate.set_defaults(func=cmd_evaluate)

    serve = sub.add_parser("serve", help="run the HTTP session service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--data-dir", default="./sessions")
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    args = _apply_config(args)
    try:
        return args.func(args)
    except (RuleNotFoundError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RULE_NOT_FOUND
    except UnsolvableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSOLVABLE
    except (DatasetError, HidingError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
