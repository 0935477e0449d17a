"""Command-line surface.

Commands: ``stats`` (dataset statistics), ``linearize`` (write generation
targets), ``evaluate`` (score a predictions file against gold), ``scl-check``
(run the loss/gradient verification suites), ``scl-demo`` (toy contrastive
training demo).

Every flag can also be supplied through an environment variable named
``ACOSGEN_<FLAG>`` (dashes become underscores), e.g. ``ACOSGEN_DATASET``.
Exit codes: 0 success, 1 verification failure, 2 I/O or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .configs import resolve_category_map, resolve_scl_config
from .core import DatasetError, load_dataset
from .demo import export_representations, toy_demo
from .evaluate import dataset_stats, score
from .linearize import CategoryMapError, FormatStyle, linearize_example
from .parse import parse_output, read_predictions
from .scl import SclConfig
from .synth import make_synthetic_corpus
from .verify import gradient_suite, oracle_suite, save_failure

__all__ = ["main"]

ENV_PREFIX = "ACOSGEN_"


def _env(flag: str) -> str | None:
    return os.environ.get(ENV_PREFIX + flag.upper().replace("-", "_"))


def _env_default(flag: str, cast, fallback):
    raw = _env(flag)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise SystemExit(f"invalid value for {ENV_PREFIX}{flag.upper()}: {raw!r}")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acosgen", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def dataset_arg(p, required=True):
        p.add_argument(
            "--dataset",
            default=_env("dataset"),
            required=required and _env("dataset") is None,
            help="dataset TSV file",
        )

    def map_arg(p):
        p.add_argument(
            "--category-map",
            default=_env_default("category-map", str, "rest"),
            help="shipped map name (rest, laptop, laptop-l1) or a TSV path",
        )

    def style_arg(p):
        p.add_argument(
            "--style",
            choices=[s.value for s in FormatStyle],
            default=_env_default("style", str, FormatStyle.GEN_NAT.value),
        )

    def out_arg(p):
        p.add_argument("--out", default=_env("out"), help="output file (default: stdout)")

    def json_arg(p):
        p.add_argument("--json", action="store_true", help="emit JSON instead of a text table")

    def seed_arg(p):
        p.add_argument("--seed", type=int, default=_env_default("seed", int, 0))

    def scl_args(p):
        p.add_argument("--tau", type=float, default=_env_default("tau", float, None))
        p.add_argument("--alpha", type=float, default=_env_default("alpha", float, None))
        p.add_argument("--dropout", type=float, default=_env_default("dropout", float, None))
        p.add_argument(
            "--scl-config",
            default=_env("scl-config"),
            help="shipped name (rest, laptop, laptop-l1) or a key=value file",
        )

    p = sub.add_parser("stats", help="dataset statistics")
    dataset_arg(p)
    p.add_argument("--expected-categories", type=int, default=None)
    json_arg(p)
    out_arg(p)

    p = sub.add_parser("linearize", help="write one generation target per example")
    dataset_arg(p)
    map_arg(p)
    style_arg(p)
    out_arg(p)

    p = sub.add_parser("evaluate", help="score a predictions file against gold")
    dataset_arg(p)
    p.add_argument(
        "--predictions",
        default=_env("predictions"),
        required=_env("predictions") is None,
        help="one generated output string per line, aligned with the dataset",
    )
    map_arg(p)
    style_arg(p)
    json_arg(p)
    out_arg(p)

    p = sub.add_parser("scl-check", help="run loss-oracle and gradient verification suites")
    seed_arg(p)
    p.add_argument("--tau", type=float, default=_env_default("tau", float, 0.25))
    p.add_argument("--oracle-batches", type=int, default=1000)
    p.add_argument("--grad-batches", type=int, default=100)
    p.add_argument(
        "--failure-out",
        default=_env_default("failure-out", str, "scl-check-failure.json"),
        help="where to serialize the first offending batch on failure",
    )

    p = sub.add_parser("scl-demo", help="toy contrastive training demo")
    dataset_arg(p, required=False)
    p.add_argument("--synthetic", type=int, default=_env_default("synthetic", int, 200))
    p.add_argument("--steps", type=int, default=_env_default("steps", int, 150))
    seed_arg(p)
    scl_args(p)
    json_arg(p)
    out_arg(p)
    p.add_argument("--reps-out", default=_env("reps-out"), help="export representations TSV")

    return parser


def _assemble_scl_config(args) -> SclConfig:
    cfg = SclConfig()
    if getattr(args, "scl_config", None):
        cfg = resolve_scl_config(args.scl_config, base=cfg)
    overrides = {}
    if getattr(args, "tau", None) is not None:
        overrides["tau"] = args.tau
    if getattr(args, "alpha", None) is not None:
        overrides["alpha"] = (args.alpha,) * 3
    if getattr(args, "dropout", None) is not None:
        overrides["dropout_p"] = args.dropout
    if getattr(args, "seed", None) is not None:
        overrides["rng_seed"] = args.seed
    if overrides:
        cfg = SclConfig(
            tau=overrides.get("tau", cfg.tau),
            alpha=overrides.get("alpha", cfg.alpha),
            dropout_p=overrides.get("dropout_p", cfg.dropout_p),
            rng_seed=overrides.get("rng_seed", cfg.rng_seed),
            pooling=cfg.pooling,
        )
    return cfg


def _cmd_stats(args) -> int:
    examples = load_dataset(args.dataset)
    stats = dataset_stats(examples, num_categories_expected=args.expected_categories)
    _emit(stats.to_json(indent=2) if args.json else stats.to_text(), args.out)
    return 0


def _cmd_linearize(args) -> int:
    examples = load_dataset(args.dataset)
    category_map = resolve_category_map(args.category_map)
    style = FormatStyle(args.style)
    lines = []
    for line_no, example in enumerate(examples, start=1):
        try:
            lines.append(linearize_example(example, style, category_map))
        except CategoryMapError as exc:
            raise CategoryMapError(f"line {line_no}: {exc}") from None
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_evaluate(args) -> int:
    golds = load_dataset(args.dataset)
    predictions = read_predictions(args.predictions)
    if len(predictions) != len(golds):
        raise DatasetError(
            f"predictions file has {len(predictions)} lines for {len(golds)} gold examples"
        )
    category_map = resolve_category_map(args.category_map)
    style = FormatStyle(args.style)
    outcomes = [parse_output(line, style, category_map) for line in predictions]
    report = score([o.quads for o in outcomes], golds)
    dropped = sum(o.dropped for o in outcomes)
    if args.json:
        payload = report.to_dict()
        payload["dropped_segments"] = dropped
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        _emit(report.to_text() + f"\ndropped segments: {dropped}", args.out)
    return 0


def _cmd_scl_check(args) -> int:
    oracle = oracle_suite(batches=args.oracle_batches, tau=args.tau, seed=args.seed)
    gradient = gradient_suite(batches=args.grad_batches, tau=args.tau, seed=args.seed)
    print(oracle.summary())
    print(gradient.summary())
    failed = [r for r in (oracle, gradient) if not r.passed]
    if failed:
        path = save_failure(failed[0], args.failure_out)
        print(f"first offending batch written to {path}", file=sys.stderr)
        return 1
    return 0


def _cmd_scl_demo(args) -> int:
    cfg = _assemble_scl_config(args)
    if args.dataset:
        corpus = load_dataset(args.dataset)
    else:
        corpus = make_synthetic_corpus(args.synthetic, seed=cfg.rng_seed)
    result = toy_demo(corpus, cfg, args.steps)
    _emit(result.to_json(indent=2) if args.json else result.to_text(), args.out)
    if args.reps_out:
        export_representations(result, args.reps_out)
    return 0


_COMMANDS = {
    "stats": _cmd_stats,
    "linearize": _cmd_linearize,
    "evaluate": _cmd_evaluate,
    "scl-check": _cmd_scl_check,
    "scl-demo": _cmd_scl_demo,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (DatasetError, CategoryMapError, FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
