"""Command-line front door.

Subcommands compose the library stages; every command is deterministic
given its inputs and an explicit --seed. Exit codes: 0 success, 2 invalid
configuration or arguments, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigError, ToolkitError
from .evaluate import cross_validate
from .features import featurize, sample_pairs
from .forest import ForestParams
from .graph import load_graph, save_graph, summary
from .labeling import label_graph, label_histogram, load_labels, save_labels
from .lexicon import load_lexicon
from .pipeline import (
    ExperimentConfig,
    StageError,
    atomic_write_text,
    induce_lexicon,
    load_pairs,
    parse_synth_params,
    run_experiment,
    save_pairs,
    save_truth,
)
from .ratings import load_ratings, split_consistency
from .synth import synth_graph

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_VALIDATION = 2


def _parse_closure(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"closure spec {part!r} must look like dim=prob")
        dim, _, prob = part.partition("=")
        try:
            out[dim.strip()] = float(prob)
        except ValueError:
            raise ConfigError(f"closure probability {prob!r} is not a number") from None
    if not out:
        raise ConfigError("empty closure spec")
    return out


def _forest_params(args: argparse.Namespace) -> ForestParams:
    return ForestParams(
        n_trees=args.n_trees,
        max_depth=args.max_depth,
        min_leaf=args.min_leaf,
        features_per_split=args.features_per_split,
    )


def _add_forest_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--min-leaf", type=int, default=1)
    p.add_argument("--features-per-split", type=int, default=None,
                   help="default: ceil(sqrt(n_features))")


def cmd_induce_lexicon(args: argparse.Namespace) -> int:
    induce_lexicon(args.ratings, args.out, naming_path=args.naming)
    return EXIT_OK


def cmd_label_edges(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    lex = load_lexicon(args.lexicon)
    labels = label_graph(g, lex, count_types=args.count_types)
    save_labels(labels, args.out)
    hist = label_histogram(labels)
    print(f"graph: {summary(g)}")
    print("labels: " + " ".join(f"{k}={v}" for k, v in hist.items()))
    return EXIT_OK


def cmd_sample_pairs(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    pairs = sample_pairs(g, args.n_pos, args.n_neg, seed=args.seed)
    save_pairs(pairs, Path(args.out))
    print(f"sampled {args.n_pos} positive and {args.n_neg} negative pairs -> {args.out}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    lex = load_lexicon(args.lexicon)
    dims = lex.bearing_dimensions()
    labels = load_labels(args.labels) if args.labels else label_graph(g, lex)
    pairs = load_pairs(args.pairs)
    if any(p.to is None or p.dims is None for p in pairs):
        pairs = featurize(g, labels, pairs, dims)
    report = cross_validate(pairs, dims, k=args.k, params=_forest_params(args),
                            seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / "report.txt", report.render_text())
    atomic_write_text(out / "report.jsonl", "\n".join(
        json.dumps(rec, sort_keys=True) for rec in report.to_records()
    ) + "\n")
    print(report.render_text(), end="")
    return EXIT_OK


def cmd_run_experiment(args: argparse.Namespace) -> int:
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    cfg = ExperimentConfig.from_dict(raw, seed_override=args.seed)
    run_experiment(cfg, args.out)
    return EXIT_OK


def cmd_synth_graph(args: argparse.Namespace) -> int:
    lex = load_lexicon(args.lexicon)
    _, _, params = parse_synth_params({
        "n_nodes": args.nodes,
        "base_density": args.density,
        "closure": _parse_closure(args.closure),
        "untyped_fraction": args.untyped_fraction,
        "words_per_edge": args.words_per_edge,
        "noise_words_per_edge": args.noise_words,
        "noise_vocab_size": args.noise_vocab,
    })
    g, truth = synth_graph(args.nodes, args.density, params, lex, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_graph(g, out / "graph.jsonl")
    save_truth(truth, out / "truth.jsonl")
    print(f"graph: {summary(g)} (seed edges {truth.n_seed_edges}, "
          f"closed {truth.n_closed_edges})")
    return EXIT_OK


def cmd_split_consistency(args: argparse.Namespace) -> int:
    ratings = load_ratings(args.ratings)
    group_a = set(args.group_a.split(",")) if args.group_a else None
    score = split_consistency(ratings, args.attribute, group_a=group_a)
    print(f"split_consistency({args.attribute}) = {score:.4f}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    serve(args.log, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiedims",
        description="relationship-dimension lexicons, edge labeling, and link prediction",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="info-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("induce-lexicon", help="ratings -> cluster tree -> lexicon")
    p.add_argument("--ratings", required=True)
    p.add_argument("--naming", default=None,
                   help="file of 'leaf_id dimension' lines; omit to only inspect clusters")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_induce_lexicon)

    p = sub.add_parser("label-edges", help="label every edge by lexicon matching")
    p.add_argument("--graph", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--count-types", action="store_true",
                   help="count distinct matching words instead of occurrences")
    p.set_defaults(fn=cmd_label_edges)

    p = sub.add_parser("sample-pairs", help="sample positive and 2-hop negative pairs")
    p.add_argument("--graph", required=True)
    p.add_argument("--n-pos", type=int, required=True)
    p.add_argument("--n-neg", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sample_pairs)

    p = sub.add_parser("evaluate", help="cross-validate feature sets on sampled pairs")
    p.add_argument("--graph", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--labels", default=None, help="labeled-edge file; default relabels")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_forest_flags(p)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("run-experiment", help="full pipeline from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_run_experiment)

    p = sub.add_parser("synth-graph", help="planted-dimension synthetic graph")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--closure", required=True, help="dim=prob[,dim=prob...]")
    p.add_argument("--untyped-fraction", type=float, default=0.0)
    p.add_argument("--words-per-edge", type=int, default=4)
    p.add_argument("--noise-words", type=int, default=1)
    p.add_argument("--noise-vocab", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_synth_graph)

    p = sub.add_parser("split-consistency", help="cross-group correlation agreement")
    p.add_argument("--ratings", required=True)
    p.add_argument("--attribute", required=True)
    p.add_argument("--group-a", default=None,
                   help="comma-separated attribute values of group A; default median split")
    p.set_defaults(fn=cmd_split_consistency)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--log", required=True, help="append-only label log file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION if isinstance(exc.cause, ConfigError) else EXIT_RUNTIME
    except (ToolkitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
