"""End-to-end pipelines composed from the library stages.

Everything here is deterministic given (inputs, seed): reports embed the
seed, a digest of the effective configuration, and the toolkit version,
and repeated runs produce byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .blockmodel import assign_polarity, blockmodel
from .errors import ConfigError, ParseError
from .evaluate import EvalReport, cross_validate
from .features import PairSample, featurize, sample_pairs
from .forest import ForestParams
from .graph import CommGraph, load_graph, save_graph, summary
from .labeling import EdgeLabel, label_graph, label_histogram, load_labels, save_labels
from .lexicon import Lexicon, export_lexicon, load_lexicon, save_lexicon
from .ratings import load_ratings, spearman_matrix
from .synth import SynthParams, SynthTruth, synth_graph

logger = logging.getLogger(__name__)


def atomic_write_text(path: Path, text: str) -> None:
    """Write via a temp file and rename, so failures never leave partial files."""
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def config_digest(payload: dict) -> str:
    """Stable digest of a configuration mapping."""
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


@dataclass
class ExperimentConfig:
    """Validated configuration of a full link-prediction experiment."""

    seed: int
    n_pos: int
    n_neg: int
    lexicon_path: Path
    k: int = 10
    graph_path: Path | None = None
    synth: dict | None = None
    forest: ForestParams = field(default_factory=ForestParams)
    count_types: bool = False
    normalized_dims: bool = False
    witness_side: str = "source"

    def __post_init__(self) -> None:
        if self.seed is None:
            raise ConfigError("seed is required; wall-clock defaults are not allowed")
        if self.n_pos < 1 or self.n_neg < 1:
            raise ConfigError("n_pos and n_neg must be positive")
        if self.k < 2:
            raise ConfigError("fold count k must be at least 2")
        if (self.graph_path is None) == (self.synth is None):
            raise ConfigError("configure exactly one of graph.path or graph.synth")
        if self.witness_side not in ("source", "target"):
            raise ConfigError("witness_side must be 'source' or 'target'")

    @classmethod
    def from_dict(cls, raw: dict, seed_override: int | None = None) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("experiment config must be a JSON object")
        graph = raw.get("graph") or {}
        forest_raw = raw.get("forest") or {}
        unknown = set(forest_raw) - {"n_trees", "max_depth", "min_leaf", "features_per_split"}
        if unknown:
            raise ConfigError(f"unknown forest option(s): {sorted(unknown)}")
        seed = seed_override if seed_override is not None else raw.get("seed")
        if seed is None:
            raise ConfigError("seed is required (config 'seed' or --seed)")
        lexicon = raw.get("lexicon")
        if not lexicon:
            raise ConfigError("config must name a 'lexicon' file")
        try:
            return cls(
                seed=int(seed),
                n_pos=int(raw.get("n_pos", 0)),
                n_neg=int(raw.get("n_neg", 0)),
                k=int(raw.get("k", 10)),
                lexicon_path=Path(lexicon),
                graph_path=Path(graph["path"]) if "path" in graph else None,
                synth=graph.get("synth"),
                forest=ForestParams(**forest_raw),
                count_types=bool(raw.get("count_types", False)),
                normalized_dims=bool(raw.get("normalized_dims", False)),
                witness_side=raw.get("witness_side", "source"),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad experiment config: {exc}") from exc

    def digest(self) -> str:
        payload = {
            "seed": self.seed,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
            "k": self.k,
            "lexicon": str(self.lexicon_path),
            "graph": str(self.graph_path) if self.graph_path else None,
            "synth": self.synth,
            "forest": [self.forest.n_trees, self.forest.max_depth,
                       self.forest.min_leaf, self.forest.features_per_split],
            "count_types": self.count_types,
            "normalized_dims": self.normalized_dims,
            "witness_side": self.witness_side,
        }
        return config_digest(payload)


def parse_synth_params(raw: dict) -> tuple[int, float, SynthParams]:
    """Pull (n_nodes, base_density, SynthParams) out of a synth config block."""
    try:
        n_nodes = int(raw["n_nodes"])
        base_density = float(raw["base_density"])
        closure = {str(k): float(v) for k, v in raw["closure"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"synth config needs n_nodes, base_density, closure: {exc}") from exc
    weights_raw = raw.get("dimension_weights")
    params = SynthParams(
        closure=closure,
        dimension_weights={str(k): float(v) for k, v in weights_raw.items()}
        if weights_raw else None,
        untyped_fraction=float(raw.get("untyped_fraction", 0.0)),
        words_per_edge=int(raw.get("words_per_edge", 4)),
        noise_words_per_edge=int(raw.get("noise_words_per_edge", 1)),
        noise_vocab_size=int(raw.get("noise_vocab_size", 200)),
    )
    return n_nodes, base_density, params


def save_truth(truth: SynthTruth, path: Path) -> None:
    lines = [json.dumps({
        "record": "params",
        "closure": dict(truth.params.closure),
        "untyped_fraction": truth.params.untyped_fraction,
        "n_seed_edges": truth.n_seed_edges,
        "n_closed_edges": truth.n_closed_edges,
    }, sort_keys=True)]
    for (src, dst) in sorted(truth.labels):
        lines.append(json.dumps(
            {"record": "edge", "src": src, "dst": dst, "dimension": truth.labels[(src, dst)]},
            sort_keys=True,
        ))
    atomic_write_text(path, "\n".join(lines) + "\n")


def save_pairs(pairs: Sequence[PairSample], path: Path) -> None:
    lines = []
    for p in pairs:
        rec: dict = {"u": p.u, "v": p.v, "positive": p.positive}
        if p.to is not None:
            rec["to"] = p.to
        if p.dims is not None:
            rec["dims"] = p.dims
        lines.append(json.dumps(rec, sort_keys=True))
    atomic_write_text(path, "\n".join(lines) + "\n" if lines else "")


def load_pairs(path: str | Path) -> list[PairSample]:
    pairs: list[PairSample] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                pairs.append(PairSample(
                    u=rec["u"], v=rec["v"], positive=bool(rec["positive"]),
                    to=rec.get("to"), dims=rec.get("dims"),
                ))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(f"bad pair record: {exc}", line_no) from exc
    return pairs


class StageError(Exception):
    """Wraps a failure with the pipeline stage it happened in."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path) -> EvalReport:
    """Execute load/synth -> label -> sample -> featurize -> cross-validate.

    Writes each stage artifact as soon as it is complete (atomically, so a
    failure never leaves partial files): graph + planted truth for synth
    runs, labeled edges, featurized pair samples, and the report in both
    text and line-delimited form.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    digest = cfg.digest()

    def stage(name: str):
        class _Ctx:
            def __enter__(self):
                logger.info("stage %s", name)

            def __exit__(self, exc_type, exc, tb):
                if exc is not None and not isinstance(exc, StageError):
                    raise StageError(name, exc) from exc
                return False

        return _Ctx()

    with stage("lexicon"):
        lex = load_lexicon(cfg.lexicon_path)
        dims = lex.bearing_dimensions()
        if not dims:
            raise ConfigError("lexicon has no matchable dimension words")

    with stage("graph"):
        truth = None
        if cfg.graph_path is not None:
            g = load_graph(cfg.graph_path)
        else:
            n_nodes, base_density, sparams = parse_synth_params(cfg.synth or {})
            g, truth = synth_graph(n_nodes, base_density, sparams, lex, seed=cfg.seed)
            save_graph(g, out / "graph.jsonl")
            save_truth(truth, out / "truth.jsonl")
        print(f"graph: {summary(g)}")

    with stage("label"):
        labels = label_graph(g, lex, count_types=cfg.count_types)
        save_labels(labels, out / "labeled_edges.jsonl")
        hist = label_histogram(labels)
        print("labels: " + " ".join(f"{k}={v}" for k, v in hist.items()))

    with stage("sample"):
        pairs = sample_pairs(g, cfg.n_pos, cfg.n_neg, seed=cfg.seed)

    with stage("featurize"):
        pairs = featurize(
            g, labels, pairs, dims,
            normalized=cfg.normalized_dims, witness_side=cfg.witness_side,
        )
        save_pairs(pairs, out / "pairs.jsonl")

    with stage("evaluate"):
        report = cross_validate(
            pairs, dims, k=cfg.k, params=cfg.forest, seed=cfg.seed,
            config_digest=digest,
        )
        atomic_write_text(out / "report.txt", report.render_text())
        atomic_write_text(out / "report.jsonl", "\n".join(
            json.dumps(rec, sort_keys=True) for rec in report.to_records()
        ) + "\n")
    print(report.render_text(), end="")
    return report


def induce_lexicon(
    ratings_path: str | Path,
    out_dir: str | Path,
    naming_path: str | Path | None = None,
) -> Lexicon | None:
    """Ratings -> correlation matrix -> cluster tree -> (optionally) lexicon.

    Always writes the serialized cluster tree and the correlation matrix
    with rows re-ordered by leaf membership (ready for heatmap plotting).
    With a naming file (lines of "leaf_id dimension_or_discard") the named
    leaves are exported as a lexicon file.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ratings = load_ratings(ratings_path)
    corr = spearman_matrix(ratings)
    tree = blockmodel(corr)
    if not tree.root.is_leaf:
        assign_polarity(tree, ratings)

    atomic_write_text(out / "cluster_tree.txt", tree.to_text())
    order = [corr.words.index(w) for w in tree.leaf_order_words()]
    m = corr.values[np.ix_(order, order)]
    header = ",".join(["word"] + [corr.words[i] for i in order])
    rows = [header]
    for row_pos, i in enumerate(order):
        rows.append(corr.words[i] + "," + ",".join(f"{v:.6f}" for v in m[row_pos]))
    atomic_write_text(out / "correlation_matrix.csv", "\n".join(rows) + "\n")

    leaves = tree.leaves()
    print(f"clusters: {len(leaves)} leaves from {len(ratings.words)} words")
    for leaf in leaves:
        words_preview = " ".join(leaf.words[:8]) + (" ..." if len(leaf.words) > 8 else "")
        print(f"  {leaf.leaf_id} [{leaf.polarity or '-'}] size={len(leaf.words)} "
              f"mean_corr={leaf.mean_corr:.3f}: {words_preview}")

    if naming_path is None:
        print("no naming file given; wrote tree and matrix only")
        return None
    naming: dict[str, str] = {}
    with open(naming_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected 'leaf_id dimension'", line_no)
            naming[parts[0]] = parts[1]
    lex = export_lexicon(tree, naming)
    save_lexicon(lex, out / "lexicon.tsv")
    print(f"lexicon: {lex!r} -> {out / 'lexicon.tsv'}")
    return lex
