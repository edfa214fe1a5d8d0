"""Command-line pipeline orchestration.

Subcommands: ingest | detect | graph | featurize | crossval | train | predict
| report. Every run resolves its configuration from (lowest to highest
precedence) built-in defaults, a key=value config file, ``CS_``-prefixed
environment variables, and explicit flags, then writes its artifacts plus a
``manifest.json`` under the output directory. Exit codes: 0 success, 1 usage
error, 2 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, detect, featurize, ingest, learn
from .cochange import CentralityParams, build_graph, snapshot, write_edge_csv, write_snapshot_csv
from .detect import DetectorParams
from .errors import DataError
from .learn import ForestParams, SmoteParams

ENV_PREFIX = "CS_"

SUBCOMMANDS = (
    "ingest",
    "detect",
    "graph",
    "featurize",
    "crossval",
    "train",
    "predict",
    "report",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage problems, not argparse's 2
        raise UsageError(message)


# key -> (type, default); flag and config-file names match these keys,
# environment overrides use CS_<KEY upper-cased>
KEY_SPECS: dict[str, tuple] = {
    "percentile": (float, 99.0),
    "contamination": (float, 0.01),
    "mcd_h": (int, None),
    "chi2_quantile": (float, 0.975),
    "min_points": (int, 10),
    "log_gaps": (bool, False),
    "scope": (str, "both"),
    "damping": (float, 0.85),
    "tolerance": (float, 1e-10),
    "max_iterations": (int, 1000),
    "max_files_per_commit": (int, 100),
    "k_neighbors": (int, 5),
    "target_ratio": (float, 1.0),
    "n_trees": (int, 100),
    "max_depth": (int, None),
    "min_samples_leaf": (int, 1),
    "features_per_split": (int, None),
    "min_df": (int, 2),
    "max_terms": (int, 500),
    "groups": (str, "all"),
    "algo": (str, "rf"),
    "k": (int, 10),
    "seed": (int, None),
    "project_key": (str, None),
}


def _parse_bool(value: str) -> bool:
    if value.lower() in ("1", "true", "yes", "on"):
        return True
    if value.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _coerce(key: str, raw: str):
    typ = KEY_SPECS[key][0]
    if typ is bool:
        return _parse_bool(raw)
    return typ(raw)


def read_config_file(path: Path) -> dict:
    """Flat ``key = value`` lines; ``#`` comments and blank lines ignored."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise DataError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip().lower()
        if key not in KEY_SPECS:
            raise DataError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip().strip('"')
    return values


@dataclass
class RunContext:
    out_dir: Path
    config: dict
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def add_input(self, path: str | Path) -> None:
        path = Path(path)
        if path.is_dir():
            for child in sorted(path.iterdir()):
                if child.is_file():
                    self.add_input(child)
            return
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.inputs[str(path)] = digest

    def write_json(self, name: str, payload: dict) -> Path:
        path = self.out_dir / name
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.outputs.append(name)
        return path

    def note_output(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out_dir / name


def _resolve(args: argparse.Namespace, keys: list[str]) -> dict:
    file_values: dict = {}
    if getattr(args, "config", None):
        file_values = read_config_file(Path(args.config))
    resolved = {}
    for key in keys:
        _, default = KEY_SPECS[key]
        value = default
        if key in file_values:
            value = _coerce(key, file_values[key])
        env_name = ENV_PREFIX + key.upper()
        if env_name in os.environ:
            value = _coerce(key, os.environ[env_name])
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            value = flag_value
        resolved[key] = value
    return resolved


def _require_seed(config: dict) -> int:
    if config.get("seed") is None:
        raise UsageError("a --seed is required for this subcommand")
    return config["seed"]


def _detector_params(config: dict) -> DetectorParams:
    return DetectorParams(
        comment_percentile=config["percentile"],
        contamination=config["contamination"],
        mcd_h=config["mcd_h"],
        chi2_quantile=config["chi2_quantile"],
        min_points=config["min_points"],
        seed=config["seed"] if config.get("seed") is not None else 0,
        log_gaps=config["log_gaps"],
    )


def _centrality_params(config: dict) -> CentralityParams:
    return CentralityParams(
        damping=config["damping"],
        tolerance=config["tolerance"],
        max_iterations=config["max_iterations"],
        max_files_per_commit=config["max_files_per_commit"],
    )


def _smote_params(config: dict) -> SmoteParams:
    return SmoteParams(
        k_neighbors=config["k_neighbors"], target_ratio=config["target_ratio"]
    )


def _forest_params(config: dict) -> ForestParams:
    return ForestParams(
        n_trees=config["n_trees"],
        max_depth=config["max_depth"],
        min_samples_leaf=config["min_samples_leaf"],
        features_per_split=config["features_per_split"],
    )


def _parse_groups(raw: str) -> tuple[str, ...]:
    if raw.strip().lower() == "all":
        return ("CC", "NL", "SI")
    return featurize.normalize_groups(raw.replace(",", " ").split())


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _load_corpus(args: argparse.Namespace, ctx: RunContext) -> ingest.Corpus:
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise DataError(f"corpus directory not found: {corpus_dir}")
    ctx.add_input(corpus_dir)
    return ingest.load_corpus(corpus_dir)


def _cmd_ingest(args: argparse.Namespace, ctx: RunContext) -> None:
    if bool(args.repo) == bool(args.git_log):
        raise UsageError("ingest needs exactly one of --repo or --git-log")
    if args.repo:
        commits = ingest.export_from_git(args.repo)
    else:
        ctx.add_input(args.git_log)
        with open(args.git_log, "rb") as fh:
            commits = ingest.parse_git_log(fh)

    issues: list[ingest.IssueRecord] = []
    if args.issues:
        ctx.add_input(args.issues)
        with open(args.issues, "rb") as fh:
            issues, errors = ingest.parse_issue_archive(fh)
        for error in errors:
            print(f"warning: issue archive: {error}", file=sys.stderr)

    links: list[ingest.IssueLink] = []
    if issues and ctx.config.get("project_key"):
        links, unmatched = ingest.link_commits_to_issues(
            commits, issues, ctx.config["project_key"]
        )
        if unmatched:
            print(
                f"note: {sum(unmatched.values())} issue references "
                f"({len(unmatched)} keys) had no matching issue",
                file=sys.stderr,
            )

    corpus = ingest.Corpus(
        commits=tuple(commits),
        issues=tuple(issues),
        links=tuple(links),
        revision_map=ingest.build_svn_revision_map(commits),
    )
    unresolved: list[str] = []
    if args.labels:
        ctx.add_input(args.labels)
        with open(args.labels, "rb") as fh:
            corpus, unresolved = ingest.load_labels(fh, corpus)
        if unresolved:
            print(
                f"note: {len(unresolved)} label rows reference unknown commits",
                file=sys.stderr,
            )

    ingest.save_corpus(corpus, ctx.out_dir)
    for name in ("commits.jsonl", "issues.jsonl", "links.jsonl", "revmap.json", "labels.csv"):
        ctx.outputs.append(name)
    print(
        f"ingested {len(corpus.commits)} commits, {len(corpus.issues)} issues, "
        f"{len(corpus.links)} links, {len(corpus.revision_map.entries)} revisions"
    )


def _cmd_detect(args: argparse.Namespace, ctx: RunContext) -> None:
    _require_seed(ctx.config)
    corpus = _load_corpus(args, ctx)
    params = _detector_params(ctx.config)
    scope = ctx.config["scope"]
    if scope not in ("file", "author", "both"):
        raise UsageError("--scope must be file, author, or both")

    controversial = detect.detect_controversial(corpus, params) if corpus.issues else []
    isolated_file = detect.detect_isolated(corpus, "file", params) if scope in ("file", "both") else []
    isolated_author = (
        detect.detect_isolated(corpus, "author", params) if scope in ("author", "both") else []
    )
    ref_scan = detect.detect_referenced(corpus)
    merged = detect.merge_candidates(
        [controversial, isolated_file, isolated_author, ref_scan.candidates], corpus
    )
    report = detect.DetectionReport(
        candidates=merged,
        summary={
            "controversial_issue_flagged": len(controversial),
            "isolated_file_flagged": len(isolated_file),
            "isolated_author_flagged": len(isolated_author),
            "referenced_flagged": len(ref_scan.candidates),
            "ambiguous_hex_references": ref_scan.ambiguous_prefixes,
            "unique_candidates": len(merged),
        },
        params=params,
    )
    ctx.write_json("candidates.json", detect.report_as_dict(report))
    print(f"flagged {len(merged)} unique candidates")


def _cmd_graph(args: argparse.Namespace, ctx: RunContext) -> None:
    corpus = _load_corpus(args, ctx)
    params = _centrality_params(ctx.config)
    graph = build_graph(corpus, params)
    write_edge_csv(graph, ctx.note_output("graph.csv"))
    write_snapshot_csv(snapshot(graph, params), ctx.note_output("snapshot.csv"))
    print(f"graph over {len(graph.nodes)} files, {len(graph.edges())} edges")


def _cmd_featurize(args: argparse.Namespace, ctx: RunContext) -> None:
    corpus = _load_corpus(args, ctx)
    groups = _parse_groups(ctx.config["groups"])
    examples = featurize.examples_from_corpus(
        corpus, _centrality_params(ctx.config), with_cc="CC" in groups
    )
    schema, vectors = featurize.assemble_examples(examples, groups)
    featurize.write_features_csv(schema, vectors, ctx.note_output("features.csv"))
    print(f"wrote {len(vectors)} feature rows ({len(schema)} features)")


def _cmd_crossval(args: argparse.Namespace, ctx: RunContext) -> None:
    seed = _require_seed(ctx.config)
    corpus = _load_corpus(args, ctx)
    if not corpus.labels:
        raise DataError("crossval needs a labeled corpus")
    raw_groups = ctx.config["groups"].strip().lower()
    combos = None if raw_groups == "all" else [_parse_groups(ctx.config["groups"])]
    needs_cc = combos is None or any("CC" in combo for combo in combos)
    examples = featurize.examples_from_corpus(
        corpus, _centrality_params(ctx.config), with_cc=needs_cc, labeled_only=True
    )
    payload = learn.crossval_all_groups(
        examples,
        ctx.config["algo"],
        k=ctx.config["k"],
        seed=seed,
        combos=combos,
        smote_params=_smote_params(ctx.config),
        forest_params=_forest_params(ctx.config),
        min_df=ctx.config["min_df"],
        max_terms=ctx.config["max_terms"],
    )
    ctx.write_json("eval.json", payload)
    for row in payload["rows"]:
        metrics = row["metrics"]["influential"]
        print(
            f"{'+'.join(row['feature_groups']):<10} "
            f"P={metrics['precision']:.3f} R={metrics['recall']:.3f} "
            f"F={metrics['f_measure']:.3f}"
        )


def _cmd_train(args: argparse.Namespace, ctx: RunContext) -> None:
    seed = _require_seed(ctx.config)
    corpus = _load_corpus(args, ctx)
    if not corpus.labels:
        raise DataError("train needs a labeled corpus")
    groups = _parse_groups(ctx.config["groups"])
    examples = featurize.examples_from_corpus(
        corpus, _centrality_params(ctx.config), with_cc="CC" in groups, labeled_only=True
    )
    trained = learn.train_pipeline(
        examples,
        ctx.config["algo"],
        groups,
        seed=seed,
        smote_params=_smote_params(ctx.config),
        forest_params=_forest_params(ctx.config),
        min_df=ctx.config["min_df"],
        max_terms=ctx.config["max_terms"],
    )
    learn.save_model(trained, ctx.note_output("model.json"))
    print(
        f"trained {trained.algorithm} on {sum(1 for e in examples if e.label is not None)} "
        f"rows, {len(trained.schema)} features"
    )


def _cmd_predict(args: argparse.Namespace, ctx: RunContext) -> None:
    corpus = _load_corpus(args, ctx)
    ctx.add_input(args.model)
    trained = learn.load_model(args.model)
    if args.commit not in corpus:
        raise DataError(f"unknown commit {args.commit}")
    example = featurize.example_for_commit(
        corpus,
        args.commit,
        _centrality_params(ctx.config),
        with_cc="CC" in trained.feature_groups,
    )
    label, score = learn.predict_example(trained, example)
    payload = {
        "commit_hash": args.commit,
        "label": label,
        "influential": bool(label),
        "positive_score": score,
        "algorithm": trained.algorithm,
        "feature_groups": list(trained.feature_groups),
    }
    ctx.write_json("prediction.json", payload)
    print(json.dumps(payload, sort_keys=True))


def _cmd_report(args: argparse.Namespace, ctx: RunContext) -> None:
    payloads = []
    names = []
    for eval_path in args.eval:
        ctx.add_input(eval_path)
        with open(eval_path, encoding="utf-8") as fh:
            payloads.append(json.load(fh))
        names.append(Path(eval_path).stem if len(args.eval) > 1 else "project")
    if args.names:
        names = args.names
        if len(names) != len(payloads):
            raise UsageError("--names must match the number of --eval files")
    text = learn.render_report(payloads, names)
    path = ctx.note_output("report.txt")
    path.write_text(text, encoding="utf-8")
    print(text)


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser, keys: list[str]) -> None:
    sub.add_argument("--config", help="key=value config file")
    sub.add_argument("--out", required=True, help="output directory")
    for key in keys:
        typ, default = KEY_SPECS[key]
        flag = "--" + key.replace("_", "-")
        if typ is bool:
            sub.add_argument(flag, action="store_const", const=True, default=None)
        else:
            sub.add_argument(flag, type=typ, default=None, metavar=key.upper())


DETECT_KEYS = [
    "percentile", "contamination", "mcd_h", "chi2_quantile", "min_points",
    "log_gaps", "scope", "seed",
]
CENTRALITY_KEYS = ["damping", "tolerance", "max_iterations", "max_files_per_commit"]
LEARN_KEYS = [
    "algo", "groups", "k", "seed", "k_neighbors", "target_ratio", "n_trees",
    "max_depth", "min_samples_leaf", "features_per_split", "min_df", "max_terms",
]


def build_parser() -> _Parser:
    parser = _Parser(prog="commitscope", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="subcommand")

    p = subparsers.add_parser("ingest", parents=[], help="build a corpus directory")
    p.add_argument("--repo", help="git repository to export from")
    p.add_argument("--git-log", help="pre-exported canonical commit log")
    p.add_argument("--issues", help="line-delimited JSON issue archive")
    p.add_argument("--labels", help="hash,label CSV")
    _add_common(p, ["project_key"])

    p = subparsers.add_parser("detect", help="run the candidate detectors")
    p.add_argument("--corpus", required=True)
    _add_common(p, DETECT_KEYS)

    p = subparsers.add_parser("graph", help="export the co-change graph")
    p.add_argument("--corpus", required=True)
    _add_common(p, CENTRALITY_KEYS)

    p = subparsers.add_parser("featurize", help="write the feature matrix")
    p.add_argument("--corpus", required=True)
    _add_common(p, ["groups", "min_df", "max_terms"] + CENTRALITY_KEYS)

    p = subparsers.add_parser("crossval", help="cross-validate classifiers")
    p.add_argument("--corpus", required=True)
    _add_common(p, LEARN_KEYS + CENTRALITY_KEYS)

    p = subparsers.add_parser("train", help="train a classifier")
    p.add_argument("--corpus", required=True)
    _add_common(p, LEARN_KEYS + CENTRALITY_KEYS)

    p = subparsers.add_parser("predict", help="score one commit")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--commit", required=True)
    _add_common(p, CENTRALITY_KEYS)

    p = subparsers.add_parser("report", help="render evaluation tables")
    p.add_argument("--eval", nargs="+", required=True)
    p.add_argument("--names", nargs="*")
    _add_common(p, [])

    return parser


HANDLERS = {
    "ingest": (_cmd_ingest, ["project_key"]),
    "detect": (_cmd_detect, DETECT_KEYS),
    "graph": (_cmd_graph, CENTRALITY_KEYS),
    "featurize": (_cmd_featurize, ["groups", "min_df", "max_terms"] + CENTRALITY_KEYS),
    "crossval": (_cmd_crossval, LEARN_KEYS + CENTRALITY_KEYS),
    "train": (_cmd_train, LEARN_KEYS + CENTRALITY_KEYS),
    "predict": (_cmd_predict, CENTRALITY_KEYS),
    "report": (_cmd_report, []),
}


def _write_manifest(ctx: RunContext, subcommand: str, started: float, status: str, error: str | None) -> None:
    manifest = {
        "tool_version": __version__,
        "subcommand": subcommand,
        "config": {k: ctx.config[k] for k in sorted(ctx.config)},
        "inputs": ctx.inputs,
        "outputs": sorted(set(ctx.outputs)),
        "started_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(started)),
        "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "status": status,
    }
    if error is not None:
        manifest["error"] = error
    tmp = ctx.out_dir / "manifest.json.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, ctx.out_dir / "manifest.json")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.subcommand:
            raise UsageError("a subcommand is required")
        handler, keys = HANDLERS[args.subcommand]
        config = _resolve(args, keys)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx = RunContext(out_dir=out_dir, config=config)
    started = time.time()
    status, error = "ok", None
    try:
        handler(args, ctx)
        return 0
    except UsageError as exc:
        status, error = "usage-error", str(exc)
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ValueError, OSError) as exc:
        status, error = "error", str(exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        _write_manifest(ctx, args.subcommand, started, status, error)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
