"""Per-commit feature extraction: structural, natural-language, co-change.

Feature groups, in canonical order:

* ``CC``: deltas of PageRank extremes and centrality sums (4 features)
* ``NL``: bag-of-words term counts over a vocabulary plus message polarity
  and subjectivity from the bundled lexicon
* ``SI``: files touched, lines added, lines removed

Vocabularies are built from training messages only; when cross-validating,
the learn module rebuilds them per fold.
"""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import cochange
from .errors import DataError
from .ingest import CommitRecord, Corpus

GROUP_ORDER = ("CC", "NL", "SI")

SI_FEATURE_NAMES = ("si_n_files", "si_lines_added", "si_lines_removed")
SENTIMENT_FEATURE_NAMES = ("nl_polarity", "nl_subjectivity")

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _load_data_text(name: str) -> str:
    return (resources.files("commitscope") / "data" / name).read_text(encoding="utf-8")


_STOPWORDS: frozenset[str] | None = None


def stopwords() -> frozenset[str]:
    """The bundled English stopword list (loaded once)."""
    global _STOPWORDS
    if _STOPWORDS is None:
        _STOPWORDS = frozenset(
            w.strip() for w in _load_data_text("stopwords.txt").splitlines() if w.strip()
        )
    return _STOPWORDS


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop short and stop tokens."""
    stops = stopwords()
    return [
        tok
        for tok in _TOKEN_RE.findall(text.lower())
        if len(tok) >= 2 and tok not in stops
    ]


@dataclass(frozen=True)
class Vocabulary:
    """Sorted unique terms with their document frequencies."""

    terms: tuple[str, ...]
    document_frequency: dict[str, int] = field(default_factory=dict)
    built_from: int = 0

    def __post_init__(self):
        if list(self.terms) != sorted(set(self.terms)):
            raise ValueError("vocabulary terms must be unique and sorted")

    def __len__(self) -> int:
        return len(self.terms)


def build_vocabulary(
    messages: Iterable[str], min_df: int = 2, max_terms: int = 500
) -> Vocabulary:
    """Vocabulary over training messages: df >= min_df, top max_terms by df.

    Ties at the df cutoff break lexicographically (smaller term wins).
    """
    messages = list(messages)
    df: Counter = Counter()
    for message in messages:
        df.update(set(tokenize(message)))
    eligible = [term for term, count in df.items() if count >= min_df]
    eligible.sort(key=lambda t: (-df[t], t))
    selected = eligible[:max_terms]
    return Vocabulary(
        terms=tuple(sorted(selected)),
        document_frequency={t: df[t] for t in sorted(selected)},
        built_from=len(messages),
    )


@dataclass(frozen=True)
class Lexicon:
    """Word -> (polarity in [-1, 1], subjectivity in [0, 1])."""

    entries: dict[str, tuple[float, float]]

    def __post_init__(self):
        for word, (polarity, subjectivity) in self.entries.items():
            if not -1.0 <= polarity <= 1.0 or not 0.0 <= subjectivity <= 1.0:
                raise ValueError(f"lexicon entry {word!r} out of range")

    def __len__(self) -> int:
        return len(self.entries)


_LEXICON: Lexicon | None = None


def load_lexicon() -> Lexicon:
    """The bundled sentiment lexicon (loaded once)."""
    global _LEXICON
    if _LEXICON is None:
        entries = {}
        for line in _load_data_text("sentiment_lexicon.tsv").splitlines():
            if not line.strip():
                continue
            word, polarity, subjectivity = line.split("\t")
            entries[word] = (float(polarity), float(subjectivity))
        _LEXICON = Lexicon(entries)
    return _LEXICON


# ---------------------------------------------------------------------------
# Per-commit feature parts
# ---------------------------------------------------------------------------


def structural_features(commit: CommitRecord) -> tuple[int, int, int]:
    """(files touched, lines added, lines removed); binary files add no lines."""
    n_files = len(commit.files)
    total_added = sum(fc.lines_added for fc in commit.files)
    total_removed = sum(fc.lines_removed for fc in commit.files)
    return n_files, total_added, total_removed


def bow_features(message: str, vocabulary: Vocabulary) -> np.ndarray:
    """Raw term counts in vocabulary order; out-of-vocabulary tokens ignored."""
    counts = Counter(tokenize(message))
    return np.array([counts.get(term, 0) for term in vocabulary.terms], dtype=float)


def sentiment_features(message: str, lexicon: Lexicon) -> tuple[float, float]:
    """Mean polarity/subjectivity over lexicon hits; (0, 0) without any hit."""
    polarities = []
    subjectivities = []
    for token in tokenize(message):
        entry = lexicon.entries.get(token)
        if entry is not None:
            polarities.append(entry[0])
            subjectivities.append(entry[1])
    if not polarities:
        return 0.0, 0.0
    return float(np.mean(polarities)), float(np.mean(subjectivities))


# ---------------------------------------------------------------------------
# Schema and assembly
# ---------------------------------------------------------------------------


def normalize_groups(groups: Iterable[str]) -> tuple[str, ...]:
    """Validate and order a feature-group selection canonically (CC, NL, SI)."""
    wanted = {g.upper() for g in groups}
    unknown = wanted - set(GROUP_ORDER)
    if unknown:
        raise ValueError(f"unknown feature groups {sorted(unknown)}")
    if not wanted:
        raise ValueError("at least one feature group must be enabled")
    return tuple(g for g in GROUP_ORDER if g in wanted)


def group_combinations() -> list[tuple[str, ...]]:
    """All non-empty group subsets: CC, NL, SI, CC+NL, CC+SI, NL+SI, ALL."""
    return [
        ("CC",),
        ("NL",),
        ("SI",),
        ("CC", "NL"),
        ("CC", "SI"),
        ("NL", "SI"),
        ("CC", "NL", "SI"),
    ]


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names with their group tags; positions are stable."""

    names: tuple[str, ...]
    groups: tuple[str, ...]

    def __post_init__(self):
        if len(self.names) != len(self.groups):
            raise ValueError("names and groups must align")
        if len(set(self.names)) != len(self.names):
            raise ValueError("feature names must be unique")

    def __len__(self) -> int:
        return len(self.names)

    @property
    def enabled_groups(self) -> tuple[str, ...]:
        return tuple(g for g in GROUP_ORDER if g in set(self.groups))

    def group_size(self, group: str) -> int:
        return sum(1 for g in self.groups if g == group)

    def indices_for(self, groups: Iterable[str]) -> np.ndarray:
        wanted = set(normalize_groups(groups))
        return np.array([i for i, g in enumerate(self.groups) if g in wanted], dtype=int)


def build_schema(
    enabled_groups: Iterable[str], vocabulary: Vocabulary | None = None
) -> FeatureSchema:
    groups = normalize_groups(enabled_groups)
    names: list[str] = []
    tags: list[str] = []
    for group in groups:
        if group == "CC":
            names.extend(cochange.FEATURE_NAMES)
            tags.extend(["CC"] * len(cochange.FEATURE_NAMES))
        elif group == "NL":
            if vocabulary is None:
                raise ValueError("NL group requires a vocabulary")
            names.extend(f"term:{t}" for t in vocabulary.terms)
            names.extend(SENTIMENT_FEATURE_NAMES)
            tags.extend(["NL"] * (len(vocabulary.terms) + 2))
        else:
            names.extend(SI_FEATURE_NAMES)
            tags.extend(["SI"] * 3)
    return FeatureSchema(names=tuple(names), groups=tuple(tags))


@dataclass(frozen=True)
class FeatureVector:
    commit_hash: str
    values: np.ndarray
    label: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.commit_hash}: non-finite feature values")
        if self.label not in (None, 0, 1):
            raise ValueError(f"label must be 0/1, got {self.label!r}")


def assemble(
    commit_hash: str,
    si: Sequence[float] | None,
    nl: Sequence[float] | None,
    cc: Sequence[float] | None,
    schema: FeatureSchema,
    enabled_groups: Iterable[str],
    label: int | None = None,
) -> FeatureVector:
    """Concatenate the enabled feature groups in schema order."""
    groups = normalize_groups(enabled_groups)
    if groups != schema.enabled_groups:
        raise DataError(
            f"schema groups {schema.enabled_groups} do not match enabled {groups}"
        )
    parts = {"CC": cc, "NL": nl, "SI": si}
    values: list[float] = []
    for group in groups:
        part = parts[group]
        if part is None:
            raise DataError(f"group {group} enabled but no values supplied")
        part = np.asarray(part, dtype=float)
        expected = schema.group_size(group)
        if len(part) != expected:
            raise DataError(
                f"group {group}: expected {expected} values, got {len(part)}"
            )
        values.extend(part.tolist())
    vector = FeatureVector(commit_hash=commit_hash, values=np.array(values), label=label)
    if len(vector.values) != len(schema):
        raise DataError("assembled vector does not match schema length")
    return vector


# ---------------------------------------------------------------------------
# Corpus-level extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CommitExample:
    """Raw per-commit material from which any group subset can be assembled."""

    commit_hash: str
    message: str
    si: np.ndarray
    cc: np.ndarray
    label: int | None = None


def examples_from_corpus(
    corpus: Corpus,
    centrality_params: cochange.CentralityParams | None = None,
    with_cc: bool = True,
    labeled_only: bool = False,
) -> list[CommitExample]:
    """Extract per-commit raw feature material (one co-change pass when needed)."""
    cc_features: dict[str, cochange.CoChangeFeatures] = {}
    if with_cc:
        cc_features = cochange.history_features(
            corpus, centrality_params or cochange.CentralityParams()
        )
    labels = corpus.labels or {}
    examples = []
    for commit in corpus.commits:
        label = labels.get(commit.hash)
        if labeled_only and label is None:
            continue
        cc = (
            cc_features[commit.hash].as_array()
            if with_cc
            else np.zeros(len(cochange.FEATURE_NAMES))
        )
        examples.append(
            CommitExample(
                commit_hash=commit.hash,
                message=commit.message,
                si=np.array(structural_features(commit), dtype=float),
                cc=cc,
                label=label,
            )
        )
    return examples


def example_for_commit(
    corpus: Corpus,
    commit_hash: str,
    centrality_params: cochange.CentralityParams | None = None,
    with_cc: bool = True,
) -> CommitExample:
    """Feature material for a single commit (graph replayed up to it)."""
    if commit_hash not in corpus:
        raise DataError(f"unknown commit {commit_hash}")
    commit = corpus.commit(commit_hash)
    index = corpus.index_of(commit_hash)
    cc = np.zeros(len(cochange.FEATURE_NAMES))
    if with_cc:
        params = centrality_params or cochange.CentralityParams()
        graph = cochange.build_graph(corpus, params, upto=index)
        snap_prev = cochange.snapshot(graph, params)
        cochange.apply_commit(graph, commit, params, index=index)
        commit_prev = corpus.commits[index - 1] if index > 0 else None
        cc = cochange.cochange_features(
            snap_prev, graph, commit, commit_prev, params
        ).as_array()
    labels = corpus.labels or {}
    return CommitExample(
        commit_hash=commit_hash,
        message=commit.message,
        si=np.array(structural_features(commit), dtype=float),
        cc=cc,
        label=labels.get(commit_hash),
    )


def nl_features(message: str, vocabulary: Vocabulary, lexicon: Lexicon) -> np.ndarray:
    bow = bow_features(message, vocabulary)
    polarity, subjectivity = sentiment_features(message, lexicon)
    return np.concatenate([bow, [polarity, subjectivity]])


def assemble_examples(
    examples: Sequence[CommitExample],
    enabled_groups: Iterable[str],
    vocabulary: Vocabulary | None = None,
) -> tuple[FeatureSchema, list[FeatureVector]]:
    """Build feature vectors for the enabled groups from raw examples.

    When NL is enabled and no vocabulary is given, one is built from all the
    example messages (appropriate when the whole set is the training portion).
    """
    groups = normalize_groups(enabled_groups)
    lexicon = load_lexicon() if "NL" in groups else None
    if "NL" in groups and vocabulary is None:
        vocabulary = build_vocabulary([e.message for e in examples])
    schema = build_schema(groups, vocabulary)
    vectors = []
    for example in examples:
        nl = (
            nl_features(example.message, vocabulary, lexicon)
            if "NL" in groups
            else None
        )
        vectors.append(
            assemble(
                example.commit_hash,
                si=example.si if "SI" in groups else None,
                nl=nl,
                cc=example.cc if "CC" in groups else None,
                schema=schema,
                enabled_groups=groups,
                label=example.label,
            )
        )
    return schema, vectors


# ---------------------------------------------------------------------------
# Feature matrix persistence
# ---------------------------------------------------------------------------


def write_features_csv(
    schema: FeatureSchema, vectors: Sequence[FeatureVector], path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["hash", "label", *schema.names])
        for vector in vectors:
            label = "" if vector.label is None else str(vector.label)
            writer.writerow(
                [vector.commit_hash, label, *[repr(v) for v in vector.values]]
            )


def _group_of_name(name: str) -> str:
    if name.startswith("cc_"):
        return "CC"
    if name.startswith("term:") or name.startswith("nl_"):
        return "NL"
    if name.startswith("si_"):
        return "SI"
    raise DataError(f"cannot infer feature group of {name!r}")


def read_features_csv(path: str | Path) -> tuple[FeatureSchema, list[FeatureVector]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["hash", "label"]:
            raise DataError(f"{path}: expected 'hash,label,...' header")
        names = tuple(header[2:])
        schema = FeatureSchema(names=names, groups=tuple(_group_of_name(n) for n in names))
        vectors = []
        for row in reader:
            if not row:
                continue
            label = None if row[1] == "" else int(row[1])
            vectors.append(
                FeatureVector(
                    commit_hash=row[0],
                    values=np.array([float(v) for v in row[2:]]),
                    label=label,
                )
            )
    return schema, vectors
