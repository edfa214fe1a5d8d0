"""Synthetic corpora and datasets for experiments and verification.

The detection corpus plants one anomaly per detector inside otherwise
perfectly regular edit schedules, so the expected candidate set is known
exactly: background authors commit on strict weekly cadences, planted
anomalies sit behind gaps two orders of magnitude beyond each timeline's
median, and reference/issue decorations are confined to chosen commits.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, replace

import numpy as np

from .detect import DetectorParams, _HEX_TOKEN_RE, _R_NUMBER_RE
from .featurize import FeatureSchema
from .ingest import (
    CommitRecord,
    Corpus,
    FileChange,
    IssueRecord,
    build_svn_revision_map,
    link_commits_to_issues,
    sort_commits,
)
from .learn import REAL, Dataset
from .seeds import derive_seed

BASE_EPOCH = 1_200_000_000  # 2008-01-10, arbitrary but fixed
END_DAY = 248

_SVN_UUID = "ab12cd34-5678-90ef-abcd-ef1234567890"


def _day(days: float) -> int:
    return BASE_EPOCH + int(days * 86400)


def _fixture_hash(n: int) -> str:
    return hashlib.sha1(f"commitscope-fixture-{n}".encode()).hexdigest()


@dataclass
class PlantedCorpus:
    """A generated corpus plus the exact candidate set it should yield."""

    corpus: Corpus
    expected: dict[str, frozenset[str]]  # reason -> commit hashes
    detector_params: DetectorParams


def make_detection_corpus(seed: int = 7) -> PlantedCorpus:
    """Corpus of ~280 commits / 50 issues with one planted anomaly per detector.

    Planted facts:

    * issue PROJ-42 has 10x the median comment count; two commits mention it
    * ``build.gradle`` is edited daily in two windows around a single commit
      isolated by ~110-day gaps on both sides (file scope; median gap 1 day)
    * author bob has a 4-day cadence broken by one commit with 450-day gaps
    * one commit is cited by hex hash prefix, another by SVN revision r1234

    The returned detector params use the 95th comment percentile: with 50
    issues the nearest-rank 99th percentile is the maximum itself, which no
    count strictly exceeds.
    """
    commits: list[CommitRecord] = []
    build_days = set(range(0, 15)) | set(range(234, 249))
    anomaly_day = 124.5

    trailer_days = {3: 1001, 10: 1002, 17: 1003, 24: 1234, 31: 1004, 38: 1005,
                    45: 1006, 52: 1007, 59: 1008, 66: 1009}

    # hashes are assigned by deterministic walk order, precomputed so messages
    # can cite commits created later in the loop
    schedule = [(j, day) for j in range(7) for day in range(j, END_DAY + 1, 7)]
    dev_hash = {key: _fixture_hash(i) for i, key in enumerate(schedule)}
    n_counter = len(schedule)

    referenced_targets = {"hex": dev_hash[(2, 16)], "rev": dev_hash[(3, 24)]}
    referrer_messages = {
        (1, 50): (
            "Reuse the quoting tokenizer introduced in "
            f"{referenced_targets['hex'][:8]} to unify line splitting"
        ),
        (4, 60): "Align quote handling with the tokenizer from r1234 in the old repo",
    }

    planted_controversial: list[str] = []
    for j in range(7):
        for k, day in enumerate(range(j, END_DAY + 1, 7)):
            commit_hash = dev_hash[(j, day)]
            files = [
                FileChange(f"src/module_{j}.java", 5 + (day * 7 + j) % 40, (day * 3) % 20)
            ]
            if day in build_days:
                files.append(FileChange("build.gradle", 2, 1))
            message = f"Rework parser tables in module {j}, pass {k}"
            if (j, day) in referrer_messages:
                message = referrer_messages[(j, day)]
            elif day == 7 and j == 0:
                message = "PROJ-42: stop the solver hanging on warm start"
                planted_controversial.append(commit_hash)
            elif day == 21 and j == 0:
                message = "Follow-up for PROJ-42: guard the solver timer"
                planted_controversial.append(commit_hash)
            elif (j * 31 + k) % 11 == 3:
                issue_n = (j * 7 + k) % 50 + 1
                if issue_n != 42:
                    message += f" (PROJ-{issue_n})"
            if j == 3 and day in trailer_days:
                message += (
                    f"\n\ngit-svn-id: http://svn.example.org/repo/trunk"
                    f"@{trailer_days[day]} {_SVN_UUID}"
                )
            commits.append(
                CommitRecord(
                    hash=commit_hash,
                    author_name=f"Dev {j}",
                    author_email=f"dev{j}@example.org",
                    timestamp=_day(day),
                    message=message,
                    files=tuple(files),
                )
            )

    def next_hash() -> str:
        nonlocal n_counter
        h = _fixture_hash(n_counter)
        n_counter += 1
        return h

    # grace: single commit isolating build.gradle between its two windows
    grace_hash = next_hash()
    commits.append(
        CommitRecord(
            hash=grace_hash,
            author_name="Grace",
            author_email="grace@example.org",
            timestamp=_day(anomaly_day),
            message="Emergency build configuration update for the broken release",
            files=(FileChange("build.gradle", 12, 4),),
        )
    )

    # bob: strict 4-day cadence with one commit isolated by 450-day gaps
    bob_hashes = []
    bob_days = list(range(0, 45, 4)) + [494] + list(range(944, 989, 4))
    for k, day in enumerate(bob_days):
        bob_hash = next_hash()
        bob_hashes.append(bob_hash)
        commits.append(
            CommitRecord(
                hash=bob_hash,
                author_name="Bob",
                author_email="bob@example.org",
                timestamp=_day(day),
                message=f"Notebook sync, entry {k}",
                files=(FileChange(f"notes/bob_{k}.md", 3, 0),),
            )
        )
    bob_anomaly = bob_hashes[len(range(0, 45, 4))]

    # issues: PROJ-42 is the controversial one (60 comments, 10x the median 6)
    background_counts = [4] * 20 + [6] * 15 + [8] * 14
    issues = []
    bg = iter(background_counts)
    for i in range(1, 51):
        count = 60 if i == 42 else next(bg)
        issues.append(
            IssueRecord(
                key=f"PROJ-{i}",
                created=_day(i),
                resolved=_day(i + 20) if i % 2 == 0 else None,
                comment_count=count,
            )
        )

    commits = sort_commits(commits)
    links, _ = link_commits_to_issues(commits, issues, "PROJ")
    revision_map = build_svn_revision_map(commits)
    corpus = Corpus(
        commits=tuple(commits),
        issues=tuple(issues),
        links=tuple(links),
        revision_map=revision_map,
    )

    expected = {
        "controversial-issue": frozenset(planted_controversial),
        "isolated-file": frozenset({grace_hash}),
        "isolated-author": frozenset({bob_anomaly}),
        "referenced": frozenset(referenced_targets.values()),
    }
    _check_planted(corpus, expected)
    params = DetectorParams(comment_percentile=95.0, seed=seed)
    return PlantedCorpus(corpus=corpus, expected=expected, detector_params=params)


def _check_planted(corpus: Corpus, expected: dict[str, frozenset[str]]) -> None:
    """Guard the fixture against accidental reference or link collisions."""
    hashes = sorted(c.hash for c in corpus.commits)
    prefixes = {h[:8] for h in hashes}
    if len(prefixes) != len(hashes):
        raise AssertionError("fixture hash prefixes collide")

    hex_hits = set()
    rev_hits = set()
    for commit in corpus.commits:
        for match in _HEX_TOKEN_RE.finditer(commit.message):
            token = match.group(0).lower()
            targets = [h for h in hashes if h.startswith(token)]
            if targets and targets != [commit.hash]:
                hex_hits.update(targets)
        for match in _R_NUMBER_RE.finditer(commit.message):
            target = corpus.revision_map.resolve(int(match.group(1)))
            if target is not None and target != commit.hash:
                rev_hits.add(target)
    planted_refs = expected["referenced"]
    if hex_hits | rev_hits != planted_refs:
        raise AssertionError(
            f"accidental references: {sorted((hex_hits | rev_hits) - planted_refs)}"
        )

    mentions_42 = [
        c.hash for c in corpus.commits if re.search(r"\bPROJ-42\b", c.message)
    ]
    if set(mentions_42) != set(expected["controversial-issue"]):
        raise AssertionError("PROJ-42 mentioned outside the planted commits")


def planted_labels(planted: PlantedCorpus, n_extra: int = 24, seed: int = 7) -> dict[str, int]:
    """Labels for the whole fixture: planted commits plus a seeded extra set
    are influential (1), everything else 0."""
    positives = set().union(*planted.expected.values())
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, "labels")))
    pool = [c.hash for c in planted.corpus.commits if c.hash not in positives]
    extra = rng.choice(len(pool), size=min(n_extra, len(pool)), replace=False)
    positives |= {pool[i] for i in sorted(extra)}
    return {c.hash: int(c.hash in positives) for c in planted.corpus.commits}


# ---------------------------------------------------------------------------
# Numeric datasets for the learners
# ---------------------------------------------------------------------------


def make_gaussian_dataset(
    n: int = 500,
    minority_frac: float = 0.1,
    separation: float = 6.0,
    n_features: int = 6,
    seed: int = 0,
) -> Dataset:
    """Two spherical Gaussians with the minority class (label 1) offset by
    ``separation`` standard deviations of Euclidean distance."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n_minority = max(2, round(n * minority_frac))
    n_majority = n - n_minority
    offset = separation / np.sqrt(n_features)
    X0 = rng.normal(0.0, 1.0, size=(n_majority, n_features))
    X1 = rng.normal(offset, 1.0, size=(n_minority, n_features))
    X = np.vstack([X0, X1])
    y = np.concatenate([np.zeros(n_majority, dtype=int), np.ones(n_minority, dtype=int)])
    schema = FeatureSchema(
        names=tuple(f"si_f{i}" for i in range(n_features)),
        groups=tuple("SI" for _ in range(n_features)),
    )
    return Dataset(
        schema=schema,
        X=X,
        y=y,
        hashes=tuple(f"row-{i}" for i in range(n)),
        provenance=tuple(REAL for _ in range(n)),
    )


def permute_labels(dataset: Dataset, seed: int = 0) -> Dataset:
    """The same rows with labels randomly reassigned (chance-level signal)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return Dataset(
        schema=dataset.schema,
        X=dataset.X.copy(),
        y=rng.permutation(dataset.y),
        hashes=dataset.hashes,
        provenance=dataset.provenance,
    )
