"""Parse version-control history and issue archives into canonical records.

The canonical commit log is a plain byte format that `git log --numstat` can
produce with a custom pretty format (see README); it can also be written back
with :func:`write_git_log`, so corpora round-trip without a live repository.
Issue archives are line-delimited JSON. A corpus directory bundles commits,
issues, commit-issue links, the SVN revision map, and optional labels.
"""

from __future__ import annotations

import base64
import binascii
import csv
import io
import json
import re
import subprocess
import warnings
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError, IngestWarning, ParseError

COMMIT_DELIMITER = b"\x01COMMIT\x01"

FILE_STATUSES = ("added", "modified", "deleted", "renamed", "binary")

_HASH_RE = re.compile(r"^[0-9a-f]{40}$")
_SVN_TRAILER_RE = re.compile(r"git-svn-id:\s*(\S+?)@(\d+)\s+(\S+)")
_RENAME_BRACES_RE = re.compile(r"\{([^{}]*) => ([^{}]*)\}")


@dataclass(frozen=True)
class FileChange:
    """One file touched by a commit, with numstat-style line counts."""

    path: str
    lines_added: int
    lines_removed: int
    status: str = "modified"

    def __post_init__(self):
        if not self.path:
            raise ValueError("file path must be non-empty")
        if self.status not in FILE_STATUSES:
            raise ValueError(f"unknown file status {self.status!r}")
        if self.lines_added < 0 or self.lines_removed < 0:
            raise ValueError("line counts must be non-negative")
        if self.status == "binary" and (self.lines_added or self.lines_removed):
            raise ValueError("binary file changes carry zero line counts")


@dataclass(frozen=True)
class CommitRecord:
    """One version-control change. Timestamps are author time, UTC seconds."""

    hash: str
    author_name: str
    author_email: str
    timestamp: int
    message: str
    files: tuple[FileChange, ...] = ()
    svn_revision: int | None = None

    def __post_init__(self):
        if not _HASH_RE.match(self.hash):
            raise ValueError(f"not a 40-char lowercase hex hash: {self.hash!r}")
        if self.timestamp <= 0:
            raise ValueError("timestamp must be positive")
        if self.svn_revision is not None and self.svn_revision <= 0:
            raise ValueError("svn_revision must be a positive integer")


@dataclass(frozen=True)
class IssueRecord:
    """One tracker issue; comment bodies are optional pass-through."""

    key: str
    created: int
    resolved: int | None = None
    comment_count: int = 0
    comment_bodies: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.key:
            raise ValueError("issue key must be non-empty")
        if self.resolved is not None and self.resolved < self.created:
            raise ValueError(f"{self.key}: resolved before created")
        if self.comment_count < 0:
            raise ValueError(f"{self.key}: negative comment count")
        if self.comment_bodies is not None and len(self.comment_bodies) != self.comment_count:
            raise ValueError(f"{self.key}: comment_count != number of bodies")


LINK_SOURCES = ("message-key", "explicit-import")


@dataclass(frozen=True)
class IssueLink:
    commit_hash: str
    issue_key: str
    source: str = "message-key"

    def __post_init__(self):
        if self.source not in LINK_SOURCES:
            raise ValueError(f"unknown link source {self.source!r}")


@dataclass(frozen=True)
class RevisionMap:
    """Injective mapping from SVN revision number to commit hash."""

    entries: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        seen: dict[str, int] = {}
        for rev, commit_hash in self.entries.items():
            if commit_hash in seen:
                raise ValueError(
                    f"revisions {seen[commit_hash]} and {rev} both map to {commit_hash}"
                )
            seen[commit_hash] = rev

    def resolve(self, revision: int) -> str | None:
        return self.entries.get(revision)


@dataclass
class Corpus:
    """A project's mined history: commits (time-ordered), issues, links, labels."""

    commits: tuple[CommitRecord, ...]
    issues: tuple[IssueRecord, ...] = ()
    links: tuple[IssueLink, ...] = ()
    revision_map: RevisionMap = field(default_factory=RevisionMap)
    labels: dict[str, int] | None = None

    def __post_init__(self):
        self.commits = tuple(self.commits)
        self.issues = tuple(self.issues)
        self.links = tuple(self.links)
        order = [(c.timestamp, c.hash) for c in self.commits]
        if order != sorted(order):
            raise ValueError("commits must be sorted by (timestamp, hash)")
        self._by_hash = {c.hash: i for i, c in enumerate(self.commits)}
        if len(self._by_hash) != len(self.commits):
            raise ValueError("duplicate commit hash in corpus")
        if self.labels:
            missing = [h for h in self.labels if h not in self._by_hash]
            if missing:
                raise ValueError(f"labels reference unknown commits: {missing[:5]}")

    def commit(self, commit_hash: str) -> CommitRecord:
        return self.commits[self._by_hash[commit_hash]]

    def index_of(self, commit_hash: str) -> int:
        return self._by_hash[commit_hash]

    def __contains__(self, commit_hash: str) -> bool:
        return commit_hash in self._by_hash


def sort_commits(commits: Iterable[CommitRecord]) -> list[CommitRecord]:
    """Ascending author time; ties broken by lexicographic hash."""
    return sorted(commits, key=lambda c: (c.timestamp, c.hash))


# ---------------------------------------------------------------------------
# Canonical commit log format
# ---------------------------------------------------------------------------


def _decode_replacing(raw: bytes, what: str, offset: int) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        warnings.warn(
            f"non-UTF-8 bytes in {what} at byte offset {offset}; replaced",
            IngestWarning,
            stacklevel=3,
        )
        return raw.decode("utf-8", errors="replace")


def _parse_numstat_path(raw_path: str) -> tuple[str, bool]:
    """Resolve rename syntax to the new path. Returns (path, was_rename)."""
    if "{" in raw_path and "=>" in raw_path:
        resolved = _RENAME_BRACES_RE.sub(lambda m: m.group(2), raw_path)
        resolved = re.sub(r"//+", "/", resolved)
        return resolved.strip(), True
    if " => " in raw_path:
        return raw_path.rsplit(" => ", 1)[1].strip(), True
    return raw_path, False


def parse_git_log(stream: bytes | io.BufferedIOBase) -> list[CommitRecord]:
    """Parse the canonical commit log format into time-sorted records.

    Entries start with a ``\\x01COMMIT\\x01`` delimiter line, followed by five
    header lines (hash, author name, author email, unix timestamp, base64
    message) and zero or more tab-separated numstat lines. Binary numstat
    entries (``-`` counts) map to status ``binary`` with zero counts.
    """
    data = stream if isinstance(stream, bytes) else stream.read()
    records: list[CommitRecord] = []
    lines = data.split(b"\n")
    offsets: list[int] = []
    pos = 0
    for line in lines:
        offsets.append(pos)
        pos += len(line) + 1

    i = 0
    n = len(lines)
    while i < n:
        line = lines[i]
        if line == b"":
            i += 1
            continue
        if line != COMMIT_DELIMITER:
            raise ParseError(
                f"expected commit delimiter, got {line[:40]!r}", offsets[i]
            )
        if i + 5 >= n:
            raise ParseError("truncated commit header", offsets[i])
        header = lines[i + 1 : i + 6]
        commit_hash = header[0].decode("ascii", errors="replace").strip()
        if not _HASH_RE.match(commit_hash):
            raise ParseError(f"malformed hash line {header[0]!r}", offsets[i + 1])
        author_name = _decode_replacing(header[1], "author name", offsets[i + 2])
        author_email = _decode_replacing(header[2], "author email", offsets[i + 3])
        try:
            timestamp = int(header[3])
        except ValueError:
            raise ParseError(
                f"malformed timestamp line {header[3]!r}", offsets[i + 4]
            ) from None
        try:
            message_bytes = base64.b64decode(header[4], validate=True)
        except (binascii.Error, ValueError):
            raise ParseError(
                f"malformed base64 message line {header[4][:40]!r}", offsets[i + 5]
            ) from None
        message = _decode_replacing(message_bytes, "commit message", offsets[i + 5])

        i += 6
        files: list[FileChange] = []
        while i < n and lines[i] not in (COMMIT_DELIMITER, b""):
            parts = lines[i].split(b"\t")
            if len(parts) != 3:
                raise ParseError(f"malformed numstat line {lines[i][:60]!r}", offsets[i])
            added_raw, removed_raw, path_raw = parts
            path, renamed = _parse_numstat_path(
                _decode_replacing(path_raw, "file path", offsets[i])
            )
            if added_raw == b"-" or removed_raw == b"-":
                files.append(FileChange(path, 0, 0, "binary"))
            else:
                try:
                    added, removed = int(added_raw), int(removed_raw)
                except ValueError:
                    raise ParseError(
                        f"malformed numstat counts {lines[i][:60]!r}", offsets[i]
                    ) from None
                files.append(
                    FileChange(path, added, removed, "renamed" if renamed else "modified")
                )
            i += 1

        records.append(
            CommitRecord(
                hash=commit_hash,
                author_name=author_name,
                author_email=author_email,
                timestamp=timestamp,
                message=message,
                files=tuple(files),
            )
        )

    return sort_commits(records)


def write_git_log(records: Sequence[CommitRecord]) -> bytes:
    """Serialize records into the canonical commit log format."""
    out = bytearray()
    for record in records:
        out += COMMIT_DELIMITER + b"\n"
        out += record.hash.encode("ascii") + b"\n"
        out += record.author_name.encode("utf-8") + b"\n"
        out += record.author_email.encode("utf-8") + b"\n"
        out += str(record.timestamp).encode("ascii") + b"\n"
        out += base64.b64encode(record.message.encode("utf-8")) + b"\n"
        for fc in record.files:
            path = f" => {fc.path}" if fc.status == "renamed" else fc.path
            if fc.status == "binary":
                out += b"-\t-\t" + path.encode("utf-8") + b"\n"
            else:
                out += (
                    f"{fc.lines_added}\t{fc.lines_removed}\t{path}".encode("utf-8")
                    + b"\n"
                )
    return bytes(out)


def export_from_git(repo: str | Path) -> list[CommitRecord]:
    """Invoke the ``git`` executable and return time-sorted commit records.

    Uses author timestamps (%at). Equivalent to parsing a pre-exported
    canonical log; handy when a working clone is available.
    """
    fmt = "%x01COMMIT%x01%n%H%n%an%n%ae%n%at%n%B%x02"
    proc = subprocess.run(
        ["git", "log", "--numstat", "--no-color", f"--pretty=format:{fmt}"],
        cwd=str(repo),
        capture_output=True,
        check=False,
    )
    if proc.returncode != 0:
        raise DataError(
            f"git log failed in {repo}: {proc.stderr.decode('utf-8', 'replace').strip()}"
        )
    records = []
    for chunk in proc.stdout.split(COMMIT_DELIMITER + b"\n"):
        if not chunk.strip():
            continue
        head, sep, tail = chunk.partition(b"\x02")
        if not sep:
            raise ParseError("unterminated message in git output")
        head_lines = head.split(b"\n", 4)
        if len(head_lines) != 5:
            raise ParseError(f"short commit entry in git output: {head[:60]!r}")
        commit_hash = head_lines[0].decode("ascii").strip()
        files = []
        for line in tail.split(b"\n"):
            if not line.strip():
                continue
            parts = line.split(b"\t")
            if len(parts) != 3:
                continue
            path, renamed = _parse_numstat_path(parts[2].decode("utf-8", "replace"))
            if parts[0] == b"-" or parts[1] == b"-":
                files.append(FileChange(path, 0, 0, "binary"))
            else:
                files.append(
                    FileChange(
                        path,
                        int(parts[0]),
                        int(parts[1]),
                        "renamed" if renamed else "modified",
                    )
                )
        records.append(
            CommitRecord(
                hash=commit_hash,
                author_name=head_lines[1].decode("utf-8", "replace"),
                author_email=head_lines[2].decode("utf-8", "replace"),
                timestamp=int(head_lines[3]),
                message=head_lines[4].decode("utf-8", "replace"),
                files=tuple(files),
            )
        )
    return sort_commits(records)


# ---------------------------------------------------------------------------
# Issue archives
# ---------------------------------------------------------------------------


def parse_issue_archive(
    stream: bytes | str | io.IOBase,
) -> tuple[list[IssueRecord], list[str]]:
    """Parse line-delimited JSON issue records.

    Returns records in input order plus a list of record-level error
    descriptions for lines that were skipped. A duplicate issue key is a hard
    error (:class:`DataError`).
    """
    if isinstance(stream, bytes):
        text = stream.decode("utf-8")
    elif isinstance(stream, str):
        text = stream
    else:
        raw = stream.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    issues: list[IssueRecord] = []
    errors: list[str] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(f"line {lineno}: invalid JSON ({exc.msg})")
            continue
        if not isinstance(obj, dict) or not obj.get("key"):
            errors.append(f"line {lineno}: missing issue key")
            continue
        key = str(obj["key"])
        if key in seen:
            raise DataError(f"duplicate issue key {key!r} at line {lineno}")
        seen.add(key)
        bodies = obj.get("comments")
        count = obj.get("comment_count")
        if count is None:
            if bodies is None:
                errors.append(f"line {lineno}: {key}: no comment_count and no comments")
                continue
            count = len(bodies)
        try:
            issues.append(
                IssueRecord(
                    key=key,
                    created=int(obj["created"]),
                    resolved=None if obj.get("resolved") is None else int(obj["resolved"]),
                    comment_count=int(count),
                    comment_bodies=None if bodies is None else tuple(str(b) for b in bodies),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"line {lineno}: {key}: {exc}")
    return issues, errors


_PROJECT_KEY_RE = re.compile(r"^[A-Z][A-Z0-9]+$")


def link_commits_to_issues(
    commits: Sequence[CommitRecord],
    issues: Sequence[IssueRecord],
    project_key: str,
) -> tuple[list[IssueLink], Counter]:
    """Mine ``KEY-123`` style references from commit messages.

    Emits one link per (commit, issue) pair whose key exists in the issue set;
    unmatched keys are skipped and counted in the returned summary.
    """
    if not _PROJECT_KEY_RE.match(project_key):
        raise ValueError(f"invalid project key {project_key!r}")
    pattern = re.compile(rf"\b{re.escape(project_key)}-(\d+)\b")
    known = {issue.key for issue in issues}
    links: list[IssueLink] = []
    unmatched: Counter = Counter()
    for commit in commits:
        found: set[str] = set()
        for match in pattern.finditer(commit.message):
            key = f"{project_key}-{match.group(1)}"
            if key in known:
                found.add(key)
            else:
                unmatched[key] += 1
        for key in sorted(found):
            links.append(IssueLink(commit.hash, key, "message-key"))
    return links, unmatched


def build_svn_revision_map(commits: Sequence[CommitRecord]) -> RevisionMap:
    """Collect SVN revision numbers from git-svn-id trailers and explicit fields."""
    entries: dict[int, str] = {}

    def claim(revision: int, commit_hash: str) -> None:
        existing = entries.get(revision)
        if existing is not None and existing != commit_hash:
            raise DataError(
                f"revision {revision} claimed by both {existing} and {commit_hash}"
            )
        entries[revision] = commit_hash

    for commit in commits:
        trailer_rev: int | None = None
        matches = _SVN_TRAILER_RE.findall(commit.message)
        if matches:
            trailer_rev = int(matches[-1][1])
        if (
            trailer_rev is not None
            and commit.svn_revision is not None
            and trailer_rev != commit.svn_revision
        ):
            raise DataError(
                f"{commit.hash}: trailer revision {trailer_rev} contradicts "
                f"explicit revision {commit.svn_revision}"
            )
        if commit.svn_revision is not None:
            claim(commit.svn_revision, commit.hash)
        elif trailer_rev is not None:
            claim(trailer_rev, commit.hash)
    return RevisionMap(entries)


def load_labels(
    stream: bytes | str | io.IOBase, corpus: Corpus
) -> tuple[Corpus, list[str]]:
    """Attach hash->label assignments from ``hash,label`` CSV to the corpus.

    Returns the labeled corpus and the list of hashes that did not resolve.
    """
    if isinstance(stream, bytes):
        text = stream.decode("utf-8")
    elif isinstance(stream, str):
        text = stream
    else:
        raw = stream.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty labels file (expected 'hash,label' header)") from None
    if [h.strip() for h in header] != ["hash", "label"]:
        raise DataError(f"labels header must be 'hash,label', got {header!r}")

    labels: dict[str, int] = {}
    unresolved: list[str] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DataError(f"labels line {lineno}: expected 2 fields, got {len(row)}")
        commit_hash, value = row[0].strip(), row[1].strip()
        if value not in ("0", "1"):
            raise DataError(f"labels line {lineno}: label must be 0 or 1, got {value!r}")
        if commit_hash in corpus:
            labels[commit_hash] = int(value)
        else:
            unresolved.append(commit_hash)
    return replace(corpus, labels=labels), unresolved


# ---------------------------------------------------------------------------
# Corpus persistence
# ---------------------------------------------------------------------------


def _commit_to_dict(commit: CommitRecord) -> dict:
    return {
        "hash": commit.hash,
        "author_name": commit.author_name,
        "author_email": commit.author_email,
        "timestamp": commit.timestamp,
        "message": commit.message,
        "files": [
            {
                "path": fc.path,
                "lines_added": fc.lines_added,
                "lines_removed": fc.lines_removed,
                "status": fc.status,
            }
            for fc in commit.files
        ],
        "svn_revision": commit.svn_revision,
    }


def _commit_from_dict(obj: dict) -> CommitRecord:
    return CommitRecord(
        hash=obj["hash"],
        author_name=obj["author_name"],
        author_email=obj["author_email"],
        timestamp=int(obj["timestamp"]),
        message=obj["message"],
        files=tuple(
            FileChange(f["path"], int(f["lines_added"]), int(f["lines_removed"]), f["status"])
            for f in obj.get("files", ())
        ),
        svn_revision=obj.get("svn_revision"),
    )


def save_corpus(corpus: Corpus, directory: str | Path) -> None:
    """Write commits.jsonl, issues.jsonl, links.jsonl, revmap.json, labels.csv."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    with open(directory / "commits.jsonl", "w", encoding="utf-8") as fh:
        for commit in corpus.commits:
            fh.write(json.dumps(_commit_to_dict(commit), sort_keys=True) + "\n")

    with open(directory / "issues.jsonl", "w", encoding="utf-8") as fh:
        for issue in corpus.issues:
            obj = {
                "key": issue.key,
                "created": issue.created,
                "resolved": issue.resolved,
                "comment_count": issue.comment_count,
            }
            if issue.comment_bodies is not None:
                obj["comments"] = list(issue.comment_bodies)
            fh.write(json.dumps(obj, sort_keys=True) + "\n")

    with open(directory / "links.jsonl", "w", encoding="utf-8") as fh:
        for link in corpus.links:
            fh.write(
                json.dumps(
                    {
                        "commit_hash": link.commit_hash,
                        "issue_key": link.issue_key,
                        "source": link.source,
                    },
                    sort_keys=True,
                )
                + "\n"
            )

    with open(directory / "revmap.json", "w", encoding="utf-8") as fh:
        json.dump(
            {str(rev): h for rev, h in sorted(corpus.revision_map.entries.items())},
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")

    with open(directory / "labels.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["hash", "label"])
        for commit_hash, label in sorted((corpus.labels or {}).items()):
            writer.writerow([commit_hash, label])


def load_corpus(directory: str | Path) -> Corpus:
    """Load a corpus directory written by :func:`save_corpus`."""
    directory = Path(directory)
    commits = []
    with open(directory / "commits.jsonl", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                commits.append(_commit_from_dict(json.loads(line)))

    issues: list[IssueRecord] = []
    issues_path = directory / "issues.jsonl"
    if issues_path.exists():
        parsed, errors = parse_issue_archive(issues_path.read_bytes())
        if errors:
            raise DataError(f"{issues_path}: {errors[0]}")
        issues = parsed

    links: list[IssueLink] = []
    links_path = directory / "links.jsonl"
    if links_path.exists():
        with open(links_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    obj = json.loads(line)
                    links.append(
                        IssueLink(obj["commit_hash"], obj["issue_key"], obj["source"])
                    )

    revision_map = RevisionMap()
    revmap_path = directory / "revmap.json"
    if revmap_path.exists():
        raw = json.loads(revmap_path.read_text(encoding="utf-8"))
        revision_map = RevisionMap({int(rev): h for rev, h in raw.items()})

    corpus = Corpus(
        commits=tuple(sort_commits(commits)),
        issues=tuple(issues),
        links=tuple(links),
        revision_map=revision_map,
    )

    labels_path = directory / "labels.csv"
    if labels_path.exists():
        content = labels_path.read_text(encoding="utf-8")
        if content.strip():
            corpus, _ = load_labels(content, corpus)
    return corpus
