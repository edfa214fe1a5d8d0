"""Post-mortem detectors for influential-change candidates.

Three detectors produce candidates with reason codes:

* ``controversial-issue``: commits linked to issues whose comment count
  strictly exceeds a high percentile of the project's comment counts.
* ``isolated-file`` / ``isolated-author``: commits whose (gap to previous
  edit, gap to next edit) point is a robust-covariance outlier within a
  file's or an author's edit timeline.
* ``referenced``: commits cited by hash prefix or SVN revision number in
  another commit's message.

Candidates are merged per commit hash so each appears once with the union of
its reasons.
"""

from __future__ import annotations

import bisect
import math
import re
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError, DetectWarning
from .ingest import Corpus, IssueRecord
from .seeds import derive_seed

REASONS = ("controversial-issue", "isolated-file", "isolated-author", "referenced")

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class DetectorParams:
    """Tuning knobs shared by the detectors; defaults follow the artifact spec."""

    comment_percentile: float = 99.0
    contamination: float = 0.01
    mcd_h: int | None = None
    chi2_quantile: float = 0.975
    min_points: int = 10
    seed: int = 0
    log_gaps: bool = False

    def __post_init__(self):
        if not 0 < self.comment_percentile <= 100:
            raise ValueError("comment_percentile must be in (0, 100]")
        if not 0 < self.contamination < 0.5:
            raise ValueError("contamination must be in (0, 0.5)")
        if not 0 < self.chi2_quantile < 1:
            raise ValueError("chi2_quantile must be in (0, 1)")
        if self.min_points < 4:
            raise ValueError("min_points must be at least 4")


@dataclass(frozen=True)
class GapPoint:
    """Edit-rhythm point for one commit within one entity's timeline, in days."""

    commit_hash: str
    entity: str
    gap_prev: float
    gap_next: float

    def __post_init__(self):
        for gap in (self.gap_prev, self.gap_next):
            if not math.isfinite(gap) or gap < 0:
                raise ValueError("gaps must be finite and non-negative")


@dataclass
class RobustModel:
    """Robust location/scatter estimate of a 2-d point cloud.

    ``covariance`` includes the chi-square consistency rescaling;
    ``mcd_determinant`` is the determinant of the unscaled best-subset
    covariance (the minimized objective).
    """

    location: np.ndarray
    covariance: np.ndarray
    mcd_determinant: float

    def __post_init__(self):
        self.location = np.asarray(self.location, dtype=float)
        self.covariance = np.asarray(self.covariance, dtype=float)
        if self.location.shape != (2,) or self.covariance.shape != (2, 2):
            raise ValueError("model is 2-dimensional")
        if not np.allclose(self.covariance, self.covariance.T):
            raise ValueError("covariance must be symmetric")
        if self.mcd_determinant <= 0:
            raise ValueError("determinant must be positive")


@dataclass(frozen=True)
class CandidateChange:
    """A commit flagged by at least one detector."""

    commit_hash: str
    reasons: frozenset[str]
    evidence: tuple[Mapping, ...] = ()

    def __post_init__(self):
        if not self.reasons:
            raise ValueError("candidate must carry at least one reason")
        unknown = self.reasons - set(REASONS)
        if unknown:
            raise ValueError(f"unknown reasons {sorted(unknown)}")


def _stable_ceil(x: float) -> int:
    # Guards against float dust pushing an intended-integer product past its
    # ceiling (e.g. 0.1 * 30 -> 3.0000000000000004).
    return math.ceil(x - 1e-9)


# ---------------------------------------------------------------------------
# Controversial/popular issues
# ---------------------------------------------------------------------------


def comment_threshold(issues: Sequence[IssueRecord], q: float) -> int:
    """Nearest-rank percentile of issue comment counts.

    Sorts counts ascending and returns the value at 1-based index
    ``ceil(q * n / 100)``. An issue qualifies as controversial/popular iff its
    count is strictly greater than this threshold.
    """
    if not issues:
        raise DataError("cannot compute a comment threshold over zero issues")
    if not 0 < q <= 100:
        raise ValueError("percentile must be in (0, 100]")
    counts = sorted(issue.comment_count for issue in issues)
    index = _stable_ceil(q * len(counts) / 100.0)
    return counts[index - 1]


def detect_controversial(corpus: Corpus, params: DetectorParams) -> list[CandidateChange]:
    """Flag commits linked to issues above the comment-count percentile."""
    if not corpus.issues:
        return []
    threshold = comment_threshold(corpus.issues, params.comment_percentile)
    qualifying = {
        issue.key: issue.comment_count
        for issue in corpus.issues
        if issue.comment_count > threshold
    }
    by_commit: dict[str, list[dict]] = defaultdict(list)
    for link in corpus.links:
        if link.issue_key in qualifying:
            by_commit[link.commit_hash].append(
                {
                    "reason": "controversial-issue",
                    "issue_key": link.issue_key,
                    "comment_count": qualifying[link.issue_key],
                    "threshold": threshold,
                }
            )
    return [
        CandidateChange(h, frozenset({"controversial-issue"}), tuple(by_commit[h]))
        for h in sorted(by_commit, key=corpus.index_of)
    ]


# ---------------------------------------------------------------------------
# Edit-gap outliers (elliptic envelope via MCD)
# ---------------------------------------------------------------------------


def edit_gap_points(corpus: Corpus, scope: str) -> dict[str, list[GapPoint]]:
    """Per-entity (gap to previous, gap to next) points in fractional days.

    ``scope`` is ``"file"`` (entity = touched path) or ``"author"`` (entity =
    normalized author email). The first and last commits of each timeline have
    no defined gap pair and are excluded.
    """
    if scope not in ("file", "author"):
        raise ValueError(f"scope must be 'file' or 'author', got {scope!r}")
    timelines: dict[str, list] = defaultdict(list)
    for commit in corpus.commits:
        if scope == "file":
            for path in sorted({fc.path for fc in commit.files}):
                timelines[path].append(commit)
        else:
            timelines[commit.author_email.strip().lower()].append(commit)

    points: dict[str, list[GapPoint]] = {}
    for entity, commits in timelines.items():
        entity_points = []
        for prev, cur, nxt in zip(commits, commits[1:], commits[2:]):
            entity_points.append(
                GapPoint(
                    commit_hash=cur.hash,
                    entity=entity,
                    gap_prev=(cur.timestamp - prev.timestamp) / SECONDS_PER_DAY,
                    gap_next=(nxt.timestamp - cur.timestamp) / SECONDS_PER_DAY,
                )
            )
        points[entity] = entity_points
    return points


def _as_xy(points: Sequence[GapPoint] | np.ndarray) -> np.ndarray:
    if isinstance(points, np.ndarray):
        xy = np.asarray(points, dtype=float)
    else:
        xy = np.array([(p.gap_prev, p.gap_next) for p in points], dtype=float)
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise ValueError("expected an (n, 2) point array")
    return xy


def _point_keys(points: Sequence[GapPoint] | np.ndarray) -> list:
    """Deterministic tie-break keys: commit hashes, or indices for raw arrays."""
    if isinstance(points, np.ndarray):
        return list(range(len(points)))
    return [p.commit_hash for p in points]


def _subset_cov(xy: np.ndarray, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sub = xy[idx]
    loc = sub.mean(axis=0)
    centered = sub - loc
    cov = centered.T @ centered / len(sub)
    return loc, cov


def _det2(cov: np.ndarray) -> float:
    return float(cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0])


def _regularize(cov: np.ndarray) -> np.ndarray:
    """Make a (near-)singular 2x2 covariance invertible."""
    det = _det2(cov)
    trace = float(cov[0, 0] + cov[1, 1])
    if det > 1e-12 * max(trace, 1.0) ** 2:
        return cov
    bump = 1e-9 * trace / 2.0
    if bump <= 0.0:
        bump = 1e-18
    return cov + bump * np.eye(2)


def _inv2(cov: np.ndarray) -> np.ndarray:
    det = _det2(cov)
    return (
        np.array([[cov[1, 1], -cov[0, 1]], [-cov[1, 0], cov[0, 0]]], dtype=float) / det
    )


def _sq_mahalanobis(xy: np.ndarray, loc: np.ndarray, cov: np.ndarray) -> np.ndarray:
    delta = xy - loc
    return np.einsum("ij,jk,ik->i", delta, _inv2(cov), delta)


def chi2_quantile_2dof(p: float) -> float:
    """Quantile of the chi-square distribution with 2 degrees of freedom."""
    return -2.0 * math.log(1.0 - p)


def mcd_consistency_factor(alpha: float) -> float:
    """Chi-square consistency factor for an MCD fit using an h/n = alpha subset.

    For p = 2 the factor alpha / F_chi2(4 dof)(chi2 quantile(2 dof, alpha))
    has the closed form alpha / (1 - (1 - alpha) * (1 - ln(1 - alpha))).
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    if alpha == 1.0:
        return 1.0
    rest = 1.0 - alpha
    return alpha / (1.0 - rest * (1.0 - math.log(rest)))


def _c_step(xy: np.ndarray, idx: np.ndarray, h: int) -> tuple[np.ndarray, float, np.ndarray, np.ndarray]:
    loc, cov = _subset_cov(xy, idx)
    cov = _regularize(cov)
    dist = _sq_mahalanobis(xy, loc, cov)
    new_idx = np.argsort(dist, kind="stable")[:h]
    return new_idx, _det2(cov), loc, cov


def _run_to_convergence(
    xy: np.ndarray, idx: np.ndarray, h: int, max_steps: int = 200
) -> tuple[np.ndarray, float]:
    prev_det = math.inf
    for _ in range(max_steps):
        new_idx, det, _, _ = _c_step(xy, idx, h)
        if det >= prev_det or np.array_equal(np.sort(new_idx), np.sort(idx)):
            break
        idx, prev_det = new_idx, det
    return idx, prev_det if math.isfinite(prev_det) else det


def fit_mcd(
    points: Sequence[GapPoint] | np.ndarray,
    params: DetectorParams,
    seed: int | None = None,
) -> RobustModel:
    """Minimum-covariance-determinant fit of 2-d points.

    The h-subset minimizing the covariance determinant is found exactly by
    enumeration for n <= 15 and by the seeded fast search (500 random 3-point
    starts, concentration steps, best 10 refined to convergence) otherwise.
    The reported covariance is rescaled by the chi-square consistency factor
    for h/n.
    """
    xy = _as_xy(points)
    n = len(xy)
    if n < params.min_points:
        raise ValueError(f"need at least {params.min_points} points, got {n}")
    if params.mcd_h is not None:
        lower = (n + 4) // 2  # ceil((n + p + 1) / 2) with p = 2
        if not lower <= params.mcd_h <= n:
            raise ValueError(f"mcd_h must be in [{lower}, {n}], got {params.mcd_h}")
        h = params.mcd_h
    else:
        h = (n + 3) // 2

    if h == n:
        best_idx = np.arange(n)
        loc, cov = _subset_cov(xy, best_idx)
        cov = _regularize(cov)
        best_det = _det2(cov)
    elif n <= 15:
        best_det = math.inf
        best_idx = None
        for subset in combinations(range(n), h):
            idx = np.array(subset)
            _, cov = _subset_cov(xy, idx)
            det = _det2(cov)
            if det < best_det:
                best_det = det
                best_idx = idx
    else:
        rng = np.random.Generator(
            np.random.PCG64(params.seed if seed is None else seed)
        )
        trials = []
        for _ in range(500):
            idx = rng.choice(n, size=3, replace=False)
            for _ in range(2):
                idx, det, _, _ = _c_step(xy, idx, h)
            trials.append((det, idx))
        trials.sort(key=lambda t: t[0])
        best_det = math.inf
        best_idx = None
        for det, idx in trials[:10]:
            idx, det = _run_to_convergence(xy, idx, h)
            if det < best_det:
                best_det = det
                best_idx = idx

    loc, cov = _subset_cov(xy, np.asarray(best_idx))
    cov = _regularize(cov)
    det = _det2(cov)
    factor = mcd_consistency_factor(h / n)
    return RobustModel(location=loc, covariance=factor * cov, mcd_determinant=det)


def _cap_flags(dist: np.ndarray, keys: Sequence, params: DetectorParams) -> np.ndarray:
    threshold = chi2_quantile_2dof(params.chi2_quantile)
    flags = dist > threshold
    cap = _stable_ceil(params.contamination * len(dist))
    if flags.sum() > cap:
        exceeding = sorted(
            (i for i in range(len(dist)) if flags[i]), key=lambda i: (-dist[i], keys[i])
        )
        flags = np.zeros(len(dist), dtype=bool)
        flags[exceeding[:cap]] = True
    return flags


def flag_outliers(
    points: Sequence[GapPoint] | np.ndarray,
    model: RobustModel,
    params: DetectorParams,
) -> np.ndarray:
    """Boolean flags per point: robust distance beyond the chi-square cut.

    A point is flagged iff its squared Mahalanobis distance to the model
    exceeds the chi-square quantile for 2 dof, subject to a cap of
    ceil(contamination * n) flags keeping the largest distances (ties broken
    by commit hash).
    """
    xy = _as_xy(points)
    if len(xy) == 0:
        return np.zeros(0, dtype=bool)
    dist = _sq_mahalanobis(xy, model.location, model.covariance)
    return _cap_flags(dist, _point_keys(points), params)


def robust_distances(
    points: Sequence[GapPoint] | np.ndarray, model: RobustModel
) -> np.ndarray:
    """Squared Mahalanobis distances to a fitted model."""
    return _sq_mahalanobis(_as_xy(points), model.location, model.covariance)


def detect_isolated(
    corpus: Corpus, scope: str, params: DetectorParams
) -> list[CandidateChange]:
    """Flag commits whose edit-gap point is a robust outlier in some timeline."""
    reason = "isolated-file" if scope == "file" else "isolated-author"
    by_commit: dict[str, list[dict]] = defaultdict(list)
    all_points = edit_gap_points(corpus, scope)
    for entity in sorted(all_points):
        points = all_points[entity]
        if len(points) < params.min_points:
            if points:
                warnings.warn(
                    f"{scope} {entity!r}: {len(points)} gap points < "
                    f"min_points={params.min_points}, skipped",
                    DetectWarning,
                    stacklevel=2,
                )
            continue
        xy = _as_xy(points)
        if params.log_gaps:
            xy = np.log1p(xy)
        try:
            model = fit_mcd(xy, params, seed=derive_seed(params.seed, "mcd", scope, entity))
        except ValueError as exc:
            warnings.warn(f"{scope} {entity!r}: {exc}", DetectWarning, stacklevel=2)
            continue
        dist = _sq_mahalanobis(xy, model.location, model.covariance)
        flags = _cap_flags(dist, [p.commit_hash for p in points], params)
        for point, flagged, d in zip(points, flags, dist):
            if flagged:
                by_commit[point.commit_hash].append(
                    {
                        "reason": reason,
                        "entity": entity,
                        "gap_prev_days": point.gap_prev,
                        "gap_next_days": point.gap_next,
                        "robust_distance_sq": float(d),
                    }
                )
    return [
        CandidateChange(h, frozenset({reason}), tuple(by_commit[h]))
        for h in sorted(by_commit, key=corpus.index_of)
    ]


# ---------------------------------------------------------------------------
# Referenced commits
# ---------------------------------------------------------------------------

_HEX_TOKEN_RE = re.compile(r"\b[0-9a-fA-F]{7,40}\b")
_R_NUMBER_RE = re.compile(r"\br(\d+)\b")
_REVISION_WORD_RE = re.compile(r"\brevision\s+(\d+)\b", re.IGNORECASE)


@dataclass
class ReferenceScan:
    candidates: list[CandidateChange]
    ambiguous_prefixes: int = 0


def detect_referenced(corpus: Corpus) -> ReferenceScan:
    """Flag commits that other commits cite by hash prefix or SVN revision.

    Hex tokens of length >= 7 must uniquely prefix-match a corpus hash;
    ambiguous prefixes are skipped and counted. ``r1234`` and ``revision
    1234`` tokens resolve through the corpus revision map. Self-references
    are ignored; the referred commit becomes the candidate.
    """
    sorted_hashes = sorted(c.hash for c in corpus.commits)

    def prefix_matches(token: str) -> list[str]:
        lo = bisect.bisect_left(sorted_hashes, token)
        out = []
        for i in range(lo, len(sorted_hashes)):
            if sorted_hashes[i].startswith(token):
                out.append(sorted_hashes[i])
            else:
                break
        return out

    by_commit: dict[str, list[dict]] = defaultdict(list)
    seen_pairs: set[tuple[str, str]] = set()
    ambiguous = 0

    for commit in corpus.commits:
        referred: list[tuple[str, str, str]] = []
        for match in _HEX_TOKEN_RE.finditer(commit.message):
            token = match.group(0).lower()
            hits = prefix_matches(token)
            if len(hits) == 1:
                referred.append((hits[0], "hash-prefix", token))
            elif len(hits) > 1:
                ambiguous += 1
        for pattern in (_R_NUMBER_RE, _REVISION_WORD_RE):
            for match in pattern.finditer(commit.message):
                target = corpus.revision_map.resolve(int(match.group(1)))
                if target is not None:
                    referred.append((target, "svn-revision", match.group(0)))
        for target, via, token in referred:
            if target == commit.hash:
                continue
            if (commit.hash, target) in seen_pairs:
                continue
            seen_pairs.add((commit.hash, target))
            by_commit[target].append(
                {
                    "reason": "referenced",
                    "referring_hash": commit.hash,
                    "via": via,
                    "token": token,
                }
            )

    candidates = [
        CandidateChange(h, frozenset({"referenced"}), tuple(by_commit[h]))
        for h in sorted(by_commit, key=corpus.index_of)
    ]
    return ReferenceScan(candidates=candidates, ambiguous_prefixes=ambiguous)


# ---------------------------------------------------------------------------
# Merge
# ---------------------------------------------------------------------------


def merge_candidates(
    candidate_lists: Iterable[Sequence[CandidateChange]], corpus: Corpus
) -> list[CandidateChange]:
    """Collapse detector outputs to one candidate per commit.

    Reason sets are unioned, evidence concatenated in input order, and the
    result sorted by commit timestamp (corpus order).
    """
    reasons: dict[str, set[str]] = defaultdict(set)
    evidence: dict[str, list] = defaultdict(list)
    for candidates in candidate_lists:
        for cand in candidates:
            if cand.commit_hash not in corpus:
                raise DataError(f"candidate {cand.commit_hash} not in corpus")
            reasons[cand.commit_hash] |= cand.reasons
            evidence[cand.commit_hash].extend(cand.evidence)
    return [
        CandidateChange(h, frozenset(reasons[h]), tuple(evidence[h]))
        for h in sorted(reasons, key=corpus.index_of)
    ]


@dataclass
class DetectionReport:
    candidates: list[CandidateChange]
    summary: dict
    params: DetectorParams


def detect_all(corpus: Corpus, params: DetectorParams) -> DetectionReport:
    """Run every detector and merge the results."""
    controversial = detect_controversial(corpus, params)
    isolated_file = detect_isolated(corpus, "file", params)
    isolated_author = detect_isolated(corpus, "author", params)
    ref_scan = detect_referenced(corpus)
    merged = merge_candidates(
        [controversial, isolated_file, isolated_author, ref_scan.candidates], corpus
    )
    summary = {
        "controversial_issue_flagged": len(controversial),
        "isolated_file_flagged": len(isolated_file),
        "isolated_author_flagged": len(isolated_author),
        "referenced_flagged": len(ref_scan.candidates),
        "ambiguous_hex_references": ref_scan.ambiguous_prefixes,
        "unique_candidates": len(merged),
    }
    return DetectionReport(candidates=merged, summary=summary, params=params)


def report_as_dict(report: DetectionReport) -> dict:
    """JSON-ready payload for a detection run (candidates + summary)."""
    return {
        "candidates": [
            {
                "commit_hash": cand.commit_hash,
                "reasons": sorted(cand.reasons),
                "evidence": [dict(e) for e in cand.evidence],
            }
            for cand in report.candidates
        ],
        "summary": report.summary,
        "params": {
            "comment_percentile": report.params.comment_percentile,
            "contamination": report.params.contamination,
            "mcd_h": report.params.mcd_h,
            "chi2_quantile": report.params.chi2_quantile,
            "min_points": report.params.min_points,
            "seed": report.params.seed,
            "log_gaps": report.params.log_gaps,
        },
    }
