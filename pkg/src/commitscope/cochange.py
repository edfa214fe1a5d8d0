"""Evolving co-change graph and centrality-delta features.

The graph is undirected over file paths; an edge's weight counts the commits
that touched both endpoint files. PageRank runs on the weighted graph;
betweenness and closeness run on the unweighted skeleton. Per-commit features
are deltas of PageRank extremes and of centrality sums over the files touched
by the current versus the previous commit, each evaluated on its own era's
graph.
"""

from __future__ import annotations

import csv
import warnings
from collections import defaultdict, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConvergenceWarning, DataError
from .ingest import CommitRecord, Corpus


@dataclass(frozen=True)
class CentralityParams:
    damping: float = 0.85
    tolerance: float = 1e-10
    max_iterations: int = 1000
    max_files_per_commit: int = 100

    def __post_init__(self):
        if not 0 < self.damping < 1:
            raise ValueError("damping must be in (0, 1)")
        if self.tolerance <= 0 or self.max_iterations < 1 or self.max_files_per_commit < 1:
            raise ValueError("invalid centrality parameters")


class CoChangeGraph:
    """Weighted undirected file graph accumulated over commit history."""

    def __init__(self):
        self.nodes: set[str] = set()
        self.adjacency: dict[str, dict[str, int]] = defaultdict(dict)
        self.as_of: int = -1

    def weight(self, a: str, b: str) -> int:
        return self.adjacency.get(a, {}).get(b, 0)

    def edges(self) -> dict[tuple[str, str], int]:
        """Unordered file pairs to co-change weight."""
        out: dict[tuple[str, str], int] = {}
        for a, neighbors in self.adjacency.items():
            for b, w in neighbors.items():
                if a < b:
                    out[(a, b)] = w
        return out

    def copy(self) -> "CoChangeGraph":
        clone = CoChangeGraph()
        clone.nodes = set(self.nodes)
        clone.adjacency = defaultdict(dict, {a: dict(nb) for a, nb in self.adjacency.items()})
        clone.as_of = self.as_of
        return clone


def commit_graph_files(commit: CommitRecord) -> list[str]:
    """Distinct non-binary file paths of a commit, sorted."""
    return sorted({fc.path for fc in commit.files if fc.status != "binary"})


def apply_commit(
    graph: CoChangeGraph,
    commit: CommitRecord,
    params: CentralityParams,
    index: int | None = None,
) -> CoChangeGraph:
    """Fold one commit into the graph (mutates and returns it).

    Every unordered pair of distinct non-binary files in the commit gains one
    unit of edge weight. Commits touching more than ``max_files_per_commit``
    files contribute nodes but no edges (giant commits would otherwise inject
    quadratic cliques).
    """
    if index is not None and index != graph.as_of + 1:
        raise DataError(
            f"commit applied out of order: expected index {graph.as_of + 1}, got {index}"
        )
    paths = commit_graph_files(commit)
    graph.nodes.update(paths)
    if len(paths) <= params.max_files_per_commit:
        for i, a in enumerate(paths):
            for b in paths[i + 1 :]:
                graph.adjacency[a][b] = graph.adjacency[a].get(b, 0) + 1
                graph.adjacency[b][a] = graph.adjacency[b].get(a, 0) + 1
    graph.as_of += 1
    return graph


def build_graph(
    corpus: Corpus, params: CentralityParams, upto: int | None = None
) -> CoChangeGraph:
    """Graph over the first ``upto`` commits (all commits when omitted)."""
    graph = CoChangeGraph()
    commits = corpus.commits if upto is None else corpus.commits[:upto]
    for i, commit in enumerate(commits):
        apply_commit(graph, commit, params, index=i)
    return graph


# ---------------------------------------------------------------------------
# Centrality measures
# ---------------------------------------------------------------------------


def pagerank(graph: CoChangeGraph, params: CentralityParams) -> dict[str, float]:
    """Weighted PageRank by power iteration.

    PR(v) = (1-d)/N + d * sum over neighbors u of PR(u) * w(u,v) / W(u), with
    W(u) the total incident weight of u. Nodes without edges spread their full
    rank uniformly. Iterates until the L1 change drops below the tolerance; on
    hitting the iteration cap the current vector is returned with a
    ConvergenceWarning.
    """
    nodes = sorted(graph.nodes)
    n = len(nodes)
    if n == 0:
        raise ValueError("pagerank of an empty graph is undefined")
    index = {node: i for i, node in enumerate(nodes)}

    src: list[int] = []
    dst: list[int] = []
    w_norm: list[float] = []
    totals = np.zeros(n)
    for node in nodes:
        totals[index[node]] = sum(graph.adjacency.get(node, {}).values())
    for node in nodes:
        u = index[node]
        if totals[u] == 0:
            continue
        for neighbor, w in sorted(graph.adjacency.get(node, {}).items()):
            src.append(u)
            dst.append(index[neighbor])
            w_norm.append(w / totals[u])
    src_arr = np.array(src, dtype=np.intp)
    dst_arr = np.array(dst, dtype=np.intp)
    w_arr = np.array(w_norm)
    dangling = totals == 0

    d = params.damping
    pr = np.full(n, 1.0 / n)
    converged = False
    for _ in range(params.max_iterations):
        contrib = np.zeros(n)
        if len(src_arr):
            np.add.at(contrib, dst_arr, pr[src_arr] * w_arr)
        contrib += pr[dangling].sum() / n
        new_pr = (1.0 - d) / n + d * contrib
        if np.abs(new_pr - pr).sum() < params.tolerance:
            pr = new_pr
            converged = True
            break
        pr = new_pr
    if not converged:
        warnings.warn(
            f"pagerank did not converge in {params.max_iterations} iterations",
            ConvergenceWarning,
            stacklevel=2,
        )
    return {node: float(pr[index[node]]) for node in nodes}


def betweenness(graph: CoChangeGraph) -> dict[str, float]:
    """Unnormalized shortest-path betweenness on the unweighted skeleton.

    Brandes' accumulation over single-source BFS trees; each unordered node
    pair is counted once.
    """
    nodes = sorted(graph.nodes)
    score = {v: 0.0 for v in nodes}
    for source in nodes:
        stack: list[str] = []
        preds: dict[str, list[str]] = {v: [] for v in nodes}
        sigma = {v: 0.0 for v in nodes}
        dist = {v: -1 for v in nodes}
        sigma[source] = 1.0
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in sorted(graph.adjacency.get(v, {})):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {v: 0.0 for v in nodes}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != source:
                score[w] += delta[w]
    return {v: score[v] / 2.0 for v in nodes}


def _bfs_distances(graph: CoChangeGraph, source: str) -> dict[str, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in graph.adjacency.get(v, {}):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def closeness(graph: CoChangeGraph) -> dict[str, float]:
    """Within-component closeness: (r - 1) / sum of hop distances.

    ``r`` is the size of the node's connected component; isolated nodes score
    zero.
    """
    out: dict[str, float] = {}
    for node in sorted(graph.nodes):
        dist = _bfs_distances(graph, node)
        total = sum(dist.values())
        out[node] = (len(dist) - 1) / total if total > 0 else 0.0
    return out


@dataclass
class CentralitySnapshot:
    """Centrality state of the graph at one point in history."""

    pagerank: dict[str, float]
    betweenness: dict[str, float]
    closeness: dict[str, float]
    min_pr: float
    max_pr: float


def snapshot(graph: CoChangeGraph, params: CentralityParams) -> CentralitySnapshot:
    if not graph.nodes:
        return CentralitySnapshot({}, {}, {}, 0.0, 0.0)
    pr = pagerank(graph, params)
    values = list(pr.values())
    return CentralitySnapshot(
        pagerank=pr,
        betweenness=betweenness(graph),
        closeness=closeness(graph),
        min_pr=min(values),
        max_pr=max(values),
    )


@dataclass(frozen=True)
class CoChangeFeatures:
    d_min_pr: float
    d_max_pr: float
    d_sum_betweenness: float
    d_sum_closeness: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.d_min_pr, self.d_max_pr, self.d_sum_betweenness, self.d_sum_closeness]
        )


FEATURE_NAMES = (
    "cc_d_min_pagerank",
    "cc_d_max_pagerank",
    "cc_d_sum_betweenness",
    "cc_d_sum_closeness",
)


def _touched_paths(commit: CommitRecord | None) -> list[str]:
    if commit is None:
        return []
    return sorted({fc.path for fc in commit.files})


def _features_from_snapshots(
    snap_prev: CentralitySnapshot,
    snap_now: CentralitySnapshot,
    commit_now: CommitRecord,
    commit_prev: CommitRecord | None,
) -> CoChangeFeatures:
    files_now = _touched_paths(commit_now)
    files_prev = _touched_paths(commit_prev)
    btw_now = sum(snap_now.betweenness.get(f, 0.0) for f in files_now)
    btw_prev = sum(snap_prev.betweenness.get(f, 0.0) for f in files_prev)
    clo_now = sum(snap_now.closeness.get(f, 0.0) for f in files_now)
    clo_prev = sum(snap_prev.closeness.get(f, 0.0) for f in files_prev)
    return CoChangeFeatures(
        d_min_pr=snap_now.min_pr - snap_prev.min_pr,
        d_max_pr=snap_now.max_pr - snap_prev.max_pr,
        d_sum_betweenness=btw_now - btw_prev,
        d_sum_closeness=clo_now - clo_prev,
    )


def cochange_features(
    snapshot_prev: CentralitySnapshot,
    graph_after_commit: CoChangeGraph,
    commit_now: CommitRecord,
    commit_prev: CommitRecord | None,
    params: CentralityParams,
) -> CoChangeFeatures:
    """Feature deltas for one commit.

    ``snapshot_prev`` must describe the graph before the commit;
    ``graph_after_commit`` must have it applied. Each centrality sum is
    evaluated on its own era's graph; files absent from a graph contribute
    zero, and a missing previous commit contributes zero sums.
    """
    snap_now = snapshot(graph_after_commit, params)
    return _features_from_snapshots(snapshot_prev, snap_now, commit_now, commit_prev)


def history_features(
    corpus: Corpus, params: CentralityParams
) -> dict[str, CoChangeFeatures]:
    """Per-commit co-change features over the whole history, one pass.

    Equivalent to rebuilding the graph from scratch before and after every
    commit, but applies commits incrementally and reuses each snapshot as the
    next step's "before" state.
    """
    graph = CoChangeGraph()
    snap_prev = snapshot(graph, params)
    prev_commit: CommitRecord | None = None
    out: dict[str, CoChangeFeatures] = {}
    for i, commit in enumerate(corpus.commits):
        apply_commit(graph, commit, params, index=i)
        snap_now = snapshot(graph, params)
        out[commit.hash] = _features_from_snapshots(snap_prev, snap_now, commit, prev_commit)
        snap_prev = snap_now
        prev_commit = commit
    return out


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def write_edge_csv(graph: CoChangeGraph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["file_a", "file_b", "weight"])
        for (a, b), w in sorted(graph.edges().items()):
            writer.writerow([a, b, w])


def write_snapshot_csv(snap: CentralitySnapshot, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["file", "pagerank", "betweenness", "closeness"])
        for node in sorted(snap.pagerank):
            writer.writerow(
                [
                    node,
                    repr(snap.pagerank[node]),
                    repr(snap.betweenness[node]),
                    repr(snap.closeness[node]),
                ]
            )
