"""Synthetic dataset generators, must-link samplers, and file I/O.

The six generators produce 2-D point clouds whose mutual-kNN graphs separate
into the ideal number of clusters at the default noise level, which is the
property the clustering experiments rely on. All randomness flows from the
seed of the dataset or sampler call.

File formats
------------
- ``points.csv``: one point per row, comma-separated decimals; an optional
  header row is detected by a non-numeric first token.
- ``edges.tsv``: ``i<TAB>j<TAB>weight`` with ``i < j`` and ``weight > 0``.
- ``mustlinks.tsv``: ``i<TAB>j``.
- ``labels.csv``: one integer per row.
- ``zmask.tsv``: ``i<TAB>j<TAB>z`` with binary ``z`` per edge.
- ``report.json``: flat JSON object.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import ContractViolationError, ParseError
from .graph import MustLinkSet, SimilarityGraph


class Shape(str, enum.Enum):
    THREE_CIRCLES = "three-circles"
    SMILE_FACES = "smile-faces"
    THREE_PARTS = "three-parts"
    TWO_BLOCKS_IN_CIRCLE = "two-blocks-in-circle"
    TWO_MOONS = "two-moons"
    FOUR_BLOCKS_NOISE = "four-blocks-noise"


#: Ideal cluster count per shape.
IDEAL_CLUSTERS = {
    Shape.THREE_CIRCLES: 3,
    Shape.SMILE_FACES: 3,
    Shape.THREE_PARTS: 3,
    Shape.TWO_BLOCKS_IN_CIRCLE: 3,
    Shape.TWO_MOONS: 2,
    Shape.FOUR_BLOCKS_NOISE: 5,
}


@dataclass(frozen=True)
class SyntheticSpec:
    shape: Shape
    n_per_cluster: int = 100
    noise: float = 0.05
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        if self.n_per_cluster < 20:
            raise ContractViolationError("n_per_cluster must be >= 20")
        if self.noise < 0:
            raise ContractViolationError("noise must be nonnegative")

    @property
    def ideal_clusters(self) -> int:
        return IDEAL_CLUSTERS[self.shape]


# Cluster interiors are sampled with bounded gaps (jittered even spacing on
# curves, jittered grids on rectangles, a sunflower layout on disks) so that
# the mutual-kNN graph of every cluster stays connected at the default noise
# for every seed; iid uniform sampling leaves occasional holes larger than
# the neighborhood reach.


def _curve_params(rng, m, lo, hi, closed=False):
    span = hi - lo
    step = span / m if closed else span / max(1, m - 1)
    base = lo + step * np.arange(m)
    return base + rng.uniform(-0.5, 0.5, m) * step


def _rect(rng, m, x0, x1, y0, y1):
    w, h = x1 - x0, y1 - y0
    ny = max(1, round(math.sqrt(m * h / w)))
    counts = [m // ny + (1 if r < m % ny else 0) for r in range(ny)]
    rows = []
    for r, count in enumerate(counts):
        if count == 0:
            continue
        ys = y0 + (r + 0.5 + rng.uniform(-0.3, 0.3, count)) * h / ny
        xs = x0 + (np.arange(count) + 0.5 + rng.uniform(-0.3, 0.3, count)) * w / count
        rows.append(np.column_stack([xs, ys]))
    return np.concatenate(rows)


def _disk(rng, m, cx, cy, radius):
    golden = np.pi * (3.0 - np.sqrt(5.0))
    i = np.arange(m)
    rad = radius * np.sqrt((i + 0.5) / m)
    ang = i * golden + rng.uniform(0.0, 2.0 * np.pi)
    return np.column_stack([cx + rad * np.cos(ang), cy + rad * np.sin(ang)])


def _arc(rng, m, radius, theta0, theta1, cx=0.0, cy=0.0, closed=False):
    ang = _curve_params(rng, m, theta0, theta1, closed=closed)
    return np.column_stack([cx + radius * np.cos(ang), cy + radius * np.sin(ang)])


def generate(spec: SyntheticSpec):
    """Points and ground-truth labels for one synthetic shape.

    Deterministic given the seed. With ``noise = 0`` all points lie exactly
    on the generating curves or inside the generating regions.
    """
    rng = np.random.default_rng(spec.seed)
    m = spec.n_per_cluster
    shape = spec.shape

    if shape is Shape.THREE_CIRCLES:
        clusters = [_arc(rng, m, r, 0.0, 2.0 * np.pi, closed=True) for r in (4.0, 8.0, 12.0)]
    elif shape is Shape.SMILE_FACES:
        clusters = [
            _disk(rng, m, -3.5, 3.0, 1.5),
            _disk(rng, m, 3.5, 3.0, 1.5),
            _arc(rng, m, 10.0, np.pi + 0.35, 2.0 * np.pi - 0.35),
        ]
    elif shape is Shape.THREE_PARTS:
        clusters = [
            _rect(rng, m, 0.0, 8.0, 0.0, 1.6),
            _rect(rng, m, 0.0, 8.0, 3.6, 5.2),
            _rect(rng, m, 0.0, 8.0, 7.2, 8.8),
        ]
    elif shape is Shape.TWO_BLOCKS_IN_CIRCLE:
        clusters = [
            _rect(rng, m, -4.5, -1.5, -1.5, 1.5),
            _rect(rng, m, 1.5, 4.5, -1.5, 1.5),
            _arc(rng, m, 9.0, 0.0, 2.0 * np.pi, closed=True),
        ]
    elif shape is Shape.TWO_MOONS:
        radius = 12.0
        t0 = _curve_params(rng, m, 0.0, np.pi)
        t1 = _curve_params(rng, m, 0.0, np.pi)
        clusters = [
            radius * np.column_stack([np.cos(t0), np.sin(t0)]),
            radius * np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)]),
        ]
    elif shape is Shape.FOUR_BLOCKS_NOISE:
        centers = [(-6.5, -6.5), (-6.5, 6.5), (6.5, -6.5), (6.5, 6.5)]
        clusters = [
            _rect(rng, m, cx - 1.5, cx + 1.5, cy - 1.5, cy + 1.5)
            for cx, cy in centers
        ]
        clusters.append(_disk(rng, m, 0.0, 0.0, 3.5))
    else:  # pragma: no cover
        raise ContractViolationError(f"unknown shape {shape!r}")

    points = np.concatenate(clusters)
    if spec.noise > 0:
        # uniform jitter with the requested std-dev: bounded tails keep noisy
        # points inside the mutual-kNN reach of their cluster
        half_width = math.sqrt(3.0) * spec.noise
        points = points + rng.uniform(-half_width, half_width, points.shape)
    labels = np.repeat(np.arange(len(clusters), dtype=np.int64), m)
    return points, labels


def sample_mustlinks_within(truth, G: SimilarityGraph, s_percent: float, seed: int) -> MustLinkSet:
    """Uniform sample of ``floor(s% * count)`` within-cluster edges of ``G``."""
    if not 0 <= s_percent <= 100:
        raise ContractViolationError("s_percent must be in [0, 100]")
    truth = np.asarray(truth)
    candidates = np.nonzero(truth[G.rows] == truth[G.cols])[0]
    k = int(math.floor(s_percent / 100.0 * candidates.size))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(candidates.size, size=k, replace=False) if k else np.empty(0, dtype=int)
    picked = candidates[chosen]
    return MustLinkSet.from_pairs(np.stack([G.rows[picked], G.cols[picked]], axis=1))


def sample_mustlinks_uniform(G: SimilarityGraph, fraction: float, seed: int) -> MustLinkSet:
    """Leading ``floor(fraction * |E|)`` edges of a random permutation of the edges.

    May pick edges across ideal clusters; that is the point of this variant.
    """
    if not 0 <= fraction <= 1:
        raise ContractViolationError("fraction must be in [0, 1]")
    k = int(math.floor(fraction * G.num_edges))
    perm = np.random.default_rng(seed).permutation(G.num_edges)[:k]
    return MustLinkSet.from_pairs(np.stack([G.rows[perm], G.cols[perm]], axis=1))


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------


def _data_lines(path):
    text = Path(path).read_text()
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped:
            yield line_no, stripped


def load_points(path) -> np.ndarray:
    """Points from a CSV file; detects an optional header row."""
    rows = []
    width = None
    for line_no, line in _data_lines(path):
        tokens = [t.strip() for t in line.split(",")]
        if not rows and width is None:
            try:
                float(tokens[0])
            except ValueError:
                width = len(tokens)  # header row: remember width, skip
                continue
        try:
            values = [float(t) for t in tokens]
        except ValueError as exc:
            raise ParseError(path, line_no, f"not a number: {exc}") from None
        if any(not math.isfinite(v) for v in values):
            raise ParseError(path, line_no, "non-finite coordinate")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ParseError(path, line_no, f"expected {width} columns, got {len(values)}")
        rows.append(values)
    if not rows:
        raise ParseError(path, 1, "no data rows")
    return np.asarray(rows, dtype=float)


def save_points(path, points):
    points = np.asarray(points, dtype=float)
    lines = [",".join(repr(float(v)) for v in row) for row in points]
    Path(path).write_text("\n".join(lines) + "\n")


def load_labels(path) -> np.ndarray:
    labels = []
    for line_no, line in _data_lines(path):
        try:
            labels.append(int(line))
        except ValueError:
            raise ParseError(path, line_no, f"not an integer label: {line!r}") from None
    if not labels:
        raise ParseError(path, 1, "no data rows")
    return np.asarray(labels, dtype=np.int64)


def save_labels(path, labels):
    labels = getattr(labels, "labels", labels)  # accept a ClusterAssignment
    lines = [str(int(v)) for v in np.asarray(labels).ravel()]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_indexed_line(path, line_no, line, expected_fields):
    fields = line.split("\t")
    if len(fields) != expected_fields:
        raise ParseError(path, line_no, f"expected {expected_fields} tab-separated fields")
    try:
        i, j = int(fields[0]), int(fields[1])
    except ValueError:
        raise ParseError(path, line_no, "vertex indices must be integers") from None
    if i < 0 or j < 0:
        raise ParseError(path, line_no, "vertex indices must be nonnegative")
    return i, j, fields[2:]


def load_edges(path) -> SimilarityGraph:
    """Weighted edge list; vertex count is inferred as the largest index + 1."""
    rows, cols, weights = [], [], []
    seen = {}
    for line_no, line in _data_lines(path):
        i, j, rest = _parse_indexed_line(path, line_no, line, 3)
        if i >= j:
            raise ParseError(path, line_no, f"edges must satisfy i < j, got ({i}, {j})")
        if (i, j) in seen:
            raise ParseError(path, line_no, f"duplicate edge ({i}, {j}), first at line {seen[(i, j)]}")
        seen[(i, j)] = line_no
        try:
            w = float(rest[0])
        except ValueError:
            raise ParseError(path, line_no, "weight must be a number") from None
        if not math.isfinite(w) or w <= 0:
            raise ParseError(path, line_no, f"weight must be finite and positive, got {rest[0]}")
        rows.append(i)
        cols.append(j)
        weights.append(w)
    if not rows:
        raise ParseError(path, 1, "no data rows")
    n = max(cols) + 1
    return SimilarityGraph.from_edges(n, np.stack([rows, cols], axis=1), np.asarray(weights))


def save_edges(path, G: SimilarityGraph):
    lines = [f"{i}\t{j}\t{repr(float(w))}" for i, j, w in zip(G.rows, G.cols, G.a)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_mustlinks(path) -> MustLinkSet:
    pairs = []
    for line_no, line in _data_lines(path):
        i, j, _ = _parse_indexed_line(path, line_no, line, 2)
        if i == j:
            raise ParseError(path, line_no, "must-link pairs may not be self-pairs")
        pairs.append((i, j))
    return MustLinkSet.from_pairs(pairs)


def save_mustlinks(path, J: MustLinkSet):
    lines = [f"{i}\t{j}" for i, j in J]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def load_zmask(path):
    """Edge mask file; returns ``(pairs, values)`` arrays."""
    pairs, values = [], []
    for line_no, line in _data_lines(path):
        i, j, rest = _parse_indexed_line(path, line_no, line, 3)
        if i >= j:
            raise ParseError(path, line_no, f"edges must satisfy i < j, got ({i}, {j})")
        try:
            z = float(rest[0])
        except ValueError:
            raise ParseError(path, line_no, "mask value must be a number") from None
        if z not in (0.0, 1.0):
            raise ParseError(path, line_no, f"mask value must be 0 or 1, got {rest[0]}")
        pairs.append((i, j))
        values.append(z)
    if not pairs:
        raise ParseError(path, 1, "no data rows")
    return np.asarray(pairs, dtype=np.int64), np.asarray(values)


def save_zmask(path, G: SimilarityGraph, values):
    values = np.asarray(values, dtype=float).ravel()
    lines = [f"{i}\t{j}\t{int(z)}" for i, j, z in zip(G.rows, G.cols, values)]
    Path(path).write_text("\n".join(lines) + "\n")


def save_report(path, report):
    payload = report.to_dict() if hasattr(report, "to_dict") else dict(report)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
