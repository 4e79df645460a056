"""Finite metric samples (spheres, n-gons, projective spaces) and Vietoris-Rips complexes."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
from scipy.spatial import cKDTree

from .complex_core import SimplicialComplex
from .errors import InvalidArgument
from .rng import make_rng, thread_cap

Kind = Literal["sphere-geodesic", "projective-quotient", "euclidean", "abstract"]
KINDS = ("sphere-geodesic", "projective-quotient", "euclidean", "abstract")

# Closed balls use d <= rho + BALL_SLACK; grid distances computed in floating
# point can exceed a mathematically equal radius by a few ulps.
BALL_SLACK = 1e-12


def _rowwise_distance(a: np.ndarray, b: np.ndarray, kind: str) -> np.ndarray:
    if kind == "euclidean":
        return np.sqrt(np.sum((a - b) ** 2, axis=-1))
    minus = np.sqrt(np.sum((a - b) ** 2, axis=-1))
    plus = np.sqrt(np.sum((a + b) ** 2, axis=-1))
    if kind == "sphere-geodesic":
        return 2.0 * np.arctan2(minus, plus)
    if kind == "projective-quotient":
        return 2.0 * np.arctan2(np.minimum(minus, plus), np.maximum(minus, plus))
    raise InvalidArgument(f"kind {kind!r} has no coordinate formula")


@dataclass(frozen=True, eq=False)
class FiniteMetricSample:
    """A finite metric space given by coordinates, a distance table, or both.

    If ``table`` is supplied it is authoritative for every distance query.
    ``carriers`` optionally records, per point, the vertex bitmask of the
    face of a simplicial complex containing it (barycentric samples).
    """

    points: np.ndarray | None
    kind: str
    table: np.ndarray | None = None
    carriers: np.ndarray | None = None
    resolution: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown metric kind {self.kind!r}")
        if self.points is None and self.table is None:
            raise InvalidArgument("a sample needs coordinates or a distance table")
        if self.points is not None:
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim != 2:
                raise InvalidArgument("points must be a 2-d array")
            object.__setattr__(self, "points", pts)
        if self.table is not None:
            t = np.asarray(self.table, dtype=float)
            if t.ndim != 2 or t.shape[0] != t.shape[1]:
                raise InvalidArgument("distance table must be square")
            if self.points is not None and t.shape[0] != self.points.shape[0]:
                raise InvalidArgument("table and coordinates disagree on the point count")
            object.__setattr__(self, "table", t)
        if self.kind == "abstract" and self.table is None:
            raise InvalidArgument("abstract samples need a distance table")
        if self.carriers is not None:
            c = np.asarray(self.carriers, dtype=np.int64)
            if c.shape != (len(self),):
                raise InvalidArgument("one carrier bitmask per point is required")
            object.__setattr__(self, "carriers", c)

    def __len__(self) -> int:
        return self.table.shape[0] if self.table is not None else self.points.shape[0]

    @property
    def n(self) -> int:
        return len(self)

    def distances(self, i, j) -> np.ndarray:
        """Elementwise distances d(i[k], j[k]) (broadcasting index arrays)."""
        i, j = np.broadcast_arrays(np.asarray(i), np.asarray(j))
        if self.table is not None:
            return self.table[i, j]
        return _rowwise_distance(self.points[i], self.points[j], self.kind)

    @cached_property
    def dist(self) -> np.ndarray:
        """Full symmetric distance table."""
        if self.table is not None:
            return self.table
        n = len(self)
        out = np.empty((n, n))
        step = max(1, 2_000_000 // max(n, 1))
        idx = np.arange(n)
        for s in range(0, n, step):
            rows = idx[s:s + step]
            out[rows] = self.distances(rows[:, None], idx[None, :])
        np.fill_diagonal(out, 0.0)
        return out

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.points)

    def ball(self, i: int, rho: float) -> np.ndarray:
        return self.neighbors(rho, centers=np.array([i]))[0]

    def neighbors(self, rho: float, centers=None) -> list[np.ndarray]:
        """Closed rho-balls (sorted index arrays) around each center."""
        n = len(self)
        centers = np.arange(n) if centers is None else np.asarray(centers)
        limit = rho + BALL_SLACK
        if self.table is not None or self.points is None:
            return [np.flatnonzero(self.dist[c] <= limit) for c in centers]
        if self.kind == "euclidean":
            radius = limit
        else:
            radius = 2.0 * math.sin(min(limit, math.pi) / 2.0)
        radius = radius * (1 + 1e-9) + 1e-12
        pts = self.points[centers]
        cand = self._tree.query_ball_point(pts, radius, workers=thread_cap())
        if self.kind == "projective-quotient":
            cand2 = self._tree.query_ball_point(-pts, radius, workers=thread_cap())
            cand = [list(set(a) | set(b)) for a, b in zip(cand, cand2)]
        out = []
        for c, js in zip(centers, cand):
            js = np.array(sorted(js), dtype=np.int64)
            keep = self.distances(np.full(len(js), c), js) <= limit
            out.append(js[keep])
        return out

    def check_metric(self, tol: float = 1e-9) -> list[str]:
        """Return the list of violated metric invariants (empty if all hold)."""
        D = self.dist
        problems = []
        if np.any(np.abs(np.diag(D)) > tol):
            problems.append("nonzero self-distance")
        if np.any(np.abs(D - D.T) > tol):
            problems.append("asymmetric")
        if np.any(D < -tol):
            problems.append("negative distance")
        # d(i,k) <= d(i,j) + d(j,k) for all triples, one j at a time.
        for j in range(len(self)):
            if np.any(D > D[:, j:j + 1] + D[j:j + 1, :] + tol):
                problems.append("triangle inequality")
                break
        cap = {"sphere-geodesic": math.pi, "projective-quotient": math.pi / 2}.get(self.kind)
        if cap is not None and np.any(D > cap + tol):
            problems.append("diameter bound")
        return problems

    def to_csv(self) -> tuple[str, str]:
        """(points CSV, distance-table CSV)."""
        pts = io.StringIO()
        w = csv.writer(pts, lineterminator="\n")
        if self.points is not None:
            w.writerow(["index"] + [f"x{k}" for k in range(self.points.shape[1])])
            for i, p in enumerate(self.points):
                w.writerow([i] + [repr(float(v)) for v in p])
        else:
            w.writerow(["index"])
            for i in range(len(self)):
                w.writerow([i])
        tab = io.StringIO()
        w = csv.writer(tab, lineterminator="\n")
        w.writerow(["index"] + list(range(len(self))))
        for i, row in enumerate(self.dist):
            w.writerow([i] + [repr(float(v)) for v in row])
        return pts.getvalue(), tab.getvalue()

    @classmethod
    def from_csv(cls, points_csv: str, table_csv: str | None, kind: str) -> "FiniteMetricSample":
        rows = list(csv.reader(io.StringIO(points_csv)))
        pts = np.array([[float(v) for v in r[1:]] for r in rows[1:]]) if len(rows[0]) > 1 else None
        table = None
        if table_csv is not None:
            trows = list(csv.reader(io.StringIO(table_csv)))
            table = np.array([[float(v) for v in r[1:]] for r in trows[1:]])
        return cls(pts, kind, table=table)


@dataclass(frozen=True)
class VRThreshold:
    value: float
    convention: Literal["weak", "strict"] = "weak"

    def __post_init__(self):
        if self.value < 0:
            raise InvalidArgument("threshold must be nonnegative")
        if self.convention not in ("weak", "strict"):
            raise InvalidArgument(f"unknown convention {self.convention!r}")


def vr_complex(M: FiniteMetricSample, t: VRThreshold | float, max_dim: int) -> SimplicialComplex:
    """Clique complex of the threshold graph, truncated at ``max_dim``.

    Thresholds are compared against the stored distance table directly, so
    ``weak`` (<=) and ``strict`` (<) differ exactly on tied doubles.
    """
    if not isinstance(t, VRThreshold):
        t = VRThreshold(float(t))
    if max_dim < 0:
        raise InvalidArgument("max_dim must be nonnegative")
    D = M.dist
    n = len(M)
    adj = D <= t.value if t.convention == "weak" else D < t.value
    np.fill_diagonal(adj, False)
    up = [set(np.flatnonzero(adj[i, i + 1:]) + i + 1) for i in range(n)]
    faces: list[tuple[int, ...]] = []

    def extend(face, cand):
        faces.append(face)
        if len(face) > max_dim:
            return
        for v in sorted(cand):
            extend(face + (int(v),), cand & up[v])

    for i in range(n):
        extend((i,), up[i])
    return SimplicialComplex(tuple(range(n)), tuple(faces))


def pi_fraction(p: int, q: int) -> float:
    """The double nearest (pi * p) / q, evaluated from the reduced fraction.

    Thresholds and n-gon distances both go through this function, so equal
    rationals always give bitwise-equal doubles.
    """
    if q <= 0:
        raise InvalidArgument("denominator must be positive")
    g = math.gcd(p, q)
    return math.pi * (p // g) / (q // g)


def _reduced_arc(k: int, n: int) -> float:
    return pi_fraction(2 * k, n)


def ngon_sample(n: int) -> FiniteMetricSample:
    """Vertices of a regular n-gon on S^1 with geodesic distances 2*pi*k/n.

    Arc lengths are evaluated from the reduced fraction k/n so that, e.g., the
    hexagon's second-neighbor distance is the same double as ``2*pi/3``.
    """
    if n < 3:
        raise InvalidArgument("an n-gon needs n >= 3")
    ang = 2 * np.pi * np.arange(n) / n
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    table = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            k = abs(i - j)
            table[i, j] = _reduced_arc(min(k, n - k), n) if k else 0.0
    return FiniteMetricSample(pts, "sphere-geodesic", table=table, resolution=math.pi / n)


def _unit_gaussians(dim: int, count: int, seed: int, stream: int = 0) -> np.ndarray:
    rng = make_rng(seed, stream)
    x = rng.standard_normal((count, dim))
    norms = np.linalg.norm(x, axis=1)
    while np.any(norms == 0):  # pragma: no cover - probability zero
        bad = norms == 0
        x[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(x, axis=1)
    return x / norms[:, None]


def sphere_sample(n: int, count: int, seed: int, antipodal: bool = False) -> FiniteMetricSample:
    """``count`` uniform points on S^n (normalized Gaussians); with ``antipodal``
    each point is followed by its antipode."""
    if count < n + 2:
        raise InvalidArgument(f"need at least {n + 2} points on S^{n}")
    pts = _unit_gaussians(n + 1, count, seed)
    if antipodal:
        pts = np.stack([pts, -pts], axis=1).reshape(-1, n + 1)
    return FiniteMetricSample(pts, "sphere-geodesic")


def projective_sample(n: int, count: int, seed: int = 0, evenly_spaced: bool = False) -> FiniteMetricSample:
    """Points of RP^n with the quotient metric min(d(x,y), d(x,-y)).

    ``evenly_spaced`` (n = 1 only) places representatives at angles
    i*pi/count, i.e. evenly around the circle of circumference pi.
    """
    if count < 1:
        raise InvalidArgument("count must be positive")
    if evenly_spaced:
        if n != 1:
            raise InvalidArgument("evenly spaced samples exist for RP^1 only")
        ang = np.pi * np.arange(count) / count
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
        return FiniteMetricSample(pts, "projective-quotient", resolution=math.pi / (2 * count))
    return FiniteMetricSample(_unit_gaussians(n + 1, count, seed), "projective-quotient")
