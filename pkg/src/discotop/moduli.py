"""Discretized moduli of discontinuity on finite samples.

Every estimator works on a fixed finite sample. A closed rho-ball around a
sample point contains the sample points within distance rho; on configuration
samples the distance is the maximum of the coordinatewise domain distances, so
a configuration ball is exactly the sampled part of a product of domain balls.
The estimate at rho is the largest image diameter over all balls. Estimates
carry a ladder of (rho, value) pairs so trends under refinement stay visible.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .complex_core import SimplicialComplex, simplex_skeleton
from .errors import (
    InvalidArgument,
    InvalidConfiguration,
    NotAlmostRInjective,
    NotInjective,
)
from .rng import make_rng, thread_cap
from .vietoris_rips import FiniteMetricSample

ZERO_TUPLE_TOL = 1e-12
# Relative allowance for floating-point rounding in the sample-level
# inequalities that hold exactly in real arithmetic.
ROUNDING_RTOL = 1e-12

CodomainMetric = Literal["euclidean", "geodesic"]


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Evaluation table of a function on a finite sample.

    ``resolution`` is the covering radius of the sample in its domain;
    ``hot_spots`` are domain coordinates of known discontinuity loci.
    """

    domain: FiniteMetricSample
    values: np.ndarray
    resolution: float
    hot_spots: np.ndarray | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] != len(self.domain):
            raise InvalidArgument("one value per domain point is required")
        if not self.resolution > 0:
            raise InvalidArgument("resolution must be positive")
        object.__setattr__(self, "values", v)
        if self.hot_spots is not None:
            hs = np.asarray(self.hot_spots, dtype=float)
            object.__setattr__(self, "hot_spots", hs.reshape(len(hs), -1))

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        pts = self.domain.points
        dim = pts.shape[1]
        w.writerow([f"x{k}" for k in range(dim)] + [f"f{k}" for k in range(self.d)])
        for p, v in zip(pts, self.values):
            w.writerow([repr(float(a)) for a in p] + [repr(float(b)) for b in v])
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class ConfigSample:
    """Ordered r-tuples of domain indices.

    For metric configuration spaces ``separation`` is the smallest distance
    between entries of a tuple; for deleted products ``carriers`` holds the
    vertex bitmask of a face containing each entry, pairwise disjoint per row.
    """

    configs: np.ndarray
    separation: float | None = None
    carriers: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.configs, dtype=np.int64)
        if c.ndim != 2 or c.shape[1] < 2:
            raise InvalidArgument("configurations must be an (m, r) array with r >= 2")
        object.__setattr__(self, "configs", c)
        if self.carriers is not None:
            car = np.asarray(self.carriers, dtype=np.int64)
            if car.shape != c.shape:
                raise InvalidArgument("one carrier per tuple entry is required")
            for i, j in itertools.combinations(range(c.shape[1]), 2):
                bad = np.flatnonzero(car[:, i] & car[:, j])
                if len(bad):
                    raise InvalidConfiguration(
                        f"configuration {c[bad[0]].tolist()} has entries in intersecting faces")
            object.__setattr__(self, "carriers", car)
        for i, j in itertools.combinations(range(c.shape[1]), 2):
            same = np.flatnonzero(c[:, i] == c[:, j])
            if len(same):
                raise InvalidConfiguration(f"configuration {c[same[0]].tolist()} repeats a point")

    @property
    def r(self) -> int:
        return self.configs.shape[1]

    def __len__(self) -> int:
        return self.configs.shape[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        head = [f"x{i}" for i in range(self.r)]
        if self.carriers is not None:
            head += [f"face{i}" for i in range(self.r)]
        w.writerow(head)
        for k, row in enumerate(self.configs):
            out = [int(v) for v in row]
            if self.carriers is not None:
                out += [int(v) for v in self.carriers[k]]
            w.writerow(out)
        return buf.getvalue()


@dataclass(frozen=True)
class ModulusEstimate:
    value: float
    rho: float
    sep: float | None
    ladder: tuple[tuple[float, float], ...]
    metric: str
    vacuous: bool = False
    center: tuple[int, ...] | None = None

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "rho": self.rho,
            "sep": self.sep,
            "ladder": [[r, v] for r, v in self.ladder],
            "metric": self.metric,
            "vacuous": self.vacuous,
            "center": list(self.center) if self.center is not None else None,
        }


# --- barycentric samples ---------------------------------------------------

def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def bitmask(face: Sequence[int]) -> int:
    out = 0
    for v in face:
        out |= 1 << int(v)
    return out


def simplex_grid(N: int, q: int, K: SimplicialComplex | None = None) -> FiniteMetricSample:
    """Barycentric grid of denominator q on a subcomplex K of the N-simplex.

    Points are the barycentric vectors with coordinates in (1/q)Z whose
    support is a face of K; the carrier of each point is its support, read
    off the integer numerators. The metric is Euclidean in R^{N+1}.
    """
    if q < 1:
        raise InvalidArgument("grid denominator must be positive")
    if N > 62:
        raise InvalidArgument("carrier bitmasks support at most 63 vertices")
    K = simplex_skeleton(N, N) if K is None else K
    if K.vertices and max(K.vertices) > N:
        raise InvalidArgument("complex has vertices outside the N-simplex")
    pts, carriers = [], []
    for face in K.faces:
        k = len(face)
        # interior points of the face: all numerators positive
        for comp in _compositions(q - k, k):
            x = np.zeros(N + 1)
            for v, c in zip(face, comp):
                x[v] = (c + 1) / q
            pts.append(x)
            carriers.append(bitmask(face))
    dim = K.dim
    resolution = math.sqrt(2) / (2 * q) if dim <= 1 else math.sqrt(dim + 1) / q
    return FiniteMetricSample(np.array(pts), "euclidean", carriers=np.array(carriers), resolution=resolution)


def with_extra_points(sample: FiniteMetricSample, points, carriers) -> FiniteMetricSample:
    """Append points (with carriers) to a barycentric sample."""
    pts = np.vstack([sample.points, np.asarray(points, dtype=float)])
    car = np.concatenate([sample.carriers, np.asarray(carriers, dtype=np.int64)])
    return FiniteMetricSample(pts, sample.kind, carriers=car, resolution=sample.resolution)


def edge_cluster_parameters(t0: float, finest: float = 1e-6, coarsest: float = 1e-2, ratio: float = 2.0):
    """Parameters t0 +- h for h geometric from ``coarsest`` down to ``finest``."""
    hs = []
    h = coarsest
    while h >= finest * (1 - 1e-9):
        hs.append(h)
        h /= ratio
    out = [t0] + [t0 - h for h in hs] + [t0 + h for h in hs]
    return sorted(t for t in out if 0.0 < t < 1.0)


# --- configuration samplers ------------------------------------------------

def _dedupe(configs: np.ndarray, n: int, carriers: np.ndarray | None = None):
    keys = _keys(configs, n)
    _, first = np.unique(keys, return_index=True)
    first = np.sort(first)
    return configs[first], None if carriers is None else carriers[first]


def _keys(configs: np.ndarray, n: int) -> np.ndarray:
    r = configs.shape[1]
    if float(n) ** r >= 2.0 ** 62:
        raise InvalidArgument("configuration sample too large to index")
    radix = n ** np.arange(r, dtype=np.int64)
    return configs @ radix


def conf2_all_pairs(domain: FiniteMetricSample, sep: float, max_points: int = 4000) -> ConfigSample:
    """All ordered pairs (i, j) with d(i, j) >= sep."""
    if len(domain) > max_points:
        raise InvalidArgument(
            f"{len(domain)} points is too many for exhaustive pairs; use conf2_patches")
    D = domain.dist
    i, j = np.nonzero(D >= sep)
    keep = i != j
    cfg = np.column_stack([i[keep], j[keep]])
    if len(cfg) == 0:
        raise InvalidArgument("no pair of sample points is separated by sep")
    return ConfigSample(cfg, separation=float(D[cfg[:, 0], cfg[:, 1]].min()))


def hot_spot_anchors(domain: FiniteMetricSample, hot_spots, radius: float) -> np.ndarray:
    """Indices of domain points within ``radius`` of some hot spot."""
    if hot_spots is None or len(hot_spots) == 0:
        return np.arange(len(domain))
    if domain.points is None:
        raise InvalidArgument("hot-spot anchoring needs coordinates")
    tree = cKDTree(domain.points)
    hits = tree.query_ball_point(np.asarray(hot_spots, dtype=float), radius + 1e-12)
    idx = sorted(set(itertools.chain.from_iterable(hits)))
    return np.array(idx, dtype=np.int64)


def conf2_patches(
    domain: FiniteMetricSample,
    sep: float,
    rho: float,
    n_patches: int,
    seed: int,
    anchors=None,
    stream: int = 11,
) -> ConfigSample:
    """Union of product patches B_rho(p) x B_rho(q) around random anchor pairs.

    ``p`` is drawn from ``anchors`` (default: every point), ``q`` uniformly
    among points with d(p, q) >= sep + 2 rho, so every configuration in a
    patch is separated by at least ``sep``.
    """
    rng = make_rng(seed, stream)
    anchors = np.arange(len(domain)) if anchors is None else np.asarray(anchors)
    n = len(domain)
    chosen = []
    for _ in range(n_patches):
        p = int(anchors[rng.integers(len(anchors))])
        for _attempt in range(64):
            q = int(rng.integers(n))
            if domain.distances(p, q) >= sep + 2 * rho:
                chosen.append((p, q))
                break
    if not chosen:
        raise InvalidArgument("could not find separated anchor pairs")
    centers = np.unique(np.array(chosen).ravel())
    balls = dict(zip(centers.tolist(), domain.neighbors(rho, centers)))
    parts = []
    for p, q in chosen:
        bp, bq = balls[p], balls[q]
        grid = np.stack(np.meshgrid(bp, bq, indexing="ij"), axis=-1).reshape(-1, 2)
        parts.append(grid)
    cfg = np.vstack(parts)
    d = domain.distances(cfg[:, 0], cfg[:, 1])
    cfg = cfg[d >= sep]
    cfg, _ = _dedupe(cfg, n)
    return ConfigSample(cfg, separation=float(domain.distances(cfg[:, 0], cfg[:, 1]).min()))


def conf2_value_matched(
    f: SampledFunction,
    sep: float,
    rho: float,
    n_anchors: int = 32,
    per_anchor: int = 4,
) -> ConfigSample:
    """Deterministic sign-flip search for scalar-valued functions.

    Anchors p are the points whose rho-ball has the widest value range
    (lo, hi); each is paired with up to ``per_anchor`` points q with
    lo < f(q) < hi and d(p, q) >= sep + 2 rho, spread evenly over the sorted
    candidates. The patch B_rho(p) x B_rho(q) then holds pairs of both
    orientations whenever the candidate list is nonempty.
    """
    if f.d != 1:
        raise InvalidArgument("value matching needs a scalar-valued function")
    v = f.values[:, 0]
    n = len(f.domain)
    balls = f.domain.neighbors(rho)
    lo = np.array([v[b].min() for b in balls])
    hi = np.array([v[b].max() for b in balls])
    ranked = np.argsort(-(hi - lo), kind="stable")
    order = np.argsort(v, kind="stable")
    sv = v[order]
    chosen = []
    for p in ranked:
        if len(chosen) >= n_anchors * per_anchor:
            break
        a, b = np.searchsorted(sv, lo[p], "right"), np.searchsorted(sv, hi[p], "left")
        cand = order[a:b]
        cand = cand[f.domain.distances(np.full(len(cand), p), cand) >= sep + 2 * rho]
        if len(cand) == 0:
            continue
        picks = cand[np.unique(np.linspace(0, len(cand) - 1, min(per_anchor, len(cand))).astype(int))]
        chosen += [(int(p), int(q)) for q in picks]
    if not chosen:
        raise InvalidArgument("no anchor has a value-matched partner")
    parts = [np.stack(np.meshgrid(balls[p], balls[q], indexing="ij"), axis=-1).reshape(-1, 2)
             for p, q in chosen]
    cfg = np.vstack(parts)
    cfg = cfg[f.domain.distances(cfg[:, 0], cfg[:, 1]) >= sep]
    cfg, _ = _dedupe(cfg, n)
    return ConfigSample(cfg, separation=float(f.domain.distances(cfg[:, 0], cfg[:, 1]).min()))


def deleted_configs(domain: FiniteMetricSample, r: int, anchors=None) -> ConfigSample:
    """Ordered r-tuples of sample points lying in pairwise disjoint faces.

    ``anchors`` restricts the first entry; the remaining entries range over
    the whole sample. Disjointness is certified by the carriers stored on the
    domain, not re-derived from coordinates.
    """
    if domain.carriers is None:
        raise InvalidArgument("deleted-product sampling needs carrier faces on the domain")
    if r < 2:
        raise InvalidArgument("r must be at least 2")
    car = domain.carriers
    groups: dict[int, np.ndarray] = {}
    for mask in np.unique(car):
        groups[int(mask)] = np.flatnonzero(car == mask)
    first_groups = dict(groups)
    if anchors is not None:
        anchors = np.asarray(anchors)
        first_groups = {}
        for mask in np.unique(car[anchors]):
            first_groups[int(mask)] = anchors[car[anchors] == mask]
    masks = sorted(groups)
    chunks, chunk_car = [], []

    def extend(chosen_masks, used):
        if len(chosen_masks) == r:
            lists = [first_groups[chosen_masks[0]]] + [groups[m] for m in chosen_masks[1:]]
            grid = np.stack(np.meshgrid(*lists, indexing="ij"), axis=-1).reshape(-1, r)
            chunks.append(grid)
            chunk_car.append(np.tile(np.array(chosen_masks, dtype=np.int64), (len(grid), 1)))
            return
        pool = first_groups if not chosen_masks else groups
        for m in sorted(pool) if not chosen_masks else masks:
            if m & used == 0:
                extend(chosen_masks + [m], used | m)

    extend([], 0)
    if not chunks:
        raise InvalidArgument(f"no {r} pairwise disjoint faces carry sample points")
    return ConfigSample(np.vstack(chunks), carriers=np.vstack(chunk_car))


# --- ball scans --------------------------------------------------------------

def _csr(lists: list[np.ndarray], n: int, centers: np.ndarray):
    ptr = np.zeros(n + 1, dtype=np.int64)
    sizes = np.zeros(n, dtype=np.int64)
    for c, lst in zip(centers, lists):
        sizes[c] = len(lst)
    ptr[1:] = np.cumsum(sizes)
    idx = np.empty(ptr[-1], dtype=np.int64)
    for c, lst in zip(centers, lists):
        idx[ptr[c]:ptr[c + 1]] = lst
    return ptr, idx


def _prepare(domain: FiniteMetricSample, cfg: np.ndarray, rho: float):
    n = len(domain)
    used = np.unique(cfg)
    lists = domain.neighbors(rho, used)
    # restrict each domain ball to points that occur in some configuration
    present = np.zeros(n, dtype=bool)
    present[used] = True
    lists = [lst[present[lst]] for lst in lists]
    ptr, idx = _csr(lists, n, used)
    keys = _keys(cfg, n)
    order = np.argsort(keys, kind="stable")
    keys_sorted = keys[order]
    if len(keys_sorted) > 1 and np.any(keys_sorted[1:] == keys_sorted[:-1]):
        raise InvalidArgument("configuration sample contains duplicates")
    radix = n ** np.arange(cfg.shape[1], dtype=np.int64)
    sizes = np.diff(ptr)
    cap = int(np.max(np.prod(sizes[cfg], axis=1))) if len(cfg) else 1
    _kernels.set_threads(thread_cap())
    return keys_sorted, order.astype(np.int64), radix, ptr, idx, cap


def _scan(domain: FiniteMetricSample, cfg: np.ndarray, values: np.ndarray, rho: float, geodesic: bool):
    """(image diameter, member count) of every configuration ball at radius rho."""
    keys_sorted, ids, radix, ptr, idx, _ = _prepare(domain, cfg, rho)
    return _kernels.ball_diameters(cfg, keys_sorted, ids, radix, ptr, idx,
                                   np.ascontiguousarray(values, dtype=float), geodesic)


def _scan_max(domain: FiniteMetricSample, cfg: np.ndarray, values: np.ndarray, rho: float, geodesic: bool):
    """(largest ball image diameter, index of a configuration attaining it)."""
    keys_sorted, ids, radix, ptr, idx, cap = _prepare(domain, cfg, rho)
    best, arg = _kernels.max_ball_diameter(cfg, keys_sorted, ids, radix, ptr, idx,
                                           np.ascontiguousarray(values, dtype=float), geodesic, cap)
    return float(best), int(arg)


def _ladder(rho: float, ladder) -> list[float]:
    rungs = [rho] if ladder is None else list(ladder)
    if rho not in rungs:
        rungs.append(rho)
    return sorted(set(float(r) for r in rungs))


def _estimate(domain, cfg, values, rho, ladder, geodesic, sep, resolution, metric):
    if rho < 0:
        raise InvalidArgument("rho must be nonnegative")
    rungs = _ladder(rho, ladder)
    out = []
    center = None
    value = None
    for r_ in rungs:
        best, k = _scan_max(domain, cfg, values, r_, geodesic)
        out.append((r_, best))
        if r_ == rho:
            value, center = best, tuple(int(v) for v in cfg[k])
    vacuous = resolution is not None and rho < resolution
    return ModulusEstimate(value, rho, sep, tuple(out), metric, vacuous, center)


def default_ladder(rho: float, steps: int = 3) -> list[float]:
    return [rho / 2 ** k for k in range(steps)]


def delta_hat(
    g: SampledFunction,
    rho: float,
    codomain_metric: CodomainMetric = "euclidean",
    ladder=None,
) -> ModulusEstimate:
    """max over sample points x of diam g(B_rho(x))."""
    if len(g.domain) == 0:
        raise InvalidArgument("empty sample")
    if codomain_metric not in ("euclidean", "geodesic"):
        raise InvalidArgument(f"unknown codomain metric {codomain_metric!r}")
    ladder = default_ladder(rho, 4) if ladder is None else ladder
    cfg = np.arange(len(g.domain), dtype=np.int64)[:, None]
    return _estimate(g.domain, cfg, g.values, rho, ladder, codomain_metric == "geodesic",
                     None, g.resolution, codomain_metric)


def _normalize_rows(W: np.ndarray, configs: np.ndarray, kind: str) -> np.ndarray:
    norms = np.linalg.norm(W, axis=1)
    bad = np.flatnonzero(norms <= ZERO_TUPLE_TOL)
    if len(bad):
        c = configs[bad[0]].tolist()
        if kind == "pair":
            raise NotInjective(f"f takes the same value at the pair {c}", pair=tuple(c))
        raise NotAlmostRInjective(f"configuration {c} is collapsed to the zero tuple",
                                  configuration=tuple(c))
    return W / norms[:, None]


def phi_f(f: SampledFunction, configs: ConfigSample) -> np.ndarray:
    """(f(x) - f(y)) / |f(x) - f(y)| for every pair (x, y) of the sample."""
    if configs.r != 2:
        raise InvalidArgument("phi_f needs pairs")
    cfg = configs.configs
    diff = f.values[cfg[:, 0]] - f.values[cfg[:, 1]]
    return _normalize_rows(diff, cfg, "pair")


def alpha_hat(
    f: SampledFunction,
    rho: float,
    sep: float,
    configs: ConfigSample | None = None,
    ladder=None,
) -> ModulusEstimate:
    """Discrete scale-invariant modulus: delta-hat of phi_f over separated pairs.

    Pairs closer than ``sep`` are dropped; ``sep >= 2 rho`` keeps every ball
    off the diagonal. The codomain is the unit sphere with its geodesic metric.
    """
    rungs = _ladder(rho, default_ladder(rho) if ladder is None else ladder)
    if sep < 2 * max(rungs):
        raise InvalidArgument(f"sep={sep} is smaller than twice the largest radius {max(rungs)}")
    if configs is None:
        configs = conf2_all_pairs(f.domain, sep)
    cfg = configs.configs
    keep = f.domain.distances(cfg[:, 0], cfg[:, 1]) >= sep
    if not np.all(keep):
        configs = ConfigSample(cfg[keep], separation=sep)
    U = phi_f(f, configs)
    return _estimate(f.domain, configs.configs, U, rho, rungs, True, sep, f.resolution, "geodesic")


def conf_r_map(f: SampledFunction, tup: Sequence[int], carriers: Sequence[int] | None = None) -> np.ndarray:
    """Centered tuple (f(x_i) - mean_j f(x_j))_i as an (r, d) array summing to zero."""
    tup = [int(t) for t in tup]
    if carriers is None and f.domain.carriers is not None:
        carriers = [int(f.domain.carriers[t]) for t in tup]
    if carriers is not None:
        for a, b in itertools.combinations(carriers, 2):
            if a & b:
                raise InvalidConfiguration(f"entries of {tup} do not lie in pairwise disjoint faces")
    Y = f.values[tup]
    return Y - Y.mean(axis=0)


def centered_tuples(f: SampledFunction, configs: ConfigSample) -> np.ndarray:
    """Vectorized conf_r_map: shape (m, r, d)."""
    Y = f.values[configs.configs]
    return Y - Y.mean(axis=1, keepdims=True)


def alpha_r_hat(
    f: SampledFunction,
    r: int,
    rho: float,
    configs: ConfigSample | None = None,
    ladder=None,
    anchor_radius: float | None = None,
) -> ModulusEstimate:
    """Discrete r-fold modulus: delta-hat of the normalized centered-tuple map.

    Without an explicit sample, configurations are drawn from the deleted
    product of the domain; if ``f`` exports hot spots, the first entry is
    restricted to points within ``anchor_radius`` (default 4 rho) of a hot
    spot, where the witness construction placed dense clusters.
    """
    if configs is None:
        anchors = None
        if f.hot_spots is not None and len(f.hot_spots):
            radius = 4 * rho if anchor_radius is None else anchor_radius
            anchors = hot_spot_anchors(f.domain, f.hot_spots, radius)
        configs = deleted_configs(f.domain, r, anchors)
    if configs.r != r:
        raise InvalidArgument(f"configuration sample has r={configs.r}, expected {r}")
    W = centered_tuples(f, configs).reshape(len(configs), -1)
    U = _normalize_rows(W, configs.configs, "tuple")
    rungs = default_ladder(rho) if ladder is None else ladder
    return _estimate(f.domain, configs.configs, U, rho, rungs, True, None, f.resolution, "geodesic")


def kappa_r(f: SampledFunction, r: int, configs: ConfigSample) -> float:
    """min over configurations of (1/r) sqrt(sum_{i,j} |f(x_i) - f(x_j)|^2)."""
    if len(configs) == 0:
        raise InvalidArgument("empty configuration sample")
    if configs.r != r:
        raise InvalidArgument(f"configuration sample has r={configs.r}, expected {r}")
    Y = f.values[configs.configs]  # (m, r, d)
    diff = Y[:, :, None, :] - Y[:, None, :, :]
    s = np.sum(diff ** 2, axis=(1, 2, 3))
    return float(np.min(np.sqrt(s)) / r)


def kappa_inf(values) -> float:
    """min over the sample of |g(x)|."""
    V = np.asarray(values, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    return float(np.min(np.linalg.norm(V.reshape(len(V), -1), axis=1)))


# --- the lemma chain on a sample -------------------------------------------

def normalization_gap(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """|x - y| - min(|x|,|y|) |x/|x| - y/|y||, rowwise; nonnegative in exact arithmetic."""
    nx = np.linalg.norm(x, axis=-1)
    ny = np.linalg.norm(y, axis=-1)
    lhs = np.minimum(nx, ny) * np.linalg.norm(x / nx[..., None] - y / ny[..., None], axis=-1)
    return np.linalg.norm(x - y, axis=-1) - lhs


def _at_least(lhs: float, rhs: float) -> bool:
    return lhs >= rhs - ROUNDING_RTOL * max(abs(lhs), abs(rhs)) - 1e-300


@dataclass
class LemmaCheck:
    name: str
    passed: bool
    lhs: float
    rhs: float
    tolerance: float
    witness: object = None

    def as_dict(self) -> dict:
        return {
            "name": self.name, "passed": self.passed, "lhs": self.lhs, "rhs": self.rhs,
            "tolerance": self.tolerance, "witness": self.witness,
        }


def verify_lemma_chain(
    f: SampledFunction,
    r: int,
    rho: float,
    configs: ConfigSample | None = None,
    pair_tol: float = 1e-9,
) -> dict:
    """Check the normalization/modulus inequalities exactly on one common sample.

    Returns a dict with the estimates and one :class:`LemmaCheck` per step:
    ``normalization`` (all pairs of centered tuples), ``product_modulus``,
    ``kappa_identity``, ``angle_modulus`` (the kappa1 step) and
    ``modulus_bound`` (the combined inequality).
    """
    if configs is None:
        configs = deleted_configs(f.domain, r)
    W = centered_tuples(f, configs).reshape(len(configs), -1)
    _normalize_rows(W, configs.configs, "tuple")
    cfg = configs.configs
    ladder = [rho]
    d_f = delta_hat(f, rho, "euclidean", ladder=ladder)
    d_conf = _estimate(f.domain, cfg, W, rho, ladder, False, None, f.resolution, "euclidean")
    a_r = alpha_r_hat(f, r, rho, configs=configs, ladder=ladder)
    k_conf = kappa_inf(W)
    k_r = kappa_r(f, r, configs)

    checks = []
    # normalization inequality over every pair of centered tuples
    worst, worst_pair = math.inf, None
    m = len(W)
    for s in range(0, m, 256):
        a = W[s:s + 256, None, :]
        gap = normalization_gap(np.broadcast_to(a, (a.shape[0], m, W.shape[1])),
                                np.broadcast_to(W[None, :, :], (a.shape[0], m, W.shape[1])))
        k = np.unravel_index(np.argmin(gap), gap.shape)
        if gap[k] < worst:
            worst, worst_pair = float(gap[k]), (s + int(k[0]), int(k[1]))
    checks.append(LemmaCheck("normalization", worst >= -pair_tol, worst, 0.0, pair_tol,
                             None if worst >= -pair_tol else worst_pair))
    rhs = math.sqrt(r) * d_f.value
    checks.append(LemmaCheck("product_modulus", _at_least(rhs, d_conf.value), d_conf.value, rhs,
                             ROUNDING_RTOL, None if _at_least(rhs, d_conf.value) else d_conf.center))
    lhs, rhs = math.sqrt(2) * k_conf, math.sqrt(r) * k_r
    checks.append(LemmaCheck("kappa_identity", abs(lhs - rhs) <= 1e-9, lhs, rhs, 1e-9))
    lhs1 = 2 * math.sin(a_r.value / 2) * k_conf
    checks.append(LemmaCheck("angle_modulus", _at_least(d_conf.value, lhs1), lhs1, d_conf.value,
                             ROUNDING_RTOL, None if _at_least(d_conf.value, lhs1) else a_r.center))
    lhs2 = math.sqrt(2) * math.sin(a_r.value / 2) * k_r
    ok = _at_least(d_f.value, lhs2)
    checks.append(LemmaCheck("modulus_bound", ok, lhs2, d_f.value, ROUNDING_RTOL,
                             None if ok else a_r.center))
    return {
        "delta_f": d_f,
        "delta_conf": d_conf,
        "alpha_r": a_r,
        "kappa_conf": k_conf,
        "kappa_r": k_r,
        "checks": checks,
        "passed": all(c.passed for c in checks),
    }


def random_piecewise_function(domain: FiniteMetricSample, d: int, seed: int, stream: int = 0,
                              n_cells: int = 4, jump_scale: float = 1.0) -> np.ndarray:
    """Values of a random affine map plus a Voronoi piecewise-constant jump.

    ``n_cells`` random sites split the domain into Voronoi cells (ties go to
    the lowest site); each cell adds its own random constant vector.
    """
    rng = make_rng(seed, stream)
    pts = domain.points
    A = rng.standard_normal((pts.shape[1], d))
    b = rng.standard_normal(d)
    sites = pts[rng.choice(len(pts), size=min(n_cells, len(pts)), replace=False)]
    jumps = jump_scale * rng.standard_normal((len(sites), d))
    owner = np.argmin(np.linalg.norm(pts[:, None, :] - sites[None, :, :], axis=2), axis=1)
    return pts @ A + b + jumps[owner]
