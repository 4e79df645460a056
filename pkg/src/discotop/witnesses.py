"""Deterministic discontinuous witness functions.

Each builder returns a :class:`SampledFunction` that has already passed its
own verification; ``meta["spec"]`` records the construction parameters and
``meta["verification"]`` what was checked.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConstructionFailed, InvalidArgument
from .moduli import SampledFunction, bitmask, edge_cluster_parameters, simplex_grid
from .rng import make_rng
from .vietoris_rips import FiniteMetricSample

WITNESS_KINDS = (
    "digit-interleave",
    "k5-jump",
    "tverberg-one-point",
    "equatorial-odd",
    "monotone-step",
    "nonmonotone-step",
)
SEPARATION_FLOOR = 1e-12


@dataclass(frozen=True)
class WitnessSpec:
    kind: str
    params: dict
    expected_bound: str = ""

    def __post_init__(self):
        if self.kind not in WITNESS_KINDS:
            raise InvalidArgument(f"unknown witness kind {self.kind!r}")


def _finish(domain, values, resolution, hot_spots, spec: WitnessSpec, verification: dict) -> SampledFunction:
    return SampledFunction(domain, values, resolution, hot_spots=hot_spots, name=spec.kind,
                           meta={"spec": asdict(spec), "verification": verification})


def sidecar_json(f: SampledFunction) -> str:
    """JSON sidecar for a witness CSV: spec, hot spots, verification status."""
    hs = None if f.hot_spots is None else f.hot_spots.tolist()
    body = {"name": f.name, "resolution": f.resolution, "hot_spots": hs, **f.meta}
    return json.dumps(body, indent=2, sort_keys=True, default=float)


# --- digit interleaving on the unit square ---------------------------------

def digit_interleave(bits: int, grid: int) -> SampledFunction:
    """f(x, y) = 0.y1 x1 y2 x2 ... in binary on the dyadic grid of [0,1)^2.

    All values are dyadic rationals with at most 2*bits digits, so they are
    exact doubles for bits <= 26.
    """
    if bits < 1 or bits > 26:
        raise InvalidArgument("bits must lie in 1..26")
    if grid != 2 ** bits:
        raise InvalidArgument(f"grid must equal 2**bits = {2 ** bits}, got {grid}")
    i, j = np.meshgrid(np.arange(grid), np.arange(grid), indexing="ij")
    i, j = i.ravel(), j.ravel()
    num = np.zeros_like(i)
    for b in range(bits):
        xb = (i >> (bits - 1 - b)) & 1
        yb = (j >> (bits - 1 - b)) & 1
        num = (num << 2) | (yb << 1) | xb
    values = num.astype(float) / float(4 ** bits)
    if len(np.unique(values)) != len(values):
        raise ConstructionFailed("interleaved values collide")
    pts = np.column_stack([i, j]).astype(float) / grid
    h = 1.0 / grid
    domain = FiniteMetricSample(pts, "euclidean", resolution=h * math.sqrt(2) / 2)
    spec = WitnessSpec("digit-interleave", {"bits": bits, "grid": grid},
                       "alpha >= c_(0,1) = pi for injective R^2 -> R")
    return _finish(domain, values, h * math.sqrt(2) / 2, pts, spec,
                   {"injective_on_grid": True, "points": len(pts)})


# --- step functions on [0, 1) ----------------------------------------------

def step_witnesses(monotone: bool, grid: int) -> SampledFunction:
    """x + [x >= 1/2] (monotone) or x + [x < 1/2] (injective, not monotone) on i/grid."""
    if grid < 4 or grid % 2:
        raise InvalidArgument("grid must be an even integer >= 4")
    x = np.arange(grid) / grid
    values = x + (x >= 0.5) if monotone else x + (x < 0.5)
    if len(np.unique(values)) != grid:
        raise ConstructionFailed("step witness is not injective on the grid")
    domain = FiniteMetricSample(x[:, None], "euclidean", resolution=0.5 / grid)
    kind = "monotone-step" if monotone else "nonmonotone-step"
    bound = "alpha = 0 (monotone)" if monotone else "alpha > 0 (not monotone)"
    return _finish(domain, values, 0.5 / grid, np.array([[0.5]]),
                   WitnessSpec(kind, {"grid": grid}, bound), {"injective_on_grid": True})


# --- the one-point Tverberg witness on Delta_2 -----------------------------

def tverberg_one_point(grid: int) -> SampledFunction:
    """f = lambda_1 + 2 lambda_2 on Delta_2, except f = 0.95 at the midpoint of edge 02.

    Without the change the midpoint would share the value 1 with vertex 1,
    which lies in the disjoint face {1}.
    """
    if grid < 10 or grid % 2:
        raise InvalidArgument("grid must be an even integer >= 10")
    base = simplex_grid(2, grid)
    ts = [t for t in edge_cluster_parameters(0.5, coarsest=0.5 / grid) if t != 0.5]
    extra = np.array([[1 - t, 0.0, t] for t in ts])
    pts = np.vstack([base.points, extra])
    car = np.concatenate([base.carriers, np.full(len(extra), bitmask((0, 2)))])
    domain = FiniteMetricSample(pts, "euclidean", carriers=car, resolution=base.resolution)
    values = pts[:, 1] + 2 * pts[:, 2]
    mid = (car == bitmask((0, 2))) & (np.abs(pts[:, 2] - 0.5) == 0)
    if mid.sum() != 1:
        raise ConstructionFailed("edge 02 midpoint missing from the grid")
    values[mid] = 0.95
    # almost 2-injectivity: a vertex never shares a value with its opposite edge
    worst = math.inf
    for v in range(3):
        opp = bitmask([u for u in range(3) if u != v])
        vi = np.flatnonzero(car == bitmask((v,)))
        ei = np.flatnonzero(car == opp)
        gap = float(np.min(np.abs(values[ei] - values[vi[0]])))
        if gap <= SEPARATION_FLOOR:
            raise ConstructionFailed(f"vertex {v} and edge {opp:b} share a value",
                                     witness=(int(vi[0]), int(ei[np.argmin(np.abs(values[ei] - values[vi[0]]))])))
        worst = min(worst, gap)
    spec = WitnessSpec("tverberg-one-point", {"grid": grid},
                       "alpha^(2) >= arccos(-1) = pi (r=2, d=1)")
    return _finish(domain, values, base.resolution, np.array([[0.5, 0.0, 0.5]]), spec,
                   {"almost_2_injective": True, "min_disjoint_value_gap": worst})


# --- a jumpy drawing of K5 ---------------------------------------------------

def _seg_point_dist(p, a, b) -> float:
    ab = b - a
    if not np.any(ab):
        return float(np.linalg.norm(p - a))
    t = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * ab)))


def _cross(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def segment_distance(a, b, c, d) -> float:
    """Euclidean distance between closed plane segments [a,b] and [c,d]."""
    r, s = b - a, d - c
    den = _cross(r, s)
    if den != 0.0:
        t = _cross(c - a, s) / den
        u = _cross(c - a, r) / den
        if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
            return 0.0
    return min(_seg_point_dist(a, c, d), _seg_point_dist(b, c, d),
               _seg_point_dist(c, a, b), _seg_point_dist(d, a, b))


def _line_param(P, Q, A, B) -> tuple[float, float]:
    """Parameters (t, s) with P + t(Q-P) = A + s(B-A)."""
    M = np.column_stack([Q - P, -(B - A)])
    t, s = np.linalg.solve(M, A - P)
    return float(t), float(s)


@dataclass
class _Jump:
    edge: tuple[int, int]
    lo: float
    hi: float
    shift: np.ndarray
    partner_edge: tuple[int, int]
    partner_params: list[float] = field(default_factory=list)


def _k5_geometry(offset: float):
    V = np.array([[math.cos(2 * math.pi * k / 5), math.sin(2 * math.pi * k / 5)] for k in range(5)])
    jumps = {}
    for k in range(5):
        a, b = sorted((k, (k + 2) % 5))
        c, d = sorted(((k + 1) % 5, (k + 3) % 5))
        P, Q = V[a], V[b]
        t_c, _ = _line_param(P, Q, V[c], V[d])
        normal = np.array([-(Q - P)[1], (Q - P)[0]])
        normal /= np.linalg.norm(normal)
        if normal @ (P + Q) < 0:
            normal = -normal  # point away from the center
        shift = offset * normal
        t_s, _ = _line_param(P + shift, Q + shift, V[c], V[d])
        w = abs(t_s - t_c) / 2
        lo, hi = t_c - w, t_c + w
        # the crossing diagonal passes through the midpoint of the jump gap
        t_j = hi if t_s > t_c else lo
        mid = P + t_j * (Q - P) + shift / 2
        s_mid = float((mid - V[c]) @ (V[d] - V[c]) / ((V[d] - V[c]) @ (V[d] - V[c])))
        jumps[(a, b)] = _Jump((a, b), lo, hi, shift, (c, d), [s_mid])
    return V, jumps


def _k5_eval(V, jumps, edge, t) -> np.ndarray:
    a, b = edge
    t = np.asarray(t, dtype=float)
    out = V[a][None, :] + t[:, None] * (V[b] - V[a])[None, :]
    j = jumps.get(edge)
    if j is not None:
        inside = (t >= j.lo) & (t < j.hi)  # left-closed jump interval
        out[inside] += j.shift
    return out


def _k5_pieces(V, jumps):
    pieces = []  # (carrier mask, endpoint a, endpoint b)
    for a, b in itertools.combinations(range(5), 2):
        j = jumps.get((a, b))
        cuts = [(0.0, 1.0, None)] if j is None else [(0.0, j.lo, None), (j.lo, j.hi, j.shift), (j.hi, 1.0, None)]
        for t0, t1, sh in cuts:
            p0 = V[a] + t0 * (V[b] - V[a])
            p1 = V[a] + t1 * (V[b] - V[a])
            if sh is not None:
                p0, p1 = p0 + sh, p1 + sh
            pieces.append((bitmask((a, b)), p0, p1))
    for v in range(5):
        pieces.append((bitmask((v,)), V[v], V[v]))
    return pieces


def k5_jump_drawing(offset: float, grid: int) -> SampledFunction:
    """Drawing of K5 = sk_1(Delta_4) in the plane with five jump discontinuities.

    Vertices sit at the 5th roots of unity and every edge is straight, except
    that each diagonal (k, k+2) is translated by ``offset`` along its outward
    normal on a half-open parameter window around its crossing with
    (k+1, k+3). The window is chosen so the translated piece misses that
    diagonal; the drawing is then almost injective, which is checked exactly
    on the drawn pieces and on the sample.
    """
    if not 0 < offset < 0.05:
        raise InvalidArgument("offset must lie in (0, 0.05)")
    if grid < 10:
        raise InvalidArgument("grid must be at least 10")
    V, jumps = _k5_geometry(offset)

    # exact check on the drawn pieces: closures of pieces on disjoint faces are apart
    pieces = _k5_pieces(V, jumps)
    min_piece = math.inf
    for (m1, a1, b1), (m2, a2, b2) in itertools.combinations(pieces, 2):
        if m1 & m2:
            continue
        dist = segment_distance(a1, b1, a2, b2)
        if dist <= SEPARATION_FLOOR:
            raise ConstructionFailed(f"pieces on faces {m1:b} and {m2:b} meet", witness=(m1, m2))
        min_piece = min(min_piece, dist)

    pts, car, vals, hot = [], [], [], []
    for v in range(5):
        lam = np.zeros(5)
        lam[v] = 1.0
        pts.append(lam[None, :])
        car.append([bitmask((v,))])
        vals.append(V[v][None, :])
    partners: dict[tuple[int, int], list[float]] = {}
    for j in jumps.values():
        partners.setdefault(j.partner_edge, []).extend(j.partner_params)
    for a, b in itertools.combinations(range(5), 2):
        ts = set((np.arange(1, grid) / grid).tolist())
        j = jumps.get((a, b))
        if j is not None:
            for t0 in (j.lo, j.hi):
                ts.update(edge_cluster_parameters(t0))
        for t0 in partners.get((a, b), []):
            ts.update(edge_cluster_parameters(t0))
        t = np.array(sorted(ts))
        lam = np.zeros((len(t), 5))
        lam[:, a] = 1 - t
        lam[:, b] = t
        pts.append(lam)
        car.append(np.full(len(t), bitmask((a, b))))
        vals.append(_k5_eval(V, jumps, (a, b), t))
        if j is not None:
            for t0 in (j.lo, j.hi):
                h = np.zeros(5)
                h[a], h[b] = 1 - t0, t0
                hot.append(h)
    pts = np.vstack(pts)
    car = np.concatenate(car)
    vals = np.vstack(vals)

    # sample check: images of points on disjoint faces stay apart
    groups = {int(m): np.flatnonzero(car == m) for m in np.unique(car)}
    trees = {m: cKDTree(vals[idx]) for m, idx in groups.items()}
    min_sample, worst = math.inf, None
    for m1, m2 in itertools.combinations(groups, 2):
        if m1 & m2:
            continue
        dist, nn = trees[m2].query(vals[groups[m1]])
        k = int(np.argmin(dist))
        if dist[k] < min_sample:
            min_sample = float(dist[k])
            worst = (int(groups[m1][k]), int(groups[m2][nn[k]]))
    if min_sample <= SEPARATION_FLOOR:
        raise ConstructionFailed(f"sample points {worst} on disjoint faces share an image", witness=worst)

    resolution = math.sqrt(2) / (2 * grid)
    domain = FiniteMetricSample(pts, "euclidean", carriers=car, resolution=resolution)
    spec = WitnessSpec("k5-jump", {"offset": offset, "grid": grid},
                       "alpha^(2) >= arccos(-1/2) = 2*pi/3 for almost injective K5 -> R^2")
    verification = {"almost_injective": True, "min_disjoint_piece_distance": min_piece,
                    "min_disjoint_sample_distance": min_sample,
                    "jump_windows": {f"{a}{b}": [j.lo, j.hi] for (a, b), j in sorted(jumps.items())}}
    return _finish(domain, vals, resolution, np.array(hot), spec, verification)


# --- odd maps S^k -> S^n -----------------------------------------------------

def _odd_assignment(x: np.ndarray, n: int) -> np.ndarray:
    """Normalize the first n+1 coordinates; on the singular set use +-e_1,
    signed by the first nonzero remaining coordinate."""
    head = x[:, : n + 1]
    norms = np.linalg.norm(head, axis=1)
    out = np.zeros_like(head)
    ok = norms > 0
    out[ok] = head[ok] / norms[ok, None]
    for i in np.flatnonzero(~ok):
        tail = x[i, n + 1:]
        lead = tail[np.flatnonzero(tail)[0]]
        out[i, 0] = 1.0 if lead > 0 else -1.0
    return out


def equatorial_odd(k: int, n: int, grid: int, seed: int, n_random: int = 2000,
                   n_singular: int = 8) -> SampledFunction:
    """Odd map S^k -> S^n on an antipodally closed sample, dense near the
    singular subsphere {x_0 = ... = x_n = 0}.

    The sample holds ``n_random`` uniform antipodal pairs plus, around each of
    ``n_singular`` antipodal pairs of singular points, rings at geometric
    angular radii 2^-j (j < 12) with ``grid`` directions per ring closed under
    negation.
    """
    if not 0 <= n < k:
        raise InvalidArgument("need 0 <= n < k")
    if grid < 2 or grid % 2:
        raise InvalidArgument("grid (ring directions) must be even and >= 2")
    rng = make_rng(seed, 31)
    rand = rng.standard_normal((n_random, k + 1))
    rand /= np.linalg.norm(rand, axis=1, keepdims=True)
    m = k - n  # singular sphere S^{m-1} in the last m coordinates
    if m == 1:
        sing = np.array([[1.0]])
    else:
        sing = rng.standard_normal((n_singular, m))
        sing /= np.linalg.norm(sing, axis=1, keepdims=True)
    half = grid // 2
    if n == 0:
        dirs = np.array([[1.0]])
    elif n == 1:
        ang = np.pi * np.arange(half) / half
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        dirs = rng.standard_normal((half, n + 1))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    dirs = np.vstack([dirs, -dirs])
    eps = 2.0 ** -np.arange(12)
    rings = []
    hot = []
    for s in sing:
        s_full = np.concatenate([np.zeros(n + 1), s])
        hot.append(s_full)
        rings.append(s_full[None, :])
        for e in eps:
            pts = np.cos(e) * s_full[None, :] + np.sin(e) * np.hstack([dirs, np.zeros((len(dirs), m))])
            rings.append(pts)
    half_sample = np.vstack([rand] + rings)
    x = np.stack([half_sample, -half_sample], axis=1).reshape(-1, k + 1)
    values = _odd_assignment(x, n)
    if not np.array_equal(values[1::2], -values[0::2]):
        raise ConstructionFailed("oddness fails on the sample")
    domain = FiniteMetricSample(x, "sphere-geodesic")
    # Monte Carlo covering estimate of the sample
    probes = rng.standard_normal((4000, k + 1))
    probes /= np.linalg.norm(probes, axis=1, keepdims=True)
    chord, _ = domain._tree.query(probes)
    resolution = float(2 * np.arcsin(np.minimum(1.0, chord.max() / 2)))
    hot = np.array(hot + [-h for h in hot])
    spec = WitnessSpec("equatorial-odd", {"k": k, "n": n, "grid": grid, "seed": seed,
                                          "n_random": n_random, "n_singular": n_singular},
                       f"delta >= c_({n},{k}) for odd S^{k} -> S^{n}")
    return _finish(domain, values, resolution, hot, spec,
                   {"odd_on_sample": True, "antipodal_pairs": len(half_sample)})
