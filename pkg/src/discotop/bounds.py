"""Angle constants and the scenario-to-bound oracle.

``r_constant(n)`` is the geodesic edge length of a regular (n+1)-simplex
inscribed in S^n. ``c_constant(n, k)`` is the least VR scale admitting an odd
map from S^k; it is known exactly in a few families and otherwise bounded
below by monotonicity in k and by covering radii of projective space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import InapplicableTheorem, InvalidArgument
from .rng import make_rng

# Citation tags. Reports carry these strings; they name facts, not documents.
CITE_SIMPLEX = "regular-simplex diameter r_n = arccos(-1/(n+1))"
CITE_C_DIAG = "c_{n,n} = 0"
CITE_C_NEXT = "c_{n,n+1} = c_{n,n+2} = r_n"
CITE_C_CIRCLE = "c_{1,2j} = c_{1,2j+1} = 2*pi*j/(2j+1)"
CITE_C_MONO = "c_{n,k} nondecreasing in k"
CITE_C_COVER = "c_{n,k} >= pi - 2*cov_RP^n(k)"


def r_constant(n: int) -> float:
    if n < 0:
        raise InvalidArgument("n must be nonnegative")
    return math.acos(-1.0 / (n + 1))


@dataclass(frozen=True)
class ConstantValue:
    lower: float
    exact: float | None = None
    upper: float | None = None
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        if self.exact is not None and self.lower > self.exact:
            raise InvalidArgument("lower bound exceeds exact value")
        if self.upper is not None and self.upper < max(self.lower, self.exact or self.lower):
            raise InvalidArgument("upper bound below lower bound")

    @property
    def best(self) -> float:
        return self.exact if self.exact is not None else self.lower

    def as_dict(self) -> dict:
        return {"exact": self.exact, "lower": self.lower, "upper": self.upper,
                "provenance": list(self.provenance)}


# --- covering radii of projective space ----------------------------------

def _circle_cover(k: int, budget: int, seed: int) -> list[float]:
    """Covering radii of RP^1 (circle of circumference pi) for 1..k points.

    Points start from farthest-point insertion (first point at angle 0) and
    are relaxed halfway towards the midpoint of their neighbours; the damping
    makes every non-uniform gap pattern decay. The covering radius of a
    configuration is half its largest gap. The circle is homogeneous, so the
    seed is not needed.
    """
    L = math.pi
    pts = [0.0]
    out = []
    for m in range(1, k + 1):
        if m > 1:
            s = sorted(pts)
            gaps = [(s[(i + 1) % len(s)] - s[i]) % L or L for i in range(len(s))]
            i = int(np.argmax(gaps))
            pts.append((s[i] + gaps[i] / 2) % L)
        a = np.sort(np.array(pts))
        for _ in range(budget):
            prev = np.roll(a, 1)
            prev[0] -= L
            nxt = np.roll(a, -1)
            nxt[-1] += L
            new = 0.5 * a + 0.25 * (prev + nxt)
            if np.max(np.abs(new - a)) < 1e-15:
                break
            a = np.sort(new % L)
        gaps = np.diff(np.concatenate([a, [a[0] + L]]))
        out.append(float(np.max(gaps)) / 2)
        pts = list(a)
    return out


def _cube_surface_grid(n: int, h_steps: int) -> tuple[np.ndarray, float]:
    """Radial projections of a grid on the surface of [-1,1]^{n+1}, one per
    antipodal class, with the geodesic mesh bound of the projection."""
    dim = n + 1
    ticks = np.linspace(-1.0, 1.0, h_steps + 1)
    h = 2.0 / h_steps
    faces = []
    for axis in range(dim):
        grids = np.meshgrid(*([ticks] * n), indexing="ij")
        rest = np.stack([g.ravel() for g in grids], axis=1) if n else np.zeros((1, 0))
        face = np.insert(rest, axis, 1.0, axis=1)  # the +1 face; -1 is antipodal
        faces.append(face)
    pts = np.unique(np.vstack(faces), axis=0)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    # radial projection onto the sphere is 1-Lipschitz from outside the ball
    mesh = 2.0 * math.asin(min(1.0, h * math.sqrt(n) / 4.0))
    return pts, mesh


def _proj_dist(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    c = np.abs(A @ B.T)
    return np.arccos(np.clip(c, 0.0, 1.0))


def _sphere_cover(n: int, k: int, budget: int, seed: int, h_steps: int) -> list[float]:
    P, mesh = _cube_surface_grid(n, h_steps)
    rng = make_rng(seed, 22)
    centers = [P[int(rng.integers(len(P)))]]
    dmin = _proj_dist(P, np.array(centers))[:, 0]
    out = []
    for m in range(1, k + 1):
        if m > 1:
            centers.append(P[int(np.argmax(dmin))])
        C = np.array(centers)
        best = float(np.max(np.min(_proj_dist(P, C), axis=1)))
        for _ in range(budget):
            D = _proj_dist(P, C)
            owner = np.argmin(D, axis=1)
            moved = C.copy()
            for j in range(len(C)):
                cell = P[owner == j]
                if len(cell) == 0:
                    continue
                # step the center towards the farthest point of its cell
                far = cell[int(np.argmax(_proj_dist(cell, C[j:j + 1])[:, 0]))]
                if far @ C[j] < 0:
                    far = -far
                v = C[j] + 0.25 * (far - C[j])
                moved[j] = v / np.linalg.norm(v)
            val = float(np.max(np.min(_proj_dist(P, moved), axis=1)))
            if val < best:
                best, C = val, moved
            else:
                break
        centers = list(C)
        dmin = np.min(_proj_dist(P, C), axis=1)
        out.append(min(math.pi / 2, best + mesh))
    return out


@lru_cache(maxsize=64)
def _cover_chain(n: int, k: int, budget: int, seed: int) -> tuple[float, ...]:
    if n == 0:
        return (0.0,) * k
    if n == 1:
        raw = _circle_cover(k, budget, seed)
    else:
        raw = _sphere_cover(n, k, budget, seed, h_steps=max(8, int(round(64 / n))))
    # a (k+1)-point cover may reuse a k-point cover, so take running minima
    return tuple(np.minimum.accumulate(np.array(raw)).tolist())


def cov_upper(n: int, k: int, budget: int = 2000, seed: int = 0) -> float:
    """Upper bound on the k-point covering radius of RP^n (quotient metric).

    Exact up to rounding for n = 1; for n >= 2 the sampled covering radius is
    inflated by the sample's mesh bound so the result stays an upper bound.
    """
    if k < 1:
        raise InvalidArgument("k must be at least 1")
    if n < 0:
        raise InvalidArgument("n must be nonnegative")
    return _cover_chain(n, k, budget, seed)[k - 1]


def covering_lower_bound(n: int, k: int, budget: int = 2000, seed: int = 0) -> float:
    return max(0.0, math.pi - 2.0 * cov_upper(n, k, budget, seed))


def c_constant(n: int, k: int, budget: int = 2000, seed: int = 0) -> ConstantValue:
    if n < 0 or k < n:
        raise InvalidArgument(f"c_constant needs 0 <= n <= k, got n={n}, k={k}")
    if k == n:
        return ConstantValue(0.0, 0.0, provenance=(CITE_C_DIAG,))
    if n == 1:
        # evaluated from the circle formula even for k = 2, 3, where it agrees
        # with r_1 = arccos(-1/2) only up to one ulp
        j = k // 2
        v = 2 * math.pi * j / (2 * j + 1)
        prov = (CITE_C_CIRCLE, CITE_C_NEXT) if k <= 3 else (CITE_C_CIRCLE,)
        return ConstantValue(v, v, provenance=prov)
    if k <= n + 2:
        v = r_constant(n)
        return ConstantValue(v, v, provenance=(CITE_C_NEXT, CITE_SIMPLEX))
    mono = r_constant(n)
    cover = covering_lower_bound(n, k, budget, seed)
    prov = [CITE_C_MONO, CITE_SIMPLEX] if mono >= cover else [CITE_C_COVER]
    return ConstantValue(max(mono, cover), provenance=tuple(prov))


def is_prime_power(r: int) -> bool:
    if r < 2:
        raise InvalidArgument("prime-power test needs r >= 2")
    p = 2
    while p * p <= r:
        if r % p == 0:
            while r % p == 0:
                r //= p
            return r == 1
        p += 1
    return True


# --- scenarios -------------------------------------------------------------

@dataclass(frozen=True)
class GeneralConf2:
    """Injective X -> R^d where Conf_2(X) admits no Z/2-map to S^{d-1} (caller's assumption)."""
    d: int


@dataclass(frozen=True)
class HaefligerWeber:
    """Non-embeddable n-manifold or n-complex into R^d in the metastable range."""
    n: int
    d: int


@dataclass(frozen=True)
class ProjectivePowerOfTwo:
    """Injective RP^(2^k) -> R^(2^(k+1)-1)."""
    k: int


@dataclass(frozen=True)
class SphereToEuclidean:
    k: int
    d: int


@dataclass(frozen=True)
class EuclideanToEuclidean:
    k_plus_1: int
    d: int


@dataclass(frozen=True)
class VanKampenFlores:
    """Almost injective sk_d(Delta_{2d+2}) -> R^{2d}."""
    d: int


@dataclass(frozen=True)
class Tverberg:
    """Almost r-injective Delta_{(r-1)(d+1)} -> R^d."""
    r: int
    d: int


@dataclass(frozen=True)
class TverbergKappaDelta:
    r: int
    d: int


Scenario = Union[GeneralConf2, HaefligerWeber, ProjectivePowerOfTwo, SphereToEuclidean,
                 EuclideanToEuclidean, VanKampenFlores, Tverberg, TverbergKappaDelta]

SCENARIOS = {
    "general-conf2": GeneralConf2,
    "haefliger-weber": HaefligerWeber,
    "projective-power-of-two": ProjectivePowerOfTwo,
    "sphere-to-euclidean": SphereToEuclidean,
    "euclidean-to-euclidean": EuclideanToEuclidean,
    "van-kampen-flores": VanKampenFlores,
    "tverberg": Tverberg,
    "tverberg-kappa-delta": TverbergKappaDelta,
}


@dataclass(frozen=True)
class BoundReport:
    bound: float
    quantity: str
    citation: str
    conditions: tuple[tuple[str, bool], ...]
    exact: bool = True
    notes: tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "bound": self.bound,
            "quantity": self.quantity,
            "citation": self.citation,
            "conditions": [{"condition": c, "passed": ok} for c, ok in self.conditions],
            "exact": self.exact,
            "notes": list(self.notes),
        }


def _require(conditions: list[tuple[str, bool]], citation: str) -> tuple[tuple[str, bool], ...]:
    for name, ok in conditions:
        if not ok:
            raise InapplicableTheorem(f"{citation}: condition '{name}' fails", condition=name)
    return tuple(conditions)


def _prime_power_condition(r: int) -> tuple[str, bool]:
    return (f"r={r} is a prime power", r >= 2 and is_prime_power(r))


def bound_oracle(s: Scenario) -> BoundReport:
    """Lower bound implied by the theorem matching the scenario.

    Raises InapplicableTheorem naming the first failing condition.
    """
    if isinstance(s, GeneralConf2):
        cite = "quantified Z/2-obstruction bound: alpha >= arccos(-1/d)"
        conds = _require([(f"d={s.d} >= 1", s.d >= 1)], cite)
        return BoundReport(r_constant(s.d - 1), "alpha", cite, conds,
                           notes=("assumes no Z/2-map Conf_2(X) -> S^{d-1}",))
    if isinstance(s, HaefligerWeber):
        cite = "quantified Haefliger-Weber: alpha >= arccos(-1/d)"
        conds = _require([
            (f"n={s.n} >= 0", s.n >= 0),
            (f"d={s.d} > 3(n+1)/2", 2 * s.d > 3 * (s.n + 1)),
        ], cite)
        return BoundReport(r_constant(s.d - 1), "alpha", cite, conds,
                           notes=("assumes X has no smooth/linear embedding in R^d",))
    if isinstance(s, ProjectivePowerOfTwo):
        cite = "projective spaces RP^(2^k) -> R^(2^(k+1)-1): alpha >= r_(2^(k+1)-2)"
        conds = _require([(f"k={s.k} >= 0", s.k >= 0)], cite)
        return BoundReport(r_constant(2 ** (s.k + 1) - 2), "alpha", cite, conds)
    if isinstance(s, (SphereToEuclidean, EuclideanToEuclidean)):
        k = s.k if isinstance(s, SphereToEuclidean) else s.k_plus_1 - 1
        src = f"S^{k}" if isinstance(s, SphereToEuclidean) else f"R^{k + 1}"
        cite = f"{src} -> R^d via coindex: alpha >= c_(d-1,k)"
        conds = _require([(f"d={s.d} >= 1", s.d >= 1), (f"k={k} >= d-1={s.d - 1}", k >= s.d - 1)], cite)
        c = c_constant(s.d - 1, k)
        notes = () if c.exact is not None else ("c_(d-1,k) not known exactly; lower bound used",)
        return BoundReport(c.best, "alpha", cite, conds, exact=c.exact is not None,
                           notes=notes + c.provenance)
    if isinstance(s, VanKampenFlores):
        cite = "quantified van Kampen-Flores: alpha^(2) >= arccos(-1/(2d))"
        conds = _require([(f"d={s.d} >= 1", s.d >= 1)], cite)
        return BoundReport(r_constant(2 * s.d - 1), "alpha^(2)", cite, conds)
    if isinstance(s, Tverberg):
        cite = "quantified topological Tverberg: alpha^(r) >= arccos(-1/(d(r-1)))"
        conds = _require([(f"d={s.d} >= 1", s.d >= 1), (f"r={s.r} >= 2", s.r >= 2),
                          _prime_power_condition(s.r)], cite)
        return BoundReport(math.acos(-1.0 / (s.d * (s.r - 1))), f"alpha^({s.r})", cite, conds)
    if isinstance(s, TverbergKappaDelta):
        cite = "Tverberg discontinuity ratio: delta >= kappa^(r) * sqrt(1 + 1/(d(r-1)))"
        conds = _require([(f"d={s.d} >= 1", s.d >= 1), (f"r={s.r} >= 2", s.r >= 2),
                          _prime_power_condition(s.r)], cite)
        return BoundReport(math.sqrt(1.0 + 1.0 / (s.d * (s.r - 1))), f"delta/kappa^({s.r})", cite, conds)
    raise InvalidArgument(f"unknown scenario {s!r}")
