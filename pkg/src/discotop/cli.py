"""Command-line driver and machine-readable reports.

Every subcommand builds an :class:`ExperimentConfig`, runs it through
:func:`run_experiment` and prints the resulting :class:`Report` as JSON or
CSV. The exit status is nonzero iff a mandatory check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import bounds as B
from .complex_core import (
    chain_complex,
    deleted_join2,
    deleted_product,
    loads_complex,
    simplex_skeleton,
)
from .errors import DiscoTopError, InapplicableTheorem
from .homology import betti_numbers, euler_characteristic, is_homology_n_sphere
from .moduli import (
    alpha_hat,
    alpha_r_hat,
    conf2_value_matched,
    deleted_configs,
    delta_hat,
    kappa_r,
    normalization_gap,
    random_piecewise_function,
    SampledFunction,
    simplex_grid,
    verify_lemma_chain,
)
from .rng import PRNG_NAME, make_rng
from .vietoris_rips import (
    VRThreshold,
    ngon_sample,
    pi_fraction,
    projective_sample,
    sphere_sample,
    vr_complex,
)
from . import witnesses as W

SCHEMA = "discotop.report/v1"
ANGLE_SLACK = 0.05
EXPERIMENTS = ("constants", "bound", "homology", "vr", "estimate", "witness",
               "vkf", "tverberg", "sphere-homology", "lemma-suite", "vr-ladder")
SAMPLED = ("lemma-suite",)
CHECK_FIELDS = ("name", "citation", "passed", "value", "bound", "tolerance", "exact", "mandatory", "ladder")


class UsageError(DiscoTopError):
    pass


@dataclass
class Check:
    name: str
    citation: str
    passed: bool
    value: float | None = None
    bound: float | None = None
    tolerance: float | None = None
    exact: bool = True
    mandatory: bool = True
    ladder: list | None = None


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    out: str | None = None
    format: str = "json"

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise UsageError(f"experiment: unknown id {self.experiment!r}")
        if self.format not in ("json", "csv"):
            raise UsageError(f"format: must be json or csv, got {self.format!r}")
        needs_seed = self.experiment in SAMPLED or (
            self.experiment in ("estimate", "witness")
            and self.params.get("kind") == "equatorial-odd")
        if needs_seed and self.seed is None:
            raise UsageError("seed: required for sampled experiments")


@dataclass
class Report:
    experiment: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    schema: str = SCHEMA

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.mandatory)

    def as_dict(self) -> dict:
        return {
            "schema": self.schema,
            "experiment": self.experiment,
            "config": self.config,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "data": self.data,
            "provenance": self.provenance,
            "timing": self.timing,
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def emit_report(rep: Report, fmt: str = "json") -> bytes:
    """Serialize a report. JSON carries everything; CSV has one row per check."""
    if fmt == "json":
        return (json.dumps(_jsonable(rep.as_dict()), indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CHECK_FIELDS)
        for c in rep.checks:
            row = asdict(c)
            row["ladder"] = json.dumps(_jsonable(row["ladder"])) if row["ladder"] is not None else ""
            w.writerow(["" if row[k] is None else (repr(row[k]) if isinstance(row[k], float) else row[k])
                        for k in CHECK_FIELDS])
        return buf.getvalue().encode()
    raise UsageError(f"format: must be json or csv, got {fmt!r}")


def _parse_cell(key: str, text: str):
    if text == "":
        return None
    if key in ("passed", "exact", "mandatory"):
        return text == "True"
    if key in ("value", "bound", "tolerance"):
        return float(text)
    if key == "ladder":
        return json.loads(text)
    return text


def parse_report(data: bytes, fmt: str = "json"):
    """Inverse of :func:`emit_report` (a Report for JSON, a list of Checks for CSV)."""
    text = data.decode()
    if fmt == "json":
        d = json.loads(text)
        if d.get("schema") != SCHEMA:
            raise UsageError(f"schema: expected {SCHEMA}, got {d.get('schema')!r}")
        return Report(d["experiment"], d["config"], [Check(**c) for c in d["checks"]],
                      d["data"], d["provenance"], d["timing"], d["schema"])
    rows = list(csv.DictReader(io.StringIO(text)))
    return [Check(**{k: _parse_cell(k, r[k]) for k in CHECK_FIELDS}) for r in rows]


# --- experiments -------------------------------------------------------------

def _ladder_list(est) -> list:
    return [[r, v] for r, v in est.ladder]


def _constants(cfg: ExperimentConfig, rep: Report) -> None:
    n = int(cfg.params.get("n", 1))
    k_max = int(cfg.params.get("k_max", 9))
    if k_max < n:
        raise UsageError(f"k_max: must be >= n={n}")
    rows = []
    for k in range(n, k_max + 1):
        c = B.c_constant(n, k)
        cover = B.covering_lower_bound(n, k) if k >= 1 else 0.0
        ok = c.exact is None or cover <= c.exact + 1e-12
        rows.append({"n": n, "k": k, "exact": c.exact, "lower": c.lower,
                     "covering_lower": cover, "provenance": list(c.provenance)})
        rep.checks.append(Check(f"c_{{{n},{k}}}", "; ".join(c.provenance), ok, c.best, cover,
                                1e-12, exact=c.exact is not None))
    rep.data["table"] = rows


def _scenario(params: dict):
    name = params.get("scenario")
    if name not in B.SCENARIOS:
        raise UsageError(f"scenario: choose one of {sorted(B.SCENARIOS)}")
    cls = B.SCENARIOS[name]
    kwargs = {}
    for f in cls.__dataclass_fields__:
        if params.get(f) is None:
            raise UsageError(f"{f}: required for scenario {name}")
        kwargs[f] = int(params[f])
    return cls(**kwargs)


def _bound(cfg: ExperimentConfig, rep: Report) -> None:
    s = _scenario(cfg.params)
    try:
        br = B.bound_oracle(s)
    except InapplicableTheorem as e:
        rep.data["inapplicable"] = {"condition": e.condition, "message": str(e)}
        rep.checks.append(Check("theorem applies", str(e), False))
        return
    rep.data["bound"] = br.as_dict()
    rep.checks.append(Check(f"bound on {br.quantity}", br.citation, True, br.bound, None, None, br.exact))


def _complex_from_params(p: dict):
    if p.get("input"):
        return loads_complex(Path(p["input"]).read_text()), f"file {p['input']}"
    kind = p.get("complex", "deleted-join")
    n, d = p.get("n"), p.get("d")
    if kind == "deleted-join":
        d = 1 if d is None else int(d)
        n = 2 * d + 2 if n is None else int(n)
        return deleted_join2(simplex_skeleton(n, d)), f"deleted join of sk_{d}(Delta_{n})"
    if kind == "skeleton":
        if n is None or d is None:
            raise UsageError("n, d: required for a skeleton")
        return simplex_skeleton(int(n), int(d)), f"sk_{d}(Delta_{n})"
    if kind == "deleted-product":
        r = int(p.get("r") or 2)
        if n is None:
            raise UsageError("n: required for a deleted product")
        K = simplex_skeleton(int(n), int(d if d is not None else n))
        return deleted_product(K, r), f"{r}-fold deleted product of sk_{d if d is not None else n}(Delta_{n})"
    raise UsageError(f"complex: unknown kind {kind!r}")


def _homology(cfg: ExperimentConfig, rep: Report) -> None:
    X, label = _complex_from_params(cfg.params)
    C = chain_complex(X)
    b = betti_numbers(C)
    rep.data.update({"complex": label, "f_vector": list(C.counts), "betti": list(b)})
    rep.checks.append(Check("boundary squares to zero", "chain-complex axiom", C.boundary_squared_is_zero()))
    chi = euler_characteristic(C)
    alt = sum((-1) ** k * v for k, v in enumerate(b))
    rep.checks.append(Check("Euler characteristic", "Euler-Poincare formula", chi == alt, float(alt), float(chi)))
    if cfg.params.get("sphere") is not None:
        k = int(cfg.params["sphere"])
        rep.checks.append(Check(f"homology {k}-sphere", "GF(2) Betti numbers of S^k",
                                is_homology_n_sphere(C, k)))


def _parse_threshold(p: dict) -> float:
    if p.get("t_pi"):
        num, _, den = str(p["t_pi"]).partition("/")
        return pi_fraction(int(num), int(den or 1))
    if p.get("t") is None:
        raise UsageError("t: give --t or --t-pi")
    return float(p["t"])


def _vr_sample(p: dict, seed):
    if p.get("ngon"):
        return ngon_sample(int(p["ngon"])), f"regular {p['ngon']}-gon"
    count = int(p.get("count") or 50)
    n = int(p.get("n") or 1)
    s = 0 if seed is None else seed
    if p.get("space") == "projective":
        return projective_sample(n, count, s), f"{count} points of RP^{n}"
    return sphere_sample(n, count, s), f"{count} points of S^{n}"


def _vr(cfg: ExperimentConfig, rep: Report) -> None:
    p = cfg.params
    M, label = _vr_sample(p, cfg.seed)
    t = VRThreshold(_parse_threshold(p), p.get("convention") or "weak")
    max_dim = int(p.get("max_dim") if p.get("max_dim") is not None else 3)
    K = vr_complex(M, t, max_dim)
    b = betti_numbers(K)
    rep.data.update({"sample": label, "threshold": t.value, "convention": t.convention,
                     "max_dim": max_dim, "f_vector": list(K.f_vector()), "betti": list(b),
                     "note": "finite-sample proxy; Betti numbers above max_dim-1 are truncation artifacts"})
    rep.checks.append(Check("clique complex is downward closed", "Vietoris-Rips clique property",
                            K.is_downward_closed()))


WITNESS_DEFAULTS = {
    "digit-interleave": {"bits": 8, "rho": 1 / 256, "sep": 2 / 256, "anchors": 32},
    "k5-jump": {"offset": 0.01, "grid": 400, "rho": 1e-3},
    "tverberg-one-point": {"grid": 20, "rho": 1.5 / 20},
    "equatorial-odd": {"k": 2, "n": 1, "grid": 16, "rho": 0.1},
    "monotone-step": {"grid": 100, "rho": 0.01, "sep": 0.02},
    "nonmonotone-step": {"grid": 100, "rho": 0.01, "sep": 0.02},
}


def build_witness(kind: str, p: dict, seed) -> SampledFunction:
    d = {**WITNESS_DEFAULTS.get(kind, {}), **{k: v for k, v in p.items() if v is not None}}
    if kind == "digit-interleave":
        bits = int(d["bits"])
        return W.digit_interleave(bits, int(d.get("grid") or 2 ** bits))
    if kind == "k5-jump":
        return W.k5_jump_drawing(float(d["offset"]), int(d["grid"]))
    if kind == "tverberg-one-point":
        return W.tverberg_one_point(int(d["grid"]))
    if kind == "equatorial-odd":
        return W.equatorial_odd(int(d["k"]), int(d["n"]), int(d["grid"]), int(seed or 0))
    if kind in ("monotone-step", "nonmonotone-step"):
        return W.step_witnesses(kind == "monotone-step", int(d["grid"]))
    raise UsageError(f"kind: unknown witness {kind!r}")


def measure_witness(kind: str, f: SampledFunction, p: dict, seed):
    """The modulus each witness is built to exhibit, as a ModulusEstimate."""
    d = {**WITNESS_DEFAULTS[kind], **{k: v for k, v in p.items() if v is not None}}
    rho = float(d["rho"])
    ladder = d.get("rho_ladder")
    if kind == "digit-interleave":
        sep = float(d["sep"])
        cs = conf2_value_matched(f, sep, max(ladder or [rho]), int(d["anchors"]))
        return "alpha", alpha_hat(f, rho, sep, configs=cs, ladder=ladder)
    if kind in ("k5-jump", "tverberg-one-point"):
        return "alpha^(2)", alpha_r_hat(f, 2, rho, ladder=ladder)
    if kind == "equatorial-odd":
        return "delta", delta_hat(f, rho, "geodesic", ladder=ladder)
    return "alpha", alpha_hat(f, rho, float(d["sep"]), ladder=ladder)


EXPECTED = {
    "digit-interleave": (math.pi, "c_(0,1) = pi bound for injective R^2 -> R", True),
    "k5-jump": (B.r_constant(1), "quantified van Kampen-Flores at d=1: alpha^(2) >= 2*pi/3", False),
    "tverberg-one-point": (math.pi, "quantified topological Tverberg at r=2, d=1: alpha^(2) >= pi", True),
    "equatorial-odd": (None, "odd maps S^k -> S^n: delta >= c_(n,k)", False),
    "monotone-step": (0.0, "monotone injective functions R -> R have alpha = 0", True),
    "nonmonotone-step": (math.pi, "non-monotone injective functions R -> R have alpha = pi", True),
}


def _witness_checks(kind: str, f: SampledFunction, quantity: str, est, rep: Report) -> None:
    bound, cite, exact = EXPECTED[kind]
    if kind == "equatorial-odd":
        n, k = f.meta["spec"]["params"]["n"], f.meta["spec"]["params"]["k"]
        bound = B.c_constant(n, k).best
    if exact:
        ok = est.value == bound
        tol = 0.0
    else:
        ok = est.value >= bound - ANGLE_SLACK
        tol = ANGLE_SLACK
    rep.checks.append(Check(f"{quantity} of {kind}", cite, bool(ok), est.value, bound, tol,
                            exact=exact, ladder=_ladder_list(est)))


def _witness(cfg: ExperimentConfig, rep: Report) -> None:
    kind = cfg.params.get("kind")
    f = build_witness(kind, cfg.params, cfg.seed)
    rep.data.update({"witness": f.meta, "points": len(f.domain)})
    rep.checks.append(Check("construction verified", f.meta["spec"]["expected_bound"], True))
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{kind}.csv").write_text(f.to_csv())
        (out / f"{kind}.json").write_text(W.sidecar_json(f))
        rep.data["files"] = [f"{kind}.csv", f"{kind}.json"]


def _estimate(cfg: ExperimentConfig, rep: Report) -> None:
    kind = cfg.params.get("kind")
    f = build_witness(kind, cfg.params, cfg.seed)
    quantity, est = measure_witness(kind, f, cfg.params, cfg.seed)
    rep.data.update({"estimate": est.as_dict(), "quantity": quantity,
                     "configuration_metric": "max of coordinate distances"})
    _witness_checks(kind, f, quantity, est, rep)


def _vkf(cfg: ExperimentConfig, rep: Report) -> None:
    d = int(cfg.params.get("d") or 1)
    if d < 1:
        raise UsageError("d: must be >= 1")
    J = deleted_join2(simplex_skeleton(2 * d + 2, d))
    C = chain_complex(J)
    b = betti_numbers(C)
    rep.data.update({"f_vector": list(C.counts), "betti": list(b)})
    rep.checks.append(Check(f"deleted join of sk_{d}(Delta_{2 * d + 2}) is a homology {2 * d + 1}-sphere",
                            "deleted join of sk_d(Delta_{2d+2}) is a (2d+1)-sphere",
                            is_homology_n_sphere(C, 2 * d + 1)))
    br = B.bound_oracle(B.VanKampenFlores(d))
    rep.data["bound"] = br.as_dict()
    if d == 1:
        f = build_witness("k5-jump", cfg.params, cfg.seed)
        _, est = measure_witness("k5-jump", f, cfg.params, cfg.seed)
        rep.data["witness"] = f.meta
        rep.checks.append(Check("k5 witness almost injective", "almost injectivity on disjoint faces",
                                bool(f.meta["verification"]["almost_injective"])))
        rep.checks.append(Check("alpha^(2) of k5 witness", br.citation, est.value >= br.bound - ANGLE_SLACK,
                                est.value, br.bound, ANGLE_SLACK, exact=False, ladder=_ladder_list(est)))
    else:
        rep.data["witness"] = "no witness construction for d > 1"


def _tverberg(cfg: ExperimentConfig, rep: Report) -> None:
    r = int(cfg.params.get("r") or 2)
    d = int(cfg.params.get("d") or 1)
    try:
        br = B.bound_oracle(B.Tverberg(r, d))
    except InapplicableTheorem as e:
        rep.checks.append(Check("theorem applies", str(e), False))
        return
    rep.data["bound"] = br.as_dict()
    ratio = B.bound_oracle(B.TverbergKappaDelta(r, d))
    rep.data["delta_over_kappa_bound"] = ratio.as_dict()
    N = (r - 1) * (d + 1)
    if N <= 6 and r <= 3:
        X = deleted_product(simplex_skeleton(N, N), r)
        rep.checks.append(Check(f"Conf_{r}(Delta_{N}) has dimension (r-1)d", "dimension of the r-fold deleted product",
                                X.dim == (r - 1) * d, float(X.dim), float((r - 1) * d)))
    if (r, d) == (2, 1):
        f = build_witness("tverberg-one-point", cfg.params, cfg.seed)
        _, est = measure_witness("tverberg-one-point", f, cfg.params, cfg.seed)
        rep.data["witness"] = f.meta
        rep.checks.append(Check("alpha^(2) of one-point witness", br.citation, est.value == br.bound,
                                est.value, br.bound, 0.0, ladder=_ladder_list(est)))
        cs = deleted_configs(f.domain, 2)
        k = kappa_r(f, 2, cs)
        dl = delta_hat(f, float(WITNESS_DEFAULTS["tverberg-one-point"]["rho"]))
        # the theorem concerns the true moduli; on a sample this is informational
        rep.checks.append(Check("delta >= ratio * kappa^(2)", ratio.citation,
                                dl.value >= ratio.bound * k, dl.value, ratio.bound * k, 0.0,
                                exact=False, mandatory=False, ladder=_ladder_list(dl)))
    else:
        rep.data["witness"] = "no witness construction for these parameters"


def _sphere_homology(cfg: ExperimentConfig, rep: Report) -> None:
    d = int(cfg.params.get("d") or 1)
    t0 = time.perf_counter()
    J = deleted_join2(simplex_skeleton(2 * d + 2, d))
    C = chain_complex(J)
    b = betti_numbers(C)
    rep.data.update({"d": d, "f_vector": list(C.counts), "betti": list(b)})
    rep.timing["homology_seconds"] = time.perf_counter() - t0
    rep.checks.append(Check(f"homology {2 * d + 1}-sphere", "deleted join of sk_d(Delta_{2d+2}) is a (2d+1)-sphere",
                            is_homology_n_sphere(C, 2 * d + 1)))


def _vr_ladder(cfg: ExperimentConfig, rep: Report) -> None:
    n = int(cfg.params.get("ngon") or cfg.params.get("n") or 6)
    max_dim = int(cfg.params.get("max_dim") if cfg.params.get("max_dim") is not None else 3)
    M = ngon_sample(n)
    rows, prev = [], None
    monotone = nested = True
    for k in range(1, n // 2 + 1):
        t = pi_fraction(2 * k, n)
        weak = vr_complex(M, VRThreshold(t, "weak"), max_dim)
        strict = vr_complex(M, VRThreshold(t, "strict"), max_dim)
        nested &= set(strict.faces) <= set(weak.faces)
        if prev is not None:
            monotone &= set(prev.faces) <= set(weak.faces)
        prev = weak
        rows.append({"k": k, "threshold": t, "weak_betti": list(betti_numbers(weak)),
                     "strict_betti": list(betti_numbers(strict))})
    rep.data.update({"ngon": n, "ladder": rows, "note": "finite n-gon proxy for VR(S^1)"})
    rep.checks.append(Check("VR complexes increase with the threshold", "monotonicity of VR filtrations", monotone))
    rep.checks.append(Check("strict complex inside weak complex", "strict VR is a subcomplex of weak VR", nested))


def lemma_suite(seed: int, n_functions: int = 100, grid: int = 12, r: int = 2, d: int = 2,
                n_pairs: int = 100_000) -> dict:
    """Sample-level checks of the normalization and modulus lemmas on random
    piecewise functions Delta_2 -> R^d."""
    dom = simplex_grid(2, grid)
    rho = 2.0 / grid
    cs = deleted_configs(dom, r)
    counts = {"normalization": 0, "product_modulus": 0, "kappa_identity": 0, "angle_modulus": 0,
              "modulus_bound": 0}
    worst_identity = 0.0
    per_function = []
    for i in range(n_functions):
        vals = random_piecewise_function(dom, d, seed, stream=1000 + i)
        f = SampledFunction(dom, vals, dom.resolution)
        res = verify_lemma_chain(f, r, rho, configs=cs)
        for c in res["checks"]:
            if not c.passed:
                counts[c.name] += 1
            if c.name == "kappa_identity":
                worst_identity = max(worst_identity, abs(c.lhs - c.rhs))
        per_function.append([res["delta_f"].value, res["alpha_r"].value, res["kappa_r"]])
    rng = make_rng(seed, 7)
    dim = r * d
    X = rng.standard_normal((n_pairs, dim)) * np.exp(rng.uniform(-3, 3, (n_pairs, 1)))
    Y = rng.standard_normal((n_pairs, dim)) * np.exp(rng.uniform(-3, 3, (n_pairs, 1)))
    gaps = normalization_gap(X, Y)
    random_violations = int(np.sum(gaps < -1e-9))
    return {"functions": n_functions, "grid": grid, "rho": rho, "configurations": len(cs),
            "violations": counts, "random_pairs": n_pairs, "random_pair_violations": random_violations,
            "worst_random_gap": float(gaps.min()), "worst_kappa_identity_error": worst_identity,
            "per_function": per_function}


def _lemma_suite(cfg: ExperimentConfig, rep: Report) -> None:
    n_functions = int(cfg.params.get("n_functions") or 100)
    grid = int(cfg.params.get("grid") or 12)
    res = lemma_suite(cfg.seed, n_functions, grid)
    rep.data.update(res)
    v = res["violations"]
    rep.checks += [
        Check("normalization inequality", "effect of normalization on distances (tolerance 1e-9)",
              v["normalization"] == 0 and res["random_pair_violations"] == 0,
              float(v["normalization"] + res["random_pair_violations"]), 0.0, 1e-9),
        Check("delta(Conf) <= sqrt(r) delta(f)", "modulus of the centered tuple map",
              v["product_modulus"] == 0, float(v["product_modulus"]), 0.0, 0.0),
        Check("sqrt(2) kappa(Conf) = sqrt(r) kappa^(r)", "kappa identity for centered tuples",
              v["kappa_identity"] == 0, res["worst_kappa_identity_error"], 0.0, 1e-9),
        Check("2 sin(alpha/2) kappa(Conf) <= delta(Conf)", "modulus after normalization",
              v["angle_modulus"] == 0, float(v["angle_modulus"]), 0.0, 0.0),
        Check("delta(f) >= sqrt(2) sin(alpha^(r)/2) kappa^(r)", "modulus bound via kappa^(r)",
              v["modulus_bound"] == 0, float(v["modulus_bound"]), 0.0, 0.0),
    ]


RUNNERS = {
    "constants": _constants, "bound": _bound, "homology": _homology, "vr": _vr,
    "estimate": _estimate, "witness": _witness, "vkf": _vkf, "tverberg": _tverberg,
    "sphere-homology": _sphere_homology, "lemma-suite": _lemma_suite, "vr-ladder": _vr_ladder,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    cfg.validate()
    config_echo = {"experiment": cfg.experiment, "params": _jsonable(cfg.params), "seed": cfg.seed}
    rep = Report(cfg.experiment, config_echo,
                 provenance={"seed": cfg.seed, "version": __version__, "prng": PRNG_NAME})
    t0 = time.perf_counter()
    try:
        RUNNERS[cfg.experiment](cfg, rep)
    except UsageError:
        raise
    except DiscoTopError as e:
        rep.checks.append(Check(f"{cfg.experiment} completed", f"{type(e).__name__}: {e}", False))
    rep.timing["wall_seconds"] = time.perf_counter() - t0
    return rep


# --- argument parsing ----------------------------------------------------------

def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--rho-ladder", type=_floats, help="comma-separated radii")
    p.add_argument("--rho", type=float)
    p.add_argument("--sep", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--config", help="JSON file of parameters; flags override it")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="discotop", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="table of c_{n,k}")
    _add_common(p)
    p.add_argument("--k-max", type=int)

    p = sub.add_parser("bound", help="theorem-backed lower bound for a scenario")
    _add_common(p)
    p.add_argument("--scenario", choices=sorted(B.SCENARIOS))
    p.add_argument("--k-plus-1", type=int)

    p = sub.add_parser("homology", help="GF(2) Betti numbers of a complex")
    _add_common(p)
    p.add_argument("--complex", choices=("skeleton", "deleted-join", "deleted-product"))
    p.add_argument("--input", help="complex in the discotop text format")
    p.add_argument("--sphere", type=int, help="also test for a homology k-sphere")

    p = sub.add_parser("vr", help="Vietoris-Rips complex of a sample")
    _add_common(p)
    p.add_argument("--ngon", type=int)
    p.add_argument("--space", choices=("sphere", "projective"))
    p.add_argument("--count", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--t-pi", help="threshold as a multiple of pi, e.g. 2/3")
    p.add_argument("--convention", choices=("weak", "strict"))
    p.add_argument("--max-dim", type=int)

    for name, hlp in (("estimate", "measure a witness's modulus"), ("witness", "build and export a witness")):
        p = sub.add_parser(name, help=hlp)
        _add_common(p)
        p.add_argument("--kind", choices=W.WITNESS_KINDS, required=False)
        p.add_argument("--bits", type=int)
        p.add_argument("--offset", type=float)
        p.add_argument("--anchors", type=int)

    p = sub.add_parser("experiment", help="run a named experiment")
    p.add_argument("name", choices=("vkf", "tverberg", "sphere-homology", "lemma-suite", "vr-ladder"))
    _add_common(p)
    p.add_argument("--n-functions", type=int)
    p.add_argument("--ngon", type=int)
    p.add_argument("--max-dim", type=int)
    return ap


NON_PARAMS = ("command", "name", "config", "seed", "out", "format")


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    file_cfg: dict = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"config: cannot read {args.config}: {e}") from e
        if not isinstance(file_cfg, dict):
            raise UsageError("config: top level must be an object")
    flags = {k: v for k, v in vars(args).items() if v is not None}
    merged = {**{k.replace("-", "_"): v for k, v in file_cfg.items()}, **flags}
    experiment = args.name if args.command == "experiment" else args.command
    params = {k: v for k, v in merged.items() if k not in NON_PARAMS}
    if "rho_ladder" in params and "rho" not in params:
        params["rho"] = max(params["rho_ladder"])
    return ExperimentConfig(experiment, params, merged.get("seed"), merged.get("out"),
                            merged.get("format", "json"))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        rep = run_experiment(cfg)
        payload = emit_report(rep, cfg.format)
    except UsageError as e:
        print(f"discotop: usage error: {e}", file=sys.stderr)
        return 2
    if cfg.out and cfg.experiment != "witness":
        path = Path(cfg.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return 0 if rep.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
