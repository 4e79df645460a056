from __future__ import annotations

import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discotop.errors import InvalidArgument
from discotop.moduli import (
    alpha_hat,
    alpha_r_hat,
    conf2_value_matched,
    deleted_configs,
    delta_hat,
    kappa_r,
)
from discotop.rng import make_rng
from discotop.witnesses import (
    WitnessSpec,
    digit_interleave,
    equatorial_odd,
    k5_jump_drawing,
    segment_distance,
    sidecar_json,
    step_witnesses,
    tverberg_one_point,
)


def disjoint_value_gap(f) -> float:
    """Brute-force min distance between images of points on disjoint faces."""
    car = f.domain.carriers
    best = math.inf
    for i in range(len(car)):
        other = np.flatnonzero((car & car[i]) == 0)
        if len(other):
            best = min(best, float(np.min(np.linalg.norm(f.values[other] - f.values[i], axis=1))))
    return best


# --- digit interleaving ------------------------------------------------------

def test_digit_interleave_bits_1():
    f = digit_interleave(1, 2)
    table = {tuple(p): v for p, v in zip(f.domain.points.tolist(), f.values[:, 0].tolist())}
    assert table[(0.0, 0.0)] == 0.0
    assert table[(0.5, 0.0)] == 0.25
    assert table[(0.0, 0.5)] == 0.5


@pytest.mark.parametrize("bits", range(1, 11))
def test_digit_interleave_injective(bits):
    f = digit_interleave(bits, 2 ** bits)
    assert len(np.unique(f.values)) == 4 ** bits
    assert f.values.min() >= 0 and f.values.max() < 1


def test_digit_interleave_matches_string_interleaving():
    bits = 4
    f = digit_interleave(bits, 16)
    for (x, y), v in zip(f.domain.points, f.values[:, 0]):
        xs = format(int(x * 16), "04b")
        ys = format(int(y * 16), "04b")
        digits = "".join(a + b for a, b in zip(ys, xs))
        assert v == int(digits, 2) / 4 ** bits


def test_digit_interleave_grid_must_match():
    with pytest.raises(InvalidArgument):
        digit_interleave(3, 10)


def test_digit_interleave_alpha_is_pi_small():
    f = digit_interleave(5, 32)
    rho = 1 / 32
    c = conf2_value_matched(f, 2 * rho, rho)
    assert alpha_hat(f, rho, 2 * rho, configs=c, ladder=[rho]).value == math.pi


# --- steps ---------------------------------------------------------------------

@pytest.mark.parametrize("monotone", [True, False])
def test_steps_are_injective(monotone):
    f = step_witnesses(monotone, 100)
    assert len(np.unique(f.values)) == 100


def test_step_moduli():
    g = 100
    mono, non = step_witnesses(True, g), step_witnesses(False, g)
    assert alpha_hat(mono, 1 / g, 2 / g, ladder=[1 / g]).value == 0.0
    assert alpha_hat(non, 1 / g, 2 / g, ladder=[1 / g]).value == math.pi
    # a ball straddling the jump sees the step plus two grid increments
    assert delta_hat(mono, 1 / g, ladder=[1 / g]).value == pytest.approx(1 + 2 / g, abs=1e-12)


def test_step_grid_validation():
    with pytest.raises(InvalidArgument):
        step_witnesses(True, 7)


# --- Tverberg one-point witness -----------------------------------------------

def test_tverberg_witness_is_almost_2_injective():
    f = tverberg_one_point(20)
    assert disjoint_value_gap(f) > 0
    assert f.meta["verification"]["min_disjoint_value_gap"] == pytest.approx(disjoint_value_gap(f), abs=1e-15)


def test_tverberg_witness_values():
    f = tverberg_one_point(20)
    pts, v = f.domain.points, f.values[:, 0]
    verts = [int(np.flatnonzero(np.all(pts == np.eye(3)[k], axis=1))[0]) for k in range(3)]
    assert v[verts].tolist() == [0.0, 1.0, 2.0]
    mid = np.flatnonzero(np.all(pts == [0.5, 0.0, 0.5], axis=1))
    assert v[mid].tolist() == [0.95]
    others = np.ones(len(v), dtype=bool)
    others[mid] = False
    assert np.allclose(v[others], pts[others, 1] + 2 * pts[others, 2], atol=1e-15)


def test_tverberg_sign_flip_configurations():
    # (0.5 -+ 1/grid on edge 02, vertex 1): values 1 -+ 2/grid against 1
    grid = 20
    f = tverberg_one_point(grid)
    pts, v = f.domain.points, f.values[:, 0]
    v1 = int(np.flatnonzero(np.all(pts == [0, 1, 0], axis=1))[0])
    for t, sign in ((0.5 - 1 / grid, -1.0), (0.5 + 1 / grid, 1.0)):
        i = int(np.argmin(np.linalg.norm(pts - [1 - t, 0, t], axis=1)))
        assert np.sign(v[i] - v[v1]) == sign


def test_tverberg_alpha_is_pi():
    f = tverberg_one_point(20)
    assert alpha_r_hat(f, 2, 2 / 20).value == math.pi


def test_tverberg_delta_ladder_tends_to_jump():
    f = tverberg_one_point(20)
    est = delta_hat(f, 1e-5, ladder=[1e-5, 1e-4, 1e-3])
    assert est.value == pytest.approx(0.05, abs=1e-4)


def test_tverberg_grid_validation():
    with pytest.raises(InvalidArgument):
        tverberg_one_point(8)


# --- K5 --------------------------------------------------------------------------

def test_segment_distance_against_sampling():
    rng = make_rng(0)
    s = np.linspace(0, 1, 401)
    for _ in range(20):
        a, b, c, d = rng.random((4, 2))
        P = a + s[:, None] * (b - a)
        Q = c + s[:, None] * (d - c)
        brute = np.min(np.linalg.norm(P[:, None] - Q[None], axis=2))
        exact = segment_distance(a, b, c, d)
        assert exact <= brute + 1e-12
        assert brute - exact <= 2 * max(np.linalg.norm(b - a), np.linalg.norm(d - c)) / 400


def test_k5_drawing_is_almost_injective():
    f = k5_jump_drawing(0.01, 40)
    gap = disjoint_value_gap(f)
    assert gap > 0
    assert f.meta["verification"]["min_disjoint_sample_distance"] == pytest.approx(gap, abs=1e-15)
    assert f.meta["verification"]["min_disjoint_piece_distance"] <= gap + 1e-15
    assert len(f.hot_spots) == 10


def test_k5_drawing_structure():
    f = k5_jump_drawing(0.01, 40)
    car = f.domain.carriers
    assert set(np.unique(car).tolist()) == {1 << v for v in range(5)} | {
        (1 << a) | (1 << b) for a, b in itertools.combinations(range(5), 2)}
    # hull edges (k, k+1) are undisturbed straight segments
    V = np.array([[math.cos(2 * math.pi * k / 5), math.sin(2 * math.pi * k / 5)] for k in range(5)])
    for k in range(5):
        a, b = sorted((k, (k + 1) % 5))
        idx = np.flatnonzero(car == (1 << a) | (1 << b))
        lam = f.domain.points[idx]
        assert np.allclose(f.values[idx], lam[:, [a]] * V[a] + lam[:, [b]] * V[b], atol=1e-14)


def test_k5_kappa_positive_on_full_sample():
    f = k5_jump_drawing(0.01, 30)
    assert kappa_r(f, 2, deleted_configs(f.domain, 2)) > 0


def test_k5_offset_validation():
    with pytest.raises(InvalidArgument):
        k5_jump_drawing(0.08, 100)


# --- equatorial odd maps ------------------------------------------------------------

def test_equatorial_is_odd_and_unit():
    f = equatorial_odd(2, 1, 16, seed=1, n_random=300)
    x, v = f.domain.points, f.values
    assert np.array_equal(x[1::2], -x[0::2])
    assert np.array_equal(v[1::2], -v[0::2])
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-15)


@given(st.integers(1, 3), st.integers(0, 2))
def test_equatorial_odd_small(k, n):
    if n >= k:
        return
    f = equatorial_odd(k, n, 4, seed=k + n, n_random=50, n_singular=2)
    assert np.array_equal(f.values[1::2], -f.values[0::2])
    assert f.values.shape[1] == n + 1


def test_equatorial_delta_near_pole_is_large():
    f = equatorial_odd(2, 1, 16, seed=1, n_random=300)
    assert delta_hat(f, 0.01, "geodesic", ladder=[0.01]).value == pytest.approx(math.pi, abs=0.05)


def test_equatorial_needs_n_below_k():
    with pytest.raises(InvalidArgument):
        equatorial_odd(1, 1, 8, seed=0)


# --- determinism and export -----------------------------------------------------------

@pytest.mark.parametrize("build", [
    lambda: digit_interleave(6, 64),
    lambda: step_witnesses(False, 50),
    lambda: tverberg_one_point(12),
    lambda: k5_jump_drawing(0.01, 30),
    lambda: equatorial_odd(2, 1, 8, seed=3, n_random=100),
])
def test_witnesses_are_bit_identical(build):
    a, b = build(), build()
    assert a.to_csv() == b.to_csv()
    assert sidecar_json(a) == sidecar_json(b)
    assert np.array_equal(a.values, b.values)


def test_sidecar_contents():
    f = tverberg_one_point(12)
    body = json.loads(sidecar_json(f))
    assert body["spec"]["kind"] == "tverberg-one-point"
    assert body["verification"]["almost_2_injective"] is True
    assert body["hot_spots"] == [[0.5, 0.0, 0.5]]
    head = f.to_csv().splitlines()[0]
    assert head == "x0,x1,x2,f0"


def test_unknown_witness_kind():
    with pytest.raises(InvalidArgument):
        WitnessSpec("radon", {})
