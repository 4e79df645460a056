from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discotop.bounds import (
    SCENARIOS,
    BoundReport,
    ConstantValue,
    EuclideanToEuclidean,
    GeneralConf2,
    HaefligerWeber,
    ProjectivePowerOfTwo,
    SphereToEuclidean,
    Tverberg,
    TverbergKappaDelta,
    VanKampenFlores,
    bound_oracle,
    c_constant,
    cov_upper,
    covering_lower_bound,
    is_prime_power,
    r_constant,
)
from discotop.errors import InapplicableTheorem, InvalidArgument

PRIME_POWERS = {p ** a for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
                for a in range(1, 8) if p ** a <= 50}


# --- r_n -----------------------------------------------------------------------

def test_r_constant_examples():
    assert r_constant(0) == math.pi
    assert r_constant(1) == pytest.approx(2 * math.pi / 3, abs=1e-15)
    assert r_constant(3) == pytest.approx(1.8234765819369754, abs=1e-15)


def test_r_constant_is_simplex_edge_angle():
    # vertices of a regular simplex centered at the origin have pairwise inner product -1/(n+1)
    for n in range(1, 8):
        E = np.eye(n + 2) - 1.0 / (n + 2)
        E /= np.linalg.norm(E, axis=1, keepdims=True)
        assert math.acos(float(E[0] @ E[1])) == pytest.approx(r_constant(n), abs=1e-12)


def test_r_constant_strictly_decreasing_to_half_pi():
    # -1/(n+1) increases towards 0 and arccos is decreasing
    vals = [r_constant(n) for n in range(200)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert all(math.pi / 2 < v <= math.pi for v in vals)
    assert vals[-1] - math.pi / 2 < 1 / 199


# --- c_{n,k} -----------------------------------------------------------------

@pytest.mark.parametrize("k", range(1, 10))
def test_circle_constants(k):
    j = k // 2
    assert c_constant(1, k).exact == 2 * math.pi * j / (2 * j + 1)


def test_c_constant_examples():
    assert c_constant(0, 1).exact == math.pi
    assert c_constant(1, 4).exact == 4 * math.pi / 5
    assert c_constant(3, 3).exact == 0.0
    assert c_constant(2, 4).exact == r_constant(2)
    c = c_constant(2, 5)
    assert c.exact is None and c.upper is None
    assert c.lower >= r_constant(2)


def test_c_constant_rejects_k_below_n():
    with pytest.raises(InvalidArgument):
        c_constant(3, 2)


def test_constant_value_ordering_enforced():
    with pytest.raises(InvalidArgument):
        ConstantValue(lower=2.0, exact=1.0)


@pytest.mark.parametrize("k", range(1, 10))
def test_exact_circle_values_dominate_covering_bounds(k):
    assert covering_lower_bound(1, k) <= c_constant(1, k).exact + 1e-12


# --- covering radii --------------------------------------------------------------

@pytest.mark.parametrize("k", range(1, 10))
def test_circle_cover_is_evenly_spaced(k):
    assert cov_upper(1, k) == pytest.approx(math.pi / (2 * k), abs=1e-12)


def test_circle_cover_consistency_example():
    assert covering_lower_bound(1, 4) == pytest.approx(3 * math.pi / 4, abs=1e-12)
    assert covering_lower_bound(1, 4) <= 4 * math.pi / 5


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cover_nonincreasing_in_k(n):
    vals = [cov_upper(n, k) for k in range(1, 7)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("k", range(1, 7))
def test_rp2_cover_respects_area_bound(k):
    # k caps of radius rho (area 2 pi (1 - cos rho) each) must cover RP^2 (area 2 pi)
    assert cov_upper(2, k) >= math.acos(1 - 1 / k) - 1e-12
    assert cov_upper(2, k) <= math.pi / 2


def test_cover_rejects_bad_arguments():
    with pytest.raises(InvalidArgument):
        cov_upper(1, 0)


# --- prime powers ------------------------------------------------------------------

def test_prime_power_examples():
    assert is_prime_power(4) and is_prime_power(9)
    assert not is_prime_power(6)


@given(st.integers(2, 50))
def test_prime_power_oracle(r):
    assert is_prime_power(r) == (r in PRIME_POWERS)


def test_prime_power_domain():
    with pytest.raises(InvalidArgument):
        is_prime_power(1)


# --- bound oracle --------------------------------------------------------------------

def test_projective_k1():
    assert bound_oracle(ProjectivePowerOfTwo(1)).bound == pytest.approx(math.acos(-1 / 3), abs=1e-15)


def test_van_kampen_flores_d1():
    rep = bound_oracle(VanKampenFlores(1))
    assert rep.bound == pytest.approx(2 * math.pi / 3, abs=1e-15)
    assert rep.quantity == "alpha^(2)"


def test_tverberg_r2_d1():
    assert bound_oracle(Tverberg(2, 1)).bound == math.pi
    assert bound_oracle(TverbergKappaDelta(2, 1)).bound == pytest.approx(math.sqrt(2), abs=1e-15)


def test_tverberg_non_prime_power_is_inapplicable():
    with pytest.raises(InapplicableTheorem) as e:
        bound_oracle(Tverberg(6, 19))
    assert "prime power" in e.value.condition
    with pytest.raises(InapplicableTheorem):
        bound_oracle(TverbergKappaDelta(6, 2))


@pytest.mark.parametrize("n", [1, 3, 5, 7])
def test_haefliger_weber_boundary_is_inapplicable(n):
    d = 3 * (n + 1) // 2
    with pytest.raises(InapplicableTheorem):
        bound_oracle(HaefligerWeber(n, d))
    assert bound_oracle(HaefligerWeber(n, d + 1)).bound == r_constant(d)


def test_sphere_and_euclidean_sources_use_c_constant():
    assert bound_oracle(SphereToEuclidean(2, 2)).bound == c_constant(1, 2).exact
    assert bound_oracle(EuclideanToEuclidean(2, 1)).bound == math.pi
    rep = bound_oracle(SphereToEuclidean(5, 3))
    assert not rep.exact and rep.bound == c_constant(2, 5).lower


def test_general_conf2():
    assert bound_oracle(GeneralConf2(3)).bound == r_constant(2)


@given(st.sampled_from(sorted(SCENARIOS)), st.integers(0, 8), st.integers(0, 8))
def test_oracle_angle_bounds_and_conditions(name, a, b):
    cls = SCENARIOS[name]
    fields = list(cls.__dataclass_fields__)
    args = dict(zip(fields, (a, b)))
    try:
        rep = bound_oracle(cls(**args))
    except (InapplicableTheorem, InvalidArgument):
        return
    assert isinstance(rep, BoundReport)
    assert all(ok for _, ok in rep.conditions)
    assert rep.citation
    if not rep.quantity.startswith("delta"):
        assert 0.0 <= rep.bound <= math.pi
