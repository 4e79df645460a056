from __future__ import annotations

import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discotop.complex_core import (
    ChainComplex,
    SimplicialComplex,
    chain_complex,
    deleted_join2,
    deleted_product,
    simplex_skeleton,
)
from discotop.errors import MalformedComplex
from discotop.homology import (
    betti_numbers,
    boundary_ranks,
    euler_characteristic,
    gf2_rank,
    is_homology_n_sphere,
    sphere_betti,
)
from discotop.rng import make_rng

from conftest import dense_gf2_rank
from test_complex_core import octahedron, random_complexes


def dense_betti(X) -> tuple[int, ...]:
    C = chain_complex(X)
    ranks = [0] + [dense_gf2_rank(C.matrix(k)) for k in range(1, C.top + 1)] + [0]
    return tuple(n - ranks[k] - ranks[k + 1] for k, n in enumerate(C.counts))


def cycle(n: int) -> SimplicialComplex:
    return SimplicialComplex.from_faces([(i, (i + 1) % n) for i in range(n)])


def test_point():
    assert betti_numbers(simplex_skeleton(0, 0)) == (1,)


def test_octahedron_against_dense_oracle():
    assert betti_numbers(octahedron()) == dense_betti(octahedron()) == (1, 0, 1)


def test_k5_deleted_join_is_3_sphere():
    assert betti_numbers(deleted_join2(simplex_skeleton(4, 1))) == (1, 0, 0, 1)


def test_4_cycle_sphere_checks():
    assert is_homology_n_sphere(cycle(4), 1)
    assert not is_homology_n_sphere(cycle(4), 2)


def test_sphere_betti_shapes():
    assert sphere_betti(0) == (2,)
    assert sphere_betti(3) == (1, 0, 0, 1)


def test_two_points_are_a_0_sphere():
    assert is_homology_n_sphere(SimplicialComplex((0, 1), ((0,), (1,))), 0)


def test_deleted_product_k5_is_a_surface_of_genus_6():
    # Euler characteristic -10 with b0 = b2 = 1 gives b1 = 12
    X = deleted_product(simplex_skeleton(4, 1), 2)
    assert betti_numbers(X) == dense_betti(X) == (1, 12, 1)


def test_gf2_rank_matches_dense_oracle():
    rng = make_rng(3)
    for _ in range(30):
        rows, cols = rng.integers(1, 40, size=2)
        M = (rng.random((rows, cols)) < 0.3).astype(np.uint8)
        columns = [int("".join(str(b) for b in M[::-1, j]), 2) for j in range(cols)]
        assert gf2_rank(columns) == dense_gf2_rank(M)


def test_dimension_mismatch_is_malformed():
    with pytest.raises(MalformedComplex):
        betti_numbers(ChainComplex((2, 1), ((), (0b11, 0b01))))


@given(random_complexes())
def test_random_complexes(K):
    C = chain_complex(K)
    b = betti_numbers(C)
    assert b == dense_betti(K)
    assert all(v >= 0 for v in b)
    assert euler_characteristic(C) == sum((-1) ** k * v for k, v in enumerate(b))
    ranks = boundary_ranks(C)
    for k in range(C.top):
        assert ranks[k + 1] <= C.counts[k] - ranks[k]


@given(random_complexes(), st.randoms(use_true_random=False))
def test_betti_invariant_under_relabeling(K, rnd):
    labels = list(range(100))
    rnd.shuffle(labels)
    assert betti_numbers(K.relabel(dict(zip(K.vertices, labels)))) == betti_numbers(K)


def test_deleted_join_sk2_delta6_is_5_sphere_quickly():
    t = time.perf_counter()
    assert is_homology_n_sphere(deleted_join2(simplex_skeleton(6, 2)), 5)
    assert time.perf_counter() - t < 10
