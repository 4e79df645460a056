from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discotop.complex_core import (
    CellComplex,
    ChainComplex,
    SimplicialComplex,
    chain_complex,
    deleted_join2,
    deleted_product,
    dumps_complex,
    loads_complex,
    simplex_skeleton,
)
from discotop.errors import InvalidArgument, MalformedComplex


def octahedron() -> SimplicialComplex:
    # vertex pairs {0,3}, {1,4}, {2,5} are antipodal
    tri = [(a, b, c) for a in (0, 3) for b in (1, 4) for c in (2, 5)]
    return SimplicialComplex.from_faces(tri)


def brute_disjoint_tuples(K: SimplicialComplex, r: int) -> set:
    out = set()
    for cell in itertools.product(K.faces, repeat=r):
        if sum(len(f) for f in cell) == len(set().union(*cell)):
            out.add(cell)
    return out


# --- simplex_skeleton -------------------------------------------------------

def test_skeleton_k5():
    K = simplex_skeleton(4, 1)
    assert K.f_vector() == (5, 10)


def test_skeleton_points():
    K = simplex_skeleton(2, 0)
    assert K.faces == ((0,), (1,), (2,))


def test_skeleton_face_count_binomial_oracle():
    K = simplex_skeleton(4, 2)
    assert len(K.faces) == sum(math.comb(5, k) for k in (1, 2, 3)) == 25


def test_skeleton_rejects_large_d():
    with pytest.raises(InvalidArgument):
        simplex_skeleton(2, 3)


@given(st.integers(0, 6), st.integers(0, 6))
def test_skeleton_subsets(N, d):
    if d > N:
        return
    K = simplex_skeleton(N, d)
    expected = {c for k in range(1, d + 2) for c in itertools.combinations(range(N + 1), k)}
    assert set(K.faces) == expected
    assert K.is_downward_closed()


# --- SimplicialComplex invariants ------------------------------------------

def test_missing_boundary_face_rejected():
    with pytest.raises(MalformedComplex):
        SimplicialComplex((0, 1), ((0,), (1,), (0, 1), (0, 2)))


def test_duplicate_face_rejected():
    with pytest.raises(MalformedComplex):
        SimplicialComplex((0, 1), ((0,), (1,), (0, 1), (1, 0)))


def test_stray_vertex_rejected():
    with pytest.raises(MalformedComplex):
        SimplicialComplex((0, 1, 2), ((0,), (1,)))


# --- deleted joins -----------------------------------------------------------

def test_deleted_join_of_edge_is_4_cycle():
    J = deleted_join2(simplex_skeleton(1, 1))
    o = J.offset
    edges = set(J.complex.faces_of_dim(1))
    assert edges == {(0, 1), (o, o + 1), (0, o + 1), (1, o)}
    assert J.complex.f_vector() == (4, 4)


@pytest.mark.parametrize("N,d", [(1, 1), (2, 1), (4, 1), (3, 3)])
def test_deleted_join_vertex_count(N, d):
    K = simplex_skeleton(N, d)
    J = deleted_join2(K)
    assert len(J.complex.vertices) == 2 * len(K.vertices)


@pytest.mark.parametrize("N", [0, 1, 2, 3, 4])
def test_deleted_join_of_simplex_is_cross_polytope(N):
    # boundary of the (N+1)-dim cross-polytope: choose, for each of N+1 axes,
    # one of two endpoints or nothing (not all nothing)
    J = deleted_join2(simplex_skeleton(N, N)).complex
    faces = set()
    for pattern in itertools.product((None, 0, 1), repeat=N + 1):
        if all(p is None for p in pattern):
            continue
        faces.add(tuple(sorted(v + (N + 1) * p for v, p in enumerate(pattern) if p is not None)))
    assert set(J.faces) == faces


def test_deleted_join_split_roundtrip():
    J = deleted_join2(simplex_skeleton(4, 1))
    for f in J.complex.faces:
        a, b = J.split(f)
        assert set(a).isdisjoint(b)
        assert tuple(sorted(a + tuple(J.label(v, 1) for v in b))) == f


# --- deleted products --------------------------------------------------------

def test_deleted_product_of_edge():
    X = deleted_product(simplex_skeleton(1, 1), 2)
    assert set(X.cells) == {((0,), (1,)), ((1,), (0,))}
    assert X.f_vector() == (2,)


def test_deleted_product_k5_counts():
    X = deleted_product(simplex_skeleton(4, 1), 2)
    assert X.f_vector() == (20, 60, 30)
    assert set(X.cells) == brute_disjoint_tuples(simplex_skeleton(4, 1), 2)


@pytest.mark.parametrize("r,d", [(2, 1), (2, 2), (3, 1)])
def test_deleted_product_top_dimension(r, d):
    N = (r - 1) * (d + 1)
    X = deleted_product(simplex_skeleton(N, N), r)
    assert X.dim == (r - 1) * d


def test_deleted_product_too_few_vertices_is_flagged():
    X = deleted_product(simplex_skeleton(1, 1), 3)
    assert X.degenerate and X.cells == ()


def test_deleted_product_group_action_is_bijective():
    X = deleted_product(simplex_skeleton(3, 2), 3)
    dims = np.array([X.cell_dim(c) for c in X.cells])
    for perm in itertools.permutations(range(3)):
        img = X.act(perm)
        assert sorted(img.tolist()) == list(range(len(X.cells)))
        assert np.array_equal(dims[img], dims)
    assert len(X.generators) == 2


def test_cell_complex_rejects_overlapping_factors():
    K = simplex_skeleton(2, 1)
    with pytest.raises(MalformedComplex):
        CellComplex(K, 2, (((0, 1), (1,)),))


# --- chain complexes ---------------------------------------------------------

def test_edge_boundary():
    C = chain_complex(simplex_skeleton(1, 1))
    assert C.matrix(1).tolist() == [[1], [1]]


def test_octahedron_shapes_and_dd():
    C = chain_complex(octahedron())
    assert C.counts == (6, 12, 8)
    assert C.matrix(1).shape == (6, 12)
    assert C.matrix(2).shape == (12, 8)
    assert not ((C.matrix(1).astype(int) @ C.matrix(2).astype(int)) % 2).any()


@pytest.mark.parametrize("X", [
    simplex_skeleton(5, 3),
    deleted_join2(simplex_skeleton(4, 1)),
    deleted_product(simplex_skeleton(4, 1), 2),
    deleted_product(simplex_skeleton(4, 4), 3),
])
def test_boundary_squares_to_zero(X):
    C = chain_complex(X)
    assert C.boundary_squared_is_zero()
    for k in range(2, C.top + 1):
        prod = (C.matrix(k - 1).astype(int) @ C.matrix(k).astype(int)) % 2
        assert not prod.any()


def test_malformed_chain_complex_detected():
    C = ChainComplex((2, 1), ((), (0b100,)))
    with pytest.raises(MalformedComplex):
        C.validate()
    C = ChainComplex((2, 2), ((), (0b11,)))
    with pytest.raises(MalformedComplex):
        C.validate()


def test_chain_complex_rejects_other_types():
    with pytest.raises(MalformedComplex):
        chain_complex([(0,)])


# --- serialization -----------------------------------------------------------

@pytest.mark.parametrize("X", [
    octahedron(),
    deleted_join2(simplex_skeleton(3, 1)).complex,
    deleted_product(simplex_skeleton(4, 1), 2),
])
def test_text_roundtrip(X):
    text = dumps_complex(X)
    Y = loads_complex(text)
    if isinstance(X, CellComplex):
        assert Y.cells == X.cells and Y.r == X.r and Y.base.faces == X.base.faces
    else:
        assert Y.faces == X.faces
    assert dumps_complex(Y) == text


def test_text_format_layout():
    text = dumps_complex(simplex_skeleton(2, 1))
    assert text.splitlines() == [
        "# discotop simplicial-complex v1", "dim 0", "0", "1", "2", "dim 1", "0 1", "0 2", "1 2",
    ]


def test_text_rejects_misplaced_face():
    with pytest.raises(MalformedComplex):
        loads_complex("# discotop simplicial-complex v1\ndim 0\n0 1\n")


@st.composite
def random_complexes(draw):
    n = draw(st.integers(1, 7))
    gens = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=1, max_size=4), min_size=1, max_size=8))
    return SimplicialComplex.from_faces(gens)


@given(random_complexes())
def test_random_complexes_are_closed_and_roundtrip(K):
    assert K.is_downward_closed()
    assert loads_complex(dumps_complex(K)).faces == K.faces
    assert chain_complex(K).boundary_squared_is_zero()
