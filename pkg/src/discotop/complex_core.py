"""Finite simplicial complexes, deleted joins/products and GF(2) chain complexes.

Faces are stored as sorted tuples of integer vertex labels. Every complex is
immutable once built; constructors validate the structural invariants and
raise :class:`MalformedComplex` on violation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument, MalformedComplex

Face = tuple[int, ...]
Cell = tuple[Face, ...]


def _face_key(face: Face):
    return (len(face), face)


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    vertices: tuple[int, ...]
    faces: tuple[Face, ...]

    def __post_init__(self):
        faces = tuple(sorted({tuple(sorted(f)) for f in self.faces}, key=_face_key))
        if len(faces) != len(self.faces):
            raise MalformedComplex("face list contains duplicates")
        if any(len(f) == 0 for f in faces):
            raise MalformedComplex("empty face listed explicitly")
        object.__setattr__(self, "faces", faces)
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        present = set(faces)
        for f in faces:
            if len(f) > 1:
                for i in range(len(f)):
                    sub = f[:i] + f[i + 1:]
                    if sub not in present:
                        raise MalformedComplex(f"face {f} is missing its boundary face {sub}")
        verts = {f[0] for f in faces if len(f) == 1}
        if verts != set(self.vertices):
            raise MalformedComplex("vertex set does not match the 0-dimensional faces")

    @classmethod
    def from_faces(cls, faces: Iterable[Sequence[int]]) -> "SimplicialComplex":
        """Downward closure of the given generating faces."""
        closed: set[Face] = set()
        for f in faces:
            f = tuple(sorted(set(f)))
            if not f or f in closed:
                continue
            for k in range(1, len(f) + 1):
                closed.update(itertools.combinations(f, k))
        verts = sorted({f[0] for f in closed if len(f) == 1})
        return cls(tuple(verts), tuple(sorted(closed, key=_face_key)))

    @property
    def dim(self) -> int:
        return max((len(f) - 1 for f in self.faces), default=-1)

    def faces_of_dim(self, k: int) -> list[Face]:
        return [f for f in self.faces if len(f) == k + 1]

    def f_vector(self) -> tuple[int, ...]:
        counts = [0] * (self.dim + 1)
        for f in self.faces:
            counts[len(f) - 1] += 1
        return tuple(counts)

    def __contains__(self, face) -> bool:
        return tuple(sorted(face)) in self._face_set

    def __len__(self) -> int:
        return len(self.faces)

    @cached_property
    def _face_set(self) -> frozenset:
        return frozenset(self.faces)

    def relabel(self, mapping) -> "SimplicialComplex":
        """Image under an injective vertex relabeling (dict or callable)."""
        m = mapping if callable(mapping) else mapping.__getitem__
        new_vertices = [m(v) for v in self.vertices]
        if len(set(new_vertices)) != len(new_vertices):
            raise InvalidArgument("relabeling is not injective")
        return SimplicialComplex(
            tuple(new_vertices),
            tuple(tuple(sorted(m(v) for v in f)) for f in self.faces),
        )

    def is_downward_closed(self) -> bool:
        """Brute-force subset check, independent of the constructor's check."""
        present = self._face_set
        for f in self.faces:
            for k in range(1, len(f)):
                for sub in itertools.combinations(f, k):
                    if sub not in present:
                        return False
        return True


def simplex_skeleton(N: int, d: int) -> SimplicialComplex:
    """The d-skeleton of the N-simplex on vertices 0..N."""
    if N < 0 or d < 0:
        raise InvalidArgument("N and d must be nonnegative")
    if d > N:
        raise InvalidArgument(f"skeleton dimension {d} exceeds simplex dimension {N}")
    faces = [c for k in range(1, d + 2) for c in itertools.combinations(range(N + 1), k)]
    return SimplicialComplex(tuple(range(N + 1)), tuple(faces))


@dataclass(frozen=True, eq=False)
class DeletedJoin:
    """A 2-fold deleted join together with the copy bookkeeping."""

    complex: SimplicialComplex
    base: SimplicialComplex
    offset: int

    def split(self, face: Face) -> tuple[Face, Face]:
        """Return the two vertex-disjoint factor faces (in base labels)."""
        a = tuple(v for v in face if v < self.offset)
        b = tuple(v - self.offset for v in face if v >= self.offset)
        return a, b

    def label(self, v: int, copy: int) -> int:
        return v + copy * self.offset


def deleted_join2(K: SimplicialComplex) -> DeletedJoin:
    """2-fold deleted join: faces sigma_1 (copy 0) union sigma_2 (copy 1), disjoint in K.

    Copy 0 keeps the labels of K, copy 1 shifts them by ``max(V(K)) + 1``.
    """
    if not K.vertices:
        raise InvalidArgument("deleted join of an empty complex")
    offset = max(K.vertices) + 1
    with_empty = [()] + list(K.faces)
    faces = []
    for s1 in with_empty:
        s1_set = set(s1)
        for s2 in with_empty:
            if not s1 and not s2:
                continue
            if s1_set.isdisjoint(s2):
                faces.append(s1 + tuple(v + offset for v in s2))
    verts = tuple(K.vertices) + tuple(v + offset for v in K.vertices)
    return DeletedJoin(SimplicialComplex(verts, tuple(faces)), K, offset)


@dataclass(frozen=True, eq=False)
class CellComplex:
    """Cells are tuples of faces of ``base``; a product cell has dimension sum(dim sigma_i).

    ``degenerate`` is set when the base has fewer than ``r`` vertices and the
    complex is empty.
    """

    base: SimplicialComplex
    r: int
    cells: tuple[Cell, ...]
    degenerate: bool = False
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        idx = {}
        for i, c in enumerate(self.cells):
            if c in idx:
                raise MalformedComplex(f"duplicate cell {c}")
            if len(c) != self.r:
                raise MalformedComplex(f"cell {c} does not have {self.r} factors")
            for f in c:
                if f not in self.base:
                    raise MalformedComplex(f"factor {f} of cell {c} is not a face of the base")
            if sum(len(f) for f in c) != len(set().union(*c)):
                raise MalformedComplex(f"factors of cell {c} are not pairwise disjoint")
            idx[c] = i
        object.__setattr__(self, "index", idx)

    @staticmethod
    def cell_dim(cell: Cell) -> int:
        return sum(len(f) - 1 for f in cell)

    @property
    def dim(self) -> int:
        return max((self.cell_dim(c) for c in self.cells), default=-1)

    def cells_of_dim(self, k: int) -> list[Cell]:
        return [c for c in self.cells if self.cell_dim(c) == k]

    def f_vector(self) -> tuple[int, ...]:
        counts = [0] * (self.dim + 1)
        for c in self.cells:
            counts[self.cell_dim(c)] += 1
        return tuple(counts)

    def act(self, perm: Sequence[int]) -> np.ndarray:
        """Cell permutation induced by permuting coordinates: new[i] = old[perm[i]]."""
        if sorted(perm) != list(range(self.r)):
            raise InvalidArgument(f"{perm} is not a permutation of {self.r} coordinates")
        out = np.empty(len(self.cells), dtype=np.int64)
        for i, c in enumerate(self.cells):
            image = tuple(c[p] for p in perm)
            j = self.index.get(image)
            if j is None:
                raise MalformedComplex(f"cell set is not closed under the permutation {perm}")
            out[i] = j
        return out

    @cached_property
    def generators(self) -> tuple[np.ndarray, ...]:
        """Cell permutations of the adjacent transpositions (i, i+1)."""
        gens = []
        for i in range(self.r - 1):
            perm = list(range(self.r))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            gens.append(self.act(perm))
        return tuple(gens)


def _disjoint_tuples(faces: list[Face], r: int, used: frozenset = frozenset()):
    if r == 0:
        yield ()
        return
    for f in faces:
        if used.isdisjoint(f):
            for rest in _disjoint_tuples(faces, r - 1, used | frozenset(f)):
                yield (f,) + rest


def deleted_product(K: SimplicialComplex, r: int) -> CellComplex:
    """r-fold deleted product: ordered r-tuples of nonempty pairwise vertex-disjoint faces."""
    if r < 2:
        raise InvalidArgument("deleted product needs r >= 2")
    if len(K.vertices) < r:
        return CellComplex(K, r, (), degenerate=True)
    cells = sorted(_disjoint_tuples(list(K.faces), r), key=lambda c: (CellComplex.cell_dim(c), c))
    return CellComplex(K, r, tuple(cells))


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """Cellular chain complex over GF(2).

    ``boundaries[k]`` lists the columns of the k-th boundary map as Python int
    bitsets over the (k-1)-cells; ``boundaries[0]`` is empty by convention.
    """

    counts: tuple[int, ...]
    boundaries: tuple[tuple[int, ...], ...]

    @property
    def top(self) -> int:
        return len(self.counts) - 1

    def matrix(self, k: int) -> np.ndarray:
        """Dense 0/1 matrix of the k-th boundary map, shape (n_{k-1}, n_k)."""
        if k < 1 or k > self.top:
            raise InvalidArgument(f"no boundary map in degree {k}")
        rows, cols = self.counts[k - 1], self.counts[k]
        m = np.zeros((rows, cols), dtype=np.uint8)
        for j, col in enumerate(self.boundaries[k]):
            while col:
                low = col & -col
                m[low.bit_length() - 1, j] = 1
                col ^= low
        return m

    def validate(self) -> None:
        if len(self.boundaries) != len(self.counts):
            raise MalformedComplex("one boundary map per degree is required")
        for k in range(1, len(self.counts)):
            cols = self.boundaries[k]
            if len(cols) != self.counts[k]:
                raise MalformedComplex(f"boundary map {k} has {len(cols)} columns, expected {self.counts[k]}")
            limit = 1 << self.counts[k - 1]
            if any(c < 0 or c >= limit for c in cols):
                raise MalformedComplex(f"boundary map {k} references a nonexistent {k - 1}-cell")

    def boundary_squared_is_zero(self) -> bool:
        for k in range(2, len(self.counts)):
            lower = self.boundaries[k - 1]
            for col in self.boundaries[k]:
                acc = 0
                while col:
                    low = col & -col
                    acc ^= lower[low.bit_length() - 1]
                    col ^= low
                if acc:
                    return False
        return True


def _simplicial_chain_complex(X: SimplicialComplex) -> ChainComplex:
    by_dim = [X.faces_of_dim(k) for k in range(X.dim + 1)]
    index = [{f: i for i, f in enumerate(fs)} for fs in by_dim]
    boundaries: list[tuple[int, ...]] = [()]
    for k in range(1, len(by_dim)):
        cols = []
        for f in by_dim[k]:
            col = 0
            for i in range(len(f)):
                j = index[k - 1].get(f[:i] + f[i + 1:])
                if j is None:
                    raise MalformedComplex(f"face {f} is missing a boundary face")
                col ^= 1 << j
            cols.append(col)
        boundaries.append(tuple(cols))
    return ChainComplex(tuple(len(fs) for fs in by_dim), tuple(boundaries))


def _cellular_chain_complex(X: CellComplex) -> ChainComplex:
    top = X.dim
    by_dim = [X.cells_of_dim(k) for k in range(top + 1)]
    index = [{c: i for i, c in enumerate(cs)} for cs in by_dim]
    boundaries: list[tuple[int, ...]] = [()]
    for k in range(1, top + 1):
        cols = []
        for cell in by_dim[k]:
            col = 0
            # Leibniz rule; signs vanish mod 2 and vertex factors have zero boundary.
            for pos, f in enumerate(cell):
                if len(f) < 2:
                    continue
                for i in range(len(f)):
                    sub = cell[:pos] + (f[:i] + f[i + 1:],) + cell[pos + 1:]
                    j = index[k - 1].get(sub)
                    if j is None:
                        raise MalformedComplex(f"cell {cell} is missing boundary cell {sub}")
                    col ^= 1 << j
            cols.append(col)
        boundaries.append(tuple(cols))
    return ChainComplex(tuple(len(cs) for cs in by_dim), tuple(boundaries))


def chain_complex(X) -> ChainComplex:
    """GF(2) chain complex of a simplicial complex, deleted join, or cell complex."""
    if isinstance(X, DeletedJoin):
        X = X.complex
    if isinstance(X, SimplicialComplex):
        cc = _simplicial_chain_complex(X)
    elif isinstance(X, CellComplex):
        cc = _cellular_chain_complex(X)
    else:
        raise MalformedComplex(f"cannot build a chain complex from {type(X).__name__}")
    cc.validate()
    return cc


# --- text serialization ---------------------------------------------------

SIMPLICIAL_HEADER = "# discotop simplicial-complex v1"
CELL_HEADER = "# discotop cell-complex v1"


def dumps_complex(X) -> str:
    """Line-oriented text form; see README for the format."""
    if isinstance(X, DeletedJoin):
        X = X.complex
    lines = []
    if isinstance(X, SimplicialComplex):
        lines.append(SIMPLICIAL_HEADER)
        for k in range(X.dim + 1):
            lines.append(f"dim {k}")
            lines.extend(" ".join(map(str, f)) for f in X.faces_of_dim(k))
    elif isinstance(X, CellComplex):
        lines.append(CELL_HEADER)
        lines.append(f"r {X.r}")
        lines.append("base")
        lines.extend(" ".join(map(str, f)) for f in X.base.faces)
        for k in range(X.dim + 1):
            lines.append(f"dim {k}")
            lines.extend(" | ".join(" ".join(map(str, f)) for f in c) for c in X.cells_of_dim(k))
    else:
        raise InvalidArgument(f"cannot serialize {type(X).__name__}")
    return "\n".join(lines) + "\n"


def loads_complex(text: str):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MalformedComplex("empty input")
    header, body = lines[0], lines[1:]
    if header == SIMPLICIAL_HEADER:
        faces = []
        dim = None
        for ln in body:
            if ln.startswith("dim "):
                dim = int(ln.split()[1])
                continue
            f = tuple(int(t) for t in ln.split())
            if dim is None or len(f) != dim + 1:
                raise MalformedComplex(f"face {ln!r} listed under the wrong dimension header")
            faces.append(f)
        verts = tuple(f[0] for f in faces if len(f) == 1)
        return SimplicialComplex(verts, tuple(faces))
    if header == CELL_HEADER:
        if not body or not body[0].startswith("r "):
            raise MalformedComplex("missing 'r' line")
        r = int(body[0].split()[1])
        if len(body) < 2 or body[1] != "base":
            raise MalformedComplex("missing 'base' block")
        base_faces, cells = [], []
        section = "base"
        for ln in body[2:]:
            if ln.startswith("dim "):
                section = "cells"
                continue
            if section == "base":
                base_faces.append(tuple(int(t) for t in ln.split()))
            else:
                cells.append(tuple(tuple(int(t) for t in part.split()) for part in ln.split("|")))
        base = SimplicialComplex(tuple(f[0] for f in base_faces if len(f) == 1), tuple(base_faces))
        return CellComplex(base, r, tuple(cells), degenerate=len(base.vertices) < r)
    raise MalformedComplex(f"unknown header {header!r}")
