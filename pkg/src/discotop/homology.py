"""Betti numbers over GF(2) by bit-packed column reduction."""

from __future__ import annotations

from typing import Iterable

from .complex_core import ChainComplex, chain_complex
from .errors import InvalidArgument, MalformedComplex

BettiVector = tuple[int, ...]


def gf2_rank(columns: Iterable[int]) -> int:
    """Rank of a GF(2) matrix given as column bitsets (Python ints).

    Each column is reduced against the stored pivot with the same leading bit;
    XOR on Python ints works a machine word at a time.
    """
    pivots: dict[int, int] = {}
    for col in columns:
        while col:
            lead = col.bit_length() - 1
            p = pivots.get(lead)
            if p is None:
                pivots[lead] = col
                break
            col ^= p
    return len(pivots)


def boundary_ranks(C: ChainComplex) -> tuple[int, ...]:
    """rank of the k-th boundary map for k = 0..top (rank of boundary 0 is 0)."""
    C.validate()
    return (0,) + tuple(gf2_rank(C.boundaries[k]) for k in range(1, C.top + 1))


def betti_numbers(C) -> BettiVector:
    """b_k = dim ker d_k - rank d_{k+1}; accepts a chain complex or any complex."""
    if not isinstance(C, ChainComplex):
        C = chain_complex(C)
    try:
        ranks = boundary_ranks(C)
    except MalformedComplex:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        raise MalformedComplex(str(exc)) from exc
    out = []
    for k, n in enumerate(C.counts):
        nxt = ranks[k + 1] if k + 1 < len(ranks) else 0
        b = n - ranks[k] - nxt
        if b < 0:
            raise MalformedComplex(f"negative Betti number in degree {k}")
        out.append(b)
    return tuple(out)


def euler_characteristic(C: ChainComplex) -> int:
    return sum((-1) ** k * n for k, n in enumerate(C.counts))


def sphere_betti(n: int) -> BettiVector:
    if n < 0:
        raise InvalidArgument("sphere dimension must be nonnegative")
    if n == 0:
        return (2,)
    return (1,) + (0,) * (n - 1) + (1,)


def _trim(b: BettiVector) -> BettiVector:
    b = list(b)
    while b and b[-1] == 0:
        b.pop()
    return tuple(b)


def is_homology_n_sphere(C, n: int) -> bool:
    """True iff the GF(2) Betti numbers agree with those of S^n (trailing zeros ignored)."""
    if n < 0:
        raise InvalidArgument("sphere dimension must be nonnegative")
    return _trim(betti_numbers(C)) == sphere_betti(n)
