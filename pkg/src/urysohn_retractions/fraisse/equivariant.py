"""Brute-force search for equivariant isometries between finite triples."""

from __future__ import annotations

from typing import Iterator

from ..metric import isometric_extensions
from ..triple import Triple


def _equivariant_maps(t: Triple, u: Triple) -> Iterator[tuple[int, ...]]:
    if len(t) != len(u):
        return
    tr, ur = t.retraction, u.retraction
    tp, up = t.potential, u.potential

    def accept(x: int, s: int, partial: list[int]) -> bool:
        if tp[x] != up[s]:
            return False
        # I(r_t(x)) = r_u(I(x)) wherever both sides are assigned
        rx = tr[x]
        if rx == x and ur[s] != s:
            return False
        if rx < x and partial[rx] != ur[s]:
            return False
        for y in range(x):
            if tr[y] == x and ur[partial[y]] != s:
                return False
        return True

    yield from isometric_extensions(t.space, u.space, accept)


def find_equivariant_isometry(t: Triple, u: Triple) -> tuple[int, ...] | None:
    """First bijection I (lexicographic) with d preserved, I r_t = r_u I and p_t = p_u I."""
    return next(_equivariant_maps(t, u), None)


def count_equivariant_isometries(t: Triple, u: Triple) -> int:
    return sum(1 for _ in _equivariant_maps(t, u))


def is_equivariant(t: Triple, u: Triple, iso: tuple[int, ...]) -> bool:
    n = len(t)
    if len(u) != n or sorted(iso) != list(range(n)):
        return False
    td, ud = t.space.dist, u.space.dist
    for x in range(n):
        if t.potential[x] != u.potential[iso[x]] or iso[t.retraction[x]] != u.retraction[iso[x]]:
            return False
        for y in range(n):
            if td[x][y] != ud[iso[x]][iso[y]]:
                return False
    return True
