"""Stage-level predicates for the pointwise, pointwise-retract and uniform
topologies on 1-Lipschitz retractions, and conjugation by isometries.

Every inequality is strict and evaluated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import InvalidTripleError, NotIsometricError, PreconditionError, ShapeError
from .metric import FiniteMetricSpace
from .scalar import ZERO, Scalar, ScalarLike, smin
from .triple import Triple

Point = Union[int, str]


class RetractionOnStage:
    """A 1-Lipschitz retraction of a finite space with D_R = distance to its image."""

    __slots__ = ("space", "retraction", "potential")

    def __init__(self, space: FiniteMetricSpace, retraction: Sequence[int]) -> None:
        r = tuple(int(v) for v in retraction)
        n = len(space)
        if len(r) != n or any(not 0 <= v < n for v in r):
            raise ShapeError("retraction does not match the space")
        if any(r[r[x]] != r[x] for x in range(n)):
            raise InvalidTripleError("retraction is not idempotent")
        d = space.dist
        for x in range(n):
            for y in range(x + 1, n):
                if d[r[x]][r[y]] > d[x][y]:
                    raise InvalidTripleError(f"retraction is not 1-Lipschitz at ({x}, {y})")
        self.space = space
        self.retraction = r
        image = sorted(set(r))
        self.potential = tuple(smin(d[x][z] for z in image) for x in range(n))

    @classmethod
    def from_triple(cls, t: Triple) -> "RetractionOnStage":
        return cls(t.space, t.retraction)

    def __call__(self, x: int) -> int:
        return self.retraction[x]

    def __len__(self) -> int:
        return len(self.retraction)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RetractionOnStage):
            return NotImplemented
        return self.space == other.space and self.retraction == other.retraction

    def __hash__(self) -> int:
        return hash((self.space, self.retraction))

    def __repr__(self) -> str:
        return f"RetractionOnStage({list(self.retraction)})"

    @property
    def retract(self) -> frozenset[int]:
        return frozenset(self.retraction)

    def to_triple(self) -> Triple:
        return Triple(self.space, self.retraction, self.potential)


def _same_stage(u: RetractionOnStage, r: RetractionOnStage) -> None:
    if u.space != r.space:
        raise ShapeError("retractions live on different stages")


def _indices(u: RetractionOnStage, xs: Iterable[Point]) -> list[int]:
    out = []
    for x in xs:
        if isinstance(x, str):
            try:
                out.append(u.space.index(x))
            except KeyError as exc:
                raise ShapeError(f"unknown point {x!r}") from exc
        else:
            if not 0 <= int(x) < len(u):
                raise ShapeError(f"point {x} is not on the stage")
            out.append(int(x))
    return out


def displacement(u: RetractionOnStage, r: RetractionOnStage, x: int) -> Scalar:
    return u.space.dist[r.retraction[x]][u.retraction[x]]


def in_neighborhood_p(u: RetractionOnStage, r: RetractionOnStage, xs: Iterable[Point], eps: ScalarLike) -> bool:
    """r in O(u)_{xs, eps}: d(r(x), u(x)) < eps on xs."""
    _same_stage(u, r)
    e = Scalar.coerce(eps)
    return all(displacement(u, r, x) < e for x in _indices(u, xs))


def in_neighborhood_pr(u: RetractionOnStage, r: RetractionOnStage, xs: Iterable[Point], eps: ScalarLike) -> bool:
    """r in W(u)_{xs, eps}: the pointwise clause plus |D_u(x) - D_r(x)| < eps."""
    _same_stage(u, r)
    e = Scalar.coerce(eps)
    for x in _indices(u, xs):
        if not displacement(u, r, x) < e or not abs(u.potential[x] - r.potential[x]) < e:
            return False
    return True


def in_neighborhood_u(u: RetractionOnStage, r: RetractionOnStage, eps: ScalarLike) -> bool:
    """r in V(u)_eps: sup of d(r(x), u(x)) over the stage is < eps."""
    _same_stage(u, r)
    e = Scalar.coerce(eps)
    return all(displacement(u, r, x) < e for x in range(len(u)))


def sup_displacement(u: RetractionOnStage, r: RetractionOnStage) -> Scalar:
    _same_stage(u, r)
    best = ZERO
    for x in range(len(u)):
        v = displacement(u, r, x)
        if v > best:
            best = v
    return best


# -- the sets B, C, E, F -----------------------------------------------------------------------

SET_BOUNDS = {"E": 1, "F": 1, "B": 5, "C": 3}


@dataclass(frozen=True)
class SetParams:
    """An embedding (i or i') of a small triple (r, p) and the point x tested."""

    mapping: tuple[int, ...]
    retraction: tuple[int, ...]
    potential: tuple[Scalar, ...]
    x: int
    n: int

    @classmethod
    def of(cls, mapping, small: Triple, x: int, n: int) -> "SetParams":
        return cls(tuple(mapping), small.retraction, small.potential, x, n)


def set_gap(u: RetractionOnStage, params: SetParams, which: str) -> Scalar:
    m = params.mapping
    if len(params.retraction) != len(m) or len(params.potential) != len(m):
        raise ShapeError("embedding, retraction and potential differ in length")
    if not 0 <= params.x < len(m) or any(not 0 <= s < len(u) for s in m):
        raise ShapeError("parameters refer to missing points")
    x = params.x
    if which in ("E", "B"):
        return u.space.dist[u.retraction[m[x]]][m[params.retraction[x]]]
    if which in ("F", "C"):
        return abs(u.potential[m[x]] - Scalar.coerce(params.potential[x]))
    raise ValueError(f"unknown set {which!r}; expected one of B, C, E, F")


def set_membership(u: RetractionOnStage, params: SetParams, which: str) -> bool:
    """E, F: gap < 1/n; B: commutation gap < 5/n; C: potential gap < 3/n."""
    if params.n <= 0:
        raise PreconditionError("n must be positive")
    gap = set_gap(u, params, which)
    return gap < Scalar.coerce(SET_BOUNDS[which]) / params.n


# -- conjugation -------------------------------------------------------------------------------


def check_isometry(space: FiniteMetricSpace, iso: Sequence[int]) -> tuple[int, ...]:
    n = len(space)
    m = tuple(int(v) for v in iso)
    if sorted(m) != list(range(n)):
        raise NotIsometricError("not a bijection of the stage")
    d = space.dist
    for x in range(n):
        for y in range(x + 1, n):
            if d[m[x]][m[y]] != d[x][y]:
                raise NotIsometricError(f"distance not preserved at ({x}, {y})")
    return m


def inverse(iso: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(iso)
    for x, y in enumerate(iso):
        inv[y] = x
    return tuple(inv)


def conjugate(iso: Sequence[int], u: RetractionOnStage) -> RetractionOnStage:
    """S = I^-1 o u o I."""
    m = check_isometry(u.space, iso)
    inv = inverse(m)
    return RetractionOnStage(u.space, [inv[u.retraction[m[x]]] for x in range(len(m))])


def topologies_agree(u: RetractionOnStage, r: RetractionOnStage, xs: Iterable[Point], eps: ScalarLike) -> bool:
    """With a shared retract, membership in O and in W coincide."""
    pts = list(xs)
    return in_neighborhood_p(u, r, pts, eps) == in_neighborhood_pr(u, r, pts, eps)
