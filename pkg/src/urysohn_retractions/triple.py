"""Triples (A, d, r, p): a finite metric space with a 1-Lipschitz retraction r
and a 1-Lipschitz potential p vanishing exactly on r[A]."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import InvalidSpecError, InvalidTripleError, NotIsometricError, ShapeError
from .metric import (
    Embedding,
    FiniteMetricSpace,
    KatetovFunction,
    ValidationReport,
    Violation,
    isometric_extensions,
    katetov_violations,
    validate_metric,
)
from .scalar import ZERO, Scalar, ScalarLike, smax, smin


class Triple:
    __slots__ = ("space", "retraction", "potential")

    def __init__(
        self,
        space: FiniteMetricSpace,
        retraction: Sequence[int],
        potential: Iterable[ScalarLike],
    ) -> None:
        r = tuple(int(v) for v in retraction)
        p = tuple(Scalar.coerce(v) for v in potential)
        n = len(space)
        if len(r) != n or len(p) != n:
            raise ShapeError(f"retraction/potential must have {n} entries")
        if any(not 0 <= v < n for v in r):
            raise ShapeError("retraction maps outside the space")
        self.space = space
        self.retraction = r
        self.potential = p

    @classmethod
    def build(cls, points, dist, retraction, potential) -> "Triple":
        return cls(FiniteMetricSpace(points, dist), retraction, potential)

    def __len__(self) -> int:
        return len(self.space)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Triple):
            return NotImplemented
        return (
            self.retraction == other.retraction
            and self.potential == other.potential
            and self.space == other.space
        )

    def __hash__(self) -> int:
        return hash((self.space, self.retraction, self.potential))

    def __repr__(self) -> str:
        return (
            f"Triple(points={list(self.space.points)!r}, r={list(self.retraction)}, "
            f"p={[str(v) for v in self.potential]})"
        )

    @property
    def points(self) -> tuple[str, ...]:
        return self.space.points

    @property
    def dist(self):
        return self.space.dist

    def d(self, x: int, y: int) -> Scalar:
        return self.space.dist[x][y]

    def r(self, x: int) -> int:
        return self.retraction[x]

    def p(self, x: int) -> Scalar:
        return self.potential[x]

    def retract_points(self) -> list[int]:
        return [x for x in range(len(self)) if self.retraction[x] == x]

    def is_rational(self) -> bool:
        return self.space.is_rational() and all(v.is_rational() for v in self.potential)

    def is_closed(self, indices: Iterable[int]) -> bool:
        s = set(indices)
        return all(self.retraction[x] in s for x in s)

    def closure(self, indices: Iterable[int]) -> list[int]:
        s = set(indices)
        s |= {self.retraction[x] for x in s}
        return sorted(s)

    def subtriple(self, indices: Sequence[int]) -> "Triple":
        idx = list(indices)
        pos = {v: k for k, v in enumerate(idx)}
        try:
            r = [pos[self.retraction[v]] for v in idx]
        except KeyError as exc:
            raise InvalidTripleError(f"subset {idx} is not closed under the retraction") from exc
        return Triple(self.space.subspace(idx), r, [self.potential[v] for v in idx])

    def relabel(self, labels: Sequence[str]) -> "Triple":
        return Triple(self.space.relabel(labels), self.retraction, self.potential)

    def retract_distance(self, x: int) -> Scalar:
        row = self.space.dist[x]
        return smin(row[y] for y in self.retract_points())

    def potential_gap(self) -> Scalar:
        """Largest excess of the distance-to-retract over the potential."""
        return smax(self.retract_distance(x) - self.potential[x] for x in range(len(self)))


def triple_violations(t: Triple, realizable: bool = True) -> list[Violation]:
    out = list(validate_metric(t.space))
    n = len(t)
    d, r, p = t.space.dist, t.retraction, t.potential
    for x in range(n):
        if r[r[x]] != r[x]:
            out.append(Violation("idempotence", (x,), f"r(r({x})) != r({x})"))
        if p[x].sign() < 0:
            out.append(Violation("potential-negative", (x,), str(p[x])))
        fixed = r[x] == x
        zero = p[x] == 0
        if fixed != zero:
            out.append(Violation("zero-set", (x,), f"r(x)==x is {fixed}, p(x)={p[x]}"))
    for x in range(n):
        for y in range(x + 1, n):
            dxy = d[x][y]
            if d[r[x]][r[y]] > dxy:
                out.append(Violation("retraction-lipschitz", (x, y)))
            if abs(p[x] - p[y]) > dxy:
                out.append(Violation("potential-lipschitz", (x, y)))
    retract = [x for x in range(n) if r[x] == x]
    if retract:
        for x in range(n):
            if p[x] > smin(d[x][y] for y in retract):
                out.append(Violation("potential-exceeds-retract-distance", (x,)))
    if realizable:
        for x in range(n):
            if r[x] != x and d[x][r[x]] > 2 * p[x]:
                out.append(
                    Violation("realizability", (x,), f"d(x,r(x))={d[x][r[x]]} > 2p(x)={2 * p[x]}")
                )
    return out


def validate_triple(t: Triple, realizable: bool = True) -> ValidationReport:
    """Every violated triple invariant with witnesses; empty iff valid.

    ``realizable=False`` drops the d(x, r(x)) <= 2 p(x) condition.
    """
    return ValidationReport(tuple(triple_violations(t, realizable)))


def ensure_valid(t: Triple, realizable: bool = True, what: str = "triple") -> Triple:
    report = validate_triple(t, realizable)
    if report:
        raise InvalidTripleError(f"{what} is invalid: {list(report)[:5]}")
    return t


# -- one-point extensions --------------------------------------------------------


@dataclass(frozen=True)
class NewRetractPoint:
    def __str__(self) -> str:
        return "new-retract-point"


@dataclass(frozen=True)
class AttachTo:
    c0: int

    def __str__(self) -> str:
        return f"attach-to({self.c0})"


RetractMode = Union[NewRetractPoint, AttachTo]


@dataclass(frozen=True)
class ExtensionSpec:
    base: Triple
    f: KatetovFunction
    retract_mode: RetractMode
    new_potential: Scalar

    def __init__(self, base: Triple, f, retract_mode: RetractMode, new_potential: ScalarLike = ZERO):
        if not isinstance(f, KatetovFunction):
            f = KatetovFunction(base.space, f)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "retract_mode", retract_mode)
        object.__setattr__(self, "new_potential", Scalar.coerce(new_potential))

    def violations(self) -> list[str]:
        return spec_violations(self.base, self.f.values, self.retract_mode, self.new_potential)

    @property
    def is_valid(self) -> bool:
        return not self.violations()


def spec_violations(t: Triple, f: Sequence[Scalar], mode: RetractMode, p_new: Scalar) -> list[str]:
    out = [str(v) for v in katetov_violations(t.space, f)]
    n = len(t)
    d, r, p = t.space.dist, t.retraction, t.potential
    if isinstance(mode, NewRetractPoint):
        if p_new != 0:
            out.append("new retract point needs potential 0")
        for y in range(n):
            if f[r[y]] > f[y]:
                out.append(f"f(r({y})) > f({y})")
            if p[y] > f[y]:
                out.append(f"p({y}) > f({y})")
    elif isinstance(mode, AttachTo):
        c0 = mode.c0
        if not (0 <= c0 < n) or r[c0] != c0:
            out.append(f"{c0} is not a retract point")
            return out
        if p_new.sign() <= 0:
            out.append("attached point needs positive potential")
        for y in range(n):
            if d[c0][r[y]] > f[y]:
                out.append(f"d(c0, r({y})) > f({y})")
            if abs(p_new - p[y]) > f[y]:
                out.append(f"|p' - p({y})| > f({y})")
        if f[c0] > 2 * p_new:
            out.append("f(c0) > 2p' (realizability)")
    else:
        out.append(f"unknown retract mode {mode!r}")
    return out


def rational_grid(denom_bound: int, upper: ScalarLike) -> list[Fraction]:
    """Reduced rationals q with 0 < q <= upper and denominator <= denom_bound."""
    hi = Scalar.coerce(upper)
    values = set()
    for den in range(1, denom_bound + 1):
        num = 1
        while Scalar.coerce(Fraction(num, den)) <= hi:
            values.add(Fraction(num, den))
            num += 1
    return sorted(values)


def enumerate_one_point_extensions(
    t: Triple, denom_bound: int, diam_bound: ScalarLike
) -> list[ExtensionSpec]:
    """All valid specs on the rational grid, new-retract specs first, then
    attach specs by c0; f lexicographic within each mode, then the potential."""
    if denom_bound <= 0 or Scalar.coerce(diam_bound).sign() <= 0:
        raise ValueError("bounds must be positive")
    grid = [Scalar.coerce(q) for q in rational_grid(denom_bound, diam_bound)]
    n = len(t)
    katetov = [
        fv for fv in itertools.product(grid, repeat=n) if not katetov_violations(t.space, fv)
    ]
    new_retract: list[ExtensionSpec] = []
    attach: list[ExtensionSpec] = []
    mode_new = NewRetractPoint()
    for fv in katetov:
        if not spec_violations(t, fv, mode_new, ZERO):
            new_retract.append(ExtensionSpec(t, fv, mode_new, ZERO))
    for c0 in t.retract_points():
        mode = AttachTo(c0)
        for fv in katetov:
            for q in grid:
                if not spec_violations(t, fv, mode, q):
                    attach.append(ExtensionSpec(t, fv, mode, q))
    return new_retract + attach


def apply_extension(t: Triple, spec: ExtensionSpec, label: str = "b") -> Triple:
    if spec.base != t:
        raise InvalidSpecError("extension spec was built for a different triple")
    bad = spec.violations()
    if bad:
        raise InvalidSpecError(f"invalid extension spec: {bad[:4]}")
    return _extend_unchecked(t, spec.f.values, spec.retract_mode, spec.new_potential, label)


def _extend_unchecked(t: Triple, f, mode: RetractMode, p_new: Scalar, label: str) -> Triple:
    n = len(t)
    label = t.space.fresh_label(label)
    rows = [list(row) + [f[k]] for k, row in enumerate(t.space.dist)]
    rows.append(list(f) + [ZERO])
    r_new = n if isinstance(mode, NewRetractPoint) else mode.c0
    return Triple(
        FiniteMetricSpace(t.space.points + (label,), rows),
        t.retraction + (r_new,),
        t.potential + (Scalar.coerce(p_new),),
    )


# -- embeddings of triples ----------------------------------------------------------


@dataclass(frozen=True)
class DiscrepancyReport:
    max_commutation_gap: Scalar
    max_potential_gap: Scalar

    @property
    def exact(self) -> bool:
        return self.max_commutation_gap == 0 and self.max_potential_gap == 0

    def below(self, eps: ScalarLike) -> bool:
        return self.max_commutation_gap < eps and self.max_potential_gap < eps


def commutation_gap(ambient: Triple, mapping: Sequence[int], small: Triple, x: int) -> Scalar:
    return ambient.space.dist[ambient.retraction[mapping[x]]][mapping[small.retraction[x]]]


def potential_gap(ambient: Triple, mapping: Sequence[int], small: Triple, x: int) -> Scalar:
    return abs(ambient.potential[mapping[x]] - small.potential[x])


def _discrepancy(ambient: Triple, mapping: Sequence[int], small: Triple) -> DiscrepancyReport:
    n = len(small)
    if n == 0:
        return DiscrepancyReport(ZERO, ZERO)
    return DiscrepancyReport(
        smax(commutation_gap(ambient, mapping, small, x) for x in range(n)),
        smax(potential_gap(ambient, mapping, small, x) for x in range(n)),
    )


def discrepancy(ambient: Triple, i: Embedding | Sequence[int], small: Triple) -> DiscrepancyReport:
    """How far an isometric embedding is from commuting with (U, D)."""
    mapping = i.mapping if isinstance(i, Embedding) else tuple(i)
    if len(mapping) != len(small):
        raise ShapeError("embedding does not cover the small triple")
    d_amb, d_small = ambient.space.dist, small.space.dist
    for x in range(len(mapping)):
        for y in range(x + 1, len(mapping)):
            if d_amb[mapping[x]][mapping[y]] != d_small[x][y]:
                raise NotIsometricError(f"embedding distorts the pair ({x}, {y})")
    return _discrepancy(ambient, mapping, small)


def find_commuting_embeddings(
    small: Triple, ambient: Triple, tol: ScalarLike = ZERO
) -> list[tuple[Embedding, DiscrepancyReport]]:
    """Isometric embeddings whose commutation and potential gaps are <= tol."""
    tol_s = Scalar.coerce(tol)
    if tol_s.sign() < 0:
        raise ValueError("tolerance must be nonnegative")
    r_small = small.retraction
    p_small = small.potential
    amb_d, amb_r, amb_p = ambient.space.dist, ambient.retraction, ambient.potential

    def accept(x: int, t: int, partial: list[int]) -> bool:
        if abs(amb_p[t] - p_small[x]) > tol_s:
            return False
        rx = r_small[x]
        if rx == x:
            if amb_d[amb_r[t]][t] > tol_s:
                return False
        elif rx < x and amb_d[amb_r[t]][partial[rx]] > tol_s:
            return False
        # earlier points whose retraction image is x
        for y in range(x):
            if r_small[y] == x and amb_d[amb_r[partial[y]]][t] > tol_s:
                return False
        return True

    out = []
    for m in isometric_extensions(small.space, ambient.space, accept):
        out.append((Embedding(small.space, ambient.space, m, ZERO), _discrepancy(ambient, m, small)))
    return out


def is_subtriple_prefix(small: Triple, big: Triple) -> bool:
    """True when the first |small| points of big carry exactly small's data."""
    n = len(small)
    if len(big) < n:
        return False
    if big.space.points[:n] != small.space.points:
        return False
    if big.retraction[:n] != small.retraction or big.potential[:n] != small.potential:
        return False
    return all(big.space.dist[x][:n] == small.space.dist[x] for x in range(n))


def realizes(ambient: Triple, point: int, mapping: Mapping[int, int] | Sequence[int], spec_f, mode_target, p_new) -> bool:
    """Does ambient ``point`` realize a one-point extension over the image
    ``mapping`` (distances f, retraction image ``mode_target`` where None
    means "the point itself", potential p_new)?"""
    row = ambient.space.dist[point]
    items = mapping.items() if isinstance(mapping, Mapping) else enumerate(mapping)
    for k, t in items:
        if t == point or row[t] != spec_f[k]:
            return False
    if ambient.potential[point] != p_new:
        return False
    target = point if mode_target is None else mode_target
    return ambient.retraction[point] == target
