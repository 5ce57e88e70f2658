"""Finite metric spaces with exact Scalar distances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import DuplicateLabelError, InvalidKatetovError, ShapeError
from .scalar import ZERO, Scalar, ScalarLike, smin


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        # truthy when something is wrong, like a non-empty list
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def _coerce_matrix(dist) -> tuple[tuple[Scalar, ...], ...]:
    return tuple(tuple(Scalar.coerce(v) for v in row) for row in dist)


class FiniteMetricSpace:
    """Labelled points with a full square distance matrix.

    Construction checks shape and label uniqueness only; the metric axioms are
    checked by :func:`validate_metric`.
    """

    __slots__ = ("points", "dist", "_index")

    def __init__(self, points: Sequence[str], dist) -> None:
        pts = tuple(str(p) for p in points)
        mat = _coerce_matrix(dist)
        if len(mat) != len(pts) or any(len(row) != len(pts) for row in mat):
            raise ShapeError(
                f"distance matrix shape does not match {len(pts)} points"
            )
        index = {}
        for k, label in enumerate(pts):
            if label in index:
                raise DuplicateLabelError(f"duplicate label {label!r}")
            index[label] = k
        self.points = pts
        self.dist = mat
        self._index = index

    @classmethod
    def _trusted(cls, points: tuple[str, ...], dist: tuple[tuple[Scalar, ...], ...]) -> "FiniteMetricSpace":
        # internal fast path: caller guarantees Scalars, shape and unique labels
        obj = cls.__new__(cls)
        obj.points = points
        obj.dist = dist
        obj._index = {label: k for k, label in enumerate(points)}
        return obj

    @classmethod
    def from_function(
        cls, points: Sequence[str], d: Callable[[int, int], ScalarLike]
    ) -> "FiniteMetricSpace":
        n = len(points)
        return cls(points, [[ZERO if i == j else d(i, j) for j in range(n)] for i in range(n)])

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.points == other.points and self.dist == other.dist

    def __hash__(self) -> int:
        return hash((self.points, self.dist))

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(points={list(self.points)!r})"

    def index(self, label: str) -> int:
        return self._index[label]

    def d(self, x: int, y: int) -> Scalar:
        return self.dist[x][y]

    def subspace(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        return FiniteMetricSpace(
            [self.points[i] for i in indices],
            [[self.dist[i][j] for j in indices] for i in indices],
        )

    def relabel(self, labels: Sequence[str]) -> "FiniteMetricSpace":
        return FiniteMetricSpace(labels, self.dist)

    def fresh_label(self, base: str) -> str:
        label = base
        while label in self._index:
            label += "'"
        return label

    def is_rational(self) -> bool:
        return all(v.is_rational() for row in self.dist for v in row)

    def diameter(self) -> Scalar:
        best = ZERO
        for row in self.dist:
            for v in row:
                if v > best:
                    best = v
        return best


def validate_metric(space: FiniteMetricSpace) -> ValidationReport:
    """Every violated metric axiom, with the witnessing index tuple."""
    n = len(space)
    d = space.dist
    out: list[Violation] = []
    for x in range(n):
        if d[x][x] != 0:
            out.append(Violation("nonzero-diagonal", (x,), str(d[x][x])))
    for x in range(n):
        for y in range(x + 1, n):
            if d[x][y] != d[y][x]:
                out.append(Violation("symmetry", (x, y), f"{d[x][y]} != {d[y][x]}"))
            if d[x][y].sign() <= 0:
                out.append(Violation("positivity", (x, y), str(d[x][y])))
    for x in range(n):
        for z in range(n):
            if z == x:
                continue
            dxz = d[x][z]
            for y in range(n):
                if y == x or y == z:
                    continue
                if dxz > d[x][y] + d[y][z]:
                    out.append(Violation("triangle", (x, y, z), f"{dxz} > {d[x][y]} + {d[y][z]}"))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class KatetovFunction:
    base: FiniteMetricSpace
    values: tuple[Scalar, ...]

    def __init__(self, base: FiniteMetricSpace, values: Iterable[ScalarLike]) -> None:
        vals = tuple(Scalar.coerce(v) for v in values)
        if len(vals) != len(base):
            raise ShapeError(f"Katetov function needs {len(base)} values, got {len(vals)}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "values", vals)

    def __getitem__(self, k: int) -> Scalar:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)


def katetov_violations(base: FiniteMetricSpace, values: Sequence[Scalar]) -> list[tuple]:
    bad = []
    n = len(base)
    for x in range(n):
        if values[x].sign() <= 0:
            bad.append(("nonpositive", x))
    for x in range(n):
        for y in range(x + 1, n):
            dxy = base.dist[x][y]
            if abs(values[x] - values[y]) > dxy:
                bad.append(("lower", x, y))
            if dxy > values[x] + values[y]:
                bad.append(("upper", x, y))
    return bad


def katetov_validate(f: KatetovFunction) -> bool:
    return not katetov_violations(f.base, f.values)


def extend_one_point(
    space: FiniteMetricSpace, f: KatetovFunction, label: str
) -> FiniteMetricSpace:
    """Add a point whose distance to each old point x is f(x)."""
    if f.base != space:
        raise InvalidKatetovError("Katetov function is defined over a different space")
    if not katetov_validate(f):
        raise InvalidKatetovError(f"not a Katetov function: {katetov_violations(space, f.values)}")
    if label in space.points:
        raise DuplicateLabelError(f"label {label!r} already present")
    rows = [list(row) + [f.values[k]] for k, row in enumerate(space.dist)]
    rows.append(list(f.values) + [ZERO])
    return FiniteMetricSpace(space.points + (label,), rows)


def distance_to_subset(space: FiniteMetricSpace, x: int, subset: Iterable[int]) -> Scalar:
    s = list(subset)
    if not s:
        raise ValueError("distance to an empty subset is undefined")
    return smin(space.dist[x][y] for y in s)


class Embedding:
    """A map between point sets, recorded as target indices, with its distortion."""

    __slots__ = ("source", "target", "mapping", "max_distortion")

    def __init__(
        self,
        source: FiniteMetricSpace,
        target: FiniteMetricSpace,
        mapping: Sequence[int],
        max_distortion: ScalarLike | None = None,
    ) -> None:
        m = tuple(int(v) for v in mapping)
        if len(m) != len(source):
            raise ShapeError("mapping length differs from source size")
        if len(set(m)) != len(m):
            raise ValueError("embedding map is not injective")
        if any(not 0 <= v < len(target) for v in m):
            raise ShapeError("mapping refers to a point outside the target")
        self.source = source
        self.target = target
        self.mapping = m
        self.max_distortion = (
            measure_distortion(source, target, m)
            if max_distortion is None
            else Scalar.coerce(max_distortion)
        )

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def __len__(self) -> int:
        return len(self.mapping)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Embedding):
            return NotImplemented
        return (
            self.mapping == other.mapping
            and self.source == other.source
            and self.target == other.target
        )

    def __hash__(self) -> int:
        return hash(self.mapping)

    def __repr__(self) -> str:
        return f"Embedding({list(self.mapping)}, distortion={self.max_distortion})"

    @property
    def is_isometric(self) -> bool:
        return self.max_distortion == 0

    def compose(self, outer: "Embedding") -> "Embedding":
        """``outer`` after ``self``."""
        if outer.source != self.target:
            raise ShapeError("embeddings are not composable")
        return Embedding(self.source, outer.target, [outer.mapping[v] for v in self.mapping])

    def retarget(self, target: FiniteMetricSpace) -> "Embedding":
        """Same index map into a larger space that extends the old target."""
        return Embedding(self.source, target, self.mapping)


def measure_distortion(
    source: FiniteMetricSpace, target: FiniteMetricSpace, mapping: Sequence[int]
) -> Scalar:
    worst = ZERO
    n = len(mapping)
    for x in range(n):
        tx = target.dist[mapping[x]]
        sx = source.dist[x]
        for y in range(x + 1, n):
            gap = abs(tx[mapping[y]] - sx[y])
            if gap > worst:
                worst = gap
    return worst


def isometric_extensions(
    a: FiniteMetricSpace,
    b: FiniteMetricSpace,
    accept: Callable[[int, int, list[int]], bool] | None = None,
    fixed: Mapping[int, int] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Backtracking over injective isometric maps a -> b, lexicographic order.

    ``accept(x, t, partial)`` may prune assigning point x to target t given
    the partial assignment of points 0..x-1.
    """
    n, m = len(a), len(b)
    if n > m:
        return
    fixed = dict(fixed or {})
    assignment: list[int] = []
    used = [False] * m
    ad, bd = a.dist, b.dist

    def rec(x: int) -> Iterator[tuple[int, ...]]:
        if x == n:
            yield tuple(assignment)
            return
        candidates = [fixed[x]] if x in fixed else range(m)
        row = ad[x]
        for t in candidates:
            if used[t]:
                continue
            trow = bd[t]
            if any(trow[assignment[y]] != row[y] for y in range(x)):
                continue
            if accept is not None and not accept(x, t, assignment):
                continue
            used[t] = True
            assignment.append(t)
            yield from rec(x + 1)
            assignment.pop()
            used[t] = False

    yield from rec(0)


def find_isometric_embeddings(a: FiniteMetricSpace, b: FiniteMetricSpace) -> list[Embedding]:
    return [Embedding(a, b, m, ZERO) for m in isometric_extensions(a, b)]
