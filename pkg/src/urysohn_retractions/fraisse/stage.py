"""The ambient stage: a growing finite triple standing in for (U0, U, D).

Stages are immutable; every growing operation returns a new stage whose
triple has the old one as an exact prefix.
"""

from __future__ import annotations

import itertools
import os
import time
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from ..amalgam import SharedPart, amalgamate_max_with_map
from ..errors import BudgetExceededError, PreconditionError, ShapeError
from ..metric import Embedding, FiniteMetricSpace
from ..scalar import ZERO, Scalar, ScalarLike
from ..triple import (
    ExtensionSpec,
    NewRetractPoint,
    Triple,
    enumerate_one_point_extensions,
)


@dataclass(frozen=True)
class AbsorptionRecord:
    generation: int
    kind: str  # "absorb" or "build"
    added: tuple[int, ...]
    note: str = ""


def single_point_triple(label: str = "o") -> Triple:
    return Triple(FiniteMetricSpace([label], [[0]]), [0], [0])


class AmbientStage:
    __slots__ = ("triple", "generation", "absorbed")

    def __init__(
        self,
        triple: Triple,
        generation: int = 0,
        absorbed: Sequence[AbsorptionRecord] = (),
    ) -> None:
        self.triple = triple
        self.generation = generation
        self.absorbed = tuple(absorbed)

    @classmethod
    def initial(cls, triple: Triple | None = None) -> "AmbientStage":
        return cls(triple if triple is not None else single_point_triple())

    def __len__(self) -> int:
        return len(self.triple)

    def __repr__(self) -> str:
        return f"AmbientStage(points={len(self.triple)}, generation={self.generation})"

    def absorb(
        self, t: Triple, partial: Mapping[int, int] | Embedding | Sequence[int]
    ) -> tuple["AmbientStage", Embedding]:
        return absorb(self, t, partial)

    def build(self, denom_bound: int, diam_bound: ScalarLike, sub_size_bound: int, **kw) -> "AmbientStage":
        return build_stage(self, denom_bound, diam_bound, sub_size_bound, **kw)


def _partial_dict(partial, t: Triple) -> dict[int, int]:
    if isinstance(partial, Embedding):
        return dict(enumerate(partial.mapping))
    if isinstance(partial, Mapping):
        return {int(k): int(v) for k, v in partial.items()}
    return dict(enumerate(int(v) for v in partial))


def check_commuting_partial(stage_triple: Triple, t: Triple, part: Mapping[int, int]) -> None:
    amb = stage_triple
    for x, s in part.items():
        if not (0 <= x < len(t) and 0 <= s < len(amb)):
            raise ShapeError("partial embedding refers to missing points")
    if len(set(part.values())) != len(part):
        raise PreconditionError("partial embedding is not injective")
    for x, s in part.items():
        rx = t.retraction[x]
        if rx not in part:
            raise PreconditionError("the domain of the partial embedding is not a sub-triple")
        for y, s2 in part.items():
            if amb.space.dist[s][s2] != t.space.dist[x][y]:
                raise PreconditionError(f"partial embedding is not isometric at ({x}, {y})")
        if amb.retraction[s] != part[rx]:
            raise PreconditionError(f"partial embedding does not commute with U at {x}")
        if amb.potential[s] != t.potential[x]:
            raise PreconditionError(f"partial embedding has a potential gap at {x}")


def absorb(
    stage: AmbientStage, t: Triple, partial: Mapping[int, int] | Embedding | Sequence[int]
) -> tuple[AmbientStage, Embedding]:
    """Glue ``t`` onto the stage by maximal amalgamation over the embedded part."""
    part = _partial_dict(partial, t)
    if not part:
        raise PreconditionError("absorption needs a nonempty embedded sub-triple")
    check_commuting_partial(stage.triple, t, part)
    if len(part) == len(t):
        mapping = [part[x] for x in range(len(t))]
        return stage, Embedding(t.space, stage.triple.space, mapping, ZERO)
    corr = {s: x for x, s in part.items()}
    glued, right_map = amalgamate_max_with_map(SharedPart(stage.triple, t, corr))
    added = tuple(range(len(stage.triple), len(glued)))
    record = AbsorptionRecord(stage.generation + 1, "absorb", added, f"{len(added)} point(s)")
    new_stage = AmbientStage(glued, stage.generation + 1, stage.absorbed + (record,))
    return new_stage, Embedding(t.space, glued.space, right_map, ZERO)


# -- incremental builder ----------------------------------------------------------------------


class _Builder:
    """Mutable stage under construction; points are only ever appended."""

    def __init__(self, t: Triple) -> None:
        self.labels = list(t.space.points)
        self.taken = set(self.labels)
        self.rows = [list(row) for row in t.space.dist]
        self.r = list(t.retraction)
        self.p = list(t.potential)

    def __len__(self) -> int:
        return len(self.r)

    def realizer(self, image: Sequence[int], f: Sequence[Scalar], mode, p_new: Scalar) -> int | None:
        rows = self.rows
        first, f0 = image[0], f[0]
        row0 = rows[first]
        for cand in range(len(self.r)):
            if row0[cand] != f0 or self.p[cand] != p_new:
                continue
            want = cand if isinstance(mode, NewRetractPoint) else image[mode.c0]
            if self.r[cand] != want:
                continue
            crow = rows[cand]
            if all(crow[s] == fv for s, fv in zip(image, f)):
                return cand
        return None

    def add(self, image: Sequence[int], f: Sequence[Scalar], mode, p_new: Scalar, label: str) -> int:
        rows = self.rows
        n = len(self.r)
        new_row = []
        for x in range(n):
            rx = rows[x]
            best = None
            for s, fv in zip(image, f):
                v = fv + rx[s]
                if best is None or v < best:
                    best = v
            new_row.append(best)
        for x in range(n):
            rows[x].append(new_row[x])
        new_row.append(ZERO)
        rows.append(new_row)
        while label in self.taken:
            label += "'"
        self.taken.add(label)
        self.labels.append(label)
        self.r.append(n if isinstance(mode, NewRetractPoint) else image[mode.c0])
        self.p.append(p_new)
        return n

    def freeze(self) -> Triple:
        space = FiniteMetricSpace._trusted(tuple(self.labels), tuple(tuple(row) for row in self.rows))
        return Triple(space, self.r, self.p)


def subtriples(t: Triple, size_bound: int) -> Iterator[tuple[int, ...]]:
    """Index sets closed under the retraction, by size and then lexicographically."""
    n = len(t)
    r = t.retraction
    for k in range(1, size_bound + 1):
        for combo in itertools.combinations(range(n), k):
            s = set(combo)
            if all(r[x] in s for x in combo):
                yield combo


def _env_ceiling(name: str) -> int | None:
    raw = os.environ.get(name)
    return int(raw) if raw else None


def build_stage(
    stage: AmbientStage,
    denom_bound: int,
    diam_bound: ScalarLike,
    sub_size_bound: int,
    max_points: int | None = None,
    time_budget: float | None = None,
    within: int | None = None,
) -> AmbientStage:
    """Realize every grid-bounded one-point extension of every small sub-triple.

    Sub-triples are visited in order of size and then lexicographically, specs
    in enumeration order; an extension already realized over the inclusion is
    skipped. ``within`` restricts sub-triples to the first ``within`` points,
    so rebuilding a stage over its predecessor's points adds nothing.
    """
    if denom_bound <= 0 or sub_size_bound <= 0:
        raise ValueError("bounds must be positive")
    if within is not None and not 0 <= within <= len(stage.triple):
        raise ValueError("within must not exceed the stage size")
    diam = Scalar.coerce(diam_bound)
    if max_points is None:
        max_points = _env_ceiling("URYSOHN_MAX_POINTS")
    if time_budget is None:
        env = os.environ.get("URYSOHN_MAX_SECONDS")
        time_budget = float(env) if env else None
    start = time.monotonic()
    base = stage.triple
    builder = _Builder(base)
    records: list[AbsorptionRecord] = []
    gen = stage.generation + 1

    def partial_stage() -> AmbientStage:
        return AmbientStage(builder.freeze(), gen, stage.absorbed + tuple(records))

    scope = base if within is None else base.subtriple(range(within))
    if diam.sign() > 0:
        for combo in subtriples(scope, sub_size_bound):
            sub = base.subtriple(combo)
            for spec in enumerate_one_point_extensions(sub, denom_bound, diam):
                f = spec.f.values
                if builder.realizer(combo, f, spec.retract_mode, spec.new_potential) is not None:
                    continue
                if max_points is not None and len(builder) >= max_points:
                    raise BudgetExceededError(
                        f"stage would exceed {max_points} points", partial=partial_stage()
                    )
                if time_budget is not None and time.monotonic() - start > time_budget:
                    raise BudgetExceededError(
                        f"stage build exceeded {time_budget} s", partial=partial_stage()
                    )
                idx = builder.add(combo, f, spec.retract_mode, spec.new_potential, f"g{gen}_{len(builder)}")
                records.append(
                    AbsorptionRecord(gen, "build", (idx,), f"sub={list(combo)} {spec.retract_mode}")
                )
    if not records:
        return AmbientStage(base, gen, stage.absorbed)
    return partial_stage()


# -- checks ----------------------------------------------------------------------------------


def is_exact_prefix(old: Triple, new: Triple) -> bool:
    n = len(old)
    if len(new) < n:
        return False
    if new.retraction[:n] != old.retraction or new.potential[:n] != old.potential:
        return False
    if new.space.points[:n] != old.space.points:
        return False
    return all(new.space.dist[x][:n] == old.space.dist[x] for x in range(n))


def realizing_point(
    stage_triple: Triple, image: Sequence[int], spec: ExtensionSpec
) -> int | None:
    """A stage point realizing ``spec`` over the sub-triple at ``image``."""
    d, r, p = stage_triple.space.dist, stage_triple.retraction, stage_triple.potential
    f = spec.f.values
    mode = spec.retract_mode
    for cand in range(len(stage_triple)):
        if p[cand] != spec.new_potential:
            continue
        want = cand if isinstance(mode, NewRetractPoint) else image[mode.c0]
        if r[cand] != want:
            continue
        row = d[cand]
        if all(row[s] == fv for s, fv in zip(image, f)):
            return cand
    return None


@dataclass(frozen=True)
class GenericityReport:
    checked: int
    missing: tuple[tuple[tuple[int, ...], ExtensionSpec], ...]

    @property
    def ok(self) -> bool:
        return not self.missing


def check_genericity(
    before: AmbientStage | Triple,
    after: AmbientStage | Triple,
    denom_bound: int,
    diam_bound: ScalarLike,
    sub_size_bound: int,
) -> GenericityReport:
    """Every bounded extension of every small sub-triple of ``before`` is
    realized in ``after`` over the inclusion map."""
    old = before.triple if isinstance(before, AmbientStage) else before
    new = after.triple if isinstance(after, AmbientStage) else after
    missing = []
    checked = 0
    for combo in subtriples(old, sub_size_bound):
        sub = old.subtriple(combo)
        for spec in enumerate_one_point_extensions(sub, denom_bound, diam_bound):
            checked += 1
            if realizing_point(new, combo, spec) is None:
                missing.append((combo, spec))
    return GenericityReport(checked, tuple(missing))


# bounds per generation: the full (2, 2, 2) pass first, then tapered passes
# so that the third generation stays near a hundred points
STANDARD_SCHEDULE: tuple[tuple[int, int, int], ...] = ((2, 2, 2), (2, 2, 1), (1, 2, 1))


def grow(
    stage: AmbientStage, schedule: Sequence[tuple[int, ScalarLike, int]] = STANDARD_SCHEDULE, **kw
) -> list[AmbientStage]:
    """Apply build_stage once per schedule entry; returns every generation, input first."""
    out = [stage]
    for denom, diam, sub in schedule:
        out.append(build_stage(out[-1], denom, diam, sub, **kw))
    return out
