"""Rationalization of triples and nearby rational embeddings.

:func:`rationalize_triple` turns a triple over Q(sqrt 2) into a rational one
whose metric lies in [d, d + eps] and whose potential is eps-close, keeping a
frozen rational block untouched. It works in three passes: first it breaks
every degenerate triangle that involves an irrational side, then it rounds
distances up into short rational windows, and finally it shrinks and rounds
the potential.

:func:`nearby_rational_embedding` grows an ambient stage so that it contains
an exact copy of a rational space that is close to an embedded one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Optional, Union

from .amalgam import regularize_matrix
from .errors import InvalidTripleError, PreconditionError, ShapeError
from .metric import Embedding, FiniteMetricSpace
from .scalar import ZERO, Scalar, ScalarLike, rational_in_interval, smax, smin
from .triple import Triple, ensure_valid, validate_triple

if TYPE_CHECKING:  # pragma: no cover
    from .fraisse.stage import AmbientStage


@dataclass(frozen=True)
class PairDecision:
    x: int
    y: int
    d: Scalar
    eta: Scalar
    rho: Scalar
    branch: str  # "rational", "retract-pair" or "general"


@dataclass(frozen=True)
class PotentialDecision:
    x: int
    p: Scalar
    scaled: Scalar
    new: Scalar


@dataclass(frozen=True)
class RationalizationTrace:
    additive_triples: tuple[tuple[int, int, int], ...]
    distances_b: tuple[Scalar, ...]
    irrational_c: tuple[Scalar, ...]
    eps: Fraction
    eps0: Optional[Scalar]
    eps1: Optional[Scalar]
    eps2: Optional[Scalar]
    eps3: Optional[Scalar]
    eps4: Optional[Scalar]
    eps5: Optional[Scalar]
    scale: Fraction
    pairs: tuple[PairDecision, ...]
    potentials: tuple[PotentialDecision, ...]
    conflicts: tuple[tuple[int, int, Scalar, Scalar], ...] = ()


def _min_positive(values: Iterable[Scalar]) -> Optional[Scalar]:
    best = None
    for v in values:
        if v.sign() > 0 and (best is None or v < best):
            best = v
    return best


def _min_opt(*values: Optional[Scalar]) -> Scalar:
    # None stands for +infinity; at least one argument must be finite
    return smin(v for v in values if v is not None)


def _triangle_slacks(d, n):
    for x in range(n):
        for y in range(n):
            if y == x:
                continue
            for z in range(n):
                if z == x or z == y:
                    continue
                yield d[x][y] + d[y][z] - d[x][z]


def _lipschitz_slacks(d, r, n):
    for x in range(n):
        for y in range(x + 1, n):
            yield d[x][y] - d[r[x]][r[y]]


def rationalize_triple(
    t: Triple, eps: ScalarLike, frozen: Iterable[int] = ()
) -> tuple[Triple, RationalizationTrace]:
    eps_q = Scalar.coerce(eps)
    if not eps_q.is_rational():
        raise ValueError("eps must be rational")
    if eps_q.sign() <= 0:
        raise ValueError("eps must be positive")
    eps_f = eps_q.rat
    n = len(t)
    d = t.space.dist
    r = t.retraction
    p = t.potential
    frozen_set = sorted(set(frozen))
    for x in frozen_set:
        for y in frozen_set:
            if not d[x][y].is_rational():
                raise PreconditionError(f"frozen distance d({x}, {y}) is irrational")

    # step 1: strong triangle inequality on additive triples with an irrational side
    additive: list[tuple[int, int, int]] = []
    b_set: set[Scalar] = set()
    for x in range(n):
        for z in range(x + 1, n):
            for y in range(n):
                if y == x or y == z:
                    continue
                sides = (d[x][y], d[y][z], d[x][z])
                if d[x][z] == sides[0] + sides[1] and not all(s.is_rational() for s in sides):
                    additive.append((x, y, z))
                    b_set.update(sides)
    c_sorted = sorted((v for v in b_set if not v.is_rational()), key=lambda s: s)
    c_index = {v: k + 1 for k, v in enumerate(c_sorted)}
    eps1 = _min_positive(_triangle_slacks(d, n))
    eps2 = _min_positive(_lipschitz_slacks(d, r, n))
    eps0 = _min_opt(eps_q, eps1, eps2) / 2

    eta = [list(row) for row in d]

    def bump(v: Scalar) -> Scalar:
        return v + eps0 / (2 ** c_index[v])

    touched: set[tuple[int, int]] = set()
    for x, y, z in additive:
        for u, v in ((x, y), (y, z), (x, z)):
            if d[u][v] in c_index:
                eta[u][v] = eta[v][u] = bump(d[u][v])
                touched.add((min(u, v), max(u, v)))
    conflicts = []
    for u2 in range(n):
        for v2 in range(u2 + 1, n):
            u, v = r[u2], r[v2]
            key = (min(u, v), max(u, v))
            if key in touched and d[u2][v2] == d[u][v] and (u2, v2) != key:
                target = eta[u][v]
                if (u2, v2) in touched and eta[u2][v2] != target:
                    conflicts.append((u2, v2, eta[u2][v2], target))
                eta[u2][v2] = eta[v2][u2] = target
    for x, y, z in additive:
        if not eta[x][z] < eta[x][y] + eta[y][z]:
            raise ArithmeticError(f"strong triangle inequality failed at {(x, y, z)}")

    # step 2: round distances into rational windows
    eps3 = _min_positive(_triangle_slacks(eta, n))
    eps4 = _min_positive(_lipschitz_slacks(eta, r, n))
    eps5 = _min_opt(eps_q / 4, eps3, eps4)
    retract = {x for x in range(n) if r[x] == x}
    rho = [[ZERO] * n for _ in range(n)]
    pairs = []
    for x in range(n):
        for y in range(x + 1, n):
            e = eta[x][y]
            if e.is_rational():
                val, branch = e, "rational"
            elif x in retract and y in retract:
                val = Scalar.coerce(rational_in_interval(e, e + eps5 / 2))
                branch = "retract-pair"
            else:
                val = Scalar.coerce(rational_in_interval(e + eps5 / 2, e + eps5))
                branch = "general"
            rho[x][y] = rho[y][x] = val
            pairs.append(PairDecision(x, y, d[x][y], e, val, branch))

    # step 3: shrink and round the potential
    pot_decisions = []
    if all(v.is_rational() for v in p):
        a = Fraction(1)
        new_p = list(p)
        for x in range(n):
            pot_decisions.append(PotentialDecision(x, p[x], p[x], p[x]))
    else:
        top = smax(p)
        lower = Scalar.coerce(1) - eps_q / (2 * top)
        a = rational_in_interval(lower if lower.sign() > 0 else ZERO, 1)
        scaled = [v * a for v in p]
        m = _min_positive(
            rho[x][y] - abs(scaled[x] - scaled[y]) for x in range(n) for y in range(x + 1, n)
        )
        delta = _min_opt(m, eps_q) / 2
        new_p = []
        for x in range(n):
            s = scaled[x]
            v = s if s.is_rational() else Scalar.coerce(rational_in_interval(s, s + delta))
            new_p.append(v)
            pot_decisions.append(PotentialDecision(x, p[x], s, v))

    out = Triple(
        FiniteMetricSpace._trusted(t.space.points, tuple(tuple(row) for row in rho)), r, new_p
    )
    for x, y, z in additive:
        if not rho[x][z] < rho[x][y] + rho[y][z]:
            raise ArithmeticError(f"strong triangle inequality lost at {(x, y, z)}")
    ensure_valid(out, realizable=False, what="rationalized triple")
    trace = RationalizationTrace(
        additive_triples=tuple(additive),
        distances_b=tuple(sorted(b_set, key=lambda s: s)),
        irrational_c=tuple(c_sorted),
        eps=eps_f,
        eps0=eps0,
        eps1=eps1,
        eps2=eps2,
        eps3=eps3,
        eps4=eps4,
        eps5=eps5,
        scale=a,
        pairs=tuple(pairs),
        potentials=tuple(pot_decisions),
        conflicts=tuple(conflicts),
    )
    return out, trace


# -- nearby rational embedding -------------------------------------------------------------


@dataclass(frozen=True)
class NearbyEmbedding:
    stage: "AmbientStage"
    embedding: Embedding
    displacement: tuple[Scalar, ...]
    rounds: int


def nearby_rational_embedding(
    stage: "AmbientStage",
    i: Embedding,
    target: Union[FiniteMetricSpace, Triple],
    eps: ScalarLike,
) -> tuple["AmbientStage", Embedding]:
    """Grow ``stage`` to hold an exact copy of ``target`` near ``i``'s image."""
    res = nearby_rational_embedding_report(stage, i, target, eps)
    return res.stage, res.embedding


def nearby_rational_embedding_report(
    stage: "AmbientStage",
    i: Embedding,
    target: Union[FiniteMetricSpace, Triple],
    eps: ScalarLike,
) -> NearbyEmbedding:
    eps_s = Scalar.coerce(eps)
    if eps_s.sign() <= 0:
        raise ValueError("eps must be positive")
    amb = stage.triple
    tspace = target.space if isinstance(target, Triple) else target
    n = len(tspace)
    src = i.source
    if len(src) != n:
        raise ShapeError("target must have as many points as the embedded space")
    if not tspace.is_rational():
        raise PreconditionError("target metric must be rational")
    if isinstance(target, Triple) and not all(v.is_rational() for v in target.potential):
        raise PreconditionError("target potential must be rational")
    for x in range(n):
        for y in range(n):
            if not abs(src.dist[x][y] - tspace.dist[x][y]) < eps_s:
                raise PreconditionError(f"distances differ by at least eps at ({x}, {y})")
    mapping = list(i.mapping)
    for x in range(n):
        for y in range(x + 1, n):
            if amb.space.dist[mapping[x]][mapping[y]] != src.dist[x][y]:
                raise PreconditionError("i is not isometric into the stage")

    # S = i[A] + U[i[A]], a sub-triple of the stage
    s_pts = list(mapping)
    for s in mapping:
        u = amb.retraction[s]
        if u not in s_pts:
            s_pts.append(u)
    s_pos = {s: k for k, s in enumerate(s_pts)}
    m = len(s_pts)
    ad = amb.space.dist
    half = eps_s / 2
    size = n + m
    eta = [[ZERO] * size for _ in range(size)]
    for x in range(n):
        for y in range(n):
            eta[x][y] = tspace.dist[x][y]
    for k, s in enumerate(s_pts):
        for l, s2 in enumerate(s_pts):
            eta[n + k][n + l] = ad[s][s2]
    for x in range(n):
        for k, s in enumerate(s_pts):
            if k == x:
                v = half
            else:
                v = half + smin(tspace.dist[x][q] + ad[mapping[q]][s] for q in range(n))
            eta[x][n + k] = eta[n + k][x] = v

    r = [0] * size
    p = [ZERO] * size
    for k, s in enumerate(s_pts):
        r[n + k] = n + s_pos[amb.retraction[s]]
        p[n + k] = amb.potential[s]
    if isinstance(target, Triple):
        for x in range(n):
            r[x] = target.retraction[x]
            p[x] = target.potential[x]
    else:
        # copy the retraction pattern of the embedded points
        for x in range(n):
            b = mapping[x]
            u = amb.retraction[b]
            if u == b:
                r[x], p[x] = x, ZERO
            else:
                r[x] = mapping.index(u) if u in mapping[:n] else n + s_pos[u]
                p[x] = amb.potential[b]
        for x in range(n):
            if r[x] != x:
                need = eta[x][r[x]] / 2
                if need > p[x]:
                    p[x] = need
    rho, rounds = regularize_matrix(eta, r, p)
    for x in range(n):
        for y in range(n):
            if rho[x][y] != tspace.dist[x][y]:
                raise PreconditionError("the copied structure does not fit the target metric")
    labels = [f"{lab}" for lab in tspace.points] + [amb.space.points[s] for s in s_pts]
    seen: set[str] = set()
    uniq = []
    for lab in labels:
        while lab in seen:
            lab += "'"
        seen.add(lab)
        uniq.append(lab)
    combined = Triple(FiniteMetricSpace._trusted(tuple(uniq), tuple(map(tuple, rho))), r, p)
    report = validate_triple(combined)
    if report:
        raise InvalidTripleError(f"combined bridge triple is invalid: {list(report)[:3]}")
    partial = {n + k: s for k, s in enumerate(s_pts)}
    new_stage, emb = stage.absorb(combined, partial)
    copy = Embedding(tspace, new_stage.triple.space, emb.mapping[:n], ZERO)
    disp = tuple(new_stage.triple.space.dist[mapping[x]][copy.mapping[x]] for x in range(n))
    return NearbyEmbedding(new_stage, copy, disp, rounds)
