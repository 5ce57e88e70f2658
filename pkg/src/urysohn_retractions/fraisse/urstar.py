"""Bounded search for the approximate rational one-point extension property."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from ..errors import PreconditionError, ShapeError
from ..metric import Embedding
from ..scalar import ZERO, Scalar, ScalarLike, smax, smin
from ..triple import (
    AttachTo,
    NewRetractPoint,
    Triple,
    discrepancy,
    is_subtriple_prefix,
    rational_grid,
    spec_violations,
    _extend_unchecked,
)
from .stage import AmbientStage

DISPLACEMENT_FACTOR = 2
COMMUTATION_FACTOR = 5
POTENTIAL_FACTOR = 3


@dataclass(frozen=True)
class SearchBudget:
    max_candidates: int = 20000
    denom_bound: int = 4


@dataclass(frozen=True)
class UrStarVerdict:
    success: bool
    embedding: Embedding | None
    displacement: Scalar | None
    commutation: Scalar | None
    potential: Scalar | None
    budget_used: int
    stage: AmbientStage
    status: str  # "success" or "exhausted"; never a refutation

    def thresholds(self, eps: ScalarLike) -> tuple[Scalar, Scalar, Scalar]:
        e = Scalar.coerce(eps)
        return (DISPLACEMENT_FACTOR * e, COMMUTATION_FACTOR * e, POTENTIAL_FACTOR * e)


def _bounds(amb: Triple, mapping: Sequence[int], b: Triple, i_map: Sequence[int]):
    d, u, dd = amb.space.dist, amb.retraction, amb.potential
    n = len(i_map)
    disp = smax([d[i_map[x]][mapping[x]] for x in range(n)] or [ZERO])
    comm = smax(d[u[mapping[x]]][mapping[b.retraction[x]]] for x in range(len(b)))
    pot = smax(abs(dd[mapping[x]] - b.potential[x]) for x in range(len(b)))
    return disp, comm, pot


def _check_case(stage: AmbientStage, eps: Scalar, a: Triple, i: Embedding | Sequence[int], b: Triple) -> list[int]:
    if eps.sign() <= 0:
        raise ValueError("eps must be positive")
    n = len(a)
    if len(b) != n + 1 or not is_subtriple_prefix(a, b):
        raise ShapeError("B must be A followed by exactly one new point")
    if not b.is_rational():
        raise PreconditionError("B must be a rational triple")
    mapping = list(i.mapping if isinstance(i, Embedding) else i)
    rep = discrepancy(stage.triple, mapping, a)
    if not rep.below(eps):
        raise PreconditionError("i is not eps-commuting with (U, D)")
    return mapping


def _within(disp, comm, pot, eps: Scalar) -> bool:
    return disp < DISPLACEMENT_FACTOR * eps and comm < COMMUTATION_FACTOR * eps and pot < POTENTIAL_FACTOR * eps


def _extra_values(lo: Scalar, hi: Scalar, denom: int) -> list[Scalar]:
    vals = [hi]
    if lo != hi:
        vals.append(lo)
    for q in rational_grid(denom, hi):
        qs = Scalar.coerce(q)
        if lo < qs < hi:
            vals.append(qs)
    return vals


def _potential_values(target: Scalar, lower: Scalar, upper: Scalar, half_c0: Scalar, eps: Scalar, denom: int) -> list[Scalar]:
    window = POTENTIAL_FACTOR * eps
    cands = {target, half_c0, lower, upper}
    for q in rational_grid(denom, target + window):
        cands.add(Scalar.coerce(q))
    ok = [q for q in cands if q.sign() > 0 and abs(q - target) < window and lower <= q <= upper]
    return sorted(ok, key=lambda q: (abs(q - target), q.rat, q.irr))


def check_ur_star(
    stage: AmbientStage,
    eps: ScalarLike,
    a: Triple,
    i: Embedding | Sequence[int],
    b: Triple,
    budget: SearchBudget | None = None,
) -> UrStarVerdict:
    """Look for i' extending i (unchanged on A) to B within the stated bounds.

    Existing stage points are tried first, then one-point extensions of the
    sub-triple i[A] + U[i[A]]; a found extension is absorbed into the stage.
    Failure only means the bounded search space is exhausted.
    """
    eps_s = Scalar.coerce(eps)
    budget = budget or SearchBudget()
    mapping = _check_case(stage, eps_s, a, i, b)
    amb = stage.triple
    n = len(a)
    bd = b.space.dist
    f_a = [bd[n][x] for x in range(n)]
    rb, pb = b.retraction[n], b.potential[n]
    used = 0

    def exhausted() -> UrStarVerdict:
        return UrStarVerdict(False, None, None, None, None, used, stage, "exhausted")

    # existing points: the tightest (commutation, potential) witness wins
    image = set(mapping)
    ad = amb.space.dist
    best = None
    for s in range(len(amb)):
        if used >= budget.max_candidates:
            break
        if s in image:
            continue
        used += 1
        row = ad[s]
        if any(row[mapping[x]] != f_a[x] for x in range(n)):
            continue
        full = mapping + [s]
        disp, comm, pot = _bounds(amb, full, b, mapping)
        if _within(disp, comm, pot, eps_s) and (best is None or (comm, pot) < best[0]):
            best = ((comm, pot), full, disp)
    if best is not None:
        (comm, pot), full, disp = best
        emb = Embedding(b.space, amb.space, full, ZERO)
        return UrStarVerdict(True, emb, disp, comm, pot, used, stage, "success")
    if used >= budget.max_candidates:
        return exhausted()

    # one-point extensions over S = i[A] + U[i[A]]
    s_pts = list(mapping)
    for s in mapping:
        u = amb.retraction[s]
        if u not in s_pts:
            s_pts.append(u)
    sub = amb.subtriple(s_pts)
    sd, sr, sp = sub.space.dist, sub.retraction, sub.potential
    m = len(s_pts)
    extras = range(n, m)
    ranges = []
    for k in extras:
        hi = smin(f_a[x] + sd[x][k] for x in range(n))
        lo = smax(abs(f_a[x] - sd[x][k]) for x in range(n))
        ranges.append(_extra_values(lo, hi, budget.denom_bound))

    # where i'(r'(b)) must land; None means the new point itself
    target_pos = None if rb == n else rb
    modes: list = []
    if target_pos is None:
        modes.append(NewRetractPoint())
    retracts = [k for k in range(m) if sr[k] == k]
    if target_pos is not None:
        retracts.sort(key=lambda k: (sd[k][target_pos], k))
    modes.extend(AttachTo(k) for k in retracts)
    if target_pos is not None:
        modes.append(NewRetractPoint())

    for extra_vals in itertools.product(*ranges):
        f = list(f_a) + list(extra_vals)
        for mode in modes:
            if isinstance(mode, NewRetractPoint):
                p_cands = [ZERO]
            else:
                c0 = mode.c0
                lower = smax([ZERO] + [sp[y] - f[y] for y in range(m)] + [f[c0] / 2])
                upper = smin(sp[y] + f[y] for y in range(m))
                p_cands = _potential_values(pb, lower, upper, f[c0] / 2, eps_s, budget.denom_bound)
            for q in p_cands:
                if used >= budget.max_candidates:
                    return exhausted()
                used += 1
                if isinstance(mode, NewRetractPoint):
                    comm_b = ZERO if target_pos is None else f[target_pos]
                else:
                    comm_b = f[mode.c0] if target_pos is None else sd[mode.c0][target_pos]
                if not (comm_b < COMMUTATION_FACTOR * eps_s and abs(q - pb) < POTENTIAL_FACTOR * eps_s):
                    continue
                if spec_violations(sub, f, mode, q):
                    continue
                ext = _extend_unchecked(sub, f, mode, q, b.space.points[n])
                grown, emb_ext = stage.absorb(ext, {k: s_pts[k] for k in range(m)})
                full = mapping + [emb_ext.mapping[m]]
                disp, comm, pot = _bounds(grown.triple, full, b, mapping)
                if not _within(disp, comm, pot, eps_s):
                    continue
                emb = Embedding(b.space, grown.triple.space, full, ZERO)
                return UrStarVerdict(True, emb, disp, comm, pot, used, grown, "success")
    return exhausted()
