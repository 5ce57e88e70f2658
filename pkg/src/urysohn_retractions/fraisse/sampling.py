"""Random valid triples and random admissible inputs for the inductive step."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .. import rationalize as rz
from ..amalgam import glue_epsilon_copy, regularize_matrix
from ..errors import UrysohnError
from ..metric import FiniteMetricSpace
from ..scalar import SQRT2, ZERO, Scalar, ScalarLike, smin
from ..triple import Triple, validate_triple
from .aprox import StepInput, check_hypotheses
from .stage import AmbientStage

APROX_MODES = ("exact", "potential", "redirect", "split")


def _closure(w: list[list[Scalar]]) -> list[list[Scalar]]:
    n = len(w)
    d = [row[:] for row in w]
    for k in range(n):
        for x in range(n):
            dxk = d[x][k]
            for y in range(n):
                v = dxk + d[k][y]
                if v < d[x][y]:
                    d[x][y] = v
    return d


def random_metric(rng: random.Random, n: int, denom: int = 4, top: int = 2) -> list[list[Scalar]]:
    """Shortest-path closure of random grid weights in (0, top]."""
    grid = [Fraction(k, denom) for k in range(1, top * denom + 1)]
    w = [[ZERO] * n for _ in range(n)]
    for x in range(n):
        for y in range(x + 1, n):
            w[x][y] = w[y][x] = Scalar.coerce(rng.choice(grid))
    return _closure(w)


def triple_from_metric(
    d: Sequence[Sequence[Scalar]], r: Sequence[int], scale: Sequence[ScalarLike], labels: Sequence[str] | None = None
) -> Triple | None:
    """Potential scale[x] * d(x, r x), then max-regularized; None if invalid."""
    n = len(d)
    p = [Scalar.coerce(scale[x]) * d[x][r[x]] for x in range(n)]
    rho, _ = regularize_matrix(d, r, p)
    pts = list(labels) if labels is not None else [f"x{k}" for k in range(n)]
    t = Triple(FiniteMetricSpace(pts, rho), r, p)
    return t if validate_triple(t).ok else None


def random_retraction(rng: random.Random, n: int, closed_prefix: int | None = None) -> list[int]:
    """Idempotent map; with closed_prefix=m the first m points map among themselves."""
    m = n if closed_prefix is None else closed_prefix
    while True:
        retract = [x for x in range(n) if rng.random() < 0.45]
        if not any(x < m for x in retract):
            retract.append(rng.randrange(m) if m else 0)
        r = []
        for x in range(n):
            if x in retract:
                r.append(x)
            else:
                pool = [z for z in retract if z < m] if x < m else retract
                r.append(rng.choice(pool))
        if all(r[r[x]] == r[x] for x in range(n)):
            return r


def random_triple(
    rng: random.Random, n: int, denom: int = 4, top: int = 2, closed_prefix: int | None = None, tries: int = 200
) -> Triple:
    scales = [Fraction(1), Fraction(3, 4), Fraction(1, 2)]
    for _ in range(tries):
        d = random_metric(rng, n, denom, top)
        r = random_retraction(rng, n, closed_prefix)
        t = triple_from_metric(d, r, [rng.choice(scales) for _ in range(n)])
        if t is not None:
            return t
    raise RuntimeError("could not sample a valid triple")


def with_sqrt2_row(rng: random.Random, t: Triple, x: int, denom: int = 8) -> Triple | None:
    """Shift the distances of point x by a small multiple of sqrt 2; None if invalid."""
    n = len(t)
    shift = SQRT2 * Fraction(1, denom * rng.randint(2, 4))
    d = [list(row) for row in t.space.dist]
    for y in range(n):
        if y != x:
            d[x][y] = d[y][x] = d[x][y] + shift
    rho, _ = regularize_matrix(d, t.retraction, t.potential)
    out = Triple(FiniteMetricSpace(t.space.points, rho), t.retraction, t.potential)
    return out if validate_triple(out).ok else None


def _perturb(rng: random.Random, b: Triple, eps_n: Scalar) -> Triple | None:
    # rational B: move the distances and potential of b by less than eps_n/2
    m = len(b) - 1
    steps = [Fraction(k, 8) for k in range(-3, 4)]
    d = [list(row) for row in b.space.dist]
    for y in range(m):
        v = d[m][y] + eps_n * rng.choice(steps)
        d[m][y] = d[y][m] = v
    p = list(b.potential)
    if b.retraction[m] != m:
        p[m] = p[m] + eps_n * rng.choice(steps)
    if any(v.sign() <= 0 for y, row in enumerate(d) for z, v in enumerate(row) if y != z):
        return None
    out = Triple(FiniteMetricSpace(b.space.points, d), b.retraction, p)
    return out if validate_triple(out).ok else None


def random_admissible_input(
    rng: random.Random,
    eps_n: ScalarLike,
    m: int | None = None,
    mode: str | None = None,
    sqrt2: bool | None = None,
    tries: int = 400,
) -> tuple[StepInput, str]:
    """A stage W = A + Q, with Q an approximately commuting copy of B_n.

    Returns the step input and the mode used. Rejection-samples until the
    induction hypotheses hold.
    """
    eps = Scalar.coerce(eps_n)
    for _ in range(tries):
        mm = m if m is not None else rng.randint(1, 3)
        md = mode if mode is not None else rng.choice(APROX_MODES)
        b = random_triple(rng, mm + 1, closed_prefix=mm)
        b = b.relabel([f"a{k}" for k in range(mm)] + ["b"])
        use_sqrt2 = sqrt2 if sqrt2 is not None else rng.random() < 0.3
        if use_sqrt2:
            b = with_sqrt2_row(rng, b, mm)
            if b is None:
                continue
        a = b.subtriple(range(mm))
        if not a.is_rational():
            continue
        if b.is_rational() and rng.random() < 0.5:
            bn = _perturb(rng, b, eps)
        else:
            try:
                bn, _ = rz.rationalize_triple(b, eps / 4, range(mm))
            except UrysohnError:
                continue
        if bn is None:
            continue
        bn = bn.relabel([f"{lab}#0" for lab in b.space.points])
        stage_t = _stage_for(rng, a, bn, eps, md)
        if stage_t is None:
            continue
        w, j = stage_t
        try:
            chain = glue_epsilon_copy(b, range(mm + 1), bn, eps / 2)
        except UrysohnError:
            continue
        inp = StepInput(
            stage=AmbientStage(w),
            a=a,
            i=tuple(range(mm)),
            b=b,
            b_n=bn,
            j_n=tuple(j),
            eps_n=eps,
            chain=chain,
            chain_copy=tuple(range(mm + 1)),
        )
        try:
            if check_hypotheses(inp).holds(eps):
                return inp, md
        except UrysohnError:
            continue
    raise RuntimeError("could not sample an admissible input")


def _stage_for(rng: random.Random, a: Triple, bn: Triple, eps: Scalar, mode: str):
    m = len(a)
    q = m + 1
    t = eps * rng.choice([Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(9, 4)])
    extra = 1 if mode == "split" else 0
    size = m + q + extra
    ad, qd = a.space.dist, bn.space.dist
    w = [[ZERO] * size for _ in range(size)]
    for x in range(m):
        for y in range(m):
            w[x][y] = ad[x][y]
    for x in range(q):
        for y in range(q):
            w[m + x][m + y] = qd[x][y]
    for x in range(m):
        for k in range(q):
            v = t + smin(ad[x][z] + qd[z][k] for z in range(m))
            w[x][m + k] = w[m + k][x] = v
    r = list(a.retraction) + [m + bn.retraction[k] for k in range(q)]
    p = list(a.potential) + list(bn.potential)
    movable = [k for k in range(q) if bn.retraction[k] != k]
    if mode == "potential" and movable:
        for k in movable:
            delta = eps * Fraction(rng.randint(-5, 5), 4)
            if (bn.potential[k] + delta).sign() > 0:
                p[m + k] = bn.potential[k] + delta
    elif mode == "redirect" and movable:
        k = rng.choice(movable)
        target = bn.retraction[k]
        if target < m:
            r[m + k] = target
    elif mode == "split":
        anchors = [k for k in range(q) if bn.retraction[k] == k]
        k0 = rng.choice(anchors)
        delta = eps * Fraction(rng.randint(1, 4), 4)
        z = size - 1
        for y in range(size - 1):
            w[z][y] = w[y][z] = delta + w[m + k0][y]
        r.append(z)
        p.append(ZERO)
        for k in movable:
            if bn.retraction[k] == k0 and rng.random() < 0.7:
                r[m + k] = z
    # keep realizability by lifting potentials where needed
    for x in range(size):
        if r[x] != x:
            need = w[x][r[x]] / 2
            if need > p[x]:
                p[x] = need
    rho, _ = regularize_matrix(w, r, p)
    for x in range(m):
        for y in range(m):
            if rho[x][y] != ad[x][y]:
                return None
    for x in range(q):
        for y in range(q):
            if rho[m + x][m + y] != qd[x][y]:
                return None
    labels = list(a.space.points) + [f"q{k}" for k in range(q)] + (["z"] if extra else [])
    tw = Triple(FiniteMetricSpace(labels, rho), r, p)
    if not validate_triple(tw).ok:
        return None
    if any(tw.potential[x] != a.potential[x] or tw.retraction[x] != a.retraction[x] for x in range(m)):
        return None
    return tw, [m + k for k in range(q)]
