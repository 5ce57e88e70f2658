"""Seeded random instances for the amalgamation operations."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from urysohn_retractions.fraisse.sampling import random_metric, random_triple
from urysohn_retractions.metric import FiniteMetricSpace
from urysohn_retractions.scalar import Scalar
from urysohn_retractions.triple import (
    AttachTo,
    ExtensionSpec,
    NewRetractPoint,
    Triple,
    apply_extension,
    enumerate_one_point_extensions,
    validate_triple,
)


def relabel(t, prefix: str):
    return t.relabel([f"{prefix}{k}" for k in range(len(t))])


def random_extension(rng: random.Random, t: Triple, denom: int, top: int, label: str) -> Triple:
    specs = enumerate_one_point_extensions(t, denom, top)
    return apply_extension(t, rng.choice(specs), label)


def quick_extension(rng: random.Random, t: Triple, denom: int, label: str) -> Triple:
    """A random valid one-point extension without enumerating them all.

    The profile f(x) = d(x, z) + s with z a retract point is Katetov and keeps
    the retraction 1-Lipschitz whether the new point is a retract point or is
    attached to z; an attached point gets the least admissible potential.
    """
    d = t.space.dist
    n = len(t)
    while True:
        z = rng.choice(t.retract_points())
        s = Fraction(rng.randint(1, 2 * denom), denom)
        f = [d[x][z] + s for x in range(n)]
        if rng.random() < 0.4:
            return apply_extension(t, ExtensionSpec(t, f, NewRetractPoint()), label)
        c = z
        q = max([f[c] / 2] + [t.potential[y] - f[y] for y in range(n)])
        if q.sign() > 0 and all(q <= t.potential[y] + f[y] for y in range(n)):
            return apply_extension(t, ExtensionSpec(t, f, AttachTo(c), q), label)


def max_instance(rng: random.Random, max_left: int = 6, max_new: int = 2, denom: int = 8):
    """(left, right, corr): right = a closed prefix of left plus new points."""
    d_den = rng.randint(1, denom)
    n = rng.randint(1, max_left)
    m = rng.randint(1, n)
    left = relabel(random_triple(rng, n, denom=d_den, closed_prefix=m), "l")
    right = left.subtriple(range(m)).relabel([f"s{k}" for k in range(m)])
    for k in range(rng.randint(1, max_new)):
        if len(right) <= 3 and rng.random() < 0.5:
            right = random_extension(rng, right, rng.choice([1, 2]), 2, f"r{k}")
        else:
            right = quick_extension(rng, right, rng.choice([1, 2, 4]), f"r{k}")
    return left, right, {k: k for k in range(m)}


def min_instance(rng: random.Random, max_shared: int = 4, denom: int = 8):
    """(left, right, shared) with left = X + {a}, right = X + {b}."""
    n = rng.randint(1, max_shared)
    d = random_metric(rng, n, denom=rng.randint(1, denom))
    x = FiniteMetricSpace([f"x{k}" for k in range(n)], d)
    sides = []
    for label in ("a", "b"):
        z = rng.randrange(n)
        t = Fraction(rng.randint(1, 2 * denom), denom)
        f = [d[y][z] + t for y in range(n)]
        # occasionally bend the profile, keeping it Katetov
        k = rng.randrange(n)
        lowered = f[k] - Fraction(rng.randint(0, denom), denom)
        if lowered > 0:
            f2 = list(f)
            f2[k] = lowered
            if all(abs(f2[p] - f2[q]) <= d[p][q] <= f2[p] + f2[q] for p in range(n) for q in range(n)):
                f = f2
        rows = [list(row) + [f[y]] for y, row in enumerate(d)] + [list(f) + [0]]
        sides.append(FiniteMetricSpace([*x.points, label], rows))
    return sides[0], sides[1], {k: k for k in range(n)}


def _perturbed_copy(rng: random.Random, b: Triple, eps: Fraction, label: str) -> Triple | None:
    n = len(b)
    d = [list(row) for row in b.space.dist]
    steps = [Fraction(k, 4) for k in range(-4, 5)]
    for x in range(n):
        for y in range(x + 1, n):
            v = d[x][y] + eps * rng.choice(steps)
            if v <= 0:
                return None
            d[x][y] = d[y][x] = v
    p = list(b.potential)
    for x in range(n):
        if b.retraction[x] != x:
            p[x] = p[x] + eps * rng.choice(steps[1:-1])
    out = Triple(FiniteMetricSpace([f"{label}{k}" for k in range(n)], d), b.retraction, p)
    return out if validate_triple(out).ok else None


@dataclass(frozen=True)
class GlueInstance:
    chain: Triple
    copy: tuple[int, ...]
    fresh: Triple
    eps: Fraction


def glue_instance(rng: random.Random, max_points: int = 6, denom: int = 8) -> GlueInstance:
    while True:
        eps = Fraction(1, rng.choice([2, 4, 8]))
        m = rng.randint(1, min(3, max_points))
        extra = rng.randint(0, max_points - m)
        chain = relabel(random_triple(rng, m + extra, denom=rng.randint(1, denom), closed_prefix=m), "c")
        block = chain.subtriple(range(m))
        fresh = block.relabel([f"f{k}" for k in range(m)])
        if rng.random() < 0.6:
            moved = _perturbed_copy(rng, block, eps, "f")
            if moved is None:
                continue
            fresh = moved
        return GlueInstance(chain, tuple(range(m)), fresh, eps)


@dataclass(frozen=True)
class ExtendInstance:
    c: Triple
    b: Triple
    shared: dict
    eps: Fraction


def extend_instance(rng: random.Random, max_points: int = 6, denom: int = 8) -> ExtendInstance:
    """C contains A up to potential shifts of at most eps; B = A + {b}."""
    while True:
        eps = Fraction(1, rng.choice([2, 4, 8]))
        n = rng.randint(1, max_points - 1)
        m = rng.randint(1, n)
        c = relabel(random_triple(rng, n, denom=rng.randint(1, denom), closed_prefix=m), "c")
        a_part = c.subtriple(range(m))
        p = list(a_part.potential)
        for x in range(m):
            if a_part.retraction[x] != x and rng.random() < 0.5:
                p[x] = p[x] + eps * Fraction(rng.randint(-4, 4), 4)
        a = Triple(a_part.space.relabel([f"a{k}" for k in range(m)]), a_part.retraction, p)
        if not validate_triple(a).ok:
            continue
        b = random_extension(rng, a, rng.choice([1, 2]), 2, "b")
        return ExtendInstance(c, b, {k: k for k in range(m)}, eps)


def scalar(v) -> Scalar:
    return Scalar.coerce(v)


def sqrt2_triple(rng: random.Random, max_points: int = 5) -> Triple:
    """A valid triple over Q(sqrt 2) with at least one irrational value."""
    from urysohn_retractions.amalgam import regularize_matrix
    from urysohn_retractions.scalar import SQRT2

    while True:
        n = rng.randint(2, max_points)
        t = random_triple(rng, n, denom=rng.choice([2, 4]))
        d = [list(row) for row in t.space.dist]
        p = list(t.potential)
        for x in rng.sample(range(n), rng.randint(1, n)):
            shift = SQRT2 * Fraction(1, rng.choice([8, 12, 16]))
            for y in range(n):
                if y != x:
                    d[x][y] = d[y][x] = d[x][y] + shift
        if rng.random() < 0.5:
            movable = [x for x in range(n) if t.retraction[x] != x]
            if movable:
                x = rng.choice(movable)
                p[x] = p[x] + SQRT2 * Fraction(1, rng.choice([16, 32]))
        rho, _ = regularize_matrix(d, t.retraction, p)
        out = Triple(FiniteMetricSpace(t.space.points, rho), t.retraction, p)
        if validate_triple(out).ok and not out.is_rational():
            return out
