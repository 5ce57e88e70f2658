"""Amalgamation constructions for metric spaces and triples.

Maximal amalgamation glues along a shared part with shortest paths through
it; minimal amalgamation joins two one-point extensions as closely as the
triangle inequality allows; max-regularization raises a metric until a
retraction and a potential become 1-Lipschitz.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

from .errors import (
    ConvergenceError,
    InvalidTripleError,
    MetricError,
    OverlapError,
    PreconditionError,
    ShapeError,
)
from .metric import Embedding, FiniteMetricSpace, validate_metric
from .scalar import ZERO, Scalar, ScalarLike, smax, smin
from .triple import Triple, discrepancy, ensure_valid

Space = Union[FiniteMetricSpace, Triple]


def _space(obj: Space) -> FiniteMetricSpace:
    return obj.space if isinstance(obj, Triple) else obj


@dataclass(frozen=True)
class SharedPart:
    """Two structures and a bijection between designated sub-point-sets.

    ``correspondence`` maps left indices to right indices.
    """

    left: Space
    right: Space
    correspondence: Mapping[int, int]

    def check(self) -> None:
        if isinstance(self.left, Triple) != isinstance(self.right, Triple):
            raise ShapeError("both sides must be triples or both bare spaces")
        corr = dict(self.correspondence)
        if not corr:
            raise OverlapError("the shared part is empty")
        if len(set(corr.values())) != len(corr):
            raise OverlapError("correspondence is not injective")
        ls, rs = _space(self.left), _space(self.right)
        for x, y in corr.items():
            if not (0 <= x < len(ls) and 0 <= y < len(rs)):
                raise ShapeError("correspondence refers to missing points")
        for x, y in corr.items():
            for x2, y2 in corr.items():
                if ls.dist[x][x2] != rs.dist[y][y2]:
                    raise OverlapError(f"distance mismatch on shared pair ({x}, {x2})")
        if isinstance(self.left, Triple):
            lt, rt = self.left, self.right
            for x, y in corr.items():
                rx = lt.retraction[x]
                if corr.get(rx) != rt.retraction[y]:
                    raise OverlapError(f"retraction mismatch at shared point {x}")
                if lt.potential[x] != rt.potential[y]:
                    raise OverlapError(f"potential mismatch at shared point {x}")


def amalgamate_max_with_map(shared: SharedPart) -> tuple[Space, list[int]]:
    """Maximal amalgam plus the index of every right point in the result.

    Left points keep their indices; unshared right points follow in order.
    """
    shared.check()
    corr = dict(shared.correspondence)
    ls, rs = _space(shared.left), _space(shared.right)
    n_left = len(ls)
    inverse = {y: x for x, y in corr.items()}
    new_right = [y for y in range(len(rs)) if y not in inverse]
    right_map = [0] * len(rs)
    for y, x in inverse.items():
        right_map[y] = x
    for k, y in enumerate(new_right):
        right_map[y] = n_left + k

    pairs = sorted(corr.items())
    ld, rd = ls.dist, rs.dist
    cross = []  # cross[k][x]: distance from new_right[k] to left x
    for y in new_right:
        ry = rd[y]
        via = [(zl, ry[zr]) for zl, zr in pairs]
        row = []
        for x in range(n_left):
            lx = ld[x]
            best = None
            for zl, tail in via:
                v = lx[zl] + tail
                if best is None or v < best:
                    best = v
            row.append(best)
        cross.append(row)

    rows = []
    for x in range(n_left):
        rows.append(ld[x] + tuple(cross[k][x] for k in range(len(new_right))))
    for k, y in enumerate(new_right):
        ry = rd[y]
        rows.append(tuple(cross[k]) + tuple(ry[y2] for y2 in new_right))

    labels = list(ls.points)
    taken = set(labels)
    for y in new_right:
        label = rs.points[y]
        while label in taken:
            label += "'"
        taken.add(label)
        labels.append(label)
    space = FiniteMetricSpace._trusted(tuple(labels), tuple(rows))
    if not isinstance(shared.left, Triple):
        return space, right_map
    lt, rt = shared.left, shared.right
    r = list(lt.retraction) + [right_map[rt.retraction[y]] for y in new_right]
    p = list(lt.potential) + [rt.potential[y] for y in new_right]
    return Triple(space, r, p), right_map


def amalgamate_max(shared: SharedPart) -> Space:
    return amalgamate_max_with_map(shared)[0]


def amalgamate_min(
    left: FiniteMetricSpace, right: FiniteMetricSpace, shared: Mapping[int, int]
) -> FiniteMetricSpace:
    """Join X+{a} and X+{b}: d(a, b) = max over z in X of |d(a, z) - d(z, b)|.

    ``shared`` maps the X-indices of ``left`` to those of ``right``; the one
    unmapped point on each side is a (resp. b). The result lists the left
    points and then b.
    """
    corr = dict(shared)
    if len(corr) != len(left) - 1 or len(corr) != len(right) - 1:
        raise ShapeError("each side must be the shared part plus exactly one point")
    if not corr:
        raise ShapeError("the shared part is empty")
    a = next(x for x in range(len(left)) if x not in corr)
    b = next(y for y in range(len(right)) if y not in set(corr.values()))
    for x, y in corr.items():
        for x2, y2 in corr.items():
            if left.dist[x][x2] != right.dist[y][y2]:
                raise OverlapError(f"the two sides disagree on the shared pair ({x}, {x2})")
    dab = smax(abs(left.dist[a][z] - right.dist[zr][b]) for z, zr in corr.items())
    if dab.sign() <= 0:
        raise MetricError("the two new points are indiscernible (distance 0)")
    n = len(left)
    b_row = []
    for x in range(n):
        b_row.append(dab if x == a else right.dist[corr[x]][b])
    rows = [left.dist[x] + (b_row[x],) for x in range(n)]
    rows.append(tuple(b_row) + (ZERO,))
    label = left.fresh_label(right.points[b])
    return FiniteMetricSpace._trusted(left.points + (label,), tuple(rows))


# -- regularization -------------------------------------------------------------------


def regularize_matrix(
    d: Sequence[Sequence[Scalar]],
    r: Sequence[int],
    p: Sequence[Scalar],
    max_rounds: int | None = None,
) -> tuple[list[list[Scalar]], int]:
    """Iterate rho <- max(rho, rho o (r x r), |p - p|) to its fixed point.

    Returns the matrix and the number of rounds that changed something.
    Zero off-diagonal entries are tolerated (pseudometrics pass through).
    """
    n = len(d)
    cur = [list(row) for row in d]
    limit = n * n if max_rounds is None else max_rounds
    rounds = 0
    while True:
        changed = False
        nxt = [row[:] for row in cur]
        for x in range(n):
            rx, px = r[x], p[x]
            for y in range(x + 1, n):
                best = cur[x][y]
                v = cur[rx][r[y]]
                if v > best:
                    best = v
                v = abs(px - p[y])
                if v > best:
                    best = v
                if best != cur[x][y]:
                    nxt[x][y] = nxt[y][x] = best
                    changed = True
        if not changed:
            return cur, rounds
        rounds += 1
        if rounds > limit:
            raise ConvergenceError(f"max-regularization did not settle within {limit} rounds")
        cur = nxt


@dataclass(frozen=True)
class Regularization:
    space: FiniteMetricSpace
    rounds: int


def regularize(points, d, r, p) -> Regularization:
    n = len(points)
    if callable(d):
        mat = [[ZERO if i == j else Scalar.coerce(d(i, j)) for j in range(n)] for i in range(n)]
    elif isinstance(d, FiniteMetricSpace):
        mat = d.dist
    else:
        mat = [[Scalar.coerce(v) for v in row] for row in d]
    if len(mat) != n or any(len(row) != n for row in mat):
        raise ShapeError("distance data does not match the point list")
    for x in range(n):
        for y in range(n):
            if mat[x][y] != mat[y][x]:
                raise MetricError(f"distance is not symmetric at ({x}, {y})")
    r = [int(v) for v in r]
    if any(r[r[x]] != r[x] for x in range(n)):
        raise InvalidTripleError("the map r is not idempotent")
    pv = [Scalar.coerce(v) for v in p]
    out, rounds = regularize_matrix(mat, r, pv)
    return Regularization(FiniteMetricSpace(points, out), rounds)


def max_metric_regularize(points, d, r, p) -> FiniteMetricSpace:
    """rho = max{d, d o (r x r), |p(x) - p(y)|}, iterated to a fixed point."""
    return regularize(points, d, r, p).space


# -- retraction extension over one new point ---------------------------------------------


@dataclass(frozen=True)
class ExtensionResult:
    triple: Triple
    b_index: int
    max_deviation: Scalar  # max |rho - d| over (A + {b})^2
    retraction_gap: Scalar  # max rho(R'(x), r'(x)) over A + {b}
    potential_gap: Scalar  # max |P'(x) - p'(x)| over A + {b}
    rounds: int

    @property
    def within_two_eps(self) -> Callable[[ScalarLike], bool]:
        return lambda eps: self.max_deviation < 2 * Scalar.coerce(eps)


def extend_retraction_over_point(
    c: Triple,
    b: Triple,
    shared: Mapping[int, int],
    eps: ScalarLike,
    d: Sequence[Sequence[ScalarLike]] | None = None,
) -> ExtensionResult:
    """Extend (C, R, P) over the new point of B = A + {b}.

    ``shared`` maps the A-indices of ``b`` to indices of ``c``. ``d`` is a
    metric on C + {b} (C's points then b); by default the maximal amalgam.
    The result lists C's points and then b.
    """
    eps_s = Scalar.coerce(eps)
    corr = dict(shared)
    if len(corr) != len(b) - 1:
        raise ShapeError("b must be the shared part plus exactly one new point")
    nb = next(x for x in range(len(b)) if x not in corr)
    n = len(c)
    for a, ca in corr.items():
        ra = b.retraction[a]
        if ra == nb:
            raise PreconditionError("a shared point retracts onto the new point")
        gap_r = c.space.dist[c.retraction[ca]][corr[ra]]
        gap_p = abs(c.potential[ca] - b.potential[a])
        if gap_r > eps_s or gap_p > eps_s:
            raise PreconditionError(
                f"discrepancy at shared point {a} exceeds eps: ({gap_r}, {gap_p})"
            )
    if d is None:
        space, rmap = amalgamate_max_with_map(SharedPart(c.space, b.space, corr))
        mat = [list(row) for row in space.dist]
        label = space.points[n]
    else:
        mat = [[Scalar.coerce(v) for v in row] for row in d]
        if len(mat) != n + 1 or any(len(row) != n + 1 for row in mat):
            raise ShapeError("d must be a matrix over C + {b}")
        label = c.space.fresh_label(b.space.points[nb])
        for x in range(n):
            for y in range(n):
                if mat[x][y] != c.space.dist[x][y]:
                    raise OverlapError("d does not extend the metric of C")
        for a, ca in corr.items():
            if mat[ca][n] != b.space.dist[a][nb]:
                raise OverlapError("d does not extend the metric of B")
        probe = FiniteMetricSpace([*c.space.points, label], mat)
        if validate_metric(probe):
            raise MetricError("d is not a metric on C + {b}")
    rb = b.retraction[nb]
    pb = b.potential[nb]
    if rb == nb:
        if pb != 0:
            raise InvalidTripleError("new retract point with nonzero potential")
        r_new, p_new = n, ZERO
    else:
        if b.retraction[rb] != rb:
            raise PreconditionError("r'(b) is not a retract point of A")
        c0 = c.retraction[corr[rb]]
        r_new = c0
        # realizability repair: stays within eps/2 of p'(b)
        half = mat[n][c0] / 2
        p_new = half if half > pb else pb
    r_all = list(c.retraction) + [r_new]
    p_all = list(c.potential) + [p_new]
    rho, rounds = regularize_matrix(mat, r_all, p_all)
    out = Triple(FiniteMetricSpace([*c.space.points, label], rho), r_all, p_all)
    ensure_valid(out, what="extended triple")

    # measure against (A + {b}) in the output
    a_idx = {a: ca for a, ca in corr.items()}
    a_idx[nb] = n
    dev = ZERO
    for x, ox in a_idx.items():
        for y, oy in a_idx.items():
            dev_xy = abs(rho[ox][oy] - mat[ox][oy])
            if dev_xy > dev:
                dev = dev_xy
    gap_r = ZERO
    gap_p = ZERO
    for x, ox in a_idx.items():
        g = rho[r_all[ox]][a_idx[b.retraction[x]]]
        if g > gap_r:
            gap_r = g
        g = abs(p_all[ox] - b.potential[x])
        if g > gap_p:
            gap_p = g
    return ExtensionResult(out, n, dev, gap_r, gap_p, rounds)


# -- gluing an eps-close copy ---------------------------------------------------------------


def glue_epsilon_copy(
    chain: Triple, copy: Sequence[int], fresh: Triple, eps: ScalarLike
) -> Triple:
    """Glue ``fresh`` to ``chain`` with each fresh point at distance exactly eps
    from its partner ``copy[j]`` in the chain.

    Fresh points are appended after the chain points, in order.
    """
    eps_s = Scalar.coerce(eps)
    m = len(fresh)
    x1 = list(copy)
    if len(x1) != m or len(set(x1)) != m:
        raise ShapeError("copy must list one distinct chain point per fresh point")
    if eps_s.sign() <= 0:
        raise MetricError("eps must be positive: matched points would coincide")
    pos = {v: j for j, v in enumerate(x1)}
    cd, fd = chain.space.dist, fresh.space.dist
    for j in range(m):
        rj = chain.retraction[x1[j]]
        if rj not in pos:
            raise PreconditionError("the chain retraction leaves the designated copy")
        if fresh.retraction[j] != pos[rj]:
            raise PreconditionError(f"retraction patterns differ at point {j}")
        if not abs(chain.potential[x1[j]] - fresh.potential[j]) < eps_s:
            raise PreconditionError(f"potentials differ by at least eps at point {j}")
        for k in range(m):
            if abs(cd[x1[j]][x1[k]] - fd[j][k]) > eps_s:
                raise PreconditionError(f"distances differ by more than eps at ({j}, {k})")

    # bridge metric on X1 + X_{n+1}: X1 indices 0..m-1, fresh m..2m-1
    size = 2 * m
    mat = [[ZERO] * size for _ in range(size)]
    for j in range(m):
        for k in range(m):
            mat[j][k] = cd[x1[j]][x1[k]]
            mat[m + j][m + k] = fd[j][k]
    for j in range(m):
        for k in range(m):
            v = eps_s + smin(cd[x1[j]][x1[q]] + fd[q][k] for q in range(m))
            mat[j][m + k] = mat[m + k][j] = v
    r_pair = [pos[chain.retraction[x1[j]]] for j in range(m)] + [
        m + fresh.retraction[j] for j in range(m)
    ]
    p_pair = [chain.potential[x1[j]] for j in range(m)] + list(fresh.potential)
    rho, _ = regularize_matrix(mat, r_pair, p_pair)
    for j in range(m):
        for k in range(m):
            if rho[j][k] != mat[j][k] or rho[m + j][m + k] != mat[m + j][m + k]:
                raise PreconditionError("regularization altered one side of the glued pair")
    pair = Triple(
        FiniteMetricSpace._trusted(tuple(f"_{k}" for k in range(size)), tuple(map(tuple, rho))),
        r_pair,
        p_pair,
    )
    glued, right_map = amalgamate_max_with_map(SharedPart(chain, pair, {x1[j]: j for j in range(m)}))
    labels = list(chain.space.points)
    taken = set(labels)
    for j in range(m):
        label = fresh.space.points[j]
        while label in taken:
            label += "'"
        taken.add(label)
        labels.append(label)
    out = Triple(
        FiniteMetricSpace._trusted(tuple(labels), glued.space.dist),
        glued.retraction,
        glued.potential,
    )
    ensure_valid(out, what="glued triple")
    return out


# -- commuting completion ----------------------------------------------------------------------


def commuting_completion(
    ambient: Triple, a: Triple, i: Embedding | Sequence[int], eps: ScalarLike
) -> tuple[Triple, Embedding]:
    """Close the image of ``a`` under U and pull everything back.

    Returns (X, I) with X = A + C, where C are the pulled-back points of
    U[i[A]] outside i[A], R = I^-1 o U o I and P = D o I. I commutes exactly.
    """
    eps_s = Scalar.coerce(eps)
    mapping = i.mapping if isinstance(i, Embedding) else tuple(i)
    rep = discrepancy(ambient, mapping, a)
    if not rep.below(eps_s):
        raise PreconditionError(
            f"discrepancy ({rep.max_commutation_gap}, {rep.max_potential_gap}) is not below eps"
        )
    image = list(mapping)
    seen = set(image)
    extra = []
    for s in mapping:
        u = ambient.retraction[s]
        if u not in seen:
            seen.add(u)
            extra.append(u)
    full = image + extra
    sub = ambient.subtriple(full)
    labels = list(a.space.points)
    taken = set(labels)
    for s in extra:
        label = ambient.space.points[s]
        while label in taken:
            label += "'"
        taken.add(label)
        labels.append(label)
    x = sub.relabel(labels)
    ensure_valid(x, what="completion")
    return x, Embedding(x.space, ambient.space, full, ZERO)
