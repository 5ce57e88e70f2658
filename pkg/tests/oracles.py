"""Independent reference implementations used to cross-check the library.

Nothing here imports library internals beyond the value types; every check is
re-derived from definitions, mostly through sympy or plain Fractions.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd

import sympy

from urysohn_retractions.scalar import Scalar

SQRT2 = sympy.sqrt(2)


def sym(s: Scalar) -> sympy.Expr:
    """Scalar as an exact sympy number."""
    return sympy.Rational(s.rat.numerator, s.rat.denominator) + sympy.Rational(
        s.irr.numerator, s.irr.denominator
    ) * SQRT2


def sym_sign(s: Scalar) -> int:
    v = sym(s)
    if v == 0:
        return 0
    return 1 if v.is_positive else -1


def fractions_between(lo: Scalar, hi: Scalar, max_den: int):
    """All reduced p/q with lo < p/q < hi and q <= max_den, by (q, p)."""
    out = []
    for q in range(1, max_den + 1):
        p = int(sympy.floor(sym(lo) * q)) - 1
        while sympy.Rational(p, q) < sym(hi):
            if gcd(p, q) == 1 and sym(lo) < sympy.Rational(p, q):
                out.append(Fraction(p, q))
            p += 1
    return sorted(out, key=lambda f: (f.denominator, f.numerator))


def metric_problems(points: int, d) -> list[str]:
    out = []
    for x in range(points):
        if d[x][x] != 0:
            out.append(f"diag {x}")
        for y in range(points):
            if d[x][y] != d[y][x]:
                out.append(f"sym {x},{y}")
            if x != y and not d[x][y] > 0:
                out.append(f"pos {x},{y}")
            for z in range(points):
                if d[x][z] > d[x][y] + d[y][z]:
                    out.append(f"tri {x},{y},{z}")
    return out


def triple_problems(d, r, p, realizable: bool = True) -> list[str]:
    n = len(r)
    out = metric_problems(n, d)
    for x in range(n):
        if r[r[x]] != r[x]:
            out.append(f"idem {x}")
        if (p[x] == 0) != (r[x] == x):
            out.append(f"zero {x}")
        if p[x] < 0:
            out.append(f"neg {x}")
        if realizable and r[x] != x and d[x][r[x]] > 2 * p[x]:
            out.append(f"real {x}")
        for y in range(n):
            if d[r[x]][r[y]] > d[x][y]:
                out.append(f"rlip {x},{y}")
            if abs(p[x] - p[y]) > d[x][y]:
                out.append(f"plip {x},{y}")
    return out


def triple_ok(t, realizable: bool = True) -> bool:
    return not triple_problems(t.space.dist, t.retraction, t.potential, realizable)


def shortest_paths(n: int, w):
    """Floyd-Warshall over a dict-of-edges weight matrix (None = no edge)."""
    d = [[w[x][y] for y in range(n)] for x in range(n)]
    for k in range(n):
        for x in range(n):
            for y in range(n):
                if d[x][k] is None or d[k][y] is None:
                    continue
                via = d[x][k] + d[k][y]
                if d[x][y] is None or via < d[x][y]:
                    d[x][y] = via
    return d


def max_amalgam_oracle(left, right, corr: dict[int, int]):
    """Union metric as the shortest-path metric on the glued weighted graph.

    Left points come first, then the unshared right points in order.
    """
    nl = len(left)
    extra = [y for y in range(len(right)) if y not in set(corr.values())]
    pos = {y: nl + k for k, y in enumerate(extra)}
    inv = {y: x for x, y in corr.items()}
    for y in corr.values():
        pos[y] = inv[y]
    n = nl + len(extra)
    w = [[None] * n for _ in range(n)]
    for x in range(nl):
        for y in range(nl):
            w[x][y] = left.dist[x][y]
    for a in range(len(right)):
        for b in range(len(right)):
            u, v = pos[a], pos[b]
            if w[u][v] is None or right.dist[a][b] < w[u][v]:
                w[u][v] = right.dist[a][b]
    return shortest_paths(n, w)


def grid(den: int, top: int) -> list[Fraction]:
    return sorted({Fraction(a, b) for b in range(1, den + 1) for a in range(1, top * b + 1)})


def is_metric_completion(n_left: int, block, cross, right_block) -> bool:
    """Check a candidate cross block keeps the union metric valid."""
    n_right = len(right_block)
    n = n_left + n_right
    d = [[None] * n for _ in range(n)]
    for x in range(n_left):
        for y in range(n_left):
            d[x][y] = block[x][y]
    for a in range(n_right):
        for b in range(n_right):
            d[n_left + a][n_left + b] = right_block[a][b]
    for x in range(n_left):
        for a in range(n_right):
            d[x][n_left + a] = d[n_left + a][x] = cross[x][a]
    return not metric_problems(n, d)


def all_assignments(values, k: int):
    return itertools.product(values, repeat=k)


def in_p(u_r, r_r, dist, xs, eps) -> bool:
    return all(dist[r_r[x]][u_r[x]] < eps for x in xs)


def dist_to_image(dist, r, x):
    return min(dist[x][z] for z in set(r))


def in_pr(u_r, r_r, dist, xs, eps) -> bool:
    return all(
        dist[r_r[x]][u_r[x]] < eps
        and abs(dist_to_image(dist, u_r, x) - dist_to_image(dist, r_r, x)) < eps
        for x in xs
    )


def in_u(u_r, r_r, dist, eps) -> bool:
    return all(dist[r_r[x]][u_r[x]] < eps for x in range(len(u_r)))


def retractions_of(dist) -> list[tuple[int, ...]]:
    """Every idempotent 1-Lipschitz self-map of a finite metric space."""
    n = len(dist)
    out = []
    for r in itertools.product(range(n), repeat=n):
        if any(r[r[x]] != r[x] for x in range(n)):
            continue
        if all(dist[r[x]][r[y]] <= dist[x][y] for x in range(n) for y in range(n)):
            out.append(r)
    return out


def union_completions(left_dist, right_dist, corr: dict[int, int], values):
    """Every metric on the union of two spaces glued over ``corr`` whose cross
    distances (unshared left x unshared right) come from ``values``.

    Backtracking assigns cross entries one at a time and prunes with every
    triangle that is already fully determined. Yields cross blocks as dicts
    keyed by (left index, right index).
    """
    # rational inputs are scaled to integers, which keeps the search fast
    flat = [Scalar.coerce(v) for row in (*left_dist, *right_dist) for v in row]
    flat += [Scalar.coerce(v) for v in values]
    assert all(v.is_rational() for v in flat)
    den = 1
    for v in flat:
        den = den * v.rat.denominator // gcd(den, v.rat.denominator)

    def scale(v) -> int:
        return int(Scalar.coerce(v).rat * den)

    left_dist = [[scale(v) for v in row] for row in left_dist]
    right_dist = [[scale(v) for v in row] for row in right_dist]
    values = [scale(v) for v in values]
    nl, nr = len(left_dist), len(right_dist)
    inv = {y: x for x, y in corr.items()}
    new_right = [y for y in range(nr) if y not in inv]
    new_left = [x for x in range(nl) if x not in corr]
    # union indices: left 0..nl-1, then new right points
    pos = {y: nl + k for k, y in enumerate(new_right)}
    pos.update({y: x for y, x in inv.items()})
    n = nl + len(new_right)
    d = [[None] * n for _ in range(n)]
    for x in range(nl):
        for x2 in range(nl):
            d[x][x2] = left_dist[x][x2]
    for y in range(nr):
        for y2 in range(nr):
            d[pos[y]][pos[y2]] = right_dist[y][y2]
    cells = [(x, pos[y]) for x in new_left for y in new_right]

    def consistent(u: int, v: int) -> bool:
        duv = d[u][v]
        for w in range(n):
            if w in (u, v):
                continue
            duw, dwv = d[u][w], d[w][v]
            if duw is None or dwv is None:
                continue
            if duv > duw + dwv or duw > duv + dwv or dwv > duw + duv:
                return False
        return True

    def rec(k: int):
        if k == len(cells):
            yield {c: Fraction(d[c[0]][c[1]], den) for c in cells}
            return
        u, v = cells[k]
        for val in values:
            d[u][v] = d[v][u] = val
            if consistent(u, v):
                yield from rec(k + 1)
        d[u][v] = d[v][u] = None

    yield from rec(0)


def retractions_backtrack(dist) -> list[tuple[int, ...]]:
    """retractions_of with pruning; only partial maps that already fail are cut."""
    n = len(dist)
    out: list[tuple[int, ...]] = []
    r: list[int] = []

    def consistent(x: int) -> bool:
        v = r[x]
        # idempotence among assigned points
        if v <= x and r[v] != v:
            return False
        if any(r[y] == x and v != x for y in range(x)):
            return False
        for y in range(x):
            a, b = r[x], r[y]
            if a <= x and b <= x and dist[a][b] > dist[x][y]:
                return False
        return True

    def go(x: int) -> None:
        if x == n:
            t = tuple(r)
            if all(t[t[z]] == t[z] for z in range(n)) and all(
                dist[t[a]][t[b]] <= dist[a][b] for a in range(n) for b in range(n)
            ):
                out.append(t)
            return
        for v in range(n):
            r.append(v)
            if consistent(x):
                go(x + 1)
            r.pop()

    go(0)
    return out
