from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import metric_spaces
from oracles import metric_problems
from urysohn_retractions.errors import DuplicateLabelError, InvalidKatetovError, ShapeError
from urysohn_retractions.fraisse.sampling import random_metric
from urysohn_retractions.metric import (
    Embedding,
    FiniteMetricSpace,
    KatetovFunction,
    distance_to_subset,
    extend_one_point,
    find_isometric_embeddings,
    katetov_validate,
    validate_metric,
)
from urysohn_retractions.scalar import Scalar


def space(rows, labels=None) -> FiniteMetricSpace:
    return FiniteMetricSpace(labels or [f"p{k}" for k in range(len(rows))], rows)


EQUILATERAL = space([[0, 1, 1], [1, 0, 1], [1, 1, 0]], ["a", "b", "c"])


def test_validate_examples() -> None:
    assert validate_metric(EQUILATERAL).ok
    bad = validate_metric(space([[0, 1, 3], [1, 0, 1], [3, 1, 0]], ["a", "b", "c"]))
    assert (0, 1, 2) in [v.witness for v in bad if v.kind == "triangle"]
    asym = validate_metric(space([[0, 1], [2, 0]]))
    assert asym.kinds() == {"symmetry"}


def test_validate_reports_every_axiom() -> None:
    rep = validate_metric(space([[1, 0], [0, 0]]))
    assert {"nonzero-diagonal", "positivity"} <= rep.kinds()


def test_shape_mismatch() -> None:
    with pytest.raises(ShapeError):
        FiniteMetricSpace(["a", "b"], [[0, 1]])
    with pytest.raises(DuplicateLabelError):
        FiniteMetricSpace(["a", "a"], [[0, 1], [1, 0]])


def test_katetov_examples() -> None:
    uv = space([[0, 2], [2, 0]], ["u", "v"])
    assert katetov_validate(KatetovFunction(uv, [1, 1]))
    assert not katetov_validate(KatetovFunction(uv, [3, Fraction(1, 2)]))
    assert not katetov_validate(KatetovFunction(uv, [0, 2]))


def test_extend_one_point_examples() -> None:
    uv = space([[0, 2], [2, 0]], ["u", "v"])
    mid = extend_one_point(uv, KatetovFunction(uv, [1, 1]), "m")
    assert mid.dist[2][:2] == (1, 1)
    single = space([[0]], ["u"])
    two = extend_one_point(single, KatetovFunction(single, [Fraction(5, 3)]), "b")
    assert two.dist[0][1] == Fraction(5, 3)
    far = extend_one_point(uv, KatetovFunction(uv, [2, 4]), "b")
    assert far.dist[2][0] == 2 and far.dist[2][1] == 4
    assert metric_problems(3, far.dist) == []


def test_extend_one_point_errors() -> None:
    uv = space([[0, 2], [2, 0]], ["u", "v"])
    with pytest.raises(InvalidKatetovError):
        extend_one_point(uv, KatetovFunction(uv, [3, Fraction(1, 2)]), "b")
    with pytest.raises(DuplicateLabelError):
        extend_one_point(uv, KatetovFunction(uv, [1, 1]), "u")


def test_find_isometric_embeddings_examples() -> None:
    single = space([[0]])
    assert len(find_isometric_embeddings(single, EQUILATERAL)) == 3
    maps = [e.mapping for e in find_isometric_embeddings(EQUILATERAL, EQUILATERAL)]
    assert maps == sorted(itertools.permutations(range(3)))
    assert find_isometric_embeddings(space([[0, 1], [1, 0]]), space([[0, 2], [2, 0]])) == []


def test_distance_to_subset_examples() -> None:
    path = space([[0, 1, 3], [1, 0, 2], [3, 2, 0]])
    assert distance_to_subset(path, 0, [0, 2]) == 0
    assert distance_to_subset(path, 0, [2]) == 3
    assert distance_to_subset(path, 1, [0, 2]) == min(path.dist[1][0], path.dist[1][2])
    with pytest.raises(ValueError):
        distance_to_subset(path, 1, [])


def test_embedding_distortion_and_compose() -> None:
    e = Embedding(space([[0, 1], [1, 0]]), EQUILATERAL, [0, 2])
    assert e.is_isometric
    f = Embedding(EQUILATERAL, EQUILATERAL, [2, 0, 1])
    assert e.compose(f).mapping == (2, 1) and e.compose(f).is_isometric
    g = Embedding(space([[0, 2], [2, 0]]), EQUILATERAL, [0, 1])
    assert g.max_distortion == 1


@given(metric_spaces(), st.integers(0, 2**32))
def test_extend_one_point_keeps_old_points(sp: FiniteMetricSpace, seed: int) -> None:
    rng = random.Random(seed)
    n = len(sp)
    # f(x) = d(x, z) + t for a random anchor z is always Katetov
    z = rng.randrange(n)
    t = Fraction(rng.randint(1, 8), 8)
    f = KatetovFunction(sp, [sp.dist[x][z] + t for x in range(n)])
    out = extend_one_point(sp, f, "new")
    assert validate_metric(out).ok
    assert all(out.dist[x][:n] == sp.dist[x] for x in range(n))


@given(metric_spaces(max_points=5))
def test_isometric_self_embeddings_compose(sp: FiniteMetricSpace) -> None:
    embs = find_isometric_embeddings(sp, sp)
    assert tuple(range(len(sp))) in [e.mapping for e in embs]
    for e1, e2 in itertools.islice(itertools.product(embs, embs), 30):
        assert e1.compose(e2).max_distortion == 0


def test_thousand_random_extensions_are_metric() -> None:
    rng = random.Random(7)
    for _ in range(1000):
        n = rng.randint(1, 6)
        d = random_metric(rng, n, denom=rng.randint(1, 8))
        sp = space(d)
        vals = []
        for x in range(n):
            vals.append(d[x][0] + Fraction(rng.randint(1, 8), 8))
        f = KatetovFunction(sp, vals)
        if not katetov_validate(f):
            continue
        out = extend_one_point(sp, f, "b")
        assert validate_metric(out).ok
        assert metric_problems(n + 1, out.dist) == []


def test_validate_metric_matches_oracle() -> None:
    rng = random.Random(3)
    for _ in range(300):
        n = rng.randint(2, 5)
        rows = [[Scalar(0)] * n for _ in range(n)]
        for x in range(n):
            for y in range(x + 1, n):
                rows[x][y] = rows[y][x] = Scalar(Fraction(rng.randint(1, 6), 2))
        sp = space(rows)
        assert validate_metric(sp).ok == (metric_problems(n, rows) == [])
