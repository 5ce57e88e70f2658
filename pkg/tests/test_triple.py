from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given

from conftest import triples
from oracles import grid, triple_ok, triple_problems
from urysohn_retractions.errors import InvalidSpecError, NotIsometricError
from urysohn_retractions.fraisse.stage import single_point_triple
from urysohn_retractions.metric import find_isometric_embeddings
from urysohn_retractions.triple import (
    AttachTo,
    ExtensionSpec,
    NewRetractPoint,
    Triple,
    apply_extension,
    discrepancy,
    enumerate_one_point_extensions,
    find_commuting_embeddings,
    validate_triple,
)

HALF = Fraction(1, 2)
UV = Triple.build(["u", "v"], [[0, 3], [3, 0]], [0, 0], [0, 2])
EQUI = Triple.build(["a", "b", "c"], [[0, 1, 1], [1, 0, 1], [1, 1, 0]], [0, 1, 2], [0, 0, 0])


def test_validate_examples() -> None:
    assert validate_triple(UV).ok
    assert triple_problems(UV.space.dist, UV.retraction, UV.potential) == []
    bad_zero = Triple.build(["u", "v"], [[0, 3], [3, 0]], [0, 0], [1, 2])
    assert "zero-set" in validate_triple(bad_zero).kinds()
    swap = Triple.build(["u", "v"], [[0, 3], [3, 0]], [1, 0], [1, 1])
    assert "idempotence" in validate_triple(swap).kinds()


def test_realizability_flag() -> None:
    far = Triple.build(["u", "v"], [[0, 10], [10, 0]], [0, 0], [0, 1])
    assert validate_triple(far).kinds() == {"realizability"}
    assert validate_triple(far, realizable=False).ok


def test_single_point_enumeration() -> None:
    specs = enumerate_one_point_extensions(single_point_triple(), 1, 2)
    got = [(tuple(s.f.values), str(s.retract_mode), s.new_potential) for s in specs]
    assert got == [
        ((1,), "new-retract-point", 0),
        ((2,), "new-retract-point", 0),
        ((1,), "attach-to(0)", 1),
        ((2,), "attach-to(0)", 1),
        ((2,), "attach-to(0)", 2),
    ]


def test_small_diameter_gives_nothing() -> None:
    assert enumerate_one_point_extensions(single_point_triple(), 1, HALF) == []


def test_attach_specs_respect_potential_bound() -> None:
    for spec in enumerate_one_point_extensions(UV, 2, 4):
        if spec.retract_mode == AttachTo(0):
            assert abs(spec.new_potential - 2) <= spec.f.values[1]


def _oracle_specs(t: Triple, den: int, top: int):
    values = grid(den, top)
    n = len(t)
    out = set()
    for f in itertools.product(values, repeat=n):
        candidates = [(NewRetractPoint(), Fraction(0))]
        candidates += [(AttachTo(c), q) for c in t.retract_points() for q in values]
        for mode, q in candidates:
            d = [list(row) + [f[k]] for k, row in enumerate(t.space.dist)] + [list(f) + [0]]
            r = list(t.retraction) + [n if isinstance(mode, NewRetractPoint) else mode.c0]
            p = list(t.potential) + [q]
            if not triple_problems(d, r, p):
                out.add((tuple(f), mode, q))
    return out


@pytest.mark.parametrize(
    "t",
    [single_point_triple(), UV, EQUI, Triple.build(["u", "v"], [[0, 1], [1, 0]], [0, 0], [0, 1])],
    ids=["point", "uv", "equilateral", "attached"],
)
def test_enumeration_equals_filtered_grid(t: Triple) -> None:
    for den, top in [(1, 2), (2, 2)]:
        if len(t) == 3 and den == 2:
            continue
        specs = enumerate_one_point_extensions(t, den, top)
        got = {(tuple(s.f.values), s.retract_mode, s.new_potential) for s in specs}
        assert len(got) == len(specs)
        assert got == _oracle_specs(t, den, top)


def test_enumeration_order() -> None:
    specs = enumerate_one_point_extensions(UV, 2, 4)
    kinds = [isinstance(s.retract_mode, AttachTo) for s in specs]
    assert kinds == sorted(kinds)
    news = [tuple(s.f.values) for s in specs if not kinds[specs.index(s)]]
    assert news == sorted(news)


def test_apply_extension_examples() -> None:
    o = single_point_triple()
    two = apply_extension(o, ExtensionSpec(o, [1], NewRetractPoint()), "b")
    assert two.retraction == (0, 1) and two.potential == (0, 0)
    att = apply_extension(o, ExtensionSpec(o, [2], AttachTo(0), 1), "b")
    assert validate_triple(att).ok
    stale = ExtensionSpec(UV, [1, 2], NewRetractPoint())
    with pytest.raises(InvalidSpecError):
        apply_extension(o, stale)
    with pytest.raises(InvalidSpecError):
        apply_extension(o, ExtensionSpec(o, [3], AttachTo(0), 1))


def test_every_spec_applies_cleanly() -> None:
    bases = [single_point_triple(), UV, EQUI]
    for t in bases:
        for spec in enumerate_one_point_extensions(t, 2 if len(t) < 3 else 1, 2):
            out = apply_extension(t, spec)
            assert validate_triple(out).ok and triple_ok(out)


def test_commuting_embeddings_examples() -> None:
    maps = [e.mapping for e, rep in find_commuting_embeddings(UV, UV)]
    assert (0, 1) in maps
    assert len(find_commuting_embeddings(EQUI, EQUI)) == 6
    small = Triple.build(["u", "v"], [[0, 1], [1, 0]], [0, 0], [0, HALF])
    amb = Triple.build(["u", "v"], [[0, 1], [1, 0]], [0, 0], [0, Fraction(1, 3)])
    assert find_commuting_embeddings(small, amb) == []


def test_discrepancy_examples() -> None:
    assert discrepancy(UV, [0, 1], UV).exact
    # ambient retracts v onto a separate point w at distance 1 from u
    amb = Triple.build(
        ["u", "v", "w"], [[0, 3, 1], [3, 0, 2], [1, 2, 0]], [0, 2, 2], [0, 2, 0]
    )
    rep = discrepancy(amb, [0, 1], UV)
    assert rep.max_commutation_gap >= 1 and rep.max_potential_gap == 0
    with pytest.raises(NotIsometricError):
        discrepancy(amb, [0, 2], UV)


@given(triples(max_points=4), triples(max_points=5))
def test_commuting_equals_filtered_isometric(small: Triple, amb: Triple) -> None:
    exact = sorted(e.mapping for e, _ in find_commuting_embeddings(small, amb))
    brute = sorted(
        e.mapping for e in find_isometric_embeddings(small.space, amb.space) if discrepancy(amb, e, small).exact
    )
    assert exact == brute


@given(triples())
def test_sampled_triples_pass_oracle(t: Triple) -> None:
    assert validate_triple(t).ok == triple_ok(t)
    assert triple_ok(t)


@given(triples(max_points=3))
def test_enumeration_specs_validate(t: Triple) -> None:
    for spec in enumerate_one_point_extensions(t, 2, 2)[:200]:
        assert triple_ok(apply_extension(t, spec))
