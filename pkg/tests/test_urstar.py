from __future__ import annotations

from fractions import Fraction

import pytest

from ur_star_battery import CASES, EPS, build_case
from urysohn_retractions.errors import PreconditionError, ShapeError
from urysohn_retractions.fraisse.stage import AmbientStage, is_exact_prefix, single_point_triple
from urysohn_retractions.fraisse.urstar import SearchBudget, check_ur_star
from urysohn_retractions.scalar import SQRT2
from urysohn_retractions.triple import AttachTo, NewRetractPoint, Triple, _extend_unchecked


def independent_bounds(stage_triple: Triple, full, b: Triple, i):
    d, u, dd = stage_triple.space.dist, stage_triple.retraction, stage_triple.potential
    disp = max([d[i[x]][full[x]] for x in range(len(i))], default=0)
    comm = max(d[u[full[x]]][full[b.retraction[x]]] for x in range(len(b)))
    pot = max(abs(dd[full[x]] - b.potential[x]) for x in range(len(b)))
    return disp, comm, pot


@pytest.mark.parametrize("case", CASES, ids=[c[0] for c in CASES])
def test_battery_case(case, gen3) -> None:
    name, a, i, b = build_case(case)
    v = check_ur_star(gen3, EPS, a, i, b)
    assert v.success and v.status == "success"
    amb = v.stage.triple
    assert is_exact_prefix(gen3.triple, amb)
    full = v.embedding.mapping
    assert list(full[: len(a)]) == i
    n = len(b)
    assert all(amb.space.dist[full[x]][full[y]] == b.space.dist[x][y] for x in range(n) for y in range(n))
    disp, comm, pot = independent_bounds(amb, full, b, i)
    assert (disp, comm, pot) == (v.displacement, v.commutation, v.potential)
    assert disp < 2 * EPS and comm < 5 * EPS and pot < 3 * EPS


def test_extension_is_absorbed_when_stage_lacks_a_witness() -> None:
    stage = AmbientStage.initial()
    a = single_point_triple("a0")
    b = _extend_unchecked(a, [Fraction(1)], NewRetractPoint(), Fraction(0), "b")
    v = check_ur_star(stage, Fraction(1, 4), a, [0], b)
    assert v.success and len(v.stage) == 2
    assert v.stage.triple.space.dist[0][1] == 1 and v.stage.triple.retraction == (0, 1)


def test_attached_point_far_out() -> None:
    stage = AmbientStage.initial()
    a = single_point_triple("a0")
    b = _extend_unchecked(a, [Fraction(3)], AttachTo(0), Fraction(2), "b")
    v = check_ur_star(stage, Fraction(1, 4), a, [0], b)
    assert v.success and v.commutation == 0 and v.potential == 0


def test_zero_budget_is_exhausted_not_refuted(gen3) -> None:
    _, a, i, b = build_case(CASES[0])
    v = check_ur_star(gen3, EPS, a, i, b, SearchBudget(max_candidates=0))
    assert not v.success and v.status == "exhausted" and v.embedding is None
    assert v.stage is gen3


def test_malformed_cases(gen3) -> None:
    _, a, i, b = build_case(CASES[0])
    with pytest.raises(ValueError):
        check_ur_star(gen3, 0, a, i, b)
    with pytest.raises(ShapeError):
        check_ur_star(gen3, EPS, b, [0, 1], b)
    with pytest.raises(ShapeError):
        check_ur_star(gen3, EPS, a, i, a)
    # a point with nonzero potential does not sit eps-close to the retract o
    shifted = Triple.build(["a0"], [[0]], [0], [0])
    far = _extend_unchecked(shifted, [Fraction(1)], AttachTo(0), Fraction(1), "b")
    bad_i = [k for k in range(len(gen3)) if gen3.triple.potential[k] >= 2][0]
    with pytest.raises(PreconditionError):
        check_ur_star(gen3, Fraction(1, 8), shifted, [bad_i], far)
    irr = _extend_unchecked(shifted, [SQRT2], NewRetractPoint(), Fraction(0), "b")
    with pytest.raises(PreconditionError):
        check_ur_star(gen3, EPS, shifted, [0], irr)


def test_thresholds(gen3) -> None:
    _, a, i, b = build_case(CASES[0])
    v = check_ur_star(gen3, EPS, a, i, b)
    assert v.thresholds(EPS) == (1, Fraction(5, 2), Fraction(3, 2))
