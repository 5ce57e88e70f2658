"""Grow the standard stages, test an approximate extension, and play the game.

    python demos/stage_and_game.py
"""

from fractions import Fraction

from urysohn_retractions.fraisse.game import EveMove, check_game_state, play_game
from urysohn_retractions.fraisse.stage import STANDARD_SCHEDULE, AmbientStage, check_genericity, grow
from urysohn_retractions.fraisse.urstar import check_ur_star
from urysohn_retractions.triple import ExtensionSpec, NewRetractPoint, Triple, apply_extension

stages = grow(AmbientStage.initial())
print("stage sizes:", [len(s) for s in stages])
for bounds, old, new in zip(STANDARD_SCHEDULE, stages, stages[1:]):
    rep = check_genericity(old, new, *bounds)
    print(f"  bounds {bounds}: {rep.checked} extensions checked, {len(rep.missing)} missing")

a = Triple.build(["o"], [[0]], [0], [0])
b = apply_extension(a, ExtensionSpec(a, [Fraction(3, 4)], NewRetractPoint(), Fraction(0)), "b")
v = check_ur_star(stages[3], Fraction(1, 2), a, [0], b)
print("(UR*) at eps = 1/2:", v.status, "bounds", v.displacement, v.commutation, v.potential)

script = [None, EveMove({0: 1}, NewRetractPoint())]
gs = play_game(stages[1], script, 6)
print("game rounds:", [("no-op" if r.noop else f"+{r.adam_added}") for r in gs.history])
print("invariants hold:", check_game_state(gs).ok)
