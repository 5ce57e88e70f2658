"""Random Eve scripts over the half-integer grid."""

from __future__ import annotations

import random
from fractions import Fraction

from urysohn_retractions.errors import UrysohnError
from urysohn_retractions.fraisse.game import EveMove, eve_triple
from urysohn_retractions.triple import AttachTo, NewRetractPoint, Triple

GRID = [Fraction(k, 2) for k in range(1, 5)]


def random_move(rng: random.Random, head: Triple, tries: int = 50) -> EveMove | None:
    if rng.random() < 0.2:
        return None
    for _ in range(tries):
        z = rng.randrange(len(head))
        v = rng.choice(GRID)
        retracts = head.retract_points()
        if rng.random() < 0.4:
            move = EveMove({z: v}, NewRetractPoint(), 0)
        else:
            move = EveMove({z: v}, AttachTo(rng.choice(retracts)), rng.choice(GRID))
        try:
            eve_triple(head, move, "probe")
        except UrysohnError:
            continue
        return move
    return None
