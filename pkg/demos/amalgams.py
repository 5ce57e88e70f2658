"""Gluing finite triples: maximal and minimal amalgams, then an eps-copy.

    python demos/amalgams.py
"""

from fractions import Fraction

from urysohn_retractions import FiniteMetricSpace, SharedPart, Triple, amalgamate_max, amalgamate_min
from urysohn_retractions.amalgam import glue_epsilon_copy

uv = Triple.build(["u", "v"], [[0, 3], [3, 0]], [0, 0], [0, 2])
uw = Triple.build(["u", "w"], [[0, 1], [1, 0]], [0, 1], [0, 0])

# over the shared point u, the largest admissible distance is the path through u
glued = amalgamate_max(SharedPart(uv, uw, {0: 0}))
print("max amalgam d(v, w) =", glued.space.dist[1][2])

# the smallest admissible distance between a and b over c
left = FiniteMetricSpace(["c", "a"], [[0, 1], [1, 0]])
right = FiniteMetricSpace(["c", "b"], [[0, 2], [2, 0]])
print("min amalgam d(a, b) =", amalgamate_min(left, right, {0: 0}).dist[1][2])

# a fresh copy glued at distance exactly 1/2 from its partners
chain = glue_epsilon_copy(uv, [0, 1], uv.relabel(["u'", "v'"]), Fraction(1, 2))
d = chain.space.dist
print("matched pairs:", d[0][2], d[1][3], " crossed pair d(u, v') =", d[0][3])
