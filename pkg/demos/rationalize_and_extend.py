"""From an irrational triple to a rational one, then an approximate extension.

    python demos/rationalize_and_extend.py
"""

from fractions import Fraction

from urysohn_retractions import SQRT2, Triple, rationalize_triple
from urysohn_retractions.fraisse.aprox import aprox_step, exact_input, schedule_total
from urysohn_retractions.triple import AttachTo, ExtensionSpec, apply_extension

pair = Triple.build(["a", "b"], [[0, SQRT2], [SQRT2, 0]], [0, 1], [0, 0])
out, trace = rationalize_triple(pair, Fraction(1, 10))
print("sqrt 2 becomes", out.space.dist[0][1], "with working tolerance", trace.eps5)

# one inductive step in the exactly commuting case
a = Triple.build(["a0", "a1"], [[0, 1], [1, 0]], [0, 0], [0, 1])
b = apply_extension(a, ExtensionSpec(a, [1, 1], AttachTo(0), Fraction(1, 2)), "b")
rep = aprox_step(exact_input(a, b, Fraction(1, 8)))
print("g'(b, b_n) =", rep.g_prime_b_bn, " rho(b, b_n) =", rep.rho_b_bn, " next eps =", rep.eps_next)
print("21 * sum of the schedule for eps = 1:", schedule_total(1))
