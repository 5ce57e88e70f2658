"""One inductive step of the approximate-to-exact extension argument.

Given an exactly commuting i: A -> stage, a target B = A + {b} and the current
rational approximation B_n with its embedding j'_n, the step builds the next
approximation B_{n+1}, embeds it with i_{n+1} and glues it onto the chain of
approximations with matched pairs at distance eps_{n+1}/2.

Internally the construction runs on pseudometric matrices over the index list

    A (m) | A_n (m) | b_n | C_n (k) | b

because images of A and A_n may coincide in the stage. Zero-distance classes
are collapsed before rationalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .. import rationalize as rz
from ..amalgam import glue_epsilon_copy, regularize_matrix
from ..errors import PipelineError, PreconditionError, ShapeError, UrysohnError
from ..metric import Embedding, FiniteMetricSpace
from ..scalar import ZERO, Scalar, ScalarLike, smax, smin
from ..triple import Triple, discrepancy, is_subtriple_prefix, validate_triple
from .stage import AmbientStage
from .urstar import SearchBudget, UrStarVerdict, check_ur_star

SCHEDULE_DENOMINATOR = 44
CLAIM_G_PRIME = Fraction(25, 2)
CLAIM_RHO = Fraction(35, 2)


def epsilon_schedule(eps: ScalarLike, n: int) -> Scalar:
    """eps_n = eps * 2^-n / 44."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return Scalar.coerce(eps) * Fraction(1, SCHEDULE_DENOMINATOR * 2**n)


def schedule_total(eps: ScalarLike) -> Scalar:
    """21 * sum over n of eps_n, in closed form: 21 * eps/44 * 2 = 21 eps/22."""
    first = epsilon_schedule(eps, 0)
    return 21 * first * 2  # geometric series with ratio 1/2


def schedule_partial_sum(eps: ScalarLike, terms: int) -> Scalar:
    total = ZERO
    for n in range(terms):
        total = total + epsilon_schedule(eps, n)
    return 21 * total


@dataclass(frozen=True)
class StepInput:
    """Induction data at level n."""

    stage: AmbientStage
    a: Triple
    i: tuple[int, ...]
    b: Triple
    b_n: Triple
    j_n: tuple[int, ...]
    eps_n: Scalar
    chain: Triple
    chain_copy: tuple[int, ...]  # indices of B inside the chain
    level: int = 0


@dataclass(frozen=True)
class HypothesisReport:
    distance_gap: Scalar  # max |d_n - d_B|, want < eps_n/2
    potential_gap: Scalar  # max |p'_n - p'|, want <= eps_n/2
    pattern_ok: bool
    displacement: Scalar  # max d(j'_n(a_n), i(a)), want <= 5 eps_n/2
    commutation: Scalar  # want < 5 eps_n
    potential: Scalar  # want < 3 eps_n

    def holds(self, eps_n: ScalarLike) -> bool:
        e = Scalar.coerce(eps_n)
        return (
            self.distance_gap < e / 2
            and self.potential_gap <= e / 2
            and self.pattern_ok
            and self.displacement <= 5 * e / 2
            and self.commutation < 5 * e
            and self.potential < 3 * e
        )


@dataclass(frozen=True)
class StepReport:
    eps_n: Scalar
    eps_next: Scalar
    completion_size: int
    f_displacement: Scalar  # max f_n(a, a_n)
    g_prime_b_bn: Scalar
    rho_b_bn: Scalar
    claim_g_prime: bool  # g'_n(b, b_n) < 25 eps_n / 2
    claim_rho: bool  # rho_n(b, b_n) < 35 eps_n / 2
    regularization_rounds: int
    quotient_size: int
    merged_b: bool
    rationalization: "rz.RationalizationTrace"
    h_displacement: Scalar
    ur_star: UrStarVerdict | None
    matched_distance: Scalar  # chain distance between B and B_{n+1} partners
    next_input: StepInput
    next_hypotheses: HypothesisReport


def check_hypotheses(inp: StepInput) -> HypothesisReport:
    a, b, bn = inp.a, inp.b, inp.b_n
    m = len(a)
    if len(b) != m + 1 or len(bn) != m + 1:
        raise ShapeError("B and B_n must have |A| + 1 points")
    if not is_subtriple_prefix(a, b):
        raise ShapeError("B must start with A")
    amb = inp.stage.triple
    rep = discrepancy(amb, inp.i, a)
    if not rep.exact:
        raise PreconditionError("i must commute exactly with (U, D)")
    db, dn = b.space.dist, bn.space.dist
    dist_gap = smax(abs(db[x][y] - dn[x][y]) for x in range(m + 1) for y in range(m + 1))
    pot_gap = smax(abs(b.potential[x] - bn.potential[x]) for x in range(m + 1))
    pattern = bn.retraction == b.retraction
    ad = amb.space.dist
    disp = smax([ad[inp.j_n[x]][inp.i[x]] for x in range(m)] or [ZERO])
    jr = discrepancy(amb, inp.j_n, bn)
    return HypothesisReport(dist_gap, pot_gap, pattern, disp, jr.max_commutation_gap, jr.max_potential_gap)


def _labels(*groups: Sequence[str]) -> list[str]:
    out, taken = [], set()
    for group in groups:
        for label in group:
            while label in taken:
                label += "'"
            taken.add(label)
            out.append(label)
    return out


def aprox_step(
    inp: StepInput,
    budget: SearchBudget | None = None,
    strict: bool = True,
) -> StepReport:
    """Run one full inductive step and measure every intermediate bound."""
    hyp = check_hypotheses(inp)
    if strict and not hyp.holds(inp.eps_n):
        raise PreconditionError(f"induction hypotheses fail at eps_n = {inp.eps_n}: {hyp}")
    eps_n = inp.eps_n
    eps_next = eps_n / 2
    stage = inp.stage
    amb = stage.triple
    ad, au, ap = amb.space.dist, amb.retraction, amb.potential
    a, b, bn = inp.a, inp.b, inp.b_n
    m = len(a)
    i_map, j_map = list(inp.i), list(inp.j_n)

    # commuting completion of j'_n: C_n = U-images outside j'_n[A_n]
    c_pts: list[int] = []
    r_bn_side = [0] * (m + 1)  # R_n on B_n as a layout index
    j_an = {j_map[x]: x for x in range(m)}

    def c_index(u: int) -> int:
        if u not in c_pts:
            c_pts.append(u)
        return c_pts.index(u)

    for x in range(m + 1):
        u = au[j_map[x]]
        if u in j_an:
            r_bn_side[x] = ("an", j_an[u])
        elif x == m and u == j_map[m]:
            r_bn_side[x] = ("bn", 0)
        else:
            r_bn_side[x] = ("c", c_index(u))
    k = len(c_pts)
    rep_c = discrepancy(amb, j_map, bn)
    if not rep_c.below(5 * eps_n):
        raise PipelineError("completion", PreconditionError("j'_n is not 5 eps_n-commuting"))

    # layout
    A0, AN0, BN, C0, B = 0, m, 2 * m, 2 * m + 1, 2 * m + 1 + k
    size = B + 1
    stage_of = i_map + j_map[:m] + [j_map[m]] + c_pts  # I_n on A + B_n + C_n

    def lay(tag) -> int:
        kind, v = tag
        return {"an": AN0, "bn": BN, "c": C0}[kind] + v

    R = [0] * size
    P = [ZERO] * size
    for x in range(m):
        R[A0 + x] = A0 + a.retraction[x]
        P[A0 + x] = a.potential[x]
        R[AN0 + x] = lay(r_bn_side[x])
        P[AN0 + x] = ap[j_map[x]]
    R[BN] = lay(r_bn_side[m])
    P[BN] = ap[j_map[m]]
    for q, s in enumerate(c_pts):
        R[C0 + q] = C0 + q  # U-images are fixed by U
        P[C0 + q] = ap[s]
    rb = b.retraction[m]
    R[B] = B if rb == m else A0 + rb
    P[B] = b.potential[m]

    # f_n on A + B_n + C_n pulled back from the stage
    M = [[ZERO] * size for _ in range(size)]
    for x in range(B):
        for y in range(B):
            M[x][y] = ad[stage_of[x]][stage_of[y]]
    f_disp = smax([M[A0 + x][AN0 + x] for x in range(m)] or [ZERO])

    # g_n: maximal amalgam of B and e_n = f_n on A + A_n + C_n over A
    db = b.space.dist
    e_idx = list(range(A0, BN)) + list(range(C0, B))
    for x in e_idx:
        if x < AN0:
            v = db[m][x - A0]
        else:
            v = smin([db[m][z] + M[A0 + z][x] for z in range(m)]) if m else None
        if v is None:
            raise PipelineError("max-amalgam", PreconditionError("A is empty"))
        M[B][x] = M[x][B] = v

    # g'_n: minimal amalgam of (B + A_n + C_n, g_n) and (A + B_n + C_n, f_n)
    g_prime = smax(abs(M[B][x] - M[x][BN]) for x in e_idx)
    M[B][BN] = M[BN][B] = g_prime
    claim_g = g_prime < CLAIM_G_PRIME * eps_n

    # rho_n
    try:
        rho, rounds = regularize_matrix(M, R, P)
    except UrysohnError as exc:
        raise PipelineError("regularize", exc) from exc
    for x in range(B):
        for y in range(B):
            if rho[x][y] != M[x][y]:
                raise PipelineError("regularize", PreconditionError("rho_n changed f_n"))
    rho_bbn = rho[B][BN]
    claim_r = rho_bbn < CLAIM_RHO * eps_n

    # collapse zero-distance classes, keeping the first index of each class
    rep = list(range(size))
    for x in range(size):
        for y in range(x):
            if rep[y] == y and rho[x][y] == 0:
                rep[x] = y
                break
    reps = sorted(set(rep))
    pos = {v: q for q, v in enumerate(reps)}
    qpos = [pos[rep[x]] for x in range(size)]
    labels_all = _labels(
        a.space.points,
        [f"{lab}@{inp.level}" for lab in bn.space.points[:m]],
        [f"{bn.space.points[m]}@{inp.level}"],
        [f"c{q}@{inp.level}" for q in range(k)],
        [b.space.points[m]],
    )
    q_space = FiniteMetricSpace._trusted(
        tuple(labels_all[v] for v in reps), tuple(tuple(rho[v][w] for w in reps) for v in reps)
    )
    q_triple = Triple(q_space, [qpos[R[v]] for v in reps], [P[v] for v in reps])
    try:
        bad = validate_triple(q_triple, realizable=False)
    except UrysohnError as exc:
        raise PipelineError("quotient", exc) from exc
    if bad:
        raise PipelineError("quotient", PreconditionError(f"collapsed triple invalid: {sorted(bad.kinds())}"))
    merged_b = rep[B] != B

    # rationalize with B_n frozen
    frozen = sorted({qpos[x] for x in range(AN0, BN + 1)})
    try:
        d_next, trace = rz.rationalize_triple(q_triple, eps_next / 2, frozen)
    except UrysohnError as exc:
        raise PipelineError("rationalize", exc) from exc

    # h_{n+1}: nearby rational embedding of A_{n+1} + B_n + D_n
    target_pos: list[int] = []
    for x in range(B):
        if qpos[x] not in target_pos:
            target_pos.append(qpos[x])
    src_map = []
    for q in target_pos:
        src_map.append(stage_of[reps[q]])
    src_space = q_space.subspace(target_pos)
    try:
        src_emb = Embedding(src_space, amb.space, src_map)
        if not src_emb.is_isometric:
            raise PreconditionError("I_n is not isometric on the collapsed points")
        target = d_next.subtriple(target_pos)
        fpb = rz.nearby_rational_embedding_report(stage, src_emb, target, eps_next / 2)
    except PipelineError:
        raise
    except UrysohnError as exc:
        raise PipelineError("nearby-embedding", exc) from exc
    stage1 = fpb.stage
    h_map = list(fpb.embedding.mapping)
    h_disp = smax(fpb.displacement) if fpb.displacement else ZERO

    # i_{n+1} by the approximate extension search
    verdict = None
    if merged_b:
        i_next = h_map
        order = target_pos
        stage2 = stage1
    else:
        order = target_pos + [qpos[B]]
        big = d_next.subtriple(order)
        try:
            verdict = check_ur_star(stage1, eps_next, target, h_map, big, budget)
        except UrysohnError as exc:
            raise PipelineError("ur-star", exc) from exc
        if not verdict.success:
            raise PipelineError("ur-star", PreconditionError("bounded search exhausted"))
        i_next = list(verdict.embedding.mapping)
        stage2 = verdict.stage
    where = {q: t for t, q in enumerate(order)}

    # B_{n+1} and j'_{n+1}
    b_pos = [qpos[A0 + x] for x in range(m)] + [qpos[B]]
    b_next = d_next.subtriple(b_pos).relabel([f"{lab}#{inp.level + 1}" for lab in b.space.points])
    j_next = tuple(i_next[where[q]] for q in b_pos)

    # glue B_{n+1} onto the chain
    try:
        chain = glue_epsilon_copy(inp.chain, inp.chain_copy, b_next, eps_next / 2)
    except UrysohnError as exc:
        raise PipelineError("glue", exc) from exc
    n0 = len(inp.chain)
    matched = smax(chain.space.dist[inp.chain_copy[x]][n0 + x] for x in range(m + 1))

    nxt = StepInput(
        stage=stage2,
        a=a,
        i=tuple(i_map),
        b=b,
        b_n=b_next,
        j_n=j_next,
        eps_n=eps_next,
        chain=chain,
        chain_copy=inp.chain_copy,
        level=inp.level + 1,
    )
    return StepReport(
        eps_n=eps_n,
        eps_next=eps_next,
        completion_size=k,
        f_displacement=f_disp,
        g_prime_b_bn=g_prime,
        rho_b_bn=rho_bbn,
        claim_g_prime=claim_g,
        claim_rho=claim_r,
        regularization_rounds=rounds,
        quotient_size=len(reps),
        merged_b=merged_b,
        rationalization=trace,
        h_displacement=h_disp,
        ur_star=verdict,
        matched_distance=matched,
        next_input=nxt,
        next_hypotheses=check_hypotheses(nxt),
    )


def start_induction(
    stage: AmbientStage,
    a: Triple,
    i: Embedding | Sequence[int],
    b: Triple,
    eps: ScalarLike,
    budget: SearchBudget | None = None,
) -> StepInput:
    """Level-0 data: B_0 by rationalization, j_0 near i, j'_0 by extension search."""
    eps0 = epsilon_schedule(eps, 0)
    i_map = tuple(i.mapping if isinstance(i, Embedding) else i)
    m = len(a)
    if len(b) != m + 1 or not is_subtriple_prefix(a, b):
        raise ShapeError("B must be A followed by one new point")
    if not discrepancy(stage.triple, i_map, a).exact:
        raise PreconditionError("i must commute exactly with (U, D)")
    try:
        b0, _ = rz.rationalize_triple(b, eps0 / 2, ())
    except UrysohnError as exc:
        raise PipelineError("rationalize", exc) from exc
    b0 = b0.relabel([f"{lab}#0" for lab in b.space.points])
    a0 = b0.subtriple(range(m))
    try:
        src = Embedding(a.space, stage.triple.space, i_map)
        fpb = rz.nearby_rational_embedding_report(stage, src, a0, eps0 / 2)
    except UrysohnError as exc:
        raise PipelineError("nearby-embedding", exc) from exc
    verdict = check_ur_star(fpb.stage, eps0, a0, fpb.embedding.mapping, b0, budget)
    if not verdict.success:
        raise PipelineError("ur-star", PreconditionError("bounded search exhausted"))
    try:
        chain = glue_epsilon_copy(b, range(m + 1), b0, eps0 / 2)
    except UrysohnError as exc:
        raise PipelineError("glue", exc) from exc
    return StepInput(
        stage=verdict.stage,
        a=a,
        i=i_map,
        b=b,
        b_n=b0,
        j_n=tuple(verdict.embedding.mapping),
        eps_n=eps0,
        chain=chain,
        chain_copy=tuple(range(m + 1)),
        level=0,
    )


def exact_input(a: Triple, b: Triple, eps_n: ScalarLike) -> StepInput:
    """The exactly commuting case: the stage is B itself and B_n = B."""
    m = len(a)
    if len(b) != m + 1 or not is_subtriple_prefix(a, b):
        raise ShapeError("B must be A followed by one new point")
    if not b.is_rational():
        raise PreconditionError("the exact case needs a rational B")
    stage = AmbientStage(b)
    ident = tuple(range(m + 1))
    return StepInput(
        stage=stage,
        a=a,
        i=ident[:m],
        b=b,
        b_n=b.relabel([f"{lab}#0" for lab in b.space.points]),
        j_n=ident,
        eps_n=Scalar.coerce(eps_n),
        chain=glue_epsilon_copy(b, ident, b, Scalar.coerce(eps_n) / 2),
        chain_copy=ident,
        level=0,
    )
