"""Finite plays of the Eve/Adam game against an ambient stage."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from ..errors import InvalidSpecError, PreconditionError, ScriptError, UrysohnError
from ..scalar import Scalar, ScalarLike, smin
from ..triple import (
    ExtensionSpec,
    RetractMode,
    Triple,
    apply_extension,
    discrepancy,
    is_subtriple_prefix,
    validate_triple,
)
from .stage import AmbientStage, single_point_triple

POTENTIAL_RULES = ("stage", "retract-distance")


@dataclass(frozen=True)
class EveMove:
    """A one-point extension of the chain head.

    ``f`` gives distances to some head points (a mapping or a full sequence);
    missing values are completed by the maximal amalgam formula.
    """

    f: Union[Mapping[int, ScalarLike], Sequence[ScalarLike]]
    mode: RetractMode
    potential: ScalarLike = 0

    def resolve(self, head: Triple) -> ExtensionSpec:
        given = dict(self.f) if isinstance(self.f, Mapping) else dict(enumerate(self.f))
        if not given:
            raise InvalidSpecError("an Eve move needs at least one distance")
        vals = {int(k): Scalar.coerce(v) for k, v in given.items()}
        if any(not 0 <= k < len(head) for k in vals):
            raise InvalidSpecError("Eve move refers to a missing point")
        d = head.space.dist
        full = [vals[x] if x in vals else smin(v + d[z][x] for z, v in vals.items()) for x in range(len(head))]
        return ExtensionSpec(head, full, self.mode, self.potential)


@dataclass(frozen=True)
class RoundRecord:
    round_index: int
    eve_added: int
    cursor: int
    cursor_point: int | None
    noop: bool
    adam_added: int


@dataclass(frozen=True)
class GameState:
    chain: tuple[Triple, ...]
    embeddings: tuple[tuple[int, ...], ...]
    stage: AmbientStage
    cursor: int = 0
    history: tuple[RoundRecord, ...] = field(default=())

    @property
    def head(self) -> Triple:
        return self.chain[-1]

    @property
    def f(self) -> tuple[int, ...]:
        return self.embeddings[-1]

    def covered(self, stage_point: int) -> bool:
        return stage_point in self.f


def initial_state(stage: AmbientStage, x0: Triple | None = None, f0: Sequence[int] | None = None) -> GameState:
    """X_0 defaults to one retract point sent to the first stage retract point."""
    if x0 is None:
        amb = stage.triple
        anchor = next((s for s in range(len(amb)) if amb.retraction[s] == s), None)
        if anchor is None:
            raise PreconditionError("the stage has no retract point")
        x0 = single_point_triple("x0")
        f0 = (anchor,)
    if f0 is None or len(f0) != len(x0):
        raise PreconditionError("X_0 needs an embedding")
    if not discrepancy(stage.triple, f0, x0).exact:
        raise PreconditionError("f_0 must commute exactly")
    return GameState((x0,), (tuple(f0),), stage)


def _fresh(taken: set[str], base: str) -> str:
    while base in taken:
        base += "'"
    taken.add(base)
    return base


def adam_move(gs: GameState, eve: Triple, potential_rule: str = "stage", round_index: int | None = None) -> GameState:
    """Embed Eve's triple, then pull back the cursor point and its retraction."""
    if potential_rule not in POTENTIAL_RULES:
        raise ValueError(f"potential_rule must be one of {POTENTIAL_RULES}")
    head = gs.head
    if not is_subtriple_prefix(head, eve):
        raise PreconditionError("Eve's triple does not extend the chain head")
    stage, emb = gs.stage.absorb(eve, dict(enumerate(gs.f)))
    f_eve = tuple(emb.mapping)
    amb = stage.triple
    k = gs.cursor
    chain = gs.chain + (eve,)
    embs = gs.embeddings + (f_eve,)
    rnd = len(gs.history) if round_index is None else round_index
    eve_added = len(eve) - len(head)

    x_k = k if k < len(amb) else None
    if x_k is None or x_k in f_eve:
        rec = RoundRecord(rnd, eve_added, k, x_k, True, 0)
        return GameState(chain + (eve,), embs + (f_eve,), stage, k + 1, gs.history + (rec,))

    b_k = amb.retraction[x_k]
    new = [x_k] if (b_k == x_k or b_k in f_eve) else [x_k, b_k]
    mapping = list(f_eve) + new
    taken = set(eve.space.points)
    labels = list(eve.space.points) + [_fresh(taken, f"y{k}")]
    if len(new) == 2:
        labels.append(_fresh(taken, f"a{k}"))
    adam = amb.subtriple(mapping).relabel(labels)
    if potential_rule == "retract-distance":
        p = list(adam.potential)
        p[len(eve)] = amb.retract_distance(x_k)
        adam = Triple(adam.space, adam.retraction, p)
    rec = RoundRecord(rnd, eve_added, k, x_k, False, len(new))
    return GameState(chain + (adam,), embs + (tuple(mapping),), stage, k + 1, gs.history + (rec,))


ScriptEntry = Union[None, EveMove, ExtensionSpec, Triple]


def eve_triple(head: Triple, entry: ScriptEntry, label: str) -> Triple:
    if entry is None:
        return head
    if isinstance(entry, Triple):
        if not is_subtriple_prefix(head, entry):
            raise InvalidSpecError("scripted triple does not extend the chain head")
        return entry
    spec = entry.resolve(head) if isinstance(entry, EveMove) else entry
    return apply_extension(head, spec, label)


def play_game(
    stage: AmbientStage,
    script: Sequence[ScriptEntry],
    rounds: int,
    start: GameState | None = None,
    potential_rule: str = "stage",
) -> GameState:
    """Alternate Eve's scripted moves and Adam's strategy for ``rounds`` rounds.

    Script entries past the end, or None, mean Eve repeats the head.
    """
    if rounds < 0:
        raise ValueError("rounds must be nonnegative")
    gs = start if start is not None else initial_state(stage)
    for t in range(rounds):
        entry = script[t] if t < len(script) else None
        try:
            eve = eve_triple(gs.head, entry, f"e{t}")
        except UrysohnError as exc:
            raise ScriptError(str(exc), t) from exc
        gs = adam_move(gs, eve, potential_rule, t)
    return gs


@dataclass(frozen=True)
class GameCheck:
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems


def check_game_state(gs: GameState, require_exact: bool = True) -> GameCheck:
    """Chain coherence, embedding coherence and exact commutation."""
    out: list[str] = []
    amb = gs.stage.triple
    if len(gs.chain) != len(gs.embeddings):
        out.append("chain and embeddings differ in length")
    for n, (x, f) in enumerate(zip(gs.chain, gs.embeddings)):
        if not validate_triple(x).ok:
            out.append(f"X_{n} is not a valid triple")
        if len(f) != len(x) or len(set(f)) != len(f):
            out.append(f"f_{n} is not injective on X_{n}")
            continue
        try:
            rep = discrepancy(amb, f, x)
        except UrysohnError as exc:
            out.append(f"f_{n}: {exc}")
            continue
        if require_exact and not rep.exact:
            out.append(f"f_{n} has discrepancy ({rep.max_commutation_gap}, {rep.max_potential_gap})")
        if n > 0:
            prev, fprev = gs.chain[n - 1], gs.embeddings[n - 1]
            if not is_subtriple_prefix(prev, x):
                out.append(f"X_{n} does not extend X_{n - 1}")
            if tuple(f[: len(fprev)]) != tuple(fprev):
                out.append(f"f_{n} does not extend f_{n - 1}")
    return GameCheck(tuple(out))


def covered_prefix(gs: GameState) -> int:
    """Largest k with stage points 0..k-1 all in the image of the last f."""
    image = set(gs.f)
    k = 0
    while k in image:
        k += 1
    return k
