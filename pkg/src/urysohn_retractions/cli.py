"""Command-line front end over JSON files.

Exit status: 0 when the command succeeds or the checked property holds, 1 when
it was checked and is false, 2 when it could not be checked. A JSON result is
always written, to ``--out`` or to standard output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from . import serialization as ser
from .amalgam import (
    SharedPart,
    amalgamate_max,
    amalgamate_min,
    commuting_completion,
    extend_retraction_over_point,
    glue_epsilon_copy,
    regularize,
)
from .errors import UrysohnError
from .fraisse.aprox import StepInput, aprox_step, exact_input
from .fraisse.game import EveMove, check_game_state, play_game
from .fraisse.stage import AmbientStage, build_stage
from .fraisse.urstar import SearchBudget, check_ur_star
from .metric import Embedding, FiniteMetricSpace, validate_metric
from .rationalize import nearby_rational_embedding_report, rationalize_triple
from .scalar import Scalar
from .topology import (
    RetractionOnStage,
    SetParams,
    conjugate,
    in_neighborhood_p,
    in_neighborhood_pr,
    in_neighborhood_u,
    set_gap,
    set_membership,
)
from .triple import Triple, validate_triple

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2
ENV_MAX_POINTS = "URYSOHN_MAX_POINTS"
ENV_MAX_DENOM = "URYSOHN_MAX_DENOM"
ENV_MAX_SECONDS = "URYSOHN_MAX_SECONDS"


class UsageError(Exception):
    pass


def _load(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        return json.loads(text)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _scalar_arg(text: str) -> Scalar:
    try:
        return ser.scalar_from_json(text)
    except UrysohnError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _index_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    if text.startswith("["):
        return [int(v) for v in json.loads(text)]
    return [int(v) for v in text.split(",")]


def _pairs(text: str | None) -> dict[int, int] | None:
    if text is None:
        return None
    data = json.loads(text)
    if isinstance(data, dict):
        return {int(k): int(v) for k, v in data.items()}
    return {int(a): int(b) for a, b in data}


def _by_label(left: FiniteMetricSpace, right: FiniteMetricSpace) -> dict[int, int]:
    return {left.index(p): right.index(p) for p in left.points if p in right.points}


def _space_or_triple(obj: Any):
    return ser.triple_from_json(obj) if ser.is_triple_json(obj) else ser.space_from_json(obj)


def _retraction(obj: Any) -> RetractionOnStage:
    if "retraction" not in obj:
        raise ser.SchemaError("a retraction needs points, dist and retraction")
    return RetractionOnStage(ser.space_from_json(obj), obj["retraction"])


def _retraction_json(u: RetractionOnStage) -> dict:
    return ser.triple_to_json(u.to_triple())


def _check_denom(denom: int) -> None:
    ceiling = os.environ.get(ENV_MAX_DENOM)
    if ceiling and denom > int(ceiling):
        raise UsageError(f"denominator bound {denom} exceeds {ENV_MAX_DENOM}={ceiling}")


# -- verbs ------------------------------------------------------------------------------------


def cmd_validate(args) -> tuple[int, Any]:
    obj = _load(args.input)
    if ser.is_triple_json(obj):
        rep = validate_triple(ser.triple_from_json(obj), realizable=not args.no_realizable)
        kind = "triple"
    else:
        rep = validate_metric(ser.space_from_json(obj))
        kind = "metric"
    out = {"kind": kind, **ser.report_to_json(rep)}
    return (EXIT_TRUE if rep.ok else EXIT_FALSE), out


def cmd_amalgamate(args) -> tuple[int, Any]:
    left, right = _space_or_triple(_load(args.left)), _space_or_triple(_load(args.right))
    ls = left.space if isinstance(left, Triple) else left
    rs = right.space if isinstance(right, Triple) else right
    shared = _pairs(args.shared) or _by_label(ls, rs)
    if args.mode == "max":
        res = amalgamate_max(SharedPart(left, right, shared))
        body = ser.triple_to_json(res) if isinstance(res, Triple) else ser.space_to_json(res)
    else:
        res = amalgamate_min(ls, rs, shared)
        body = ser.space_to_json(res)
    return EXIT_TRUE, {"result": body}


def cmd_regularize(args) -> tuple[int, Any]:
    obj = _load(args.input)
    ser._require(obj, "points", "dist", "retraction", "potential")
    dist = [[ser.scalar_from_json(v) for v in row] for row in obj["dist"]]
    reg = regularize(obj["points"], dist, obj["retraction"], [ser.scalar_from_json(v) for v in obj["potential"]])
    t = Triple(reg.space, obj["retraction"], [ser.scalar_from_json(v) for v in obj["potential"]])
    return EXIT_TRUE, {"result": ser.triple_to_json(t), "rounds": reg.rounds}


def cmd_rationalize(args) -> tuple[int, Any]:
    t = ser.triple_from_json(_load(args.input))
    out, trace = rationalize_triple(t, args.eps, _index_list(args.frozen or ""))
    return EXIT_TRUE, {"result": ser.triple_to_json(out), "trace": ser.trace_to_json(trace)}


def cmd_embed(args) -> tuple[int, Any]:
    stage = ser.stage_from_json(_load(args.stage))
    mapping = _index_list(args.map)
    src = stage.triple.space.subspace(mapping)
    target = _space_or_triple(_load(args.target))
    i = Embedding(src, stage.triple.space, mapping)
    res = nearby_rational_embedding_report(stage, i, target, args.eps)
    return EXIT_TRUE, {
        "stage": ser.stage_to_json(res.stage),
        "embedding": ser.embedding_to_json(res.embedding),
        "displacement": [ser.scalar_to_json(v) for v in res.displacement],
    }


def cmd_complete(args) -> tuple[int, Any]:
    amb = ser.stage_from_json(_load(args.stage)).triple
    small = ser.triple_from_json(_load(args.small))
    x, emb = commuting_completion(amb, small, _index_list(args.map), args.eps)
    return EXIT_TRUE, {"result": ser.triple_to_json(x), "embedding": ser.embedding_to_json(emb)}


def cmd_extend(args) -> tuple[int, Any]:
    c = ser.triple_from_json(_load(args.c))
    b = ser.triple_from_json(_load(args.b))
    shared = _pairs(args.shared) or _by_label(b.space, c.space)
    res = extend_retraction_over_point(c, b, shared, args.eps)
    return EXIT_TRUE, {
        "result": ser.triple_to_json(res.triple),
        "b_index": res.b_index,
        "max_deviation": ser.scalar_to_json(res.max_deviation),
        "retraction_gap": ser.scalar_to_json(res.retraction_gap),
        "potential_gap": ser.scalar_to_json(res.potential_gap),
        "rounds": res.rounds,
    }


def cmd_glue(args) -> tuple[int, Any]:
    chain = ser.triple_from_json(_load(args.chain))
    fresh = ser.triple_from_json(_load(args.fresh))
    copy = _index_list(args.copy) if args.copy else list(range(len(fresh)))
    out = glue_epsilon_copy(chain, copy, fresh, args.eps)
    return EXIT_TRUE, {"result": ser.triple_to_json(out)}


def cmd_stage_build(args) -> tuple[int, Any]:
    _check_denom(args.denom)
    stage = ser.stage_from_json(_load(args.stage)) if args.stage else AmbientStage.initial()
    ceiling = os.environ.get(ENV_MAX_POINTS)
    max_points = args.max_points if args.max_points is not None else (int(ceiling) if ceiling else None)
    seconds = os.environ.get(ENV_MAX_SECONDS)
    budget = args.max_seconds if args.max_seconds is not None else (float(seconds) if seconds else None)
    out = build_stage(stage, args.denom, args.diam, args.sub, max_points=max_points, time_budget=budget)
    return EXIT_TRUE, {"stage": ser.stage_to_json(out), "size": len(out)}


def cmd_ur_star(args) -> tuple[int, Any]:
    stage = ser.stage_from_json(_load(args.stage))
    case = _load(args.case)
    ser._require(case, "a", "i", "b")
    budget = SearchBudget(args.budget, args.denom)
    v = check_ur_star(
        stage, args.eps, ser.triple_from_json(case["a"]), ser.mapping_from_json(case["i"]),
        ser.triple_from_json(case["b"]), budget,
    )

    def opt(s):
        return None if s is None else ser.scalar_to_json(s)

    out = {
        "success": v.success,
        "status": v.status,
        "embedding": None if v.embedding is None else ser.embedding_to_json(v.embedding),
        "displacement": opt(v.displacement),
        "commutation": opt(v.commutation),
        "potential": opt(v.potential),
        "thresholds": [ser.scalar_to_json(s) for s in v.thresholds(args.eps)],
        "budget_used": v.budget_used,
        "stage": ser.stage_to_json(v.stage),
    }
    return (EXIT_TRUE if v.success else EXIT_FALSE), out


def _step_input(case: dict, eps: Scalar) -> StepInput:
    a = ser.triple_from_json(case["a"])
    b = ser.triple_from_json(case["b"])
    if "b_n" not in case:
        return exact_input(a, b, eps)
    ser._require(case, "stage", "i", "j_n")
    b_n = ser.triple_from_json(case["b_n"])
    m = len(b)
    if "chain" in case:
        chain = ser.triple_from_json(case["chain"])
        copy = tuple(case.get("chain_copy", range(m)))
    else:
        chain = glue_epsilon_copy(b, range(m), b_n, eps / 2)
        copy = tuple(range(m))
    return StepInput(
        stage=ser.stage_from_json(case["stage"]),
        a=a,
        i=tuple(ser.mapping_from_json(case["i"])),
        b=b,
        b_n=b_n,
        j_n=tuple(ser.mapping_from_json(case["j_n"])),
        eps_n=eps,
        chain=chain,
        chain_copy=copy,
    )


def cmd_aprox_step(args) -> tuple[int, Any]:
    case = _load(args.case)
    ser._require(case, "a", "b")
    rep = aprox_step(_step_input(case, args.eps), SearchBudget(args.budget, args.denom))
    s = ser.scalar_to_json
    nh = rep.next_hypotheses
    out = {
        "eps_n": s(rep.eps_n),
        "eps_next": s(rep.eps_next),
        "completion_size": rep.completion_size,
        "f_displacement": s(rep.f_displacement),
        "g_prime_b_bn": s(rep.g_prime_b_bn),
        "g_prime_bound": s(rep.eps_n * Fraction(25, 2)),
        "rho_b_bn": s(rep.rho_b_bn),
        "rho_bound": s(rep.eps_n * Fraction(35, 2)),
        "claim_g_prime": rep.claim_g_prime,
        "claim_rho": rep.claim_rho,
        "quotient_size": rep.quotient_size,
        "merged_b": rep.merged_b,
        "h_displacement": s(rep.h_displacement),
        "matched_distance": s(rep.matched_distance),
        "b_next": ser.triple_to_json(rep.next_input.b_n),
        "j_next": list(rep.next_input.j_n),
        "chain": ser.triple_to_json(rep.next_input.chain),
        "next_hypotheses": {
            "distance_gap": s(nh.distance_gap),
            "potential_gap": s(nh.potential_gap),
            "pattern_ok": nh.pattern_ok,
            "displacement": s(nh.displacement),
            "commutation": s(nh.commutation),
            "potential": s(nh.potential),
            "holds": nh.holds(rep.eps_next),
        },
    }
    ok = rep.claim_g_prime and rep.claim_rho
    return (EXIT_TRUE if ok else EXIT_FALSE), out


def _eve_move(obj: Any):
    if obj is None:
        return None
    ser._require(obj, "f", "mode")
    f = obj["f"]
    values = {int(k): ser.scalar_from_json(v) for k, v in f.items()} if isinstance(f, dict) else [
        ser.scalar_from_json(v) for v in f
    ]
    return EveMove(values, ser.mode_from_json(obj["mode"]), ser.scalar_from_json(obj.get("potential", "0")))


def cmd_game_play(args) -> tuple[int, Any]:
    stage = ser.stage_from_json(_load(args.stage)) if args.stage else AmbientStage.initial()
    script_obj = _load(args.script) if args.script else []
    if not isinstance(script_obj, list):
        raise ser.SchemaError("a script is a list of Eve moves (or null)")
    script = [_eve_move(e) for e in script_obj]
    gs = play_game(stage, script, args.rounds, potential_rule=args.potential_rule)
    check = check_game_state(gs, require_exact=args.potential_rule == "stage")
    out = {"game": ser.game_to_json(gs), "ok": check.ok, "problems": list(check.problems)}
    return (EXIT_TRUE if check.ok else EXIT_FALSE), out


def cmd_conjugate(args) -> tuple[int, Any]:
    u = _retraction(_load(args.input))
    s = conjugate(_index_list(args.iso), u)
    return EXIT_TRUE, {"result": _retraction_json(s)}


def cmd_neighborhood(args) -> tuple[int, Any]:
    u = _retraction(_load(args.u))
    r = _retraction(_load(args.r))
    pts = _index_list(args.points) if args.points is not None else list(range(len(u)))
    if args.topology == "p":
        val = in_neighborhood_p(u, r, pts, args.eps)
    elif args.topology == "pr":
        val = in_neighborhood_pr(u, r, pts, args.eps)
    else:
        val = in_neighborhood_u(u, r, args.eps)
    return (EXIT_TRUE if val else EXIT_FALSE), {"member": val, "topology": args.topology}


def cmd_set_member(args) -> tuple[int, Any]:
    u = _retraction(_load(args.u))
    params = _load(args.params)
    ser._require(params, "mapping", "small", "x")
    small = params["small"]
    ser._require(small, "retraction", "potential")
    sp = SetParams(
        tuple(ser.mapping_from_json(params["mapping"])),
        tuple(small["retraction"]),
        tuple(ser.scalar_from_json(v) for v in small["potential"]),
        int(params["x"]),
        args.n,
    )
    val = set_membership(u, sp, args.which)
    out = {"member": val, "which": args.which, "gap": ser.scalar_to_json(set_gap(u, sp, args.which))}
    return (EXIT_TRUE if val else EXIT_FALSE), out


def cmd_schema(args) -> tuple[int, Any]:
    return EXIT_TRUE, ser.SCHEMAS


# -- parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urysohn-retractions",
        description="Finite-stage tools for 1-Lipschitz retractions of Urysohn-type spaces.",
    )
    parser.add_argument("--schema", action="store_true", help="print the JSON schemas and exit")
    parser.add_argument("--out", help="write the result JSON here instead of standard output")
    sub = parser.add_subparsers(dest="verb")

    def verb(name: str, fn: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        p.add_argument("--out", default=argparse.SUPPRESS, help="result file")
        return p

    p = verb("validate", cmd_validate, "report metric or triple violations")
    p.add_argument("input")
    p.add_argument("--no-realizable", action="store_true", help="skip the d(x, r x) <= 2 p(x) check")

    p = verb("amalgamate", cmd_amalgamate, "maximal or minimal amalgamation")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--mode", choices=["max", "min"], default="max")
    p.add_argument("--shared", help="JSON pairs [[left, right], ...]; default: equal labels")

    p = verb("regularize", cmd_regularize, "max-regularize a metric for r and p")
    p.add_argument("input")

    p = verb("rationalize", cmd_rationalize, "rationalize a triple over Q(sqrt 2)")
    p.add_argument("input")
    p.add_argument("--eps", type=_scalar_arg, required=True)
    p.add_argument("--frozen", help="comma-separated indices whose block stays fixed")

    p = verb("embed", cmd_embed, "nearby rational embedding into a stage")
    p.add_argument("stage")
    p.add_argument("target")
    p.add_argument("--map", required=True, help="stage indices of the embedded points")
    p.add_argument("--eps", type=_scalar_arg, required=True)

    p = verb("complete", cmd_complete, "commuting completion of an approximately commuting embedding")
    p.add_argument("stage")
    p.add_argument("small")
    p.add_argument("--map", required=True)
    p.add_argument("--eps", type=_scalar_arg, required=True)

    p = verb("extend", cmd_extend, "extend a retraction over one new point")
    p.add_argument("c")
    p.add_argument("b")
    p.add_argument("--shared", help="JSON pairs [[b-index, c-index], ...]; default: equal labels")
    p.add_argument("--eps", type=_scalar_arg, required=True)

    p = verb("glue", cmd_glue, "glue a copy with matched pairs at distance eps")
    p.add_argument("chain")
    p.add_argument("fresh")
    p.add_argument("--copy", help="chain indices matched with the fresh points")
    p.add_argument("--eps", type=_scalar_arg, required=True)

    p = verb("stage-build", cmd_stage_build, "realize every bounded one-point extension")
    p.add_argument("stage", nargs="?")
    p.add_argument("--denom", type=int, required=True)
    p.add_argument("--diam", type=_scalar_arg, required=True)
    p.add_argument("--sub", type=int, required=True)
    p.add_argument("--max-points", type=int)
    p.add_argument("--max-seconds", type=float)

    p = verb("ur-star-check", cmd_ur_star, "bounded search for an approximate extension")
    p.add_argument("stage")
    p.add_argument("case", help='JSON {"a": triple, "i": mapping, "b": triple}')
    p.add_argument("--eps", type=_scalar_arg, required=True)
    p.add_argument("--budget", type=int, default=SearchBudget.max_candidates)
    p.add_argument("--denom", type=int, default=SearchBudget.denom_bound)

    p = verb("aprox-step", cmd_aprox_step, "one inductive step with measured bounds")
    p.add_argument("case", help='JSON {"a", "b"} or a full step input')
    p.add_argument("--eps", type=_scalar_arg, required=True, help="eps_n of this step")
    p.add_argument("--budget", type=int, default=SearchBudget.max_candidates)
    p.add_argument("--denom", type=int, default=SearchBudget.denom_bound)

    p = verb("game-play", cmd_game_play, "play Eve's script against Adam's strategy")
    p.add_argument("stage", nargs="?")
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--script", help="JSON list of Eve moves")
    p.add_argument("--potential-rule", choices=["stage", "retract-distance"], default="stage")

    p = verb("conjugate", cmd_conjugate, "conjugate a retraction by a stage isometry")
    p.add_argument("input")
    p.add_argument("--iso", required=True, help="the bijection as a list of indices")

    p = verb("neighborhood", cmd_neighborhood, "basic-neighborhood membership")
    p.add_argument("u")
    p.add_argument("r")
    p.add_argument("--topology", choices=["p", "pr", "u"], required=True)
    p.add_argument("--eps", type=_scalar_arg, required=True)
    p.add_argument("--points", help="comma-separated indices; default: every point")

    p = verb("set-member", cmd_set_member, "membership in the sets B, C, E, F")
    p.add_argument("u")
    p.add_argument("params", help='JSON {"mapping", "small": {"retraction", "potential"}, "x"}')
    p.add_argument("--which", choices=["B", "C", "E", "F"], required=True)
    p.add_argument("--n", type=int, required=True)

    verb("schema", cmd_schema, "print the JSON schemas")
    return parser


def _emit(payload: Any, out_path: str | None) -> None:
    text = ser.dumps(payload)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_ERROR
        if code != 0:
            _emit({"error": {"type": "UsageError", "message": "could not parse arguments"}}, None)
            return EXIT_ERROR
        return EXIT_TRUE
    out_path = getattr(args, "out", None)
    if args.schema:
        _emit(ser.SCHEMAS, out_path)
        return EXIT_TRUE
    if args.verb is None:
        parser.print_usage(sys.stderr)
        _emit({"error": {"type": "UsageError", "message": "no command given"}}, out_path)
        return EXIT_ERROR
    try:
        code, payload = args.func(args)
    except (UrysohnError, UsageError, ValueError, KeyError, TypeError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}}, out_path)
        return EXIT_ERROR
    _emit(payload, out_path)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
