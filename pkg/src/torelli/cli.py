"""Command-line front end.

Exit status is 0 on success, 1 for domain errors and 2 for usage errors.
Results go to stdout (JSON-lines with ``--format json``), diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys

from . import classify, group
from .errors import TorelliError
from .factored import evaluate, format_map, parse_map
from .permutations import format_cycles, parse_permutation
from .projective import OmegaPoint


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(self.prog, message)


def _flag(flag: str, fn, *args):
    try:
        return fn(*args)
    except (TorelliError, ValueError) as exc:
        raise UsageError(flag, str(exc)) from None


def _k(flag: str, value: int, low: int = 3) -> int:
    if value < low:
        raise UsageError(flag, f"must be >= {low}, got {value}")
    return value


def _index_tuple(text: str) -> tuple:
    return tuple(int(t) for t in text.replace("(", "").replace(")", "").split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, allow_abbrev=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--height", type=int, default=30, help="witness search sample height")
    common.add_argument("--ceiling", type=int, default=None)
    common.add_argument("--output", default=None, help="write results to this file")

    parser = _Parser(prog="torelli", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("theta", parents=[common], help="coordinates of theta_k(sigma)")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-sigma", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a factored map at a point")
    p.add_argument("-map", required=True)
    p.add_argument("-at", required=True)

    p = sub.add_parser("classify", parents=[common], help="validate a tuple of cross-ratio maps")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-specs", required=True, help='e.g. "1,2,3,4;1,2,3,5"')

    p = sub.add_parser("enumerate", parents=[common], help="all maps Omega_m -> Omega_n")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-n", type=int, required=True)

    p = sub.add_parser("catalog", parents=[common], help="coordinate functions of G_k")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--diff-paper", action="store_true")
    p.add_argument(
        "--per-list",
        action="store_true",
        help="with --diff-paper, compare against the list for k alone, not the union for k' <= k",
    )

    p = sub.add_parser("lift", parents=[common], help="lift sigma along a forgetful map")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-J", required=True)
    p.add_argument("-sigma", required=True)

    p = sub.add_parser("collide", parents=[common], help="collision test for two cross-ratio maps")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-c1", required=True)
    p.add_argument("-c2", required=True)
    p.add_argument("--budget", type=int, default=50)

    p = sub.add_parser("group", parents=[common], help="fixture listing of all of G_k")
    p.add_argument("-k", type=int, required=True)
    return parser


_STR_LIST = {"type": "array", "items": {"type": "string"}}

EVAL_SCHEMA = {
    "type": "object",
    "required": ["map", "at", "value"],
    "properties": {"map": {"type": "string"}, "at": {"type": "string"}, "value": {"type": "string"}},
    "additionalProperties": False,
}

CLASSIFY_SCHEMA = {
    "type": "object",
    "required": ["k", "specs", "verdict"],
    "properties": {
        "k": {"type": "integer"},
        "specs": _STR_LIST,
        "verdict": {"enum": ["ValidMap", "CollisionAt", "TooManyCoordinates"]},
        "n": {"type": "integer"},
        "i": {"type": "integer"},
        "j": {"type": "integer"},
        "count": {"type": "integer"},
        "limit": {"type": "integer"},
    },
    "additionalProperties": False,
}

LIFT_SCHEMA = {
    "type": "object",
    "required": ["sigma_hat", "verified", "method", "U"],
    "properties": {
        "sigma_hat": {"type": "string"},
        "verified": {"type": "boolean"},
        "method": {"enum": ["printed", "conjugation", "search"]},
        "U": _STR_LIST,
    },
    "additionalProperties": False,
}

COLLIDE_SCHEMA = {
    "type": "object",
    "required": ["k", "c1", "c2", "collision_free", "case"],
    "properties": {
        "k": {"type": "integer"},
        "c1": {"type": "string"},
        "c2": {"type": "string"},
        "collision_free": {"type": "boolean"},
        "case": {"enum": ["a", "b", "c", "d", None]},
        "witness": {"type": "string"},
    },
    "additionalProperties": False,
}


def _emit(out, args, text_lines, json_objs):
    if args.format == "json":
        for obj in json_objs:
            out.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        for line in text_lines:
            out.write(line + "\n")


def cmd_theta(args, out):
    k = _k("-k", args.k)
    sigma = _flag("-sigma", parse_permutation, args.sigma, k + 1)
    g = group.theta(k, sigma)
    _emit(out, args, [str(g)], [group.group_element_json(g)])


def cmd_eval(args, out):
    z = _flag("-at", OmegaPoint.parse, args.at)
    F = _flag("-map", parse_map, args.map, z.k)
    value = evaluate(F, z)
    _emit(out, args, [str(value)], [{"map": format_map(F), "at": str(z), "value": str(value)}])


def cmd_classify(args, out):
    k = _k("-k", args.k)
    specs = _flag("-specs", classify.parse_specs, args.specs, k)
    verdict = classify.validate_tuple(specs, k)
    obj = {"k": k, "specs": [str(s) for s in specs], "verdict": type(verdict).__name__}
    obj.update({key: getattr(verdict, key) for key in verdict.__dataclass_fields__})
    _emit(out, args, [str(verdict)], [obj])


def cmd_enumerate(args, out, err):
    m, n = _k("-m", args.m), _k("-n", args.n)
    count = 0
    for d in classify.iter_maps(m, n):
        count += 1
        if args.format == "json":
            out.write(json.dumps(d.to_json(), sort_keys=True) + "\n")
        else:
            out.write(f"{format_cycles(d.sigma)}\t{list(d.J)}\t{group.COORD_SEP.join(d.key())}\n")
    if args.format == "json":
        err.write(f"count {count}\n")
    else:
        out.write(f"count {count}\n")


def cmd_catalog(args, out):
    k = _k("-k", args.k)
    cat = group.coordinate_catalog(k)
    if not args.diff_paper:
        if args.format == "json":
            out.write(json.dumps(cat.to_json()) + "\n")
        else:
            out.writelines(line + "\n" for line in cat.to_json())
        return
    cumulative = not args.per_list
    diff = group.diff_against_listed(k, cumulative=cumulative)
    if args.format == "json":
        out.write(json.dumps(diff.to_json(), sort_keys=True) + "\n")
        return
    listed = len(group.listed_catalog(k, cumulative=cumulative))
    out.write(f"computed {len(cat)}, listed {listed}\n")
    for F in diff.only_computed:
        out.write(f"only computed\t{format_map(F)}\n")
    for F in diff.only_listed:
        out.write(f"only listed\t{format_map(F)}\n")
    out.write("identical\n" if diff.identical else "differs\n")


def cmd_lift(args, out):
    n, m = _k("-n", args.n), _k("-m", args.m)
    if n > m:
        raise UsageError("-n", f"must not exceed -m ({n} > {m})")
    J = _flag("-J", _index_tuple, args.J)
    _flag("-J", classify.ForgetfulSpec, m, n, J)
    sigma = _flag("-sigma", parse_permutation, args.sigma, n + 1)
    lift = classify.lift_permutation_detailed(sigma, m, J)
    U = group.theta(m, lift.sigma_hat)
    verdict = "verified" if lift.verified else "failed"
    _emit(
        out,
        args,
        [f"{format_cycles(lift.sigma_hat)}\t{verdict} ({lift.method})\t{U}"],
        [
            {
                "sigma_hat": format_cycles(lift.sigma_hat),
                "verified": lift.verified,
                "method": lift.method,
                "U": [format_map(c) for c in U.coords],
            }
        ],
    )


def cmd_collide(args, out):
    k = _k("-k", args.k)
    c1 = _flag("-c1", classify.CrossRatioSpec.parse, args.c1, k)
    c2 = _flag("-c2", classify.CrossRatioSpec.parse, args.c2, k)
    case = classify.collision_case(c1, c2)
    obj = {"k": k, "c1": str(c1), "c2": str(c2), "collision_free": case is not None, "case": case}
    if case is not None:
        _emit(out, args, [f"collision-free (case {case})"], [obj])
        return
    witness = classify.collision_witness(
        c1, c2, budget=args.budget, seed=args.seed, height=args.height
    )
    obj["witness"] = str(witness)
    _emit(out, args, [f"collides at z = {witness}"], [obj])


def cmd_group(args, out):
    k = _k("-k", args.k)
    if args.format == "json":
        for _, g in group.theta_image(k):
            out.write(json.dumps(group.group_element_json(g), sort_keys=True) + "\n")
    else:
        out.write(group.group_fixture(k))


@contextlib.contextmanager
def _ceiling(value):
    if value is None:
        yield
        return
    old = os.environ.get("TORELLI_CEILING")
    os.environ["TORELLI_CEILING"] = str(value)
    try:
        yield
    finally:
        if old is None:
            del os.environ["TORELLI_CEILING"]
        else:
            os.environ["TORELLI_CEILING"] = old


# Flags whose values may legitimately start with "-" (e.g. "-1*(z2-1)").
_VALUE_FLAGS = {"-map", "-at", "-sigma", "-specs", "-J", "-c1", "-c2"}


def _glue_values(argv: list) -> list:
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    sink = open(args.output, "w") if args.output else out
    try:
        with _ceiling(args.ceiling):
            if args.command == "enumerate":
                cmd_enumerate(args, sink, err)
            else:
                globals()[f"cmd_{args.command}"](args, sink)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except TorelliError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    finally:
        if sink is not out:
            sink.close()
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
