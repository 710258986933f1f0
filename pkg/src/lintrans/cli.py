"""Command-line front end.

Exit status: 0 when the command ran to completion (a "not-permutation"
verdict included), 1 when an invariant check failed, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .analysis import cycle_structure_brute, direction_set, mob_set
from .errors import InvariantViolation
from .field import DEFAULT_BUDGET, tower_from_spec
from .maps import (
    FieldMap,
    GroundFn,
    from_json_dict,
    identity_map,
    linear_map_from_coeffs,
    poly_map,
    to_json_dict,
    trace_fn,
    trace_of_poly,
)
from .perms import FAMILIES, PermTable, build_named_family
from .translators import lambda_space
from .verify import SUITES, random_field_map, random_ground_fn, run_suites

EXPORT_KINDS = ("trace", "identity", "frobenius", "poly", "trace-poly", "random-ground", "random-map", "family")


class UsageError(Exception):
    pass


def _common_options(defaults: bool) -> argparse.ArgumentParser:
    # attached both before and after the subcommand; only the top level sets defaults
    parser = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--field", default=d(None), help="p=<int>,m=<int>,n=<int>[,g=<csv>,h=<csv>]")
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET))
    parser.add_argument("--out", default=d(None), help="write output here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default=d("json"))
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _common_options(defaults=False)
    parser = argparse.ArgumentParser(prog="lintrans", parents=[_common_options(defaults=True)], description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("field", parents=[common], help="describe the tower")

    tr = sub.add_parser("translators", parents=[common], help="linear translators of a ground function")
    tr_sub = tr.add_subparsers(dest="action", required=True)
    find = tr_sub.add_parser("find", parents=[common])
    find.add_argument("--fn", required=True, help="JSON table of a map into F_q")

    build = sub.add_parser("build", parents=[common], help="build a named permutation family")
    build.add_argument("--family", required=True, choices=FAMILIES)
    build.add_argument("--params", default="{}", help="JSON object, or @file")

    analyze = sub.add_parser("analyze", parents=[common], help="cycles, multipliers, directions")
    analyze.add_argument("what", choices=("cycles", "mob", "directions"))
    analyze.add_argument("--input", required=True, help="JSON table")

    verify = sub.add_parser("verify", parents=[common], help="run the self-check suites")
    verify.add_argument("suite", nargs="?", default="all", choices=SUITES + ("all",))
    verify.add_argument("--timings", action="store_true", help="include per-check timings")

    export = sub.add_parser("export", parents=[common], help="write a function table as JSON")
    export.add_argument("kind", choices=EXPORT_KINDS)
    export.add_argument("--terms", default="[]", help="JSON [[coeff, exponent], ...] for poly kinds")
    export.add_argument("--power", type=int, default=1, help="i for frobenius x -> x^(q^i)")
    export.add_argument("--family", choices=FAMILIES)
    export.add_argument("--params", default="{}")
    return parser


# -- helpers ------------------------------------------------------------------


def _json_arg(text):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return json.load(fh)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad JSON argument: {exc}") from None


def _load_json_file(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _tower(args, data=None):
    spec = args.field or (data or {}).get("field")
    if not spec:
        raise UsageError("--field is required")
    return tower_from_spec(spec, args.budget)


def _load_table(args, path, kind):
    data = _load_json_file(path)
    tower = _tower(args, data)
    if tower.spec != tower_from_spec(data["field"], args.budget).spec:
        raise UsageError("--field does not match the field recorded in the table file")
    return from_json_dict(data, kind, args.budget), tower


def _parse_family_params(tower, raw: dict) -> dict:
    params = {}
    for key, value in raw.items():
        if key in ("H", "H1", "H2"):
            params[key] = poly_map(tower, value)
        elif key in ("H_table", "H1_table", "H2_table"):
            params[key[:-6]] = FieldMap(tower, value, {"name": "table"})
        else:
            params[key] = value
    return params


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def _emit(args, payload, csv_rows=None):
    if args.format == "csv" and csv_rows is not None:
        text = "\n".join(",".join(str(v) for v in row) for row in csv_rows) + "\n"
    else:
        text = json.dumps(_jsonable(payload), sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table_rows(table):
    return [(i, int(v)) for i, v in enumerate(table)]


# -- commands -------------------------------------------------------------------


def cmd_field(args):
    tower = _tower(args)
    payload = {
        "field": tower.spec,
        "p": tower.p,
        "m": tower.m,
        "n": tower.n,
        "q": tower.q,
        "order": tower.order,
        "g": list(tower.g),
        "h": list(tower.h),
        "primitive": tower.primitive,
    }
    _emit(args, payload, [(k, payload[k]) for k in ("p", "m", "n", "q", "order", "primitive")])
    return 0


def cmd_translators(args):
    f, tower = _load_table(args, args.fn, "ground")
    space = lambda_space(f)
    payload = {
        "field": tower.spec,
        "basis": list(space.basis),
        "values": list(space.basis_values),
        "dimension": space.dimension,
        "members": sorted(space.values),
        "value_map": {str(k): v for k, v in sorted(space.values.items())},
    }
    _emit(args, payload, [(a, space.values[a]) for a in sorted(space.values)])
    return 0


def cmd_build(args):
    tower = _tower(args)
    raw = _json_arg(args.params)
    result = build_named_family(tower, args.family, _parse_family_params(tower, raw))
    payload = {
        "field": tower.spec,
        "family": args.family,
        "params": raw,
        "verdict": result.verdict,
        "criterion": result.provenance.get("criterion", {}),
        "table": [int(v) for v in result.table],
    }
    _emit(args, payload, _table_rows(result.table))
    return 0


def cmd_analyze(args):
    H, tower = _load_table(args, args.input, "map")
    if args.what == "cycles":
        P = PermTable(tower, H.table, {"name": "imported"}) if H.is_permutation() else None
        if P is None:
            raise UsageError("input table is not a permutation")
        dec = cycle_structure_brute(P)
        payload = {
            "field": tower.spec,
            "cycles": dec.to_lists(),
            "fixed_count": dec.fixed_count,
            "lengths": {str(k): v for k, v in sorted(dec.lengths().items())},
        }
        _emit(args, payload, dec.to_lists())
        return 0
    members = (mob_set(H) if args.what == "mob" else direction_set(H)).sorted()
    _emit(args, {"field": tower.spec, "members": members, "size": len(members)}, [(m,) for m in members])
    return 0


def cmd_verify(args):
    tower = _tower(args)
    report = run_suites(tower, args.suite, args.seed, command=f"verify {args.suite}")
    payload = report.to_dict(timings=args.timings)
    rows = [(name, verdict) for name, verdict in report.verdicts.items()]
    _emit(args, payload, rows)
    return 0 if report.status == "pass" else 1


def cmd_export(args):
    tower = _tower(args)
    rng = np.random.default_rng(args.seed)
    kind = args.kind
    if kind == "trace":
        obj = trace_fn(tower)
    elif kind == "identity":
        obj = identity_map(tower)
    elif kind == "frobenius":
        coeffs = [0] * tower.n
        coeffs[args.power % tower.n] = 1
        obj = linear_map_from_coeffs(tower, coeffs)
    elif kind == "poly":
        obj = poly_map(tower, _json_arg(args.terms))
    elif kind == "trace-poly":
        obj = trace_of_poly(tower, _json_arg(args.terms))
    elif kind == "random-ground":
        obj = random_ground_fn(tower, rng)
    elif kind == "random-map":
        obj = random_field_map(tower, rng)
    else:
        if not args.family:
            raise UsageError("export family needs --family")
        raw = _json_arg(args.params)
        result = build_named_family(tower, args.family, _parse_family_params(tower, raw))
        obj = FieldMap(tower, result.table)
        data = to_json_dict(obj, "perm" if result.verdict == "permutation" else "map")
        data["verdict"] = result.verdict
        _emit(args, data, _table_rows(obj.table))
        return 0
    data = to_json_dict(obj, "ground" if isinstance(obj, GroundFn) else "map")
    _emit(args, data, _table_rows(obj.table))
    return 0


_COMMANDS = {
    "field": cmd_field,
    "translators": cmd_translators,
    "build": cmd_build,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "export": cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status = _COMMANDS[args.command](args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return status


if __name__ == "__main__":
    sys.exit(main())
