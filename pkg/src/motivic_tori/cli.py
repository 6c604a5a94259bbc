"""Command-line entry point.

``motivic-tori check <scenario>`` runs scenario pipelines and exits 0 (all
assertions pass), 1 (a failure, or a discrepancy under ``--strict``) or 2
(bad input, nothing is run).  ``motivic-tori compute <kind>`` prints one
canonical value.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import biquadratic as bq
from .errors import MotivicError
from .groups import GSet, burnside_mul, marks
from .lattice import GaloisLattice
from .ring import (
    context_from_json, dumps, format_element, format_poly, gset_from_json,
)
from .scenarios import TORSION_CASES, SCENARIOS, default_context, run
from .tori import (
    format_value, norm_one_quadratic_class, quasi_split_result, torus_class, TorusPresentation,
    weil_restriction_p1_class,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
COMPUTE_KINDS = ("qs-class", "p1-class", "marks", "burnside-mul", "torus-class")


class InputError(Exception):
    """Bad command-line input; reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser():
    p = _Parser(prog="motivic-tori", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(q):
        q.add_argument("--context", help="context JSON file (default: built-in C2 x C2)")
        q.add_argument("--json", action="store_true", help="emit JSON")
        q.add_argument("--out", help="write the report to this file")
        q.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    c = sub.add_parser("check", help="run a scenario")
    c.add_argument("scenario", choices=SCENARIOS + ("all",))
    c.add_argument("--m", type=int, default=1, help="torsion order is n = 2m (thm16)")
    c.add_argument("--r", type=int, default=2, help="number of Gm factors (thm15)")
    c.add_argument("--n", type=int, action="append", help="restrict the torsion scenario to these n")
    c.add_argument("--algebra", action="append", choices=("E1", "E2", "E12", "K", "E", "split"),
                   help="restrict the torsion scenario to these algebras")
    c.add_argument("--strict", action="store_true", help="treat discrepancies as failures")
    common(c)

    k = sub.add_parser("compute", help="compute one value")
    k.add_argument("kind", choices=COMPUTE_KINDS)
    k.add_argument("--gset", help="regular, trivial[:n], coset:<field>, index, pairs, "
                                  "sums joined by '+', or a JSON fragment")
    k.add_argument("--elem", action="append", help="Burnside element, e.g. \"2+[K]-[E1]\"")
    k.add_argument("--torus", help="qs:<gset>, norm-one:<field>, or one of T, G, G'")
    k.add_argument("--lattice", help="JSON file {\"action\": [matrix per generator]}")
    common(k)
    return p


# -- input ---------------------------------------------------------------------

def load_json_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON ({exc.msg})") from None


def load_context(path):
    if path is None:
        return default_context()
    data = load_json_file(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    try:
        return context_from_json(data)
    except MotivicError as exc:
        raise InputError(f"{path}: {exc}") from None


def parse_gset(ctx, spec):
    """Parse a G-set description (see ``--gset``)."""
    if spec is None:
        raise InputError("--gset is required")
    spec = spec.strip()
    if spec.startswith("{"):
        try:
            data = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise InputError(f"--gset:{exc.lineno}:{exc.colno}: malformed JSON ({exc.msg})") from None
        return gset_from_json(ctx, data.get("gset", data))
    out = None
    for part in spec.split("+"):
        s = _gset_piece(ctx, part.strip())
        out = s if out is None else out + s
    return out


def _gset_piece(ctx, part):
    g = ctx.group
    if part == "regular":
        return GSet.regular(g)
    if part == "trivial":
        return GSet.trivial(g, 1)
    if part.startswith("trivial:"):
        return GSet.trivial(g, int(part.split(":", 1)[1]))
    if part.startswith("coset:"):
        return GSet.transitive(g, ctx.label_of(part.split(":", 1)[1]))
    if part in ("index", "pairs"):
        if g != bq.klein_group():
            raise InputError(f"{part!r} needs the built-in C2 x C2 group")
        return bq.index_set() if part == "index" else bq.pair_set()
    raise InputError(f"unknown G-set piece {part!r}")


def _torus(ctx, args):
    if args.lattice:
        data = load_json_file(args.lattice)
        try:
            lat = GaloisLattice(ctx.group, data["action"], data.get("name", "X"))
        except (KeyError, TypeError) as exc:
            raise InputError(f"{args.lattice}: 'action' missing or malformed ({exc})") from None
        return torus_class(TorusPresentation("lattice", name=lat.name, lattice=lat, group=ctx.group))
    spec = args.torus
    if spec is None:
        raise InputError("torus-class needs --torus or --lattice")
    if spec.startswith("qs:"):
        return quasi_split_result(parse_gset(ctx, spec[3:]), "R")
    if spec.startswith("norm-one:"):
        return norm_one_quadratic_class(ctx.group, ctx.label_of(spec.split(":", 1)[1]))
    if spec in ("T", "G", "G'"):
        from .scenarios import KleinClasses
        k = KleinClasses(ctx)
        return {"T": k.T, "G": k.G, "G'": k.Gprime_torsor}[spec]()
    raise InputError(f"unknown torus {spec!r}")


# -- commands ------------------------------------------------------------------

def cmd_compute(args):
    ctx = load_context(args.context)
    kind = args.kind
    if kind == "qs-class":
        value = format_poly(quasi_split_result(parse_gset(ctx, args.gset), "R").value, ctx)
    elif kind == "p1-class":
        value = format_poly(weil_restriction_p1_class(parse_gset(ctx, args.gset)), ctx)
    elif kind == "marks":
        elems = args.elem or []
        if len(elems) != 1:
            raise InputError("marks needs exactly one --elem")
        value = "(" + ",".join(str(x) for x in marks(ctx.parse_element(elems[0]))) + ")"
    elif kind == "burnside-mul":
        elems = args.elem or []
        if len(elems) != 2:
            raise InputError("burnside-mul needs two --elem arguments")
        a, b = (ctx.parse_element(e) for e in elems)
        value = format_element(burnside_mul(a, b), ctx)
    else:
        res = _torus(ctx, args)
        value = format_value(res.value, ctx)
        if args.json:
            _emit(args, dumps({"kind": kind, "value": value, "stably_rational": res.stably_rational}))
        else:
            _emit(args, f"{value}\nstably rational: {res.stably_rational}")
        return EXIT_OK
    _emit(args, dumps({"kind": kind, "value": value}) if args.json else value)
    return EXIT_OK


def cmd_check(args):
    ctx = load_context(args.context)
    if args.m < 1:
        raise InputError("--m must be a positive integer")
    if args.r < 0:
        raise InputError("--r must be a natural number")
    if any(n < 1 for n in args.n or ()):
        raise InputError("--n must be a positive integer")
    cases = TORSION_CASES
    if args.algebra or args.n:
        cases = [(a, n) for a in (args.algebra or ("E1", "E", "split"))
                 for n in (args.n or (2, 3, 4))]
    if ctx.group != bq.klein_group():
        raise InputError("scenarios need the C2 x C2 group with generators (12) and (34)")
    names = SCENARIOS if args.scenario == "all" else (args.scenario,)
    reports = []
    for name in names:
        reports.extend(run(name, ctx, m=args.m, r=args.r, torsion_cases=cases))
    for rep in reports:
        rep.parameters["seed"] = args.seed
    code = EXIT_OK if all(r.ok(args.strict) for r in reports) else EXIT_FAIL
    if args.json:
        text = dumps({"exit_code": code, "reports": [r.to_json() for r in reports]})
    else:
        text = "\n\n".join(r.render_text() for r in reports)
        text += "\n\nresult: " + ("ok" if code == EXIT_OK else "FAILED")
    _emit(args, text)
    return code


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.command == "check":
            return cmd_check(args)
        return cmd_compute(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MotivicError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
