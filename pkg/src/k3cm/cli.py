"""Command line interface: ``k3cm <subcommand>`` or ``python -m k3cm``.

Exit status is 0 when every requested verdict is proved/verified, 1 when a
verdict is inconclusive or failed, 2 on usage errors and 3 on bad input.
"""

import argparse
import json
import sys
import time
from dataclasses import replace

from . import pipeline
from .counting import (BadPrimeError, BudgetExceeded, count_curve, count_surface, load_curve,
                       load_surface, surface_bad_primes)
from .hecke import CASE_TYPES, enumerate_hecke, slot_assignments
from .numfield.field import CorruptedFieldData

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


def _global_flags(parser, suppress):
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    parser.add_argument("--prime-bound", type=int, help="largest prime compared (default: per-case plans)", **kw)
    parser.add_argument("--precision", type=int, help="decimal digits for complex values (default 120)", **kw)
    parser.add_argument("--budget", type=int, help="largest N(P)^e per residue-ring component", **kw)
    parser.add_argument("--data", help="alternative field data file (YAML)", **kw)


def build_parser():
    parser = argparse.ArgumentParser(prog="k3cm", description=__doc__.splitlines()[0], allow_abbrev=False)
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bad-primes", parents=[common], allow_abbrev=False, help="bad primes of X_i and C_i")
    p.add_argument("i", type=int)

    for name, what in (("count-surface", "X_i"), ("count-curve", "C_i")):
        p = sub.add_parser(name, parents=[common], allow_abbrev=False, help=f"point count of {what} over F_(p^m)")
        p.add_argument("i", type=int)
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--m", type=int, default=1)

    p = sub.add_parser("enumerate", parents=[common], allow_abbrev=False, help="candidate Hecke characters before elimination")
    p.add_argument("--case", choices=sorted(CASE_TYPES), required=True)
    p.add_argument("i", type=int)
    p.add_argument("--bad-primes", help="comma-separated override, empty for none")
    p.add_argument("--list", action="store_true", help="list Galois orbits when few enough")

    p = sub.add_parser("match", parents=[common], allow_abbrev=False, help="eliminate candidates against point counts")
    p.add_argument("kind", choices=["surface", "curve"])
    p.add_argument("i", type=int)
    p.add_argument("--json", action="store_true", help="print the structured record")

    for name, text in (("verify-c", "exterior-square decomposition and psi'"),
                       ("verify-sigma", "psi_X = psi_A o sigma1 * psi_A o sigma2 on degree-1 primes")):
        p = sub.add_parser(name, parents=[common], allow_abbrev=False, help=text)
        p.add_argument("i", type=int)
        p.add_argument("--json", action="store_true", help="print the structured record")

    p = sub.add_parser("report", parents=[common], allow_abbrev=False, help="all matches and the summary tables")
    p.add_argument("--out", help="JSON path; the tables go to the same name with .txt")
    p.add_argument("--case", type=int, action="append", help="restrict to these cases (repeatable)")
    p.add_argument("--only", choices=["surface", "curve"], help="restrict the scope")
    return parser


def make_config(args):
    cfg = pipeline.Config()
    if getattr(args, "precision", None):
        cfg = replace(cfg, precision=args.precision)
    if getattr(args, "budget", None):
        cfg = replace(cfg, budget=args.budget)
    if getattr(args, "data", None):
        cfg = replace(cfg, field_data=args.data)
    if getattr(args, "prime_bound", None):
        cfg = cfg.with_prime_bound(args.prime_bound)
    return cfg


def _fmt_traces(d):
    return " ".join(f"t{m}={t}" for m, t in sorted(d.items())) or "-"


def print_match(rep, out):
    print(f"{rep.target} case {rep.case}: {rep.verdict}", file=out)
    print(f"  field K_{rep.field_id}, infinity type {_label(rep.infinity_type)}, "
          f"bad primes {' '.join(map(str, rep.bad_primes))}", file=out)
    print(f"  modulus norm {rep.modulus_norm}, candidates {rep.initial_count} -> {rep.final_count}", file=out)
    if rep.character is not None:
        print(f"  surviving orbit of size {len(rep.orbits[0])}, conductor norm {rep.conductor_norm}", file=out)
    if rep.euler_factor is not None:
        print(f"  L_{rep.table_prime}(T) = {pipeline.format_poly(rep.euler_factor.coeffs)}", file=out)
    for note in rep.notes:
        print(f"  note: {note}", file=out)
    for r in rep.log:
        print(f"  p={r.p:<4} {_fmt_traces(r.counted):<40} survivors {r.survivors:<9} {r.verdict}", file=out)
    if rep.decomposition:
        bad = [d.p for d in rep.decomposition if not d.exact]
        print(f"  exterior square = algebraic (3) * slot (6) * psi' (6) at {len(rep.decomposition)} primes"
              + (f"; fails at {bad}" if bad else ""), file=out)
    if rep.slot is not None:
        print("  psi_X slot:", file=out)
        print_match(rep.slot, out)


def _label(pairs):
    return "{" + ",".join(f"({a},{b})" for a, b in pairs) + "}"


def cmd_bad_primes(args, cfg, out):
    i = args.i
    if i in pipeline.SURFACE_CASES:
        print(f"X_{i}: {' '.join(map(str, sorted(surface_bad_primes(load_surface(i)))))}", file=out)
    else:
        print(f"X_{i}: no surface known", file=out)
    print(f"C_{i}: {' '.join(map(str, sorted(load_curve(i).bad_primes)))}", file=out)
    return EXIT_OK


def cmd_count_surface(args, cfg, out):
    c = count_surface(load_surface(args.i), args.p, args.m)
    q = args.p ** args.m
    print(f"X_{args.i} over F_{q}: N = {c.N}, S = {c.S}, rational nodes = {c.nodes}", file=out)
    return EXIT_OK


def cmd_count_curve(args, cfg, out):
    C = load_curve(args.i)
    N = count_curve(C, args.p, args.m)
    q = args.p ** args.m
    print(f"C_{args.i} over F_{q}: N = {N}, t = {q + 1 - N}", file=out)
    return EXIT_OK


def cmd_enumerate(args, cfg, out):
    i = args.i
    K = cfg.field(i)
    if args.bad_primes is not None:
        bad = {int(x) for x in args.bad_primes.split(",") if x.strip()}
    elif args.case == "X" and i in pipeline.SURFACE_CASES:
        bad = surface_bad_primes(load_surface(i))
    else:
        bad = load_curve(i).bad_primes
    multiset = CASE_TYPES[args.case]
    cs = enumerate_hecke(K, multiset, bad, budget=cfg.budget)
    print(f"K_{i}, infinity type {_label(multiset)} ({len(slot_assignments(multiset))} slot assignments)", file=out)
    print(f"bad primes: {' '.join(map(str, sorted(bad))) or 'none'}", file=out)
    print(f"maximal modulus: {cs.modulus.label()} (norm {cs.modulus.norm})", file=out)
    print(f"unit group invariants: {list(cs.G.invariants)}", file=out)
    print(f"unit-compatible candidates: {cs.initial_count}", file=out)
    if args.list:
        for orbit in cs.orbits(cfg.orbit_limit):
            psi = orbit[0]
            print(f"  orbit of size {len(orbit)}: {psi.itype.label()} conductor norm {psi.conductor().norm}",
                  file=out)
    return EXIT_OK


def _verdict_exit(verdict):
    return EXIT_OK if verdict in (pipeline.PROVED, pipeline.VERIFIED) else EXIT_VERDICT


def cmd_match(args, cfg, out):
    rep = (pipeline.match_surface if args.kind == "surface" else pipeline.match_curve)(args.i, cfg)
    if args.json:
        print(json.dumps(rep.to_record(), indent=2, sort_keys=True), file=out)
    else:
        print_match(rep, out)
    return _verdict_exit(rep.verdict)


def cmd_verify_c(args, cfg, out):
    rep = pipeline.verify_part_c(args.i, cfg)
    if args.json:
        print(json.dumps(rep.to_record(), indent=2, sort_keys=True), file=out)
    else:
        print_match(rep, out)
    return _verdict_exit(rep.verdict)


def cmd_verify_sigma(args, cfg, out):
    rep = pipeline.verify_sigma_relation(args.i, cfg)
    if args.json:
        print(json.dumps(rep.to_record(), indent=2, sort_keys=True), file=out)
    else:
        print(f"sigma relation case {rep.case}: {rep.verdict}", file=out)
        if rep.assignment:
            print(f"  psi_X member {rep.x_member}, psi_A member {rep.a_member}, "
                  f"sigma1 = sigma^{rep.assignment[0]}, sigma2 = sigma^{rep.assignment[1]}", file=out)
        print(f"  {len(rep.primes)} degree-1 primes above {sorted({p for p, _ in rep.primes})}", file=out)
        print(f"  max residual {rep.max_residual} at {rep.precision} digits, exact in K: {rep.exact}", file=out)
    return _verdict_exit(rep.verdict)


def cmd_report(args, cfg, out):
    scope = pipeline.FULL_SCOPE
    if args.case or args.only:
        scope = pipeline.Scope.for_cases(args.case or pipeline.CURVE_CASES, args.only)
    t0 = time.perf_counter()
    data, text = pipeline.emit_report(scope, cfg, args.out)
    print(text, end="", file=out)
    print(f"elapsed {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    verdicts = pipeline.all_verdicts(json.loads(data))
    return EXIT_OK if all(v in (pipeline.PROVED, pipeline.VERIFIED) for v in verdicts) else EXIT_VERDICT


COMMANDS = {
    "bad-primes": cmd_bad_primes,
    "count-surface": cmd_count_surface,
    "count-curve": cmd_count_curve,
    "enumerate": cmd_enumerate,
    "match": cmd_match,
    "verify-c": cmd_verify_c,
    "verify-sigma": cmd_verify_sigma,
    "report": cmd_report,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](args, cfg, out)
    except (KeyError, ValueError, BadPrimeError, BudgetExceeded, CorruptedFieldData, OSError) as exc:
        print(f"k3cm: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
