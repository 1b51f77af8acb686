"""Command-line front end. Every subcommand prints one JSON report.

Exit codes: 0 when a result was computed (negative answers included), 1 for
bad input, 2 when the computation could not decide within its limits.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import acceptance, derham, qrsp, splitting
from .fpoly import HypersurfaceRing, PolyParseError, PolyRing, UnsupportedPrime, parse_poly, variable_names

SCHEMA_VERSION = 1
DEFAULT_SEED = 0
DEGREE_CAP = 64

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNDECIDED = 2


class InputError(ValueError):
    pass


def _ring(p: int, names) -> PolyRing:
    names = tuple(n.strip() for n in names if n.strip())
    if not names:
        raise InputError("no variables given")
    return PolyRing(p, names)


def _parse(args, text: str):
    names = args.vars.split(",") if getattr(args, "vars", None) else variable_names(text)
    ring = _ring(args.p, names)
    return parse_poly(text, ring)


def _degree_bound(args, S: HypersurfaceRing, n: int) -> int:
    need = splitting.required_degree_bound(S, n)
    if args.degree_bound is None:
        return need
    if args.degree_bound > DEGREE_CAP:
        raise splitting.DegreeBoundError(f"degree bound {args.degree_bound} exceeds the cap {DEGREE_CAP}")
    if args.degree_bound < need:
        raise splitting.DegreeBoundError(f"degree bound {args.degree_bound} is below the {need} "
                                         f"needed for n={n}")
    return args.degree_bound


def _cubic_oracle(f):
    if f.ring.nvars == 3 and f.is_homogeneous() and f.degree() == 3:
        points = splitting.count_points_elliptic(f, check_smooth=False)
        return {"points": points, "a_p": f.p + 1 - points}
    return None


# -- subcommands ---------------------------------------------------------------------

def cmd_fedder(args):
    f = _parse(args, args.f)
    if f.is_homogeneous() and f.degree() == f.ring.nvars:
        value = splitting.cy_coefficient_criterion(f)
        results = {"criterion": "cy-coefficient", "value": value, "fsplit": value != 0}
    else:
        member = splitting.fedder_membership(f)
        results = {"criterion": "fedder-monomial", "value": int(member), "fsplit": member}
    return results, _cubic_oracle(f), EXIT_OK


def cmd_height(args):
    f = _parse(args, args.f)
    S = HypersurfaceRing(f.ring, f)
    if args.nmax > splitting.MAX_SEARCH_LENGTH:
        raise InputError(f"--nmax must be at most {splitting.MAX_SEARCH_LENGTH}")
    D = _degree_bound(args, S, args.nmax)
    rep = splitting.quasi_f_split_height(S, args.nmax, D)
    oracle = _cubic_oracle(f)
    if oracle is not None:
        oracle["hasse"] = splitting.cy_coefficient_criterion(f)
    return rep.as_dict(), oracle, EXIT_UNDECIDED if rep.exceeds else EXIT_OK


def cmd_quadric(args):
    rep = splitting.quadric_sigma(args.n, args.p)
    results = rep.as_dict()
    results["sigma_conditions"] = {"f_power_divides_sigma": rep.divisible,
                                   "top_coefficient_nonzero": rep.coefficient_in_sigma != 0}
    return results, None, EXIT_OK


def cmd_cartier_check(args):
    ring = _ring(args.p, args.vars.split(","))
    dv = ring.nvars
    mismatches = 0
    checked = 0
    for i in range(dv + 1):
        for k in range(args.deg + 1):
            for a, J in derham.forms_of_total_degree(dv, i, k):
                eta = derham.DifferentialForm.monomial(ring, a, J)
                checked += 1
                mismatches += derham.cartier(derham.cartier_inverse(eta)) != eta
    total = derham.verify_total_splitting(derham.FrobeniusLift.canonical(ring), args.deg)
    results = {"roundtrip_checked": checked, "roundtrip_failures": mismatches,
               "bidegrees": total["bidegrees"], "quasi_isomorphism": total["quasi_isomorphism"],
               "induces_cartier_inverse": total["induces_cartier_inverse"]}
    ok = not mismatches and total["quasi_isomorphism"] and total["induces_cartier_inverse"]
    return results, None, EXIT_OK if ok else EXIT_UNDECIDED


def cmd_decompose(args):
    ring = _ring(args.p, args.vars.split(","))
    lift = derham.FrobeniusLift.parse(ring, args.lift or "")
    total = derham.verify_total_splitting(lift, args.deg)
    S = HypersurfaceRing(ring)
    tau = splitting.graded_splitting_search(S, 1, splitting.required_degree_bound(S, 1))
    composite = derham.fsplit_composite(tau, lift, args.deg)
    results = {"lift": total["lift"], "bidegrees": total["bidegrees"],
               "quasi_isomorphism": total["quasi_isomorphism"],
               "induces_cartier_inverse": total["induces_cartier_inverse"],
               "splitting": tau.nonzero_generators(),
               "composite_induces_cartier": composite["induces_cartier"]}
    ok = total["quasi_isomorphism"] and composite["induces_cartier"]
    return results, None, EXIT_OK if ok else EXIT_UNDECIDED


def cmd_witt_basechange(args):
    ring = _ring(args.p, args.vars.split(","))
    rep = derham.witt_basechange_check(ring, args.n, args.deg, seed=args.seed)
    return rep, None, EXIT_OK if rep["ok"] else EXIT_UNDECIDED


def cmd_qrsp_demo(args):
    gens = [g.strip() for g in args.gens.split(",") if g.strip()]
    names = [v.strip() for v in args.vars.split(",")] if args.vars else gens
    pres = qrsp.PerfectPresentation(args.p, tuple(names), tuple(gens),
                                    precision=args.precision, level_cap=max(args.levels, 0))
    rep = qrsp.verify_filtered_iso(pres, args.levels, seed=args.seed)
    signs = qrsp.sign_identity_check(20)
    rep["sign_identity"] = signs["ok"]
    return rep, {"gamma_ranks": [e["expected_rank"] for e in rep["levels"]]}, \
        EXIT_OK if rep["ok"] and signs["ok"] else EXIT_UNDECIDED


def cmd_verify_all(args):
    cfg = (acceptance.AcceptanceConfig.quick(args.seed) if args.quick
           else acceptance.AcceptanceConfig(seed=args.seed))
    rows = []
    for r in acceptance.run_all(cfg):
        print(r.line(), file=sys.stderr)
        rows.append({"criterion": r.number, "name": r.name, "passed": r.passed, "details": r.details})
    ok = all(r["passed"] for r in rows)
    return {"criteria": rows, "all_passed": ok}, None, EXIT_OK if ok else EXIT_UNDECIDED


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
    parser = argparse.ArgumentParser(prog="frobsplit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text, parents=[common])
        sp.set_defaults(func=func)
        return sp

    sp = add("fedder", cmd_fedder, "Fedder-type coefficient criterion for a hypersurface")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--vars")

    sp = add("height", cmd_height, "quasi-F-split height of a projective hypersurface")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--vars")
    sp.add_argument("--nmax", type=int, default=2)
    sp.add_argument("--degree-bound", type=int)

    sp = add("quadric", cmd_quadric, "splitting section of the standard quadric in P^n")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add("cartier-check", cmd_cartier_check, "Cartier round trip and the canonical lift splitting")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--vars", required=True)
    sp.add_argument("--deg", type=int, default=8)

    sp = add("decompose", cmd_decompose, "de Rham decomposition from a Frobenius lift")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--vars", required=True)
    sp.add_argument("--lift", default="")
    sp.add_argument("--deg", type=int, default=8)

    sp = add("witt-basechange", cmd_witt_basechange, "cohomology of F_*W_n(R)/p tensor F_*Omega")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--vars", required=True)
    sp.add_argument("--deg", type=int, default=6)

    sp = add("qrsp-demo", cmd_qrsp_demo, "conjugate filtration splitting for P/(gens)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--gens", required=True)
    sp.add_argument("--vars")
    sp.add_argument("--levels", type=int, default=3)
    sp.add_argument("--precision", type=int, default=4)

    sp = add("verify-all", cmd_verify_all, "run every acceptance suite")
    sp.add_argument("--quick", action="store_true")
    return parser


def run(argv=None):
    """Return (exit code, report dict or None)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "timing", "command")}
    start = time.perf_counter()
    try:
        results, oracle, code = args.func(args)
    except PolyParseError as exc:
        print(f"error: could not parse polynomial: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except UnsupportedPrime as exc:
        print(f"error: unsupported prime: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except splitting.DegreeBoundError as exc:
        print(f"error: degree bound: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except splitting.SingularHypersurface as exc:
        print(f"error: singular input: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except (qrsp.PrecisionOverflow, qrsp.FiltrationOverflow) as exc:
        print(f"error: precision or level cap: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, "inputs": inputs,
              "results": results, "oracle": oracle}
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    return code, report


def main(argv=None) -> int:
    code, report = run(argv)
    if report is not None:
        print(json.dumps(report, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
