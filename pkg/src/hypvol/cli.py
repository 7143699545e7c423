"""Command-line interface: ``hypvol <subcommand> [options]``.

Exit status is 0 on success, 1 on a domain error (valid input the
mathematics rejects) and 2 on malformed input or usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from . import bounds, cycles, hypgeom, pseudo, specfun
from .verify import run_verify

USAGE = """usage: hypvol <subcommand> [options]

subcommands:
  specfun   Lobachevsky function, Catalan's constant, regular ideal simplex volumes
  tet       volume, dihedral angles and obtuseness class of a JSON simplex
  pseudo    statistics of a JSON pseudomanifold
  chain     pseudomanifold and geometric audit of a JSON integral chain
  bounds    simplicial-volume lower bounds for given manifold data
  census    bounds for the truncated-tetrahedron family over a genus range
  verify    run the self-check suites

Run 'hypvol <subcommand> --help' for options.  HYPVOL_TOL sets the default tolerance.
"""


class UsageError(Exception):
    """Malformed input or arguments: exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    tol: float
    seed: int = 0
    input_path: str | None = None
    output_format: str = "json"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(x: float) -> str:
    return format(x, ".12g")


def _clean(obj: Any) -> Any:
    """Round floats to 12 significant digits; non-finite floats become null."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) or hasattr(obj, "dtype"):
        x = float(obj)
        return float(_fmt(x)) if math.isfinite(x) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True)


def _default_tol() -> float:
    raw = os.environ.get("HYPVOL_TOL")
    if raw is None:
        return specfun.DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"HYPVOL_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError(f"HYPVOL_TOL must be positive, got {raw!r}")
    return tol


def _read_json(path: str | None, stdin) -> Any:
    try:
        if path is None or path == "-":
            text = stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        return json.loads(text)
    except OSError as exc:
        raise UsageError(f"cannot read input: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON input: {exc}") from None


def _parse(fn, obj):
    """Convert parsed JSON into a domain object; any failure is malformed input."""
    try:
        return fn(obj)
    except Exception as exc:  # noqa: BLE001 - every construction failure is an input error
        raise UsageError(f"malformed input: {exc}") from None


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return x


def _build_parser(default_tol: float) -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=_positive, default=default_tol)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--input", default=None, help="JSON input file (default: stdin)")

    root = _Parser(prog="hypvol", usage=USAGE, add_help=True)
    sub = root.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("specfun", parents=[common])
    p.add_argument("--lobachevsky", type=float, action="append", default=[], metavar="THETA")
    p.add_argument("--catalan", action="store_true")
    p.add_argument("--vn", type=int, action="append", default=[], metavar="N")

    p = sub.add_parser("tet", parents=[common])
    p.add_argument("--volume", action="store_true")
    p.add_argument("--angles", action="store_true")
    p.add_argument("--classify", action="store_true")
    p.add_argument("--scheme", choices=("gauss", "midpoint"), default="gauss")

    sub.add_parser("pseudo", parents=[common])

    p = sub.add_parser("chain", parents=[common])
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--vol", type=_positive, default=None)
    p.add_argument("--sv-boundary", type=float, default=None)
    p.add_argument("--eps-small", type=float, default=0.1)

    p = sub.add_parser("bounds", parents=[common])
    p.add_argument("--vol", type=float, required=True)
    p.add_argument("--sv-boundary", type=float, default=None)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--vol-boundary", type=float, default=None)
    p.add_argument("--eps-n", type=float, default=None)

    p = sub.add_parser("census", parents=[common])
    p.add_argument("--g-min", type=int, default=2)
    p.add_argument("--g-max", type=int, default=20)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--profile", choices=("quick", "full"), default="quick")
    return root


# --------------------------------------------------------------------------
# Subcommands

def _cmd_specfun(args, cfg, stdin) -> str:
    if not (args.lobachevsky or args.catalan or args.vn):
        raise UsageError("specfun: give at least one of --lobachevsky, --catalan, --vn")
    lines = [_fmt(specfun.lobachevsky(t, cfg.tol)) for t in args.lobachevsky]
    if args.catalan:
        lines.append(_fmt(specfun.catalan(cfg.tol)))
    lines.extend(_fmt(specfun.v_n(n, cfg.tol)) for n in args.vn)
    return "\n".join(lines) + "\n"


def _cmd_tet(args, cfg, stdin) -> str:
    S = _parse(hypgeom.simplex_from_json, _read_json(cfg.input_path, stdin))
    want_all = not (args.volume or args.angles or args.classify)
    out: dict[str, Any] = {"n": S.n, "degenerate": S.degenerate,
                           "orientation": hypgeom.orientation_sign(S)}
    if args.volume or want_all:
        out["volume"] = hypgeom.signed_volume(S, cfg.tol, args.scheme)
    if args.angles or want_all:
        if S.degenerate:
            out["angles"] = None
        else:
            out["angles"] = {",".join(map(str, k)): v for k, v in hypgeom.dihedral_angles(S).items()}
    if args.classify or (want_all and S.n == 3 and not S.has_ideal_vertex and not S.degenerate):
        out["classification"] = hypgeom.classify_obtuseness(S).value
    return dumps(out) + "\n"


def _pseudo_stats(P: pseudo.Pseudomanifold) -> dict:
    problems = pseudo.validate(P)
    if problems:
        return {"valid": False, "problems": problems}
    bs = pseudo.boundary_structure(P)
    dP = bs.boundary
    signs = pseudo.orientability(P)
    out: dict[str, Any] = {
        "valid": True,
        "n": P.n,
        "simplices": P.simplex_count,
        "orientable": signs is not None,
        "orientation": list(signs) if signs is not None else None,
        "euler_characteristic": pseudo.euler_characteristic(P),
        "face_orbit_counts": [len(pseudo.face_orbits(P, k)) for k in range(P.n + 1)],
        "boundary": {
            "simplices": dP.simplex_count,
            "pseudomanifold": dP.to_json(),
            "orientable": (pseudo.orientability(dP) is not None) if dP.n >= 1 else None,
            "euler_characteristic": pseudo.euler_characteristic(dP) if dP.n >= 1 else dP.simplex_count,
        },
    }
    if P.n >= 2:
        lhs, rhs, ok = pseudo.boundary_face_count_identity(P)
        out["boundary_face_count_identity"] = {"faces": lhs, "half_n_times_c": rhs, "holds": ok}
    if P.n == 3:
        om = pseudo.omega_partition(P)
        census = pseudo.nice_bad_edges(P)
        out["omega"] = {"counts": list(om.counts), "members": [list(m) for m in om.members]}
        out["edges"] = {"nice": census.e_nice, "bad": census.e_bad,
                        "sum_matches_boundary": 2 * (census.e_nice + census.e_bad) == 3 * dP.simplex_count}
        out["boundary"]["component_euler_characteristics"] = \
            pseudo.component_euler_characteristics(dP) if dP.simplex_count else []
    out["cycle_conditions"] = pseudo.cyclehyp_violations(P)
    return out


def _cmd_pseudo(args, cfg, stdin) -> str:
    P = _parse(pseudo.Pseudomanifold.from_json, _read_json(cfg.input_path, stdin))
    stats = _pseudo_stats(P)
    if not stats["valid"]:
        raise UsageError("invalid pseudomanifold: " + "; ".join(stats["problems"]))
    return dumps(stats) + "\n"


def _cmd_chain(args, cfg, stdin) -> str:
    z = _parse(cycles.IntegralChain.from_json, _read_json(cfg.input_path, stdin))
    P, unmatched = cycles.chain_to_pseudomanifold(z)
    out: dict[str, Any] = {
        "terms": len(z.terms),
        "unmatched_faces": unmatched,
        "boundary_l1": cycles.boundary_l1(z),
        "pseudomanifold": P.to_json(),
        "orientation_from_signs_valid": pseudo.signs_orient(P, cycles.orientation_from_signs(z)),
        "stats": _pseudo_stats(P),
    }
    if args.vol is not None or args.d is not None:
        if args.vol is None or args.d is None or args.sv_boundary is None:
            raise UsageError("chain audit needs --d, --vol and --sv-boundary together")
        if any(t.vertices is None for t in z.terms):
            raise UsageError("chain audit needs vertex positions on every term")
        out["audit"] = cycles.audit_geometric_cycle(
            z, args.d, args.vol, args.sv_boundary, args.eps_small, tol=min(cfg.tol, 1e-7)).to_json()
    return dumps(out) + "\n"


def _cmd_bounds(args, cfg, stdin) -> str:
    m = bounds.ManifoldData(args.n, args.vol, vol_boundary=args.vol_boundary,
                            sv_boundary=args.sv_boundary)
    return dumps(bounds.bound_report(m, eps_n=args.eps_n, tol=cfg.tol).to_json()) + "\n"


def _cmd_census(args, cfg, stdin) -> str:
    rows = bounds.census_table(args.g_min, args.g_max, cfg.tol)
    if args.format == "json":
        return dumps([{"g": r.g, "vol_delta_g": r.vol_delta_g, "vol": r.data.vol,
                       "sv_boundary": r.data.sv_boundary, **r.report.to_json(),
                       "inequalities": r.inequalities} for r in rows]) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(bounds.CENSUS_COLUMNS)
    for r in rows:
        rep = r.report
        w.writerow([r.g, _fmt(r.vol_delta_g), _fmt(r.data.vol), _fmt(r.data.sv_boundary),
                    _fmt(rep.jungreis), _fmt(rep.thmB), _fmt(rep.bfp), rep.best[0]])
    return buf.getvalue()


def _cmd_verify(args, cfg, stdin) -> tuple[str, int]:
    report = run_verify(args.profile, cfg.seed, cfg.tol)
    return dumps(report) + "\n", 0 if report["passed"] else 1


COMMANDS = {"specfun": _cmd_specfun, "tet": _cmd_tet, "pseudo": _cmd_pseudo,
            "chain": _cmd_chain, "bounds": _cmd_bounds, "census": _cmd_census,
            "verify": _cmd_verify}


def dispatch(argv: Sequence[str], stdout=None, stderr=None, stdin=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    stdin = sys.stdin if stdin is None else stdin
    argv = list(argv)
    if not argv or argv[0] not in COMMANDS and argv[0] not in ("-h", "--help"):
        stderr.write(USAGE)
        if argv:
            stderr.write(f"hypvol: unknown subcommand {argv[0]!r}\n")
        return 2
    try:
        args = _build_parser(_default_tol()).parse_args(argv)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    cfg = RunConfig(args.subcommand, args.tol, args.seed, args.input,
                    "csv" if args.subcommand == "census" and args.format == "csv" else
                    "plain" if args.subcommand == "specfun" else "json")
    try:
        result = COMMANDS[args.subcommand](args, cfg, stdin)
    except UsageError as exc:
        stderr.write(f"hypvol {args.subcommand}: {exc}\n")
        return 2
    except (ValueError, ArithmeticError) as exc:
        stderr.write(f"hypvol {args.subcommand}: {type(exc).__name__}: {exc}\n")
        return 1
    status = 0
    if isinstance(result, tuple):
        result, status = result
    stdout.write(result)
    return status


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
