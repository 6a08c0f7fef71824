"""``oskit`` command line.

Exit codes: 0 success or positive verdict, 1 negative verdict, 2 input error,
3 internal-consistency failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .algebras import (
    algebrize,
    check_quasi_identity,
    classify_algebrization,
    extreme_probe,
    find_identities,
    kadison_extreme_test,
)
from .decompose import construct_extreme_point, ideal_decompose, smith_decompose
from .errors import InputError, InternalConsistencyError, OskitError
from .multipliers import SEMANTICS, compute_multipliers, compute_ter
from .numcore import DEFAULT_TOL, Tolerances, op_norm
from .spaces import OperatorSpace, generated_tro, is_tro, load_matrix, load_space
from .structure import cstar_test, ideal_test
from .suite import run_suite

SCHEMA = "oskit-report/1"

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


# -- input resolution -------------------------------------------------------

def bundled_names() -> list:
    root = resources.files("oskit") / "data"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".osj"))


def _read_text(ref: str) -> str:
    """File contents for ``ref``: an existing path, else a bundled example name."""
    p = Path(ref)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    name = p.name if p.name.endswith(".osj") else p.name + ".osj"
    res = resources.files("oskit") / "data" / name
    if res.is_file():
        return res.read_text(encoding="utf-8")
    raise InputError(f"no such file or bundled example: {ref}")


class Inputs:
    """Loaded documents plus a digest of their exact bytes and the options."""

    def __init__(self):
        self.digest = hashlib.sha256()

    def text(self, role: str, ref: str) -> str:
        t = _read_text(ref)
        self.digest.update(f"{role}\0".encode())
        self.digest.update(t.encode("utf-8"))
        return t

    def space(self, ref: str, tol: Tolerances) -> OperatorSpace:
        x = load_space(self.text("space", ref), tol)
        if not x.name:
            x = x.with_space(x.space, Path(ref).stem)
        return x

    def matrix(self, role: str, ref: str, shape) -> np.ndarray:
        m = load_matrix(self.text(role, ref))
        if m.shape != tuple(shape):
            raise InputError(f"--{role} must be {shape[0]}x{shape[1]}, got {m.shape[0]}x{m.shape[1]}")
        return m


# -- JSON encoding ----------------------------------------------------------

def _enc(v):
    if isinstance(v, np.ndarray):
        if np.iscomplexobj(v):
            return {"re": v.real.tolist(), "im": v.imag.tolist()}
        return v.tolist()
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, dict):
        return {str(k): _enc(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_enc(x) for x in v]
    if isinstance(v, float) and not np.isfinite(v):
        return str(v)
    return v


def _pattern_rows(mask) -> list:
    if mask is None:
        return None
    return ["".join("C" if c else "0" for c in row) for row in np.asarray(mask)]


def make_report(command: str, inputs: Inputs, tol: Tolerances, seed: int, verdicts: dict,
                witnesses: dict | None = None, residuals: dict | None = None) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "inputs_digest": inputs.digest.hexdigest(),
        "verdicts": _enc(verdicts),
        "witnesses": _enc(witnesses or {}),
        "residuals": _enc(residuals or {}),
        "tolerances": tol.as_dict(),
        "seed": seed,
        "semantics": SEMANTICS,
    }


def render_text(report: dict) -> str:
    lines = [f"{report['command']}  (seed {report['seed']}, {report['semantics']})"]
    for section in ("verdicts", "residuals", "witnesses"):
        body = report[section]
        if not body:
            continue
        lines.append(f"{section}:")
        for k, v in body.items():
            if isinstance(v, list) and v and all(isinstance(r, str) for r in v):
                lines.append(f"  {k}:")
                lines.extend(f"    {r}" for r in v)
            elif isinstance(v, float):
                lines.append(f"  {k}: {v:.3e}")
            else:
                lines.append(f"  {k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    return "\n".join(lines) + "\n"


# -- subcommands ------------------------------------------------------------
# each returns (report, exit code)

def cmd_info(args, inp, tol):
    x = inp.space(args.space, tol)
    closed = is_tro(x.space, tol)
    v = {"name": x.name, "h": x.h, "k": x.k, "dim": x.dim, "nondegenerate": x.is_nondegenerate(tol),
         "is_tro": closed, "generated_tro_dim": generated_tro(x, tol).dim,
         "pattern": _pattern_rows(x.space.pattern(tol))}
    return make_report("info", inp, tol, args.seed, v), EXIT_OK


def _cmd_multiplier(which):
    def run(args, inp, tol):
        x = inp.space(args.space, tol)
        ms = compute_multipliers(x, tol)
        sub = getattr(ms, which)
        v = {"dim": sub.dim, "shape": list(sub.shape), "pattern": _pattern_rows(sub.pattern(tol))}
        w = {"basis": sub.basis} if args.basis else {}
        return make_report(which, inp, tol, args.seed, v, w), EXIT_OK
    return run


def cmd_ter(args, inp, tol):
    x = inp.space(args.space, tol)
    ter = compute_ter(x, tol)
    v = {"dim": ter.space.dim, "is_tro": ter.is_tro, "pattern": _pattern_rows(ter.space.pattern(tol))}
    r = {"tro_defect": ter.tro_residual}
    return make_report("ter", inp, tol, args.seed, v, residuals=r), EXIT_OK if ter.is_tro else EXIT_INTERNAL


def _z(args, inp, x):
    if not args.z:
        raise InputError("--z FILE is required")
    return inp.matrix("z", args.z, (x.k, x.h))


def cmd_algebrize(args, inp, tol):
    x = inp.space(args.space, tol)
    z = _z(args, inp, x)
    a = algebrize(x, z, tol)
    v = {"valid": True, "z_norm": op_norm(a.z)}
    return make_report("algebrize", inp, tol, args.seed, v), EXIT_OK


def cmd_quasi_id(args, inp, tol):
    x = inp.space(args.space, tol)
    a = algebrize(x, _z(args, inp, x), tol)
    if args.e:
        e = inp.matrix("e", args.e, (x.h, x.k))
        chk = check_quasi_identity(a, e, tol)
        v = {"quasi_identity": chk.verdict, "norm": chk.norm, "in_space": chk.in_space}
        r = {"residual": chk.residual}
        return make_report("quasi-id check", inp, tol, args.seed, v, residuals=r), \
            EXIT_OK if chk.verdict else EXIT_NEGATIVE
    rep = find_identities(a, args.seed, tol=tol)
    v = {"quasi_found": rep.quasi is not None, "quasi_route": rep.quasi_route,
         "left": rep.left is not None, "right": rep.right is not None,
         "two_sided": rep.two_sided is not None, "search_status": rep.search_status,
         "noncontractive_identity": rep.noncontractive}
    w = {k: getattr(rep, k) for k in ("quasi", "left", "right", "two_sided") if getattr(rep, k) is not None}
    r = {"quasi_residual": rep.quasi_residual} if rep.quasi is not None else {}
    return make_report("quasi-id find", inp, tol, args.seed, v, w, r), \
        EXIT_OK if rep.quasi is not None else EXIT_NEGATIVE


def cmd_extreme(args, inp, tol):
    x = inp.space(args.space, tol)
    if not args.e:
        raise InputError("--e FILE is required")
    e = inp.matrix("e", args.e, (x.h, x.k))
    method = args.method
    if method == "auto":
        method = "kadison" if is_tro(x.space, tol) else "probe"
    if method == "kadison":
        kv = kadison_extreme_test(x.space, e, tol)
        v = {"method": "kadison", "extreme": kv.extreme, "member": kv.member, "reason": kv.reason}
        r = {"partial_isometry": kv.partial_isometry_residual, "corner": kv.corner_residual}
        return make_report("extreme", inp, tol, args.seed, v, residuals=r), \
            EXIT_OK if kv.extreme else EXIT_NEGATIVE
    pr = extreme_probe(x.space, e, args.directions, args.seed, tol=tol)
    v = {"method": "probe", "refuted": pr.refuted, "undecided": not pr.refuted,
         "directions_tried": pr.directions_tried}
    w = {"y": pr.witness, "t": pr.t} if pr.refuted else {}
    return make_report("extreme", inp, tol, args.seed, v, w), EXIT_NEGATIVE if pr.refuted else EXIT_OK


def cmd_classify(args, inp, tol):
    x = inp.space(args.space, tol)
    c = classify_algebrization(x, _z(args, inp, x), args.seed, tol)
    ids = c.identities
    v = {"z_star_in_x": c.z_star_in_x, "is_left": c.local_class.is_left, "is_right": c.local_class.is_right,
         "ter_dim": c.ter_dim, "ter_is_tro": c.ter_is_tro, "z_star_extreme_in_ter": c.z_star_extreme_in_ter,
         "left_identity": ids.left is not None, "right_identity": ids.right is not None,
         "two_sided_identity": ids.two_sided is not None, "quasi_identity": ids.quasi is not None,
         "quasi_route": ids.quasi_route, "search_status": ids.search_status, "consistent": c.consistent}
    w = {"quasi": ids.quasi} if ids.quasi is not None else {}
    r = {"left_unitary": c.local_class.left_residual, "right_unitary": c.local_class.right_residual}
    return make_report("classify", inp, tol, args.seed, v, w, r), EXIT_OK


def cmd_cstar(args, inp, tol):
    x = inp.space(args.space, tol)
    cv = cstar_test(x, _z(args, inp, x), args.seed, tol=tol)
    v = {"is_cstar": cv.is_cstar, "failed_condition": cv.failed_condition}
    w = dict(cv.witness or {})
    if cv.is_cstar and args.basis:
        w["involution_table"] = cv.involution_table
    return make_report("cstar", inp, tol, args.seed, v, w, cv.residuals), \
        EXIT_OK if cv.is_cstar else EXIT_NEGATIVE


def cmd_ideal(args, inp, tol):
    x = inp.space(args.space, tol)
    iv = ideal_test(x, _z(args, inp, x), args.side, args.seed, tol=tol)
    v = {"side": iv.side, "is_ideal": iv.is_ideal, "failed_condition": iv.failed_condition}
    w = dict(iv.witness or {})
    if iv.is_ideal and args.basis:
        w["psi_table"] = iv.psi_table
    return make_report("ideal", inp, tol, args.seed, v, w, iv.residuals), \
        EXIT_OK if iv.is_ideal else EXIT_NEGATIVE


def cmd_smith(args, inp, tol):
    x = inp.space(args.space, tol)
    sm = smith_decompose(x, args.seed, tol=tol)
    v = {"rectangles": [list(r) for r in sm.rectangles], "multiplicities": sm.multiplicities,
         "dim": x.dim, "block_isometry_check": sm.block_isometry_check}
    r = {"reconstruction": sm.residual, "block_isometry": sm.isometry_residual}
    return make_report("smith", inp, tol, args.seed, v, residuals=r), \
        EXIT_OK if sm.block_isometry_check else EXIT_NEGATIVE


def cmd_decompose(args, inp, tol):
    x = inp.space(args.space, tol)
    e = inp.matrix("e", args.e, (x.h, x.k)) if args.e else construct_extreme_point(x, args.seed, tol)
    rep = ideal_decompose(x, e, alt_iota=args.alt_iota, seed=args.seed, tol=tol)
    dims = dict(zip(("X_T", "X_L", "X_R"), rep.part_dims))
    v = {"parts": dims, "all_verified": rep.passed, "e_supplied": bool(args.e),
         "note": "finite dimensions: all spans are closed, no weak*-closures taken"}
    r = {c.name: c.residual for c in rep.verifications}
    w = {"failed": [c.name for c in rep.verifications if not c.passed]}
    if args.basis:
        w.update(e=rep.e, p=rep.p, q=rep.q, q1=rep.q1, q2=rep.q2)
    return make_report("decompose", inp, tol, args.seed, v, w, r), EXIT_OK if rep.passed else EXIT_NEGATIVE


def cmd_suite(args, inp, tol):
    results = run_suite(args.seed, tol, args.only)
    v = {r.key: r.status for r in results}
    w = {r.key: r.note for r in results if r.note}
    res = {r.key: r.measured for r in results}
    ok = all(r.passed for r in results)
    return make_report("suite", inp, tol, args.seed, v, w, res), EXIT_OK if ok else EXIT_NEGATIVE


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for name in ("rank", "member", "norm", "resid"):
        common.add_argument(f"--tol-{name}", type=float, default=getattr(DEFAULT_TOL, f"tol_{name}"),
                            metavar="X", help=f"tolerance tol_{name}")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    common.add_argument("--basis", action="store_true", help="include matrices in the report")

    parser = argparse.ArgumentParser(prog="oskit", description="Quasi-multipliers and algebrizations "
                                     "of concrete operator spaces.")
    parser.add_argument("--version", action="version", version=f"oskit {__version__}")
    parser.add_argument("--list-examples", action="store_true", help="list bundled .osj documents")
    sub = parser.add_subparsers(dest="command")

    def add(name, fn, help_, z=False, e=False):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("space", help=".osj file or bundled example name")
        if z:
            p.add_argument("--z", metavar="FILE", help="quasi-multiplier (k x h) document")
        if e:
            p.add_argument("--e", metavar="FILE", help="element (h x k) document")
        p.set_defaults(func=fn)
        return p

    add("info", cmd_info, "summary of a space")
    add("qm", _cmd_multiplier("qm"), "quasi-multipliers")
    add("lm", _cmd_multiplier("lm"), "left multipliers")
    add("rm", _cmd_multiplier("rm"), "right multipliers")
    add("ter", cmd_ter, "the TRO X cap QM(X)*")
    add("algebrize", cmd_algebrize, "validate the product x z y", z=True)
    add("quasi-id", cmd_quasi_id, "check (--e) or search for identities", z=True, e=True)
    p = add("extreme", cmd_extreme, "extreme-point test (Kadison) or refuter (probe)", e=True)
    p.add_argument("--method", choices=("auto", "kadison", "probe"), default="auto")
    p.add_argument("--directions", type=int, default=256)
    add("classify", cmd_classify, "identity / local-unitary classification", z=True)
    add("cstar", cmd_cstar, "is the algebrization a C*-algebra", z=True)
    p = add("ideal", cmd_ideal, "does the algebrization embed as a one-sided ideal", z=True)
    p.add_argument("--side", choices=("left", "right"), default="left")
    add("smith", cmd_smith, "rectangular block form of a TRO")
    p = add("decompose", cmd_decompose, "ideal decomposition of a TRO", e=True)
    p.add_argument("--alt-iota", action="store_true", help="send the two-sided part to the right summand")
    p = sub.add_parser("suite", parents=[common], help="run the reference checks")
    p.add_argument("--only", action="append", metavar="KEY", help="run checks whose key contains KEY")
    p.set_defaults(func=cmd_suite)
    return parser


def emit(report: dict, fmt: str, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=False) + "\n" if fmt == "json" else render_text(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_examples:
        print("\n".join(bundled_names()))
        return EXIT_OK
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        tol = Tolerances(args.tol_rank, args.tol_member, args.tol_norm, args.tol_resid)
        inp = Inputs()
        inp.digest.update(json.dumps({"command": args.command, "seed": args.seed, "tol": tol.as_dict()},
                                     sort_keys=True).encode())
        report, code = args.func(args, inp, tol)
    except InternalConsistencyError as exc:
        print(f"oskit: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, ValueError) as exc:
        print(f"oskit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OskitError as exc:
        print(f"oskit: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    emit(report, args.format, args.out)
    return code


def main() -> None:
    sys.exit(run())

if __name__ == "__main__":
    main()
