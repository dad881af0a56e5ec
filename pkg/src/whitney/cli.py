"""Command-line front end: ``whitney <group> <command> [flags]``.

Exit codes: 0 success, 1 verification failure (nonzero residual),
2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import secrets
import sys
from fractions import Fraction

from . import arrangement as arr
from . import concentration as conc
from . import convexbody as cb
from . import extensions as ext
from . import matroid as mat
from .exactnum import Poly, is_log_concave, is_unimodal, log_concavity_witness, rational_str


class InputError(Exception):
    pass


def _max_nodes() -> int:
    return int(os.environ.get("WHITNEY_MAX_NODES", arr.DEFAULT_MAX_NODES))


def _num(x):
    if isinstance(x, Fraction):
        return rational_str(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    return x


def _poly(p: Poly) -> list[str]:
    return p.to_json()


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


_ARR_RE = re.compile(r"^\s*([a-z]+)\s*(?:\(([\d,\s]*)\))?\s*$")


def arrangement_by_name(name: str) -> arr.Arrangement:
    """coordinate(d), generic(n,d), braid(m), transverse, single(d[,c])."""
    mt = _ARR_RE.match(name.lower())
    if not mt:
        raise InputError(f"unknown arrangement {name!r}")
    kind = mt.group(1)
    nums = [int(a) for a in mt.group(2).split(",")] if mt.group(2) else []
    try:
        if kind == "coordinate" and len(nums) == 1:
            return arr.coordinate(*nums)
        if kind == "generic" and len(nums) == 2:
            return arr.generic_central(*nums)
        if kind == "braid" and len(nums) == 1:
            return arr.braid(*nums)
        if kind == "transverse" and not nums:
            return arr.transverse_planes()
        if kind == "single" and len(nums) in (1, 2):
            return arr.single(*nums)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    raise InputError(f"unknown arrangement {name!r}")


def _arrangement(args) -> arr.Arrangement:
    if getattr(args, "file", None):
        data = _load_json(args.file)
        try:
            return arr.Arrangement.from_json(data.get("arrangement", data))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"malformed arrangement JSON: {exc}") from exc
    if getattr(args, "name", None):
        return arrangement_by_name(args.name)
    raise InputError("give --file or --name")


def _matroid(args) -> mat.Matroid:
    try:
        if getattr(args, "file", None):
            return mat.matroid_from_json(_load_json(args.file))
        if getattr(args, "name", None):
            return mat.catalog(args.name)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    raise InputError("give --file or --name")


def _seed(args) -> int:
    if getattr(args, "seed", None) is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _config(args) -> dict:
    skip = {"func", "out"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _emit(args, payload) -> None:
    if isinstance(payload, str):
        text = payload
        print(json.dumps({"config": _config(args)}), file=sys.stderr)
    else:
        payload = {"config": _config(args), **payload}
        text = json.dumps(payload, indent=2, default=_num) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- matroid -------------------------------------------------------------------

def cmd_matroid_char(args):
    M = _matroid(args)
    chi, psi, gamma = mat.char_poly(M)
    _emit(args, {"matroid": repr(M), "chi": _poly(chi), "psi": _poly(psi),
                 "gamma": [rational_str(g) for g in gamma],
                 "log_concave": is_log_concave(gamma), "unimodal": is_unimodal(gamma)})
    return 0


def cmd_matroid_ingleton(args):
    M = _matroid(args)
    res = mat.ingleton_check(M, samples=args.samples, seed=_seed(args))
    _emit(args, {"matroid": repr(M), "satisfied": res.satisfied, "exhaustive": res.exhaustive,
                 "witness": res.witness_labels(M), "checked": res.checked})
    return 0


def cmd_matroid_catalog(args):
    _emit(args, {"matroids": ["uniform(r,n)", "boolean(n)", "vamos", "fano", "graphic-complete(m)"],
                 "arrangements": ["coordinate(d)", "generic(n,d)", "braid(m)", "transverse",
                                  "single(d,c)"]})
    return 0


# -- arrangements ------------------------------------------------------------------

def cmd_arr_poset(args):
    A = _arrangement(args)
    P = arr.intersection_poset(A, _max_nodes())
    nodes = [{"dim": d, "elements": [i for i in range(len(A)) if m >> i & 1], "mobius": mu}
             for d, m, mu in zip(P.dims, P.masks, P.mobius)]
    _emit(args, {"ambient": A.ambient_d, "nodes": nodes, "hasse": P.hasse_edges(),
                 "is_lattice": P.is_lattice()})
    return 0


def cmd_arr_char(args):
    A = _arrangement(args)
    s, a = arr.char_poly_arr(A)
    _emit(args, {"signed": _poly(s), "absolute": _poly(a), "alternating": _poly(arr.alternating_poly(A))})
    return 0


def cmd_arr_check_c(args):
    A = _arrangement(args)
    c = args.c or A.c or A.elements[0].codim
    ok = arr.is_c_arrangement(A, c)
    out = {"c": c, "is_c_arrangement": ok}
    if ok:
        rep = arr.c_relation(A, c)
        out.update(absolute=_poly(rep.absolute), predicted_absolute=_poly(rep.predicted_absolute),
                   signed=_poly(rep.signed), predicted_signed=_poly(rep.predicted_signed),
                   relation_holds=rep.holds, literal_exponent_poly=_poly(rep.literal_exponent_poly),
                   literal_exponent_matches=rep.literal_exponent_matches)
    _emit(args, out)
    return 0


def _index(args, A):
    if not 0 <= args.index < len(A):
        raise InputError(f"--index must be in [0, {len(A)})")
    return args.index


def cmd_arr_delete(args):
    A = _arrangement(args)
    _emit(args, {"arrangement": arr.delete(A, _index(args, A)).to_json()})
    return 0


def cmd_arr_contract(args):
    A = _arrangement(args)
    _emit(args, {"arrangement": arr.contract(A, _index(args, A)).to_json()})
    return 0


# -- zonotopes and discotopes ----------------------------------------------------------

def _zonotope(args) -> cb.Zonotope:
    if args.cube:
        return cb.Zonotope.cube(args.cube)
    if args.file:
        try:
            return cb.Zonotope.from_json(_load_json(args.file))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"malformed zonotope JSON: {exc}") from exc
    raise InputError("give --cube or --file")


def cmd_zono_wills(args):
    W = cb.zonotope_intrinsic_volumes(_zonotope(args), args.method)
    _emit(args, {"coefficients": [_num(x) for x in W.coefficients()], "exact": W.exact})
    return 0


def cmd_zono_intrinsic(args):
    W = cb.zonotope_intrinsic_volumes(_zonotope(args), args.method)
    _emit(args, {"nu": [_num(x) for x in W.nu], "exact": W.exact})
    return 0


def cmd_disco_estimate(args):
    if args.cube:
        D = cb.Discotope.from_zonotope(cb.Zonotope.cube(args.cube))
    elif args.ball:
        D = cb.Discotope.ball(args.ball)
    elif args.file:
        data = _load_json(args.file)
        try:
            D = cb.Discotope.from_json(data) if "disks" in data else cb.discotope_of(
                arr.Arrangement.from_json(data))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"malformed body JSON: {exc}") from exc
    else:
        raise InputError("give --cube, --ball or --file")
    grid = [float(x) for x in args.grid.split(",")] if args.grid else None
    try:
        res = cb.estimate_intrinsic_volumes_mc(D, grid, N=args.samples, seed=_seed(args), jobs=args.jobs,
                                               region=args.region)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(args, res.volumes_csv() if args.table == "volumes" else res.nu_csv())
    return 0


# -- extensions ------------------------------------------------------------------------

def cmd_extend(args):
    A = _arrangement(args)
    kind = args.kind
    if kind == "trivial":
        _emit(args, {"arrangement": A.trivial_ext(args.ell).to_json(),
                     "record": ext.ExtensionRecord("trivial", {"ell": args.ell}).to_json()})
        return 0
    seed = _seed(args)
    if kind == "product":
        B, rec = ext.large_product_ext(A, args.k, args.h, seed)
    elif kind == "semiflex":
        B, rec = ext.semiflexible_ext(A, _e(args, A), args.k, args.h, seed)
    else:
        B, rec = ext.composite_sfe(A, range(len(A)), args.k, args.h, args.ell, seed)
    _emit(args, {"arrangement": B.to_json(), "record": rec.to_json(),
                 "absolute": _poly(B.absolute())})
    return 0


def _e(args, A):
    if not 0 <= args.e < len(A):
        raise InputError(f"--e must be in [0, {len(A)})")
    return args.e


def cmd_extend_limit(args):
    A = _arrangement(args)
    hs = [int(x) for x in args.h_list.split(",")]
    rows = ext.flex_limit_probe(A, _e(args, A), args.k, hs, _seed(args))
    _emit(args, {"target": _poly(A.absolute()),
                 "rows": [{"h": r.h, "normalized": [rational_str(x) for x in r.normalized],
                           "deviation": [rational_str(x) for x in r.deviation]} for r in rows],
                 "decreasing": ext.flex_limit_decreasing(rows)})
    return 0


# -- verification ----------------------------------------------------------------------

def cmd_verify_product(args):
    A = _arrangement(args)
    res = ext.product_recurrence_residual(A, args.k, args.h, _seed(args))
    _emit(args, {"residual": _poly(res), "holds": res.is_zero()})
    return 0 if res.is_zero() else 1


def cmd_verify_semiflex(args):
    A = _arrangement(args)
    res = ext.semiflex_recurrence_residual(A, _e(args, A), args.k, args.h, _seed(args))
    _emit(args, {"residual": res.to_json()})
    return 0 if res.holds else 1


def cmd_verify_del_contr(args):
    A = _arrangement(args)
    reports = [arr.del_contr_residual(A, i) for i in range(len(A))]
    _emit(args, {"elements": [r.to_json() for r in reports]})
    return 0 if all(r.absolute_holds for r in reports) else 1


def cmd_verify_c_relation(args):
    A = _arrangement(args)
    c = args.c or A.c or A.elements[0].codim
    try:
        rep = arr.c_relation(A, c)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(args, {"absolute_residual": _poly(rep.absolute - rep.predicted_absolute),
                 "signed_residual": _poly(rep.signed - rep.predicted_signed),
                 "literal_exponent_residual": _poly(rep.absolute - rep.literal_exponent_poly),
                 "holds": rep.holds})
    return 0 if rep.holds else 1


def cmd_verify_log_concave(args):
    if args.seq:
        try:
            seq = [Fraction(x) if "." not in x else float(x) for x in args.seq.split(",")]
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        label = "sequence"
    else:
        M = _matroid(args)
        seq = mat.char_poly(M)[2]
        label = repr(M)
    try:
        w = log_concavity_witness(seq, args.slack)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(args, {"source": label, "sequence": [_num(x) for x in seq], "failing_index": w,
                 "log_concave": w is None, "unimodal": is_unimodal(seq)})
    return 0 if w is None else 1


# -- experiments -------------------------------------------------------------------------

def cmd_exp_uniform(args):
    ds = [int(x) for x in args.d_list.split(",")]
    rep = conc.uniform_matroid_experiment(args.n, ds, args.num_samples, _seed(args), args.jobs)
    _emit(args, rep.summary_csv() if args.table == "summary" else rep.samples_csv())
    return 0


def cmd_exp_levy(args):
    eps = [float(x) for x in args.eps.split(",")]
    rows = conc.levy_demo(args.d, eps, args.num_samples, _seed(args))
    _emit(args, conc.levy_csv(rows))
    return 0 if all(r.ok for r in rows) else 1


def cmd_exp_orthogonal(args):
    seed = _seed(args)
    rows = [[d, conc.orthogonal_concentration_demo(d, args.k, args.eps, args.num_samples, [seed, d])]
            for d in (int(x) for x in args.d_list.split(","))]
    _emit(args, conc._csv(["d", "measure"], rows))
    return 0


def cmd_exp_main(args):
    A = _arrangement(args)
    rep = conc.extension_concentration_experiment(A, args.k, args.h, args.ell, args.num_samples, _seed(args),
                                       args.jobs, args.mc_budget)
    _emit(args, rep.summary_csv() if args.table == "summary" else rep.samples_csv())
    return 0


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, help="RNG seed (drawn and printed if omitted)")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    src = argparse.ArgumentParser(add_help=False)
    src.add_argument("--file", help="JSON input")
    src.add_argument("--name", help="catalog name")

    p = argparse.ArgumentParser(prog="whitney", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True)

    def sub(group, name, func, parents=(common,), **kw):
        sp = group.add_parser(name, parents=list(parents), **kw)
        sp.set_defaults(func=func)
        return sp

    g = groups.add_parser("matroid").add_subparsers(dest="cmd", required=True)
    sub(g, "char", cmd_matroid_char, (common, src))
    sp = sub(g, "ingleton", cmd_matroid_ingleton, (common, src))
    sp.add_argument("--samples", type=int, default=200_000)
    sub(g, "catalog", cmd_matroid_catalog)

    g = groups.add_parser("arr").add_subparsers(dest="cmd", required=True)
    sub(g, "poset", cmd_arr_poset, (common, src))
    sub(g, "char", cmd_arr_char, (common, src))
    sp = sub(g, "check-c", cmd_arr_check_c, (common, src))
    sp.add_argument("--c", type=int)
    for name, fn in (("delete", cmd_arr_delete), ("contract", cmd_arr_contract)):
        sp = sub(g, name, fn, (common, src))
        sp.add_argument("--index", type=int, required=True)

    g = groups.add_parser("zono").add_subparsers(dest="cmd", required=True)
    for name, fn in (("wills", cmd_zono_wills), ("intrinsic", cmd_zono_intrinsic)):
        sp = sub(g, name, fn)
        sp.add_argument("--cube", type=int)
        sp.add_argument("--file")
        sp.add_argument("--method", choices=["subset", "belt"], default="subset")

    g = groups.add_parser("disco").add_subparsers(dest="cmd", required=True)
    sp = sub(g, "estimate", cmd_disco_estimate)
    sp.add_argument("--cube", type=int)
    sp.add_argument("--ball", type=int)
    sp.add_argument("--file", help="discotope JSON or central arrangement JSON")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--grid", help="comma-separated lambda values")
    sp.add_argument("--table", choices=["nu", "volumes"], default="nu")
    sp.add_argument("--region", choices=["auto", "box", "ball"], default="auto")

    g = groups.add_parser("extend").add_subparsers(dest="cmd", required=True)
    for name in ("trivial", "product", "semiflex", "composite"):
        sp = sub(g, name, cmd_extend, (common, src))
        sp.set_defaults(kind=name)
        sp.add_argument("--k", type=int, default=1)
        sp.add_argument("--h", type=int, default=2)
        sp.add_argument("--ell", type=int, default=0)
        sp.add_argument("--e", type=int, default=0)
    sp = sub(g, "limit-probe", cmd_extend_limit, (common, src))
    sp.add_argument("--e", type=int, default=0)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--h-list", default="4,16,64")

    g = groups.add_parser("verify").add_subparsers(dest="cmd", required=True)
    sp = sub(g, "lemma-product", cmd_verify_product, (common, src))
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--h", type=int, default=2)
    sp = sub(g, "lemma-semiflex", cmd_verify_semiflex, (common, src))
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--h", type=int, default=2)
    sp.add_argument("--e", type=int, default=0)
    sub(g, "del-contr", cmd_verify_del_contr, (common, src))
    sp = sub(g, "c-relation", cmd_verify_c_relation, (common, src))
    sp.add_argument("--c", type=int)
    sp = sub(g, "log-concave", cmd_verify_log_concave, (common, src))
    sp.add_argument("--seq", help="comma-separated sequence")
    sp.add_argument("--slack", type=float, default=0.0)

    g = groups.add_parser("experiment").add_subparsers(dest="cmd", required=True)
    sp = sub(g, "uniform", cmd_exp_uniform)
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--d-list", default="16,64")
    sp.add_argument("--num-samples", type=int, default=40)
    sp.add_argument("--table", choices=["summary", "samples"], default="summary")
    sp = sub(g, "levy", cmd_exp_levy)
    sp.add_argument("--d", type=int, default=50)
    sp.add_argument("--eps", default="0.1,0.2,0.3,0.4,0.5")
    sp.add_argument("--num-samples", type=int, default=100_000)
    sp = sub(g, "orthogonal", cmd_exp_orthogonal)
    sp.add_argument("--d-list", default="20,40,80")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--eps", type=float, default=0.3)
    sp.add_argument("--num-samples", type=int, default=20_000)
    sp = sub(g, "main", cmd_exp_main, (common, src))
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--h", type=int)
    sp.add_argument("--ell", type=int)
    sp.add_argument("--num-samples", type=int, default=40)
    sp.add_argument("--mc-budget", type=int, default=20_000)
    sp.add_argument("--table", choices=["summary", "samples"], default="summary")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (InputError, mat.ResourceError, ext.GenericityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
