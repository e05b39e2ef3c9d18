"""Command-line interface: `voatorus <command> ...`, every command accepts --json."""
import argparse
import json
import os
import sys
from fractions import Fraction

import mpmath

from . import elliptic, geomod, modular, suites, trace, voa as voamod, zhu
from .checks import vec_str
from .coeff import ONE, to_string

PRECISION_ENV = "VOATORUS_PRECISION"


class UsageError(Exception):
    pass


def _positive(s):
    v = int(s)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def _tol(s):
    v = float(s)
    if not (0 < v < 1):
        raise argparse.ArgumentTypeError("tolerance must lie in (0, 1)")
    return v


def _complex(s):
    """'re,im' or a complex literal such as '0.1+1.3i'."""
    s = s.replace(" ", "")
    try:
        if "," in s:
            re_, im = s.split(",")
            return complex(float(re_), float(im))
        return complex(s.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected re,im or a complex number")


def _gamma(s):
    parts = [int(p) for p in s.split(",")]
    if len(parts) != 4 or parts[0] * parts[3] - parts[1] * parts[2] != 1:
        raise argparse.ArgumentTypeError("gamma must be a,b,c,d with ad - bc = 1")
    return tuple(parts)


def _emit(args, payload, text=None):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text if text is not None else _plain_text(payload))


def _plain_text(payload):
    if isinstance(payload, dict) and "checks" in payload:
        lines = ["%-8s %-28s %s" % (c["status"].upper(), c["name"], c["anchor"]) for c in payload["checks"]]
        for w in payload.get("warnings", []):
            lines.append("WARNING " + w)
        return "\n".join(lines)
    if isinstance(payload, dict):
        return "\n".join("%s: %s" % (k, v) for k, v in payload.items())
    return str(payload)


def _checks_payload(results):
    checks = [r.to_json() for r in results]
    return {"schema_version": suites.SCHEMA_VERSION, "checks": checks,
            "warnings": [c["name"] + ": truncated" for c in checks if c["truncated"]],
            "all_passed": all(c["status"] == "pass" for c in checks)}


def _vector(voa, W, spec):
    """'vacuum', 'omega', 'a' or 'basis:G:I' (I-th basis state of grade G)."""
    if spec == "vacuum":
        return voa.vacuum() if W is voa.V else {W.basis(0)[0]: ONE}
    if spec == "omega":
        return dict(voa.omega)
    if spec == "a":
        if not hasattr(voa, "a"):
            raise UsageError("this VOA has no Heisenberg generator")
        return voa.a()
    if spec == "lowest":
        return {W.basis(0)[0]: ONE}
    if spec.startswith("basis:"):
        _, g, i = spec.split(":")
        return {W.basis(int(g))[int(i)]: ONE}
    raise UsageError("unknown vector %r" % spec)


def _module(voa, spec):
    """'V', 'fock:MU', 'sector:J' or 'verma:H'."""
    if spec == "V":
        return voa.V
    kind, _, arg = spec.partition(":")
    if kind == "fock" and hasattr(voa, "fock"):
        return voa.fock(Fraction(arg))
    if kind == "sector" and hasattr(voa, "sector"):
        return voa.sector(int(arg))
    if kind == "verma" and hasattr(voa, "verma"):
        return voa.verma(Fraction(arg))
    raise UsageError("module %r not available for %s" % (spec, voa.kind))


# commands ------------------------------------------------------------------

def cmd_eisenstein(args):
    s = elliptic.eisenstein(args.k, args.order)
    text = "\n".join("q^%d: %s" % (k[0], to_string(c)) for k, c in sorted(s.terms.items()))
    _emit(args, s.to_json(), text)
    return 0


def cmd_wp(args):
    s = elliptic.wp_tilde(args.m, args.ny, args.nq).series
    text = "\n".join("y^%s q^%s: %s" % (k + (to_string(c),)) for k, c in sorted(s.terms.items()))
    _emit(args, s.to_json(), text)
    return 0


def cmd_reduce(args):
    kind, _, n = args.target.partition(":")
    try:
        n = int(n)
    except ValueError:
        raise UsageError("target must be wp:M or g:2K")
    kind = kind.lower()
    if kind == "wp":
        p = elliptic.reduce_to_R(n, (args.ny, args.nq))
    elif kind == "g":
        if n % 2 or n < 8:
            raise UsageError("Eisenstein weight must be even and at least 8")
        p = elliptic.eisenstein_reduce(n // 2, args.nq)
    else:
        raise UsageError("target must be wp:M or g:2K")
    terms = [{"coefficient": c, "monomial": mono} for c, mono in p.to_list()]
    _emit(args, {"target": args.target, "polynomial": terms, "text": str(p)}, str(p))
    return 0


def _sample_tables(v, depth):
    """Modes of each generator on the basis states of grade <= depth."""
    V = v.V
    Y = v.vertex_map(V)
    out = []
    for gi, gen in enumerate(v.generators):
        wt = V.weight(next(iter(gen)))
        for g in range(depth + 1):
            for s in V.basis(g):
                for k in range(-1, g + 2):
                    n = wt - 1 + k
                    img = Y.apply(gen, n, {s: ONE})
                    if img:
                        out.append({"generator": gi, "mode": str(n), "state": repr(s).replace("Fraction", ""),
                                    "image": vec_str(img)})
    return out


def cmd_voa_build(args):
    v = voamod.build(args.kind, args.cutoff)
    payload = {"kind": args.kind, "c": str(v.c), "cutoff": args.cutoff,
               "dims": [v.V.dim(n) for n in range(args.cutoff + 1)],
               "omega": vec_str(v.omega),
               "generators": [vec_str(g) for g in v.generators],
               "sample_modes": _sample_tables(v, min(args.cutoff, 2))}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    _emit(args, payload, "dims: %s" % payload["dims"])
    return 0


def cmd_geomod_ajcoeffs(args):
    a = geomod.a_coeffs(args.count)
    b = geomod.b_coeffs(args.count)
    payload = {"A": [to_string(c) for c in a], "B": [str(c) for c in b]}
    _emit(args, payload, "\n".join("A_%d = %s" % (j + 1, to_string(c)) for j, c in enumerate(a)))
    return 0


def cmd_geomod_u1(args):
    v = voamod.build(args.voa, args.cutoff)
    out = geomod.apply_u1(v.V, _vector(v, v.V, args.vector))
    _emit(args, {"vector": args.vector, "U1": vec_str(out)}, vec_str(out))
    return 0


def cmd_geomod_check(args):
    v = voamod.build(args.voa, args.cutoff)
    V = v.V
    Y = v.vertex_map(V)
    w = _vector(v, V, args.vector)
    if args.which == "lemma":
        r = suites.check_lemma_u1_omega(v)
    elif args.which == "chgvar":
        r = geomod.check_chg_var(Y, w, min(args.cutoff, 5), args.order)
    elif args.which == "xcomm":
        r = geomod.check_x_comm(v, Y, w, w, (args.order, args.order), 3)
    else:
        r = geomod.check_l1_derivative_op(Y, w, min(args.cutoff, 5), args.order)
    return _report(args, [r])


def _report(args, results):
    payload = _checks_payload(results)
    if len(results) == 1:
        c = payload["checks"][0]
        payload.update(status=c["status"], first_mismatch=c["first_mismatch"], orders=c["orders"])
    _emit(args, payload)
    return 0 if payload["all_passed"] else 1


def _zhu_voa(args):
    return voamod.build(args.voa, max(args.cutoff, args.G))


def cmd_zhu_table(args):
    v = _zhu_voa(args)
    q = zhu.a_tilde(v, args.cutoff) if args.which == "bullet" else zhu.a_zhu(v, args.cutoff)
    d = q.to_json()
    _emit(args, d, "%s quotient at cutoff %d: dim %d" % (args.which, args.cutoff, d["dim"]))
    return 0


def cmd_zhu_iso(args):
    v = _zhu_voa(args)
    return _report(args, [zhu.iso_check(v, args.cutoff)])


def cmd_zhu_dims(args):
    v = _zhu_voa(args)
    st = zhu.stabilization(v, args.cutoff)
    st["dims"] = {str(k): d for k, d in st["dims"].items()}
    _emit(args, {"voa": args.voa, "cutoff": args.cutoff, **st})
    return 0


def cmd_zhu_check(args):
    v = _zhu_voa(args)
    q = zhu.a_tilde(v, args.cutoff)
    r = [zhu.check_associativity(v, q), zhu.commutator_check(v, q, form=args.commutator_form),
         zhu.centrality_check(v, q), zhu.l1_check(v, q), zhu.iso_check(v, args.cutoff, qt=q)]
    return _report(args, r)


def cmd_zhu_rho(args):
    v = _zhu_voa(args)
    W = _module(v, args.module)
    T = zhu.top_space(v, W)
    basis = [(g, repr(s).replace("Fraction", "")) for g, s in zhu._top_basis(T)]
    gens = [("omega", dict(v.omega))]
    if hasattr(v, "a"):
        gens.insert(0, ("a", v.a()))
    mats = {name: [[str(x) for x in row] for row in zhu.rho_w(v, W, u, T)] for name, u in gens}
    payload = {"voa": args.voa, "module": args.module, "top_grades": sorted(str(g) for g in T),
               "basis": [{"grade": str(g), "state": s} for g, s in basis], "matrices": mats}
    _emit(args, payload, "\n".join("rho(%s) = %s" % kv for kv in mats.items()))
    return 0


# trace chains ----------------------------------------------------------------

def _map(v, spec):
    """'V', a module spec (vertex operator on that module) or 'intertwiner:A,B'."""
    if spec.startswith("intertwiner:"):
        if not hasattr(v, "intertwiner"):
            raise UsageError("%s has no intertwiners" % v.kind)
        a, b = spec.split(":", 1)[1].split(",")
        conv = int if v.kind.startswith("lattice") else Fraction
        return v.intertwiner(conv(a), conv(b))
    return v.vertex_map(_module(v, spec))


def _load_chain(text):
    """A chain spec: a JSON file path or an inline JSON object
    {"voa": ..., "cutoff": ..., "maps": [...], "vectors": [...]}."""
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError("chain spec is neither a file nor JSON: %s" % exc)
    if not isinstance(d, dict) or "maps" not in d:
        raise UsageError("chain spec needs a 'maps' list")
    return d


def _chain(args):
    d = _load_chain(args.chain) if args.chain else {}
    kind = d.get("voa", args.voa)
    cutoff = int(d.get("cutoff", args.cutoff))
    v = voamod.build(kind, cutoff)
    maps = [_map(v, s) for s in d.get("maps", ["V"])]
    vecs = args.vectors if args.vectors else d.get("vectors", ["omega"] * len(maps))
    if len(vecs) != len(maps):
        raise UsageError("one vector per map (got %d for %d)" % (len(vecs), len(maps)))
    vectors = [_vector(v, Y.src, s) for Y, s in zip(maps, vecs)]
    return v, maps, vectors


def _key_str(key):
    m, exps = key
    return "%d|%s" % (m, ",".join(str(e) for e in exps))


def cmd_trace_run(args):
    v, maps, vectors = _chain(args)
    T, terms, overflow = trace.trace_series(maps, vectors, args.nq, args.nx)
    coeffs = {_key_str(k): to_string(c) for k, c in sorted(terms.items())}
    payload = {"voa": v.kind, "q_offset": str(T.offset), "N_q": args.nq, "N_x": args.nx,
               "coefficients": coeffs, "truncated": bool(overflow),
               "overflow": [_key_str(k) for k in overflow]}
    text = "\n".join("q^(%s+%s) x^(%s): %s" % ((T.offset,) + tuple(k.split("|")) + (c,)) for k, c in coeffs.items())
    _emit(args, payload, text + (" (truncated)" if overflow else ""))
    return 0


def _params(text):
    out = {}
    for item in filter(None, (text or "").split(",")):
        k, sep, val = item.partition("=")
        if not sep:
            raise UsageError("params are key=value pairs separated by commas")
        out[k.strip()] = val.strip()
    unknown = set(out) - {"u", "j", "l", "pi_sign"}
    if unknown:
        raise UsageError("unknown params: %s" % ", ".join(sorted(unknown)))
    return out


def cmd_trace_check(args):
    v, maps, vectors = _chain(args)
    p = _params(args.params)
    u = _vector(v, v.V, p.get("u", "omega"))
    j = int(p.get("j", 1))
    l = int(p.get("l", 2))
    nq, nx, ny = args.nq, args.nx, args.ny
    ident = args.identity
    if ident == "0":
        r = trace.check_identity0(v, u, maps, vectors, (nq, nx))
    elif ident == "05":
        r = trace.check_identity05(v, u, maps, vectors, (nq, nx))
    elif ident == "1":
        r = trace.check_identity1(v, u, j, maps, vectors, (nq, nx, ny), pi_sign=int(p.get("pi_sign", 1)))
    elif ident == "2":
        r = trace.check_identity2(v, u, l, j, maps, vectors, (nq, nx), pi_sign=int(p.get("pi_sign", -1)))
    elif ident == "l1":
        r = trace.check_l1_derivative_trace(v, j, maps, vectors, (nq, nx))
    elif ident == "modinv":
        r = trace.check_mod_inv_der(v, j, maps, vectors, (nq, nx), pi_sign=int(p.get("pi_sign", -1)))
    elif ident == "cyclicity":
        r = trace.check_cyclicity(maps, vectors, (nq, nx))
    else:
        if len(maps) != 1:
            raise UsageError("the ode check takes a single-map chain")
        r = trace.check_ode_n1(v, vectors[0], maps[0], nq)
    return _report(args, [r])


def cmd_modular(args):
    if args.action == "check":
        pts = [(args.z, args.tau)] if args.z is not None else [args.tau]
        r = [modular.check_mod_transform(args.object, args.gamma, pts, args.tol, N_q=args.nq)]
    elif args.action == "link":
        r = [modular.check_wp_P_link(args.m, [(args.z if args.z is not None else 0.2, args.tau)], args.tol)]
    else:
        kind = args.voa
        if not kind.startswith("lattice:"):
            raise UsageError("S-closure is implemented for lattice:N")
        v = voamod.build_lattice(int(kind.split(":")[1]), 4)
        r = [modular.check_s_closure_characters(v, args.gamma, tol=args.tol, N_q=args.nq)]
        r[0].details["expected_T_phases"] = [[x.real, x.imag] for x in modular.t_phases(v)]
    payload = _checks_payload(r)
    res = payload["checks"][0]["details"].get("residuals", payload["checks"][0]["details"].get("residual"))
    payload["residuals"] = res
    if getattr(r[0], "matrix", None) is not None:
        payload["matrix"] = [[[float(x.real), float(x.imag)] for x in row] for row in r[0].matrix]
    payload["status"] = payload["checks"][0]["status"]
    _emit(args, payload)
    return 0 if payload["all_passed"] else 1


def load_config(args):
    d = {}
    if args.config:
        with open(args.config) as fh:
            d.update(suites.parse_config_text(fh.read()))
    for key in suites.RunConfig.keys():
        val = getattr(args, "cfg_" + key, None)
        if val is not None:
            d[key] = val
    return suites.RunConfig.from_mapping(d)


def cmd_suite_run(args):
    cfg = load_config(args)
    report, timings = suites.run_suite(cfg)
    if args.timings:
        report["timings"] = timings
    text = json.dumps(report, indent=2, sort_keys=True)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        print(_plain_text(report))
        s = report["summary"]
        print("%d/%d checks passed" % (s["passed"], s["total"]))
    return 0 if report["summary"]["all_passed"] else 1


# parser --------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="voatorus", description="Genus-one correlation functions of VOAs, computed exactly.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eisenstein", parents=[common], help="q-expansion of G~_2k")
    e.add_argument("--k", type=_positive, required=True)
    e.add_argument("--order", type=_nonneg, default=8, help="highest power of q")
    e.set_defaults(func=cmd_eisenstein)

    w = sub.add_parser("wp", parents=[common], help="(y, q)-expansion of wp~_m")
    w.add_argument("--m", type=_positive, required=True)
    w.add_argument("--ny", type=_positive, default=4)
    w.add_argument("--nq", type=_nonneg, default=3)
    w.set_defaults(func=cmd_wp)

    r = sub.add_parser("reduce", parents=[common], help="reduce wp:M or g:2K into the ring R")
    r.add_argument("--target", required=True, help="wp:M or g:2K")
    r.add_argument("--ny", type=_positive, default=10)
    r.add_argument("--nq", type=_positive, default=8)
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("voa", help="VOA instances")
    vs = v.add_subparsers(dest="action", required=True)
    vb = vs.add_parser("build", parents=[common], help="build an instance and dump dimensions and sample modes")
    vb.add_argument("--kind", required=True, help="heisenberg | lattice:N | virasoro:c")
    vb.add_argument("--cutoff", type=_positive, default=6)
    vb.add_argument("--out", help="write the JSON dump to this file")
    vb.set_defaults(func=cmd_voa_build)

    g = sub.add_parser("geomod", help="geometrically-modified operators")
    gs = g.add_subparsers(dest="action", required=True)
    ga = gs.add_parser("ajcoeffs", parents=[common], help="coefficients A_j of U(1)")
    ga.add_argument("--count", type=_positive, default=6)
    ga.set_defaults(func=cmd_geomod_ajcoeffs)
    for name, func in (("check", cmd_geomod_check), ("apply-u1", cmd_geomod_u1)):
        gc = gs.add_parser(name, parents=[common])
        if name == "check":
            gc.add_argument("--which", choices=["chgvar", "xcomm", "l1", "lemma"], required=True)
            gc.add_argument("--order", type=_positive, default=4)
        gc.add_argument("--voa", default="virasoro:1/2")
        gc.add_argument("--vector", default="omega")
        gc.add_argument("--cutoff", type=_positive, default=6)
        gc.set_defaults(func=func)

    z = sub.add_parser("zhu", help="the algebra A~(V)")
    zs = z.add_subparsers(dest="action", required=True)
    for name, func, hlp in (("table", cmd_zhu_table, "structure constants of a quotient"),
                            ("iso", cmd_zhu_iso, "compare A~(V) with Zhu's A(V)"),
                            ("dims", cmd_zhu_dims, "quotient dimensions by cutoff"),
                            ("check", cmd_zhu_check, "algebra checks on A~(V)"),
                            ("rho", cmd_zhu_rho, "matrices of rho_W on the top level")):
        zc = zs.add_parser(name, parents=[common], help=hlp)
        zc.add_argument("--voa", default="virasoro:1/2")
        zc.add_argument("--cutoff", type=_positive, default=4, help="quotient cutoff M")
        zc.add_argument("--G", type=_positive, default=6, help="grade cutoff of the VOA")
        if name == "table":
            zc.add_argument("--which", choices=["bullet", "star"], default="bullet")
        if name == "check":
            zc.add_argument("--commutator-form", choices=list(zhu.COMMUTATOR_FORMS), default="derived")
        if name == "rho":
            zc.add_argument("--module", default="V", help="V | fock:MU | sector:J | verma:H")
        zc.set_defaults(func=func)

    t = sub.add_parser("trace", help="q-traces of modified operators")
    ts = t.add_subparsers(dest="action", required=True)
    for name, func in (("run", cmd_trace_run), ("check", cmd_trace_check)):
        tc = ts.add_parser(name, parents=[common])
        tc.add_argument("--chain", help="chain spec: JSON file or inline JSON")
        tc.add_argument("--vectors", nargs="+", help="vacuum | omega | a | lowest | basis:G:I, one per map")
        tc.add_argument("--voa", default="virasoro:1/2", help="used when no chain spec is given")
        tc.add_argument("--cutoff", type=_positive, default=12)
        tc.add_argument("--nq", type=_nonneg, default=4)
        tc.add_argument("--nx", type=_nonneg, default=2)
        if name == "check":
            tc.add_argument("--identity", required=True,
                            choices=["0", "05", "1", "2", "l1", "ode", "modinv", "cyclicity"])
            tc.add_argument("--params", help="comma-separated key=value: u, j, l, pi_sign")
            tc.add_argument("--ny", type=_nonneg, default=3)
        tc.set_defaults(func=func)

    m = sub.add_parser("modular", help="numeric modular transformation checks")
    ms = m.add_subparsers(dest="action", required=True)
    for name in ("check", "link", "sclosure"):
        mc = ms.add_parser(name, parents=[common])
        mc.add_argument("--tol", type=_tol, default=1e-8 if name != "sclosure" else 1e-6)
        if name == "sclosure":
            mc.add_argument("--voa", default="lattice:1")
            mc.add_argument("--gamma", type=_gamma, default=(0, -1, 1, 0))
            mc.add_argument("--nq", type=_positive, default=40)
        else:
            mc.add_argument("--tau", type=_complex, default=complex(0.1, 1.3), help="re,im or a complex like 0.1+1.3i")
            mc.add_argument("--z", type=_complex, default=None)
        if name == "check":
            mc.add_argument("--object", default="g4", help="g2 | g4 | g6 | ... | wp:M")
            mc.add_argument("--gamma", type=_gamma, default=(0, -1, 1, 0))
            mc.add_argument("--nq", type=_positive, default=60)
        if name == "link":
            mc.add_argument("--m", type=_positive, default=2)
        mc.set_defaults(func=cmd_modular)

    s = sub.add_parser("suite", help="run suites of checks")
    ss = s.add_subparsers(dest="action", required=True)
    sr = ss.add_parser("run", parents=[common], help="run the selected suites and emit a report")
    sr.add_argument("--config", help="flat key = value file")
    sr.add_argument("--timings", action="store_true", help="add wall-clock timings to the report")
    sr.add_argument("--voa", dest="cfg_voa")
    sr.add_argument("--suite", dest="cfg_suite", help="all | section1,...,section7")
    sr.add_argument("--G", dest="cfg_G")
    sr.add_argument("--nq", dest="cfg_N_q")
    sr.add_argument("--nx", dest="cfg_N_x")
    sr.add_argument("--ny", dest="cfg_N_y")
    sr.add_argument("--zhu-cutoff", dest="cfg_zhu_cutoff")
    sr.add_argument("--tol", dest="cfg_tol")
    sr.add_argument("--output", dest="cfg_output")
    sr.set_defaults(func=cmd_suite_run)
    return p


def main(argv=None):
    prec = os.environ.get(PRECISION_ENV)
    if prec:
        try:
            mpmath.mp.dps = int(prec)
        except ValueError:
            print("error: %s must be an integer number of digits" % PRECISION_ENV, file=sys.stderr)
            return 2
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, ArithmeticError, OSError) as exc:
        if getattr(args, "json", False):
            print(json.dumps({"schema_version": suites.SCHEMA_VERSION, "error": str(exc)}, sort_keys=True))
        else:
            print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
