"""Named groups of checks run by the command line and the acceptance tests."""
import time
from dataclasses import dataclass, field, fields
from fractions import Fraction

from .checks import CheckResult
from .coeff import LAM, ONE, mpq
from .elliptic import cubic_residual, eisenstein_reduce, reduce_to_R
from .fps import MultiSeries, exp_derivation_coeffs, log1p_series
from .geomod import (apply_u1, check_chg_var, check_l1_derivative_op, check_u1_conjugation,
                     check_x_comm)
from .linalg import vadd
from . import modular, trace, voa as voamod, zhu

SCHEMA_VERSION = 1

SUITES = {
    "section1": "operator identities for geometrically-modified intertwining operators",
    "section2": "trace recursion identities",
    "section3": "Weierstrass-function identities on traces",
    "section4": "Eisenstein series and the ring R",
    "section5": "trace structure: cyclicity and direct-sum oracle",
    "section6": "the algebra A~(V) and top levels",
    "section7": "one-point equation and modular behaviour",
}


@dataclass
class RunConfig:
    voa: str = "virasoro:1/2"
    G: int = 12
    N_q: int = 4
    N_x: int = 4
    N_y: int = 3
    zhu_cutoff: int = 4
    tol: float = 1e-8
    output: str = ""
    suite: str = "all"

    def __post_init__(self):
        for name in ("G", "N_q", "N_x", "N_y", "zhu_cutoff"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
                raise ValueError("cutoff %s must be a positive integer, got %r" % (name, v))
        if not (0 < self.tol < 1):
            raise ValueError("tolerance must lie in (0, 1), got %r" % (self.tol,))
        names = self.suite_names()
        bad = [s for s in names if s not in SUITES]
        if bad:
            raise ValueError("unknown suite %s" % ", ".join(bad))

    def suite_names(self):
        if self.suite == "all":
            return list(SUITES)
        return [s.strip() for s in self.suite.split(",") if s.strip()]

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_mapping(cls, d):
        unknown = sorted(set(d) - set(cls.keys()))
        if unknown:
            raise ValueError("unknown config key(s): %s" % ", ".join(unknown))
        kw = {}
        for f in fields(cls):
            if f.name not in d:
                continue
            v = d[f.name]
            if f.type is int or f.type == "int":
                try:
                    v = int(v)
                except (TypeError, ValueError):
                    raise ValueError("config key %s needs an integer, got %r" % (f.name, v))
            elif f.type is float or f.type == "float":
                try:
                    v = float(v)
                except (TypeError, ValueError):
                    raise ValueError("config key %s needs a number, got %r" % (f.name, v))
            else:
                v = str(v)
            kw[f.name] = v
        return cls(**kw)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def parse_config_text(text):
    """Flat 'key = value' lines; '#' starts a comment."""
    out = {}
    for i, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError("line %d: expected key = value" % i)
        k, v = (s.strip() for s in line.split("=", 1))
        if k in out:
            raise ValueError("line %d: duplicate key %s" % (i, k))
        out[k] = v
    return out


# instance helpers ----------------------------------------------------------

def _probe_vector(voa):
    """A low-weight state used as insertion: the grade-1 generator if any, else omega."""
    V = voa.V
    if V.basis(1):
        return {V.basis(1)[0]: ONE}
    return dict(voa.omega)


def _module(voa):
    """A non-vacuum module of the instance."""
    if isinstance(voa, voamod.LatticeVOA):
        return voa.sector(1)
    if isinstance(voa, voamod.HeisenbergVOA):
        return voa.fock(Fraction(1, 2))
    return voa.verma(Fraction(1, 16))


def check_lemma_u1_omega(voa):
    V = voa.V
    res = CheckResult("u1_omega", "U(1) omega = lam^2 (omega - c/24 vacuum)", True)
    lhs = apply_u1(V, voa.omega)
    rhs = vadd({s: LAM ** 2 * c for s, c in voa.omega.items()}, voa.vacuum(), -(LAM ** 2) * mpq(V.c) / 24)
    res.compared = 1
    if lhs != rhs:
        res.passed = False
        res.first_mismatch = {"lhs": str(lhs), "rhs": str(rhs)}
    return res


def check_derivation_coeffs():
    """(1/lam) log(1 + lam y) = exp(sum c_j y^{j+1} d/dy) y with c_1 = -lam/2, c_2 = lam^2/12."""
    res = CheckResult("derivation_coeffs", "exponential-derivation coefficients of the log coordinate", True)
    f = log1p_series("y", LAM, 6)
    c = exp_derivation_coeffs(f, 2)
    want = [-LAM / 2, LAM ** 2 / 12]
    res.compared = 2
    res.details["coeffs"] = [str(x) for x in c]
    if list(c)[:2] != want:
        res.passed = False
        res.first_mismatch = {"got": [str(x) for x in c], "want": [str(x) for x in want]}
    return res


def _wrap(name, anchor, fn, **orders):
    """Turn a function that returns or raises into a CheckResult."""
    res = CheckResult(name, anchor, True, orders)
    try:
        out = fn()
        res.compared = 1
        if out is False:
            res.passed = False
        elif out not in (True, None):
            res.details["result"] = str(out)
    except (ArithmeticError, ValueError) as exc:
        res.passed = False
        res.first_mismatch = {"error": str(exc)}
    return res


# sections ------------------------------------------------------------------

def section1(voa, cfg):
    V = voa.V
    Y = voa.vertex_map(V)
    u = _probe_vector(voa)
    c = min(cfg.G, 5)
    out = [check_derivation_coeffs(), check_lemma_u1_omega(voa), check_u1_conjugation(V, c)]
    out.append(check_chg_var(Y, voa.omega, c, c))
    out.append(check_x_comm(voa, Y, u, u, (cfg.N_x, cfg.N_x), 3))
    out.append(check_l1_derivative_op(Y, voa.omega, c, c))
    W = _module(voa)
    out.append(check_chg_var(voa.vertex_map(W), u, min(c, 4), min(c, 4)))
    return out


def section2(voa, cfg):
    Y = voa.vertex_map(voa.V)
    u = voa.omega
    w = _probe_vector(voa)
    o = (cfg.N_q, cfg.N_x)
    out = []
    for n in (1, 2):
        out.append(trace.check_identity0(voa, u, [Y] * n, [w] * n, o))
        out.append(trace.check_identity05(voa, u, [Y] * n, [w] * n, o))
    for j in (1, 2):
        out.append(trace.check_identity1(voa, u, j, [Y, Y], [w, w], (cfg.N_q, cfg.N_x, cfg.N_y)))
    return out


def section3(voa, cfg):
    Y = voa.vertex_map(voa.V)
    w = _probe_vector(voa)
    o = (cfg.N_q, cfg.N_x)
    o2 = (min(cfg.N_q, 3), min(cfg.N_x, 3))
    out = []
    for j in (1, 2):
        out.append(trace.check_identity2(voa, w, 2, j, [Y, Y], [w, w], o))
    out.append(trace.check_identity2(voa, voa.omega, 1, 1, [Y, Y], [w, w], o2))
    out.append(trace.check_mod_inv_der(voa, 1, [Y, Y], [w, w], o2))
    out.append(trace.check_l1_derivative_trace(voa, 1, [Y, Y], [w, w], o2))
    return out


def section4(voa, cfg):
    out = [_wrap("cubic_relation", "cubic relation for wp~_2", lambda: cubic_residual(10, 8).is_zero(),
                 N_y=10, N_q=8)]
    for k in (4, 5, 6):
        out.append(_wrap("eisenstein_reduce_%d" % (2 * k), "G~_%d as a polynomial in G~_4, G~_6" % (2 * k),
                         lambda k=k: eisenstein_reduce(k, 12), N_q=12))
    for m in (4, 5, 6):
        out.append(_wrap("reduce_wp%d" % m, "wp~_%d in the ring R" % m, lambda m=m: reduce_to_R(m, (10, 8)),
                         N_y=10, N_q=8))
    return out


def section5(voa, cfg):
    Y = voa.vertex_map(voa.V)
    w = _probe_vector(voa)
    out = [trace.check_cyclicity([Y, Y], [w, w], (min(cfg.N_q, 3), min(cfg.N_x, 2)))]
    W = _module(voa)
    N = min(cfg.N_q, 6)
    for vec in (voa.vacuum(), voa.omega):
        res = CheckResult("trace_oracle", "trace coefficients against a direct sum over states", True, {"N_q": N})
        try:
            T = trace.TraceSeries(trace.make_chain([voa.vertex_map(W)], [vec]))
            direct = trace.direct_one_point(voa, W, vec, N)
            for m in range(N + 1):
                res.compared += 1
                got = T.coeff(m, (0,))
                if got != direct[m]:
                    res.passed = False
                    res.first_mismatch = {"at": m, "trace": str(got), "direct": str(direct[m])}
                    break
        except trace.Truncated as exc:
            res.passed = False
            res.truncated = True
            res.first_mismatch = {"truncated": str(exc)}
        out.append(res)
    return out


def section6(voa, cfg):
    M = cfg.zhu_cutoff
    q = zhu.a_tilde(voa, M)
    out = [zhu.check_associativity(voa, q), zhu.commutator_check(voa, q), zhu.centrality_check(voa, q),
           zhu.l1_check(voa, q), zhu.iso_check(voa, M, qt=q)]
    rank = zhu.omega_powers_rank(voa, q, 3)
    r = CheckResult("omega_powers", "[omega]^k linearly independent", True, {"cutoff": M},
                    compared=1, details={"rank": rank, "expected": min(3, M // 2) + 1})
    if isinstance(voa, voamod.VirasoroVOA) and rank != min(3, M // 2) + 1:
        r.passed = False
        r.first_mismatch = {"rank": rank}
    out.append(r)
    st = zhu.stabilization(voa, M)
    s = CheckResult("stabilization", "quotient dimension across cutoffs", True, {"cutoff": M}, compared=1,
                    details=st)
    s.details["note"] = "informational; the universal Virasoro quotient grows with the cutoff"
    out.append(s)
    W = _module(voa)
    out.append(zhu.check_rho_w(voa, W, zhu.a_tilde(voa, min(M, 3))))
    return out


def section7(voa, cfg):
    V = voa.V
    Y = voa.vertex_map(V)
    N = 6
    out = [trace.check_ode_n1(voa, voa.vacuum(), Y, N), trace.check_ode_n1(voa, voa.omega, Y, N)]
    S = (0, -1, 1, 0)
    tol = cfg.tol
    for obj in ("g4", "g6", "g2"):
        out.append(modular.check_mod_transform(obj, S, [0.1 + 1.3j], tol, N_q=60))
    out.append(modular.check_mod_transform("wp:2", S, [(0.3, 1.4j)], max(tol, 1e-6)))
    for m in (1, 2):
        out.append(modular.check_wp_P_link(m, [(0.2, 1.4j)], max(tol, 1e-7)))
    lat = voa if isinstance(voa, voamod.LatticeVOA) else voamod.build_lattice(1, 4)
    for g in ((0, -1, 1, 0), (1, 1, 0, 1)):
        out.append(modular.check_s_closure_characters(lat, g, tol=max(tol, 1e-6)))
    return out


SECTION_FUNCS = {"section%d" % i: f for i, f in
                 enumerate((section1, section2, section3, section4, section5, section6, section7), 1)}


def run_suite(cfg, voa=None):
    """Returns (report dict, timings dict).  The report is deterministic."""
    voa = voa or voamod.build(cfg.voa, cfg.G)
    checks = []
    warnings = []
    timings = {}
    for name in cfg.suite_names():
        t0 = time.perf_counter()
        try:
            results = SECTION_FUNCS[name](voa, cfg)
        except Exception as exc:  # collected, not fatal
            r = CheckResult(name, SUITES[name], False, first_mismatch={"error": "%s: %s" % (type(exc).__name__, exc)})
            results = [r]
        timings[name] = round(time.perf_counter() - t0, 3)
        for r in results:
            d = r.to_json()
            d["suite"] = name
            checks.append(d)
            if r.truncated:
                warnings.append("%s/%s: coefficients beyond the module cutoff were skipped (%s)"
                                % (name, r.name, r.details.get("skipped_truncated", "truncated")))
    passed = sum(c["status"] == "pass" for c in checks)
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.as_dict(),
        "checks": checks,
        "warnings": warnings,
        "summary": {"total": len(checks), "passed": passed, "failed": len(checks) - passed,
                    "all_passed": passed == len(checks)},
    }
    return report, timings
