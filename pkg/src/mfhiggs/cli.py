"""Command-line entry point.

Every command loads one fixture, runs engine checks, prints a text report and
optionally writes the JSON report given by ``--json``.  Exit status is 0 when
all checks pass, 1 when a mathematical check fails and 2 on bad input.
"""

import argparse
import random
import sys
import time

from . import linalg as la
from .associate import (
    associate_subsheaf,
    change_of_frobenius_residual,
    glue_associated,
    phi_tilde,
)
from .descent import (
    cartier_katz_descent,
    conjugate_filtration,
    determinant_formula_check,
    inverse_cartier_exponential_twisting,
    p_curvature,
    filtration_identity,
    roundtrip_check,
)
from .errors import (
    DegreeBoundExceeded,
    DescentFailure,
    GluingMismatch,
    HorizontalityViolation,
    MFError,
    NilpotencyTooDeep,
    NotAUnit,
    NotHorizontal,
    NotPCurvatureZero,
    StrongDivisibilityFailure,
    ThetaUnstable,
)
from .fixture import FixtureError, load, load_liftings
from .mfdata import FilteredDeRhamChart, FrobeniusLifting, gr_fil, transport_frobenius, validate
from .report import ERROR, FAIL, Report

# engine errors that mean "the mathematics says no" rather than "bad input"
MATH_ERRORS = (ThetaUnstable, GluingMismatch, HorizontalityViolation, NotHorizontal,
               DescentFailure, NotPCurvatureZero, DegreeBoundExceeded, NilpotencyTooDeep,
               StrongDivisibilityFailure)


class UsageError(Exception):
    pass


def _fail(report, name, exc):
    witness = {"error": type(exc).__name__, "message": str(exc)}
    forms = getattr(exc, "forms", None)
    if forms:
        witness["forms"] = {k: v for k, v in forms.items()}
    report.add(name, False, witness, status=FAIL)


def _render(M):
    return [[x.render() for x in row] for row in M]


def _prefix(doc, cid):
    return f"{cid}:" if len(doc.charts) > 1 else ""


def _mf_charts(doc, chart_id=None):
    if doc.kind != "mf":
        raise UsageError("this command needs a filtered de Rham fixture, not a Higgs one")
    if chart_id is not None:
        if chart_id not in doc.charts:
            raise UsageError(f"unknown chart {chart_id!r}")
        return {chart_id: doc.charts[chart_id]}
    return doc.charts


def _gate(doc, rep, charts):
    """Record failing axioms; the engine commands need valid charts."""
    ok = True
    for cid, chart in charts.items():
        checks = validate(chart)
        if not checks.passed:
            ok = False
            for c in checks:
                if not c.ok:
                    rep.add(f"{cid}:{c.check}", False, c.witness, status=c.status)
    return ok


def _one_variable(chart):
    if chart.ring.dim != 1:
        raise UsageError("submodule commands need one-variable charts")


# ---------------------------------------------------------------------------
# seeded random data

def random_lifting(rng, ring, degree=5):
    """F'(t_l) = t_l^p + p*g_l with random g_l of total degree <= degree."""
    p = ring.p
    images = []
    for l in range(ring.dim):
        g = ring.zero
        for _ in range(degree + 1):
            exps = [0] * ring.dim
            budget = rng.randint(0, degree)
            for k in range(ring.dim):
                take = rng.randint(0, budget)
                exps[k] += take
                budget -= take
            g = g + ring.monomial(tuple(exps), rng.randrange(p ** (ring.m - 1)))
        exps = [0] * ring.dim
        exps[l] = p
        images.append(ring.monomial(tuple(exps)) + ring.const(p) * g)
    return FrobeniusLifting(ring, images)


def random_section(rng, ring, rank, degree=3):
    out = []
    for _ in range(rank):
        x = ring.zero
        for e in range(degree + 1):
            exps = tuple(rng.randint(0, e) for _ in range(ring.dim))
            x = x + ring.monomial(exps, rng.randrange(ring.p))
        out.append(x)
    return out


# ---------------------------------------------------------------------------
# commands

def cmd_validate(doc, args, rep):
    for cid, chart in doc.charts.items():
        pre = _prefix(doc, cid)
        checks = validate(chart) if isinstance(chart, FilteredDeRhamChart) else chart.validate()
        rep.extend(checks, pre)
    if doc.glued.overlaps:
        rep.extend(doc.glued.validate())


def cmd_grade(doc, args, rep):
    graded = {}
    if not _gate(doc, rep, _mf_charts(doc)):
        return
    for cid, chart in _mf_charts(doc).items():
        h = gr_fil(chart)
        rep.extend(h.validate(), _prefix(doc, cid))
        graded[cid] = {"levels": list(h.levels), "theta": [_render(T) for T in h.theta]}
    rep.data["graded"] = graded


def _liftings_from_text(chart, text):
    parts = [s.strip() for s in text.split(";")] if ";" in text else [text]
    if len(parts) != chart.ring.dim:
        raise UsageError(f"need {chart.ring.dim} lifting images separated by ';'")
    return FrobeniusLifting(chart.ring, parts)


def cmd_associate(doc, args, rep):
    charts = _mf_charts(doc, args.chart)
    if doc.glued.overlaps and args.chart is None:
        glue = doc.glued.validate()
        rep.extend(glue)
        if not glue.passed:
            return
    if not _gate(doc, rep, charts):
        return
    subs = doc.submodule(args.sub)
    results = {}
    used = {}
    for cid, chart in charts.items():
        _one_variable(chart)
        pre = _prefix(doc, cid)
        if cid not in subs:
            raise UsageError(f"submodule {args.sub!r} has no generators on chart {cid!r}")
        G = subs[cid]
        if args.lifting:
            chart = transport_frobenius(chart, _liftings_from_text(chart, args.lifting))
            rep.add(pre + "transported_chart_valid", validate(chart).passed)
        used[cid] = chart
        compare = _liftings_from_text(chart, args.compare_lifting) if args.compare_lifting else None
        try:
            cert = associate_subsheaf(chart, G, compare=compare, saturate=args.saturate)
        except MATH_ERRORS as exc:
            _fail(rep, pre + "associate", exc)
            continue
        rep.add(pre + "theta_stable", True)
        rep.add(pre + "horizontality", True, None)
        rep.add(pre + "connection_stability", True)
        rep.add(pre + "certificate_verified", cert.verify())
        entry = {"lifting": chart.F.render(), "G": G.render(), "S": cert.S.render(),
                 "S_rank": cert.S.rank}
        if compare is not None:
            ind = cert.independence
            rep.add(pre + "lifting_independence", ind["equal"],
                    None if ind["equal"] else {k: v for k, v in ind.items() if k != "equal"})
            entry["compare_lifting"] = ind["lifting"]
            entry["S_compare"] = ind["other_normal_form"]
            ring0 = chart.ring.mod_p()
            sections = [list(g) for g in G.generators]
            sections += [[ring0.one if b == a else ring0.zero for b in range(chart.rank)]
                         for a in range(chart.rank)]
            bad = None
            for k, e in enumerate(sections):
                diff, corr = change_of_frobenius_residual(chart, e, compare)
                if diff != corr:
                    bad = {"section": [x.render() for x in e],
                           "difference": [x.render() for x in diff],
                           "correction": [x.render() for x in corr]}
                    break
            rep.add(pre + "residual_identity", bad is None, bad)
        results[cid] = entry
    rep.data["associated"] = results
    if len(used) > 1 and len(results) == len(used):
        glued = doc.glued
        if args.lifting:
            glued = type(glued)(used, glued.overlaps, glued.cover)
        try:
            out = glue_associated(glued, {cid: subs[cid] for cid in used}, saturate=args.saturate)
        except GluingMismatch as exc:
            _fail(rep, "gluing", exc)
            return
        for entry in out["overlaps"]:
            u, v = entry["overlap"]
            rep.add(f"gluing[{u}|{v}]", entry["equal"])


def cmd_pcurv(doc, args, rep):
    rng = random.Random(args.seed)
    out = {}
    if doc.kind == "mf" and not _gate(doc, rep, doc.charts):
        return
    for cid, chart in doc.charts.items():
        pre = _prefix(doc, cid)
        if isinstance(chart, FilteredDeRhamChart):
            pc = p_curvature(chart)
            n = chart.n
        else:
            tw = inverse_cartier_exponential_twisting(chart, [f"{v}^{chart.ring.p}" for v in chart.ring.vars])
            pc = p_curvature(tw.connections[chart.name])
            n = max(chart.levels)
        ring = pc.ring
        ok = True
        for _ in range(args.samples):
            f = random_section(rng, ring, 1)[0]
            v = random_section(rng, ring, len(pc.A[0]))
            for l in range(ring.dim):
                ok = ok and pc.linearity_holds(f, v, l)
        rep.add(pre + "psi_linear", ok)
        rep.add(pre + "psi_commute", pc.commute())
        rep.add(pre + f"psi_nilpotent_order_{n + 1}", pc.nilpotent(n + 1))
        out[cid] = {"psi": [_render(M) for M in pc.psi], "zero": pc.is_zero()}
    rep.data["p_curvature"] = out


def _derham_or_associated(doc, name, cid, chart):
    G = doc.submodule(name)[cid]
    if doc.spaces.get(name, "higgs") == "derham":
        return G, None
    return associate_subsheaf(chart, G).S, G


def cmd_descend(doc, args, rep):
    out = {}
    if not _gate(doc, rep, _mf_charts(doc, args.chart)):
        return
    for cid, chart in _mf_charts(doc, args.chart).items():
        _one_variable(chart)
        pre = _prefix(doc, cid)
        fcon = conjugate_filtration(chart)
        rep.add(pre + "conjugate_filtration_horizontal", all(fcon.horizontal),
                {"horizontal": fcon.horizontal})
        try:
            W, G = _derham_or_associated(doc, args.sub, cid, chart)
            back = cartier_katz_descent(chart, W, args.degree_bound)
        except MATH_ERRORS as exc:
            _fail(rep, pre + "descend", exc)
            continue
        rep.add(pre + "descended", True)
        S = associate_subsheaf(chart, back).S
        rep.add(pre + "reassociates", S.equals(W), None if S.equals(W) else {"S": S.render(), "W": W.render()})
        if G is not None:
            rep.add(pre + "recovers_input", back.equals(G))
        out[cid] = {"W": W.render(), "descended": back.render(),
                    "conjugate_ranks": fcon.ranks()}
    rep.data["descent"] = out


def cmd_roundtrip(doc, args, rep):
    out = {}
    if not _gate(doc, rep, _mf_charts(doc, args.chart)):
        return
    for cid, chart in _mf_charts(doc, args.chart).items():
        _one_variable(chart)
        pre = _prefix(doc, cid)
        G = doc.submodule(args.sub)[cid]
        try:
            checks, back = roundtrip_check(chart, G)
            rep.extend(checks, pre)
            if back is not None:
                rep.add(pre + "filtration_identity", all(filtration_identity(chart, G)))
        except MATH_ERRORS as exc:
            _fail(rep, pre + "roundtrip", exc)
            continue
        out[cid] = {"G": G.render(), "descended": None if back is None else back.render()}
    rep.data["roundtrip"] = out


def _read_liftings(doc, args):
    if args.liftings is None:
        return None
    if ":" in args.liftings and args.liftings.split(":", 1)[0] == "fixture":
        name = args.liftings.split(":", 1)[1]
        if name not in doc.liftings:
            raise UsageError(f"fixture has no lifting named {name!r}")
        return doc.liftings[name]
    return load_liftings(args.liftings)


def cmd_twist(doc, args, rep):
    liftings = _read_liftings(doc, args)
    if doc.kind == "mf":
        _twist_mf(doc, args, rep, liftings)
        return
    if liftings is None:
        raise UsageError("twisting a Higgs fixture needs --liftings")
    try:
        if doc.glued.cover == "projective-line":
            checks, data = determinant_formula_check(doc.glued, liftings)
            rep.extend(checks)
            rep.data["degrees"] = data
            tw = inverse_cartier_exponential_twisting(doc.glued, liftings)
        else:
            tw = inverse_cartier_exponential_twisting(doc.glued, liftings)
            rep.extend(tw.checks)
    except MATH_ERRORS as exc:
        _fail(rep, "twist", exc)
        return
    rep.data["connections"] = {cid: [_render(M) for M in A] for cid, A in tw.connections.items()}
    rep.data["transitions"] = [{"charts": list(t["charts"]), "h": t["h"].render(),
                                "matrix": _render(t["matrix"])} for t in tw.transitions]


def _twist_mf(doc, args, rep, liftings):
    """Grade, twist back and compare with the de Rham connection through Phi~."""
    out = {}
    if not _gate(doc, rep, doc.charts):
        return
    for cid, chart in doc.charts.items():
        pre = _prefix(doc, cid)
        if liftings is not None and cid in liftings:
            chart = transport_frobenius(chart, FrobeniusLifting(chart.ring, liftings[cid]))
        h = gr_fil(chart)
        try:
            tw = inverse_cartier_exponential_twisting(h, {h.name: chart.F})
            pt = phi_tilde(chart)
        except MATH_ERRORS as exc:
            _fail(rep, pre + "twist", exc)
            continue
        rep.extend(tw.checks, pre)
        B = tw.connections[h.name]
        A0 = chart.mod_p_connection()
        ok = True
        for k in range(len(A0)):
            lhs = la.add(la.matmap(lambda x: x.partial(k), pt.matrix), la.mul(A0[k], pt.matrix))
            ok = ok and la.equal(lhs, la.mul(pt.matrix, B[k]))
        rep.add(pre + "phi_tilde_intertwines", ok)
        same = all(la.equal(a, b) for a, b in zip(A0, B))
        out[cid] = {"lifting": chart.F.render(), "twisted": [_render(M) for M in B],
                    "de_rham_mod_p": [_render(M) for M in A0], "identical": same}
    rep.data["twist"] = out


def cmd_degree(doc, args, rep):
    glued = doc.glued
    if glued.cover != "projective-line":
        raise UsageError("degree needs a fixture with \"cover\": \"projective-line\"")
    rep.extend(glued.validate())
    try:
        deg = glued.degree()
    except NotAUnit as exc:
        _fail(rep, "degree", exc)
        return
    rep.data["degree"] = deg
    rep.data["rank"] = glued.rank
    rep.data["slope"] = str(glued.slope())
    liftings = _read_liftings(doc, args)
    if liftings is not None and doc.kind == "higgs":
        try:
            checks, data = determinant_formula_check(glued, liftings)
        except MATH_ERRORS as exc:
            _fail(rep, "twisted_degree", exc)
            return
        rep.extend(checks)
        rep.data.update({k: v for k, v in data.items() if k != "p"})


COMMANDS = {
    "validate": (cmd_validate, "check the axioms of every chart and overlap"),
    "grade": (cmd_grade, "associated graded Higgs module of each chart"),
    "associate": (cmd_associate, "de Rham subsheaf attached to a theta-stable submodule"),
    "pcurv": (cmd_pcurv, "p-curvature of the mod-p connection"),
    "descend": (cmd_descend, "Cartier-Katz descent of a horizontal submodule"),
    "roundtrip": (cmd_roundtrip, "associate then descend a subsystem of Hodge bundles"),
    "twist": (cmd_twist, "inverse Cartier transform by exponential twisting"),
    "degree": (cmd_degree, "degree and slope on a projective-line cover"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the machine-readable report here")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="accepted for compatibility; runs serially")

    parser = argparse.ArgumentParser(prog="mfhiggs",
                                     description="Exact checks for filtered de Rham and Higgs data.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.add_argument("fixture")
        if name in ("associate", "descend", "roundtrip"):
            p.add_argument("--sub", required=True, help="name of a submodule in the fixture")
            p.add_argument("--chart", help="restrict to one chart")
        if name == "associate":
            p.add_argument("--lifting", help="transport to this Frobenius lifting first")
            p.add_argument("--compare-lifting", help="also compute with this lifting and compare")
            p.add_argument("--saturate", action="store_true")
        if name == "descend":
            p.add_argument("--degree-bound", type=int, default=None)
        if name == "pcurv":
            p.add_argument("--samples", type=int, default=3, help="random sections for the linearity check")
        if name in ("twist", "degree"):
            p.add_argument("--liftings", help="liftings file, or fixture:NAME for a named lifting")
    return parser


def run(argv=None, out=sys.stdout, err=sys.stderr):
    """Run the CLI and return ``(exit_code, report or None)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else 2), None
    start = time.perf_counter()
    try:
        doc = load(args.fixture)
    except FixtureError as exc:
        print(f"error: {exc}", file=err)
        return 2, None
    rep = Report(args.command, doc.id)
    func = COMMANDS[args.command][0]
    try:
        func(doc, args, rep)
    except MATH_ERRORS as exc:
        _fail(rep, args.command, exc)
    except (UsageError, FixtureError) as exc:
        print(f"error: {exc}", file=err)
        return 2, None
    except MFError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return 2, None
    rep.wall_time = time.perf_counter() - start
    print(rep.render_text(), file=out)
    if args.json:
        try:
            with open(args.json, "w") as fh:
                fh.write(rep.to_json() + "\n")
        except OSError as exc:
            print(f"error: cannot write report: {exc.strerror}", file=err)
            return 2, rep
    if any(c.status == ERROR for c in rep.checks) or not rep.passed:
        return 1, rep
    return 0, rep


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
