"""Builders for the shipped fixture corpus.

Every fixture is synthetic data that the validator certifies.  Running
``python -m mfhiggs.corpus DIR`` rewrites the corpus under DIR from these
builders, so the JSON files and the code can never drift apart.
"""

import json
import os
import sys

from .fixture import FORMAT, LIFTINGS_FORMAT, chart_dict, overlap_dict
from .glue import Overlap
from .mfdata import (
    FilteredDeRhamChart,
    FrobeniusLifting,
    HiggsChart,
    build_sum,
    build_sym2,
    build_tensor,
    transport_frobenius,
)
from .poly import ChartRing


def kummer(p=5, m=2, inverted=("t",), denominators=(), lifting=None, name="U"):
    """rank 2, e_1 at level 1, nabla e_1 = e_0 dt/t, Phi = diag(1, p)."""
    r = ChartRing(p, m, ("t",), inverted, denominators)
    c = FilteredDeRhamChart(r, (0, 1), [["0", "t^-1"], ["0", "0"]], [f"t^{p}"],
                            [["1", "0"], ["0", str(p)]], name=name)
    if lifting is not None:
        c = transport_frobenius(c, FrobeniusLifting(r, lifting))
    return c


def unit_root(p=5, m=2, lifting=None, name="U"):
    r = ChartRing(p, m, ("t",))
    return FilteredDeRhamChart(r, (0,), [["0"]], [lifting or f"t^{p}"], [["1"]], name=name)


def tate(p=5, m=2, inverted=(), name="U"):
    r = ChartRing(p, m, ("t",), inverted)
    return FilteredDeRhamChart(r, (1,), [["0"]], [f"t^{p}"], [[str(p)]], name=name)


def kummer_dim2(p=5, m=2, name="U"):
    """A_k = N dt_k / t_k on Z/p^m[t1^+-1, t2^+-1]; integrable and horizontal."""
    r = ChartRing(p, m, ("t1", "t2"), ("t1", "t2"))
    A = ([["0", "t1^-1"], ["0", "0"]], [["0", "t2^-1"], ["0", "0"]])
    return FilteredDeRhamChart(r, (0, 1), A, [f"t1^{p}", f"t2^{p}"], [["1", "0"], ["0", str(p)]],
                               name=name)


def sym2_kummer(p=5, m=3, name="U"):
    return build_sym2(kummer(p, m, name=name), name=name)


def _doc(fid, charts, description, n=None, overlaps=(), submodules=None, liftings=None,
         violates=None, cover=None):
    first = charts[0]
    if isinstance(first, HiggsChart):
        p, m = first.ring.p, 1
    else:
        p, m = first.ring.p, first.ring.m
    out = {"format": FORMAT, "id": fid, "p": p, "m": m,
           "n": n if n is not None else max(getattr(c, "n", 0) for c in charts),
           "charts": [chart_dict(c) for c in charts],
           "overlaps": [overlap_dict(ov) for ov in overlaps]}
    if cover:
        out["cover"] = cover
    out["description"] = description
    if violates:
        out["violates"] = violates
    if submodules:
        out["submodules"] = submodules
    if liftings:
        out["liftings"] = liftings
    return out


def _sub(rank, gens, space=None):
    out = {"ambient_rank": rank, "generators": gens}
    if space:
        out["space"] = space
    return out


KUMMER_SUBS = {
    "G0": _sub(2, [["1", "0"]]),
    "E": _sub(2, [["1", "0"], ["0", "1"]]),
    "G1": _sub(2, [["0", "1"]]),
    "Gng": _sub(2, [["1", "t - 1"], ["t - 1", "0"]]),
    "W0": _sub(2, [["1", "0"]], "derham"),
    "W1": _sub(2, [["0", "1"]], "derham"),
}


def positive():
    docs = {}
    docs["unit_root"] = _doc("unit_root", [unit_root()],
                             "rank 1, weight 0, trivial connection, Phi = 1",
                             submodules={"E": _sub(1, [["1"]]), "Z": _sub(1, [])})
    docs["tate"] = _doc("tate", [tate()], "rank 1 at level 1, Phi = p",
                        submodules={"E": _sub(1, [["1"]])})
    docs["kummer_p5"] = _doc("kummer_p5", [kummer()],
                             "p = 5: nabla e1 = e0 dt/t, Phi = diag(1, 5), F(t) = t^5",
                             submodules=KUMMER_SUBS,
                             liftings={"alt": {"U": ["t^5 + 5*t^6"]}})
    docs["kummer_p7"] = _doc("kummer_p7", [kummer(7)],
                             "p = 7 analogue of kummer_p5",
                             submodules={k: v for k, v in KUMMER_SUBS.items()},
                             liftings={"alt": {"U": ["t^7 + 7*t^8"]}})
    docs["sym2_p5"] = _doc("sym2_p5", [sym2_kummer()],
                           "second symmetric power of the p = 5 Kummer object, basis e1^2, e1e0, e0^2",
                           submodules={
                               "G00": _sub(3, [["0", "0", "1"]]),
                               "Glow": _sub(3, [["0", "0", "1"], ["0", "1", "0"]]),
                               "E": _sub(3, [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]),
                               "Gmix": _sub(3, [["1", "t - 1", "0"], ["t - 1", "0", "0"]]),
                           },
                           liftings={"alt": {"U": ["t^5 + 5*t^6 + 25*t^2"]}})
    docs["dim2"] = _doc("dim2", [kummer_dim2()],
                        "two variables: A_k = N dt_k / t_k, Phi = diag(1, 5)",
                        liftings={"alt": {"U": ["t1^5 + 5*t1^6", "t2^5 + 5*t1*t2"]}})
    docs["kummer_cover_p5"] = kummer_cover()
    k3 = kummer(5, 3)
    docs["kummer_sum_p5"] = _doc("kummer_sum_p5", [build_sum(k3, tate(5, 3, ("t",)), name="U")],
                                 "direct sum of the Kummer object and Tate at m = 3",
                                 submodules={"G0": _sub(3, [["1", "0", "0"]]),
                                             "G0T": _sub(3, [["1", "0", "0"], ["0", "0", "1"]])})
    docs["kummer_tensor_p5"] = _doc("kummer_tensor_p5", [build_tensor(k3, k3, name="U")],
                                    "tensor square of the Kummer object, basis e_i (x) e_j at 2i + j",
                                    submodules={"G00": _sub(4, [["1", "0", "0", "0"]])})
    return docs


def kummer_cover(corrupt=False):
    u = kummer(denominators=("t - 1",), name="U")
    v = kummer(denominators=("t + 1",), lifting=["t^5 + 5*t^6"], name="V")
    ring = ChartRing(5, 2, ("t",), ("t",), ("t - 1", "t + 1"))
    T = [["1", "0"], ["0", "2"]] if corrupt else [["1", "0"], ["0", "1"]]
    ov = Overlap(("U", "V"), ring, None, T)
    fid = "kummer_cover_corrupted" if corrupt else "kummer_cover_p5"
    desc = ("Kummer object on two charts inverting t - 1 and t + 1 with different liftings"
            + ("; the transition rescales e1 by 2, which the connection does not allow" if corrupt else ""))
    return _doc(fid, [u, v], desc, overlaps=[ov],
                submodules={"G0": KUMMER_SUBS["G0"], "E": KUMMER_SUBS["E"]},
                violates="connection_compatible" if corrupt else None)


def negative():
    docs = {}
    k = kummer()
    docs["kummer_bad_phi"] = _doc("kummer_bad_phi", [k.replace(Phi=[["1", "0"], ["0", "1"]])],
                                  "Kummer object with Phi = identity", violates="divisibility")
    docs["tate_bad_phi"] = _doc("tate_bad_phi", [tate().replace(Phi=[["1"]])],
                                "Tate object with Phi = 1", violates="divisibility")
    r3 = ChartRing(5, 3, ("t",), ("t",))
    docs["bad_griffiths"] = _doc(
        "bad_griffiths",
        [FilteredDeRhamChart(r3, (0, 2), [["0", "25*t^-1"], ["0", "0"]], ["t^5"],
                             [["1", "0"], ["0", "25"]], name="U")],
        "connection jumps two filtration steps", violates="griffiths_transversality")
    r2 = ChartRing(5, 2, ("t1", "t2"))
    docs["bad_integrability"] = _doc(
        "bad_integrability",
        [FilteredDeRhamChart(r2, (0, 1), ([["0", "5"], ["0", "0"]], [["0", "5*t1"], ["0", "0"]]),
                             ["t1^5", "t2^5"], [["1", "0"], ["0", "5"]], name="U")],
        "curvature 5 N dt1 dt2", violates="integrability")
    docs["bad_horizontality"] = _doc("bad_horizontality", [k.replace(Phi=[["1", "0"], ["0", "10"]])],
                                     "Kummer object with Phi = diag(1, 10)", violates="horizontality")
    docs["bad_strong_divisibility"] = _doc(
        "bad_strong_divisibility",
        [FilteredDeRhamChart(r3, (0, 1), [["0", "0"], ["0", "0"]], ["t^5"],
                             [["1", "0"], ["0", "25"]], name="U")],
        "Phi/p loses rank mod p", violates="strong_divisibility")
    docs["bad_lifting"] = _doc("bad_lifting", [unit_root(lifting="t^5 + t^6")],
                               "F(t) = t^5 + t^6 is not a Frobenius lifting", violates="frobenius_lifting")
    docs["kummer_cover_corrupted"] = kummer_cover(corrupt=True)
    return docs


# ---------------------------------------------------------------------------
# Higgs data on the projective line and elsewhere

def p1_higgs(p=5, twist=0, theta=True, M=None, fid=None, description=""):
    """E = O(1) + O(-1) with theta: e_1 -> e_0 dt, twisted by O(twist).

    Charts U = F_p[t], V = F_p[s], s = 1/t.  The transition x_V = M x_U
    uses the convention that t^-1 describes O(1).
    """
    ru = ChartRing(p, 1, ("t",))
    rv = ChartRing(p, 1, ("s",))
    ro = ChartRing(p, 1, ("t",), ("t",))
    if M is None:
        M = [[f"t^{-1 - twist}", "0"], ["0", f"t^{1 - twist}"]]
    rank = len(M)
    if theta:
        tu, tv = [["0", "1"], ["0", "0"]], [["0", "-1"], ["0", "0"]]
        levels = (0, 1)
    else:
        tu = tv = [["0"] * rank for _ in range(rank)]
        levels = (0,) * rank
    u = HiggsChart(ru, levels, tu, name="U")
    v = HiggsChart(rv, levels, tv, name="V")
    ov = Overlap(("U", "V"), ro, "t^-1", M)
    return _doc(fid, [u, v], description, n=max(levels), overlaps=[ov], cover="projective-line")


def higgs_docs():
    docs = {}
    docs["p1_line_deg1"] = p1_higgs(M=[["t^-1"]], theta=False, fid="p1_line_deg1",
                                    description="O(1) on the projective line, theta = 0")
    docs["p1_line_degm2"] = p1_higgs(M=[["t^2"]], theta=False, fid="p1_line_degm2",
                                     description="O(-2) on the projective line, theta = 0")
    docs["p1_rank2_degm2"] = p1_higgs(M=[["t", "0"], ["0", "t"]], theta=False, fid="p1_rank2_degm2",
                                      description="O(-1) + O(-1), theta = 0, det transition t^2")
    docs["p1_higgs_deg0"] = p1_higgs(fid="p1_higgs_deg0",
                                     description="O(1) + O(-1) with the nonzero Higgs field e1 -> e0 dt")
    docs["p1_higgs_deg2"] = p1_higgs(twist=1, fid="p1_higgs_deg2",
                                     description="(O(1) + O(-1)) twisted by O(1), with Higgs field")
    docs["p1_higgs_degm4"] = p1_higgs(twist=-2, fid="p1_higgs_degm4",
                                      description="(O(1) + O(-1)) twisted by O(-2), with Higgs field")
    r = ChartRing(5, 1, ("t",), ("t",))
    u = HiggsChart(r, (0, 1), [["0", "t^-1"], ["0", "0"]], name="U")
    v = HiggsChart(r, (0, 1), [["0", "t^-1"], ["0", "0"]], name="V")
    ov = Overlap(("U", "V"), r, None, [["1", "0"], ["0", "1"]])
    docs["kummer_higgs_cover"] = _doc("kummer_higgs_cover", [u, v],
                                      "graded Kummer Higgs bundle on two copies of G_m, identity gluing",
                                      n=1, overlaps=[ov])
    return docs


def lifting_docs():
    def lf(d):
        return {"format": LIFTINGS_FORMAT, "liftings": d}
    return {
        "p1_standard": lf({"U": ["t^5"], "V": ["s^5"]}),
        "p1_skew": lf({"U": ["t^5 + 5*t^2"], "V": ["s^5 + 5*s^6"]}),
        "kummer_p5": lf({"U": ["t^5"]}),
        "kummer_cover": lf({"U": ["t^5"], "V": ["t^5 + 5*t^6"]}),
    }


def write(root):
    def put(path, doc):
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(json.dumps(doc, indent=2) + "\n")

    for name, doc in positive().items():
        put(os.path.join(root, f"{name}.json"), doc)
    for name, doc in higgs_docs().items():
        put(os.path.join(root, f"{name}.json"), doc)
    for name, doc in negative().items():
        put(os.path.join(root, "negative", f"{name}.json"), doc)
    for name, doc in lifting_docs().items():
        put(os.path.join(root, "liftings", f"{name}.json"), doc)


if __name__ == "__main__":
    write(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
