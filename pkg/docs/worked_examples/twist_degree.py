"""Exponential twisting of Higgs bundles and the degree formula.

On the Kummer chart the Higgs field theta e1 = t^-1 e0 twisted by the
standard lifting F(t) = t^5 gives back nabla e1 = e0 dt/t.

On the projective line the twisted bundle has transition F#(M) up to an
exponential factor with determinant 1. So its degree is p times the
degree of the Higgs bundle.
"""

from pathlib import Path

from mfhiggs import HiggsChart, determinant_formula_check, inverse_cartier_exponential_twisting, load
from mfhiggs.fixture import load_liftings

ROOT = Path(__file__).resolve().parents[2]
FIX = ROOT / "fixtures"

kummer = load(FIX / "kummer_p5.json").chart()
higgs = HiggsChart(kummer.ring.mod_p(), (0, 1), [["0", "t^-1"], ["0", "0"]], name="U")
tw = inverse_cartier_exponential_twisting(higgs, ["t^5"])
print("twisted connection:", [[x.render() for x in row] for row in tw.connections["U"][0]])
print("Kummer connection mod 5:", [[x.render() for x in row] for row in kummer.mod_p_connection()[0]])

lifts = load_liftings(FIX / "liftings" / "p1_standard.json")
for name in ("p1_line_deg1", "p1_line_degm2", "p1_higgs_deg2", "p1_higgs_degm4"):
    rep, data = determinant_formula_check(load(FIX / f"{name}.json").glued, lifts)
    print(f"{name:16s} deg {data['deg_det_G']:3d} -> {data['deg_det_twisted']:4d}"
          f"  slope {data['slope_G']} -> {data['slope_twisted']}  {'ok' if rep.passed else 'FAILED'}")
