"""Symmetric square of the Kummer module and its associated submodules.

Sym2 has basis e1^2, e1 e0, e0^2 with filtration levels 2, 1, 0. The Higgs
field moves each level down by one, so G00 = <e0^2> and
Glow = <e0^2, e1 e0> are theta-stable. Each one gives a horizontal
submodule S, and descending S recovers G.
"""

from pathlib import Path

from mfhiggs import associate_subsheaf, gr_fil, load, roundtrip_check

ROOT = Path(__file__).resolve().parents[2]

doc = load(ROOT / "fixtures" / "sym2_p5.json")
chart = doc.chart()
theta = gr_fil(chart).theta
for name in ("G00", "Glow", "E", "Gmix"):
    G = doc.submodule(name)["U"]
    if not G.is_theta_stable(theta):
        print(f"{name}: not theta-stable, nothing to associate")
        continue
    cert = associate_subsheaf(chart, G)
    line = f"{name}: S = {cert.S.render()}, certificate {'ok' if cert.verify() else 'BROKEN'}"
    if G.is_subsystem_of_hodge(chart.fil):
        rep, back = roundtrip_check(chart, G)
        line += f", round trip {'ok' if rep.passed else 'failed'}"
    print(line)
