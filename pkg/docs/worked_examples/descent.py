"""p-curvature and Cartier descent on the Kummer module at p = 5.

The p-curvature is the p-fold iterate of nabla_{d/dt}. Here nabla e1 =
t^-1 e0 and nabla e0 = 0. Iterating on e1 picks up the factor
(-1)(-2)(-3)(-4) = 24 = -1 mod 5 from differentiating t^-1, so
psi(e1) = -t^-5 e0, which equals 4 t^-5 e0 mod 5. psi squares to zero.

The line <e0> is horizontal with zero p-curvature on it, so Cartier
descent finds flat generators.
"""

from pathlib import Path

from mfhiggs import cartier_descend_flat, conjugate_filtration, load, p_curvature

ROOT = Path(__file__).resolve().parents[2]

doc = load(ROOT / "fixtures" / "kummer_p5.json")
chart = doc.chart()
psi = p_curvature(chart)
print("psi_t =", [[x.render() for x in row] for row in psi.psi[0]])
print("psi nilpotent of order 2:", psi.nilpotent(2))

fcon = conjugate_filtration(chart)
for q, piece in enumerate(fcon.steps):
    print(f"F_con^{q} = {piece.render()}  horizontal: {fcon.horizontal[q]}")

W = doc.submodule("W0")["U"]
flat = cartier_descend_flat(chart.mod_p_connection(), W)
print("flat generators of <e0>:", [[x.render() for x in v] for v in flat.roots()])
