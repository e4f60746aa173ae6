"""Kummer example at p = 5: validate, move the Frobenius lifting, compare.

The chart has nabla e1 = e0 dt/t, Phi = diag(1, 5) and F(t) = t^5.
Changing the lifting to F'(t) = t^5 + 5 t^6 moves Phi to [[1, 5t], [0, 5]].
By hand: Phi~ sends e1 to e1 under F and to e1 + t e0 under F'.
The difference Phi~_F(e1) - Phi~_F'(e1) = -t e0 must equal the Higgs-field
correction Phi~_F'(theta e1) * z/p with z = F - F' = -5 t^6. Here
theta e1 = t^-1 e0, whose Frobenius image is t^-5 e0, so the correction
is -t^6 * t^-5 e0 = -t e0.

Run with ``python docs/worked_examples/kummer_residual.py``.
"""

from pathlib import Path

from mfhiggs import FrobeniusLifting, load, phi_tilde, residuals, transport_frobenius, validate

ROOT = Path(__file__).resolve().parents[2]

chart = load(ROOT / "fixtures" / "kummer_p5.json").chart()
for check in validate(chart):
    print(f"{check.check:26s} {check.status}")

r0 = chart.ring.mod_p()
e1 = [r0.coerce("0"), r0.coerce("1")]
moved = transport_frobenius(chart, FrobeniusLifting(chart.ring, ["t^5 + 5*t^6"]))
print("Phi under the new lifting:", [[x.render() for x in row] for row in moved.Phi])

before = phi_tilde(chart).apply(e1)
after = phi_tilde(moved).apply(e1)
print("Phi~(e1), old lifting:", [x.render() for x in before])
print("Phi~(e1), new lifting:", [x.render() for x in after])
assert [x.render() for x in after] == ["t", "1"]

diff, correction = residuals(chart, ["t^5 + 5*t^6"], [e1])[0]
print("difference:", [x.render() for x in diff], " Taylor correction:", [x.render() for x in correction])
assert diff == correction
