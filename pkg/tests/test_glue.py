from fractions import Fraction

import pytest

from conftest import fixture_path
from mfhiggs.errors import InvalidInput
from mfhiggs.fixture import load
from mfhiggs.glue import GluedObject, Overlap
from mfhiggs.mfdata import HiggsChart
from mfhiggs.poly import ChartRing

F5L = ChartRing(5, 1, ("t",), ("t",))


def test_cover_validates():
    rep = load(fixture_path("kummer_cover_p5.json")).glued.validate()
    assert rep.passed
    assert [c.check for c in rep] == ["transition_invertible[U|V]", "connection_compatible[U|V]",
                                      "filtration_compatible[U|V]", "frobenius_compatible[U|V]"]


def test_corrupted_cover_fails_connection_only():
    rep = load(fixture_path("negative", "kummer_cover_corrupted.json")).glued.validate()
    assert rep.failures() == ["connection_compatible[U|V]"]


@pytest.mark.parametrize("name,deg,rank", [("p1_line_deg1", 1, 1), ("p1_line_degm2", -2, 1),
                                           ("p1_rank2_degm2", -2, 2), ("p1_higgs_deg0", 0, 2),
                                           ("p1_higgs_deg2", 2, 2), ("p1_higgs_degm4", -4, 2)])
def test_projective_line_degrees(name, deg, rank):
    g = load(fixture_path(name + ".json")).glued
    assert g.validate().passed
    assert g.degree() == deg
    assert g.slope() == Fraction(deg, rank)


def test_higgs_overlap_detects_wrong_field():
    ru, rv = ChartRing(5, 1, ("t",)), ChartRing(5, 1, ("s",))
    u = HiggsChart(ru, (0, 1), [["0", "1"], ["0", "0"]], name="U")
    v = HiggsChart(rv, (0, 1), [["0", "1"], ["0", "0"]], name="V")
    ov = Overlap(("U", "V"), F5L, "t^-1", [["t^-1", "0"], ["0", "t"]])
    rep = GluedObject({"U": u, "V": v}, [ov], "projective-line").validate()
    assert rep.failures() == ["higgs_compatible[U|V]"]


def test_coordinate_changes_are_limited():
    with pytest.raises(InvalidInput):
        Overlap(("U", "V"), F5L, "t^-2", [["1"]])


def test_degree_needs_projective_line():
    g = load(fixture_path("kummer_higgs_cover.json")).glued
    with pytest.raises(InvalidInput):
        g.degree()


def test_three_chart_cocycle():
    u, v, w = (HiggsChart(F5L, (0,), [["0"]], name=x) for x in "UVW")
    ovs = [Overlap(("U", "V"), F5L, None, [["2"]]), Overlap(("V", "W"), F5L, None, [["3"]]),
           Overlap(("U", "W"), F5L, None, [["1"]])]
    assert GluedObject({"U": u, "V": v, "W": w}, ovs).validate().passed
    ovs[2] = Overlap(("U", "W"), F5L, None, [["2"]])
    assert GluedObject({"U": u, "V": v, "W": w}, ovs).validate().failures() == ["cocycle"]
