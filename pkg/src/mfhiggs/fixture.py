"""Reading and writing "mfv1" fixture documents.

A fixture is a JSON object::

    {
      "format": "mfv1", "id": "kummer_p5", "p": 5, "m": 2, "n": 1,
      "charts": [{"id": "U", "vars": ["t"], "inverted": ["t"], "denominators": [],
                  "rank": 2, "fil": [0, 1], "A": [["0", "t^-1"], ["0", "0"]],
                  "F": ["t^5"], "Phi": [["1", "0"], ["0", "5"]]}],
      "overlaps": [],
      "submodules": {"G0": {"ambient_rank": 2, "generators": [["1", "0"]]}},
      "liftings": {"alt": {"U": ["t^5 + 5*t^6"]}}
    }

Two-variable charts give ``A`` as a list of matrices, one per variable.
Higgs charts carry ``"kind": "higgs"``, ``levels`` and ``theta`` instead of
``fil``, ``A``, ``F`` and ``Phi``, and live modulo p.  A submodule's
``generators`` is either one list used on every chart or a map from chart
id to lists; ``"space": "derham"`` marks submodules of H_0 rather than E_0.
All polynomial strings use the grammar of :mod:`mfhiggs.poly`.
"""

import json
from dataclasses import dataclass, field

from .errors import InvalidInput, MFError, PolySyntaxError
from .glue import GluedObject, Overlap
from .mfdata import FilteredDeRhamChart, FrobeniusLifting, HiggsChart
from .poly import ChartRing
from .submodule import Submodule

FORMAT = "mfv1"
LIFTINGS_FORMAT = "mfv1-liftings"


class FixtureError(InvalidInput):
    """Malformed fixture; ``where`` locates the offending field."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


@dataclass
class FixtureDocument:
    id: str
    p: int
    m: int
    n: int
    charts: dict
    glued: GluedObject
    submodules: dict = field(default_factory=dict)
    liftings: dict = field(default_factory=dict)
    spaces: dict = field(default_factory=dict)
    raw: dict = None

    @property
    def kind(self):
        return self.glued.kind

    def chart(self, cid=None):
        if cid is None:
            if len(self.charts) != 1:
                raise InvalidInput("fixture has several charts; name one")
            return next(iter(self.charts.values()))
        return self.charts[cid]

    def submodule(self, name):
        if name not in self.submodules:
            raise InvalidInput(f"unknown submodule {name!r}; known: {sorted(self.submodules)}")
        return self.submodules[name]


def _need(d, key, where):
    if key not in d:
        raise FixtureError(f"missing field {key!r}", where)
    return d[key]


def _parse(ring, text, where):
    if isinstance(text, int):
        text = str(text)
    if not isinstance(text, str):
        raise FixtureError(f"expected a polynomial string, got {type(text).__name__}", where)
    try:
        return ring.parse(text)
    except PolySyntaxError as exc:
        raise FixtureError(str(exc), where) from None
    except MFError as exc:
        raise FixtureError(f"{type(exc).__name__}: {exc}", where) from None


def _matrix(ring, rows, where, size=None):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise FixtureError("expected a list of rows", where)
    if size is not None and (len(rows) != size or any(len(r) != size for r in rows)):
        raise FixtureError(f"expected a {size}x{size} matrix", where)
    return [[_parse(ring, x, f"{where}[{i}][{j}]") for j, x in enumerate(row)]
            for i, row in enumerate(rows)]


def _ring(p, m, spec, where):
    try:
        return ChartRing(p, m, spec.get("vars", ["t"]), spec.get("inverted", []),
                         spec.get("denominators", []))
    except (MFError, ValueError) as exc:
        raise FixtureError(str(exc), where) from None


def _chart(doc, c, where):
    p, m, n = doc["p"], doc["m"], doc.get("n")
    cid = _need(c, "id", where)
    rank = _need(c, "rank", where)
    if c.get("kind") == "higgs":
        ring = _ring(p, 1, c, where)
        levels = _need(c, "levels", where)
        theta = _need(c, "theta", where)
        if ring.dim == 1:
            theta = [theta]
        mats = tuple(_matrix(ring, T, f"{where}.theta[{k}]", rank) for k, T in enumerate(theta))
        return HiggsChart(ring, levels, mats, name=cid)
    ring = _ring(p, m, c, where)
    A = _need(c, "A", where)
    if ring.dim == 1:
        A = [A]
    if len(A) != ring.dim:
        raise FixtureError(f"need {ring.dim} connection matrices", f"{where}.A")
    mats = tuple(_matrix(ring, M, f"{where}.A[{k}]", rank) for k, M in enumerate(A))
    F = _need(c, "F", where)
    if isinstance(F, str):
        F = [F]
    images = [_parse(ring, x, f"{where}.F[{k}]") for k, x in enumerate(F)]
    try:
        lifting = FrobeniusLifting(ring, images)
        return FilteredDeRhamChart(ring, tuple(_need(c, "fil", where)), mats, lifting,
                                   _matrix(ring, _need(c, "Phi", where), f"{where}.Phi", rank),
                                   n=n, name=cid)
    except MFError as exc:
        if isinstance(exc, FixtureError):
            raise
        raise FixtureError(f"{type(exc).__name__}: {exc}", where) from None


def from_dict(doc):
    if not isinstance(doc, dict):
        raise FixtureError("fixture must be a JSON object")
    if doc.get("format") != FORMAT:
        raise FixtureError(f"unsupported format {doc.get('format')!r}; expected {FORMAT!r}")
    for key in ("id", "p", "m", "charts"):
        _need(doc, key, "fixture")
    charts = {}
    for i, c in enumerate(doc["charts"]):
        chart = _chart(doc, c, f"charts[{i}]")
        if chart.name in charts:
            raise FixtureError(f"duplicate chart id {chart.name!r}", f"charts[{i}]")
        charts[chart.name] = chart
    if not charts:
        raise FixtureError("no charts", "charts")
    overlaps = []
    for i, ov in enumerate(doc.get("overlaps", [])):
        where = f"overlaps[{i}]"
        ids = _need(ov, "charts", where)
        if len(ids) != 2 or any(x not in charts for x in ids):
            raise FixtureError(f"overlap must name two known charts, got {ids}", where)
        m = charts[ids[0]].ring.m
        ring = _ring(doc["p"], m, _need(ov, "ring", where), f"{where}.ring")
        change = ov.get("coordinate_change", "identity")
        change = None if change == "identity" else _parse(ring, change, f"{where}.coordinate_change")
        rank = charts[ids[0]].rank
        T = _matrix(ring, _need(ov, "transition", where), f"{where}.transition", rank)
        try:
            overlaps.append(Overlap(ids, ring, change, T))
        except MFError as exc:
            raise FixtureError(str(exc), where) from None
    try:
        glued = GluedObject(charts, overlaps, doc.get("cover"))
    except MFError as exc:
        raise FixtureError(str(exc), "overlaps") from None
    subs, spaces = {}, {}
    for name, s in doc.get("submodules", {}).items():
        where = f"submodules.{name}"
        r = _need(s, "ambient_rank", where)
        gens = _need(s, "generators", where)
        per = {}
        for cid, chart in charts.items():
            g = gens.get(cid) if isinstance(gens, dict) else gens
            if g is None:
                continue
            if "chart" in s and s["chart"] != cid:
                continue
            ring0 = chart.ring.mod_p()
            if ring0.dim != 1:
                continue
            rows = []
            for k, v in enumerate(g):
                if len(v) != r:
                    raise FixtureError(f"generator of length {len(v)} in rank {r}", f"{where}.generators[{k}]")
                rows.append([_parse(ring0, x, f"{where}.generators[{k}]") for x in v])
            per[cid] = Submodule(ring0, r, rows)
        subs[name] = per
        spaces[name] = s.get("space", "higgs")
    lifts = {}
    for name, L in doc.get("liftings", {}).items():
        lifts[name] = L if isinstance(L, dict) else {cid: L for cid in charts}
    n = doc.get("n")
    if n is None:
        n = max((c.n for c in charts.values() if isinstance(c, FilteredDeRhamChart)), default=0)
    return FixtureDocument(doc["id"], doc["p"], doc["m"], n, charts, glued, subs, lifts, spaces, doc)


def load(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise FixtureError(f"cannot read fixture: {exc.strerror}", str(path)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FixtureError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})",
                           str(path)) from None
    return from_dict(doc)


def load_liftings(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FixtureError(f"cannot read liftings: {exc.strerror}", str(path)) from None
    except json.JSONDecodeError as exc:
        raise FixtureError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})",
                           str(path)) from None
    if doc.get("format") != LIFTINGS_FORMAT:
        raise FixtureError(f"expected format {LIFTINGS_FORMAT!r}", str(path))
    return doc.get("liftings", {})


# ---------------------------------------------------------------------------
# writing

def _render_matrix(M):
    return [[x.render() for x in row] for row in M]


def ring_dict(ring):
    return ring.describe()


def chart_dict(chart, cid=None):
    out = {"id": cid or chart.name}
    out.update(ring_dict(chart.ring))
    out["rank"] = chart.rank
    if isinstance(chart, HiggsChart):
        out["kind"] = "higgs"
        out["levels"] = list(chart.levels)
        th = [_render_matrix(T) for T in chart.theta]
        out["theta"] = th[0] if chart.ring.dim == 1 else th
        return out
    out["fil"] = list(chart.fil)
    A = [_render_matrix(M) for M in chart.A]
    out["A"] = A[0] if chart.ring.dim == 1 else A
    out["F"] = chart.F.render()
    out["Phi"] = _render_matrix(chart.Phi)
    return out


def overlap_dict(ov):
    return {
        "charts": list(ov.charts),
        "ring": ring_dict(ov.ring),
        "coordinate_change": "identity" if ov.change is None else ov.change.render(),
        "transition": _render_matrix(ov.transition),
    }


def to_dict(doc):
    """Canonical JSON form of a loaded fixture."""
    out = {"format": FORMAT, "id": doc.id, "p": doc.p, "m": doc.m, "n": doc.n,
           "charts": [chart_dict(c, cid) for cid, c in doc.charts.items()],
           "overlaps": [overlap_dict(ov) for ov in doc.glued.overlaps]}
    if doc.glued.cover:
        out["cover"] = doc.glued.cover
    raw = doc.raw or {}
    for key in ("description", "violates"):
        if key in raw:
            out[key] = raw[key]
    if doc.submodules:
        subs = {}
        for name, per in doc.submodules.items():
            entry = {"ambient_rank": next(iter(per.values())).ambient_rank if per else 0}
            rendered = {cid: [[x.render() for x in g] for g in s.generators] for cid, s in per.items()}
            values = list(rendered.values())
            if len(per) == len(doc.charts) and all(v == values[0] for v in values):
                entry["generators"] = values[0]
            else:
                entry["generators"] = rendered
            if doc.spaces.get(name, "higgs") != "higgs":
                entry["space"] = doc.spaces[name]
            subs[name] = entry
        out["submodules"] = subs
    if doc.liftings:
        out["liftings"] = doc.liftings
    return out


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
