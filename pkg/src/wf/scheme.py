"""Glued affine patches, transition transports, and twisted derivations.

A presentation is a polynomial coordinate ring over the base ring: base
variables, relations, and a set of inverted variables, each inverted
variable v getting a companion v_inv with v * v_inv = 1.  Overlaps of a
glued scheme are further localizations of the two patches with explicit
transition maps on base variables; companion images are never stored,
they are derived by inverting the image of the base variable.

F-derivations (sections of F*T, Frobenius-twisted vector fields) are
coefficient vectors over the base variables; their action follows the
twisted Leibniz rule D(fg) = f^q D(g) + D(f) g^q, which on a localized
ring forces D(v_inv) = -v_inv^(2q) D(v).
"""

from __future__ import annotations

import json

from .base_ring import BaseRingSpec, IntModRing
from .errors import (KindMismatch, NonSmooth, NotEtale, TransitionError,
                     VariableMismatch, WfError)
from .poly import MvPoly, ReductionContext, parse_poly

INV_SUFFIX = "_inv"


def companion_name(var: str) -> str:
    return var + INV_SUFFIX


class Presentation:
    """One affine chart: variables, relations, inverted variables."""

    __slots__ = ("name", "ring", "vars", "inverted", "companions", "all_vars",
                 "relations", "res", "relations_res", "red", "red_R",
                 "loc_pairs")

    def __init__(self, name, ring, vars, relations=(), inverted=()):
        self.name = name
        self.ring = ring
        self.vars = tuple(vars)
        self.inverted = tuple(inverted)
        for v in self.inverted:
            if v not in self.vars:
                raise WfError("inverted name %r is not a variable" % (v,))
        self.companions = tuple(companion_name(v) for v in self.inverted)
        self.all_vars = self.vars + self.companions
        self.loc_pairs = tuple(zip(self.companions, self.inverted))
        rel = []
        for g in relations:
            if isinstance(g, str):
                g = parse_poly(g, ring, self.all_vars)
            elif g.vars != self.all_vars:
                g = g.extend_vars(self.all_vars)
            rel.append(g)
        self.relations = tuple(rel)
        self.res = IntModRing(ring.p, 1, ring.frob_power)
        self.relations_res = tuple(
            r for r in (self.to_res(g) for g in self.relations) if not r.is_zero())
        # rules oriented away from inverted variables keep the localized
        # normal form canonical
        self.red = ReductionContext(self.res, self.all_vars,
                                    self.relations_res, self.loc_pairs,
                                    avoid=self.inverted)
        self.red_R = ReductionContext(ring, self.all_vars,
                                      self.relations, self.loc_pairs,
                                      avoid=self.inverted)

    @property
    def q(self):
        return self.ring.q

    def to_res(self, f: MvPoly) -> MvPoly:
        """Reduce coefficients modulo pi into the residue field."""
        if f.ring is self.res or (isinstance(f.ring, IntModRing) and f.ring.same(self.res)):
            return f if f.vars == self.all_vars else f.extend_vars(self.all_vars)
        if f.vars != self.all_vars:
            f = f.extend_vars(self.all_vars)
        return f.map_coeffs(lambda c: c.residue(), self.res)

    def nf(self, f: MvPoly) -> MvPoly:
        return self.red.normal_form(f)

    def nf_R(self, f: MvPoly) -> MvPoly:
        return self.red_R.normal_form(f)

    def poly(self, text: str, level="R") -> MvPoly:
        ring = self.ring if level == "R" else self.res
        return parse_poly(text, ring, self.all_vars)

    def localize(self, extra):
        extra = tuple(v for v in extra if v not in self.inverted)
        for v in extra:
            if v not in self.vars:
                raise WfError("cannot invert %r: not a variable" % (v,))
        if not extra:
            return self
        return Presentation("%s[1/%s]" % (self.name, ",".join(extra)),
                            self.ring, self.vars, self.relations,
                            self.inverted + extra)

    def max_relation_degree(self):
        return max((g.total_deg() for g in self.relations), default=1)

    def at_precision(self, k):
        """Clone of this chart over the same ring truncated at pi^k."""
        ring2 = BaseRingSpec(self.ring.p, list(self.ring.eisenstein), k,
                             self.ring.frob_power)
        rel2 = [r.map_coeffs(lambda c: ring2.elem(c.coeffs), ring2)
                for r in self.relations]
        return Presentation(self.name, ring2, self.vars, rel2, self.inverted)

    def to_json(self):
        return {"name": self.name, "vars": list(self.vars),
                "inverted": list(self.inverted),
                "relations": [g.to_text() for g in self.relations]}

    def __repr__(self):
        return "Presentation(%s)" % (self.name,)


def _at_level(poly, pres, level):
    """Coerce a polynomial onto pres.all_vars at the requested level."""
    if level == "R":
        if poly.vars != pres.all_vars:
            poly = poly.extend_vars(pres.all_vars)
        return poly
    return pres.to_res(poly)


def transport(expr, src_pres, base_map, dst_pres, level="res"):
    """Move expr from src coordinates to dst coordinates.

    base_map sends src base variables to polynomials over dst.all_vars;
    companion images are derived by inverting the mapped base variable
    in dst, raising TransitionError when the image is not certified
    invertible.  level selects exact base-ring coefficients ("R") or the
    residue field ("res"); inputs are coerced to that level.
    """
    ring = dst_pres.ring if level == "R" else dst_pres.res
    red = dst_pres.red_R if level == "R" else dst_pres.red
    expr = _at_level(expr, src_pres, level)
    used = set()
    for e in expr.terms:
        for name, k in zip(expr.vars, e):
            if k:
                used.add(name)
    inv_of = dict(src_pres.loc_pairs)  # companion -> base var
    mapping = {}
    for name in used:
        if name in base_map:
            mapping[name] = _at_level(base_map[name], dst_pres, level)
        elif name in inv_of:
            z = inv_of[name]
            if z not in base_map:
                raise TransitionError("no image for %r or its base %r" % (name, z))
            img_z = _at_level(base_map[z], dst_pres, level)
            inv = red.try_invert(img_z)
            if inv is None:
                raise TransitionError("image of %r is not certified invertible" % (z,))
            mapping[name] = inv
        else:
            raise TransitionError("no image for variable %r" % (name,))
    return red.normal_form(expr.subst(mapping, ring=ring, vars=dst_pres.all_vars))


class Overlap:
    """Gluing data for one unordered pair of patches."""

    __slots__ = ("i", "j", "invert_i", "invert_j", "to_j", "to_i")

    def __init__(self, i, j, invert_i, invert_j, to_j, to_i):
        if not (i < j):
            raise WfError("store overlaps with i < j")
        self.i = i
        self.j = j
        self.invert_i = invert_i
        self.invert_j = invert_j
        self.to_j = dict(to_j)  # side-i base var -> poly over side-j overlap vars
        self.to_i = dict(to_i)

    def to_json(self):
        return {"i": self.i, "j": self.j,
                "invert_i": self.invert_i, "invert_j": self.invert_j,
                "to_j": {k: v.to_text() for k, v in self.to_j.items()},
                "to_i": {k: v.to_text() for k, v in self.to_i.items()}}


class OverlapView:
    """Overlap seen from an ordered pair (a, b); flips stored data."""

    __slots__ = ("a", "b", "pres_a", "pres_b", "map_ab", "map_ba",
                 "invert_a", "invert_b")

    def __init__(self, a, b, pres_a, pres_b, map_ab, map_ba, invert_a, invert_b):
        self.a = a
        self.b = b
        self.pres_a = pres_a
        self.pres_b = pres_b
        self.map_ab = map_ab  # a-side base vars -> polys over pres_b
        self.map_ba = map_ba
        self.invert_a = invert_a
        self.invert_b = invert_b

    def map_res(self, direction):
        m = self.map_ab if direction == "ab" else self.map_ba
        pres = self.pres_b if direction == "ab" else self.pres_a
        return {k: pres.to_res(v) for k, v in m.items()}


class GluedScheme:
    __slots__ = ("name", "ring", "patches", "overlaps", "genus", "family")

    def __init__(self, name, ring, patches, overlaps=(), genus=None, family=None):
        self.name = name
        self.ring = ring
        self.patches = tuple(patches)
        table = {}
        for ov in overlaps:
            table[(ov.i, ov.j)] = ov
        self.overlaps = table
        self.genus = genus
        self.family = family

    def overlap_pairs(self):
        return sorted(self.overlaps)

    def triples(self):
        pairs = set(self.overlaps)
        n = len(self.patches)
        out = []
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    if {(i, j), (i, k), (j, k)} <= pairs:
                        out.append((i, j, k))
        return out

    def view(self, a, b):
        """OverlapView for the ordered pair (a, b)."""
        if a == b:
            pres = self.patches[a]
            ident = {v: MvPoly.var(self.ring, pres.all_vars, v) for v in pres.vars}
            return OverlapView(a, b, pres, pres, dict(ident), dict(ident), None, None)
        key = (a, b) if a < b else (b, a)
        ov = self.overlaps.get(key)
        if ov is None:
            raise WfError("no overlap between patches %d and %d" % (a, b))
        pres_i = self.patches[ov.i].localize((ov.invert_i,) if ov.invert_i else ())
        pres_j = self.patches[ov.j].localize((ov.invert_j,) if ov.invert_j else ())
        to_j = {k: v if isinstance(v, MvPoly) else parse_poly(v, self.ring, pres_j.all_vars)
                for k, v in ov.to_j.items()}
        to_i = {k: v if isinstance(v, MvPoly) else parse_poly(v, self.ring, pres_i.all_vars)
                for k, v in ov.to_i.items()}
        if a < b:
            return OverlapView(a, b, pres_i, pres_j, to_j, to_i, ov.invert_i, ov.invert_j)
        return OverlapView(b, a, pres_j, pres_i, to_i, to_j, ov.invert_j, ov.invert_i)

    def to_json(self):
        data = {"name": self.name, "ring": self.ring.to_json(),
                "patches": [p.to_json() for p in self.patches],
                "overlaps": [self.overlaps[k].to_json() for k in sorted(self.overlaps)]}
        if self.genus is not None:
            data["genus"] = self.genus
        if self.family is not None:
            data["family"] = self.family
        return data

    @classmethod
    def from_json(cls, data, ring=None):
        if isinstance(data, str):
            data = json.loads(data)
        if ring is None:
            ring = BaseRingSpec.from_json(data["ring"])
        patches = [Presentation(p["name"], ring, p["vars"],
                                p.get("relations", ()), p.get("inverted", ()))
                   for p in data["patches"]]
        overlaps = []
        for o in data.get("overlaps", ()):
            i, j = o["i"], o["j"]
            pres_i = patches[i].localize((o["invert_i"],) if o.get("invert_i") else ())
            pres_j = patches[j].localize((o["invert_j"],) if o.get("invert_j") else ())
            to_j = {k: parse_poly(v, ring, pres_j.all_vars) for k, v in o["to_j"].items()}
            to_i = {k: parse_poly(v, ring, pres_i.all_vars) for k, v in o["to_i"].items()}
            overlaps.append(Overlap(i, j, o.get("invert_i"), o.get("invert_j"), to_j, to_i))
        return cls(data["name"], ring, patches, overlaps,
                   genus=data.get("genus"), family=data.get("family"))

    def __repr__(self):
        return "GluedScheme(%s, %d patches)" % (self.name, len(self.patches))


# -- gluing validation ---------------------------------------------------------


def validate_gluing(scheme: GluedScheme):
    """Round trips on every overlap, cocycle identity on every triple.

    Exact check over the base ring, not just mod pi.  Raises
    TransitionError with the offending data; returns True otherwise.
    """
    for (i, j) in scheme.overlap_pairs():
        v = scheme.view(i, j)
        for name in v.pres_a.vars:
            img = transport(MvPoly.var(scheme.ring, v.pres_a.all_vars, name),
                            v.pres_a, v.map_ab, v.pres_b, level="R")
            back = transport(img, v.pres_b, v.map_ba, v.pres_a, level="R")
            expect = v.pres_a.nf_R(MvPoly.var(scheme.ring, v.pres_a.all_vars, name))
            if back != expect:
                raise TransitionError(
                    "round trip failed on overlap (%d,%d) at %r: %s != %s"
                    % (i, j, name, back.to_text(), expect.to_text()))
        for name in v.pres_b.vars:
            img = transport(MvPoly.var(scheme.ring, v.pres_b.all_vars, name),
                            v.pres_b, v.map_ba, v.pres_a, level="R")
            back = transport(img, v.pres_a, v.map_ab, v.pres_b, level="R")
            expect = v.pres_b.nf_R(MvPoly.var(scheme.ring, v.pres_b.all_vars, name))
            if back != expect:
                raise TransitionError(
                    "round trip failed on overlap (%d,%d) at %r" % (i, j, name))
    for (i, j, k) in scheme.triples():
        vij = scheme.view(i, j)
        vik = scheme.view(i, k)
        vjk = scheme.view(j, k)
        triple_k = scheme.patches[k].localize(
            tuple(x for x in (vik.invert_b, vjk.invert_b) if x))
        for name in scheme.patches[i].vars:
            x = MvPoly.var(scheme.ring, vik.pres_a.all_vars, name)
            direct = transport(x, vik.pres_a, vik.map_ab, triple_k, level="R")
            step = transport(MvPoly.var(scheme.ring, vij.pres_a.all_vars, name),
                             vij.pres_a, vij.map_ab, vij.pres_b, level="R")
            composed = transport(step, vjk.pres_a.localize((vij.invert_b,)),
                                 vjk.map_ab, triple_k, level="R")
            if direct != composed:
                raise TransitionError(
                    "cocycle failed on triple (%d,%d,%d) at %r: %s != %s"
                    % (i, j, k, name, direct.to_text(), composed.to_text()))
    return True


# -- morphisms -------------------------------------------------------------------


class ChartMap:
    __slots__ = ("target_index", "pullback", "section")

    def __init__(self, target_index, pullback, section=None):
        self.target_index = target_index
        self.pullback = dict(pullback)   # target base var -> poly over source chart
        self.section = dict(section) if section else None

    def to_json(self):
        data = {"target": self.target_index,
                "pullback": {k: v.to_text() for k, v in self.pullback.items()}}
        if self.section:
            data["section"] = {k: v.to_text() for k, v in self.section.items()}
        return data


class SchemeMorphism:
    __slots__ = ("name", "source", "target", "charts", "kind")

    def __init__(self, name, source, target, charts, kind=None):
        self.name = name
        self.source = source
        self.target = target
        self.charts = tuple(charts)
        if len(self.charts) != len(source.patches):
            raise WfError("one chart map per source patch is required")
        self.kind = kind

    def target_patch(self, i):
        return self.target.patches[self.charts[i].target_index]

    def pullback_res(self, i):
        src = self.source.patches[i]
        return {k: src.to_res(v) for k, v in self.charts[i].pullback.items()}

    def to_json(self):
        return {"name": self.name, "kind": self.kind,
                "source": self.source.to_json(), "target": self.target.to_json(),
                "charts": [c.to_json() for c in self.charts]}

    @classmethod
    def from_json(cls, data, ring=None):
        if isinstance(data, str):
            data = json.loads(data)
        source = GluedScheme.from_json(data["source"], ring)
        target = GluedScheme.from_json(data["target"], ring if ring else None)
        charts = []
        for idx, c in enumerate(data["charts"]):
            src = source.patches[idx]
            tgt = target.patches[c["target"]]
            pullback = {k: parse_poly(v, source.ring, src.all_vars)
                        for k, v in c["pullback"].items()}
            section = None
            if c.get("section"):
                section = {k: parse_poly(v, target.ring, tgt.all_vars)
                           for k, v in c["section"].items()}
            charts.append(ChartMap(c["target"], pullback, section))
        return cls(data.get("name", "morphism"), source, target, charts,
                   kind=data.get("kind"))

    def __repr__(self):
        return "SchemeMorphism(%s: %s -> %s)" % (self.name, self.source.name,
                                                 self.target.name)


def validate_morphism(m: SchemeMorphism):
    """Relations pull back to zero; chart maps agree on overlaps."""
    for i, chart in enumerate(m.charts):
        src = m.source.patches[i]
        tgt = m.target_patch(i)
        for name in tgt.vars:
            if name not in chart.pullback:
                raise WfError("chart %d has no pullback for %r" % (i, name))
        for g in tgt.relations:
            img = transport(g, tgt, chart.pullback, src, level="R")
            if not img.is_zero():
                raise WfError(
                    "relation %s does not pull back to zero on chart %d"
                    % (g.to_text(), i))
    # overlap agreement: both routes from a target variable into the
    # source overlap ring must agree
    for (i, j) in m.source.overlap_pairs():
        sv = m.source.view(i, j)
        ti, tj = m.charts[i].target_index, m.charts[j].target_index
        tv = m.target.view(ti, tj)
        src_i = sv.pres_a
        for name in tv.pres_a.vars:
            direct = transport(
                m.charts[i].pullback.get(name), m.source.patches[i],
                _identity_map(m.source.ring, m.source.patches[i], src_i),
                src_i, level="R")
            via_j = transport(MvPoly.var(m.source.ring, tv.pres_a.all_vars, name),
                              tv.pres_a, tv.map_ab, tv.pres_b, level="R")
            pulled = transport(via_j, tv.pres_b, m.charts[j].pullback,
                               sv.pres_b, level="R")
            crossed = transport(pulled, sv.pres_b, sv.map_ba, src_i, level="R")
            if direct != crossed:
                raise TransitionError(
                    "pullbacks of %r disagree on source overlap (%d,%d): %s != %s"
                    % (name, i, j, direct.to_text(), crossed.to_text()))
    _validate_kind(m)
    return True


def _identity_map(ring, pres_from, pres_to):
    return {v: MvPoly.var(ring, pres_to.all_vars, v) for v in pres_from.vars}


def _validate_kind(m: SchemeMorphism):
    if m.kind is None:
        return
    if m.kind == "closed_immersion":
        for i, chart in enumerate(m.charts):
            src = m.source.patches[i]
            tgt = m.target_patch(i)
            if not chart.section:
                raise KindMismatch("closed immersion chart %d needs a section" % (i,))
            for name in src.vars:
                if name not in chart.section:
                    raise KindMismatch("no section entry for source variable %r" % (name,))
                round_trip = transport(chart.section[name], tgt, chart.pullback,
                                       src, level="R")
                expect = src.nf_R(MvPoly.var(m.source.ring, src.all_vars, name))
                if round_trip != expect:
                    raise KindMismatch(
                        "section of %r does not split the pullback on chart %d"
                        % (name, i))
    elif m.kind == "projection":
        for i, chart in enumerate(m.charts):
            src = m.source.patches[i]
            seen = set()
            for name, img in chart.pullback.items():
                nz = [(v, k) for e in img.terms for v, k in zip(img.vars, e) if k]
                if len(img.terms) != 1 or len(nz) != 1 or nz[0][1] != 1:
                    raise KindMismatch(
                        "projection pullback of %r is not a bare variable" % (name,))
                if nz[0][0] in seen:
                    raise KindMismatch("projection pullbacks collide on %r" % (nz[0][0],))
                seen.add(nz[0][0])
    elif m.kind == "etale":
        for i in range(len(m.charts)):
            relative_jacobian_unit(m, i)
    else:
        raise KindMismatch("unknown morphism kind %r" % (m.kind,))


def relative_jacobian_unit(m: SchemeMorphism, i):
    """Certify the twisted relative Jacobian of chart i is a unit mod pi.

    Square check on base variables; NotEtale when the determinant is not
    certified invertible in the source coordinate ring.
    """
    src = m.source.patches[i]
    tgt = m.target_patch(i)
    if len(src.vars) != len(tgt.vars):
        raise NotEtale("chart %d relates %d variables to %d"
                       % (i, len(src.vars), len(tgt.vars)))
    q = src.q
    pullback = m.pullback_res(i)
    rows = []
    for tname in tgt.vars:
        img = pullback[tname]
        rows.append([src.nf(img.partial(xname).q_power_vars(q))
                     for xname in src.vars])
    det = _poly_det(rows, src)
    inv = src.red.try_invert(det)
    if inv is None:
        raise NotEtale("relative Jacobian determinant %s is not certified a unit"
                       % (det.to_text(),))
    return det, inv


def _poly_det(rows, pres):
    n = len(rows)
    if n == 0:
        return MvPoly.const(pres.res, pres.all_vars, 1)
    if n == 1:
        return rows[0][0]
    total = MvPoly.zero(pres.res, pres.all_vars)
    for c in range(n):
        minor = [[rows[r][cc] for cc in range(n) if cc != c] for r in range(1, n)]
        piece = rows[0][c] * _poly_det(minor, pres)
        total = total + piece if c % 2 == 0 else total - piece
    return pres.nf(total)


# -- twisted derivations ----------------------------------------------------------


class FDerSection:
    """Sum g_v F*(d/dv) over the base variables of one presentation."""

    __slots__ = ("pres", "coeffs")

    def __init__(self, pres, coeffs):
        self.pres = pres
        table = {}
        for v in pres.vars:
            g = coeffs.get(v)
            if g is None:
                g = MvPoly.zero(pres.res, pres.all_vars)
            else:
                g = pres.to_res(g)
            table[v] = pres.nf(g)
        self.coeffs = table

    def apply(self, f: MvPoly) -> MvPoly:
        return fder_apply(self.pres, self.coeffs, f)

    def is_zero(self):
        return all(g.is_zero() for g in self.coeffs.values())

    def __add__(self, other):
        return FDerSection(self.pres, {v: self.coeffs[v] + other.coeffs[v]
                                       for v in self.pres.vars})

    def __sub__(self, other):
        return FDerSection(self.pres, {v: self.coeffs[v] - other.coeffs[v]
                                       for v in self.pres.vars})

    def __neg__(self):
        return FDerSection(self.pres, {v: -self.coeffs[v] for v in self.pres.vars})

    def __eq__(self, other):
        if not isinstance(other, FDerSection):
            return NotImplemented
        return all(self.coeffs[v] == other.coeffs[v] for v in self.pres.vars)

    def __repr__(self):
        inner = ", ".join("%s: %s" % (v, g.to_text()) for v, g in self.coeffs.items())
        return "FDerSection(%s)" % (inner,)


def twisted_gradient(pres: Presentation, f: MvPoly):
    """Coefficients M_v with D(f) = sum_v D(v) * M_v for any F-derivation D.

    M_v is df/dv with exponents q-scaled, plus the companion channel
    -u^(2q) * (df/du with exponents q-scaled) for each pair u = 1/v.
    Keys are the base variables; entries certainly zero are omitted.
    """
    q = pres.q
    f = pres.to_res(f)
    grad = {}
    for v in pres.vars:
        d = f.partial(v)
        if not d.is_zero():
            grad[v] = d.q_power_vars(q)
    for comp, v in pres.loc_pairs:
        d = f.partial(comp)
        if d.is_zero():
            continue
        shift = MvPoly.var(pres.res, pres.all_vars, comp, 2 * q) * d.q_power_vars(q)
        base = grad.get(v, MvPoly.zero(pres.res, pres.all_vars))
        grad[v] = base - shift
    out = {}
    for v, g in grad.items():
        g = pres.nf(g)
        if not g.is_zero():
            out[v] = g
    return out


def fder_apply(pres: Presentation, coeffs, f: MvPoly) -> MvPoly:
    """Twisted chain rule: D(f) = sum_v D(v) * (df/dv with exponents q-scaled).

    Companion variables contribute through the forced value
    D(v_inv) = -v_inv^(2q) D(v).  The result is normal-formed.
    """
    out = MvPoly.zero(pres.res, pres.all_vars)
    for v, m in twisted_gradient(pres, f).items():
        g = coeffs.get(v)
        if g is None or g.is_zero():
            continue
        out = out + pres.to_res(g) * m
    return pres.nf(out)


# -- built-in schemes ---------------------------------------------------------------


_AFFINE_NAMES = ("x", "y", "z", "w")


def affine_names(n):
    if n <= len(_AFFINE_NAMES):
        return _AFFINE_NAMES[:n]
    return tuple("x%d" % (k + 1,) for k in range(n))


def affine_space(ring, n, name=None):
    patch = Presentation("A%d" % (n,), ring, affine_names(n))
    return GluedScheme(name or "A%d" % (n,), ring, [patch], family="affine")


def multiplicative_group(ring):
    patch = Presentation("Gm", ring, ("x",), inverted=("x",))
    return GluedScheme("Gm", ring, [patch], family="torus")


def projective_line(ring):
    c0 = Presentation("U0", ring, ("x",))
    c1 = Presentation("U1", ring, ("u",))
    p0 = c0.localize(("x",))
    p1 = c1.localize(("u",))
    ov = Overlap(0, 1, "x", "u",
                 to_j={"x": parse_poly("u_inv", ring, p1.all_vars)},
                 to_i={"u": parse_poly("x_inv", ring, p0.all_vars)})
    return GluedScheme("P1", ring, [c0, c1], [ov], family="projective")


def projective_plane(ring):
    # charts of [X0:X1:X2]: U0 has (a,b) = (X1/X0, X2/X0),
    # U1 has (c,d) = (X0/X1, X2/X1), U2 has (e,g) = (X0/X2, X1/X2)
    c0 = Presentation("U0", ring, ("a", "b"))
    c1 = Presentation("U1", ring, ("c", "d"))
    c2 = Presentation("U2", ring, ("e", "g"))
    p01 = c1.localize(("c",))
    p00 = c0.localize(("a",))
    ov01 = Overlap(0, 1, "a", "c",
                   to_j={"a": parse_poly("c_inv", ring, p01.all_vars),
                         "b": parse_poly("d*c_inv", ring, p01.all_vars)},
                   to_i={"c": parse_poly("a_inv", ring, p00.all_vars),
                         "d": parse_poly("b*a_inv", ring, p00.all_vars)})
    p02 = c2.localize(("e",))
    p00b = c0.localize(("b",))
    ov02 = Overlap(0, 2, "b", "e",
                   to_j={"a": parse_poly("g*e_inv", ring, p02.all_vars),
                         "b": parse_poly("e_inv", ring, p02.all_vars)},
                   to_i={"e": parse_poly("b_inv", ring, p00b.all_vars),
                         "g": parse_poly("a*b_inv", ring, p00b.all_vars)})
    p12 = c2.localize(("g",))
    p11 = c1.localize(("d",))
    ov12 = Overlap(1, 2, "d", "g",
                   to_j={"c": parse_poly("e*g_inv", ring, p12.all_vars),
                         "d": parse_poly("g_inv", ring, p12.all_vars)},
                   to_i={"e": parse_poly("c*d_inv", ring, p11.all_vars),
                         "g": parse_poly("d_inv", ring, p11.all_vars)})
    return GluedScheme("P2", ring, [c0, c1, c2], [ov01, ov02, ov12],
                       family="projective")


def weierstrass_curve(ring, a, b, name=None):
    """y^2 = x^3 + a x + b with its standard chart at infinity."""
    p = ring.p
    if p == 2:
        raise NonSmooth("short Weierstrass models are singular in characteristic 2")
    disc = (4 * a ** 3 + 27 * b ** 2) % p
    if disc == 0:
        raise NonSmooth("discriminant vanishes mod %d" % (p,))
    aff = Presentation("Eaff", ring, ("x", "y"),
                       relations=["y^2 - x^3 - %d*x - %d" % (a % p, b % p)])
    inf = Presentation("Einf", ring, ("w", "z"),
                       relations=["w^3 - z + %d*w*z^2 + %d*z^3" % (a % p, b % p)])
    paff = aff.localize(("y",))
    pinf = inf.localize(("z",))
    ov = Overlap(0, 1, "y", "z",
                 to_j={"x": parse_poly("w*z_inv", ring, pinf.all_vars),
                       "y": parse_poly("-z_inv", ring, pinf.all_vars)},
                 to_i={"w": parse_poly("-x*y_inv", ring, paff.all_vars),
                       "z": parse_poly("-y_inv", ring, paff.all_vars)})
    return GluedScheme(name or "E[%d,%d]" % (a % p, b % p), ring, [aff, inf], [ov],
                       genus=1, family="weierstrass")


def _poly_text_from_coeffs(coeffs, var):
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        if k == 0:
            parts.append(str(c))
        elif k == 1:
            parts.append("%d*%s" % (c, var))
        else:
            parts.append("%d*%s^%d" % (c, var, k))
    if not parts:
        return "0"
    return " + ".join(parts)


def _univariate_separable(coeffs, p):
    """gcd(h, h') constant over F_p for h given low-to-high."""
    a = [c % p for c in coeffs]
    b = [(k * c) % p for k, c in enumerate(coeffs)][1:]

    def trim(u):
        while u and u[-1] == 0:
            u.pop()
        return u

    a, b = trim(list(a)), trim(list(b))
    while b:
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b):
            if a[-1]:
                f = (a[-1] * inv) % p
                shift = len(a) - len(b)
                for t in range(len(b)):
                    a[shift + t] = (a[shift + t] - f * b[t]) % p
            trim(a)
            if not a:
                break
        a, b = b, a
    return len(a) == 1


def hyperelliptic_curve(ring, h_coeffs, name=None):
    """y^2 = h(x), h given low-to-high; two charts, w^2 = v^(2g+2) h(1/v)."""
    p = ring.p
    if p == 2:
        raise NonSmooth("y^2 = h(x) is singular in characteristic 2")
    h = [c % p for c in h_coeffs]
    while h and h[-1] == 0:
        h.pop()
    d = len(h) - 1
    if d < 3:
        raise WfError("need deg h >= 3")
    g = (d - 1) // 2
    mdeg = g + 1
    # twisted model: w^2 = sum h_k v^(2g+2-k)
    ht = [0] * (2 * g + 3)
    for k, c in enumerate(h):
        ht[2 * g + 2 - k] = c
    if not _univariate_separable(h, p):
        raise NonSmooth("h has a repeated root mod %d" % (p,))
    if not _univariate_separable(ht, p):
        raise NonSmooth("the chart at infinity is singular mod %d" % (p,))
    aff = Presentation("Haff", ring, ("x", "y"),
                       relations=["y^2 - (%s)" % (_poly_text_from_coeffs(h, "x"),)])
    inf = Presentation("Hinf", ring, ("v", "w"),
                       relations=["w^2 - (%s)" % (_poly_text_from_coeffs(ht, "v"),)])
    paff = aff.localize(("x",))
    pinf = inf.localize(("v",))
    ov = Overlap(0, 1, "x", "v",
                 to_j={"x": parse_poly("v_inv", ring, pinf.all_vars),
                       "y": parse_poly("w*v_inv^%d" % (mdeg,), ring, pinf.all_vars)},
                 to_i={"v": parse_poly("x_inv", ring, paff.all_vars),
                       "w": parse_poly("y*x_inv^%d" % (mdeg,), ring, paff.all_vars)})
    return GluedScheme(name or "H[deg %d]" % (d,), ring, [aff, inf], [ov],
                       genus=g, family="hyperelliptic")


BUILTIN_SCHEMES = {
    "a1": lambda ring: affine_space(ring, 1),
    "a2": lambda ring: affine_space(ring, 2),
    "a3": lambda ring: affine_space(ring, 3),
    "gm": multiplicative_group,
    "p1": projective_line,
    "p2": projective_plane,
    "weierstrass": lambda ring: weierstrass_curve(ring, 1, 0),
    "genus2": lambda ring: hyperelliptic_curve(ring, [-1, 0, 0, 0, 0, 1]),
}


# -- built-in morphisms ----------------------------------------------------------


def imm_parabola(ring):
    """V(y - x^2) inside the affine plane, a closed immersion."""
    curve = GluedScheme("parabola", ring,
                        [Presentation("C", ring, ("x", "y"), relations=["y - x^2"])],
                        family="affine")
    plane = affine_space(ring, 2)
    src = curve.patches[0]
    tgt = plane.patches[0]
    chart = ChartMap(0,
                     pullback={"x": parse_poly("x", ring, src.all_vars),
                               "y": parse_poly("y", ring, src.all_vars)},
                     section={"x": parse_poly("x", ring, tgt.all_vars),
                              "y": parse_poly("y", ring, tgt.all_vars)})
    return SchemeMorphism("parabola_in_a2", curve, plane, [chart],
                          kind="closed_immersion")


def proj_plane_to_line(ring):
    plane = affine_space(ring, 2)
    line = affine_space(ring, 1)
    chart = ChartMap(0, pullback={"x": parse_poly("x", ring,
                                                  plane.patches[0].all_vars)})
    return SchemeMorphism("a2_to_a1", plane, line, [chart], kind="projection")


def etale_gm_square(ring):
    src = GluedScheme("Gm", ring, [Presentation("Gm", ring, ("x",), inverted=("x",))],
                      family="torus")
    tgt = GluedScheme("Gm", ring, [Presentation("Gm", ring, ("t",), inverted=("t",))],
                      family="torus")
    chart = ChartMap(0, pullback={"t": parse_poly("x^2", ring,
                                                  src.patches[0].all_vars)})
    return SchemeMorphism("gm_square", src, tgt, [chart], kind="etale")


def weierstrass_in_p2(ring, a=1, b=0):
    curve = weierstrass_curve(ring, a, b)
    plane = projective_plane(ring)
    aff, inf = curve.patches
    u0, _, u2 = plane.patches
    chart0 = ChartMap(0,
                      pullback={"a": parse_poly("x", ring, aff.all_vars),
                                "b": parse_poly("y", ring, aff.all_vars)},
                      section={"x": parse_poly("a", ring, u0.all_vars),
                               "y": parse_poly("b", ring, u0.all_vars)})
    chart1 = ChartMap(2,
                      pullback={"e": parse_poly("-z", ring, inf.all_vars),
                                "g": parse_poly("-w", ring, inf.all_vars)},
                      section={"w": parse_poly("-g", ring, u2.all_vars),
                               "z": parse_poly("-e", ring, u2.all_vars)})
    return SchemeMorphism("weierstrass_in_p2", curve, plane, [chart0, chart1],
                          kind="closed_immersion")


BUILTIN_MORPHISMS = {
    "parabola_in_a2": imm_parabola,
    "a2_to_a1": proj_plane_to_line,
    "gm_square": etale_gm_square,
    "weierstrass_in_p2": lambda ring: weierstrass_in_p2(ring, 1, 0),
}
