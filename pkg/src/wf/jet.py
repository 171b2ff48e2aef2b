"""First jet spaces of glued presentations and their linearizations.

The jet space of one chart adjoins a jet variable per coordinate
(companions included) and imposes the prolonged relations next to the
original ones.  Everything here is exact over the base ring; the mod-pi
linearization splits each prolonged relation into a constant part and a
twisted Jacobian row, which is the data the lift solver consumes.

On a localized chart the jet of the companion u = 1/v is not free: the
prolonged relation u^q dv + v^q du + pi du dv = 0 determines du, and
since pi is nilpotent at finite precision the solution is an honest
polynomial in u and dv.  companion_jet_poly builds it; the étale
base-change check substitutes it before solving numerically.
"""

from __future__ import annotations

from .delta import DeltaContext, jet_name
from .errors import NonLinear, NotEtale, WfError
from .poly import MvPoly
from .scheme import Presentation, relative_jacobian_unit


class JetPresentation:
    """Chart of the jet space: doubled variables, prolonged relations."""

    __slots__ = ("pres", "dctx", "generators", "base_count")

    def __init__(self, pres: Presentation):
        self.pres = pres
        self.dctx = DeltaContext(pres.ring, pres.all_vars)
        self.base_count = len(pres.all_vars)
        gens = []
        for g in pres.relations:
            gens.append(g.extend_vars(self.dctx.all_vars))
        for u, v in pres.loc_pairs:
            prod = (MvPoly.var(pres.ring, pres.all_vars, u)
                    * MvPoly.var(pres.ring, pres.all_vars, v) - 1)
            gens.append(prod.extend_vars(self.dctx.all_vars))
        originals = list(gens)
        for g in originals:
            gens.append(self.dctx.prolong(g))
        self.generators = tuple(gens)

    @property
    def all_vars(self):
        return self.dctx.all_vars

    def to_json(self):
        return {"chart": self.pres.name,
                "vars": list(self.pres.all_vars),
                "jet_vars": list(self.dctx.jet_vars),
                "generators": [g.to_text() for g in self.generators]}

    def __repr__(self):
        return "JetPresentation(%s, %d generators)" % (self.pres.name,
                                                       len(self.generators))


def jet_presentation(pres: Presentation) -> JetPresentation:
    return JetPresentation(pres)


# -- linearization mod pi -----------------------------------------------------


class LinearRow:
    """delta(g) = const + sum_v jac[v] * (jet of v), taken mod pi."""

    __slots__ = ("generator", "const", "jac")

    def __init__(self, generator, const, jac):
        self.generator = generator
        self.const = const
        self.jac = jac  # base-or-companion variable name -> residue poly

    def __repr__(self):
        inner = ", ".join("%s: %s" % (v, g.to_text())
                          for v, g in sorted(self.jac.items()))
        return "LinearRow(%s; %s)" % (self.const.to_text(), inner)


class LinearizedJet:
    __slots__ = ("pres", "rows")

    def __init__(self, pres, rows):
        self.pres = pres
        self.rows = tuple(rows)


def linearize_generator(pres: Presentation, dctx: DeltaContext, g: MvPoly) -> LinearRow:
    """Split prolong(g) mod pi into constant and Jacobian parts.

    Raises NonLinear if any jet-degree >= 2 term survives mod pi; the
    prolongation of a polynomial never produces one, so this only fires
    on hand-supplied generators that are not honest prolongations.
    """
    dg = dctx.prolong(g)
    n = len(pres.all_vars)
    res = pres.res
    const_terms = {}
    jac_terms = {name: {} for name in pres.all_vars}
    for e, c in dg.terms.items():
        cr = c.residue()
        if res.is_zero(cr):
            continue
        jdeg = sum(e[n:])
        base = e[:n]
        if jdeg == 0:
            const_terms[base] = res.add(const_terms.get(base, 0), cr)
        elif jdeg == 1:
            j = next(k for k in range(n) if e[n + k])
            name = pres.all_vars[j]
            bucket = jac_terms[name]
            bucket[base] = res.add(bucket.get(base, 0), cr)
        else:
            raise NonLinear(
                "prolonged generator %s has a mod-pi term of jet degree %d"
                % (g.to_text(), jdeg))
    const = pres.nf(MvPoly(res, pres.all_vars, const_terms))
    jac = {}
    for name, bucket in jac_terms.items():
        poly = pres.nf(MvPoly(res, pres.all_vars, bucket))
        if not poly.is_zero():
            jac[name] = poly
    return LinearRow(g, const, jac)


def linearize_mod_pi(pres: Presentation) -> LinearizedJet:
    """Linear rows for every relation and companion product of the chart."""
    dctx = DeltaContext(pres.ring, pres.all_vars)
    rows = []
    gens = list(pres.relations)
    for u, v in pres.loc_pairs:
        prod = (MvPoly.var(pres.ring, pres.all_vars, u)
                * MvPoly.var(pres.ring, pres.all_vars, v) - 1)
        gens.append(prod)
    for g in gens:
        rows.append(linearize_generator(pres, dctx, g))
    return LinearizedJet(pres, rows)


def twisted_jacobian(pres: Presentation, g: MvPoly, name: str) -> MvPoly:
    """Independent route to the Jacobian entry: dg/dname, exponents scaled
    by q, reduced mod pi.  linearize_generator must agree with this."""
    if g.vars != pres.all_vars:
        g = g.extend_vars(pres.all_vars)
    d = g.partial(name).q_power_vars(pres.q)
    return pres.nf(pres.to_res(d))


def collapse_companion_jets(pres: Presentation, row: LinearRow) -> LinearRow:
    """Eliminate companion jets via du = -u^(2q) dv (mod pi)."""
    res = pres.res
    q = pres.q
    jac = {v: row.jac.get(v, MvPoly.zero(res, pres.all_vars)) for v in pres.vars}
    for u, v in pres.loc_pairs:
        coeff = row.jac.get(u)
        if coeff is None or coeff.is_zero():
            continue
        shift = MvPoly.var(res, pres.all_vars, u, 2 * q) * coeff
        jac[v] = pres.nf(jac[v] - shift)
    jac = {v: g for v, g in jac.items() if not g.is_zero()}
    return LinearRow(row.generator, row.const, jac)


# -- companion jets at full precision ----------------------------------------


def companion_jet_poly(pres: Presentation, dctx: DeltaContext, u: str, v: str) -> MvPoly:
    """delta(u) as a polynomial in u and the jet of v, exact at precision N.

    From u^q dv + v^q du + pi du dv = 0 and u v = 1:
    du = -u^(2q) dv * sum_{k<N} (-pi u^q dv)^k, the geometric series being
    finite because pi^N = 0 at the working precision.
    """
    ring = pres.ring
    N = ring.precision
    q = pres.q
    vars = dctx.all_vars
    uq = MvPoly.var(ring, vars, u, q)
    vdot = MvPoly.var(ring, vars, jet_name(v))
    t = MvPoly.const(ring, vars, ring.pi()) * uq * vdot
    geom = MvPoly.const(ring, vars, 1)
    power = MvPoly.const(ring, vars, 1)
    for _ in range(1, N):
        power = -(power * t)
        if power.is_zero():
            break
        geom = geom + power
    return -(MvPoly.var(ring, vars, u, 2 * q) * vdot * geom)


def substitute_companion_jets(pres: Presentation, dctx: DeltaContext, f: MvPoly) -> MvPoly:
    """Rewrite companion jet variables through companion_jet_poly."""
    if f.vars != dctx.all_vars:
        f = f.extend_vars(dctx.all_vars)
    mapping = {name: MvPoly.var(pres.ring, dctx.all_vars, name)
               for name in dctx.all_vars}
    for u, v in pres.loc_pairs:
        mapping[jet_name(u)] = companion_jet_poly(pres, dctx, u, v)
    return f.subst(mapping, ring=pres.ring, vars=dctx.all_vars)


# -- sampling and the étale base-change check ---------------------------------


def random_elem(ring, rng, unit=False):
    """Uniform element of the truncated base ring; a unit if requested."""
    moduli = ring.moduli(ring.precision)
    coeffs = [rng.randrange(m) for m in moduli]
    if unit and coeffs[0] % ring.p == 0:
        coeffs[0] += 1  # p divides every modulus, so this stays in range
    return ring.elem(coeffs)


def sample_point(pres: Presentation, rng):
    """Random base-ring point of a relation-free chart, companions set."""
    if pres.relations:
        raise WfError("point sampling is only supported on relation-free charts")
    point = {}
    for v in pres.vars:
        point[v] = random_elem(pres.ring, rng, unit=(v in pres.inverted))
    for u, v in pres.loc_pairs:
        point[u] = point[v].inverse()
    return point


def _solve_unit_system(ring, mat, rhs):
    """Solve mat * x = rhs over the base ring; pivots must be units."""
    n = len(rhs)
    m = [row[:] for row in mat]
    b = rhs[:]
    perm = list(range(n))
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col].is_unit():
                piv = r
                break
        if piv is None:
            raise NotEtale("jet system pivot is not a unit")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            b[col], b[piv] = b[piv], b[col]
        inv = m[col][col].inverse()
        for r in range(n):
            if r == col:
                continue
            f = m[r][col] * inv
            if f.is_zero():
                continue
            for c2 in range(col, n):
                m[r][c2] = m[r][c2] - f * m[col][c2]
            b[r] = b[r] - f * b[col]
    return [b[r] * m[r][r].inverse() for r in range(n)]


def induced_jet_solve(morphism, chart_index, point, target_jets):
    """Jet values over a source point matching given target jets.

    Solves delta(pullback(t)) = dt for the source jets by Newton
    iteration; the twisted relative Jacobian must stay a unit at the
    point, otherwise NotEtale.  Returns a dict over source jet names.
    """
    src = morphism.source.patches[chart_index]
    tgt = morphism.target_patch(chart_index)
    ring = src.ring
    dctx = DeltaContext(ring, src.all_vars)
    names = list(src.vars)
    systems = []
    for tname in tgt.vars:
        img = morphism.charts[chart_index].pullback[tname]
        dimg = substitute_companion_jets(src, dctx, dctx.prolong(img))
        systems.append((tname, dimg,
                        [dimg.partial(jet_name(x)) for x in names]))
    guess = {jet_name(x): ring.zero() for x in names}
    env = dict(point)
    for extra in dctx.all_vars:
        env.setdefault(extra, ring.zero())
    for _ in range(ring.precision + 2):
        env.update(guess)
        residuals = []
        for tname, dimg, _ in systems:
            residuals.append(dimg.evaluate(env) - target_jets[tname])
        if all(r.is_zero() for r in residuals):
            return dict(guess)
        mat = [[d.evaluate(env) for d in partials]
               for _, _, partials in systems]
        try:
            step = _solve_unit_system(ring, mat, residuals)
        except NotEtale:
            raise NotEtale("induced jet system is singular at the sample point")
        for k, x in enumerate(names):
            guess[jet_name(x)] = guess[jet_name(x)] - step[k]
    raise NotEtale("induced jet iteration did not converge")


def etale_basechange_check(morphism, rng, samples=3):
    """Certify jets pull back bijectively along an étale morphism.

    Symbolic certificate first (unit twisted Jacobian per chart), then a
    numeric round trip at random points of every relation-free chart:
    push random source jets forward, solve back, demand recovery.
    """
    for i in range(len(morphism.charts)):
        relative_jacobian_unit(morphism, i)
    for i in range(len(morphism.charts)):
        src = morphism.source.patches[i]
        tgt = morphism.target_patch(i)
        if src.relations:
            continue
        ring = src.ring
        dctx = DeltaContext(ring, src.all_vars)
        pullbacks = {t: morphism.charts[i].pullback[t] for t in tgt.vars}
        prolonged = {t: substitute_companion_jets(src, dctx, dctx.prolong(g))
                     for t, g in pullbacks.items()}
        for _ in range(samples):
            point = sample_point(src, rng)
            jets = {jet_name(x): random_elem(ring, rng) for x in src.vars}
            env = dict(point)
            env.update(jets)
            for extra in dctx.all_vars:
                env.setdefault(extra, ring.zero())
            forward = {t: g.evaluate(env) for t, g in prolonged.items()}
            solved = induced_jet_solve(morphism, i, point, forward)
            for x in src.vars:
                if not (solved[jet_name(x)] == jets[jet_name(x)]):
                    raise NotEtale(
                        "jet round trip failed at a sample point of chart %d" % (i,))
    return True
