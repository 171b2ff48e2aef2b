"""Jet-space charts, mod-pi linearization, and etale base change."""

import random

import pytest

from wf.base_ring import BaseRingSpec
from wf.delta import DeltaContext, jet_name
from wf.errors import NonLinear, NonSmooth, NotEtale
from wf.jet import (JetPresentation, collapse_companion_jets,
                    etale_basechange_check, induced_jet_solve,
                    linearize_generator, linearize_mod_pi)
from wf.poly import MvPoly, parse_poly
from wf.scheme import (BUILTIN_MORPHISMS, BUILTIN_SCHEMES, ChartMap,
                       SchemeMorphism, affine_space, multiplicative_group,
                       validate_morphism)


def all_builtin_schemes(p):
    ring = BaseRingSpec(p)
    out = []
    for name in sorted(BUILTIN_SCHEMES):
        try:
            out.append(BUILTIN_SCHEMES[name](ring))
        except NonSmooth:
            continue
    return out


def rand_poly(ring, vars, rng, deg=3, terms=4):
    out = {}
    for _ in range(terms):
        e = [0] * len(vars)
        for _ in range(rng.randint(0, deg)):
            e[rng.randrange(len(vars))] += 1
        out[tuple(e)] = ring.from_int(rng.randint(-9, 9))
    return MvPoly(ring, vars, out)


def test_jet_presentation_doubles_generators():
    ring = BaseRingSpec(3)
    curve = BUILTIN_SCHEMES["weierstrass"](ring)
    jp = JetPresentation(curve.patches[0])
    # one relation, no companions: original plus its prolongation
    assert len(jp.generators) == 2
    assert set(jp.all_vars) == {"x", "y", "x_dot", "y_dot"}
    gm = multiplicative_group(ring)
    jp2 = JetPresentation(gm.patches[0].localize(()))
    # companion product counts as a generator too
    assert len(jp2.generators) == 2


def test_linearize_never_nonlinear_on_corpus():
    for p in (2, 3, 5):
        for scheme in all_builtin_schemes(p):
            for pres in scheme.patches:
                rows = linearize_mod_pi(pres).rows
                assert len(rows) == len(pres.relations) + len(pres.loc_pairs)
            for (i, j) in scheme.overlap_pairs():
                view = scheme.view(i, j)
                linearize_mod_pi(view.pres_a)
                linearize_mod_pi(view.pres_b)


def test_jacobian_matches_symbolic_route():
    # the mod-pi Jacobian of delta(g) in the jet x_dot equals the partial
    # of the coefficientwise-Frobenius twist of g, evaluated at X^q
    rng = random.Random(51)
    count = 0
    for p in (2, 3, 5):
        ring = BaseRingSpec(p)
        q = ring.q
        for scheme in all_builtin_schemes(p):
            for pres in scheme.patches:
                dctx = DeltaContext(ring, pres.all_vars)
                for _ in range(4):
                    g = rand_poly(ring, pres.all_vars, rng)
                    row = linearize_generator(pres, dctx, g)
                    for v in pres.all_vars:
                        expect = pres.nf(pres.to_res(
                            g.frob_twist().partial(v).q_power_vars(q)))
                        got = row.jac.get(v)
                        assert expect == (got if got is not None
                                          else MvPoly.zero(expect.ring,
                                                           expect.vars))
                    count += 1
    assert count >= 60


def test_linearize_constant_part_is_delta_at_qth_powers():
    # with all jets set to zero the prolongation collapses to its constant
    ring = BaseRingSpec(3)
    pres = affine_space(ring, 2).patches[0]
    dctx = DeltaContext(ring, pres.all_vars)
    g = parse_poly("x^2*y + 2*x", ring, pres.all_vars)
    row = linearize_generator(pres, dctx, g)
    dg = dctx.prolong(g)
    zeroed = {v: MvPoly.var(ring, pres.all_vars, v) for v in pres.all_vars}
    zeroed.update({jet_name(v): MvPoly.zero(ring, pres.all_vars)
                   for v in pres.all_vars})
    collapsed = dg.subst(zeroed, ring=ring, vars=pres.all_vars)
    assert row.const == pres.nf(pres.to_res(collapsed))


def test_nonlinear_rejected():
    # honest prolongations are jet-linear mod pi, so the degree guard can
    # only fire on a context that hands back something quadratic in jets
    ring = BaseRingSpec(2)
    pres = affine_space(ring, 1, name="A1").patches[0]

    class RawCtx(DeltaContext):
        def prolong(self, f):
            return MvPoly.var(ring, self.all_vars, "x_dot") ** 2

    dctx = RawCtx(ring, pres.all_vars)
    g = MvPoly.var(ring, pres.all_vars, "x")
    with pytest.raises(NonLinear):
        linearize_generator(pres, dctx, g)


def test_collapse_companion_jets_eliminates_companions():
    ring = BaseRingSpec(3)
    gm = multiplicative_group(ring)
    pres = gm.patches[0]
    for row in linearize_mod_pi(pres).rows:
        collapsed = collapse_companion_jets(pres, row)
        assert all(v in pres.vars for v in collapsed.jac)


def test_etale_square_on_units_passes():
    for p in (3, 5):
        ring = BaseRingSpec(p)
        m = BUILTIN_MORPHISMS["gm_square"](ring)
        etale_basechange_check(m, random.Random(52), samples=3)


def test_affine_square_rejected_not_etale():
    ring = BaseRingSpec(3)
    a1 = affine_space(ring, 1, name="S")
    a1t = affine_space(ring, 1, name="T")
    sq = parse_poly("x^2", ring, a1.patches[0].all_vars)
    m = SchemeMorphism("a1_square", a1, a1t,
                       [ChartMap(0, {"x": sq})], kind="etale")
    with pytest.raises(NotEtale):
        validate_morphism(m)


def test_induced_jet_solve_round_trip():
    rng = random.Random(53)
    ring = BaseRingSpec(5)
    m = BUILTIN_MORPHISMS["gm_square"](ring)
    src = m.source.patches[0]
    dctx = DeltaContext(ring, src.all_vars)
    from wf.jet import random_elem, sample_point, substitute_companion_jets
    point = sample_point(src, rng)
    jets = {jet_name(v): random_elem(ring, rng) for v in src.vars}
    env = dict(point)
    env.update(jets)
    for extra in dctx.all_vars:
        env.setdefault(extra, ring.zero())
    forward = {}
    for t in m.target_patch(0).vars:
        img = m.charts[0].pullback[t]
        dimg = substitute_companion_jets(src, dctx, dctx.prolong(img))
        forward[t] = dimg.evaluate(env)
    solved = induced_jet_solve(m, 0, point, forward)
    for v in src.vars:
        assert solved[jet_name(v)] == jets[jet_name(v)]
