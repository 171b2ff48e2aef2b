"""Lift search, obstruction cocycles, coboundary decisions, compatibility."""

import pytest

from wf.base_ring import BaseRingSpec
from wf.errors import (Inconclusive, KindMismatch, NoSolutionAtBound, WfError)
from wf.di import (LocalLift, build_compatible_lifts, coboundary_of,
                   compatibility_check, completeness_threshold,
                   compute_di_class, di_cocycle, di_cocycle_pair, express_fder,
                   is_coboundary, lift_discrepancy, local_frobenius_lift,
                   zero_sections)
from wf.jet import collapse_companion_jets, linearize_mod_pi
from wf.poly import MvPoly, parse_poly
from wf.scheme import (BUILTIN_MORPHISMS, BUILTIN_SCHEMES, SchemeMorphism,
                       weierstrass_curve)


def collapsed_rows(pres):
    return [collapse_companion_jets(pres, row)
            for row in linearize_mod_pi(pres).rows]


def assert_admissible_by_rows(pres, coeffs):
    # the defining linear condition, recomputed outside the solver
    for row in collapsed_rows(pres):
        acc = row.const
        for v in pres.vars:
            jac = row.jac.get(v)
            if jac is not None:
                acc = acc + jac * coeffs[v]
        assert pres.nf(acc).is_zero()


# -- local lifts --------------------------------------------------------------


def test_local_lift_worked_values():
    aff3 = weierstrass_curve(BaseRingSpec(3), 1, 0).patches[0]
    lift = local_frobenius_lift(aff3)
    assert lift.degree == 9
    assert lift.coeffs["x"].to_text() == "x*y^4 + 2*x^2*y^2"
    assert lift.coeffs["y"].to_text() == "0"
    aff5 = weierstrass_curve(BaseRingSpec(5), 1, 0).patches[0]
    lift5 = local_frobenius_lift(aff5)
    assert lift5.coeffs["x"].to_text() == "4*x*y^4 + 2*x^2*y^2"
    assert lift5.coeffs["y"].to_text() == "x^2*y^5 + x*y^3 + 3*y"


def test_free_chart_lift_is_plain_frobenius():
    ring = BaseRingSpec(3)
    pres = BUILTIN_SCHEMES["a1"](ring).patches[0]
    lift = local_frobenius_lift(pres)
    assert lift.fder.is_zero()
    assert lift.phi_images()["x"] == parse_poly("x^3", ring, pres.all_vars)


def test_solved_lifts_satisfy_rows_and_verify():
    for p in (3, 5):
        ring = BaseRingSpec(p)
        charts = [weierstrass_curve(ring, 1, 0).patches[0],
                  weierstrass_curve(ring, 1, 0).patches[1],
                  BUILTIN_SCHEMES["gm"](ring).patches[0],
                  BUILTIN_SCHEMES["p1"](ring).patches[1]]
        for pres in charts:
            lift = local_frobenius_lift(pres)
            assert lift.verify() is True
            assert_admissible_by_rows(pres, lift.coeffs)


def test_zero_lift_rejected_on_weierstrass():
    pres = weierstrass_curve(BaseRingSpec(3), 1, 0).patches[0]
    with pytest.raises(WfError):
        LocalLift(pres, {}).verify()


def test_kernel_perturbation_preserves_admissibility():
    # adding a tangent section moves within the space of admissible lifts
    ring = BaseRingSpec(3)
    pres = weierstrass_curve(ring, 1, 0).patches[0]
    lift = local_frobenius_lift(pres)
    for h_text in ("x + 1", "y", "2*x*y"):
        h = pres.to_res(parse_poly(h_text, ring, pres.all_vars))
        tangent = {"x": pres.nf(-MvPoly.var(pres.res, pres.all_vars, "y", 3)
                                * h),
                   "y": h}
        perturbed = {v: pres.nf(lift.coeffs[v] + tangent[v])
                     for v in pres.vars}
        other = LocalLift(pres, perturbed)
        assert other.verify() is True
        assert_admissible_by_rows(pres, other.coeffs)
        # the difference of two admissible lifts solves the homogeneous
        # system: it is killed by every Jacobian row
        for row in collapsed_rows(pres):
            acc = MvPoly.zero(pres.res, pres.all_vars)
            for v in pres.vars:
                jac = row.jac.get(v)
                if jac is not None:
                    acc = acc + jac * (other.coeffs[v] - lift.coeffs[v])
            assert pres.nf(acc).is_zero()


# -- cocycles -----------------------------------------------------------------


def test_cocycle_antisymmetry_across_sides():
    ring = BaseRingSpec(3)
    p1 = BUILTIN_SCHEMES["p1"](ring)
    lifts = [local_frobenius_lift(pres) for pres in p1.patches]
    d01 = di_cocycle_pair(p1, lifts, 0, 1)
    d10 = di_cocycle_pair(p1, lifts, 1, 0)
    view = p1.view(0, 1)
    moved = express_fder(d10.coeffs, view.pres_b, view.pres_a,
                         view.map_ab, view.map_ba)
    assert moved == -d01


def test_cocycle_checks_pass_on_three_charts():
    ring = BaseRingSpec(3)
    p2 = BUILTIN_SCHEMES["p2"](ring)
    lifts = [local_frobenius_lift(pres) for pres in p2.patches]
    cochain = di_cocycle(p2, lifts, check=True)
    assert set(cochain.values) == {(0, 1), (0, 2), (1, 2)}


def test_zero_sections_have_zero_coboundary():
    ring = BaseRingSpec(3)
    p1 = BUILTIN_SCHEMES["p1"](ring)
    assert coboundary_of(p1, zero_sections(p1)).is_zero()


# -- vanishing decisions -------------------------------------------------------


def recheck_witness(rep):
    back = coboundary_of(rep.scheme, rep.witness)
    for key, val in rep.cochain.values.items():
        assert back.values[key] == val


def test_rational_schemes_vanish_with_witness():
    for name in ("a2", "gm", "p1", "p2"):
        scheme = BUILTIN_SCHEMES[name](BaseRingSpec(3))
        rep = compute_di_class(scheme)
        assert rep.vanishes is True
        assert rep.threshold == completeness_threshold(scheme)
        recheck_witness(rep)
    for p in (2, 5):
        rep = compute_di_class(BUILTIN_SCHEMES["p1"](BaseRingSpec(p)))
        assert rep.vanishes is True
        recheck_witness(rep)


def test_weierstrass_verdicts():
    rep3 = compute_di_class(weierstrass_curve(BaseRingSpec(3), 1, 0))
    assert rep3.vanishes is False
    assert rep3.witness is None
    assert rep3.threshold == 12
    rep5 = compute_di_class(weierstrass_curve(BaseRingSpec(5), 1, 0))
    assert rep5.vanishes is True
    recheck_witness(rep5)


def test_genus2_definitive_negative_and_inconclusive_bound():
    scheme = BUILTIN_SCHEMES["genus2"](BaseRingSpec(3))
    rep = compute_di_class(scheme)
    assert rep.threshold == 18
    assert rep.pole_bound == 18
    assert rep.vanishes is False
    assert rep.witness is None
    with pytest.raises(Inconclusive) as exc:
        is_coboundary(scheme, rep.cochain, pole_bound=4)
    assert exc.value.bound == 4
    assert exc.value.threshold == 18


def test_perturbed_lift_family_same_class():
    # the class does not depend on the choice of chart lifts
    ring = BaseRingSpec(3)
    p1 = BUILTIN_SCHEMES["p1"](ring)
    u0 = p1.patches[0]
    odd = LocalLift(u0, {"x": u0.to_res(parse_poly("x^2 + 1", ring,
                                                   u0.all_vars))})
    assert odd.verify() is True
    lifts = [odd, local_frobenius_lift(p1.patches[1])]
    cochain = di_cocycle(p1, lifts, check=True)
    assert not cochain.is_zero()
    vanishes, sections = is_coboundary(p1, cochain)
    assert vanishes is True
    back = coboundary_of(p1, sections)
    for key, val in cochain.values.items():
        assert back.values[key] == val


def test_di_report_json_shape():
    rep = compute_di_class(BUILTIN_SCHEMES["p1"](BaseRingSpec(3)))
    data = rep.to_json()
    assert data["vanishes"] is True
    assert data["scheme"] == "P1"
    assert "0,1" in data["cocycle"]
    assert len(data["witness"]) == 2
    for entry in data["lifts"]:
        assert set(entry) == {"chart", "degree", "delta"}
    neg = compute_di_class(weierstrass_curve(BaseRingSpec(3), 1, 0))
    assert "witness" not in neg.to_json()


# -- compatibility -------------------------------------------------------------


INDEPENDENT_COMPATIBLE = {
    "parabola_in_a2": True,
    "a2_to_a1": True,
    "gm_square": True,
    "weierstrass_in_p2": False,
}


def independent_lifts(m):
    xs = [local_frobenius_lift(pres) for pres in m.source.patches]
    ys = [local_frobenius_lift(pres) for pres in m.target.patches]
    return xs, ys


def test_compat_constructed_lifts_commute():
    for p in (3, 5):
        ring = BaseRingSpec(p)
        for make in BUILTIN_MORPHISMS.values():
            m = make(ring)
            xs, ys = build_compatible_lifts(m)
            rep = compatibility_check(m, xs, ys)
            assert rep.compatible is True
            assert all(g.is_zero() for e in rep.discrepancy
                       for g in e.values())


def test_compat_independent_lifts_verdicts():
    for name, make in BUILTIN_MORPHISMS.items():
        m = make(BaseRingSpec(3))
        xs, ys = independent_lifts(m)
        rep = compatibility_check(m, xs, ys)
        assert rep.compatible is INDEPENDENT_COMPATIBLE[name]
        zero = all(g.is_zero() for e in lift_discrepancy(m, xs, ys)
                   for g in e.values())
        assert rep.compatible is zero
    m5 = BUILTIN_MORPHISMS["weierstrass_in_p2"](BaseRingSpec(5))
    xs, ys = independent_lifts(m5)
    assert compatibility_check(m5, xs, ys).compatible is False


def test_compat_report_json_shape():
    m = BUILTIN_MORPHISMS["weierstrass_in_p2"](BaseRingSpec(3))
    xs, ys = build_compatible_lifts(m)
    data = compatibility_check(m, xs, ys).to_json()
    assert data["morphism"] == "weierstrass_in_p2"
    assert data["kind"] == "closed_immersion"
    assert data["compatible"] is True
    assert len(data["charts"]) == 2
    assert len(data["pairs"]) == 1
    assert data["pairs"][0]["identity_checked"] is True


def test_fixed_target_lifts_solved_or_refused():
    ring = BaseRingSpec(3)
    m = BUILTIN_MORPHISMS["gm_square"](ring)
    tgt = m.target.patches[0]
    ys = [local_frobenius_lift(tgt)]
    xs, ys_out = build_compatible_lifts(m, y_lifts=ys)
    assert ys_out == list(ys)
    assert compatibility_check(m, xs, ys_out).compatible is True
    # a high-degree target choice forces A_x = 2 x^7, out of reach at
    # coefficient degree one
    forced = LocalLift(tgt, {"t": tgt.to_res(parse_poly("t^5", ring,
                                                        tgt.all_vars))})
    assert forced.verify() is True
    with pytest.raises(NoSolutionAtBound) as exc:
        build_compatible_lifts(m, y_lifts=[forced], start_degree=1,
                               max_degree=1)
    assert exc.value.bound == 1
    xs2, _ = build_compatible_lifts(m, y_lifts=[forced])
    src = m.source.patches[0]
    assert xs2[0].coeffs["x"] == src.nf(src.to_res(
        parse_poly("2*x^7", ring, src.all_vars)))
    assert compatibility_check(m, xs2, [forced]).compatible is True


def test_unsupported_kind_refused():
    ring = BaseRingSpec(3)
    m = BUILTIN_MORPHISMS["gm_square"](ring)
    bare = SchemeMorphism(m.name, m.source, m.target, m.charts, kind=None)
    with pytest.raises(KindMismatch):
        build_compatible_lifts(bare)
