"""Exact arithmetic for the group-order and lifting-power bounds."""

import math
from itertools import product

import pytest

from wf.bounds import (PrimePower, abelian_subgroup_bound, bounds_report,
                       e_const, frob_power_bound, gsp_order, is_prime,
                       lcm_exponent_table, lcm_recipe, torelli_noninjective)
from wf.errors import WfError


def gl2_count(l):
    n = 0
    for a, b, c, d in product(range(l), repeat=4):
        if (a * d - b * c) % l:
            n += 1
    return n


def test_genus_one_order_matches_enumeration():
    for l in (2, 3, 5):
        assert gsp_order(1, l) == gl2_count(l)


def test_order_worked_values():
    assert gsp_order(1, 2) == 6
    assert gsp_order(1, 3) == 48
    assert gsp_order(1, 5) == 480
    assert gsp_order(1, 7) == 2016
    assert gsp_order(2, 2) == 720


def test_auxiliary_level_dodges_p():
    assert e_const(1, 3) == 480
    assert e_const(1, 2) == 480
    assert e_const(1, 5) == 2016
    assert e_const(2, 5) == gsp_order(2, 7)


def test_frob_power_bound_values():
    r, n = frob_power_bound(1, 3, 1)
    assert r == 960
    assert n == PrimePower(3, 960)
    r5, n5 = frob_power_bound(1, 5, 1)
    assert r5 == 4032
    assert n5 == PrimePower(5, 4032)
    # r scales linearly with the moduli-field degree, n does not
    r3, n3 = frob_power_bound(1, 3, 7)
    assert r3 == 7 * 960
    assert n3 == n


def test_abelian_subgroup_bound_values():
    assert abelian_subgroup_bound(1, 5) == 625
    assert abelian_subgroup_bound(2, 2) == 2048
    assert abelian_subgroup_bound(1, 2) == 16


def test_torelli_criterion():
    assert torelli_noninjective(2, 2) == (True, 5, 4)
    assert torelli_noninjective(2, 3) == (True, 7, 4)
    assert torelli_noninjective(10, 2) == (False, 45, 100)
    with pytest.raises(WfError):
        torelli_noninjective(1, 3)


def test_lcm_table_matches_math_lcm():
    for n in (1, 2, 10, 30, 100):
        table = lcm_exponent_table(n)
        got = 1
        for r, k in table.items():
            assert is_prime(r)
            assert r ** k <= n < r ** (k + 1)
            got *= r ** k
        assert got == math.lcm(*range(1, n + 1))
    with pytest.raises(WfError):
        lcm_exponent_table(10 ** 6 + 1)


def test_prime_power_expansion_gate():
    small = PrimePower(3, 4)
    assert small.is_small()
    assert small.value() == 81
    assert small.to_json() == {"base": 3, "exponent": 4, "decimal": "81"}
    big = PrimePower(3, 960)
    assert not big.is_small()
    with pytest.raises(WfError):
        big.value()
    assert big.to_json() == {"base": 3, "exponent": 960, "decimal": None}


def test_lcm_recipe_stays_symbolic_for_honest_inputs():
    rec = lcm_recipe(1, 3)
    assert rec["definition"] == "lcm(1..n)"
    assert rec["n"] == PrimePower(3, 960)
    assert rec["factor_exponents"] is None


def test_is_prime_edges():
    assert not is_prime(0)
    assert not is_prime(1)
    assert is_prime(2)
    assert is_prime(3)
    for n in (4, 9, 25, 49, 561, 2 ** 61 + 1, (10 ** 9 + 7) ** 2):
        assert not is_prime(n)
    assert is_prime(2 ** 61 - 1)
    assert is_prime(10 ** 9 + 7)


def test_input_gates():
    with pytest.raises(WfError):
        gsp_order(0, 5)
    with pytest.raises(WfError):
        gsp_order(1, 4)
    with pytest.raises(WfError):
        frob_power_bound(1, 3, 0)
    with pytest.raises(WfError):
        bounds_report(1, 6, 1)


def test_bounds_report_shape():
    rep = bounds_report(1, 3, 1)
    assert rep["e"] == 480
    assert rep["r_bound"] == 960
    assert rep["n"] == {"base": 3, "exponent": 960, "decimal": None}
    assert rep["gsp_order"] == 480
    assert rep["m"]["factor_exponents"] is None
    assert rep["torelli"] == {"applicable": False,
                              "reason": "the criterion needs genus at least 2"}
    rep2 = bounds_report(2, 2, 1)
    assert rep2["torelli"]["applicable"] is True
    assert rep2["torelli"]["noninjective"] is True
    assert rep2["torelli"]["h1_curve"] == 5
    assert rep2["torelli"]["h1_ab"] == 4
