import random
from itertools import product

import pytest

from topsocle.algebra.coeff_ring import make_ring
from topsocle.cohomology.socle import SocleReport
from topsocle.cohomology.top_lc import HypersurfaceF
from topsocle.errors import ScenarioError, UsageError
from topsocle.services.annihilator import GradedIdeal, ann_coker_upto, build_An, ideal_equal_upto
from topsocle.services.scenarios import (
    ScenarioConfig,
    TriState,
    Verdict,
    check_sop,
    coefficient_ideal,
    complement_closure_check,
    decide_verdict,
    delta_matrix,
    delta_matrix_check,
    is_m_primary_upto,
    is_two_term_disjoint,
    l_ell,
    l_summand_basis,
    load_preset,
    module_annihilator_profile,
    override_ells,
    required_ells,
    scenario_from_file,
    vanishing_check,
    verify_theorem,
)
from topsocle.utils.expressions import parse_coefficient


def _alphas(basis):
    return [b.alpha for b in basis]


# Hypothesis checks


def test_coefficient_ideal(hartshorne, example12, uv_ring):
    assert str(coefficient_ideal(hartshorne)) == "(u, v)"
    assert str(coefficient_ideal(example12)) == "(u^4, v^8)"
    assert str(coefficient_ideal(HypersurfaceF.parse(uv_ring, "3*x^2"))) == "(1)"


def test_m_primary(uv_ring, example12):
    u, v = parse_coefficient(uv_ring, "u"), parse_coefficient(uv_ring, "v")
    assert is_m_primary_upto(GradedIdeal(uv_ring, [u, v]), 4) == TriState.YES
    assert is_m_primary_upto(GradedIdeal(uv_ring, [u]), 24) == TriState.NO
    assert is_m_primary_upto(GradedIdeal(uv_ring, [uv_ring.one()]), 4) == TriState.NO
    assert is_m_primary_upto(coefficient_ideal(example12), 24) == TriState.YES
    # (u^4, v^8) still has nonzero quotient at the top of a short band
    assert is_m_primary_upto(coefficient_ideal(example12), 8) == TriState.INCONCLUSIVE
    with pytest.raises(UsageError):
        is_m_primary_upto(GradedIdeal(uv_ring, [u]), 0)


def test_check_sop(hartshorne, example12, uv_ring, unit_f):
    assert check_sop(hartshorne).state == TriState.YES
    assert check_sop(example12).state == TriState.YES
    assert check_sop(HypersurfaceF.parse(uv_ring, "u*x + u*v*y")).state == TriState.NO
    assert check_sop(unit_f).state == TriState.NO
    assert "dim T = 2" in check_sop(hartshorne).note


# Vanishing


def test_vanishing_with_unit_coefficient(unit_f):
    result = vanishing_check(unit_f, range(2, 6))
    assert str(result.f_bar) == "x"
    assert result.all_zero
    assert result.consistent


def test_vanishing_without_unit_coefficient(hartshorne):
    result = vanishing_check(hartshorne, range(2, 5))
    assert result.f_bar is None
    assert result.coker_totals == {2: 1, 3: 3, 4: 6}
    assert result.consistent


def test_vanishing_in_small_characteristic():
    f = HypersurfaceF.parse(make_ring(characteristic=7), "3*x^2")
    result = vanishing_check(f, range(2, 6))
    assert result.f_bar is not None
    assert result.all_zero


def _random_hypersurface(rnd, n, unit):
    """
    Random f of x-degree p, combined-homogeneous under random x-weights

    With ``unit`` the heaviest x-monomial gets a scalar coefficient;
    otherwise every coefficient has positive degree.
    """
    ring = make_ring("poly", ("u", "v"), ("x", "y", "z")[:n])
    w = [rnd.randint(1, 2) for _ in range(n)]
    p = rnd.randint(1, 2)
    monomials = [g for g in product(range(p + 1), repeat=n) if sum(g) == p]
    chosen = rnd.sample(monomials, rnd.randint(1, min(3, len(monomials))))
    weight = {g: sum(a * b for a, b in zip(w, g)) for g in chosen}
    top = max(weight.values()) + (0 if unit else rnd.randint(1, 2))
    terms = []
    for g in chosen:
        deg = top - weight[g]
        a = rnd.randint(0, deg)
        factors = [str(rnd.randint(1, 6))]
        factors += [f"{name}^{e}" for name, e in (("u", a), ("v", deg - a)) if e]
        factors += [f"{name}^{e}" for name, e in zip(ring.x_var_names, g) if e]
        terms.append("*".join(factors))
    return HypersurfaceF.parse(ring, " + ".join(terms))


@pytest.mark.parametrize("unit", [True, False])
def test_vanishing_on_random_hypersurfaces(unit):
    rnd = random.Random(20240 + unit)
    for _ in range(4):
        n = rnd.choice([2, 3])
        f = _random_hypersurface(rnd, n, unit)
        result = vanishing_check(f, range(n, n + 3))
        assert result.consistent, str(f)
        assert result.all_zero == unit, str(f)


@pytest.mark.slow
@pytest.mark.parametrize("unit", [True, False])
def test_vanishing_sweep_on_random_hypersurfaces(unit):
    rnd = random.Random(7 + unit)
    for _ in range(20):
        n = rnd.choice([2, 3])
        f = _random_hypersurface(rnd, n, unit)
        result = vanishing_check(f, range(n, 13))
        assert result.consistent, str(f)
        assert result.all_zero == unit, str(f)


def test_vanishing_stays_inside_the_default_window(uv_ring):
    f = HypersurfaceF.parse(uv_ring, "u*x*y + 4*u*y^2")
    result = vanishing_check(f, range(2, 7))
    assert result.consistent
    assert result.coker_totals[2] >= 1
    assert all(hi < 200 for _, hi in result.windows.values())


# L-summand


def test_l_summand_basis(hartshorne, example12):
    assert _alphas(l_summand_basis(hartshorne, 1)) == [(2, 1), (1, 2)]
    assert _alphas(l_summand_basis(hartshorne, 2)) == [(3, 1), (2, 2), (1, 3)]
    assert _alphas(l_summand_basis(example12, 0)) == [(1, 1, 1)]
    assert _alphas(l_summand_basis(example12, 1)) == [(3, 1, 1), (1, 2, 2)]
    assert l_ell(example12, 2) == 7


def test_l_summand_needs_two_disjoint_terms(uv_ring):
    overlapping = HypersurfaceF.parse(uv_ring, "u*x^2 + v*x*y")
    three = HypersurfaceF.parse(make_ring(x_vars=("x", "y", "z")), "u*x + v*y + u*z")
    for f in (overlapping, three):
        assert not is_two_term_disjoint(f)
        with pytest.raises(ScenarioError):
            l_summand_basis(f, 1)


def test_delta_matrix_is_bidiagonal(hartshorne, example12):
    check = delta_matrix_check(hartshorne, 1)
    assert check
    assert str(check.matrix) == "[u, v, 0; 0, u, v]"
    assert str(delta_matrix(example12, 0)) == "[u^4, v^8]"
    assert str(delta_matrix(example12, 1)) == "[u^4, v^8, 0; 0, u^4, v^8]"
    for q in range(0, 7):
        assert delta_matrix_check(hartshorne, q)
        assert delta_matrix_check(example12, q)


def test_complement_closure(hartshorne, example12):
    assert all(complement_closure_check(hartshorne, q) for q in range(0, 7))
    assert all(complement_closure_check(example12, q) for q in range(0, 7))


def test_complement_closure_on_random_two_term_forms():
    rnd = random.Random(5)
    names = ("x", "y", "z", "w")
    for _ in range(10):
        n = rnd.randint(2, 4)
        k = rnd.randint(1, n - 1)
        p = rnd.randint(1, 2)
        ring = make_ring("poly", ("u", "v"), names[:n])
        first = _split_degree(rnd, p, k) + (0,) * (n - k)
        second = (0,) * k + _split_degree(rnd, p, n - k)
        f = HypersurfaceF.parse(ring, f"u*{_x_monomial(names, first)} + v*{_x_monomial(names, second)}")
        assert is_two_term_disjoint(f)
        for q in range(0, 4):
            assert complement_closure_check(f, q), (str(f), q)
            assert delta_matrix_check(f, q), (str(f), q)


def _split_degree(rnd, p, parts):
    """Random exponent vector with the given number of entries summing to p"""
    cuts = sorted(rnd.randint(0, p) for _ in range(parts - 1))
    bounds = [0] + cuts + [p]
    return tuple(b - a for a, b in zip(bounds, bounds[1:]))


def _x_monomial(names, g):
    return "*".join(f"{name}^{e}" for name, e in zip(names, g) if e)


def test_delta_annihilator_matches_family(hartshorne, example12):
    for q in range(0, 4):
        cap = 2 * q + 4
        assert ideal_equal_upto(ann_coker_upto(delta_matrix(hartshorne, q), cap), ann_coker_upto(build_An(q + 1, hartshorne.ring), cap), cap)


def test_module_annihilator_profile(hartshorne):
    assert module_annihilator_profile(hartshorne, [2, 3, 4], 6) == {2: 1, 3: 2, 4: 3}


# Verification


def _report(ell, certified=True):
    return SocleReport(ell, 1, (0, 4), certified, {})


def test_decide_verdict():
    table = [_report(2)]
    assert decide_verdict(TriState.YES, TriState.YES, [], [2]) == Verdict.PASS
    assert decide_verdict(TriState.NO, TriState.YES, [], []) == Verdict.FAIL
    assert decide_verdict(TriState.YES, TriState.YES, [], [], ["ell=2"]) == Verdict.FAIL
    assert decide_verdict(TriState.YES, TriState.YES, table, [2]) == Verdict.FAIL
    assert decide_verdict(TriState.YES, TriState.YES, [_report(2, False)], [2]) == Verdict.INCONCLUSIVE
    assert decide_verdict(TriState.INCONCLUSIVE, TriState.YES, [], []) == Verdict.INCONCLUSIVE


def test_required_ells(hartshorne, example12, uv_ring):
    assert required_ells(hartshorne, [2, 3, 4]) == [2, 3, 4]
    assert required_ells(example12, range(3, 10)) == [3, 5, 7, 9]
    overlapping = HypersurfaceF.parse(uv_ring, "u*x^2 + v*x*y")
    assert required_ells(overlapping, [2, 3]) == [2, 3]


def test_verify_hartshorne(hartshorne):
    report = verify_theorem(ScenarioConfig(hartshorne.ring, hartshorne, list(range(2, 9))))
    assert report.sop_check == TriState.YES
    assert report.support_check == TriState.YES
    assert report.verdict == Verdict.PASS
    assert report.to_dict()["verdict"] == "pass"


def test_verify_fails_with_unit_coefficient(unit_f):
    report = verify_theorem(ScenarioConfig(unit_f.ring, unit_f, list(range(2, 6))))
    assert report.sop_check == TriState.NO
    assert report.verdict == Verdict.FAIL
    assert all(r.coker_total == 0 for r in report.socle_table)


def test_verdict_is_invariant_under_scaling(hartshorne):
    scaled = hartshorne.scaled(5)
    report = verify_theorem(ScenarioConfig(scaled.ring, scaled, [2, 3, 4]))
    assert report.verdict == Verdict.PASS


def test_verify_example12_first_pieces():
    cfg = override_ells(scenario_from_file(load_preset("example12")), qmax=2)
    assert cfg.ells == [3, 5, 7]
    report = verify_theorem(cfg)
    assert report.verdict == Verdict.PASS
    assert report.required_ells == [3, 5, 7]


def test_presets_load():
    hart = scenario_from_file(load_preset("hartshorne"))
    assert hart.ells == list(range(2, 31))
    assert hart.preset == "hartshorne"
    assert str(hart.f) == "u*x + v*y"
    ex = scenario_from_file(load_preset("example12"), characteristic=0)
    assert ex.ells == [3, 5, 7, 9, 11, 13, 15, 17, 19]
    assert ex.ring.characteristic == 0
    assert override_ells(hart, lmin=5, lmax=7).ells == [5, 6, 7]
    with pytest.raises(UsageError):
        load_preset("nope")


def test_flags_widen_a_preset():
    hart = scenario_from_file(load_preset("hartshorne"))
    assert override_ells(hart, lmax=33).ells == list(range(2, 34))
    assert override_ells(hart, lmin=1, lmax=3).ells == [1, 2, 3]
    ex = scenario_from_file(load_preset("example12"))
    assert override_ells(ex, qmax=10).ells == [2 * q + 3 for q in range(11)]
    assert override_ells(ex, lmax=25).ells == [2 * q + 3 for q in range(12)]
    assert override_ells(ex, lmin=6, lmax=9).ells == [7, 9]
    assert override_ells(ex) is ex
    with pytest.raises(UsageError):
        override_ells(hart, lmin=9, lmax=4)
    with pytest.raises(UsageError):
        override_ells(ex, qmax=-1)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["hartshorne", "example12"])
def test_full_presets_pass(name):
    report = verify_theorem(scenario_from_file(load_preset(name)))
    assert report.verdict == Verdict.PASS
