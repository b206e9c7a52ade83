from itertools import combinations

import pytest
import sympy

from topsocle.algebra.coeff_ring import CoeffPoly
from topsocle.cohomology.top_lc import GradedMap
from topsocle.errors import UsageError
from topsocle.services.annihilator import (
    GradedIdeal,
    ann_coker_upto,
    ann_family,
    build_An,
    default_ring,
    family_intersection_mindeg,
    ideal_equal_upto,
    maximal_ideal_power,
    maximal_minors,
)
from topsocle.utils.expressions import parse_coefficient, parse_matrix


@pytest.fixture
def ring():
    return default_ring(32003)


def _gens(ideal):
    return [str(g) for g in ideal.generators]


def _sympy_minors(ring, text):
    u, v = sympy.symbols("u v")
    M = sympy.Matrix([[sympy.sympify(c, locals={"u": u, "v": v}) for c in row.split(",")] for row in text.split(";")])
    r = M.rows
    dets = []
    for cols in combinations(range(M.cols), r):
        det = sympy.expand(M[:, list(cols)].det())
        if det != 0:
            terms = {tuple(m): int(c) for m, c in sympy.Poly(det, u, v).terms()}
            dets.append(CoeffPoly(ring, {e: ring.field.from_int(c) for e, c in terms.items()}))
    return GradedIdeal(ring, dets)


def test_build_An(ring):
    assert str(build_An(1, ring)) == "[u, v]"
    assert str(build_An(3, ring)) == "[u, v, 0, 0; 0, u, v, 0; 0, 0, u, v]"
    assert build_An(3, ring).source_degrees == (1, 1, 1, 1)
    with pytest.raises(UsageError):
        build_An(0, ring)


def test_small_minors(ring):
    assert _gens(maximal_minors(build_An(1, ring))) == ["u", "v"]
    assert _gens(maximal_minors(build_An(2, ring))) == ["u^2", "u*v", "v^2"]


def test_zero_matrix_has_zero_minors(ring):
    A = GradedMap.from_matrix(ring, parse_matrix(ring, "0,0"))
    assert maximal_minors(A).generators == []
    assert str(maximal_minors(A)) == "(0)"


def test_more_rows_than_columns(ring):
    A = GradedMap.from_matrix(ring, parse_matrix(ring, "u;v"))
    with pytest.raises(UsageError):
        maximal_minors(A)


@pytest.mark.parametrize("text", ["u,v,0;0,u,v", "u,v,u+v;v,0,u", "u,v,0,0;0,u,v,0;0,0,u,v"])
def test_minors_match_sympy(ring, text):
    ours = maximal_minors(GradedMap.from_matrix(ring, parse_matrix(ring, text)))
    assert ideal_equal_upto(ours, _sympy_minors(ring, text), 6)


def test_minors_are_powers_of_m(ring):
    for n in range(1, 11):
        minors = maximal_minors(build_An(n, ring))
        assert len(minors.generators) == n + 1
        assert ideal_equal_upto(minors, maximal_ideal_power(ring, n), 2 * n + 2)


def test_annihilator_of_small_cokernels(ring):
    assert _gens(ann_coker_upto(build_An(1, ring), 4)) == ["u", "v"]
    assert _gens(ann_coker_upto(build_An(2, ring), 6)) == ["u^2", "u*v", "v^2"]


def test_annihilators_equal_powers_of_m(ring):
    for n in range(1, 7):
        ann = ann_coker_upto(build_An(n, ring), 2 * n + 2)
        assert ann.min_degree(2 * n + 2) == n
        assert ideal_equal_upto(ann, maximal_ideal_power(ring, n), 2 * n + 2)


def test_minors_lie_in_annihilator(ring):
    for n in range(1, 6):
        A = build_An(n, ring)
        ann = ann_coker_upto(A, 2 * n + 2)
        assert all(ann.contains(g) for g in maximal_minors(A).generators)


def test_ideal_comparison_witness(ring):
    m = GradedIdeal(ring, [parse_coefficient(ring, "u"), parse_coefficient(ring, "v")])
    u_only = GradedIdeal(ring, [parse_coefficient(ring, "u")])
    result = ideal_equal_upto(m, u_only, 3)
    assert not result
    assert result.degree == 1
    assert str(result.witness) == "v"
    assert ideal_equal_upto(m, m, 3)


def test_graded_ideal_normalizes_generators(ring):
    ideal = GradedIdeal(ring, [parse_coefficient(ring, "3*v^2"), parse_coefficient(ring, "v^2"), parse_coefficient(ring, "u")])
    assert _gens(ideal) == ["u", "v^2"]
    assert ideal.contains(parse_coefficient(ring, "u*v + 2*v^3"))
    assert not ideal.contains(parse_coefficient(ring, "v"))
    with pytest.raises(UsageError):
        GradedIdeal(ring, [parse_coefficient(ring, "u + v^2")])


def test_maximal_ideal_power_over_semigroup(semigroup_ring):
    assert len(maximal_ideal_power(semigroup_ring, 1).generators) == 4
    assert len(maximal_ideal_power(semigroup_ring, 2).generators) == 9


def test_family_rows(ring):
    rows = ann_family(4, 8, ring)
    assert [r.n for r in rows] == [1, 2, 3, 4]
    assert all(r.ann_equals_uv_pow_n and r.minors_equal for r in rows)
    assert [r.mindeg_intersection_so_far for r in rows] == [1, 2, 3, 4]


def test_family_intersection_mindeg(ring):
    assert family_intersection_mindeg(1, 1, ring) == 1
    assert family_intersection_mindeg(4, 8, ring) == 4
    with pytest.raises(UsageError):
        family_intersection_mindeg(5, 4, ring)
    with pytest.raises(UsageError):
        ann_family(0, 4, ring)


def test_family_is_the_same_in_parallel(ring):
    assert ann_family(3, 6, ring, jobs=2) == ann_family(3, 6, ring, jobs=1)


@pytest.mark.slow
def test_family_up_to_ten(ring):
    assert family_intersection_mindeg(10, 24, ring) == 10
    rows = ann_family(10, 24, ring)
    assert all(r.ann_equals_uv_pow_n for r in rows)


@pytest.mark.parametrize(
    "N", [pytest.param(N, marks=pytest.mark.slow) if N > 6 else N for N in range(1, 11)]
)
def test_intersection_degree_grows_with_the_family(ring, N):
    assert family_intersection_mindeg(N, N + 4, ring) == N
