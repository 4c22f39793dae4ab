import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from invkloos.errors import BudgetExceeded
from invkloos.expsum import LaurentPoly, ik_laurent
from invkloos.gf import build_field
from invkloos.polytope import (build_polytope, det_int, diagonal_nondegenerate,
                               facial_ordinary, hnf_diagonal, hodge_data,
                               ik_polytope, ik_vertices,
                               nondegenerate_witness_search, ordinary_test,
                               weight)


# ----------------------------------------------------------------------
# construction
# ----------------------------------------------------------------------

def test_standard_simplex():
    for n in (1, 2, 3):
        pts = [tuple([0] * n)] + [tuple(1 if j == i else 0 for j in range(n))
                                  for i in range(n)]
        P = build_polytope(pts)
        assert P.D == 1
        assert len(P.gauge_facets) == 1
        fac = P.gauge_facets[0]
        assert fac.normal == tuple([1] * n) and fac.rhs == 1
        assert len(P.origin_facets) == n
        assert set(P.vertices) == set(pts)


def test_segment_d_equals_vertex_coordinate():
    P = build_polytope([(0,), (2,)])
    assert P.D == 2
    assert P.gauge_facets[0].functional() == (Fraction(1, 2),)


def test_redundant_points_discarded():
    P = build_polytope([(0, 0), (2, 0), (0, 2), (1, 0), (1, 1)])
    assert set(P.vertices) == {(0, 0), (2, 0), (0, 2)}


def test_not_full_dimensional_reports_dim():
    with pytest.raises(ValueError, match="dimension 1"):
        build_polytope([(0, 0), (1, 1), (2, 2)])


def test_newton_polyhedron_origin_handling():
    # classical Kloosterman direction: the origin is interior, not a vertex
    f = LaurentPoly(2, ((1, (1, 0)), (1, (0, 1)), (2, (-1, -1))))
    P = build_polytope(f)
    assert P.contains_origin
    assert (0, 0) not in P.vertices and not P.origin_facets
    # but it is a vertex whenever it is extreme
    g = LaurentPoly(2, ((1, (1, 0)), (1, (0, 1))))
    Q = build_polytope(g)
    assert (0, 0) in Q.vertices


def test_polytope_without_origin_detected():
    P = build_polytope([(1, 0), (2, 0), (1, 1)])
    assert not P.contains_origin
    with pytest.raises(ValueError):
        weight(P, (1, 0))


# ----------------------------------------------------------------------
# the specific (n+2)-dimensional polyhedron
# ----------------------------------------------------------------------

def test_ik_vertex_count_matches_figure():
    assert len(ik_vertices(1)) == 5          # V_0..V_4 in R^3
    ik = ik_polytope(1)
    assert len(ik.polytope.vertices) == 5
    assert len(ik.polytope.gauge_facets) == 2


@pytest.mark.parametrize("n", [1, 2, 3, 4, 8])
def test_ik_determinants_and_denominator(n):
    # n = 8 exercises the relaxed dimension cap of the tiny vertex set
    ik = ik_polytope(n)
    assert ik.det1 == -(n + 1)
    assert ik.det2 == n + 1
    assert ik.polytope.D == 1


def test_ik_facets_are_the_last_two_coordinates():
    ik = ik_polytope(2)
    normals = {f.normal for f in ik.polytope.gauge_facets}
    assert normals == {(0, 0, 1, 0), (0, 0, 0, 1)}


# ----------------------------------------------------------------------
# weights
# ----------------------------------------------------------------------

def test_weight_examples():
    ik = ik_polytope(2)
    P = ik.polytope
    assert weight(P, (0, 0, 0, 0)) == 0
    for v in ik.vertices[1:]:
        assert weight(P, v) == 1
    for k in range(5):
        assert weight(P, (0, 0, k, k)) == k
    assert weight(P, (0, 0, -1, 0)) == math.inf


def test_weight_in_lattice_over_D():
    P = build_polytope([(0, 0), (2, 0), (0, 3)])
    D = P.D
    for u in product(range(-2, 7), repeat=2):
        w = weight(P, u)
        if w is not math.inf:
            assert (w * D).denominator == 1


@given(st.integers(1, 3), st.data())
def test_gauge_subadditive_and_homogeneous(n, data):
    ik = ik_polytope(n)
    P = ik.polytope
    dim = n + 2

    def cone_point():
        # random nonnegative combination of vertices, rounded to lattice
        u = [0] * dim
        for v in ik.vertices[1:]:
            c = data.draw(st.integers(0, 2))
            u = [a + c * b for a, b in zip(u, v)]
        return tuple(u)

    u, v = cone_point(), cone_point()
    wu, wv = weight(P, u), weight(P, v)
    assert wu is not math.inf and wv is not math.inf
    assert weight(P, tuple(a + b for a, b in zip(u, v))) <= wu + wv
    c = data.draw(st.integers(0, 3))
    assert weight(P, tuple(c * a for a in u)) == c * wu


# ----------------------------------------------------------------------
# weight counts and Hodge numbers
# ----------------------------------------------------------------------

def test_unimodular_simplex_hodge():
    P = build_polytope([(0, 0), (1, 0), (0, 1)])
    hd = hodge_data(P, 4)
    # W(k) = #{u >= 0 : u1+u2 = k} = k+1; H = (1, 0, 0, ...)
    assert hd.W == (1, 2, 3, 4, 5)
    assert hd.H[:3] == (1, 0, 0)
    assert hd.normalized_volume == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_ik_hodge_numbers(n):
    ik = ik_polytope(n)
    hd = hodge_data(ik.polytope)
    assert hd.H[: n + 2] == tuple([1] + [2] * n + [1])
    assert all(h == 0 for h in hd.H[n + 2:])
    assert hd.normalized_volume == 2 * n + 2
    assert sum(hd.H) == 2 * n + 2


def test_hodge_polygon_vertices():
    hd = hodge_data(ik_polytope(1).polytope)
    # slopes 0,1,1,2,2,3 with lengths H = (1,2,1): breaks at x = 1, 3, 4
    assert hd.hodge_polygon[0] == (0, Fraction(0))
    assert (1, Fraction(0)) in hd.hodge_polygon
    assert (3, Fraction(2)) in hd.hodge_polygon
    assert (4, Fraction(4)) in hd.hodge_polygon


def test_box_cap_refusal():
    ik = ik_polytope(3)
    with pytest.raises(BudgetExceeded):
        hodge_data(ik.polytope, 40, box_cap=10 ** 4)


def _exact_face_weight(vcols, u):
    """Gauge of u for the simplex spanned by the origin and vcols (the
    columns may live in a higher-dimensional space): solve u = V lambda
    exactly; weight = sum lambda if lambda >= 0, else inf."""
    rows = len(u)
    cols = len(vcols)
    m = [[Fraction(vcols[j][i]) for j in range(cols)] + [Fraction(u[i])]
         for i in range(rows)]
    rank = 0
    pivots = []
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][c]
        m[rank] = [x * inv for x in m[rank]]
        for r in range(rows):
            if r != rank and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        pivots.append(c)
        rank += 1
    lam = [Fraction(0)] * cols
    for r, c in enumerate(pivots):
        lam[c] = m[r][cols]
    for r in range(rank, rows):
        if m[r][cols] != 0:
            return math.inf                 # u outside the span
    if any(x < 0 for x in lam):
        return math.inf
    return sum(lam)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_facial_inclusion_exclusion_of_weight_counts(n):
    # W_Delta = W_Delta1 + W_Delta2 - W_intersection, all four enumerated
    # independently (the intersection simplex via exact solves)
    ik = ik_polytope(n)
    verts = ik.vertices
    kmax = n + 2
    hd = hodge_data(ik.polytope, kmax)
    d1 = hodge_data(build_polytope([verts[0]] + list(verts[1: n + 3])), kmax)
    d2 = hodge_data(build_polytope(
        [verts[0]] + list(verts[1: n + 2]) + [verts[n + 3]]), kmax)
    inter_cols = list(verts[1: n + 2])
    lo = [min(0, *(v[i] for v in inter_cols)) * kmax for i in range(n + 2)]
    hi = [max(0, *(v[i] for v in inter_cols)) * kmax for i in range(n + 2)]
    w3 = [0] * (kmax + 1)
    for u in product(*(range(l, h + 1) for l, h in zip(lo, hi))):
        w = _exact_face_weight(inter_cols, u)
        if w is not math.inf and w * ik.polytope.D <= kmax:
            wd = w * ik.polytope.D
            assert wd.denominator == 1
            w3[int(wd)] += 1
    for k in range(kmax + 1):
        assert hd.W[k] == d1.W[k] + d2.W[k] - w3[k]


# ----------------------------------------------------------------------
# diagonal theory
# ----------------------------------------------------------------------

def test_det_int_and_hnf():
    assert det_int([[1, 2], [3, 4]]) == -2
    assert det_int([[2, 0], [0, 3]]) == 6
    assert det_int([[1, 1], [2, 2]]) == 0
    diag = hnf_diagonal([[2, 1], [0, 3]])
    assert math.prod(diag) == 6


def test_diagonal_nondegenerate_examples():
    ik = ik_polytope(1)
    assert not diagonal_nondegenerate(ik.M1, 2)      # 2 | det = -2
    assert diagonal_nondegenerate(ik.M1, 3)
    ident = [[1, 0], [0, 1]]
    for p in (2, 3, 5, 7):
        assert diagonal_nondegenerate(ident, p)
    with pytest.raises(ValueError, match="singular"):
        diagonal_nondegenerate([[1, 1], [1, 1]], 3)


def test_solution_group_order_equals_det():
    for n in (1, 2, 3, 4):
        ik = ik_polytope(n)
        for m, d in [(ik.M1, ik.det1), (ik.M2, ik.det2)]:
            group, _ = ordinary_test(m, 7)
            assert len(group.elements) == abs(d)


def test_solution_group_weight_one_element():
    for n in (1, 2, 3):
        ik = ik_polytope(n)
        group, _ = ordinary_test(ik.M1, 7)
        want = tuple([Fraction(1, n + 1)] * (n + 1) + [Fraction(0)])
        assert want in group.elements


def test_solution_group_closed_under_addition():
    group, _ = ordinary_test(ik_polytope(3).M1, 7)
    elems = set(group.elements)
    for r in elems:
        for s in elems:
            assert tuple((a + b) % 1 for a, b in zip(r, s)) in elems


def test_ordinary_iff_p_congruent_1():
    ik = ik_polytope(2)
    _, s7 = ordinary_test(ik.M1, 7)
    _, s5 = ordinary_test(ik.M1, 5)
    assert s7 and not s5
    # identity matrix: trivial group, ordinary for every p
    for p in (2, 3, 5):
        group, stable = ordinary_test([[1, 0], [0, 1]], p)
        assert stable and group.elements == ((Fraction(0), Fraction(0)),)


def test_segment_group():
    group, stable = ordinary_test([[2]], 3)
    assert group.elements == ((Fraction(0),), (Fraction(1, 2),))
    assert stable   # {3 * 1/2} = 1/2, norm preserved


def test_facial_ordinary_matches_congruence():
    for n in (1, 2, 3):
        for p in (2, 3, 5, 7, 11, 13):
            if (n + 1) % p == 0:
                continue
            F = build_field(p, 1)
            rep = facial_ordinary(ik_laurent(F, n, 1), p)
            assert rep.ordinary == (p % (n + 1) == 1)
            assert len(rep.facets) == 2


def test_facial_ordinary_single_variable():
    for p in (2, 3, 5):
        F = build_field(p, 1)
        f = LaurentPoly(1, ((1, (1,)),))
        rep = facial_ordinary(f, p)
        assert rep.ordinary


def test_facial_ordinary_rejects_nondiagonal():
    F = build_field(5, 1)
    f = LaurentPoly(2, ((1, (1, 0)), (1, (1, 1)), (1, (1, 2))))
    with pytest.raises(ValueError, match="diagonal"):
        facial_ordinary(f, 5)


def test_witness_search_three_values():
    # facet x1=1 carries 1 + x2 + x2^2 (times x1): degenerate over F_3
    f = LaurentPoly(2, ((1, (1, 0)), (1, (1, 1)), (1, (1, 2))))
    F3 = build_field(3, 1)
    res3 = nondegenerate_witness_search(f, F3)
    assert "degenerate" in res3.values()
    F5 = build_field(5, 1)
    res5 = nondegenerate_witness_search(f, F5)
    assert set(res5.values()) <= {"no-witness-found", "diagonal-certified"}
    # fully diagonal input certifies
    g = LaurentPoly(1, ((1, (2,)),))
    res = nondegenerate_witness_search(g, F5)
    assert list(res.values()) == ["diagonal-certified"]
