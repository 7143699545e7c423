import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypvol import hypgeom as h
from hypvol.hypgeom import GeometryError, HPoint, ObtusenessClass
from hypvol.specfun import catalan, v_n

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def euclid_dihedral(P):
    """Euclidean dihedral angles of a tetrahedron, keyed by the edge."""
    out = {}
    for e in itertools.combinations(range(4), 2):
        i, j = e
        k, l = [v for v in range(4) if v not in e]
        d = P[j] - P[i]
        d /= np.linalg.norm(d)

        def perp(v):
            w = P[v] - P[i]
            w = w - np.dot(w, d) * d
            return w / np.linalg.norm(w)

        out[e] = math.acos(np.clip(np.dot(perp(k), perp(l)), -1, 1))
    return out


def test_minkowski_inner():
    assert h.minkowski_inner((1, 0, 0, 0), (1, 0, 0, 0)) == -1
    assert h.minkowski_inner((1, 1, 0, 0), (1, 1, 0, 0)) == 0
    assert h.minkowski_inner((1, 0, 0, 0), (1, 1, 0, 0)) == -1
    with pytest.raises(ValueError):
        h.minkowski_inner((1, 0), (1, 0, 0))


def test_hpoint_validation():
    HPoint((1.0, 0.0, 0.0, 0.0))
    HPoint((1.0, 1.0, 0.0, 0.0), "ideal")
    with pytest.raises(GeometryError):
        HPoint((2.0, 0.0, 0.0, 0.0))
    with pytest.raises(GeometryError):
        HPoint((-1.0, 0.0, 0.0, 0.0))
    with pytest.raises(GeometryError):
        HPoint((1.0, 0.0, 0.0, 0.0), "ideal")
    p = HPoint.from_klein([0.3, -0.2, 0.1])
    assert np.allclose(p.klein, [0.3, -0.2, 0.1])
    assert abs(HPoint((1.0, 0, 0, 0)).distance(HPoint.from_klein([math.tanh(1.0), 0, 0])) - 1.0) < 1e-12


def test_straighten_idempotent_and_degenerate():
    rng = np.random.default_rng(0)
    S = h.random_compact_simplex(rng)
    assert h.straighten(S.vertices) == S
    assert not S.degenerate
    flat = h.straighten([HPoint.from_klein(p) for p in
                         ([0.1, 0.2, 0.0], [0.3, -0.1, 0.0], [-0.2, 0.0, 0.0], [0.0, 0.4, 0.0])])
    assert flat.degenerate
    assert h.signed_volume(flat) == 0.0
    assert h.orientation_sign(flat) == 0


def test_regular_ideal_volumes():
    assert abs(h.signed_volume(h.regular_ideal_simplex(3)) - 1.014942) < 1e-5
    assert abs(h.signed_volume(h.regular_ideal_simplex(2), 1e-6) - math.pi) < 1e-4


def test_swap_negates_volume():
    rng = np.random.default_rng(1)
    S = h.random_compact_simplex(rng)
    v = S.vertices
    T = h.straighten((v[1], v[0]) + v[2:])
    assert abs(h.signed_volume(S) + h.signed_volume(T)) < 2e-9


def test_regular_angles():
    for a in h.dihedral_angles(h.regular_ideal_simplex(3)).values():
        assert abs(a - math.pi / 3) < 1e-9
    angles4 = list(h.dihedral_angles(h.regular_ideal_simplex(4)).values())
    assert max(angles4) - min(angles4) < 1e-9
    # Vertex links are regular Euclidean tetrahedra, with dihedral angle arccos(1/3).
    assert abs(angles4[0] - math.acos(1 / 3)) < 1e-9
    assert 2 < math.pi / angles4[0] < 3


def test_tiny_regular_simplex_is_euclidean():
    S = h.regular_compact_simplex(3, 1e-3)
    for a in h.dihedral_angles(S).values():
        assert abs(a - math.acos(1 / 3)) < 1e-2
    assert h.classify_obtuseness(S) is ObtusenessClass.NO_NONACUTE


def test_dihedral_angles_match_euclidean_oracle_near_origin():
    # The Klein model is conformal to first order at the origin.
    rng = np.random.default_rng(5)
    for _ in range(10):
        P = rng.uniform(-1, 1, size=(4, 3)) * 1e-4
        S = h.straighten([HPoint.from_klein(p) for p in P])
        ref = euclid_dihedral(P)
        for e, a in h.dihedral_angles(S).items():
            assert abs(a - ref[e]) < 1e-5


def test_ideal_tetra_volume_examples():
    assert abs(h.ideal_tetra_volume(math.pi / 3, math.pi / 3, math.pi / 3) - 1.014942) < 1e-6
    assert abs(h.ideal_tetra_volume(math.pi / 2, math.pi / 4, math.pi / 4) - 0.915965) < 1e-6
    assert abs(h.ideal_tetra_volume(0.0, 1.0, math.pi - 1.0)) < 1e-12
    with pytest.raises(GeometryError):
        h.ideal_tetra_volume(1.0, 1.0, 1.0)


def test_ideal_angles_and_milnor():
    rng = np.random.default_rng(7)
    for _ in range(10):
        S = h.random_ideal_simplex(rng)
        ang = h.dihedral_angles(S)
        a, b, c = h.ideal_tetra_angles(S)
        assert abs(a + b + c - math.pi) < 1e-9
        # Opposite edges subtend equal angles.
        assert abs(ang[(0, 1)] - ang[(2, 3)]) < 1e-9
        assert abs(ang[(0, 2)] - ang[(1, 3)]) < 1e-9
        assert abs(abs(h.signed_volume(S, 1e-6)) - h.ideal_tetra_volume(a, b, c)) < 1e-5
    with pytest.raises(GeometryError):
        h.ideal_tetra_angles(h.random_compact_simplex(rng))


def test_two_obtuse_construction():
    # Apex projects beyond the edges AB and AC of the base triangle, which share A.
    P = np.array([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0], [0.0, 0.1, 0.0], [-0.03, -0.03, 0.05]])
    S = h.straighten([HPoint.from_klein(p) for p in P])
    assert h.classify_obtuseness(S) is ObtusenessClass.TWO_OBTUSE
    ref = euclid_dihedral(P)
    obtuse = {e for e, a in ref.items() if a >= math.pi / 2}
    assert {(0, 1), (0, 2)} <= obtuse
    assert obtuse == {e for e, a in h.dihedral_angles(S).items() if a >= math.pi / 2}
    assert abs(h.signed_volume(S)) <= v_n(3) / 2


def test_obtuseness_from_angles_classes():
    acute = {e: 1.0 for e in itertools.combinations(range(4), 2)}
    assert h.obtuseness_from_angles(acute) is ObtusenessClass.NO_NONACUTE
    one = {**acute, (0, 1): 2.0}
    assert h.obtuseness_from_angles(one) is ObtusenessClass.ONE_OBTUSE
    # Two obtuse opposite edges share no vertex: still only one_obtuse.
    opp = {**one, (2, 3): 2.0}
    assert h.obtuseness_from_angles(opp) is ObtusenessClass.ONE_OBTUSE
    two = {**one, (1, 2): 2.0}
    assert h.obtuseness_from_angles(two) is ObtusenessClass.TWO_OBTUSE
    three = {**two, (0, 2): 2.0}
    assert h.obtuseness_from_angles(three) is ObtusenessClass.THREE_OBTUSE
    boundary = {**acute, (0, 1): math.pi / 2 - 1e-12}
    assert h.obtuseness_from_angles(boundary) is ObtusenessClass.NO_NONACUTE
    assert h.obtuseness_from_angles(boundary, atol=1e-9) is ObtusenessClass.ONE_OBTUSE


def test_classify_rejects_ideal():
    with pytest.raises(GeometryError):
        h.classify_obtuseness(h.regular_ideal_simplex(3))


def test_near_maximal_angle_check():
    chk = h.near_maximal_angle_check(h.regular_ideal_simplex(4), 0.01)
    assert chk.holds and not chk.vacuous
    assert all(2 < r < 3 for r in chk.pi_over_angle)
    thin = h.regular_compact_simplex(4, 0.1)
    chk = h.near_maximal_angle_check(thin, 0.01)
    assert chk.holds and chk.vacuous
    with pytest.raises(GeometryError):
        h.near_maximal_angle_check(h.regular_ideal_simplex(3), 0.01)


def test_one_obtuse_maximizer():
    (a, b, c), val = h.one_obtuse_ideal_maximizer()
    assert max(abs(a - math.pi / 2), abs(b - math.pi / 4), abs(c - math.pi / 4)) < 1e-4
    assert abs(val - catalan()) < 1e-6
    assert val <= v_n(3)
    (a, b, c), _ = h.one_obtuse_ideal_maximizer(alpha=2 * math.pi / 3)
    assert abs(b - math.pi / 6) < 1e-6 and abs(c - math.pi / 6) < 1e-6


def test_simplex_from_json():
    S = h.simplex_from_json({"n": 3, "vertices": [[1, 0, 0, 1], [1, 0, 1, 0], [1, 1, 0, 0],
                                                  [1, -3**-0.5, -3**-0.5, -3**-0.5]],
                             "kinds": ["ideal"] * 4})
    assert S.is_ideal and abs(abs(h.signed_volume(S)) - v_n(3)) < 1e-8


@settings(max_examples=25)
@given(seeds)
def test_lorentz_invariance(seed):
    rng = np.random.default_rng(seed)
    S = h.random_compact_simplex(rng, radius=2.0)
    L = h.random_lorentz(rng, 3, 1.0)
    T = h.apply_lorentz(S, L)
    assert abs(h.signed_volume(S) - h.signed_volume(T)) <= 2e-9
    a, b = h.dihedral_angles(S), h.dihedral_angles(T)
    assert all(abs(a[k] - b[k]) < 1e-8 for k in a)


@settings(max_examples=15)
@given(seeds)
def test_subdivision_additivity(seed):
    rng = np.random.default_rng(seed)
    S = h.random_compact_simplex(rng, radius=2.0)
    total = abs(h.signed_volume(S))
    c = h.HPoint.from_klein(S.klein.mean(axis=0))
    parts = 0.0
    for j in range(4):
        verts = list(S.vertices)
        verts[j] = c
        parts += abs(h.signed_volume(h.straighten(verts)))
    assert abs(total - parts) <= 3 * 1e-9


@settings(max_examples=40)
@given(seeds)
def test_volume_ceiling(seed):
    rng = np.random.default_rng(seed)
    S = h.random_ideal_simplex(rng) if seed % 2 else h.random_compact_simplex(rng)
    assert abs(h.signed_volume(S, 1e-7)) <= v_n(3) + 1e-7


@settings(max_examples=40)
@given(seeds)
def test_never_three_obtuse(seed):
    S = h.random_compact_simplex(np.random.default_rng(seed))
    assert h.classify_obtuseness(S, atol=1e-9) is not ObtusenessClass.THREE_OBTUSE
