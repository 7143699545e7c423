import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypvol import cycles as cy
from hypvol import hypgeom as h
from hypvol import pseudo as ps
from hypvol.cycles import ChainError, ChainTerm, IntegralChain, RealChain, RealTerm

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def symbolic_boundary_norm(z):
    """Oracle: expand the boundary as a multiset of signed keys."""
    pos, neg = Counter(), Counter()
    for t in z.terms:
        for j, k in enumerate(t.face_keys):
            (pos if (-1) ** j * t.sign > 0 else neg)[k] += 1
    return sum(abs(pos[k] - neg[k]) for k in set(pos) | set(neg))


def triangle():
    return RealChain(1, (RealTerm(1 / 3 + 1e-12, ("b", "a")),
                         RealTerm(1 / 3, ("c", "b")),
                         RealTerm(1 / 3, ("a", "c"))))


def test_single_term():
    z = IntegralChain(3, (ChainTerm(1, ("a", "b", "c", "d")),))
    P, unmatched = cy.chain_to_pseudomanifold(z)
    assert P.simplex_count == 1 and unmatched == 4 and P.pairings == ()


def test_opposite_pair_closes_up():
    keys = ("a", "b", "c", "d")
    z = IntegralChain(3, (ChainTerm(1, keys), ChainTerm(-1, keys)))
    P, unmatched = cy.chain_to_pseudomanifold(z)
    assert unmatched == 0 and len(P.pairings) == 4
    assert ps.boundary(P).simplex_count == 0
    assert ps.signs_orient(P, (1, -1))


def test_bad_terms_rejected():
    with pytest.raises(ChainError):
        ChainTerm(2, ("a", "b", "c", "d"))
    with pytest.raises(ChainError):
        IntegralChain(3, (ChainTerm(1, ("a", "b")),))
    with pytest.raises(ChainError):
        IntegralChain.from_json({"n": 3, "terms": [{"faces": ["a"]}]})


@settings(max_examples=100)
@given(seeds)
def test_unmatched_equals_boundary_norm(seed):
    z = cy.random_chain(np.random.default_rng(seed))
    P, unmatched = cy.chain_to_pseudomanifold(z)
    assert ps.validate(P) == []
    assert unmatched == symbolic_boundary_norm(z) == cy.boundary_l1(z)
    assert len(P.boundary_faces()) == unmatched


@settings(max_examples=100)
@given(seeds)
def test_chain_pseudomanifold_oriented_by_signs(seed):
    z = cy.random_chain(np.random.default_rng(seed), key_pool=5)
    P, _ = cy.chain_to_pseudomanifold(z)
    assert ps.signs_orient(P, cy.orientation_from_signs(z))
    assert ps.orientability(P) is not None


def test_rationalize_triangle():
    z = triangle()
    w = cy.rationalize_cycle(z, 1e-9)
    _, A = cy.cycle_matrix(z)
    assert cy.is_cycle_exact(A, w.coefficients)
    assert all(isinstance(c, Fraction) for c in w.coefficients)
    assert max(abs(float(a) - b) for a, b in zip(w.coefficients, z.coefficients)) < 1e-9


def test_rationalize_keeps_rational_input():
    z = RealChain(1, (RealTerm(0.5, ("b", "a")), RealTerm(0.5, ("c", "b")), RealTerm(0.5, ("a", "c"))))
    w = cy.rationalize_cycle(z, 1e-6)
    assert w.coefficients == [Fraction(1, 2)] * 3


def test_rationalize_normalizer():
    z = triangle()
    w = cy.rationalize_cycle(z, 1e-9, normalizer=[1, 1, 1])
    assert sum(w.coefficients) == 1


def test_rationalize_rejects_non_cycle():
    z = RealChain(1, (RealTerm(1.0, ("b", "a")),))
    with pytest.raises(ChainError):
        cy.rationalize_cycle(z, 1e-6)
    with pytest.raises(ValueError):
        cy.rationalize_cycle(triangle(), 0.0)


@settings(max_examples=10)
@given(seeds)
def test_rationalize_random_cycles(seed):
    z = cy.random_real_cycle(np.random.default_rng(seed), size=5)
    w = cy.rationalize_cycle(z, 1e-6)
    _, A = cy.cycle_matrix(z)
    assert cy.is_cycle_exact(A, w.coefficients)
    assert max(abs(float(a) - b) for a, b in zip(w.coefficients, z.coefficients)) < 1e-6


def test_supplementary_pair_angle_sum():
    z = cy.supplementary_pair_chain()
    rep = cy.audit_geometric_cycle(z, 1, 1.0, 4.0, 0.1)
    assert all(v > 0 for v in rep.per_simplex_volumes)
    assert min(abs(d) for d in rep.angle_sum_deviation.values()) < 1e-6
    assert rep.t == (0, 0, 0, 2, 0)
    assert rep.E_bad == 9 and rep.E_nice == 0
    assert rep.warnings


def test_direct_angle_sum_oracle():
    # Independent of the boundary walk: sum the two dihedral angles at v0 v1 directly.
    z = cy.supplementary_pair_chain()
    a, b = (h.straighten(t.vertices) for t in z.terms)
    total = h.dihedral_angle(a, (0, 1)) + h.dihedral_angle(b, (0, 1))
    assert abs(total - math.pi) < 1e-9


def test_single_tetrahedron_audit():
    rng = np.random.default_rng(2)
    S = h.random_compact_simplex(rng)
    if h.orientation_sign(S) < 0:
        S = h.straighten((S.vertices[1], S.vertices[0]) + S.vertices[2:])
    z = IntegralChain(3, (ChainTerm(1, ("a", "b", "c", "d"), S.vertices),))
    rep = cy.audit_geometric_cycle(z, 1, 1.0, 4.0, 0.1)
    assert len(rep.boundary_angle_sums) == 6
    assert all(abs(d) > 1e-3 for d in rep.angle_sum_deviation.values())
    assert rep.N_small == 1
    assert not rep.inequality_flags["angle_sums_pi"]


def test_closed_configuration():
    S = h.regular_ideal_simplex(3)
    keys = ("a", "b", "c", "d")
    # The same simplex with opposite signs cancels on every face.
    z = IntegralChain(3, (ChainTerm(1, keys, S.vertices), ChainTerm(-1, keys, S.vertices)))
    rep = cy.audit_geometric_cycle(z, 1, 1.0, 0.0, 0.1)
    assert rep.boundary_angle_sums == {}
    assert abs(rep.total_algebraic_volume) < 1e-9


def test_incompatible_positions():
    a = h.regular_compact_simplex(3, 1.0)
    b = h.regular_compact_simplex(3, 1.1)
    z = IntegralChain(3, (ChainTerm(1, ("s", "b", "c", "d"), a.vertices),
                          ChainTerm(1, ("e", "s", "f", "g"), b.vertices)))
    with pytest.raises(ChainError):
        cy.audit_geometric_cycle(z, 1, 1.0, 0.0, 0.1)
    z2 = IntegralChain(3, (ChainTerm(1, ("a", "b", "c", "d")),))
    with pytest.raises(ChainError):
        cy.audit_geometric_cycle(z2, 1, 1.0, 0.0, 0.1)


def test_chain_json():
    S = h.regular_compact_simplex(3, 0.5)
    obj = {"n": 3, "terms": [{"sign": 1, "faces": ["f0", "f1", "f2", "f3"],
                              "vertices": [list(v.coords) for v in S.vertices]}]}
    z = IntegralChain.from_json(obj)
    assert z.terms[0].vertices == S.vertices
