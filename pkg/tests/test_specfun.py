import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypvol import specfun
from hypvol.specfun import catalan, lobachevsky, v_n

# High-precision reference values from mpmath (Clausen function Cl_2(2x)/2, mpmath.catalan).
MP_LOBACHEVSKY = {
    0.3: 0.45475039820840901211,
    1.0: 0.36357302543163962371,
    1.2: 0.24839965101847799813,
    2.5: -0.49641006627347835935,
    -0.7: -0.48371600684138949088,
}
MP_V3 = 1.014941606409653625
MP_CATALAN = 0.91596559417721901505

angles = st.floats(min_value=-20.0, max_value=20.0, allow_nan=False)


@pytest.mark.parametrize("theta,expected", sorted(MP_LOBACHEVSKY.items()))
def test_lobachevsky_matches_reference(theta, expected):
    assert abs(lobachevsky(theta) - expected) < 1e-9
    assert abs(lobachevsky(theta, 1e-14) - expected) < 1e-13
    assert abs(specfun.lobachevsky_integral(theta, 1e-11) - expected) < 1e-10


def test_lobachevsky_special_values():
    assert lobachevsky(0.0) == 0.0
    assert abs(lobachevsky(math.pi / 3) - 0.338314) < 1e-5
    assert abs(lobachevsky(math.pi / 6) - 0.507471) < 1e-5
    assert abs(lobachevsky(math.pi / 6, 1e-14) - 1.5 * lobachevsky(math.pi / 3, 1e-14)) < 1e-13
    assert abs(lobachevsky(math.pi / 6) - specfun.lobachevsky_integral(math.pi / 6)) < 1e-9


def test_lobachevsky_at_multiples_of_pi():
    for k in range(-3, 4):
        assert abs(lobachevsky(k * math.pi)) < 1e-14
        assert abs(specfun.lobachevsky_integral(k * math.pi)) < 1e-8


def test_lobachevsky_sine_series_is_a_coarse_check():
    for theta in (0.4, 1.1, 2.0):
        assert abs(specfun.lobachevsky_sine_series(theta) - lobachevsky(theta)) < 1e-5


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_lobachevsky_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        lobachevsky(bad)


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        lobachevsky(1.0, 0.0)
    with pytest.raises(ValueError):
        catalan(-1.0)


def test_reduce_angle_range():
    for theta in np.linspace(-10, 10, 101):
        r = specfun.reduce_angle(theta)
        assert -math.pi / 2 <= r < math.pi / 2
        assert abs(math.sin(r) ** 2 - math.sin(theta) ** 2) < 1e-12


@given(angles)
def test_oddness(theta):
    assert abs(lobachevsky(-theta) + lobachevsky(theta)) <= 2e-9


@given(angles)
def test_periodicity(theta):
    assert abs(lobachevsky(theta + math.pi) - lobachevsky(theta)) <= 2e-9


@given(angles)
def test_duplication_identity(theta):
    lhs = 0.5 * lobachevsky(2 * theta)
    assert abs(lhs - lobachevsky(theta) - lobachevsky(theta + math.pi / 2)) <= 3e-9


@given(angles)
def test_maximum_at_pi_over_six(theta):
    # L is maximal at pi/6, where its derivative -log|2 sin| vanishes.
    assert lobachevsky(theta) <= lobachevsky(math.pi / 6) + 1e-9


@given(st.floats(min_value=-3.0, max_value=3.0))
def test_series_matches_integral(theta):
    assert abs(lobachevsky(theta, 1e-11) - specfun.lobachevsky_integral(theta, 1e-11)) < 1e-9


def test_catalan():
    assert abs(catalan(1e-6) - 0.915965) < 1e-6
    assert abs(catalan() - MP_CATALAN) < 1e-9
    assert abs(catalan(1e-13) - MP_CATALAN) < 1e-12
    for tol in (1e-4, 1e-7, 1e-10):
        check = lobachevsky(math.pi / 2, 1e-14) + 2 * lobachevsky(math.pi / 4, 1e-14)
        assert abs(catalan(tol) - check) <= 2 * tol


def test_catalan_partial_sums_bracket():
    sums = specfun.catalan_partial_sums(200)
    assert np.all(sums[0::2] > MP_CATALAN)
    assert np.all(sums[1::2] < MP_CATALAN)


def test_v_n_values():
    assert v_n(2) == math.pi
    assert abs(v_n(3) - MP_V3) < 1e-9
    assert abs(v_n(3, 1e-13) - MP_V3) < 1e-12
    assert abs(v_n(3) - 1.014942) < 1e-5
    with pytest.raises(ValueError):
        v_n(1)


def test_v4_two_schemes_agree():
    from hypvol.hypgeom import regular_ideal_simplex, signed_volume
    gauss = v_n(4, 1e-9)
    midpoint = signed_volume(regular_ideal_simplex(4), 5e-3, scheme="midpoint")
    assert abs(gauss - midpoint) < 1e-3
    assert abs(gauss - 0.268895660169) < 1e-9


def test_constant_inequalities():
    v3, G = v_n(3), catalan()
    assert 2 * (v3 - G) <= v3 / 2
    assert 3 * (v3 - G) <= v3


def test_special_constants_record():
    c = specfun.special_constants()
    assert c["v2"] == math.pi
    assert abs(c["v3"] - 3 * lobachevsky(math.pi / 3)) < 1e-9
    assert abs(c["catalan_G"] - MP_CATALAN) < 1e-9
