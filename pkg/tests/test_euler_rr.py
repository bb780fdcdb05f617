from fractions import Fraction

import pytest

from shared.chern_ring import SurfaceError, symbolic_surface
from shared.config import get_settings
from shared.euler_rr import (
    TwistClass,
    chi_e2m,
    chi_e2m_quasi_polynomial,
    chi_sym,
    chi_sym_by_roots,
    interpolate,
    leading_coeff_chi_e2m,
    leading_coeff_chi_sym,
    noether_chi,
    p3_surface,
    rank_e2m,
    todd_degree2,
)
from shared.polyalg import MPoly


@pytest.fixture(autouse=True)
def _reset_settings_cache():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def test_p3_surface_chern_numbers():
    quintic = p3_surface(5)
    assert (quintic.c1sq, quintic.c2) == (5, 55)
    assert p3_surface(15).c1sq == 1815
    assert p3_surface(15).c2 == 2565
    assert p3_surface(4).c1sq == 0
    with pytest.raises(SurfaceError):
        p3_surface(0)


@pytest.mark.parametrize("d, expected", [(5, 5), (6, 11), (15, 365)])
def test_noether_formula(d, expected):
    surface = p3_surface(d)
    assert todd_degree2(surface).h4 == expected
    assert noether_chi(surface) == expected
    assert chi_sym(surface, 0) == expected


def test_cotangent_euler_characteristic_of_quintic():
    # h^{1,1} = 45 and h^{1,0} = h^{1,2} = 0
    assert chi_sym(p3_surface(5), 1) == -45


def test_power_sum_and_root_evaluations_agree():
    for d in (5, 7, 12):
        surface = p3_surface(d)
        for t in (0, 1, -2):
            twist = TwistClass.canonical(surface, t) + TwistClass.hyperplane(surface, 1)
            for m in range(31):
                assert chi_sym(surface, m, twist) == chi_sym_by_roots(surface, m, twist)


def test_symbolic_chi_sym_agrees_with_roots():
    surface = symbolic_surface()
    for m in range(8):
        assert chi_sym(surface, m) == chi_sym_by_roots(surface, m)


def test_integral_twists_give_integers():
    surface = p3_surface(6)
    for t in range(-2, 3):
        twist = TwistClass.canonical(surface, t)
        for m in range(12):
            assert chi_sym(surface, m, twist).denominator == 1
            assert chi_e2m(surface, m, twist).denominator == 1


def test_e2m_is_a_sum_over_graded_pieces():
    surface = p3_surface(7)
    L = TwistClass.hyperplane(surface, 2)
    K = TwistClass.canonical(surface)
    assert chi_e2m(surface, 0, L) == chi_sym(surface, 0, L)
    assert chi_e2m(surface, 3, L) == chi_sym(surface, 3, L) + chi_sym(surface, 0, L + K)
    assert chi_e2m(surface, 7, L) == sum(chi_sym(surface, 7 - 3 * j, L + K.scale(j)) for j in range(3))


@pytest.mark.parametrize("m, expected", [(0, 1), (3, 5), (6, 12)])
def test_rank_e2m_examples(m, expected):
    assert rank_e2m(m) == expected


def test_rank_e2m_matches_enumeration():
    for m in range(61):
        # a2 is fixed by a1 and j
        count = sum(1 for j in range(m + 1) for a1 in range(m + 1) if m - 3 * j - a1 >= 0)
        assert rank_e2m(m) == count


def test_leading_coefficients_over_degrees():
    for d in range(5, 31):
        surface = p3_surface(d)
        assert leading_coeff_chi_sym(surface) == (surface.c1sq - surface.c2) / 6
        assert leading_coeff_chi_e2m(surface) == Fraction(d * (4 * d * d - 68 * d + 154), 648)


def test_degree_15_leading_coefficient_with_twist():
    surface = p3_surface(15)
    assert leading_coeff_chi_e2m(surface) == Fraction(510, 648)
    assert leading_coeff_chi_e2m(surface, TwistClass.hyperplane(surface, -1)) == Fraction(510, 648)


def test_symbolic_leading_coefficients():
    surface = symbolic_surface()
    c1sq, c2 = MPoly.variable("c1sq"), MPoly.variable("c2")
    assert leading_coeff_chi_sym(surface) == (c1sq - c2) / 6
    assert leading_coeff_chi_e2m(surface) == (13 * c1sq - 9 * c2) / 648


def test_quasi_polynomial_reproduces_far_values():
    surface = p3_surface(9)
    quasi = chi_e2m_quasi_polynomial(surface)
    assert quasi.period == 3
    for m in (30, 31, 41):
        assert quasi(m) == chi_e2m(surface, m)


def test_interpolate_recovers_coefficients():
    xs = [0, 1, 2, 3]
    ys = [Fraction(2) - x + 3 * x ** 3 for x in xs]
    assert interpolate(xs, ys) == [2, -1, 0, 3]


def test_interpolate_symbolic_values_pads_to_sample_count():
    c = MPoly.variable("c2")
    xs = [0, 1, 2, 3]
    assert interpolate(xs, [c * x + 1 for x in xs]) == [1, c, 0, 0]


def test_too_few_interpolation_samples(monkeypatch):
    monkeypatch.setenv("HYPERCERT_INTERPOLATION_SAMPLES", "5")
    get_settings.cache_clear()
    with pytest.raises(ValueError):
        leading_coeff_chi_sym(p3_surface(5))


def test_negative_m_rejected():
    with pytest.raises(SurfaceError):
        chi_sym(p3_surface(5), -1)
    with pytest.raises(SurfaceError):
        rank_e2m(-1)
