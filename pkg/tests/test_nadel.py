import random
from fractions import Fraction
from itertools import product
from math import comb

import pytest

from shared.config import get_settings
from shared.jetcalc import JetPoly2, wronskian_from_christoffel
from shared.nadel import (
    CapacityError,
    FamilyError,
    SurfaceFamily,
    fermat_deformation,
    fermat_pole_candidate,
    h0_sym_cotangent_p3,
    jacobian_determinant,
    nadel_exclusion_budget,
    pole_divisor,
    smoothness_criterion,
    solve_connection,
    sym_vanishing_bound,
    z_degree,
)
from shared.polyalg import MPoly, RatFunc, SingularSystemError


Z = [MPoly.variable(f"z{i}") for i in range(4)]


@pytest.fixture(autouse=True)
def _reset_settings_cache():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def _positive_compositions(d):
    return [k for k in product(range(1, d), repeat=4) if sum(k) == d]


def test_fermat_family_sections():
    fam = fermat_deformation(6, (1, 2, 2, 1))
    assert [z_degree(s) for s in fam.s] == [6, 6, 6, 6]
    assert fam.s[1] == Z[1] ** 6
    a = MPoly.variable("a")
    assert fam.s[0] == Z[0] ** 6 + a * Z[0] * Z[1] ** 2 * Z[2] ** 2 * Z[3]
    with pytest.raises(FamilyError):
        fermat_deformation(5, (1, 1, 1, 1))
    with pytest.raises(FamilyError):
        fermat_deformation(5, (6, -1, 0, 0))
    with pytest.raises(FamilyError):
        SurfaceFamily(3, (Z[0] ** 3 + Z[1], Z[1] ** 3, Z[2] ** 3, Z[3] ** 3))


def test_jacobian_determinant_of_fermat_surface():
    fam = fermat_deformation(5, (2, 1, 1, 1)).specialize(Fraction(0))
    assert jacobian_determinant(fam) == 625 * (Z[0] * Z[1] * Z[2] * Z[3]) ** 4


def test_diagonal_connection_at_a_zero():
    d = 5
    gamma = solve_connection(fermat_deformation(d, (2, 1, 1, 1)).specialize(Fraction(0)))
    for (i, j, k), entry in gamma.entries():
        if i == j == k:
            assert entry == RatFunc(d - 1, Z[i])
        else:
            assert entry.is_zero()


def test_degree_six_connection():
    k = (1, 2, 2, 1)
    fam = fermat_deformation(6, k)
    gamma = solve_connection(fam)
    residuals = gamma.residuals(fam)
    assert len(residuals) == 64
    assert all(value.is_zero() for value in residuals.values())
    assert gamma.is_homogeneous_of_degree(-1)

    candidate = fermat_pole_candidate(6, k)
    assert candidate == 6 * Z[0] ** 5 + MPoly.variable("a") * Z[1] ** 2 * Z[2] ** 2 * Z[3]
    divisor = pole_divisor(gamma, [candidate])
    assert candidate.normalized() in divisor.factors()
    assert Z[0] in divisor.factors()
    assert divisor.total_degree == 9
    assert divisor.ratio_to_canonical(6) == Fraction(9, 2)
    assert divisor.coordinate_powers == (0, 1, 1, 1)
    assert Z[0] not in divisor.denominator_factors()
    assert divisor.denominator_factors() == [Z[1], Z[2], Z[3], candidate.normalized()]
    assert not divisor.unmatched


@pytest.mark.parametrize("d", [5, 6, 7, 8])
def test_every_positive_composition(d):
    for k in _positive_compositions(d):
        fam = fermat_deformation(d, k)
        gamma = solve_connection(fam)
        assert all(value.is_zero() for value in gamma.residuals(fam).values())
        assert gamma.is_homogeneous_of_degree(-1)
        divisor = pole_divisor(gamma, [fermat_pole_candidate(d, k)])
        assert divisor.total_degree == 4 + k[1] + k[2] + k[3]
        assert not divisor.unmatched


def test_pole_divisor_without_candidates_keeps_residual():
    k = (1, 2, 2, 1)
    divisor = pole_divisor(solve_connection(fermat_deformation(6, k)))
    assert divisor.unmatched
    assert divisor.total_degree == 9


def test_specialized_family_still_solves():
    fam = fermat_deformation(6, (2, 2, 1, 1)).specialize(Fraction(3))
    gamma = solve_connection(fam)
    assert all(value.is_zero() for value in gamma.residuals(fam).values())


def test_threaded_solve_matches_serial(monkeypatch):
    fam = fermat_deformation(5, (2, 1, 1, 1))
    serial = solve_connection(fam)
    monkeypatch.setenv("HYPERCERT_THREADS", "4")
    get_settings.cache_clear()
    assert solve_connection(fam) == serial


def test_singular_family():
    fam = SurfaceFamily(3, (Z[0] ** 3, Z[0] ** 3, Z[2] ** 3, Z[3] ** 3))
    with pytest.raises(SingularSystemError):
        solve_connection(fam)


def test_chart_wronskian_at_a_zero():
    d = 5
    gamma = solve_connection(fermat_deformation(d, (2, 1, 1, 1)).specialize(Fraction(0)))
    terms = wronskian_from_christoffel(gamma.chart((1, 2))).as_dict()
    assert set(terms) == {(0, 0, 1), (2, 1, 0), (1, 2, 0)}
    assert terms[(2, 1, 0)] == RatFunc(d - 1, Z[1])
    assert terms[(1, 2, 0)] == -RatFunc(d - 1, Z[2])
    with pytest.raises(FamilyError):
        gamma.chart((1, 1))


def test_chart_wronskian_is_a_weight_three_jet():
    gamma = solve_connection(fermat_deformation(6, (1, 2, 2, 1)))
    wronskian = wronskian_from_christoffel(gamma.chart((0, 3)))
    assert isinstance(wronskian, JetPoly2)
    assert wronskian.m == 3
    assert wronskian.as_dict()[(0, 0, 1)] == 1


def _degree_minus_one_monomial(rng: random.Random) -> RatFunc:
    return RatFunc(Fraction(rng.randint(-6, 6), rng.randint(1, 4)), Z[rng.randrange(4)])


@pytest.mark.parametrize("chart", [(1, 2), (0, 3)])
def test_chart_wronskian_of_solved_connection_is_gauge_invariant(chart):
    rng = random.Random(sum(chart))
    g = solve_connection(fermat_deformation(6, (1, 2, 2, 1))).chart(chart)
    base = wronskian_from_christoffel(g)
    for _ in range(6):
        alpha = [_degree_minus_one_monomial(rng) for _ in range(2)]
        beta = [_degree_minus_one_monomial(rng) for _ in range(2)]
        shifted = [
            [
                [g[i][j][k] + (alpha[i] if j == k else 0) + (beta[j] if i == k else 0) for k in range(2)]
                for j in range(2)
            ]
            for i in range(2)
        ]
        assert wronskian_from_christoffel(shifted) == base


def test_smoothness_criterion():
    criterion = smoothness_criterion(5, (1, 1, 1, 2), Fraction(1))
    assert criterion.relation() == "4 * a^5 = -3125"
    assert criterion.critical_a_power == Fraction(-3125, 4)
    assert criterion.nonsingular
    fermat = smoothness_criterion(5, (5, 0, 0, 0), Fraction(-1))
    assert fermat.lhs_coefficient == 3125
    assert fermat.nonsingular is False
    assert smoothness_criterion(6, (1, 2, 2, 1)).nonsingular is None
    with pytest.raises(FamilyError):
        smoothness_criterion(5, (1, 1, 1, 1))


def test_exclusion_budget_for_sextic():
    budget = nadel_exclusion_budget(6)
    assert (budget.p, budget.epsilon, budget.t1) == (4, 1, 1)
    assert budget.half_plus_t1 == Fraction(3, 2)
    assert budget.bounds[3] == Fraction(1, 4)
    assert budget.epsilon_from_t1 == 0
    assert not budget.epsilon_consistent
    with pytest.raises(FamilyError):
        nadel_exclusion_budget(5)


def test_epsilon_recovered_from_t1_is_parity_of_d():
    for d in range(6, 40):
        budget = nadel_exclusion_budget(d)
        assert 4 <= budget.p <= d + 4
        assert budget.epsilon_from_t1 == d % 2
        assert budget.uniform_bounds[4] == -Fraction(1, 8) + (2 - Fraction(7, 8)) / (d - 4)


def test_sym_vanishing_bound():
    assert sym_vanishing_bound(3, 10) == 5
    assert sym_vanishing_bound(10, 5) == 13


@pytest.mark.parametrize("m, k, expected", [(0, 2, 10), (1, 1, 0), (1, 2, 6), (2, 1, 0)])
def test_h0_examples(m, k, expected):
    assert h0_sym_cotangent_p3(m, k) == expected


def test_h0_cotangent_matches_euler_sequence():
    for k in range(1, 8):
        assert h0_sym_cotangent_p3(1, k) == 4 * comb(k + 2, 3) - comb(k + 3, 3)


def test_h0_vanishing_range():
    for m in range(1, 5):
        for k in range(m - 5, 2 * m):
            assert h0_sym_cotangent_p3(m, k) == 0
    assert h0_sym_cotangent_p3(3, 6) > 0


def test_h0_capacity_and_bad_input(monkeypatch):
    with pytest.raises(CapacityError):
        h0_sym_cotangent_p3(3, 6, max_unknowns=10)
    monkeypatch.setenv("HYPERCERT_H0_MAX_UNKNOWNS", "10")
    get_settings.cache_clear()
    with pytest.raises(CapacityError):
        h0_sym_cotangent_p3(3, 6)
    with pytest.raises(FamilyError):
        h0_sym_cotangent_p3(-1, 2)
