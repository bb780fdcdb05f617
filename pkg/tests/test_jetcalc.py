import random
from fractions import Fraction

import pytest
import sympy

from shared.euler_rr import rank_e2m
from shared.jetcalc import (
    DISCRIMINANT_RESULTANT_CONSTANT,
    F1,
    F2,
    DegenerateLeadingCoefficientError,
    JetError,
    JetPoly2,
    Reparam2,
    basis_monomials,
    discriminant,
    discriminant_matrix,
    discriminant_threshold_bound,
    phi_filtration,
    proportionality_combination,
    reparam_check,
    reparam_check_expression,
    resultant_in_w,
    wronskian_from_christoffel,
)
from shared.polyalg import MPoly


def _rational(rng: random.Random) -> Fraction:
    value = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
    return value or Fraction(1)


def _form(rng: random.Random, degree: int, n_terms: int = 2) -> MPoly:
    """Random nonzero binary form in f1p, f2p."""
    poly = MPoly.constant(0)
    for _ in range(n_terms):
        e1 = rng.randint(0, degree)
        poly = poly + MPoly.monomial({F1: e1, F2: degree - e1}, _rational(rng))
    if poly.is_zero():
        poly = MPoly.monomial({F1: degree}, 1)
    return poly


def _random_jet(rng: random.Random, m: int) -> JetPoly2:
    p = m // 3
    return JetPoly2.from_w_coefficients(m, [_form(rng, m - 3 * j) for j in range(p + 1)])


def _from_w_polynomial(expr: MPoly, m: int) -> JetPoly2:
    parts = expr.as_univariate("w")
    return JetPoly2.from_w_coefficients(m, [parts.get(j, MPoly.constant(0)) for j in range(max(parts) + 1)])


def _to_sympy(poly: MPoly):
    return sympy.sympify(poly.to_text().replace("^", "**"))


def test_basis_size_matches_rank():
    for m in range(21):
        monomials = basis_monomials(m)
        assert len(monomials) == len(set(monomials)) == rank_e2m(m)
        assert all(a1 + a2 + 3 * j == m for a1, a2, j in monomials)


def test_weight_is_enforced():
    with pytest.raises(JetError):
        JetPoly2.from_dict(4, {(1, 1, 1): 1})
    with pytest.raises(JetError):
        JetPoly2.monomial(1, 0, 0) + JetPoly2.monomial(2, 0, 0)


def test_phi_filtration():
    assert phi_filtration(JetPoly2.monomial(3, 1, 0)).is_zero()
    beta = phi_filtration(JetPoly2.monomial(0, 0, 1, coeff=Fraction(5, 2)))
    assert beta.m == 0
    assert beta.k_weight == 1
    assert beta.as_dict() == {(0, 0, 0): Fraction(5, 2)}
    with pytest.raises(JetError):
        phi_filtration(JetPoly2.monomial(2, 0, 0))


def test_proportionality_combination_is_w_free():
    rng = random.Random(52)
    for _ in range(50):
        m1, m2 = rng.choice((3, 4, 5)), rng.choice((3, 4, 5))
        P1, P2 = _random_jet(rng, m1), _random_jet(rng, m2)
        combined = proportionality_combination(P1, P2)
        assert combined.m == m1 + m2 - 3
        assert combined.is_w_free()
        assert phi_filtration(combined).is_zero()
    P = _random_jet(rng, 4)
    assert proportionality_combination(P, P).is_zero()
    with pytest.raises(JetError):
        proportionality_combination(_random_jet(rng, 6), P)


def test_quadratic_discriminant():
    rng = random.Random(6)
    a0, a1, a2 = _form(rng, 6), _form(rng, 3), MPoly.constant(3)
    P = JetPoly2.from_w_coefficients(6, [a0, a1, a2])
    result = discriminant(P)
    assert result.value == 4 * a0 * a2 - a1 * a1
    assert (result.p, result.q, result.f_degree, result.k_weight) == (2, 0, 6, 2)


def test_weight_three_discriminant_is_constant():
    P = JetPoly2.from_w_coefficients(4, [_form(random.Random(1), 4), MPoly.monomial({F1: 1}, 2)])
    result = discriminant(P)
    assert result.f_degree == 0
    assert result.value.is_constant()
    assert len(discriminant_matrix(P)) == 1


@pytest.mark.parametrize("m", [6, 7, 8, 9, 10, 11])
def test_discriminant_matches_classical_resultant(m):
    rng = random.Random(m)
    w = sympy.Symbol("w")
    for _ in range(8):
        P = _random_jet(rng, m)
        result = discriminant(P)
        lead = P.w_coefficients()[result.p]
        assert result.value * lead == resultant_in_w(P) * DISCRIMINANT_RESULTANT_CONSTANT
        expr = sum(_to_sympy(a) * w ** j for j, a in enumerate(P.w_coefficients()))
        theirs = sympy.resultant(expr, sympy.diff(expr, w), w)
        assert sympy.expand(theirs - _to_sympy(resultant_in_w(P))) == 0
        assert result.f_degree == (result.p - 1) * (3 * result.p + 2 * result.q)
        assert result.k_weight == result.p * (result.p - 1)


def test_quartic_in_w_degrees():
    rng = random.Random(12)
    result = discriminant(_random_jet(rng, 12))
    assert (result.f_degree, result.k_weight) == (36, 12)


def test_discriminant_vanishes_on_double_roots():
    rng = random.Random(17)
    w = MPoly.variable("w")
    for _ in range(5):
        r = _form(rng, 3)
        # p = 2, q = 1
        P = _from_w_polynomial((w - r) ** 2 * _form(rng, 1), 7)
        assert discriminant(P).value.is_zero()
        # p = 3, q = 0
        P = _from_w_polynomial((w - r) ** 2 * (2 * w - _form(rng, 3)), 9)
        assert discriminant(P).value.is_zero()


def test_degenerate_leading_coefficient():
    P = JetPoly2.from_w_coefficients(6, [MPoly.monomial({F1: 6}, 1), MPoly.monomial({F2: 3}, 1)])
    with pytest.raises(DegenerateLeadingCoefficientError):
        discriminant(P)
    with pytest.raises(JetError):
        discriminant(JetPoly2.monomial(2, 0, 0))


def test_discriminant_threshold_bound():
    assert discriminant_threshold_bound(6, Fraction(1, 3)) == Fraction(1, 6) - Fraction(1, 6)
    assert discriminant_threshold_bound(7, Fraction(1)) == Fraction(8, 14) - Fraction(2, 14)
    for m in range(6, 40):
        assert discriminant_threshold_bound(m, Fraction(1, 17)) >= Fraction(1, 34) - Fraction(1, 6)
    with pytest.raises(JetError):
        discriminant_threshold_bound(5, Fraction(1))


def test_basis_monomials_are_reparametrization_invariant():
    rng = random.Random(20)
    phis = [Reparam2(_rational(rng), _rational(rng)) for _ in range(8)]
    for m in range(10):
        combined = JetPoly2.zero(m)
        for a1, a2, j in basis_monomials(m):
            monomial = JetPoly2.monomial(a1, a2, j)
            assert reparam_check(monomial)
            combined = combined + monomial * _rational(rng)
        for phi in phis:
            assert reparam_check(combined, phi)


def test_non_invariant_expression_detected():
    assert not reparam_check_expression(MPoly.variable("f1pp"), 2)
    assert reparam_check_expression(MPoly.variable("f1p") ** 3, 3)
    with pytest.raises(JetError):
        Reparam2(Fraction(0), Fraction(1))


def _symbolic_gamma():
    return [[[MPoly.variable(f"g{k}_{i}{j}") for k in range(2)] for j in range(2)] for i in range(2)]


def test_flat_wronskian_is_w():
    zero = [[[Fraction(0)] * 2 for _ in range(2)] for _ in range(2)]
    assert wronskian_from_christoffel(zero) == JetPoly2.monomial(0, 0, 1)


def test_wronskian_coefficients():
    g = _symbolic_gamma()
    P = wronskian_from_christoffel(g).as_dict()
    assert P[(0, 0, 1)] == 1
    assert P[(3, 0, 0)] == -g[0][0][1]
    assert P[(0, 3, 0)] == g[1][1][0]
    assert P[(2, 1, 0)] == g[0][0][0] - g[0][1][1] - g[1][0][1]
    assert P[(1, 2, 0)] == g[0][1][0] + g[1][0][0] - g[1][1][1]


def test_wronskian_gauge_invariance():
    rng = random.Random(33)
    g = _symbolic_gamma()
    base = wronskian_from_christoffel(g)
    for _ in range(20):
        alpha = [_rational(rng) for _ in range(2)]
        beta = [_rational(rng) for _ in range(2)]
        shifted = [
            [[g[i][j][k] + alpha[i] * (j == k) + beta[j] * (i == k) for k in range(2)] for j in range(2)]
            for i in range(2)
        ]
        assert wronskian_from_christoffel(shifted) == base
