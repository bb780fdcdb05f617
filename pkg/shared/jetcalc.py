"""Invariant 2-jet differentials on a surface.

A ``JetPoly2`` of weight m is a sum of coefficient * f1'^a1 f2'^a2 W^j with
a1 + a2 + 3j = m, where W = f1' f2'' - f1'' f2'. Coefficients are opaque:
rationals, polynomials in free symbols, or rational functions.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from shared.polyalg import (
    InvariantViolation,
    MPoly,
    RatFunc,
    as_mpoly,
    det_fraction_free,
    divides,
    is_zero,
)


logger = logging.getLogger(__name__)

F1 = "f1p"
F2 = "f2p"
F1_SECOND = "f1pp"
F2_SECOND = "f2pp"

# reparametrization symbols: phi'(t) = a1 + 2 a2 t, phi''(t) = 2 a2
PHI_A1 = "rp_a1"
PHI_A2 = "rp_a2"
PHI_T = "rp_t"

DISCRIMINANT_RESULTANT_CONSTANT = Fraction(1)

JetCoefficient = Union[Fraction, MPoly, RatFunc]
JetMonomial = Tuple[int, int, int]


class JetError(ValueError):
    pass


class DegenerateLeadingCoefficientError(JetError):
    pass


def _clean(value) -> JetCoefficient:
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, MPoly) and value.is_constant():
        return value.constant_value()
    if isinstance(value, RatFunc) and value.is_polynomial():
        return _clean(value.num / value.den.constant_value())
    return value


def basis_monomials(m: int) -> List[JetMonomial]:
    """All (a1, a2, j) with a1 + a2 + 3j = m."""
    if m < 0:
        raise JetError(f"weight must be >= 0, got {m}")
    return [(a1, m - 3 * j - a1, j) for j in range(m // 3 + 1) for a1 in range(m - 3 * j, -1, -1)]


@dataclass(frozen=True)
class JetPoly2:
    m: int
    terms: Tuple[Tuple[JetMonomial, JetCoefficient], ...]
    k_weight: int = 0

    @classmethod
    def from_dict(cls, m: int, mapping: Mapping[JetMonomial, object], k_weight: int = 0) -> "JetPoly2":
        kept = []
        for mono, coeff in mapping.items():
            a1, a2, j = mono
            if min(mono) < 0 or a1 + a2 + 3 * j != m:
                raise JetError(f"monomial {mono} does not have weight {m}")
            coeff = _clean(coeff)
            if not is_zero(coeff):
                kept.append((tuple(mono), coeff))
        return cls(m, tuple(sorted(kept, key=lambda item: item[0])), k_weight)

    @classmethod
    def zero(cls, m: int, k_weight: int = 0) -> "JetPoly2":
        return cls(m, (), k_weight)

    @classmethod
    def monomial(cls, a1: int, a2: int, j: int, coeff: object = 1) -> "JetPoly2":
        return cls.from_dict(a1 + a2 + 3 * j, {(a1, a2, j): coeff})

    @classmethod
    def from_w_coefficients(cls, m: int, coefficients: Sequence[object], k_weight: int = 0) -> "JetPoly2":
        """P = sum_j a_j W^j with each a_j a polynomial in f1p, f2p of degree m - 3j."""
        mapping: Dict[JetMonomial, object] = {}
        for j, a_j in enumerate(coefficients):
            for (e1, e2), coeff in _split_f_prime(as_mpoly(a_j)).items():
                if e1 + e2 != m - 3 * j:
                    raise JetError(f"a_{j} has a term of f'-degree {e1 + e2}, expected {m - 3 * j}")
                mapping[(e1, e2, j)] = coeff
        return cls.from_dict(m, mapping, k_weight)

    def as_dict(self) -> Dict[JetMonomial, JetCoefficient]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def w_degree(self) -> int:
        return max((mono[2] for mono, _ in self.terms), default=0)

    def is_w_free(self) -> bool:
        return all(mono[2] == 0 for mono, _ in self.terms)

    def __add__(self, other: "JetPoly2") -> "JetPoly2":
        if not isinstance(other, JetPoly2):
            return NotImplemented
        if (self.m, self.k_weight) != (other.m, other.k_weight):
            raise JetError(
                f"cannot add weight {self.m} (K^{self.k_weight}) and weight {other.m} (K^{other.k_weight})"
            )
        merged = self.as_dict()
        for mono, coeff in other.terms:
            merged[mono] = merged[mono] + coeff if mono in merged else coeff
        return JetPoly2.from_dict(self.m, merged, self.k_weight)

    def __neg__(self) -> "JetPoly2":
        return JetPoly2(self.m, tuple((mono, -coeff) for mono, coeff in self.terms), self.k_weight)

    def __sub__(self, other: "JetPoly2") -> "JetPoly2":
        if not isinstance(other, JetPoly2):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "JetPoly2":
        if isinstance(other, JetPoly2):
            product: Dict[JetMonomial, JetCoefficient] = {}
            for (a1, a2, j), ca in self.terms:
                for (b1, b2, k), cb in other.terms:
                    mono = (a1 + b1, a2 + b2, j + k)
                    coeff = ca * cb
                    product[mono] = product[mono] + coeff if mono in product else coeff
            return JetPoly2.from_dict(self.m + other.m, product, self.k_weight + other.k_weight)
        if isinstance(other, (int, Fraction, MPoly, RatFunc)):
            return JetPoly2.from_dict(self.m, {mono: c * other for mono, c in self.terms}, self.k_weight)
        return NotImplemented

    __rmul__ = __mul__

    def w_coefficients(self) -> List[MPoly]:
        """[a_0, ..., a_p] as polynomials in f1p, f2p."""
        p = self.m // 3
        coeffs = [MPoly.constant(0) for _ in range(p + 1)]
        for (a1, a2, j), coeff in self.terms:
            if isinstance(coeff, RatFunc):
                raise JetError("w_coefficients needs polynomial coefficients")
            coeffs[j] = coeffs[j] + MPoly.monomial({F1: a1, F2: a2}, 1) * coeff
        return coeffs

    def to_expression(self) -> MPoly:
        """Expansion in f1p, f2p, f1pp, f2pp with W written out."""
        w = MPoly.variable(F1) * MPoly.variable(F2_SECOND) - MPoly.variable(F1_SECOND) * MPoly.variable(F2)
        total = MPoly.constant(0)
        for (a1, a2, j), coeff in self.terms:
            if isinstance(coeff, RatFunc):
                raise JetError("to_expression needs polynomial coefficients")
            total = total + MPoly.monomial({F1: a1, F2: a2}, 1) * w ** j * coeff
        return total


def _split_f_prime(poly: MPoly) -> Dict[Tuple[int, int], MPoly]:
    split: Dict[Tuple[int, int], MPoly] = {}
    for e1, part in (poly.as_univariate(F1).items() if F1 in poly.variables else [(0, poly)]):
        for e2, coeff in (part.as_univariate(F2).items() if F2 in part.variables else [(0, part)]):
            rest = coeff.substitute({name: 0 for name in (F1, F2) if name in coeff.variables})
            if not rest.is_zero():
                split[(e1, e2)] = rest
    return split


def phi_filtration(P: JetPoly2) -> JetPoly2:
    """E_{2,m}T* -> E_{2,m-3}T* (x) K: keep the W-divisible part and divide by W."""
    if P.m < 3:
        raise JetError(f"the filtration map needs weight >= 3, got {P.m}")
    image = {(a1, a2, j - 1): coeff for (a1, a2, j), coeff in P.terms if j >= 1}
    return JetPoly2.from_dict(P.m - 3, image, P.k_weight + 1)


def proportionality_combination(P1: JetPoly2, P2: JetPoly2) -> JetPoly2:
    """beta1 P2 - beta2 P1 with beta_i = Phi(P_i); lands in S^{m1+m2-3} T*."""
    for P in (P1, P2):
        if P.m not in (3, 4, 5):
            raise JetError(f"weights must lie in {{3, 4, 5}}, got {P.m}")
    result = phi_filtration(P1) * P2 - phi_filtration(P2) * P1
    if not phi_filtration(result).is_zero():
        raise InvariantViolation("proportionality combination is not W-free")
    return result


@dataclass(frozen=True)
class Discriminant:
    value: MPoly
    p: int
    q: int
    f_degree: int
    k_weight: int


def _split_weight(m: int) -> Tuple[int, int]:
    p, q = divmod(m, 3)
    if p < 1:
        raise JetError(f"the discriminant needs weight m = 3p + q with p >= 1, got m = {m}")
    return p, q


def discriminant_matrix(P: JetPoly2) -> List[List[MPoly]]:
    """(2p-1)x(2p-1) matrix: p-1 shifted rows of a_0..a_p, then p shifted rows of b_0..b_{p-1}."""
    p, _ = _split_weight(P.m)
    a = P.w_coefficients()
    b = [(j + 1) * a[j + 1] for j in range(p)]
    size = 2 * p - 1
    zero = MPoly.constant(0)
    rows = []
    for shift in range(p - 1):
        rows.append([a[c - shift] if 0 <= c - shift <= p else zero for c in range(size)])
    for shift in range(p):
        rows.append([b[c - shift] if 0 <= c - shift <= p - 1 else zero for c in range(size)])
    return rows


def resultant_in_w(P: JetPoly2) -> MPoly:
    """Res_W(P, dP/dW) from the classical Sylvester matrix in descending powers."""
    p, _ = _split_weight(P.m)
    a = P.w_coefficients()
    derived = [(j + 1) * a[j + 1] for j in range(p)]
    size = 2 * p - 1
    zero = MPoly.constant(0)
    descending_p = list(reversed(a))
    descending_d = list(reversed(derived))
    rows = []
    for shift in range(p - 1):
        rows.append([descending_p[c - shift] if 0 <= c - shift <= p else zero for c in range(size)])
    for shift in range(p):
        rows.append([descending_d[c - shift] if 0 <= c - shift <= p - 1 else zero for c in range(size)])
    return det_fraction_free(rows)


def discriminant(P: JetPoly2) -> Discriminant:
    """Delta(P) = det(discriminant_matrix(P)) / a_p, homogeneous in f' of degree (p-1)(3p+2q)."""
    p, q = _split_weight(P.m)
    a = P.w_coefficients()
    lead = a[p]
    if lead.is_zero():
        raise DegenerateLeadingCoefficientError(f"leading coefficient a_{p} vanishes identically")
    det = det_fraction_free(discriminant_matrix(P))
    value = divides(lead, det)
    if value is None:
        raise InvariantViolation("discriminant determinant is not divisible by a_p")
    value = value * DISCRIMINANT_RESULTANT_CONSTANT
    f_degree = (p - 1) * (3 * p + 2 * q)
    idx = [i for i, name in enumerate(value.variables) if name in (F1, F2)]
    for exps in value.terms:
        if sum(exps[i] for i in idx) != f_degree:
            raise InvariantViolation(f"discriminant term of f'-degree {sum(exps[i] for i in idx)}, expected {f_degree}")
    return Discriminant(value, p, q, f_degree, p * (p - 1))


def discriminant_threshold_bound(m: int, theta1: Fraction) -> Fraction:
    """Lower bound for t/m from a nonzero discriminant section, m = 3p + q >= 6."""
    p, q = divmod(m, 3)
    if p < 2:
        raise JetError(f"the discriminant bound needs m >= 6, got {m}")
    theta1 = Fraction(theta1)
    bound = Fraction(3 * p + 2 * q, 2 * m) * theta1 - Fraction(p, 2 * m)
    if theta1 >= 0 and bound < theta1 / 2 - Fraction(1, 6):
        raise InvariantViolation(f"discriminant bound {bound} fell below theta1/2 - 1/6")
    return bound


# -- reparametrization ----------------------------------------------------


@dataclass(frozen=True)
class Reparam2:
    """The 2-jet phi(t) = a1 t + a2 t^2."""

    a1: Union[Fraction, MPoly]
    a2: Union[Fraction, MPoly]

    def __post_init__(self) -> None:
        if is_zero(self.a1):
            raise JetError("a1 must be invertible")

    @classmethod
    def symbolic(cls) -> "Reparam2":
        return cls(MPoly.variable(PHI_A1), MPoly.variable(PHI_A2))


def reparam_check_expression(expr: MPoly, m: int, phi: Optional[Reparam2] = None) -> bool:
    """Whether expr(f o phi) == phi'^m expr(f) o phi identically in the jet symbols."""
    phi = phi or Reparam2.symbolic()
    t = MPoly.variable(PHI_T)
    first = as_mpoly(phi.a1) + 2 * as_mpoly(phi.a2) * t
    second = 2 * as_mpoly(phi.a2)
    mapping = {
        F1: first * MPoly.variable(F1),
        F2: first * MPoly.variable(F2),
        F1_SECOND: first * first * MPoly.variable(F1_SECOND) + second * MPoly.variable(F1),
        F2_SECOND: first * first * MPoly.variable(F2_SECOND) + second * MPoly.variable(F2),
    }
    present = {name: value for name, value in mapping.items() if name in expr.variables}
    transformed = expr.substitute(present) if present else expr
    return transformed == first ** m * expr


def reparam_check(P: JetPoly2, phi: Optional[Reparam2] = None) -> bool:
    return reparam_check_expression(P.to_expression(), P.m, phi)


def wronskian_from_christoffel(gamma: Sequence[Sequence[Sequence[object]]]) -> JetPoly2:
    """W_nabla(f) = f' ^ f''_nabla on a 2-dimensional chart; gamma[i][j][k] is Gamma^k_ij."""
    if len(gamma) != 2 or any(len(row) != 2 or any(len(cell) != 2 for cell in row) for row in gamma):
        raise JetError("chart Christoffel symbols must form a 2x2x2 array")
    g = gamma
    coefficients = {
        (0, 0, 1): Fraction(1),
        (3, 0, 0): -g[0][0][1],
        (0, 3, 0): g[1][1][0],
        (2, 1, 0): g[0][0][0] - g[0][1][1] - g[1][0][1],
        (1, 2, 0): -(g[1][1][1] - g[0][1][0] - g[1][0][0]),
    }
    return JetPoly2.from_dict(3, coefficients)
