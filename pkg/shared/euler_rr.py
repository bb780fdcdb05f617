"""Euler characteristics of S^m T*_X and E_{2,m} T*_X by Hirzebruch-Riemann-Roch."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sympy import Dummy, Poly
from sympy import interpolate as sympy_interpolate

from shared.chern_ring import CohClass, SurfaceData, SurfaceError, simplify
from shared.config import get_settings
from shared.polyalg import Coefficient, InvariantViolation, from_expr, is_zero, to_expr


logger = logging.getLogger(__name__)

E2M_DEGREE = 4
SYM_DEGREE = 3


@dataclass(frozen=True)
class TwistClass:
    coords: Tuple[Coefficient, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(simplify(x) for x in self.coords))

    @classmethod
    def zero(cls, surface: SurfaceData) -> "TwistClass":
        return cls(surface.zero_coords())

    @classmethod
    def canonical(cls, surface: SurfaceData, t: Coefficient = 1) -> "TwistClass":
        """t K_X, written as -t c1."""
        return cls(tuple(-Fraction(t) * x for x in surface.c1_coords))

    @classmethod
    def hyperplane(cls, surface: SurfaceData, k: Coefficient = 1) -> "TwistClass":
        coords = [Fraction(0)] * surface.rank
        coords[0] = Fraction(k)
        return cls(tuple(coords))

    def __add__(self, other: "TwistClass") -> "TwistClass":
        if not isinstance(other, TwistClass):
            return NotImplemented
        return TwistClass(tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> "TwistClass":
        return TwistClass(tuple(-x for x in self.coords))

    def scale(self, factor: Coefficient) -> "TwistClass":
        return TwistClass(tuple(x * factor for x in self.coords))

    def is_integral(self) -> bool:
        return all(isinstance(x, Fraction) and x.denominator == 1 for x in self.coords)


def p3_surface(d: int) -> SurfaceData:
    """Smooth degree-d surface in P^3 with Pic generated by the hyperplane class h."""
    if d < 1:
        raise SurfaceError(f"degree must be >= 1, got {d}")
    surface = SurfaceData(
        c1sq=Fraction(d * (d - 4) ** 2),
        c2=Fraction(d * (d * d - 4 * d + 6)),
        pic_basis=("h",),
        pic_form=((Fraction(d),),),
        c1_coords=(Fraction(4 - d),),
        label=f"P3-degree-{d}",
    )
    return surface


def todd_degree2(surface: SurfaceData) -> CohClass:
    return CohClass(
        Fraction(1),
        tuple(x / 2 for x in surface.c1_coords),
        (surface.c1sq + surface.c2) / 12,
        surface,
    )


def noether_chi(surface: SurfaceData) -> Coefficient:
    return simplify(todd_degree2(surface).h4)


def _integrality_applies(surface: SurfaceData, twist: TwistClass) -> bool:
    if not surface.is_integral() or not twist.is_integral():
        return False
    if (surface.c1sq + surface.c2) % 12:
        return False
    for i in range(surface.rank):
        e = [Fraction(int(i == j)) for j in range(surface.rank)]
        # adjunction parity e.e + K.e
        if (surface.pair(e, e) - surface.pair(surface.c1_coords, e)) % 2:
            return False
    return True


def _assert_integral(surface: SurfaceData, twist: TwistClass, value: Coefficient, what: str) -> None:
    if _integrality_applies(surface, twist) and Fraction(value).denominator != 1:
        raise InvariantViolation(f"{what} = {value} is not an integer for an integral twist")


def chi_sym(surface: SurfaceData, m: int, L: Optional[TwistClass] = None) -> Coefficient:
    """chi(X, S^m T*_X (x) L) from power sums of the Chern roots."""
    if m < 0:
        raise SurfaceError(f"m must be >= 0, got {m}")
    L = L or TwistClass.zero(surface)
    todd = todd_degree2(surface)
    c1 = surface.c1_coords
    rank = m + 1
    sum_sq = Fraction(m * (m + 1) * (2 * m + 1), 6)
    sum_mixed = Fraction(m * (m + 1) * (m - 1), 6)
    # ch_1 = -m(m+1)/2 c1 + (m+1) l
    p1 = tuple(Fraction(-m * (m + 1), 2) * x + rank * y for x, y in zip(c1, L.coords))
    p2 = (
        sum_sq * (surface.c1sq - 2 * surface.c2)
        + 2 * sum_mixed * surface.c2
        - m * (m + 1) * surface.pair(c1, L.coords)
        + rank * surface.pair(L.coords, L.coords)
    )
    value = simplify(rank * todd.h4 + surface.pair(p1, todd.h2) + p2 / 2)
    _assert_integral(surface, L, value, f"chi(S^{m} T*)")
    return value


def chi_sym_by_roots(surface: SurfaceData, m: int, L: Optional[TwistClass] = None) -> Coefficient:
    """Root-by-root evaluation of chi_sym, used as an independent check."""
    if m < 0:
        raise SurfaceError(f"m must be >= 0, got {m}")
    L = L or TwistClass.zero(surface)
    # root i is -(i alpha + (m-i) beta) + l
    alpha2 = beta2 = mixed = Fraction(0)
    alpha1 = beta1 = Fraction(0)
    for i in range(m + 1):
        a, b = Fraction(-i), Fraction(-(m - i))
        alpha2 += a * a
        beta2 += b * b
        mixed += 2 * a * b
        alpha1 += a
        beta1 += b
    if alpha2 != beta2 or alpha1 != beta1:
        raise InvariantViolation("root sums are not symmetric in alpha, beta")
    c1, ell = surface.c1_coords, L.coords
    # squares: alpha^2 + beta^2 = c1^2 - 2 c2, alpha beta = c2; cross terms 2 l (alpha + beta) = 2 l.c1
    ch2 = (
        alpha2 * (surface.c1sq - 2 * surface.c2)
        + mixed * surface.c2
        + 2 * alpha1 * surface.pair(c1, ell)
        + (m + 1) * surface.pair(ell, ell)
    ) / 2
    ch1_dot_c1 = alpha1 * surface.c1sq + (m + 1) * surface.pair(ell, c1)
    return simplify((m + 1) * (surface.c1sq + surface.c2) / 12 + ch1_dot_c1 / 2 + ch2)


def chi_e2m(surface: SurfaceData, m: int, L: Optional[TwistClass] = None) -> Coefficient:
    """chi(X, E_{2,m} T*_X (x) L), summed over the graded pieces S^{m-3j} T* (x) K^j."""
    if m < 0:
        raise SurfaceError(f"m must be >= 0, got {m}")
    L = L or TwistClass.zero(surface)
    canonical = TwistClass.canonical(surface)
    total: Coefficient = Fraction(0)
    for j in range(m // 3 + 1):
        total = total + chi_sym(surface, m - 3 * j, L + canonical.scale(j))
    return simplify(total)


def rank_e2m(m: int) -> int:
    if m < 0:
        raise SurfaceError(f"m must be >= 0, got {m}")
    return sum(m - 3 * j + 1 for j in range(m // 3 + 1))


# -- exact interpolation --------------------------------------------------


def interpolate(xs: Sequence[int], ys: Sequence[Coefficient]) -> List[Coefficient]:
    """Ascending monomial coefficients of the polynomial through (xs, ys)."""
    m = Dummy("m")
    fitted = Poly(sympy_interpolate([(x, to_expr(y)) for x, y in zip(xs, ys)], m), m)
    coeffs: List[Coefficient] = [simplify(from_expr(c)) for c in reversed(fitted.all_coeffs())]
    return coeffs + [Fraction(0)] * (len(xs) - len(coeffs))


def _evaluate(coeffs: Sequence[Coefficient], x: int) -> Coefficient:
    value: Coefficient = Fraction(0)
    for c in reversed(coeffs):
        value = value * x + c
    return simplify(value)


def _fit(xs: Sequence[int], ys: Sequence[Coefficient], degree: int, what: str) -> List[Coefficient]:
    coeffs = interpolate(xs[: degree + 1], ys[: degree + 1])
    for x, y in zip(xs[degree + 1:], ys[degree + 1:]):
        if not is_zero(simplify(_evaluate(coeffs, x) - y)):
            raise InvariantViolation(f"{what} is not a polynomial of degree {degree} at m = {x}")
    return coeffs


def _sample_count() -> int:
    samples = get_settings().interpolation_samples
    if samples < 6:
        raise ValueError(f"interpolation_samples must be >= 6, got {samples}")
    return samples


@dataclass(frozen=True)
class QuasiPolynomial:
    """One exact polynomial in m per residue class m mod period."""

    period: int
    classes: Tuple[Tuple[Coefficient, ...], ...]

    def leading(self, degree: int) -> Coefficient:
        values = {c[degree] if len(c) > degree else Fraction(0) for c in self.classes}
        if len(values) != 1:
            raise InvariantViolation(f"residue classes disagree on the m^{degree} coefficient: {values}")
        return values.pop()

    def __call__(self, m: int) -> Coefficient:
        return _evaluate(self.classes[m % self.period], m)


def chi_e2m_quasi_polynomial(surface: SurfaceData, L: Optional[TwistClass] = None) -> QuasiPolynomial:
    samples = max(_sample_count(), E2M_DEGREE + 2)
    classes = []
    for residue in range(3):
        ms = [residue + 3 * t for t in range(samples)]
        values = [chi_e2m(surface, m, L) for m in ms]
        classes.append(tuple(_fit(ms, values, E2M_DEGREE, f"chi(E_2,m) on m = {residue} mod 3")))
    logger.debug("fitted chi(E_2,m) quasi-polynomial on %d points per class", samples)
    return QuasiPolynomial(3, tuple(classes))


def leading_coeff_chi_e2m(surface: SurfaceData, L: Optional[TwistClass] = None) -> Coefficient:
    """Certified m^4 coefficient of chi(E_{2,m} T*_X), equal to (13 c1^2 - 9 c2)/648."""
    leading = simplify(chi_e2m_quasi_polynomial(surface, L).leading(E2M_DEGREE))
    expected = simplify((13 * surface.c1sq - 9 * surface.c2) / 648)
    if not is_zero(simplify(leading - expected)):
        raise InvariantViolation(f"m^4 coefficient {leading} differs from (13c1^2 - 9c2)/648 = {expected}")
    return leading


def leading_coeff_chi_sym(surface: SurfaceData, L: Optional[TwistClass] = None) -> Coefficient:
    """Certified m^3 coefficient of chi(S^m T*_X), equal to (c1^2 - c2)/6."""
    samples = _sample_count()
    ms = list(range(samples))
    coeffs = _fit(ms, [chi_sym(surface, m, L) for m in ms], SYM_DEGREE, "chi(S^m T*)")
    expected = simplify((surface.c1sq - surface.c2) / 6)
    if not is_zero(simplify(coeffs[SYM_DEGREE] - expected)):
        raise InvariantViolation(f"m^3 coefficient {coeffs[SYM_DEGREE]} differs from (c1^2 - c2)/6 = {expected}")
    return coeffs[SYM_DEGREE]
